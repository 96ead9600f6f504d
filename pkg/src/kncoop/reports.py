"""Structured check reports shared by the CLI commands and the suite.

A report is a plain dict: schema tag, command name, the configuration that
produced it (always including the seed), and an ordered list of checks.
Serialization is canonical, so two runs with the same config produce the
same bytes once the volatile fields (wall-clock timings) are stripped.
"""

import json
import time

SCHEMA = 1

# fields excluded from byte-for-byte comparison
VOLATILE = ("elapsed",)


class Report:
    def __init__(self, command, config):
        self.command = command
        self.config = dict(config)
        self.config.setdefault("seed", 0)
        self.checks = []

    def check(self, name, ok, witness=None, elapsed=None):
        entry = {"name": name, "status": "pass" if ok else "fail"}
        if witness is not None:
            entry["witness"] = witness
        if elapsed is not None:
            entry["elapsed"] = round(elapsed, 6)
        self.checks.append(entry)
        return ok

    def timed(self, name, fn, witness_on_fail=None):
        """Run fn() -> (ok, witness) or bool; record with wall time."""
        t0 = time.perf_counter()
        out = fn()
        elapsed = time.perf_counter() - t0
        if isinstance(out, tuple):
            ok, witness = out
        else:
            ok, witness = out, None
        if witness is None and not ok:
            witness = witness_on_fail
        return self.check(name, ok, witness=witness, elapsed=elapsed)

    def extend(self, checks):
        for c in checks:
            self.checks.append(dict(c))

    @property
    def ok(self):
        return not any(c["status"] == "fail" for c in self.checks)

    def as_dict(self):
        out = {"schema": SCHEMA, "command": self.command}
        out.update(self.config)
        out["checks"] = list(self.checks)
        return out


def _strip(value):
    if isinstance(value, dict):
        return {k: _strip(v) for k, v in value.items() if k not in VOLATILE}
    if isinstance(value, list):
        return [_strip(v) for v in value]
    return value


def report_bytes(report, drop_volatile=False):
    data = report.as_dict() if isinstance(report, Report) else report
    if drop_volatile:
        data = _strip(data)
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")


def render_text(report):
    data = report.as_dict() if isinstance(report, Report) else report
    lines = []
    head = ", ".join("%s=%s" % (k, v) for k, v in sorted(data.items())
                     if k not in ("schema", "command", "checks"))
    lines.append("%s (%s)" % (data["command"], head))
    marks = {"pass": "pass", "skipped": "skip"}
    for c in data["checks"]:
        mark = marks.get(c["status"], "FAIL")
        line = "  [%s] %s" % (mark, c["name"])
        if "witness" in c:
            line += ": %s" % (c["witness"],)
        lines.append(line)
    bad = sum(1 for c in data["checks"] if c["status"] == "fail")
    lines.append("%d checks, %d failed" % (len(data["checks"]), bad))
    return "\n".join(lines)
