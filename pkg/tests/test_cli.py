import io
import json

import pytest

from kncoop.cli import run
from kncoop.reports import Report, render_text, report_bytes
from kncoop.testalgebras import shipped_algebra, shipped_names


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("KNCOOP_CACHE_DIR", str(tmp_path / "cache"))


def run_cli(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv, "--format", "json")
    return code, json.loads(text)


def stripped(data):
    if isinstance(data, dict):
        return {k: stripped(v) for k, v in data.items() if k != "elapsed"}
    if isinstance(data, list):
        return [stripped(v) for v in data]
    return data


# ------------------------------------------------------------------ reports

def test_report_exit_semantics_and_text():
    r = Report("demo", {"p": 3})
    r.check("good", True)
    r.extend([{"name": "left out", "status": "skipped"}])
    assert r.ok
    r.check("bad", False, witness="because")
    assert not r.ok
    text = render_text(r)
    assert "[pass] good" in text
    assert "[skip] left out" in text
    assert "[FAIL] bad: because" in text
    assert "3 checks, 1 failed" in text


def test_report_bytes_drop_volatile():
    r = Report("demo", {"p": 3})
    r.check("timed", True, elapsed=0.5)
    raw = json.loads(report_bytes(r).decode())
    assert raw["checks"][0]["elapsed"] == 0.5
    slim = json.loads(report_bytes(r, drop_volatile=True).decode())
    assert "elapsed" not in slim["checks"][0]
    assert slim["schema"] == 1
    assert slim["seed"] == 0


# ----------------------------------------------------------------- shipped

def test_shipped_algebras_load():
    names = shipped_names()
    assert "kn_p3n2" in names and "dual_odd_p3n2" in names
    for name in names:
        A = shipped_algebra(name)
        assert (A.p, A.n) == (3, 2)
    dual = shipped_algebra("dual_odd_p3n2")
    assert [g.degree for g in dual.generators] == [-1]


# ------------------------------------------------------------------- honda

def test_honda_spec_example_passes():
    code, text = run_cli("honda", "--p", "3", "--n", "1", "--N", "12")
    assert code == 0
    assert "law = " in text
    assert "p_series = v*x^3" in text
    assert "0 failed" in text


HONDA_GOLDEN = {
    "N": 5,
    "checks": [
        {"name": "law constructed with p-integral lift coefficients",
         "status": "pass"},
        {"name": "unit, commutativity and associativity hold exactly",
         "status": "pass"},
        {"name": "p-series collapses to the single Frobenius monomial",
         "status": "pass"},
        {"name": "rational logarithm is additive on the lift",
         "status": "pass"},
        {"name": "cache round-trip rebuilds the same law", "status": "pass"},
    ],
    "command": "honda",
    "law": {
        "degree": 2,
        "order": 5,
        "terms": {"0,1": "1", "1,0": "1", "1,2": "2*v", "2,1": "2*v"},
        "variables": [["x", 2], ["y", 2]],
    },
    "model": "rational-log-lift",
    "n": 1,
    "p": 3,
    "schema": 1,
    "seed": 0,
}


def test_honda_json_golden():
    code, data = run_json("honda", "--p", "3", "--n", "1", "--N", "5")
    assert code == 0
    assert stripped(data) == HONDA_GOLDEN


def test_honda_small_order_skips_p_series():
    code, data = run_json("honda", "--p", "3", "--n", "2", "--N", "6")
    assert code == 0
    by_name = {c["name"]: c for c in data["checks"]}
    entry = by_name["p-series collapses to the single Frobenius monomial"]
    assert entry["status"] == "skipped"


def test_cache_dir_flag_writes_there(tmp_path):
    target = tmp_path / "elsewhere"
    code, _ = run_cli("honda", "--p", "3", "--n", "1", "--N", "5",
                      "--cache-dir", str(target))
    assert code == 0
    assert (target / "law_p3_n1_N5.json").exists()


# ------------------------------------------------------------------ series

def test_series_compose_golden():
    code, data = run_json("series", "--p", "3", "--n", "1", "--N", "10",
                          "compose", "x + v*x^3", "x + v*x^3")
    assert code == 0
    assert data["series"]["terms"] == {"1": "1", "3": "2*v", "9": "v^4"}


def test_series_invert_checks_both_sides():
    code, text = run_cli("series", "--p", "3", "--n", "1", "--N", "10",
                         "invert", "x + v*x^3")
    assert code == 0
    assert "series = x + 2*v*x^3 + v^4*x^9" in text


def test_series_parse_error_exits_2(capsys):
    code, _ = run_cli("series", "--p", "3", "--n", "1", "echo", "x + + v")
    assert code == 2
    assert "error:" in capsys.readouterr().err


# --------------------------------------------------------------------- aut

def test_aut_validate_json_echoes_coefficients():
    code, data = run_json("aut", "--p", "3", "--n", "2", "--window", "2",
                          "validate", "x + t1*x^3")
    assert code == 0
    assert data["coefficients"] == {"1": "t1"}
    assert data["series"] == "x + t1*x^3"
    assert all(c["status"] == "pass" for c in data["checks"])


def test_aut_validate_rejects_non_p_typical():
    code, data = run_json("aut", "--p", "3", "--n", "1", "validate",
                          "x + v^2*x^5")
    assert code == 1
    assert data["checks"][0]["status"] == "fail"
    assert "x^5" in data["checks"][0]["witness"]


def test_aut_compose_then_invert_round_trips():
    code, data = run_json("aut", "--p", "3", "--n", "2", "--window", "2",
                          "compose", "x + t1*x^3", "x + t2*x^9")
    assert code == 0
    composed = data["series"]
    code, data = run_json("aut", "--p", "3", "--n", "2", "--window", "2",
                          "invert", composed)
    assert code == 0
    inv = data["series"]
    code, data = run_json("aut", "--p", "3", "--n", "2", "--window", "2",
                          "compose", composed, inv)
    assert code == 0
    assert data["series"] == "x"
    assert data["coefficients"] == {}


# -------------------------------------------------------------------- hopf

def test_hopf_derive_spec_example():
    code, text = run_cli("hopf", "--which", "B", "--p", "3", "--n", "2",
                         "derive")
    assert code == 0
    for name in ("xi1", "tau0", "tau1"):
        assert "coproduct of %s rederives exactly" % name in text
    assert "0 failed" in text


def test_hopf_print_shows_rules_and_coproducts():
    code, text = run_cli("hopf", "--which", "sigma", "--p", "3", "--n", "2",
                         "--window", "2", "print")
    assert code == 0
    assert "rule t1^9 -> v^2*t1" in text
    assert "t1^3 (x) t1" in text


def test_hopf_verify_all_builders_small():
    for which in ("sigma", "A", "B", "C", "KK"):
        code, text = run_cli("hopf", "--which", which, "--p", "3", "--n", "1",
                             "--window", "1", "verify")
        assert code == 0, (which, text)


def test_hopf_points_against_shipped_target():
    code, data = run_json("hopf", "--which", "B", "--p", "3", "--n", "2",
                          "--R", "dual_odd_p3n2", "points")
    assert code == 0
    assert len(data["points"]) == 3
    by_name = {c["name"]: c for c in data["checks"]}
    assert by_name["point count matches the closed-form group order"][
        "witness"] == "count=3 predicted=3"


def test_hopf_deg_bound_defaults_to_triple_depth():
    code, data = run_json("hopf", "--which", "A", "--p", "3", "--n", "2",
                          "verify")
    assert code == 0
    assert data["params"]["deg_bound"] == 12


# ------------------------------------------------------------------- fiber

def test_fiber_pushout_matches_direct():
    code, text = run_cli("fiber", "--p", "3", "--n", "2", "--window", "2",
                         "pushout")
    assert code == 0
    assert "0 failed" in text


def test_fiber_corep_with_target_file(tmp_path):
    pres = tmp_path / "dual.pres"
    pres.write_text("prime 3\nheight 2\ncoeff Kn\ngen e deg -1\n",
                    encoding="utf-8")
    code, data = run_json("fiber", "--p", "3", "--n", "2", "--window", "1",
                          "--functor", "C", "--R", str(pres), "corep")
    assert code == 0
    assert data["counts"] == {"hom": 3, "functor": 3, "predicted": 3}


def test_fiber_corep_functor_spellings():
    for functor, count in (("hn", 3), ("ga", 1), ("GA", 3)):
        code, data = run_json("fiber", "--p", "3", "--n", "2",
                              "--window", "2", "--functor", functor,
                              "--R", "dual_odd_p3n2", "corep")
        assert code == 0, (functor, data)
        assert data["counts"]["predicted"] == count


def test_fiber_kappa_band_flag():
    code, text = run_cli("fiber", "--p", "3", "--n", "2", "--window", "2",
                         "--band", "-40:0", "kappa")
    assert code == 0
    assert "graded dimensions agree on the band" in text
    assert "0 failed" in text


# ------------------------------------------------------------------- suite

def test_suite_home_lane_empty_cache():
    code, text = run_cli("suite", "--p", "3", "--n", "2", "--cases", "3")
    assert code == 0
    assert "[skip]" in text
    assert "0 failed" in text


def test_suite_height_one_lane():
    code, data = run_json("suite", "--p", "3", "--n", "1", "--cases", "5")
    assert code == 0
    by_status = {}
    for c in data["checks"]:
        by_status.setdefault(c["status"], []).append(c["name"])
    assert not by_status.get("fail")
    assert any("conjugation" in name for name in by_status["skipped"])
    assert any("relation recovered" in name for name in by_status["pass"])


# ----------------------------------------------------------- plumbing

def test_bad_prime_exits_2(capsys):
    code, _ = run_cli("honda", "--p", "4", "--n", "1")
    assert code == 2
    assert "odd prime" in capsys.readouterr().err


def test_mismatched_target_exits_2(capsys):
    code, _ = run_cli("fiber", "--p", "5", "--n", "1", "--window", "1",
                      "--functor", "ga", "--R", "dual_odd_p3n2", "corep")
    assert code == 2
    assert "target algebra" in capsys.readouterr().err


def test_json_reports_are_reproducible():
    configs = (
        ("hopf", "--which", "sigma", "--p", "3", "--n", "1", "--window", "1",
         "--seed", "7", "verify"),
        ("series", "--p", "3", "--n", "1", "--N", "8", "invert", "x + v*x^3"),
        ("fiber", "--p", "3", "--n", "2", "--window", "1", "--functor", "hn",
         "--R", "dual_odd_p3n2", "corep"),
    )
    for argv in configs:
        first = stripped(run_json(*argv)[1])
        second = stripped(run_json(*argv)[1])
        assert first == second
        assert first["seed"] in (0, 7)
