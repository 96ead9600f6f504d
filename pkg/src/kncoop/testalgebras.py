"""Shipped finite target algebras for enumeration and corepresentation checks."""

import os
from importlib import resources

from .galgebra import (
    AlgebraPresentation,
    ContextError,
    coefficient_algebra,
    parse_presentation,
)


def _package_dir():
    return resources.files("kncoop") / "presentations"


def shipped_names():
    out = []
    for entry in _package_dir().iterdir():
        if entry.name.endswith(".pres"):
            out.append(entry.name[:-len(".pres")])
    return sorted(out)


def shipped_algebra(name):
    entry = _package_dir() / (name + ".pres")
    try:
        text = entry.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ContextError(
            "no shipped algebra %r; have: %s" % (name, ", ".join(shipped_names())))
    return parse_presentation(text, source=name + ".pres")


def resolve_target(spec):
    """A target algebra from a file path or a shipped name."""
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return parse_presentation(fh.read(), source=spec)
    return shipped_algebra(spec)


def standard_targets(p, n):
    """The three enumeration targets at any (p, n), keyed by label.

    The shipped .pres files pin the same trio at the default configuration.
    """
    return {
        "kn": coefficient_algebra(p, n),
        "dual_odd": AlgebraPresentation.build(p, n, "Kn", [("e", -1)]),
        "dual_chunk": AlgebraPresentation.build(
            p, n, "Kn", [("e", 2 - 2 * p)], [("e^2", "0")]),
    }
