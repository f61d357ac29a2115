"""Exact checks of SFT recursion identities."""

import json
from fractions import Fraction

from . import _core
from ._core import Error, InvalidInput, averaged_psi, homology, solve_combination, weyl_commutator

__all__ = [
    "Error",
    "InvalidInput",
    "averaged_psi",
    "homology",
    "reconstruct",
    "run_suite",
    "solve_combination",
    "weyl_commutator",
]


def run_suite(name, **options):
    """Run a verification suite; returns the report as a dict."""
    return json.loads(_core.run_suite(name, **options))


def reconstruct(target="point", max_points=6, max_level=3, max_degree=0):
    """Correlator table as {(insertions, degree): Fraction}."""
    table = json.loads(_core.reconstruct(target, max_points, max_level, max_degree))
    out = {}
    for e in table["entries"]:
        key = (tuple((i["class"], i["level"]) for i in e["insertions"]), tuple(e["degree"]))
        out[key] = Fraction(e["value"])
    return out
