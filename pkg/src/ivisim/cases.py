"""Built-in benchmark parameter cases.

Case 1: strong mean reversion with high vol-of-vol (short-dated SPX regime);
Case 2: intermediate SPX calibration; Case 3: slow mean reversion, long-dated
FX regime.  The Feller condition a >= c^2/2 fails in all three, and the spot
is normalised to 1 so strikes read as moneyness.
"""
from __future__ import annotations

from .cir import CirParams
from .heston import HestonParams

_CASES = {
    1: HestonParams(cir=CirParams(v0=0.006, a=17.25 * 0.018, b=-17.25, c=2.95), rho=-0.68, s0=1.0),
    2: HestonParams(cir=CirParams(v0=0.023, a=2.15 * 0.057, b=-2.15, c=0.86), rho=-0.70, s0=1.0),
    3: HestonParams(cir=CirParams(v0=0.04, a=0.5 * 0.04, b=-0.5, c=1.0), rho=-0.9, s0=1.0),
}

CASE_IDS = tuple(sorted(_CASES))


def builtin_case(case_id: int) -> HestonParams:
    try:
        return _CASES[case_id]
    except KeyError:
        raise ValueError(f"unknown case {case_id!r}; available: {CASE_IDS}") from None
