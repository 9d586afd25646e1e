"""Heston log-price layer over any variance scheme.

Given the per-step pair (u_inc, z_inc) the log price moves by
-u/2 + rho z + sqrt(1-rho^2) sqrt(u) N with N a fresh standard Gaussian drawn
from the orthogonal sub-stream; conditional on the variance path this is the
exact transition law, and the resulting price is a per-step martingale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import QeConfig, euler_ft_step_values, qe_step_values
from .cir import CirParams, CirPath, TimeGrid, ivi_simple_step_values, ivi_step_values
from .rng import RngStream

__all__ = [
    "HestonParams",
    "HestonPath",
    "VARIANCE_SCHEMES",
    "heston_step",
    "heston_log_increment",
    "simulate_heston",
    "Payoff",
    "McEstimate",
    "mc_price",
]


@dataclass(frozen=True)
class HestonParams:
    """Variance-process coefficients plus spot correlation and initial price."""

    cir: CirParams
    rho: float
    s0: float = 1.0

    def __post_init__(self):
        if abs(self.rho) > 1:
            raise ValueError(f"|rho| must be <= 1, got {self.rho}")
        if self.s0 <= 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")


@dataclass(frozen=True)
class HestonPath:
    cir: CirPath
    log_s: np.ndarray


# name -> vectorised step core with uniform signature (v, cir, dt, xi, eta, qe_cfg)
VARIANCE_SCHEMES = {
    "ivi": lambda v, p, dt, xi, eta, cfg: ivi_step_values(v, p, dt, xi, eta),
    "ivi_simple": lambda v, p, dt, xi, eta, cfg: ivi_simple_step_values(v, p, dt, xi, eta),
    "qe": lambda v, p, dt, xi, eta, cfg: qe_step_values(v, p, dt, xi, eta, cfg or QeConfig()),
    "euler": lambda v, p, dt, xi, eta, cfg: euler_ft_step_values(v, p, dt, xi, eta),
}


def heston_log_increment(u_inc, z_inc, rho: float, n_ortho):
    """Log-price increment given the variance-step outputs and an orthogonal normal."""
    return -0.5 * u_inc + rho * z_inc + math.sqrt(1.0 - rho * rho) * np.sqrt(u_inc) * n_ortho


def heston_step(log_s: float, step, rho: float, rng: RngStream) -> float:
    """Advance the log price one step; always consumes one orthogonal normal."""
    if abs(rho) > 1:
        raise ValueError(f"|rho| must be <= 1, got {rho}")
    if step.u_inc < 0:
        raise ValueError("u_inc must be nonnegative")
    n = rng.orthogonal_normal()
    return float(log_s + heston_log_increment(step.u_inc, step.z_inc, rho, n))


def simulate_heston(p: HestonParams, grid: TimeGrid, scheme: str, rng: RngStream,
                    qe_cfg: QeConfig | None = None) -> HestonPath:
    """Simulate one joint (variance, log-price) path.

    The variance draws come from the stream's base generator and the price
    layer from its orthogonal sub-stream, so switching the price layer on or
    off leaves the variance path bit-identical.
    """
    core = VARIANCE_SCHEMES[scheme]
    n = grid.n_steps
    v = np.empty(n + 1)
    u_incs = np.empty(n)
    z_incs = np.empty(n)
    log_s = np.empty(n + 1)
    v[0] = p.cir.v0
    log_s[0] = math.log(p.s0)
    for i, dt in enumerate(grid.dts):
        xi = np.array([rng.normal()])
        eta = np.array([rng.uniform()])
        u, z, vn = core(np.array([v[i]]), p.cir, float(dt), xi, eta, qe_cfg)
        u_incs[i], z_incs[i], v[i + 1] = float(u[0]), float(z[0]), float(vn[0])
        n_ortho = rng.orthogonal_normal()
        log_s[i + 1] = log_s[i] + float(heston_log_increment(u_incs[i], z_incs[i], p.rho, n_ortho))
    cir_path = CirPath(v=v, u_incs=u_incs, z_incs=z_incs, u_total=float(np.sum(u_incs)))
    return HestonPath(cir=cir_path, log_s=log_s)


@dataclass(frozen=True)
class Payoff:
    """Closed payoff menu: call/put on S_T by strike, or a functional of U_T."""

    kind: str
    strike: float = 0.0
    q: float = 1.0
    _KINDS = ("call", "put", "u_total", "sqrt_u_total", "exp_neg_u")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown payoff kind {self.kind!r}; choose from {self._KINDS}")
        if self.kind in ("call", "put") and self.strike <= 0:
            raise ValueError("call/put payoffs need a positive strike")

    def needs_price(self) -> bool:
        return self.kind in ("call", "put")

    def values(self, u_total: np.ndarray, log_s: np.ndarray | None) -> np.ndarray:
        if self.kind == "u_total":
            return u_total
        if self.kind == "sqrt_u_total":
            return np.sqrt(u_total)
        if self.kind == "exp_neg_u":
            return np.exp(-self.q * u_total)
        if log_s is None:
            raise ValueError(f"payoff {self.kind!r} needs the price layer")
        s = np.exp(log_s)
        if self.kind == "call":
            return np.maximum(s - self.strike, 0.0)
        return np.maximum(self.strike - s, 0.0)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int

    def within(self, reference: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - reference) <= n_se * self.std_error


def mc_price(payoff: Payoff, batch) -> McEstimate:
    """Estimate E[payoff] over a batch of terminal path values.

    ``batch`` is anything carrying per-path arrays ``u_total`` and ``log_s``
    (``log_s`` may be None for pure-variance payoffs), e.g. the batch engine's
    result.  numpy's pairwise summation makes the reduction deterministic for
    a given array, independent of how many threads produced it.
    """
    values = np.asarray(payoff.values(batch.u_total, batch.log_s), dtype=float)
    if values.size < 2:
        raise ValueError("need at least two paths for a Monte Carlo estimate")
    n = values.size
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    return McEstimate(mean=mean, std_error=std / math.sqrt(n), n_paths=n)
