"""Square-root (CIR) diffusion and the integrated-variance implicit (iVi) scheme.

The process is dV = (a + b V) dt + c sqrt(V) dW with V0, a >= 0.  Per step the
scheme samples the integrated variance U over [t_i, t_{i+1}] from an inverse
Gaussian law IG(alpha_i, (alpha_i/sigma_i)^2), recovers the Brownian integral
Z = (U - alpha_i)/sigma_i and updates V from the integrated dynamics, which
keeps V nonnegative for every draw.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .invgauss import sample_ig_values
from .rng import RngStream

__all__ = [
    "CirParams",
    "TimeGrid",
    "StepCoefficients",
    "StepOutput",
    "CirPath",
    "phi1",
    "phi2",
    "growth_weight",
    "step_coefficients",
    "ivi_step_values",
    "ivi_simple_step_values",
    "ivi_step",
    "ivi_simple_step",
    "simulate_cir_path",
]


@dataclass(frozen=True)
class CirParams:
    """Coefficients of dV = (a + b V) dt + c sqrt(V) dW."""

    v0: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.v0 < 0:
            raise ValueError(f"v0 must be nonnegative, got {self.v0}")
        if self.a < 0:
            raise ValueError(f"a must be nonnegative, got {self.a}")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing knots 0 = t_0 < t_1 < ... < t_n = T."""

    knots: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        object.__setattr__(self, "knots", knots)
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("grid needs at least two knots")
        if knots[0] != 0.0:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("grid knots must be strictly increasing")

    @classmethod
    def uniform(cls, horizon: float, n_steps: int) -> "TimeGrid":
        if horizon <= 0 or n_steps < 1:
            raise ValueError("uniform grid needs horizon > 0 and n_steps >= 1")
        return cls(np.linspace(0.0, horizon, n_steps + 1))

    @property
    def n_steps(self) -> int:
        return self.knots.size - 1

    @property
    def horizon(self) -> float:
        return float(self.knots[-1])

    @property
    def dts(self) -> np.ndarray:
        return np.diff(self.knots)


@dataclass(frozen=True)
class StepCoefficients:
    """IG mean parameter alpha and scale sigma of one scheme step."""

    alpha: float
    sigma: float


@dataclass(frozen=True)
class StepOutput:
    """One-step result: integrated-variance increment, Brownian-integral increment, next V."""

    u_inc: float
    z_inc: float
    v_next: float


@dataclass(frozen=True)
class CirPath:
    """Discretised variance path with its U and Z increments."""

    v: np.ndarray
    u_incs: np.ndarray
    z_incs: np.ndarray
    u_total: float


# Exponential drift weights.  phi1 = (e^{bt}-1)/b and phi2 = (phi1-t)/b with
# the continuous extensions t and t^2/2 at b = 0; both are positive for t > 0.
# Below |bt| = 1e-5 the direct expressions cancel catastrophically, so a
# four-term Taylor expansion takes over (next omitted term < 1e-21 relative).
_TAYLOR_CUT = 1e-5


def phi1(b: float, t: float) -> float:
    x = b * t
    if abs(x) < _TAYLOR_CUT:
        return t * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    return np.expm1(x) / b


def phi2(b: float, t: float) -> float:
    x = b * t
    if abs(x) < _TAYLOR_CUT:
        return t * t * (0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0)
    return (phi1(b, t) - t) / b


def growth_weight(b: float, t: float) -> float:
    """(t e^{bt} - phi1(b,t)) / b, the nonnegative drift weight of the V update.

    Extends continuously to t^2/2 at b = 0 and stays >= 0 for every real b,
    which is what makes the V recursion nonnegative term by term.
    """
    x = b * t
    if abs(x) < _TAYLOR_CUT:
        return t * t * (0.5 + x / 3.0 + x * x / 8.0 + x * x * x / 30.0)
    return (t * np.exp(x) - phi1(b, t)) / b


def step_coefficients(v: float, p: CirParams, dt: float) -> StepCoefficients:
    """alpha = v phi1 + a phi2 and sigma = c phi1 for one step of length dt."""
    if v < 0:
        raise ValueError(f"v must be nonnegative, got {v}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    f1 = phi1(p.b, dt)
    return StepCoefficients(alpha=v * f1 + p.a * phi2(p.b, dt), sigma=p.c * f1)


def _v_update_weights(p: CirParams, dt: float) -> tuple[float, float]:
    """Weights (A, B) of the equivalent update V' = A U + B, both nonnegative."""
    f1 = phi1(p.b, dt)
    return np.exp(p.b * dt) / f1, p.a * growth_weight(p.b, dt) / f1


def ivi_step_values(
    v: np.ndarray, p: CirParams, dt: float, xi: np.ndarray, eta: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised scheme step given the per-path draws (one normal, one uniform).

    Returns (u_inc, z_inc, v_next).  The V update uses the algebraically
    equivalent two-term form A*U + B with A, B >= 0, so v_next can never round
    below zero; it matches v + a dt + b u + c z to machine precision.

    Degenerate branches: alpha = 0 (only possible when v = 0 and a = 0) gives
    the absorbing output (0, 0, 0); sigma = 0 (c = 0) gives the deterministic
    u_inc = alpha with the Gaussian-limit z_inc = sqrt(alpha) * xi.
    """
    v = np.asarray(v, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if np.any(v < 0):
        raise ValueError("ivi step requires v >= 0")
    f1 = phi1(p.b, dt)
    alpha = v * f1 + p.a * phi2(p.b, dt)
    sigma = p.c * f1
    if sigma == 0.0:
        u = alpha
        z = np.sqrt(alpha) * xi
    elif alpha.size and alpha.min() > 0.0:
        u = sample_ig_values(alpha, alpha * alpha / (sigma * sigma), xi, eta)
        z = (u - alpha) / sigma
    else:
        lam = np.where(alpha > 0.0, alpha * alpha / (sigma * sigma), 1.0)
        u = sample_ig_values(alpha, lam, xi, eta)
        z = np.where(alpha > 0.0, (u - alpha) / sigma, 0.0)
    a_w, b_w = _v_update_weights(p, dt)
    v_next = a_w * u + b_w
    return u, z, v_next


def ivi_simple_step_values(
    v: np.ndarray, p: CirParams, dt: float, xi: np.ndarray, eta: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Variant that integrates the drift by the right-endpoint rule as well.

    alpha~ = v dt + a dt^2/2, sigma~ = c dt, U ~ IG(alpha~/(1 - b dt),
    (alpha~/sigma~)^2), Z = ((1 - b dt) U - alpha~)/sigma~.  Requires
    1 - b dt > 0.  Carries an extra drift bias relative to the main scheme.
    """
    v = np.asarray(v, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    disc = 1.0 - p.b * dt
    if disc <= 0.0:
        raise ValueError(f"simple scheme requires 1 - b*dt > 0, got {disc}")
    if np.any(v < 0):
        raise ValueError("ivi step requires v >= 0")
    alpha = v * dt + p.a * dt * dt / 2.0
    sigma = p.c * dt
    mu = alpha / disc
    if sigma == 0.0:
        u = mu
        z = np.sqrt(mu) * xi
    elif alpha.size and alpha.min() > 0.0:
        u = sample_ig_values(mu, alpha * alpha / (sigma * sigma), xi, eta)
        z = (disc * u - alpha) / sigma
    else:
        lam = np.where(alpha > 0.0, alpha * alpha / (sigma * sigma), 1.0)
        u = sample_ig_values(mu, lam, xi, eta)
        z = np.where(alpha > 0.0, (disc * u - alpha) / sigma, 0.0)
    # v + a dt + b u + c z collapses to u/dt + a dt/2, nonnegative term by term
    v_next = u / dt + p.a * dt / 2.0
    return u, z, v_next


def _scalar_step(core, v: float, p: CirParams, dt: float, rng: RngStream) -> StepOutput:
    xi = np.array([rng.normal()])
    eta = np.array([rng.uniform()])
    u, z, v_next = core(np.array([float(v)]), p, dt, xi, eta)
    return StepOutput(u_inc=float(u[0]), z_inc=float(z[0]), v_next=float(v_next[0]))


def ivi_step(v: float, p: CirParams, dt: float, rng: RngStream) -> StepOutput:
    """One scheme step, consuming exactly one normal and one uniform draw."""
    return _scalar_step(ivi_step_values, v, p, dt, rng)


def ivi_simple_step(v: float, p: CirParams, dt: float, rng: RngStream) -> StepOutput:
    return _scalar_step(ivi_simple_step_values, v, p, dt, rng)


def simulate_cir_path(p: CirParams, grid: TimeGrid, rng: RngStream, scheme: str = "ivi") -> CirPath:
    """Simulate a single variance path over the grid.

    ``scheme`` selects ``ivi`` (default) or ``ivi_simple``.  The vectorised
    batch engine is the tool of choice for large path counts; this scalar form
    exists for inspection and tests.
    """
    core = {"ivi": ivi_step_values, "ivi_simple": ivi_simple_step_values}[scheme]
    n = grid.n_steps
    v = np.empty(n + 1)
    u_incs = np.empty(n)
    z_incs = np.empty(n)
    v[0] = p.v0
    for i, dt in enumerate(grid.dts):
        out = _scalar_step(core, v[i], p, float(dt), rng)
        u_incs[i] = out.u_inc
        z_incs[i] = out.z_inc
        v[i + 1] = out.v_next
    return CirPath(v=v, u_incs=u_incs, z_incs=z_incs, u_total=float(np.sum(u_incs)))
