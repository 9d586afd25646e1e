"""Benchmark variance schemes: Andersen's quadratic-exponential step and a
full-truncation Euler step.  Both return the same (u_inc, z_inc, v_next) shape
as the main scheme; U uses the midpoint rule and Z is backed out of the SDE.
Each step consumes one normal and one uniform so that streams stay aligned
with the main scheme under common random numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cir import CirParams, StepOutput, phi1
from .rng import RngStream

__all__ = [
    "QeConfig",
    "cir_cond_mean",
    "cir_cond_var",
    "qe_step_values",
    "euler_ft_step_values",
    "qe_step",
    "euler_ft_step",
]


@dataclass(frozen=True)
class QeConfig:
    """Switching threshold and midpoint weights of the QE step."""

    psi_c: float = 1.5
    gamma1: float = 0.5
    gamma2: float = 0.5

    def __post_init__(self):
        if not 1.0 <= self.psi_c <= 2.0:
            raise ValueError(f"psi_c must lie in [1, 2], got {self.psi_c}")
        if abs(self.gamma1 + self.gamma2 - 1.0) > 1e-12:
            raise ValueError("midpoint weights must sum to 1")


def cir_cond_mean(v, p: CirParams, dt: float):
    """E[V_{t+dt} | V_t = v] = v e^{b dt} + a phi1(b, dt)."""
    return v * np.exp(p.b * dt) + p.a * phi1(p.b, dt)


def cir_cond_var(v, p: CirParams, dt: float):
    """Var[V_{t+dt} | V_t = v] = c^2 phi1 (v e^{b dt} + a phi1 / 2)."""
    f1 = phi1(p.b, dt)
    return p.c**2 * f1 * (v * np.exp(p.b * dt) + p.a * f1 / 2.0)


def qe_step_values(
    v: np.ndarray, p: CirParams, dt: float, xi: np.ndarray, eta: np.ndarray, cfg: QeConfig = QeConfig()
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Moment-matched QE update of V plus midpoint-rule U and backed-out Z.

    psi = s^2/m^2 selects a squared Gaussian (psi <= psi_c) or an
    exponential/mass-at-zero inverse transform (psi > psi_c).  Both branches
    are nonnegative by construction.
    """
    v = np.asarray(v, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if np.any(v < 0):
        raise ValueError("qe step requires v >= 0")
    m = cir_cond_mean(v, p, dt)
    s2 = cir_cond_var(v, p, dt)
    v_next = np.zeros_like(v)
    alive = m > 0.0
    if p.c == 0.0:
        v_next = np.where(alive, m, 0.0)
    else:
        psi = np.ones_like(v)
        np.divide(s2, m * m, out=psi, where=alive)
        quad = alive & (psi <= cfg.psi_c)
        if np.any(quad):
            ip = 2.0 / psi[quad]
            b2 = ip - 1.0 + np.sqrt(ip * (ip - 1.0))
            a_q = m[quad] / (1.0 + b2)
            v_next[quad] = a_q * (np.sqrt(b2) + xi[quad]) ** 2
        tail = alive & (psi > cfg.psi_c)
        if np.any(tail):
            pr = (psi[tail] - 1.0) / (psi[tail] + 1.0)
            beta = (1.0 - pr) / m[tail]
            u_draw = eta[tail]
            v_next[tail] = np.where(u_draw <= pr, 0.0, np.log((1.0 - pr) / (1.0 - u_draw)) / beta)
    u_inc = dt * (cfg.gamma1 * v + cfg.gamma2 * v_next)
    if p.c == 0.0:
        z_inc = np.zeros_like(v)
    else:
        z_inc = (v_next - v - p.a * dt - p.b * u_inc) / p.c
    return u_inc, z_inc, v_next


def euler_ft_step_values(
    v: np.ndarray, p: CirParams, dt: float, xi: np.ndarray, eta: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-truncation Euler step; v may go negative and is clipped only
    inside the coefficients.  The uniform draw is consumed upstream but unused.
    """
    v = np.asarray(v, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    vp = np.maximum(v, 0.0)
    dz = np.sqrt(vp * dt) * xi
    v_next = v + (p.a + p.b * vp) * dt + p.c * dz
    u_inc = dt * (vp + np.maximum(v_next, 0.0)) / 2.0
    return u_inc, dz, v_next


def qe_step(v: float, p: CirParams, dt: float, cfg: QeConfig, rng: RngStream) -> StepOutput:
    xi = np.array([rng.normal()])
    eta = np.array([rng.uniform()])
    u, z, vn = qe_step_values(np.array([float(v)]), p, dt, xi, eta, cfg)
    return StepOutput(u_inc=float(u[0]), z_inc=float(z[0]), v_next=float(vn[0]))


def euler_ft_step(v: float, p: CirParams, dt: float, rng: RngStream) -> StepOutput:
    xi = np.array([rng.normal()])
    eta = np.array([rng.uniform()])
    u, z, vn = euler_ft_step_values(np.array([float(v)]), p, dt, xi, eta)
    return StepOutput(u_inc=float(u[0]), z_inc=float(z[0]), v_next=float(vn[0]))
