"""Inverse Gaussian (Wald) distribution: sampler, density, characteristic function.

IG(mu, lam) has density sqrt(lam/(2 pi x^3)) exp(-lam (x-mu)^2 / (2 mu^2 x)) on
x > 0, mean mu and variance mu^3/lam.  The degenerate pair (0, 0) denotes the
point mass at 0.  Sampling uses the one-normal/one-uniform acceptance scheme of
Michael, Schucany and Haas.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream


@dataclass(frozen=True)
class IgParams:
    """Mean/shape parameter pair; (0, 0) is the point mass at 0."""

    mu: float
    lam: float

    def __post_init__(self):
        if self.mu < 0 or self.lam < 0:
            raise ValueError(f"IG parameters must be nonnegative, got mu={self.mu}, lam={self.lam}")
        if self.mu == 0 and self.lam != 0:
            raise ValueError("IG with mu=0 requires lam=0 (degenerate point mass)")
        if self.mu > 0 and self.lam == 0:
            raise ValueError("IG with mu>0 requires lam>0")

    @property
    def degenerate(self) -> bool:
        return self.mu == 0.0


def ig_mean(p: IgParams) -> float:
    return p.mu


def ig_variance(p: IgParams) -> float:
    if p.degenerate:
        return 0.0
    return p.mu**3 / p.lam


def ig_pdf(p: IgParams, x):
    """Density at x > 0 (scalar or array)."""
    if p.degenerate:
        raise ValueError("density undefined for the degenerate point mass")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("ig_pdf requires x > 0")
    out = np.sqrt(p.lam / (2.0 * np.pi * x**3)) * np.exp(-p.lam * (x - p.mu) ** 2 / (2.0 * p.mu**2 * x))
    return out if out.ndim else float(out)


def ig_char(p: IgParams, w: complex) -> complex:
    """E[exp(w X)] for Re(w) <= 0, principal square root."""
    w = complex(w)
    if w.real > 0:
        raise ValueError("ig_char requires Re(w) <= 0")
    if p.degenerate:
        return 1.0 + 0.0j
    return complex(np.exp(p.lam / p.mu * (1.0 - np.sqrt(1.0 - 2.0 * w * p.mu**2 / p.lam))))


def _ig_core(m: np.ndarray, l: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        y = xi * xi
        # lam may underflow to 0 for vanishing mean parameters: s = inf then,
        # which resolves below to the correct point-mass-at-0 limit; the 0/0
        # case (y = 0 as well) collapses to the candidate m, i.e. s = 0
        s = np.nan_to_num(m * y / l, nan=0.0)
        q = 1.0 + 0.5 * (s + np.sqrt(s * (4.0 + s)))
        # small root mu/q, large root mu*q; accept small with prob q/(q+1),
        # written multiplicatively so q = inf accepts (eta*inf <= inf)
        return np.where(eta * (q + 1.0) <= q, m / q, m * q)


def sample_ig_values(mu: np.ndarray, lam: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Vectorised sampler: one standard normal and one uniform per output.

    Entries with mu == 0 return 0 (their draws are discarded, keeping the
    draw count per slot constant).  The candidate root is evaluated in the
    division form mu/q, which stays accurate when mu*Y/lam is large, unlike
    the textbook subtraction form.
    """
    mu = np.asarray(mu, dtype=float)
    shape = np.broadcast_shapes(mu.shape, np.shape(xi))
    mu_b = np.broadcast_to(mu, shape)
    lam_b = np.broadcast_to(np.asarray(lam, dtype=float), shape)
    xi_b = np.broadcast_to(xi, shape)
    eta_b = np.broadcast_to(eta, shape)
    if mu_b.size == 0 or mu_b.min() > 0.0:
        return _ig_core(mu_b, lam_b, xi_b, eta_b)
    out = np.zeros(shape, dtype=float)
    pos = mu_b > 0.0
    if np.any(pos):
        out[pos] = _ig_core(mu_b[pos], lam_b[pos], xi_b[pos], eta_b[pos])
    return out


def sample_ig(p: IgParams, rng: RngStream) -> float:
    """Draw one IG(mu, lam) variate, consuming exactly one normal and one uniform."""
    xi = rng.normal()
    eta = rng.uniform()
    if p.degenerate:
        return 0.0
    return float(sample_ig_values(np.array([p.mu]), np.array([p.lam]), np.array([xi]), np.array([eta]))[0])
