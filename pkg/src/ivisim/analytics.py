"""Analytical reference layer.

Joint characteristic function of (log S, integrated variance) in the Heston
model via the explicit Riccati solution, a Runge-Kutta ODE oracle for it, the
one-step characteristic coefficients of the IG scheme, closed-form variance
swap, volatility swap by Laplace-transform inversion, and Fourier call/put
pricing on contours inside the admissible strip.  Rates and dividends are zero
throughout, so the forward equals the spot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .cir import CirParams, phi1, phi2
from .heston import HestonParams

__all__ = [
    "FrequencyPair",
    "RiccatiValue",
    "OneStepCharCoefficients",
    "QuadratureError",
    "riccati_closed_form",
    "riccati_rk4",
    "heston_cf",
    "one_step_char",
    "one_step_cf",
    "variance_swap",
    "laplace_u",
    "volatility_swap",
    "fourier_call",
    "fourier_put",
    "bs_call_price",
    "bs_implied_vol",
]


class QuadratureError(RuntimeError):
    """Raised when a quadrature cannot certify the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


def _quad(f, lo, hi, epsabs: float) -> tuple[float, float]:
    """Adaptive quadrature returning (value, error estimate), warnings silenced;
    callers gate on the returned estimate instead."""
    out = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=400, full_output=1)
    return out[0], out[1]


_CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyPair:
    """Frequencies (u, w) of E[exp(u log(S_T/S_t) + w U_{t,T})].

    Admissible iff Re(w) + ((Re u)^2 - Re u)/2 <= 0, the strip on which the
    transform is finite for all maturities.
    """

    u: complex
    w: complex

    def __post_init__(self):
        object.__setattr__(self, "u", complex(self.u))
        object.__setattr__(self, "w", complex(self.w))
        slack = self.w.real + (self.u.real**2 - self.u.real) / 2.0
        if slack > _CONSTRAINT_TOL:
            raise ValueError(
                f"inadmissible frequencies: Re(w) + ((Re u)^2 - Re u)/2 = {slack:.3e} > 0"
            )


@dataclass(frozen=True)
class RiccatiValue:
    phi: complex
    psi: complex


@dataclass(frozen=True)
class OneStepCharCoefficients:
    phi_hat: complex
    psi_hat: complex


def _clog1p(z: np.ndarray) -> np.ndarray:
    """log(1+z) for complex arrays, accurate for small |z|.

    numpy's log1p offers no extra precision for complex input.  Tiny |z| uses
    the power series directly (no division, so denormal magnitudes stay
    benign); moderate |z| corrects the rounding of 1+z with the standard
    z * log(u)/(u-1) compensation.
    """
    z = np.asarray(z, dtype=complex)
    mag = np.abs(z)
    u = 1.0 + z
    out = np.log(u)
    tiny = mag <= 1e-4
    zt = z[tiny]
    out[tiny] = zt * (1.0 - zt * (0.5 - zt * (1.0 / 3.0 - zt * 0.25)))
    fix = ~tiny & (mag < 0.5)
    out[fix] = out[fix] * z[fix] / (u[fix] - 1.0)
    return out


def _tracked_log_ratio(G: complex, D: complex, t: float) -> complex:
    """Continuity-tracked log((1 - G e^{-D t}) / (1 - G)) along s in [0, t].

    The path s -> 1 - G e^{-D s} can wind around the origin for oscillatory D,
    where the principal log at the endpoint would jump branches.  Splitting
    [0, t] finely enough that each sub-argument rotates by far less than pi
    and summing the sub-logs accumulates the argument continuously.
    """
    n_sub = max(8, math.ceil(2.0 * abs(D.imag) * t / math.pi), math.ceil(abs(D.real) * t / 2.0))
    s = np.linspace(0.0, t, n_sub + 1)
    x = -G * np.exp(-D * s)
    h = 1.0 + x
    if float(np.min(np.abs(h))) < 1e-14:
        raise ArithmeticError("characteristic-function log singularity: |1 - G e^{-Dt}| < 1e-14")
    return complex(np.sum(_clog1p((x[1:] - x[:-1]) / h[:-1])))


def riccati_closed_form(f: FrequencyPair, t: float, p: HestonParams) -> RiccatiValue:
    """Explicit (phi(t), psi(t)) with E[e^{u log(S_T/S_t) + w U}] = e^{phi + psi V_t}.

    beta = -b - u rho c, D = sqrt(beta^2 + c^2 (-2w + u - u^2)) on the
    principal branch, G = (beta - D)/(beta + D).  beta - D is evaluated as
    -c^2 k / (beta + D) (and symmetrically when Re beta < 0), which keeps full
    precision down to c -> 0 where the direct difference loses every digit.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    cir = p.cir
    a, b, c = cir.a, cir.b, cir.c
    u, w = f.u, f.w
    k = -2.0 * w + u - u * u
    if t == 0.0:
        return RiccatiValue(phi=0j, psi=0j)
    if c == 0.0 or k == 0.0:
        # linear Riccati flow; also the exact c -> 0 limit
        wbar = -k / 2.0
        return RiccatiValue(phi=a * wbar * phi2(b, t), psi=wbar * phi1(b, t))
    beta = -b - u * p.rho * c
    D = np.sqrt(beta * beta + c * c * k + 0j)
    if beta.real >= 0.0:
        bpD = beta + D
        bmD = -c * c * k / bpD
    else:
        bmD = beta - D
        bpD = -c * c * k / bmD
    G = bmD / bpD
    E = np.exp(-D * t)
    denom = 1.0 - G * E
    if abs(denom) < 1e-14:
        raise ArithmeticError("characteristic-function denominator vanished")
    psi = (-k / bpD) * (1.0 - E) / denom
    lam = _tracked_log_ratio(G, D, t)
    phi = a * (-k * t / bpD) - (2.0 * a / (c * c)) * lam
    return RiccatiValue(phi=complex(phi), psi=complex(psi))


def riccati_rk4(f: FrequencyPair, t_targets, p: HestonParams, h: float = 1e-4) -> list[RiccatiValue]:
    """Integrate phi' = a psi, psi' = (c^2/2) psi^2 + (rho c u + b) psi + wbar
    with classical RK4 from 0, reporting at each target time.

    Independent oracle for the closed form; the step is snapped so that every
    target lands on the grid exactly.
    """
    cir = p.cir
    a, b, c = cir.a, cir.b, cir.c
    u, w = f.u, f.w
    wbar = w + (u * u - u) / 2.0
    lin = cir.c * p.rho * u + b

    def rhs(y):
        phi_, psi_ = y
        return np.array([a * psi_, 0.5 * c * c * psi_ * psi_ + lin * psi_ + wbar])

    targets = sorted(float(t) for t in np.atleast_1d(t_targets))
    if targets and targets[0] < 0:
        raise ValueError("targets must be nonnegative")
    out: dict[float, RiccatiValue] = {}
    y = np.array([0j, 0j])
    t_now = 0.0
    for t_next in targets:
        span = t_next - t_now
        n = max(1, round(span / h)) if span > 0 else 0
        step = span / n if n else 0.0
        for _ in range(n):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * step * k1)
            k3 = rhs(y + 0.5 * step * k2)
            k4 = rhs(y + step * k3)
            y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_now = t_next
        out[t_next] = RiccatiValue(phi=complex(y[0]), psi=complex(y[1]))
    return [out[float(t)] for t in np.atleast_1d(t_targets)]


def heston_cf(f: FrequencyPair, t: float, v: float, p: HestonParams) -> complex:
    """E[exp(u log(S_T/S_t) + w U_{t,T}) | V_t = v] = exp(phi(t) + psi(t) v)."""
    if v < 0:
        raise ValueError("v must be nonnegative")
    r = riccati_closed_form(f, t, p)
    return complex(np.exp(r.phi + r.psi * v))


def one_step_char(v: float, w: complex, p: CirParams, dt: float) -> OneStepCharCoefficients:
    """Exponentially affine coefficients of the scheme's one-step U transform.

    psi_hat = (1 - sqrt(1 - 2 w sigma^2))/(c sigma) with sigma = c phi1(b, dt),
    written as 2 w sigma / (c (1 + sqrt(...))) to avoid cancellation near w=0;
    phi_hat = (a c / sigma) phi2(b, dt) psi_hat.  psi_hat solves the quadratic
    psi = w phi1 + (c sigma / 2) psi^2, and E[e^{w U} | v] = e^{phi_hat + psi_hat v}.
    """
    w = complex(w)
    if w.real > 0:
        raise ValueError("one_step_char requires Re(w) <= 0")
    if p.c == 0.0:
        raise ValueError("one_step_char requires c != 0 (deterministic variance otherwise)")
    if dt <= 0:
        raise ValueError("dt must be positive")
    sigma = p.c * phi1(p.b, dt)
    root = np.sqrt(1.0 - 2.0 * w * sigma * sigma + 0j)
    psi_hat = 2.0 * w * sigma / (p.c * (1.0 + root))
    phi_hat = (p.a * p.c / sigma) * phi2(p.b, dt) * psi_hat
    return OneStepCharCoefficients(phi_hat=complex(phi_hat), psi_hat=complex(psi_hat))


def one_step_cf(v: float, w: complex, p: CirParams, dt: float) -> complex:
    coeff = one_step_char(v, w, p, dt)
    return complex(np.exp(coeff.phi_hat + coeff.psi_hat * v))


def variance_swap(T: float, p: CirParams) -> float:
    """E[U_T] = V0 phi1(b, T) + a phi2(b, T)."""
    if T <= 0:
        raise ValueError("T must be positive")
    return p.v0 * phi1(p.b, T) + p.a * phi2(p.b, T)


def _laplace(T: float, q: float, v: float, p: CirParams) -> float:
    if p.c == 0.0:
        return math.exp(-q * (v * phi1(p.b, T) + p.a * phi2(p.b, T)))
    hp = HestonParams(cir=p, rho=0.0, s0=1.0)
    r = riccati_closed_form(FrequencyPair(u=0j, w=complex(-q)), T, hp)
    return float(np.exp(r.phi.real + r.psi.real * v))


def laplace_u(T: float, q: float, v: float, p: CirParams) -> float:
    """E[exp(-q U_{0,T}) | V_0 = v], the zero-coupon bond price when V is a short rate."""
    if q <= 0:
        raise ValueError("q must be positive")
    if v < 0:
        raise ValueError("v must be nonnegative")
    if T <= 0:
        raise ValueError("T must be positive")
    return _laplace(T, q, v, p)


def volatility_swap(T: float, p: CirParams, tol: float = 1e-8) -> float:
    """E[sqrt(U_T)] by Laplace-transform inversion.

    E[sqrt(X)] = (1/(2 sqrt(pi))) int_0^inf (1 - E[e^{-q X}]) q^{-3/2} dq; the
    substitution q = x^2 removes the endpoint singularity, the tail beyond X
    contributes 1/X - int_X^inf L(x^2)/x^2 dx where the second piece is bounded
    by L(X^2)/X and X grows until that bound is below tol/2.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.c == 0.0:
        return math.sqrt(variance_swap(T, p))
    sqrt_pi = math.sqrt(math.pi)
    x_max = 16.0
    while _laplace(T, x_max * x_max, p.v0, p) / x_max > 0.5 * tol * sqrt_pi and x_max < 1e9:
        x_max *= 2.0

    hp = HestonParams(cir=p, rho=0.0, s0=1.0)

    def integrand(x: float) -> float:
        if x == 0.0:
            return variance_swap(T, p)
        r = riccati_closed_form(FrequencyPair(u=0j, w=complex(-x * x)), T, hp)
        log_l = r.phi.real + r.psi.real * p.v0
        # 1 - e^{log L} via expm1: the integrand is O(x^2) relative near 0
        return -math.expm1(log_l) / (x * x)

    budget = 0.25 * tol * sqrt_pi
    val, err = _quad(integrand, 0.0, x_max, epsabs=budget)
    if err > 2.0 * budget:
        raise QuadratureError("volatility-swap quadrature did not converge", err / sqrt_pi)
    return (val + 1.0 / x_max) / sqrt_pi


def _norm_cdf(x: float) -> float:
    return 0.5 * special.erfc(-x / math.sqrt(2.0))


def bs_call_price(s0: float, strike: float, T: float, vol: float) -> float:
    """Undiscounted Black-Scholes call E[(S_T - K)^+] with zero rates."""
    if s0 <= 0 or strike <= 0 or T <= 0:
        raise ValueError("s0, strike and T must be positive")
    if vol < 0:
        raise ValueError("vol must be nonnegative")
    if vol == 0.0:
        return max(s0 - strike, 0.0)
    st = vol * math.sqrt(T)
    d1 = (math.log(s0 / strike) + 0.5 * vol * vol * T) / st
    return s0 * _norm_cdf(d1) - strike * _norm_cdf(d1 - st)


def bs_implied_vol(price: float, s0: float, strike: float, T: float) -> float:
    """Invert the Black-Scholes call by bracketed root finding to 1e-10 in vol."""
    intrinsic = max(s0 - strike, 0.0)
    if not intrinsic <= price < s0:
        raise ValueError(f"price {price} outside the no-arbitrage range [{intrinsic}, {s0})")
    if price == intrinsic:
        return 0.0
    lo, hi = 1e-9, 1.0
    while bs_call_price(s0, strike, T, hi) < price:
        hi *= 2.0
        if hi > 1e3:
            raise ValueError("implied volatility above 1000%; price inconsistent")
    return float(optimize.brentq(lambda s: bs_call_price(s0, strike, T, s) - price, lo, hi, xtol=1e-10))


def _lewis_call(strike: float, T: float, p: HestonParams, tol: float) -> float:
    """Call by the half-strip contour Re(u) = 1/2:
    C = S0 - sqrt(S0 K)/pi * int_0^inf Re[e^{i z log(S0/K)} cf(1/2 + i z)] / (z^2 + 1/4) dz.
    """
    s0 = p.s0
    kbar = math.log(s0 / strike)
    v0 = p.cir.v0

    def f(z: float) -> float:
        u = 0.5 + 1j * z
        val = np.exp(1j * z * kbar) * heston_cf(FrequencyPair(u=u, w=0j), T, v0, p)
        return float(val.real) / (z * z + 0.25)

    scale = math.sqrt(s0 * strike) / math.pi
    budget = 0.5 * tol / scale
    val, err = _quad(f, 0.0, np.inf, epsabs=budget)
    if err > 2.0 * budget:
        raise QuadratureError("call-price quadrature did not converge", err * scale)
    return s0 - scale * val


def _gil_pelaez_prob(strike: float, T: float, p: HestonParams, share_measure: bool, tol: float) -> float:
    """P(S_T > K) under the spot (u-shift 0) or share (u-shift 1) measure."""
    kbar = math.log(p.s0 / strike)
    v0 = p.cir.v0
    shift = 1.0 if share_measure else 0.0
    norm = heston_cf(FrequencyPair(u=complex(shift), w=0j), T, v0, p).real if share_measure else 1.0

    def f(z: float) -> float:
        u = shift + 1j * z
        val = np.exp(1j * z * kbar) * heston_cf(FrequencyPair(u=u, w=0j), T, v0, p) / (1j * z * norm)
        return float(val.real)

    budget = 0.5 * tol * math.pi
    val, err = _quad(f, 0.0, np.inf, epsabs=budget)
    if err > 2.0 * budget:
        raise QuadratureError("probability quadrature did not converge", err / math.pi)
    return 0.5 + val / math.pi


def fourier_call(strike: float, T: float, p: HestonParams, tol: float = 1e-8) -> float:
    """Undiscounted European call E[(S_T - K)^+] by Fourier inversion.

    The integration contour Re(u) = 1/2 always lies inside the admissible
    strip Re(u) in [0, 1] (enforced by the frequency-pair guard), so no
    damping parameter needs tuning and moment explosions cannot be hit.
    """
    if strike <= 0 or T <= 0:
        raise ValueError("strike and T must be positive")
    if p.cir.c == 0.0 and p.cir.v0 == 0.0 and p.cir.a == 0.0:
        return max(p.s0 - strike, 0.0)
    return _lewis_call(strike, T, p, tol)


def fourier_put(strike: float, T: float, p: HestonParams, tol: float = 1e-8) -> float:
    """Undiscounted European put by Gil-Pelaez probabilities.

    Deliberately a different inversion route than :func:`fourier_call`, so the
    put-call parity check C - P = S0 - K exercises two independent quadratures.
    """
    if strike <= 0 or T <= 0:
        raise ValueError("strike and T must be positive")
    pi1 = _gil_pelaez_prob(strike, T, p, share_measure=True, tol=tol / (2.0 * p.s0))
    pi2 = _gil_pelaez_prob(strike, T, p, share_measure=False, tol=tol / (2.0 * strike))
    return strike * (1.0 - pi2) - p.s0 * (1.0 - pi1)
