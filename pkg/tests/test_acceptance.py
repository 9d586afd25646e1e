"""Acceptance gate: one test per criterion, each printing a PASS line with the
measured numbers (run `pytest tests/test_acceptance.py -v -s` to see them).
Monte Carlo checks use fixed seeds so the suite is deterministic.
"""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from ivisim.analytics import (
    FrequencyPair,
    bs_call_price,
    fourier_call,
    fourier_put,
    laplace_u,
    one_step_char,
    one_step_cf,
    riccati_closed_form,
    variance_swap,
    volatility_swap,
)
from ivisim.baselines import cir_cond_mean
from ivisim.cases import builtin_case
from ivisim.cir import CirParams, TimeGrid, ivi_step_values, phi1
from ivisim.engine import simulate_batch
from ivisim.experiments import ExperimentConfig, records_to_csv, run_convergence
from ivisim.heston import HestonParams, Payoff, mc_price
from ivisim.invgauss import IgParams, ig_pdf, sample_ig_values

CASES = {cid: builtin_case(cid) for cid in (1, 2, 3)}


def _se(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / math.sqrt(x.size))


# --- A1 ------------------------------------------------------------------

def test_a1_nonnegativity_exact():
    t0 = time.perf_counter()
    gen = np.random.default_rng(910)
    param_sets = [hp.cir for hp in CASES.values()]
    for i in range(100):
        v0 = 0.0 if i % 10 == 0 else float(gen.uniform(0.0, 2.0))
        a = 0.0 if i % 7 == 0 else float(gen.uniform(0.0, 2.0))
        param_sets.append(CirParams(v0=v0, a=a, b=float(gen.uniform(-20.0, 5.0)),
                                    c=float(gen.uniform(-3.0, 3.0))))
    worst_v = math.inf
    worst_alpha = math.inf
    for k, cir in enumerate(param_sets):
        hp = HestonParams(cir=cir, rho=0.0)
        for n in (1, 4, 16, 64):
            batch = simulate_batch(hp, TimeGrid.uniform(1.0, n), "ivi", 100_000, (911, k, n))
            worst_v = min(worst_v, batch.min_v)
            worst_alpha = min(worst_alpha, batch.min_alpha)
            assert batch.min_v >= 0.0, (k, n, batch.min_v)
            assert batch.min_alpha >= 0.0, (k, n, batch.min_alpha)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"A1 runtime {elapsed:.1f}s exceeds 60s"
    print(f"\n[A1] PASS: min V = {worst_v:.3e}, min alpha = {worst_alpha:.3e} over 103 parameter "
          f"sets x {{1,4,16,64}} steps x 1e5 paths, zero negatives ({elapsed:.1f}s)")


# --- A2 ------------------------------------------------------------------

def test_a2_exact_first_moments():
    t0 = time.perf_counter()
    n = 500_000
    lines = []
    for cid, hp in CASES.items():
        cir = hp.cir
        gen = np.random.default_rng(920 + cid)
        u, z, v1 = ivi_step_values(np.full(n, cir.v0), cir, 1.0, gen.standard_normal(n), gen.random(n))
        ref_u = variance_swap(1.0, cir)
        ref_v = cir.v0 * math.exp(cir.b) + cir.a * phi1(cir.b, 1.0)
        du, dz, dv = abs(u.mean() - ref_u) / _se(u), abs(z.mean()) / _se(z), abs(v1.mean() - ref_v) / _se(v1)
        assert du <= 3.0 and dz <= 3.0 and dv <= 3.0, (cid, du, dz, dv)
        lines.append(f"case {cid}: dev/SE U={du:.2f} Z={dz:.2f} V={dv:.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, f"A2 runtime {elapsed:.1f}s exceeds 30s"
    print(f"\n[A2] PASS: first moments within 3 SE at n=1, 5e5 paths ({'; '.join(lines)}, {elapsed:.1f}s)")


# --- A3 ------------------------------------------------------------------

def test_a3_one_step_characteristic_identity():
    cir = CASES[2].cir
    n = 500_000
    gen = np.random.default_rng(930)
    u, _, _ = ivi_step_values(np.full(n, cir.v0), cir, 1.0, gen.standard_normal(n), gen.random(n))
    devs = []
    for w in (-0.5, -1.0, -2.0):
        vals = np.exp(w * u)
        ref = one_step_cf(cir.v0, w, cir, 1.0).real
        dev = abs(vals.mean() - ref) / _se(vals)
        assert dev <= 3.0, (w, dev)
        devs.append(f"w={w:g}: {dev:.2f} SE")

    gen = np.random.default_rng(931)
    worst = 0.0
    for _ in range(1000):
        p = CirParams(v0=0.0, a=float(gen.uniform(0.0, 1.0)), b=float(gen.uniform(-20.0, 2.0)),
                      c=float(gen.uniform(0.05, 3.0)) * (1 if gen.random() < 0.5 else -1))
        dt = float(gen.uniform(0.01, 1.0))
        w = complex(-gen.uniform(0.0, 5.0), gen.uniform(-5.0, 5.0))
        psi = one_step_char(0.1, w, p, dt).psi_hat
        sigma = p.c * phi1(p.b, dt)
        worst = max(worst, abs(psi - (w * phi1(p.b, dt) + 0.5 * p.c * sigma * psi * psi)))
    assert worst < 1e-12, worst
    print(f"\n[A3] PASS: transform identity within 3 SE ({'; '.join(devs)}); "
          f"max quadratic residual {worst:.2e} over 1000 draws")


# --- A4 ------------------------------------------------------------------

def _admissible_points() -> list[tuple[complex, complex]]:
    pts = []
    for k in range(20):
        re_u = (k % 5) / 4.0  # covers 0, 1/4, 1/2, 3/4, 1
        im_u = (-1) ** k * (0.5 + 1.5 * (k % 4))
        slack = 0.1 + 0.45 * (k % 3)
        u = complex(re_u, im_u)
        w = complex(-(re_u**2 - re_u) / 2.0 - slack, (-1) ** (k // 2) * 0.7 * (k % 3))
        pts.append((u, w))
    return pts


def _rk4_batch(us, ws, hp, targets, h):
    """Independent vectorised integrator for phi' = a psi,
    psi' = c^2/2 psi^2 + (rho c u + b) psi + w + (u^2 - u)/2."""
    cir = hp.cir
    us = np.asarray(us, dtype=complex)
    wbar = np.asarray(ws, dtype=complex) + (us * us - us) / 2.0
    lin = hp.rho * cir.c * us + cir.b
    half_c2 = 0.5 * cir.c**2

    def rhs(y):
        phi_, psi_ = y
        return np.array([cir.a * psi_, half_c2 * psi_ * psi_ + lin * psi_ + wbar])

    y = np.zeros((2, us.size), dtype=complex)
    out = {}
    t_now = 0.0
    for t_next in targets:
        n = round((t_next - t_now) / h)
        for _ in range(n):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t_now = t_next
        out[t_next] = y.copy()
    return out


def test_a4_riccati_closed_form_vs_rk4_oracle():
    targets = (0.25, 1.0, 10.0)
    pts = _admissible_points()
    us = [u for u, _ in pts]
    ws = [w for _, w in pts]
    worst = 0.0
    for cid, hp in CASES.items():
        ode = _rk4_batch(us, ws, hp, targets, h=1e-4)
        for t in targets:
            for j, (u, w) in enumerate(pts):
                closed = riccati_closed_form(FrequencyPair(u=u, w=w), t, hp)
                worst = max(worst, abs(closed.phi - ode[t][0, j]), abs(closed.psi - ode[t][1, j]))
    assert worst <= 1e-7, worst
    print(f"\n[A4] PASS: max |closed form - RK4| = {worst:.2e} over 3 cases x 20 points x t in {targets}")


# --- A5 ------------------------------------------------------------------

def test_a5_laplace_convergence():
    steps = (1, 2, 4, 8, 16, 32, 64)
    lines = []
    for cid in (1, 2, 3):
        cfg = ExperimentConfig(case=cid, schemes=("ivi",), quantities=("laplace",),
                               steps=steps, n_paths=500_000, seed=950 + cid)
        records, failures = run_convergence(cfg)
        assert failures == 0
        by_n = {r.n_steps: r for r in records}
        r1, r64 = by_n[1], by_n[64]
        assert r64.abs_error <= 3.0 * r64.std_error, (cid, r64)
        slack = 3.0 * math.hypot(r1.std_error, r64.std_error)
        assert r64.abs_error <= r1.abs_error + slack, (cid, r1.abs_error, r64.abs_error)
        if cid == 1:
            assert r1.abs_error <= 3.0 * r1.std_error, r1
        lines.append(f"case {cid}: err(1)={r1.abs_error:.2e} err(64)={r64.abs_error:.2e} "
                     f"3SE={3 * r64.std_error:.2e}")
    print(f"\n[A5] PASS: {'; '.join(lines)}")


# --- A6 ------------------------------------------------------------------

def test_a6_heston_pricing_case3():
    t0 = time.perf_counter()
    hp = CASES[3]

    # reference validation: c -> 0 Black-Scholes limit and put-call parity
    flat = HestonParams(cir=CirParams(v0=hp.cir.v0, a=hp.cir.a, b=hp.cir.b, c=1e-8), rho=hp.rho)
    vol = math.sqrt(variance_swap(1.0, flat.cir))
    for m in (0.8, 1.0, 1.2):
        bs = bs_call_price(1.0, m, 1.0, vol)
        assert abs(fourier_call(m, 1.0, flat) - bs) <= 1e-5, m
        parity = fourier_call(m, 1.0, hp, tol=1e-9) - fourier_put(m, 1.0, hp, tol=1e-9) - (hp.s0 - m)
        assert abs(parity) <= 1e-8, (m, parity)

    batch = simulate_batch(hp, TimeGrid.uniform(1.0, 100), "ivi", 1_000_000, (960,), price_layer=True)
    lines = []
    for m in (0.8, 1.0, 1.2):
        est = mc_price(Payoff("call", strike=m), batch)
        ref = fourier_call(m, 1.0, hp)
        dev = abs(est.mean - ref) / est.std_error
        assert dev <= 3.0, (m, est.mean, ref, dev)
        lines.append(f"K={m}: {dev:.2f} SE")
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0, f"A6 runtime {elapsed:.1f}s exceeds 5min"
    print(f"\n[A6] PASS: n=100, 1e6 paths, {'; '.join(lines)}; references BS-validated to 1e-5, "
          f"parity to 1e-8 ({elapsed:.1f}s)")


# --- A7 ------------------------------------------------------------------

def test_a7_volatility_swap():
    lines = []
    for cid, hp in CASES.items():
        ref = volatility_swap(1.0, hp.cir)
        assert ref < math.sqrt(variance_swap(1.0, hp.cir)), cid  # strict Jensen
        batch = simulate_batch(hp, TimeGrid.uniform(1.0, 256), "ivi", 500_000, (970, cid))
        vals = np.sqrt(batch.u_total)
        dev = abs(vals.mean() - ref) / _se(vals)
        assert dev <= 3.0, (cid, vals.mean(), ref, dev)
        lines.append(f"case {cid}: {dev:.2f} SE")
    print(f"\n[A7] PASS: vol swap within 3 SE at n=256, 5e5 paths ({'; '.join(lines)}); "
          f"Jensen strict in all cases")


# --- A8 ------------------------------------------------------------------

def test_a8_limiting_regime_improvement():
    base = CASES[1].cir
    beta_bar = base.c / (-base.b)
    gamma_bar = base.a / (-base.b)
    results = []
    for scale in (1.0, 4.0, 16.0):
        b = base.b * scale
        cir = CirParams(v0=base.v0, a=-b * gamma_bar, b=b, c=-b * beta_bar)
        gen = np.random.default_rng(980)  # common draws across scales
        n = 500_000
        u, _, _ = ivi_step_values(np.full(n, cir.v0), cir, 1.0, gen.standard_normal(n), gen.random(n))
        vals = np.exp(-u)
        ref = laplace_u(1.0, 1.0, cir.v0, cir)
        results.append((abs(vals.mean() - ref), _se(vals)))
    for (e_prev, s_prev), (e_next, s_next) in zip(results, results[1:]):
        assert e_next <= e_prev + 3.0 * math.hypot(s_prev, s_next), results
    errs = ", ".join(f"{e:.2e}" for e, _ in results)
    print(f"\n[A8] PASS: single-step transform error non-increasing under mean-reversion "
          f"scaling x{{1,4,16}}: {errs}")


# --- A9 ------------------------------------------------------------------

def _log_grid_cdf(p: IgParams, xs: np.ndarray) -> np.ndarray:
    lo = max(float(xs.min()) * 0.5, 1e-300)
    hi = float(xs.max()) * 1.02
    g = np.linspace(math.log(lo), math.log(hi), 400_001)
    x = np.exp(g)
    cdf = integrate.cumulative_trapezoid(ig_pdf(p, x) * x, g, initial=0.0)
    return np.interp(xs, x, cdf)


def test_a9_ig_sampler_grid():
    n = 1_000_000
    worst_ks = 0.0
    for i, mu in enumerate((0.1, 1.0, 10.0)):
        for j, lam in enumerate((0.1, 1.0, 10.0)):
            p = IgParams(mu=mu, lam=lam)
            # variance formula pre-validated by quadrature of the density
            var_quad, quad_err = integrate.quad(
                lambda x: (x - mu) ** 2 * ig_pdf(p, x), 0, np.inf, limit=300)
            assert abs(var_quad - mu**3 / lam) <= max(1e-8, 1e-6 * mu**3 / lam) + 10 * quad_err

            gen = np.random.default_rng(990 + 10 * i + j)
            x = sample_ig_values(np.full(n, mu), np.full(n, lam), gen.standard_normal(n), gen.random(n))
            assert abs(x.mean() - mu) <= 3.0 * _se(x), (mu, lam)
            s2 = x.var(ddof=1)
            m4 = np.mean((x - x.mean()) ** 4)
            se_var = math.sqrt(max(m4 - s2 * s2, 0.0) / n)
            assert abs(s2 - mu**3 / lam) <= 3.0 * se_var, (mu, lam)

            xs = np.sort(x)
            cdf = _log_grid_cdf(p, xs)
            k = np.arange(1, n + 1)
            ks = max(np.max(np.abs(cdf - k / n)), np.max(np.abs(cdf - (k - 1) / n)))
            assert ks < 1.628 / math.sqrt(n), (mu, lam, ks)
            worst_ks = max(worst_ks, ks)
    print(f"\n[A9] PASS: 9-point (mu, lam) grid, 1e6 draws each; moments within 3 SE, "
          f"worst KS {worst_ks:.2e} < {1.628e-3:.2e}")


# --- A10 -----------------------------------------------------------------

def test_a10_determinism_across_thread_counts(monkeypatch):
    cfg = ExperimentConfig(case=2, schemes=("ivi", "qe"), quantities=("variance_swap", "call"),
                           steps=(1, 4), n_paths=50_000, seed=1000)
    monkeypatch.setenv("IVISIM_THREADS", "1")
    rec1, _ = run_convergence(cfg)
    monkeypatch.setenv("IVISIM_THREADS", "4")
    rec4, _ = run_convergence(cfg)
    for a, b in zip(rec1, rec4):
        assert b.estimate == pytest.approx(a.estimate, rel=1e-12)
        assert b.std_error == pytest.approx(a.std_error, rel=1e-12)

    def strip_wall(csv_text: str) -> list[str]:
        return [line.rsplit(",", 1)[0] for line in csv_text.splitlines()]

    assert strip_wall(records_to_csv(rec1, cfg.seed)) == strip_wall(records_to_csv(rec4, cfg.seed))
    print("\n[A10] PASS: 1-thread and 4-thread runs agree to 1e-12 relative; "
          "CSV identical modulo the wall-time column")
