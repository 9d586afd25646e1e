import math

import numpy as np
import pytest

from ivisim.analytics import fourier_call
from ivisim.cir import CirParams, StepOutput, TimeGrid
from ivisim.engine import simulate_batch
from ivisim.heston import HestonParams, McEstimate, Payoff, heston_step, mc_price, simulate_heston
from ivisim.rng import RngStream


def test_heston_params_validation():
    cir = CirParams(0.04, 0.02, -0.5, 1.0)
    with pytest.raises(ValueError):
        HestonParams(cir=cir, rho=1.5)
    with pytest.raises(ValueError):
        HestonParams(cir=cir, rho=0.0, s0=0.0)


def test_step_zero_variance_increment_keeps_price():
    out = StepOutput(u_inc=0.0, z_inc=0.0, v_next=0.0)
    assert heston_step(0.3, out, -0.7, RngStream(seed=2)) == 0.3


def test_step_degenerate_correlation_consumes_orthogonal_draw():
    out = StepOutput(u_inc=0.02, z_inc=-0.05, v_next=0.01)
    a = RngStream(seed=4, stream_id=1)
    got = heston_step(0.0, out, 1.0, a)
    assert got == pytest.approx(-0.02 / 2 + (-0.05), rel=1e-15)
    # the orthogonal draw was consumed even though its weight is zero
    b = RngStream(seed=4, stream_id=1)
    b.orthogonal_normal()
    assert a.orthogonal_normal() == b.orthogonal_normal()
    with pytest.raises(ValueError):
        heston_step(0.0, out, 1.2, a)


def test_price_increment_conditionally_gaussian():
    # frozen variance step, rho = 0: increment ~ N(-u/2, u)
    u = 0.0375
    gen = np.random.default_rng(40)
    n = 1_000_000
    inc = -0.5 * u + math.sqrt(u) * gen.standard_normal(n)
    assert abs(inc.mean() + 0.5 * u) <= 3.0 * math.sqrt(u / n)
    s2 = inc.var(ddof=1)
    m4 = np.mean((inc - inc.mean()) ** 4)
    assert abs(s2 - u) <= 3.0 * math.sqrt((m4 - s2 * s2) / n)


def test_martingale_case2(cases):
    batch = simulate_batch(cases[2], TimeGrid.uniform(1.0, 16), "ivi", 2_000_000, (41,), price_layer=True)
    s = np.exp(batch.log_s)
    assert abs(s.mean() - 1.0) <= 3.0 * s.std() / math.sqrt(s.size)


def test_variance_stream_isolation(cases):
    grid = TimeGrid.uniform(1.0, 8)
    with_price = simulate_batch(cases[2], grid, "ivi", 50_000, (42,), price_layer=True)
    without = simulate_batch(cases[2], grid, "ivi", 50_000, (42,), price_layer=False)
    assert np.array_equal(with_price.u_total, without.u_total)
    assert np.array_equal(with_price.v_final, without.v_final)
    assert without.log_s is None


def test_scalar_simulate_heston_deterministic(cases):
    grid = TimeGrid.uniform(0.5, 6)
    p1 = simulate_heston(cases[2], grid, "ivi", RngStream(seed=7, stream_id=3))
    p2 = simulate_heston(cases[2], grid, "ivi", RngStream(seed=7, stream_id=3))
    assert np.array_equal(p1.log_s, p2.log_s)
    assert np.array_equal(p1.cir.v, p2.cir.v)
    assert p1.log_s[0] == math.log(cases[2].s0)
    # variance path identical to the pure-variance scalar path
    from ivisim.cir import simulate_cir_path

    pure = simulate_cir_path(cases[2].cir, grid, RngStream(seed=7, stream_id=3))
    assert np.array_equal(p1.cir.v, pure.v)


def test_u_functionals_insensitive_to_price_layer(cases):
    # rho = 0 and U-payoffs: orthogonal draws cannot move the estimate
    hp = HestonParams(cir=cases[2].cir, rho=0.0)
    grid = TimeGrid.uniform(1.0, 4)
    a = simulate_batch(hp, grid, "ivi", 20_000, (43,), price_layer=True)
    b = simulate_batch(hp, grid, "ivi", 20_000, (43,), price_layer=False)
    pay = Payoff("u_total")
    assert mc_price(pay, a) == mc_price(pay, b)


def test_case1_single_step_call_pricing(cases):
    # with one step and 2M paths the ITM price sits inside the 3-SE band;
    # ATM carries a visible single-step bias that falls inside the band by
    # 15 steps (the joint law of (U, Z) is approximated, not exact)
    hp = cases[1]
    itm_ref = fourier_call(0.8, 1.0, hp)
    atm_ref = fourier_call(1.0, 1.0, hp)

    one = simulate_batch(hp, TimeGrid.uniform(1.0, 1), "ivi", 2_000_000, (44,), price_layer=True)
    itm = mc_price(Payoff("call", strike=0.8), one)
    assert abs(itm.mean - itm_ref) <= 3.0 * itm.std_error

    atm_1 = mc_price(Payoff("call", strike=1.0), one)
    fifteen = simulate_batch(hp, TimeGrid.uniform(1.0, 15), "ivi", 2_000_000, (44,), price_layer=True)
    atm_15 = mc_price(Payoff("call", strike=1.0), fifteen)
    assert abs(atm_15.mean - atm_ref) < abs(atm_1.mean - atm_ref)
    assert abs(atm_15.mean - atm_ref) < 0.01 * atm_ref


def test_schemes_share_variance_draw_blocks(cases):
    # at b = 0 the main and drift-approximated schemes coincide path by path,
    # which only happens if both consume identical (normal, uniform) blocks
    cir = CirParams(v0=0.04, a=0.02, b=0.0, c=0.6)
    hp = HestonParams(cir=cir, rho=-0.5)
    grid = TimeGrid.uniform(1.0, 5)
    a = simulate_batch(hp, grid, "ivi", 10_000, (45,), price_layer=True)
    b = simulate_batch(hp, grid, "ivi_simple", 10_000, (45,), price_layer=True)
    assert np.allclose(a.u_total, b.u_total, rtol=1e-13)
    assert np.allclose(a.log_s, b.log_s, rtol=1e-12, atol=1e-12)


def test_payoff_menu_and_validation():
    with pytest.raises(ValueError):
        Payoff("straddle")
    with pytest.raises(ValueError):
        Payoff("call", strike=0.0)
    u = np.array([0.01, 0.04])
    log_s = np.array([0.0, 0.1])
    assert np.allclose(Payoff("sqrt_u_total").values(u, None), np.sqrt(u))
    assert np.allclose(Payoff("exp_neg_u", q=2.0).values(u, None), np.exp(-2.0 * u))
    assert np.allclose(Payoff("put", strike=1.05).values(u, log_s), [0.05, 0.0], atol=1e-12)
    with pytest.raises(ValueError):
        Payoff("call", strike=1.0).values(u, None)


def test_mc_price_constant_and_se_scaling(cases):
    # all-zero variance paths give the constant payoff exp(0) = 1
    hp = HestonParams(cir=CirParams(v0=0.0, a=0.0, b=-1.0, c=1.0), rho=0.0)
    batch = simulate_batch(hp, TimeGrid.uniform(1.0, 2), "ivi", 1000, (46,))
    est = mc_price(Payoff("exp_neg_u"), batch)
    assert est == McEstimate(mean=1.0, std_error=0.0, n_paths=1000)

    big = simulate_batch(cases[3], TimeGrid.uniform(1.0, 4), "ivi", 160_000, (47,), price_layer=True)
    small_vals = Payoff("call", strike=1.0).values(big.u_total[:40_000], big.log_s[:40_000])
    big_vals = Payoff("call", strike=1.0).values(big.u_total, big.log_s)

    class _Shim:
        def __init__(self, u, s):
            self.u_total, self.log_s = u, s

    se_small = mc_price(Payoff("call", strike=1.0), _Shim(big.u_total[:40_000], big.log_s[:40_000])).std_error
    se_big = mc_price(Payoff("call", strike=1.0), _Shim(big.u_total, big.log_s)).std_error
    assert se_big == pytest.approx(se_small / 2.0, rel=0.2)
    assert small_vals.size == 40_000 and big_vals.size == 160_000

    with pytest.raises(ValueError):
        mc_price(Payoff("u_total"), _Shim(np.array([1.0]), None))
