import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coldplasma import BlowupCrossed, CharState, GradState, Nu, Regime, eval_FG, eval_qs, eval_VE, regime
from coldplasma.analytic import f_minimum_time, f_minimum_value
from oracles import rk4

NUS = [0.0, 0.2, 0.5, 1.9, 2.0, 2.1, 3.0, 10.0]
unit = st.floats(-1.0, 1.0, allow_nan=False)


def test_regime_split():
    assert regime(0) is Regime.UNDAMPED
    assert regime(0.7) is Regime.UNDERDAMPED
    assert regime(2) is Regime.CRITICAL
    assert regime(2 + 1e-10) is Regime.CRITICAL
    assert regime(3) is Regime.OVERDAMPED
    with pytest.raises(ValueError):
        Nu(-0.1)
    with pytest.raises(ValueError):
        Nu(float("nan"))


def test_regime_helpers():
    assert Nu(1.0).omega == pytest.approx(math.sqrt(3) / 2)
    assert Nu(2.5).omega1 == pytest.approx(0.75)
    assert Nu(2.5).z == pytest.approx(4.0)
    assert Nu(2.5).z_pm == pytest.approx((-0.5, -2.0))
    with pytest.raises(ValueError):
        Nu(2.0).omega1
    with pytest.raises(ValueError):
        Nu(3.0).omega


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        eval_VE(0.1, CharState(0.0, 1.0), -1.0)
    with pytest.raises(ValueError):
        eval_FG(0.1, GradState(0.0, 0.1), float("inf"))


@pytest.mark.parametrize("nu", NUS)
def test_equilibria(nu):
    st_ = eval_VE(nu, CharState(0.0, 0.0), 7.3)
    assert st_.V == 0.0 and st_.E == 0.0
    g = eval_qs(nu, GradState(0.0, 0.0), 7.3)
    assert g.q == 0.0 and g.s == 0.0


def test_critical_example():
    st_ = eval_VE(2.0, CharState(V=0.0, E=1.0), 1.0)
    assert st_.E == pytest.approx(2 / math.e, abs=1e-15)
    assert st_.V == pytest.approx(-1 / math.e, abs=1e-15)


def test_critical_E_formula():
    # E = (E0 + (V0 + E0) t) exp(-t) at nu = 2
    V0, E0, t = 0.3, -0.7, 2.2
    st_ = eval_VE(2.0, CharState(V0, E0), t)
    assert st_.E == pytest.approx((E0 + (V0 + E0) * t) * math.exp(-t), abs=1e-15)


def test_eval_VE_against_rk4():
    ref = rk4(0.5, [0.1, 0.2, 0.0, 0.0], 10.0)[10.0]
    st_ = eval_VE(0.5, CharState(V=0.1, E=0.2), 10.0)
    assert abs(st_.V - ref[0]) < 1e-8
    assert abs(st_.E - ref[1]) < 1e-8


def test_eval_qs_against_rk4():
    ref = rk4(0.2, [0.0, 0.0, 0.1, 0.3], 5.0)[5.0]
    g = eval_qs(0.2, GradState(q=0.1, s=0.3), 5.0)
    assert abs(g.q - ref[2]) < 1e-8
    assert abs(g.s - ref[3]) < 1e-8


@pytest.mark.parametrize("nu", NUS)
def test_FG_at_zero(nu):
    fg = eval_FG(nu, GradState(q=-0.37, s=0.21), 0.0)
    assert fg.F == 1.0
    assert fg.G == pytest.approx(-0.37, abs=1e-16)


def test_undamped_F():
    t = np.linspace(0, 10, 51)
    k = 0.4
    assert np.allclose(eval_FG(0, GradState(0.0, k), t).F, 1 - k + k * np.cos(t), atol=1e-15)


def test_critical_F_example():
    F = eval_FG(2.0, GradState(q=0.0, s=0.4), 1.0).F
    assert F == pytest.approx(0.6 + 0.8 / math.e, abs=1e-15)
    ref = rk4(2.0, [0, 0, 0.0, 0.4], 1.0)[1.0]
    # q = G/F and 1 - s = (1 - s0)/F recover the oracle
    assert (1 - ref[3]) * F == pytest.approx(0.6, abs=1e-10)


def test_undamped_gradient_example():
    g = eval_qs(0.0, GradState(q=0.0, s=0.4), math.pi)
    assert eval_FG(0.0, GradState(0.0, 0.4), math.pi).F == pytest.approx(0.2, abs=1e-15)
    assert g.s == pytest.approx(-2.0, abs=1e-13)
    assert g.q == pytest.approx(0.0, abs=1e-13)


def test_blowup_crossed():
    with pytest.raises(BlowupCrossed):
        eval_qs(0.0, GradState(0.0, 0.8), 3.0)
    # F dips below zero and recovers before t: still reported
    init = GradState(q=0.0, s=0.8)
    assert eval_FG(0.0, init, 2 * math.pi).F > 0
    with pytest.raises(BlowupCrossed):
        eval_qs(0.0, init, 2 * math.pi)


@pytest.mark.parametrize("nu", NUS)
def test_vectorised_matches_scalar(nu):
    q = np.array([-0.5, 0.2, 0.9])
    s = np.array([0.1, -0.3, 0.4])
    t = 3.3
    fg = eval_FG(nu, GradState(q, s), t)
    for i in range(3):
        one = eval_FG(nu, GradState(float(q[i]), float(s[i])), t)
        assert fg.F[i] == pytest.approx(one.F, rel=1e-14)


def test_T1_formula():
    # nu = 0.5, q0 < 0 and nu q0 + 2 s0 < 0: closed-form extremum time
    nu, q0, s0 = 0.5, -0.8, 0.1
    r = math.sqrt(4 - nu * nu)
    t1 = 2 / r * math.atan(q0 * r / (nu * q0 + 2 * s0))
    assert f_minimum_time(nu, s0, q0) == pytest.approx(t1, rel=1e-13)


def test_minimum_is_stationary_and_first():
    rng = np.random.default_rng(4)
    for nu in NUS:
        for _ in range(40):
            q0, s0 = rng.uniform(-2, 2), rng.uniform(-2, 0.95)
            tm = float(f_minimum_time(nu, s0, q0))
            if math.isnan(tm):
                continue
            init = GradState(q0, s0)
            assert abs(eval_FG(nu, init, tm).G) < 1e-10 * (1 + abs(q0) + abs(s0))
            h = 1e-4 * max(tm, 1e-3)
            f = lambda t: eval_FG(nu, init, t).F
            assert f(tm) <= f(tm + h) + 1e-15 and f(tm) <= f(max(tm - h, 0)) + 1e-15
            # F' never turns from negative to positive before tm
            G = np.asarray(eval_FG(nu, init, np.linspace(0, tm, 2001)[:-20]).G)
            assert not np.any((G[:-1] < 0) & (G[1:] > 0))


def test_critical_extremum_time():
    # F' = exp(-t) (q0 - (q0 + s0) t) at nu = 2
    assert f_minimum_time(2.0, 0.0, -2.0) == pytest.approx(1.0)
    assert eval_FG(2.0, GradState(-2.0, 0.0), 1.0).G == pytest.approx(0.0, abs=1e-16)
    # ln((s0 + q0)/(s0 - 1)) is where F = 0 on the separatrix, not an extremum
    assert abs(eval_FG(2.0, GradState(-2.0, 0.0), math.log(2)).G) > 0.1
    s0 = 0.0
    # on the separatrix (s0+q0) ln((s0+q0)/(s0-1)) = q0 both times coincide
    from scipy.optimize import brentq

    q0 = brentq(lambda q: (s0 + q) * math.log((s0 + q) / (s0 - 1)) - q, -50, -1.0001)
    t = math.log((s0 + q0) / (s0 - 1))
    assert f_minimum_time(2.0, s0, q0) == pytest.approx(t, rel=1e-9)
    assert f_minimum_value(2.0, s0, q0) == pytest.approx(0.0, abs=1e-12)


def test_no_minimum_gives_nan_and_inf():
    assert math.isnan(f_minimum_time(3.0, 0.2, 0.5))
    assert f_minimum_value(3.0, 0.2, 0.5) == math.inf
    assert math.isnan(f_minimum_time(0.0, 0.0, 0.0))


def test_s_from_riccati_form():
    # s = -dq/dt - q^2 - nu q, with dq/dt by central differences
    for nu in NUS:
        init = GradState(q=0.3, s=-0.4)
        t, h = 2.7, 1e-5
        q = lambda t: eval_qs(nu, init, t).q
        dq = (q(t + h) - q(t - h)) / (2 * h)
        g = eval_qs(nu, init, t)
        assert -dq - g.q**2 - nu * g.q == pytest.approx(g.s, abs=1e-8)


def test_amplitude_forms():
    # trigonometric and hyperbolic amplitude forms of F and G
    q0, s0 = -0.4, 0.3
    nu = 0.7
    r = math.sqrt(4 - nu * nu)
    a11, a12, w = (nu * s0 + 2 * q0) / r, (nu * q0 + 2 * s0) / r, r / 2
    for t in (0.5, 2.0, 7.0):
        fg = eval_FG(nu, GradState(q0, s0), t)
        decay = math.exp(-nu * t / 2)
        assert fg.F == pytest.approx(1 - s0 + (a11 * math.sin(w * t) + s0 * math.cos(w * t)) * decay, abs=1e-14)
        assert fg.G == pytest.approx((-a12 * math.sin(w * t) + q0 * math.cos(w * t)) * decay, abs=1e-14)
    nu = 3.0
    r = math.sqrt(nu * nu - 4)
    a21, a22, w1 = (nu * s0 + 2 * q0) / r, (nu * q0 + 2 * s0) / r, r / 2
    for t in (0.5, 2.0, 7.0):
        fg = eval_FG(nu, GradState(q0, s0), t)
        decay = math.exp(-nu * t / 2)
        assert fg.F == pytest.approx(1 - s0 + (a21 * math.sinh(w1 * t) + s0 * math.cosh(w1 * t)) * decay, abs=1e-14)
        assert fg.G == pytest.approx((-a22 * math.sinh(w1 * t) + q0 * math.cosh(w1 * t)) * decay, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(q0=unit, s0=unit, t=st.floats(0, 20), nu=st.sampled_from(NUS))
def test_G_is_dF_dt(q0, s0, t, nu):
    init = GradState(q0, s0)
    h = 1e-5
    t = max(t, h)
    dF = (eval_FG(nu, init, t + h).F - eval_FG(nu, init, t - h).F) / (2 * h)
    G = eval_FG(nu, init, t).G
    assert abs(dF - G) <= 1e-6 * (1 + abs(G))


@settings(max_examples=200, deadline=None)
@given(q0=unit, s0=unit, t=st.floats(0, 20), nu=st.sampled_from(NUS))
def test_density_conservation(q0, s0, t, nu):
    init = GradState(q0, s0)
    F = eval_FG(nu, init, t).F
    try:
        g = eval_qs(nu, init, t)
    except BlowupCrossed:
        return
    assert (1 - g.s) * F == pytest.approx(1 - s0, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(V0=unit, E0=unit, nu=st.sampled_from([0.2, 0.5, 1.9, 2.0, 2.1, 3.0, 10.0]))
def test_decay(V0, E0, nu):
    n = Nu(nu)
    rate = {Regime.UNDERDAMPED: nu / 2, Regime.CRITICAL: 1.0}.get(n.regime)
    if rate is None:
        rate = abs(n.z_pm[0])
    T = 40 / min(nu, rate)
    st_ = eval_VE(nu, CharState(V0, E0), T)
    assert abs(st_.V) + abs(st_.E) <= 1e-6


@settings(max_examples=100, deadline=None)
@given(V0=unit, E0=unit, nu=st.sampled_from([0.0, 0.2, 1.0, 2.0, 3.0, 10.0]))
def test_energy_non_increasing(V0, E0, nu):
    t = np.linspace(0, 20, 401)
    st_ = eval_VE(nu, CharState(V0, E0), t)
    energy = np.asarray(st_.E) ** 2 + np.asarray(st_.V) ** 2
    assert np.all(np.diff(energy) <= 1e-14)


@settings(max_examples=100, deadline=None)
@given(q0=unit, s0=unit, t=st.floats(0, 10), sign=st.sampled_from([-1, 1]))
def test_regime_continuity(q0, s0, t, sign):
    init = GradState(q0, s0)
    F2 = eval_FG(2.0, init, t).F
    assert abs(eval_FG(2.0 + sign * 1e-6, init, t).F - F2) <= 1e-4


@settings(max_examples=60, deadline=None)
@given(V0=unit, E0=unit, nu=st.sampled_from([2.1, 3.0, 10.0]))
def test_overdamped_V_has_at_most_one_zero(V0, E0, nu):
    if abs(V0) + abs(E0) < 1e-3:
        return
    t = np.linspace(0, 60, 6001)
    V = np.asarray(eval_VE(nu, CharState(V0, E0), t).V)
    V = V[np.abs(V) > 1e-300]
    assert np.count_nonzero(np.diff(np.sign(V))) <= 1


@settings(max_examples=60, deadline=None)
@given(V0=unit, E0=unit, nu=st.sampled_from([0.1, 0.2, 1.0, 1.9]))
def test_underdamped_V_oscillates(V0, E0, nu):
    if abs(V0) + abs(E0) < 1e-3:
        return
    # three zeros on (0, 6 pi/sqrt(4 - nu^2)]; the last one can sit on the
    # endpoint, so look a hair beyond it
    t = np.linspace(0, 6 * math.pi / math.sqrt(4 - nu * nu) * (1 + 1e-3), 6001)
    V = np.asarray(eval_VE(nu, CharState(V0, E0), t).V)
    assert np.count_nonzero(np.diff(np.sign(V[V != 0]))) >= 3
