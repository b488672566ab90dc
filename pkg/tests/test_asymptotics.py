import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asmtw.asymptotics import (
    ALPHA, C0, C1, SCALINGS, BranchCutError, Scalings, decay_exponent,
    decay_exponent_derivative_alt, edge_site, limit_shape, limit_shape_residual,
    rescaled_kernel, rescaled_kernel_grid, s1, s1_da, s1_dw, s1_dw2, s1_dw3,
    s1_second_derivative_at_saddle, s1_third_derivative_at_alpha, saddle_derivative,
    saddle_points, saddle_report, site_coordinate, steepest_descent_trace, tail_bound_probe,
    top_path_limit,
)
from asmtw.goetw import kgoe

A_GRID = np.linspace(0.02, ALPHA - 0.01, 12)


def test_scalings():
    assert SCALINGS.check()
    assert abs(C0 * C1 - 1 / (3 * math.sqrt(3))) < 1e-15
    assert not Scalings(c0=0.5).check()


def test_conjugation_symmetry():
    for w in (0.3 + 0.7j, -0.2 + 0.1j, 1.5 - 0.4j):
        for a in (0.1, 0.2):
            assert abs(s1(w.conjugate(), a) - s1(w, a).conjugate()) < 1e-14


def test_im_s1_vanishes_between_minus_one_plus_a_and_zero():
    a = 0.2
    for t in np.linspace(-1 + a + 1e-3, 0, 9):
        assert abs(s1(complex(t, 1e-13), a).imag) < 1e-9


def test_branch_cut_guard():
    with pytest.raises(BranchCutError):
        s1(complex(-1.5, 1e-12), 0.2, eps=1e-8)


def test_double_saddle_at_alpha():
    wp, wm = saddle_points(ALPHA)
    assert wp == wm
    assert abs(s1(wp, ALPHA)) < 1e-13
    assert abs(s1_third_derivative_at_alpha() - 81 / 4) == 0
    assert abs(s1_dw3(wp, ALPHA) - 81 / 4) < 1e-12


def test_cubic_model_near_double_saddle():
    wp = saddle_points(ALPHA)[0]
    for h in (1e-3, 1e-3j, 1e-3 * np.exp(1j * np.pi / 3)):
        assert abs(s1(wp + h, ALPHA) - 81 / 24 * h ** 3) < 1e-9


@pytest.mark.parametrize("a", A_GRID)
def test_saddle_points(a):
    wp, wm = saddle_points(a)
    assert abs(s1_dw(wp, a)) < 1e-10 and abs(s1_dw(wm, a)) < 1e-10
    w_alpha = saddle_points(ALPHA)[0].real
    assert wm.real <= w_alpha <= wp.real <= 0


def test_saddle_points_domain():
    with pytest.raises(ValueError):
        saddle_points(0.0)
    with pytest.raises(ValueError):
        saddle_points(2 + math.sqrt(3))


@pytest.mark.parametrize("a", A_GRID)
def test_second_derivative_closed_form(a):
    for br, sign in (("+", 1), ("-", -1)):
        w = saddle_points(a)[0 if br == "+" else 1]
        v = s1_second_derivative_at_saddle(a, br)
        assert sign * v > 0
        assert abs(v - s1_dw2(w, a).real) <= 1e-9 * abs(v)


def test_second_derivative_tends_to_zero_and_is_monotone():
    plus = [s1_second_derivative_at_saddle(a, "+") for a in A_GRID]
    minus = [s1_second_derivative_at_saddle(a, "-") for a in A_GRID]
    assert all(x > y for x, y in zip(plus, plus[1:]))
    assert all(x < y for x, y in zip(minus, minus[1:]))
    assert abs(s1_second_derivative_at_saddle(ALPHA - 1e-10, "+")) < 1e-3


def mp_s1(w, a):
    L = lambda z: z * mp.log(z) if z != 0 else mp.mpf(0)
    return (L(1 + w) + L(2 - w) + L(2 - 2 * w) + L(-w) - L(1 - w)
            - L(1 + w - a) - L(3 - w) - L(a - 2 * w))


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(0.05, 1.0), st.floats(0.05, 0.25))
def test_derivatives_match_finite_differences(x, y, a):
    with mp.workdps(30):
        w = mp.mpc(x, y)
        for k, f in ((1, s1_dw), (2, s1_dw2), (3, s1_dw3)):
            ref = complex(mp.diff(lambda z: mp_s1(z, a), w, k))
            got = f(complex(w), a)
            assert abs(got - ref) <= 1e-6 * abs(ref) + 1e-12
        ref = complex(mp.diff(lambda b: mp_s1(w, b), mp.mpf(a)))
        assert abs(s1_da(complex(w), a) - ref) <= 1e-6 * abs(ref) + 1e-12


def test_saddle_derivative():
    with mp.workdps(30):
        for a in A_GRID[::3]:
            ref = float(mp.re(mp.diff(saddle_points_mp, mp.mpf(a))))
            assert abs(saddle_derivative(a) - ref) <= 1e-6 * abs(ref)


def saddle_points_mp(a):
    # root of S1' closest to the float w+ by mpmath's secant solver
    w0 = saddle_points(float(a))[0].real
    f = lambda w: (mp.log(1 + w) - mp.log(2 - w) - 2 * mp.log(2 - 2 * w) - mp.log(-w)
                   + mp.log(1 - w) - mp.log(1 + w - a) + mp.log(3 - w) + 2 * mp.log(a - 2 * w))
    return mp.findroot(f, mp.mpf(w0))


@pytest.mark.parametrize("a", [0.1, 0.2, ALPHA])
def test_steepest_descent_trace(a):
    t = steepest_descent_trace(a)
    assert abs(t.endpoint - a) < 1e-6
    assert t.max_abs_im_s1() < 1e-8
    re = t.re_s1()
    assert all(x >= y - 1e-12 for x, y in zip(re, re[1:]))
    want = math.pi / 3 if a == ALPHA else math.pi / 2
    assert abs(t.launch_angle - want) < 5e-3


def test_decay_exponent():
    assert abs(s1(saddle_points(ALPHA)[0], ALPHA)) < 1e-13
    for a in A_GRID:
        g, gp = decay_exponent(a)
        assert g < 0 and gp > 0
        assert abs(gp - decay_exponent_derivative_alt(a)) < 1e-12
    # g(a) = -int_a^alpha g'
    for a in (0.05, 0.2):
        integral = mp.quad(lambda b: decay_exponent(float(b))[1], [a, ALPHA])
        assert abs(decay_exponent(a)[0] + float(integral)) < 1e-8


def test_saddle_report():
    r = saddle_report(0.2)
    d = r.to_dict()
    assert d["g"] < 0 and d["s1_dd_plus"] > 0 > d["s1_dd_minus"]
    assert saddle_report(0.5).exponent is None


def test_limit_shape():
    pts = limit_shape(201)
    assert pts[0] == (1.0, 2.0) and pts[-1] == (2.0, 1.0)
    assert max(abs(limit_shape_residual(x, y)) for x, y in pts) < 1e-12
    assert abs(top_path_limit(0) - (1 - ALPHA)) < 1e-15
    for u in (0.5, -0.5):
        assert abs(top_path_limit(u) - 0.5) < 1e-15
    with pytest.raises(ValueError):
        top_path_limit(1.5)


def test_edge_site_and_coordinate():
    n = 400
    for xi in (-3.0, 0.0, 2.5):
        x = edge_site(n, xi)
        assert abs(site_coordinate(n, x) - xi) <= 1 / (C0 * n ** (1 / 3))


def test_rescaled_kernel_values():
    assert rescaled_kernel(100, 1, 1, 0.5, 0.5) == 0
    assert abs(rescaled_kernel(200, 1, 2, 0, 0) - kgoe(1, 2, 0, 0)) < 0.1
    g = rescaled_kernel_grid(100, [-1.0, 0.0, 1.0])
    assert np.allclose(g[(1, 1)], -g[(1, 1)].T)
    assert np.allclose(g[(2, 1)], -g[(1, 2)].T)
    with pytest.raises(ValueError):
        rescaled_kernel(50, 1, 2, -50.0, 0.0)


def test_tail_probe():
    p = tail_bound_probe(100, 2.0)
    assert p.rate_f11 > 0 and p.rate_f12 > 0
    assert all(r > 0 for r in p.rate_f12_by_eta)
    # decay in xi does not depend much on eta
    assert np.std(p.rate_f12_by_eta) < 0.5 * p.rate_f12
    assert p.max_abs_f22 < 2
    with pytest.raises(ValueError):
        tail_bound_probe(100, -1.0)
