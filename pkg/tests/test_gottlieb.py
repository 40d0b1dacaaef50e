from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beamsym.beam import BeamProfile
from beamsym.expr import eval_jet, parse_expr, unparse
from beamsym.gottlieb import (EXPONENTS, GottliebParams, exponent_polynomial, exponent_roots,
                              g_from_solutions, make_gottlieb, potential_jet, schwarzian,
                              schwarzian_target, solve_normal_ode)
from beamsym.jet import DomainError, Jet
from beamsym.reduction import rigidity_residual
from beamsym.symmetry import SymmetryLabel, chebyshev_nodes, classify, residual_class1

F = Fraction


def test_exponent_roots_exact():
    assert exponent_roots() == {F(0), F(3, 2), F(5, 2), F(4)}
    assert EXPONENTS == exponent_roots()


def test_exponent_polynomial_values():
    assert exponent_polynomial(F(3, 2)) == 0
    assert exponent_polynomial(1) == -9


def test_params_validation():
    ok = dict(exponent=F(4), K=1, A=1, B=1, L=0, M=1, P=1, Q=0, interval=(0, 1))
    GottliebParams(**ok)
    for bad in ({"exponent": F(1)}, {"K": 0}, {"A": 0}, {"interval": (1, 0)},
                {"B": -0.5}, {"L": 1, "M": 1, "P": 1, "Q": 1},
                {"L": 1, "M": 0, "P": -1.5, "Q": 1}):
        with pytest.raises(ValueError):
            GottliebParams(**{**ok, **bad})


def test_quartic_affine_member():
    p = make_gottlieb(GottliebParams(4, 2.0, 1.5, 0.5, 0, 1, 1, 0, (0, 1)))
    for x in (0.0, 0.4, 1.0):
        s = 1.5 * x + 0.5
        assert p.f_jet(x).value == pytest.approx(2 * s**4, rel=1e-14)
        assert p.m_jet(x).value == pytest.approx(2 * 1.5**4 * s**4, rel=1e-14)
    assert classify(p).label is SymmetryLabel.A33_A1


def test_constant_member_is_uniform():
    p = make_gottlieb(GottliebParams(0, 1, 1.3, 1, 0, 1, 1, 0, (0, 1)))
    assert unparse(p.f) == "1"
    assert p.m_jet(0.3).value == pytest.approx(1.3**4, rel=1e-14)


def test_generic_half_branch_member():
    p = make_gottlieb(GottliebParams(F(3, 2), 1, 1, 1, 1, 1, 1, 2, (0, 1)))
    c = classify(p)
    assert c.label is SymmetryLabel.A33_A1
    assert np.all(c.h_max() < 1e-9)


def test_density_is_g_prime_to_the_fourth():
    p = make_gottlieb(GottliebParams(F(5, 2), 1.5, 2, 1, 1, -1, 2, 1, (0, 1)))
    for x in np.linspace(0, 1, 7):
        assert p.m_jet(x).value == pytest.approx(p.gprime(x) ** 4 * p.f_jet(x).value, rel=1e-9)


def _random_params(e, rng):
    while True:
        L, M, P, Q = rng.uniform(-2, 2, 4)
        A = rng.uniform(0.3, 2) * rng.choice([-1, 1])
        B = rng.uniform(0.5, 2) + max(0.0, -A) * 1.0
        try:
            return GottliebParams(e, rng.uniform(0.2, 3), A, B, L, M, P, Q, (0, 1))
        except ValueError:
            continue


@pytest.mark.parametrize("e", sorted(EXPONENTS))
def test_random_members_are_class_one(e):
    rng = np.random.default_rng(int(e * 4) + 17)
    for _ in range(20):
        c = classify(make_gottlieb(_random_params(e, rng)))
        assert c.label is SymmetryLabel.A33_A1
        assert np.all(c.h_max() < 1e-9)


def test_exponential_ansatz_fails_rigidity_equation():
    for D in (0.5, 1.0, -2.0):
        fj = eval_jet(parse_expr(f"3*exp({D}*x)"), 0.2)
        r, n = rigidity_residual(fj)
        assert r / n == pytest.approx(1 / 16, rel=1e-12)
    r, _ = rigidity_residual(eval_jet(parse_expr("3+0*x"), 0.2))
    assert r == 0


# Schwarzian -----------------------------------------------------------------------


def test_schwarzian_examples():
    assert schwarzian(eval_jet(parse_expr("3*x-1"), 0.7)) == 0
    rng = np.random.default_rng(2)
    for x in rng.uniform(0, 3, 10):
        assert abs(schwarzian(eval_jet(parse_expr("(x+1)/(x+2)"), x))) < 1e-12
    assert schwarzian(eval_jet(parse_expr("ln(x)"), 2.0)) == pytest.approx(0.125, rel=1e-14)
    with pytest.raises(DomainError):
        schwarzian(Jet.constant(1.0))


def test_potential():
    A, B, m = 1.3, 0.7, 1.5
    for x in (0.0, 0.5):
        fj = eval_jet(parse_expr(f"({A}*x+{B})^{m}"), x)
        q = A**2 * m * (4 - m) / (20 * (A * x + B) ** 2)
        assert potential_jet(fj).value == pytest.approx(q, rel=1e-13)


def test_uniform_normal_ode():
    p = BeamProfile.from_strings("u", "1", "1", (0.5, 2))
    ode = solve_normal_ode(p)
    assert np.allclose(ode.y1, 1, atol=1e-12)
    assert np.allclose(ode.y2, ode.x - 0.5, atol=1e-12)
    gs = g_from_solutions(ode)
    assert np.allclose(gs.g, ode.x - 0.5, atol=1e-12)


def test_three_halves_solutions_and_closed_form():
    p = BeamProfile.from_strings("p", "(1+x)^(3/2)", "1", (0, 1))
    ode = solve_normal_ode(p)
    s = 1 + ode.x
    assert np.allclose(ode.y1, 1.5 * s**0.25 - 0.5 * s**0.75, atol=1e-9)
    assert np.allclose(ode.y2, 2 * (s**0.75 - s**0.25), atol=1e-9)
    assert ode.wronskian_drift < 1e-9
    gs = g_from_solutions(ode)
    r = np.sqrt(1 + gs.x)
    assert np.allclose(gs.g, 4 * (r - 1) / (3 - r), atol=1e-9)


def test_schwarzian_route_matches_target():
    p = BeamProfile.from_strings("p", "(2*x+1)^(3/2)", "1", (0, 1))
    gs = g_from_solutions(solve_normal_ode(p))
    for x in chebyshev_nodes(0, 1, 33):
        assert gs.schwarzian(x) == pytest.approx(schwarzian_target(p.f_jet(x)), abs=1e-8)
    # the closed-form member with the same f has the same Schwarzian
    q = make_gottlieb(GottliebParams(F(3, 2), 1, 2, 1, 1, 1, 1, 2, (0, 1)))
    for x in chebyshev_nodes(0, 1, 9):
        assert abs(schwarzian(q.g.jet(x)) - gs.schwarzian(x)) < 1e-8


def test_first_zero_of_y1_truncates():
    # f = (1+x)^2 gives q = 1/(5(1+x)^2); start with y1 decreasing to force a zero
    p = BeamProfile.from_strings("p", "(1+x)^2", "1", (0, 4))
    ode = solve_normal_ode(p, init=((1.0, -1.0), (0.0, 1.0)))
    gs = g_from_solutions(ode)
    lo, hi = gs.valid_interval
    assert lo == 0 and hi < 4
    assert abs(ode.state(hi)[0]) < 1e-10


@given(st.tuples(*[st.floats(-2, 2)] * 4).filter(lambda c: abs(c[0] * c[3] - c[1] * c[2]) > 0.1))
def test_moebius_freedom(c):
    p = BeamProfile.from_strings("p", "(1+x)^(5/2)", "1", (0, 1))
    a, b, cc, d = c
    base = solve_normal_ode(p)
    other = solve_normal_ode(p, init=((a, b), (cc, d)))
    x = 0.37
    y1 = other.state(x)[0]
    if abs(y1) < 1e-3:
        return
    sa = g_from_solutions(base).schwarzian(x)
    sb = g_from_solutions(other).schwarzian(x)
    assert abs(sa - sb) < 1e-10


@given(st.floats(0.2, 3.0), st.floats(0.5, 2.0), st.floats(0.05, 0.95))
def test_schwarzian_constraint_equivalence(A, B, x):
    # along any g solving the first class-I constraint the Schwarzian equals the target
    p = BeamProfile.from_strings("p", f"({A}*x+{B})^(3/2)", "1", (0, 1))
    gs = g_from_solutions(solve_normal_ode(p))
    if not gs.valid_interval[0] <= x < gs.valid_interval[1]:
        return
    gj = gs.jet(x)
    r1, _ = residual_class1(p.f_jet(x), gj)
    assert r1.normalized < 1e-10
    assert abs(schwarzian(gj) - schwarzian_target(p.f_jet(x))) < 1e-10


def test_exponent_completeness_scan():
    hits = set()
    for k in range(17):
        e = F(k, 4)
        p = BeamProfile.from_strings("p", f"(1+x)^({e.numerator}/{e.denominator})", "1", (0, 1))
        gs = g_from_solutions(solve_normal_ode(p))
        worst = 0.0
        for x in chebyshev_nodes(*gs.valid_interval, 9):
            r1, r2 = residual_class1(p.f_jet(x), gs.jet(x))
            worst = max(worst, r1.normalized, r2.normalized)
        if worst < 1e-9:
            hits.add(e)
    assert hits == set(EXPONENTS)
