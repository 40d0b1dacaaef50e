from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beamsym.jet import DomainError
from beamsym.reduction import (coefficient_table, rigidity_residual, initial_from_uv,
                               reduce_all, reduce_stage1, reduce_stage2, reduce_stage3, slope_at,
                               solve_rigidity, stage3_equilibria, stage_residual)


@pytest.mark.parametrize("f, c, p, zc", [("(1+x)^(3/2)", 1.5, 1 / 3, 1 / 3), ("(1+x)^4", 4.0, 0.75, 0.75)])
def test_power_trajectories(f, c, p, zc):
    s1, s2, s3 = reduce_all(f, (0, 1))
    t = s1.column("t")
    assert np.allclose(s1.column("y"), c * t**p, rtol=1e-12)
    assert s1.max_derived < 1e-9
    assert np.allclose(s2.column("z"), zc / t, rtol=1e-12)
    assert s2.max_derived < 1e-9
    # u = tz is constant and v = 0: an equilibrium of the first-order equation
    assert s3.equilibrium == pytest.approx((zc, 0.0), abs=1e-12)
    assert np.all(np.isnan(s3.column("dvdu")))


def test_equilibria_are_roots_of_the_v_zero_slice():
    for u in stage3_equilibria():
        assert stage_residual(3, 0.0, (float(u), 0.0))[0] == pytest.approx(0, abs=1e-14)
    assert set(stage3_equilibria()) == {Fraction(1, 3), Fraction(3, 5), Fraction(3, 4)}


def test_constant_rigidity_refused():
    with pytest.raises(DomainError):
        reduce_stage1("1+0*x", (0, 1))


def test_non_solution_refused():
    with pytest.raises(DomainError):
        reduce_stage1("(1+x)^2", (0, 1))


def test_stage_order_enforced():
    s1 = reduce_stage1("(1+x)^4", (0, 1), samples=5)
    with pytest.raises(ValueError):
        reduce_stage3(s1)
    with pytest.raises(ValueError):
        reduce_stage2(reduce_stage2(s1))


def test_scale_equivariance():
    a = reduce_stage2(reduce_stage1("(1+x)^(5/2)", (0, 1), samples=9))
    b = reduce_stage2(reduce_stage1("5*(1+x)^(5/2)", (0, 1), samples=9))
    assert np.allclose(b.column("t"), 5 * a.column("t"), rtol=1e-10)
    assert np.allclose(b.column("z"), a.column("z") / 5, rtol=1e-10)


def test_invariants_of_time_scaling():
    s2 = reduce_stage2(reduce_stage1("(2+x)^(5/2)", (0, 1), samples=9))
    t, z, z1 = (s2.column(k) for k in ("t", "z", "zdot"))
    lam = 2.0
    T, Z, Z1 = lam * t, z / lam, z1 / lam**2
    assert np.allclose(T * Z, t * z, rtol=1e-12, atol=0)
    assert np.allclose(T * Z + T**2 * Z1, t * z + t**2 * z1, rtol=1e-12, atol=1e-15)


def _random_solution(rng):
    f0 = rng.uniform(0.5, 2.0)
    f1 = rng.uniform(0.5, 2.0)
    initial = (f0, f1, rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    return solve_rigidity(initial, (0.0, 0.3))


def test_random_solutions_satisfy_stage_equations():
    rng = np.random.default_rng(8)
    for _ in range(10):
        sol = _random_solution(rng)
        for x in (0.0, 0.15, 0.3):
            r, n = rigidity_residual(sol.jet(x))
            assert abs(r) < 1e-10 * n
        s1 = reduce_stage1(sol, sol.interval, samples=9)
        s2 = reduce_stage2(s1)
        s3 = reduce_stage3(s2)
        assert s1.max_derived < 1e-8 and s2.max_derived < 1e-8 and s3.max_derived < 1e-8
        # the alternative coefficients do not hold on generic trajectories
        assert s1.max_alternative > 1e-3 and s3.max_alternative > 1e-3


def test_well_definedness():
    u, v = 0.5, 0.2
    a = slope_at(initial_from_uv(u, v, 1.0, 1.0))
    b = slope_at(initial_from_uv(u, v, 2.7, -0.6))
    assert a[:2] == pytest.approx((u, v), abs=1e-12)
    assert b[:2] == pytest.approx((u, v), abs=1e-12)
    assert abs(a[2] - b[2]) < 1e-8


def test_coefficient_table_reports_both_variants():
    rows = coefficient_table()
    assert {r[0] for r in rows} == {1, 2, 3}
    diffs = [(s, n) for s, n, d, p in rows if d != p]
    assert (3, "v") in diffs and (3, "u³") in diffs and (2, "z³") in diffs
    assert all(isinstance(d, Fraction) for _, _, d, _ in rows)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.tuples(*[st.floats(-3, 3)] * 4),
       st.floats(0.1, 3))
def test_stage1_residual_equivariance(t, y, d, lam):
    y = y if d[0] >= 0 else -y
    y1, y2, y3 = d[1:]
    base = stage_residual(1, y3, (t, y, y1, y2))[0]
    # f -> lam f
    r = stage_residual(1, y3 / lam**2, (lam * t, lam * y, y1, y2 / lam))[0]
    assert r == pytest.approx(base / lam**2, rel=1e-9, abs=1e-9 * (1 + abs(base)))
    # x -> x / lam
    r = stage_residual(1, lam * y3, (t, lam * y, lam * y1, lam * y2))[0]
    assert r == pytest.approx(lam * base, rel=1e-9, abs=1e-9 * (1 + abs(base)))
