"""Successive order reduction of the fourth-order rigidity equation

    f'''' = f' f'''/f + (11/10) f''^2/f - (12/5) f'^2 f''/f^2 + (9/10) f'^4/f^3

along its solvable symmetry algebra <d/dx, x d/dx, f d/df>:

    stage 1: t = f, y = f'           (third order in y(t))
    stage 2: z = y'/y                (second order in z(t))
    stage 3: u = t z, v = t z + t^2 z'  (first order in v(u))

Each stage is checked on trajectories against the independently derived
reduced equation and, side by side, against an alternative coefficient
set that differs in several terms and does not hold on trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import jet as J
from .expr import Node, eval_jet, parse_expr
from .jet import DomainError, Jet

# Fourth-order equation -----------------------------------------------------


def rigidity_rhs(f0, f1, f2, f3):
    """f'''' as a function of lower derivatives; floats or jets."""
    return (f1 * f3 / f0 + 1.1 * f2 * f2 / f0 - 2.4 * f1 * f1 * f2 / (f0 * f0)
            + 0.9 * f1 * f1 * f1 * f1 / (f0 * f0 * f0))


def rigidity_residual(fj: Jet) -> tuple[float, float]:
    """(f'''' - rhs, normalizer) at the jet's base point."""
    f0, f1, f2, f3, f4 = (fj[k] for k in range(5))
    terms = (f1 * f3 / f0, 1.1 * f2**2 / f0, -2.4 * f1**2 * f2 / f0**2, 0.9 * f1**4 / f0**3)
    return f4 - sum(terms), abs(f4) + sum(abs(v) for v in terms)


@dataclass(frozen=True)
class RigiditySolution:
    """Numerical solution of the fourth-order equation with dense x-jets."""

    x0: float
    initial: tuple[float, float, float, float]
    interval: tuple[float, float]
    solution: object

    def state(self, x: float) -> np.ndarray:
        return self.solution(x)

    def jet(self, x: float) -> Jet:
        f0, f1, f2, f3 = self.state(x)
        c = np.zeros(J.ORDER + 1)
        c[:4] = [f0, f1, f2 / 2.0, f3 / 6.0]
        fact = [float(np.prod(np.arange(k + 1, k + 5))) for k in range(J.ORDER - 3)]
        # Picard sweeps: each one fixes one more Taylor coefficient
        for _ in range(J.ORDER - 3):
            F = Jet(c)
            F1 = F.deriv()
            F2 = F1.deriv()
            R = rigidity_rhs(F, F1, F2, F2.deriv()).coefficients
            for k in range(J.ORDER - 3):
                c[k + 4] = R[k] / fact[k] if np.isfinite(R[k]) else 0.0
        return Jet(c)


def solve_rigidity(initial, interval, x0: float | None = None, rtol: float = 1e-12) -> RigiditySolution:
    a, b = (float(v) for v in interval)
    x0 = a if x0 is None else float(x0)
    if initial[0] <= 0:
        raise DomainError("f must be positive")

    def rhs(x, y):
        if y[0] <= 0:
            raise DomainError("f left the positive half-line", x)
        return [y[1], y[2], y[3], rigidity_rhs(*y)]

    spans = [(x0, b)] if x0 <= a else [(x0, a), (x0, b)]
    sols = []
    for span in spans:
        if span[0] == span[1]:
            continue
        s = solve_ivp(rhs, span, list(initial), method="DOP853", rtol=rtol,
                      atol=rtol * 1e-3, dense_output=True)
        if s.status != 0:
            raise DomainError(f"integration failed: {s.message}")
        sols.append((span, s.sol))

    def dense(x):
        for (lo, hi), sol in sols:
            if min(lo, hi) <= x <= max(lo, hi):
                return sol(x)
        raise DomainError(f"x={x!r} outside the integration interval", x)

    return RigiditySolution(x0, tuple(float(v) for v in initial), (a, b), dense)


def initial_from_uv(u: float, v: float, f0: float, f1: float) -> tuple[float, float, float, float]:
    """A state (f, f', f'', f''') whose stage-3 image is (u, v)."""
    f2 = u * f1**2 / f0
    zdot_t2 = v - u
    f3 = f1**3 * (zdot_t2 / f0**2 + 2.0 * f2**2 / f1**4)
    return f0, f1, f2, f3


# Reduced equations -----------------------------------------------------------


@dataclass(frozen=True)
class Term:
    name: str
    derived: Fraction
    alternative: Fraction
    monomial: Callable

    def value(self, which: str, data) -> float:
        c = self.derived if which == "derived" else self.alternative
        return float(c) * self.monomial(*data) if c else 0.0


F_ = Fraction
STAGE1_TERMS = (
    Term("ÿ/t", F_(1), F_(1), lambda t, y, y1, y2: y2 / t),
    Term("ẏÿ/y", F_(-4), F_(-4), lambda t, y, y1, y2: y1 * y2 / y),
    Term("ẏ/t²", F_(-12, 5), F_(-12, 5), lambda t, y, y1, y2: y1 / t**2),
    Term("ẏ²/y", F_(0), F_(21, 20), lambda t, y, y1, y2: y1**2 / y),
    Term("ẏ²/(yt)", F_(21, 10), F_(0), lambda t, y, y1, y2: y1**2 / (y * t)),
    Term("ẏ³/y²", F_(-1), F_(-7), lambda t, y, y1, y2: y1**3 / y**2),
    Term("y/t³", F_(9, 10), F_(9, 10), lambda t, y, y1, y2: y / t**3),
)
STAGE2_TERMS = (
    Term("ż/t", F_(1), F_(1), lambda t, z, z1: z1 / t),
    Term("zż", F_(-7), F_(-7), lambda t, z, z1: z * z1),
    Term("z", F_(0), F_(-12, 5), lambda t, z, z1: z),
    Term("z/t²", F_(-12, 5), F_(0), lambda t, z, z1: z / t**2),
    Term("z²/t", F_(31, 10), F_(41, 20), lambda t, z, z1: z**2 / t),
    Term("z³", F_(-6), F_(-16), lambda t, z, z1: z**3),
    Term("1/t³", F_(9, 10), F_(9, 10), lambda t, z, z1: 1.0 / t**3),
)
# v dv/du = sum of terms; dividing by v gives the first-order form.
STAGE3_TERMS = (
    Term("v", F_(4), F_(5), lambda u, v: v),
    Term("uv", F_(-7), F_(-7), lambda u, v: u * v),
    Term("u³", F_(-6), F_(-16), lambda u, v: u**3),
    Term("u²", F_(101, 10), F_(181, 20), lambda u, v: u**2),
    Term("u", F_(-27, 5), F_(-27, 5), lambda u, v: u),
    Term("1", F_(9, 10), F_(9, 10), lambda u, v: 1.0),
)
STAGE_TERMS = {1: STAGE1_TERMS, 2: STAGE2_TERMS, 3: STAGE3_TERMS}
STAGE_LHS = {1: "y⃛", 2: "z̈", 3: "v dv/du"}


def stage_residual(stage: int, lhs: float, data, which: str = "derived") -> tuple[float, float]:
    vals = [term.value(which, data) for term in STAGE_TERMS[stage]]
    return lhs - sum(vals), abs(lhs) + sum(abs(v) for v in vals)


def coefficient_table() -> list[tuple[int, str, Fraction, Fraction]]:
    return [(s, t.name, t.derived, t.alternative) for s in (1, 2, 3) for t in STAGE_TERMS[s]]


def stage3_equilibria() -> tuple[Fraction, ...]:
    """Roots u of the v = 0 slice: (3u - 1)(4u - 3)(5u - 3) = 0."""
    return (F_(1, 3), F_(3, 5), F_(3, 4))


# Trajectories ----------------------------------------------------------------


def _normalized(r: tuple[float, float]) -> float:
    value, scale = r
    if scale == 0:
        return 0.0 if value == 0 else float("inf")
    return abs(value) / scale


@dataclass(frozen=True)
class ReductionState:
    stage: int
    x: np.ndarray
    columns: dict
    derived: np.ndarray
    alternative: np.ndarray
    equilibrium: tuple[float, float] | None = None

    @property
    def max_derived(self) -> float:
        return float(np.max(self.derived))

    @property
    def max_alternative(self) -> float:
        return float(np.max(self.alternative))

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]


def _jet_source(f) -> Callable[[float], Jet]:
    if isinstance(f, str):
        f = parse_expr(f)
    if isinstance(f, Node):
        node = f
        return lambda x: eval_jet(node, x)
    if isinstance(f, RigiditySolution):
        return f.jet
    if callable(f):
        return f
    raise TypeError(f"cannot take jets of {f!r}")


def _build(stage: int, x, cols: dict, lhs_key: str, keys) -> ReductionState:
    der = np.array([_normalized(stage_residual(stage, l, d)) for l, d in
                    zip(cols[lhs_key], zip(*(cols[k] for k in keys)))])
    pri = np.array([_normalized(stage_residual(stage, l, d, "alternative")) for l, d in
                    zip(cols[lhs_key], zip(*(cols[k] for k in keys)))])
    return ReductionState(stage, np.asarray(x), cols, der, pri)


def reduce_stage1(f, interval, samples: int = 33, rigidity_tol: float = 1e-10,
                  nodes=None) -> ReductionState:
    """Trajectory (t, y, ẏ, ÿ, y⃛) with t = f, y = f', dots meaning d/dt."""
    source = _jet_source(f)
    a, b = interval
    if nodes is None:
        k = np.arange(samples)
        xs = np.sort(0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * samples)))
    else:
        xs = np.asarray(nodes, dtype=float)
    rows = []
    for x in xs:
        fj = source(float(x))
        if fj[1] == 0:
            raise DomainError("f' vanishes; t = f is not a valid coordinate", float(x))
        r = _normalized(rigidity_residual(fj))
        if r > rigidity_tol:
            raise DomainError(f"f does not solve the fourth-order equation "
                              f"(normalized residual {r:.3g})", float(x))
        tdot = fj.deriv()
        y = tdot
        y1 = y.deriv() / tdot
        y2 = y1.deriv() / tdot
        y3 = y2.deriv() / tdot
        rows.append((fj.value, y.value, y1.value, y2.value, y3.value))
    t, y, y1, y2, y3 = (np.array(c) for c in zip(*rows))
    if len(t) > 1 and not (np.all(np.diff(t) > 0) or np.all(np.diff(t) < 0)):
        raise DomainError("t = f is not monotone on the interval")
    cols = {"t": t, "y": y, "ydot": y1, "yddot": y2, "ydddot": y3}
    return _build(1, xs, cols, "ydddot", ("t", "y", "ydot", "yddot"))


def reduce_stage2(state: ReductionState) -> ReductionState:
    if state.stage != 1:
        raise ValueError("stage 2 consumes a stage-1 state")
    t, y, y1, y2, y3 = (state.columns[k] for k in ("t", "y", "ydot", "yddot", "ydddot"))
    if np.any(y == 0) or np.any(np.diff(np.sign(y)) != 0):
        raise DomainError("y = f' crosses zero")
    z = y1 / y
    z1 = y2 / y - y1**2 / y**2
    z2 = y3 / y - 3 * y1 * y2 / y**2 + 2 * y1**3 / y**3
    cols = {"t": t, "z": z, "zdot": z1, "zddot": z2}
    return _build(2, state.x, cols, "zddot", ("t", "z", "zdot"))


def reduce_stage3(state: ReductionState, eq_tol: float = 1e-9) -> ReductionState:
    if state.stage != 2:
        raise ValueError("stage 3 consumes a stage-2 state")
    t, z, z1, z2 = (state.columns[k] for k in ("t", "z", "zdot", "zddot"))
    u = t * z
    v = t * z + t**2 * z1
    # d/d(ln t) of u is v and of v is t (z + 3t z' + t^2 z'')
    w = t * (z + 3 * t * z1 + t**2 * z2)
    scale = np.abs(u) + np.abs(t**2 * z1) + 1e-300
    still = np.abs(v) <= eq_tol * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        dvdu = np.where(still, np.nan, w / v)
    cols = {"u": u, "v": v, "v_dvdu": w, "dvdu": dvdu}
    st = _build(3, state.x, cols, "v_dvdu", ("u", "v"))
    eq = None
    if np.all(still):
        eq = (float(np.mean(u)), float(np.mean(v)))
    return ReductionState(3, st.x, cols, st.derived, st.alternative, eq)


def reduce_all(f, interval, samples: int = 33) -> tuple[ReductionState, ReductionState, ReductionState]:
    s1 = reduce_stage1(f, interval, samples)
    s2 = reduce_stage2(s1)
    return s1, s2, reduce_stage3(s2)


def slope_at(initial, x0: float = 0.0, span: float = 0.5) -> tuple[float, float, float]:
    """(u, v, dv/du) at x0 for the solution through the given initial state."""
    sol = solve_rigidity(initial, (x0, x0 + span), x0)
    s3 = reduce_stage3(reduce_stage2(reduce_stage1(sol.jet, sol.interval, nodes=[x0])))
    return float(s3.columns["u"][0]), float(s3.columns["v"][0]), float(s3.columns["dvdu"][0])
