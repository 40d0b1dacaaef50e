"""Power-law beams of the A3,3+A1 class and the Schwarzian route from f to g."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import jet as J
from .beam import BeamProfile
from .expr import Add, Call, Div, Mul, Node, Pow, X, num
from .jet import DomainError, Jet


def exponent_polynomial(m) -> Fraction:
    m = Fraction(m)
    return m * (4 * m**3 - 32 * m**2 + 79 * m - 60)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def exponent_roots() -> frozenset[Fraction]:
    """Rational roots of m(4m^3 - 32m^2 + 79m - 60), by the rational root theorem."""
    roots = {Fraction(0)}
    for p in _divisors(60):
        for q in _divisors(4):
            for r in (Fraction(p, q), Fraction(-p, q)):
                if exponent_polynomial(r) == 0:
                    roots.add(r)
    return frozenset(roots)


EXPONENTS = exponent_roots()


@dataclass(frozen=True)
class GottliebParams:
    """f = K (Ax+B)^m with g a Moebius function of (Ax+B) or of sqrt(Ax+B)."""

    exponent: Fraction
    K: float
    A: float
    B: float
    L: float
    M: float
    P: float
    Q: float
    interval: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        a, b = (float(v) for v in self.interval)
        object.__setattr__(self, "interval", (a, b))
        if self.exponent not in EXPONENTS:
            raise ValueError(f"exponent {self.exponent} is not one of "
                             f"{sorted(str(r) for r in EXPONENTS)}")
        if not self.K > 0:
            raise ValueError("K must be positive")
        if self.A == 0:
            raise ValueError("A must be nonzero")
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        if min(self.A * a + self.B, self.A * b + self.B) <= 0:
            raise ValueError("Ax+B must be positive on the interval")
        if self.L * self.Q - self.M * self.P == 0:
            raise ValueError("Moebius constants must satisfy LQ - MP != 0")
        root = self.denominator_root()
        if root is not None and a <= root <= b:
            raise ValueError(f"g has a pole at x={root!r} inside the interval")

    @property
    def half_branch(self) -> bool:
        return self.exponent in (Fraction(3, 2), Fraction(5, 2))

    def denominator_root(self) -> float | None:
        """x where P + Q s (or P + Q sqrt(s)) vanishes, s = Ax+B."""
        if self.Q == 0:
            return None
        s = -self.P / self.Q
        if self.half_branch:
            if s < 0:
                return None
            s = s * s
        return (s - self.B) / self.A


def _affine(A: float, B: float) -> Node:
    ax = X if A == 1 else Mul(num(A), X)
    return ax if B == 0 else Add(ax, num(B))


def _linear(c0: float, c1: float, r: Node) -> Node:
    """c0 + c1 r, dropping zero and unit coefficients."""
    if c1 == 0:
        return num(c0)
    t = r if c1 == 1 else Mul(num(c1), r)
    return t if c0 == 0 else Add(num(c0), t)


def g_expression(p: GottliebParams) -> Node:
    s = _affine(p.A, p.B)
    r = Call("sqrt", s) if p.half_branch else s
    if p.Q == 0:
        return _linear(p.L / p.P, p.M / p.P, r)
    return Div(_linear(p.L, p.M, r), _linear(p.P, p.Q, r))


def _power(base: Node, e: Fraction) -> Node | None:
    if e == 0:
        return None
    if e == 1:
        return base
    r = num(e.numerator) if e.denominator == 1 else Div(num(e.numerator), num(e.denominator))
    return Pow(base, r)


def f_expression(p: GottliebParams) -> Node:
    sm = _power(_affine(p.A, p.B), p.exponent)
    if sm is None:
        return num(p.K)
    return sm if p.K == 1 else Mul(num(p.K), sm)


def m_expression(p: GottliebParams) -> Node:
    """m = g'^4 f, in closed form."""
    s = _affine(p.A, p.B)
    c = p.K * p.A**4 * (p.M * p.P - p.L * p.Q) ** 4
    e = p.exponent
    r = s
    if p.half_branch:
        e -= 2
        r = Call("sqrt", s)
        c /= 16.0
    sm = _power(s, e)
    if p.Q == 0:
        c /= p.P**8
        if sm is None:
            return num(c)
        return sm if c == 1 else Mul(num(c), sm)
    den = Pow(_linear(p.P, p.Q, r), num(8))
    return Div(num(c) if sm is None else Mul(num(c), sm), den)


def make_gottlieb(p: GottliebParams, name: str | None = None) -> BeamProfile:
    name = name or f"gottlieb m={p.exponent}"
    return BeamProfile(name, f_expression(p), m_expression(p), p.interval)


# Schwarzian ------------------------------------------------------------------


def schwarzian(gj: Jet) -> float:
    g1, g2, g3 = gj[1], gj[2], gj[3]
    if g1 == 0:
        raise DomainError("Schwarzian undefined where g' = 0")
    return g3 / g1 - 1.5 * (g2 / g1) ** 2


def schwarzian_target(fj: Jet) -> float:
    """3f'^2/(10f^2) - 2f''/(5f); the Schwarzian of g for every A3,3+A1 beam."""
    f0, f1, f2 = fj[0], fj[1], fj[2]
    return 0.3 * f1**2 / f0**2 - 0.4 * f2 / f0


def potential_jet(fj: Jet) -> Jet:
    """q = (3f'^2/f^2 - 4f''/f)/20, so that y'' + q y = 0 linearizes {g, x} = 2q."""
    f1 = fj.deriv()
    f2 = f1.deriv()
    return (3.0 * (f1 / fj) * (f1 / fj) - 4.0 * f2 / fj) / 20.0


def _y_jet(qj: Jet, y0: float, y1: float) -> Jet:
    # y'' = -q y, one Taylor coefficient at a time
    qc = qj.coefficients
    c = np.full(J.ORDER + 1, np.nan)
    c[0], c[1] = y0, y1
    for k in range(J.ORDER - 1):
        c[k + 2] = -np.dot(qc[: k + 1], c[k::-1]) / ((k + 2) * (k + 1))
    return Jet(c)


@dataclass(frozen=True)
class NormalFormODE:
    """Two solutions of y'' + q y = 0, scaled to unit Wronskian y1 y2' - y2 y1'."""

    profile: BeamProfile
    interval: tuple[float, float]
    solution: object  # scipy OdeSolution for the raw (y1, y1', y2, y2')
    scale: np.ndarray
    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    wronskian: np.ndarray

    def state(self, x) -> np.ndarray:
        """(y1, y1', y2, y2') at x."""
        raw = self.solution(x)
        return raw * (self.scale if raw.ndim == 1 else self.scale[:, None])

    def q(self, x0: float) -> float:
        return potential_jet(self.profile.f_jet(x0)).value

    def y_jets(self, x0: float) -> tuple[Jet, Jet]:
        st = self.state(x0)
        qj = potential_jet(self.profile.f_jet(x0))
        return _y_jet(qj, st[0], st[1]), _y_jet(qj, st[2], st[3])

    @property
    def wronskian_drift(self) -> float:
        w = self.wronskian
        return float(np.max(np.abs(w - w[0])) / abs(w[0]))


def solve_normal_ode(profile: BeamProfile, interval=None, init=((1.0, 0.0), (0.0, 1.0)),
                     samples: int = 65, rtol: float = 1e-12) -> NormalFormODE:
    a, b = interval if interval is not None else profile.domain
    (p0, p1), (r0, r1) = init
    w0 = p0 * r1 - r0 * p1
    if w0 == 0:
        raise ValueError("initial conditions are linearly dependent")

    def rhs(x, y):
        q = potential_jet(profile.f_jet(x)).value
        return [y[1], -q * y[0], y[3], -q * y[2]]

    sol = solve_ivp(rhs, (a, b), [p0, p1, r0, r1], method="DOP853", rtol=rtol,
                    atol=rtol * 1e-2, dense_output=True)
    if sol.status != 0:
        raise DomainError(f"normal-form integration failed: {sol.message}")
    s = 1.0 / math.sqrt(abs(w0))
    t = s if w0 > 0 else -s
    scale = np.array([s, s, t, t])
    xs = np.linspace(a, b, samples)
    ys = sol.sol(xs) * scale[:, None]
    w = ys[0] * ys[3] - ys[2] * ys[1]
    return NormalFormODE(profile, (a, b), sol.sol, scale, xs, ys[0], ys[2], w)


@dataclass(frozen=True)
class GSamples:
    x: np.ndarray
    g: np.ndarray
    valid_interval: tuple[float, float]
    ode: NormalFormODE

    def jet(self, x0: float) -> Jet:
        y1, y2 = self.ode.y_jets(x0)
        return y2 / y1

    def schwarzian(self, x0: float) -> float:
        return schwarzian(self.jet(x0))


def g_from_solutions(ode: NormalFormODE) -> GSamples:
    """g = y2 / y1, up to the first zero of y1."""
    a, b = ode.interval
    sign = np.sign(ode.y1)
    bad = np.flatnonzero(sign != sign[0])
    hi = b
    if bad.size:
        i = bad[0]
        hi = brentq(lambda x: ode.state(x)[0], ode.x[i - 1], ode.x[i], xtol=1e-14)
    keep = ode.x < hi if bad.size else np.ones_like(ode.x, dtype=bool)
    return GSamples(ode.x[keep], ode.y2[keep] / ode.y1[keep], (a, hi), ode)
