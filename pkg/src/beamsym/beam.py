"""Beam profiles (f, m) on an interval and the auxiliary function g.

``g`` is the antiderivative of ``(m/f)^(1/4)`` normalized by ``g(a) = 0``,
so that ``m = g'^4 f``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Protocol

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import jet as J
from .expr import Node, eval_jet, evaluate, parse_expr, unparse, ParseError
from .jet import DomainError, Jet

PROBE_NODES = 257


class BeamSpecError(ValueError):
    pass


class PositivityError(DomainError):
    """f or m is not strictly positive at some probe nodes."""

    def __init__(self, which: str, nodes: np.ndarray, values: np.ndarray):
        self.which = which
        self.nodes = np.asarray(nodes)
        self.values = np.asarray(values)
        head = ", ".join(f"{which}({x:.6g}) = {v:.6g}" for x, v in zip(nodes[:3], values[:3]))
        more = f" and {len(nodes) - 3} more" if len(nodes) > 3 else ""
        super().__init__(f"{which} must be positive: {head}{more}")


# Quadrature ----------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _gl(fn, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * np.dot(_GL_W, fn(mid + half * _GL_X))


def adaptive_gauss_legendre(fn: Callable, a: float, b: float, tol: float = 1e-13, depth: int = 0) -> float:
    """Integrate a vectorized ``fn`` over [a, b] by bisection on 12-point rules."""
    if a == b:
        return 0.0
    whole = _gl(fn, a, b)
    mid = 0.5 * (a + b)
    left, right = _gl(fn, a, mid), _gl(fn, mid, b)
    if abs(left + right - whole) <= tol * max(abs(left) + abs(right), 1e-300) or depth >= 40:
        return left + right
    return adaptive_gauss_legendre(fn, a, mid, tol, depth + 1) + adaptive_gauss_legendre(
        fn, mid, b, tol, depth + 1
    )


# Profile -------------------------------------------------------------------


@dataclass(frozen=True)
class BeamProfile:
    name: str
    f: Node
    m: Node
    domain: tuple[float, float]

    def __post_init__(self):
        a, b = (float(v) for v in self.domain)
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise BeamSpecError(f"domain must be an interval [a, b] with a < b, got {self.domain!r}")
        object.__setattr__(self, "domain", (a, b))
        probe = np.linspace(a, b, PROBE_NODES)
        for which in ("f", "m"):
            vals = evaluate(getattr(self, which), probe)
            bad = ~(np.isfinite(vals) & (vals > 0))
            if bad.any():
                raise PositivityError(which, probe[bad], vals[bad])

    @classmethod
    def from_strings(cls, name: str, f: str, m: str, domain) -> "BeamProfile":
        return cls(name, parse_expr(f), parse_expr(m), tuple(domain))

    @property
    def a(self) -> float:
        return self.domain[0]

    @property
    def b(self) -> float:
        return self.domain[1]

    def f_jet(self, x0: float) -> Jet:
        return eval_jet(self.f, x0)

    def m_jet(self, x0: float) -> Jet:
        return eval_jet(self.m, x0)

    def gprime_jet(self, x0: float) -> Jet:
        try:
            return J.power(self.m_jet(x0) / self.f_jet(x0), 0.25)
        except DomainError as exc:
            raise exc.at(x0) from None

    def gprime(self, x):
        with np.errstate(all="ignore"):
            return (evaluate(self.m, x) / evaluate(self.f, x)) ** 0.25

    @cached_property
    def g(self) -> "GFunction":
        return GFunction(self)


def chebyshev_lobatto(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * k / (n - 1))


class GFunction:
    """Monotone antiderivative of ``(m/f)^(1/4)`` with ``g(a) = 0``.

    Values are tabulated at Chebyshev-Lobatto nodes; lookups add one
    adaptive quadrature from the nearest node.  The inverse starts from a
    monotone cubic interpolant of the table and is polished by Newton steps.
    """

    def __init__(self, profile: BeamProfile, nodes: int = 65, tol: float = 1e-13):
        self.profile = profile
        self.tol = tol
        a, b = profile.domain
        self.nodes = chebyshev_lobatto(a, b, nodes)
        pieces = [
            adaptive_gauss_legendre(profile.gprime, lo, hi, tol)
            for lo, hi in zip(self.nodes[:-1], self.nodes[1:])
        ]
        self.table = np.concatenate([[0.0], np.cumsum(pieces)])
        self._inverse_guess = PchipInterpolator(self.table, self.nodes)

    @property
    def total(self) -> float:
        """g(b) - g(a)."""
        return float(self.table[-1])

    def __call__(self, x0: float) -> float:
        x0 = float(x0)
        k = int(np.clip(np.searchsorted(self.nodes, x0), 0, len(self.nodes) - 1))
        if k > 0 and abs(self.nodes[k - 1] - x0) < abs(self.nodes[k] - x0):
            k -= 1
        node = self.nodes[k]
        if node == x0:
            return float(self.table[k])
        lo, hi = sorted((node, x0))
        piece = adaptive_gauss_legendre(self.profile.gprime, lo, hi, self.tol)
        return float(self.table[k] + (piece if x0 > node else -piece))

    def jet(self, x0: float) -> Jet:
        gp = self.profile.gprime_jet(x0)
        c = np.empty(J.ORDER + 1)
        c[0] = self(x0)
        k = np.arange(1, J.ORDER + 1)
        c[1:] = gp.coefficients[:-1] / k
        return Jet(c)

    def inverse(self, G: float, rtol: float = 1e-15) -> float:
        a, b = self.profile.domain
        G = float(G)
        x = float(self._inverse_guess(np.clip(G, 0.0, self.total)))
        lo, hi = a, b
        for _ in range(60):
            r = self(x) - G
            if r > 0:
                hi = min(hi, x)
            elif r < 0:
                lo = max(lo, x)
            step = r / float(self.profile.gprime(x))
            x_new = x - step
            if not lo <= x_new <= hi:
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= rtol * max(abs(x), b - a):
                return x_new
            x = x_new
        return x


def g_jet(profile: BeamProfile, x0: float) -> Jet:
    a, b = profile.domain
    slack = 1e-12 * (b - a)
    if not a - slack <= x0 <= b + slack:
        raise DomainError(f"point outside the beam domain [{a}, {b}]", x0)
    return profile.g.jet(x0)


# Beam-spec documents -------------------------------------------------------

_REQUIRED = ("name", "f", "m", "domain")


def load_beam_spec(doc: str) -> BeamProfile:
    try:
        data = json.loads(doc)
    except json.JSONDecodeError as exc:
        raise BeamSpecError(f"malformed beam spec: {exc}") from None
    if not isinstance(data, dict):
        raise BeamSpecError("beam spec must be a JSON object")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise BeamSpecError(f"beam spec is missing field(s): {', '.join(missing)}")
    extra = sorted(set(data) - set(_REQUIRED))
    if extra:
        raise BeamSpecError(f"unknown beam spec field(s): {', '.join(extra)}")
    name, f, m, domain = (data[k] for k in _REQUIRED)
    if not isinstance(name, str):
        raise BeamSpecError("'name' must be a string")
    for key, val in (("f", f), ("m", m)):
        if not isinstance(val, str):
            raise BeamSpecError(f"'{key}' must be an expression string")
    if (
        not isinstance(domain, list)
        or len(domain) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in domain)
    ):
        raise BeamSpecError("'domain' must be a list of two numbers")
    try:
        f_ast, m_ast = parse_expr(f), parse_expr(m)
    except ParseError as exc:
        raise BeamSpecError(f"bad expression: {exc}") from None
    return BeamProfile(name, f_ast, m_ast, (float(domain[0]), float(domain[1])))


def dump_beam_spec(profile: BeamProfile) -> str:
    data = {
        "name": profile.name,
        "f": unparse(profile.f),
        "m": unparse(profile.m),
        "domain": [profile.a, profile.b],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def read_beam_file(path) -> BeamProfile:
    with open(path, encoding="utf-8") as fh:
        return load_beam_spec(fh.read())


# PDE residual --------------------------------------------------------------


class Field(Protocol):
    def __call__(self, t: float, x0: float) -> tuple[Jet, float]:
        """x-jet of u(t, .) at x0 and u_tt(t, x0)."""


@dataclass(frozen=True)
class Residual:
    value: float
    scale: float

    @property
    def normalized(self) -> float:
        if self.scale == 0.0:
            return 0.0 if self.value == 0.0 else float("inf")
        return abs(self.value) / self.scale


def pde_residual(profile: BeamProfile, u: Field, t: float, x0: float) -> Residual:
    """``(f u_xx)_xx + m u_tt`` at (t, x0), with the sum of term magnitudes as scale.

    On nodal lines of u every term vanishes and that sum is pure roundoff, so
    the scale is floored by the coefficient size times the largest x-derivative.
    """
    uj, utt = u(t, x0)
    fj = profile.f_jet(x0)
    m0 = profile.m_jet(x0).value
    d = uj.derivatives
    f0, f1, f2 = fj[0], fj[1], fj[2]
    terms = (f2 * d[2], 2.0 * f1 * d[3], f0 * d[4], m0 * utt)
    floor = (abs(f0) + 2.0 * abs(f1) + abs(f2) + abs(m0)) * float(np.max(np.abs(d[:5])))
    return Residual(float(sum(terms)), max(float(sum(abs(v) for v in terms)), floor))
