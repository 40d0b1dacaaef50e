"""Point transformations onto the canonical beam of each symmetry class."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jet as J
from .beam import BeamProfile, Residual, pde_residual
from .jet import DomainError, Jet
from .symmetry import (GeneratorField, SymmetryClass, SymmetryGenerator, SymmetryLabel,
                       XData, seeded)

CANONICAL_FORMS = {
    SymmetryLabel.A33_A1: "U_XXXX + U_TT = 0",
    SymmetryLabel.A1_A2: "(X U_XX)_XX + X U_TT = 0",
    SymmetryLabel.ABELIAN3: "U_XXXX + X^-4 U_TT = 0",
}
_CANONICAL_FM = {
    SymmetryLabel.A33_A1: ("1", "1"),
    SymmetryLabel.A1_A2: ("x", "x"),
    SymmetryLabel.ABELIAN3: ("1", "x^(-4)"),
}
DEFAULT_CONSTANTS = {
    SymmetryLabel.A33_A1: (0.0, 0.0, 1.0),
    SymmetryLabel.A1_A2: (0.0, 0.5, 1.0),
    SymmetryLabel.ABELIAN3: (0.0, 1.0, 1.0),
}


class UnsupportedClassError(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalEquation:
    label: SymmetryLabel

    def __post_init__(self):
        if self.label not in CANONICAL_FORMS:
            raise UnsupportedClassError(f"no canonical form for class {self.label}")

    @property
    def form(self) -> str:
        return CANONICAL_FORMS[self.label]

    def profile(self, domain) -> BeamProfile:
        f, m = _CANONICAL_FM[self.label]
        return BeamProfile.from_strings(f"canonical {self.label}", f, m, domain)


@dataclass(frozen=True)
class PointTransform:
    label: SymmetryLabel
    constants: tuple[float, float, float]
    profile: BeamProfile
    g_shift: float = 0.0
    domain: tuple[float, float] | None = None

    @property
    def valid_domain(self) -> tuple[float, float]:
        return self.domain if self.domain is not None else self.profile.domain

    @property
    def canonical(self) -> CanonicalEquation:
        return CanonicalEquation(self.label)

    def components(self, t, xd: XData, u):
        """(T, X, U) in terms of t, u and the x-data; works on floats and jets."""
        c1, c2, c3 = self.constants
        base = xd.f * xd.g1 * xd.g1 * xd.g1
        G = xd.g
        if self.label is SymmetryLabel.A33_A1:
            return t + c1, G + c2, c3 * u * J.sqrt(base)
        if self.label is SymmetryLabel.A1_A2:
            # |g| keeps the weight real when g < 0; the PDE is linear, so a
            # constant factor of i is immaterial.
            sg = 1.0 if G.value > 0 else -1.0
            return t + c1 * G * G, 2.0 * c2 * G, c3 * u * J.sqrt(base / (sg * G))
        return t + c1, c2 * J.exp(G), c3 * u * J.sqrt(base * J.exp(3.0 * G))

    def xdata(self, x0: float) -> XData:
        if not self.valid_domain[0] <= x0 <= self.valid_domain[1]:
            raise DomainError(f"x={x0!r} lies outside the valid domain {self.valid_domain}", x0)
        xd = XData.from_jets(self.profile.f_jet(x0), self.profile.g.jet(x0) + self.g_shift)
        if self.label is SymmetryLabel.A1_A2 and xd.g.value == 0.0:
            raise DomainError(f"class-II weight is singular where g = 0 (x={x0!r})", x0)
        return xd

    def weight(self, x0: float) -> Jet:
        """x-jet of U/u."""
        xd = self.xdata(x0)
        return self.components(Jet.constant(0.0), xd, Jet.constant(1.0))[2]

    def x_jets(self, t: float, x0: float) -> tuple[Jet, Jet, Jet]:
        """x-jets of T(t, .), X(.) and the weight at x0."""
        xd = self.xdata(x0)
        return self.components(Jet.constant(t), xd, Jet.constant(1.0))

    def inverse(self, T: float, X: float, U: float) -> tuple[float, float, float]:
        c1, c2, c3 = self.constants
        if self.label is SymmetryLabel.A33_A1:
            G = X - c2
        elif self.label is SymmetryLabel.A1_A2:
            G = X / (2.0 * c2)
        else:
            if X / c2 <= 0:
                raise DomainError(f"X={X!r} has no preimage")
            G = math.log(X / c2)
        x = self.profile.g.inverse(G - self.g_shift)
        Tj, _, w = self.x_jets(0.0, x)
        return T - Tj.value, x, U / w.value


def _shrink_domain(profile: BeamProfile, shift: float) -> tuple[float, float]:
    a, b = profile.domain
    ga, gb = shift, profile.g.total + shift
    if ga > 0 or gb < 0:
        # g keeps one sign; only the endpoint where it vanishes is excluded
        return (a, b)
    root = profile.g.inverse(-shift)
    if gb <= 0 and ga < 0:
        return (a, b) if root >= b else (a, root)
    return (root, b) if root - a <= b - root else (a, root)


def build_transform(profile: BeamProfile, cls: SymmetryClass | SymmetryLabel,
                    constants=None) -> PointTransform:
    label = cls.label if isinstance(cls, SymmetryClass) else SymmetryLabel(cls)
    shift = cls.g_shift if isinstance(cls, SymmetryClass) else 0.0
    if label not in DEFAULT_CONSTANTS:
        raise UnsupportedClassError(f"class {label} has no point transformation to a canonical form")
    c = tuple(float(v) for v in (constants if constants is not None else DEFAULT_CONSTANTS[label]))
    if len(c) != 3:
        raise ValueError("three transformation constants are required")
    if label is SymmetryLabel.A33_A1:
        if c[2] == 0:
            raise ValueError("k3 must be nonzero")
    elif c[1] == 0 or c[2] == 0:
        raise ValueError("the second and third constants must be nonzero")
    domain = _shrink_domain(profile, shift) if label is SymmetryLabel.A1_A2 else None
    return PointTransform(label, c, profile, shift, domain)


def push_point(tr: PointTransform, t: float, x: float, u: float) -> tuple[float, float, float]:
    T, X, w = tr.x_jets(t, x)
    return T.value, X.value, u * w.value


# Canonical separable solutions ---------------------------------------------


class CanonicalMode:
    """U(T, X) = cos(omega T) phi(X)."""

    omega: float

    def spatial(self, Xj: Jet) -> Jet:
        raise NotImplementedError

    def temporal(self, Tj: Jet) -> Jet:
        return J.cos(self.omega * Tj)

    def __call__(self, T: float, X: float) -> float:
        return math.cos(self.omega * T) * self.spatial(Jet.constant(X)).value


@dataclass(frozen=True)
class UniformMode(CanonicalMode):
    """cos(beta^2 T) sin(beta X) solves U_XXXX + U_TT = 0."""

    beta: float

    @property
    def omega(self) -> float:
        return self.beta**2

    def spatial(self, Xj: Jet) -> Jet:
        return J.sin(self.beta * Xj)


@dataclass(frozen=True)
class LinearBeamMode(CanonicalMode):
    """Entire solution of (X phi'')'' = omega^2 X phi.

    The indicial roots at X = 0 are 0, 1, 1, 2, so the regular solutions are
    power series with a3 = 0 and a_{j+4} = lambda a_j / ((j+4)(j+3)^2(j+2)).
    """

    omega: float
    a0: float = 1.0
    a1: float = 0.0
    a2: float = 0.0
    max_terms: int = 4000

    def coefficients(self, radius: float) -> np.ndarray:
        lam = self.omega**2
        a = [self.a0, self.a1, self.a2, 0.0]
        scale = max(abs(self.a0), abs(self.a1), abs(self.a2))
        j = 0
        while len(a) < self.max_terms:
            a.append(lam * a[j] / ((j + 4) * (j + 3) ** 2 * (j + 2)))
            j += 1
            if j > 8 and all(abs(a[-k]) * max(radius, 1.0) ** (len(a) - k) < 1e-18 * scale
                             for k in (1, 2, 3, 4)):
                break
        return np.array(a)

    def spatial(self, Xj: Jet) -> Jet:
        X0 = Xj.value
        a = self.coefficients(abs(X0) + 1.0)
        poly = np.polynomial.Polynomial(a)
        d = [poly.deriv(k)(X0) if k else poly(X0) for k in range(J.ORDER + 1)]
        return J.compose(Jet.from_derivatives(d[0], d[1:]), Xj)


@dataclass(frozen=True)
class EulerMode(CanonicalMode):
    """cos(omega T) X^p solves U_XXXX + X^-4 U_TT = 0 when p(p-1)(p-2)(p-3) = omega^2."""

    omega: float

    @property
    def exponent(self) -> float:
        return 1.5 + math.sqrt(1.25 + math.sqrt(1.0 + self.omega**2))

    def spatial(self, Xj: Jet) -> Jet:
        return J.power(Xj, self.exponent)


# Pullback and pushforward --------------------------------------------------


@dataclass(frozen=True)
class PulledBackField:
    """u(t, x) = U(T(t, x), X(x)) / weight(x); satisfies the Field protocol."""

    transform: PointTransform
    mode: CanonicalMode

    def __call__(self, t: float, x0: float) -> tuple[Jet, float]:
        Tj, Xj, w = self.transform.x_jets(t, x0)
        uj = self.mode.temporal(Tj) * self.mode.spatial(Xj) / w
        # T = t + h(x), so d/dt acts on cos(omega T) alone
        return uj, -self.mode.omega**2 * uj.value


def pullback_solution(tr: PointTransform, canonical: CanonicalMode, t: float,
                      x0: float) -> tuple[float, Residual]:
    field = PulledBackField(tr, canonical)
    uj, _ = field(t, x0)
    return uj.value, pde_residual(tr.profile, field, t, x0)


def pushforward_generator(tr: PointTransform, gen: SymmetryGenerator, t: float, x: float,
                          u: float) -> np.ndarray:
    """(Gamma(T), Gamma(X), Gamma(U)) at the image of (t, x, u)."""
    tr.xdata(x)
    _, jac = seeded(tr.components, tr.profile, t, x, u, tr.g_shift)
    a = GeneratorField(gen, tr.profile, tr.g_shift)(t, x, u)
    return jac @ a
