"""Point-symmetry classification of beam equations (f u_xx)_xx + g'^4 f u_tt = 0.

The finite part of the symmetry algebra is governed by two linear
conditions on the constants (c1, c3)::

    c1 H11 + c3 H12 = 0,    c1 H21 + c3 H22 = 0

where the H's are differential functions of f and g.  Depending on which
(c1, c3) survive, the quotient algebra is A3,3+A1 (both), A1+A2 (c1 only),
3A1 (c3 only) or 2A1 (neither).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .beam import BeamProfile
from .jet import DomainError, Jet

# Term tables ---------------------------------------------------------------
#
# One monomial per line: rational coefficient, then factors, with everything
# after "/" in the denominator.  fk / gk stand for the k-th derivative.

_H11 = """
+6 f1^2 / f0
-6 g0 f1^3 / f0^2 g1
-8 f2
+10 g0 f1 f2 / f0 g1
-6 g0 f1^2 g2 / f0 g1^2
+8 g0 f2 g2 / g1^2
+30 f0 g2^2 / g1^2
-60 f0 g0 g2^3 / g1^4
-4 g0 f3 / g1
-20 f0 g3 / g1
+60 f0 g0 g2 g3 / g1^3
-10 f0 g0 g4 / g1^2
"""

_H12 = """
-6 f1^3 / f0^2 g1
+10 f1 f2 / f0 g1
-6 f1^2 g2 / f0 g1^2
+8 f2 g2 / g1^2
-60 f0 g2^3 / g1^4
-4 f3 / g1
+60 f0 g2 g3 / g1^3
-10 f0 g4 / g1^2
"""

_H21 = """
+12 f1^4 / f0^3
-12 g0 f1^5 / f0^4 g1
-28 f1^2 f2 / f0^2
+34 g0 f1^3 f2 / f0^3 g1
+10 f2^2 / f0
-21 g0 f1 f2^2 / f0^2 g1
-12 g0 f1^4 g2 / f0^3 g1^2
+6 f1^3 g2 / f0^2 g1
+28 g0 f1^2 f2 g2 / f0^2 g1^2
-11 f1 f2 g2 / f0 g1
-10 g0 f2^2 g2 / f0 g1^2
-12 g0 f1^3 g2^2 / f0^2 g1^3
+6 f1^2 g2^2 / f0 g1^2
+22 g0 f1 f2 g2^2 / f0 g1^3
-3 f2 g2^2 / g1^2
-12 g0 f1^2 g2^3 / f0 g1^4
-60 f1 g2^3 / g1^3
+6 g0 f2 g2^3 / g1^4
+120 g0 f1 g2^4 / g1^5
+180 f0 g2^4 / g1^4
-360 f0 g0 g2^5 / g1^6
+10 f1 f3 / f0
-12 g0 f1^2 f3 / f0^2 g1
+9 g0 f2 f3 / f0 g1
-10 g0 f1 g2 f3 / f0 g1^2
+6 g2 f3 / g1
-12 g0 g2^2 f3 / g1^3
+6 g0 f1^3 g3 / f0^2 g1^2
-4 f1^2 g3 / f0 g1
-11 g0 f1 f2 g3 / f0 g1^2
+2 f2 g3 / g1
+12 g0 f1^2 g2 g3 / f0 g1^3
+70 f1 g2 g3 / g1^2
-6 g0 f2 g2 g3 / g1^3
-180 g0 f1 g2^2 g3 / g1^4
-300 f0 g2^2 g3 / g1^3
+720 f0 g0 g2^3 g3 / g1^5
+6 g0 f3 g3 / g1^2
+30 g0 f1 g3^2 / g1^3
+60 f0 g3^2 / g1^2
-270 f0 g0 g2 g3^2 / g1^4
-4 f4
+3 g0 f1 f4 / f0 g1
+4 g0 g2 f4 / g1^2
-2 g0 f1^2 g4 / f0 g1^2
-15 f1 g4 / g1
+1 g0 f2 g4 / g1^2
+40 g0 f1 g2 g4 / g1^3
+75 f0 g2 g4 / g1^2
-180 f0 g0 g2^2 g4 / g1^4
+60 f0 g0 g3 g4 / g1^3
-1 g0 f5 / g1
-5 g0 f1 g5 / g1^2
-12 f0 g5 / g1
+30 f0 g0 g2 g5 / g1^3
-3 f0 g0 g6 / g1^2
"""

_H22 = """
-12 f1^5 / f0^4 g1
+34 f1^3 f2 / f0^3 g1
-21 f1 f2^2 / f0^2 g1
-12 f1^4 g2 / f0^3 g1^2
+28 f1^2 f2 g2 / f0^2 g1^2
-10 f2^2 g2 / f0 g1^2
-12 f1^3 g2^2 / f0^2 g1^3
+22 f1 f2 g2^2 / f0 g1^3
-12 f1^2 g2^3 / f0 g1^4
+6 f2 g2^3 / g1^4
+120 f1 g2^4 / g1^5
-360 f0 g2^5 / g1^6
-12 f1^2 f3 / f0^2 g1
+9 f2 f3 / f0 g1
-10 f1 g2 f3 / f0 g1^2
-12 g2^2 f3 / g1^3
+6 f1^3 g3 / f0^2 g1^2
-11 f1 f2 g3 / f0 g1^2
+12 f1^2 g2 g3 / f0 g1^3
-6 f2 g2 g3 / g1^3
-180 f1 g2^2 g3 / g1^4
+720 f0 g2^3 g3 / g1^5
+6 f3 g3 / g1^2
+30 f1 g3^2 / g1^3
-270 f0 g2 g3^2 / g1^4
+3 f1 f4 / f0 g1
+4 g2 f4 / g1^2
-2 f1^2 g4 / f0 g1^2
+1 f2 g4 / g1^2
+40 f1 g2 g4 / g1^3
-180 f0 g2^2 g4 / g1^4
+60 f0 g3 g4 / g1^3
-1 f5 / g1
-5 f1 g5 / g1^2
+30 f0 g2 g5 / g1^3
-3 f0 g6 / g1^2
"""

# Reduced constraints: "lhs = rhs-table".

_R1 = ("g3", """
+3/10 g1 f1^2 / f0^2
-2/5 g1 f2 / f0
+3/2 g2^2 / g1
""")

_R2 = ("f4", """
+1 f1 f3 / f0
+11/10 f2^2 / f0
-12/5 f1^2 f2 / f0^2
+9/10 f1^4 / f0^3
""")

# H11 = 0 solved for g''''.
_R3 = ("g4", """
+6 g2 g3 / g1
-6 g2^3 / g1^2
-2 g1 g3 / g0
+3 g2^2 / g0
+4/5 f2 g2 / f0
-4/5 f2 g1^2 / f0 g0
-2/5 f3 g1 / f0
-3/5 f1^2 g2 / f0^2
+3/5 f1^2 g1^2 / f0^2 g0
+1 f1 f2 g1 / f0^2
-3/5 f1^3 g1 / f0^3
""")

_R4 = ("f5", """
-18/5 f1^5 / f0^4
+18/5 f1^4 g1 / f0^3 g0
+54/5 f1^3 f2 / f0^3
-48/5 f1^2 g1 f2 / f0^2 g0
-7 f1 f2^2 / f0^2
+22/5 g1 f2^2 / f0 g0
-18/5 f1^4 g2 / f0^3 g1
+48/5 f1^2 f2 g2 / f0^2 g1
-22/5 f2^2 g2 / f0 g1
-22/5 f1^2 f3 / f0^2
+4 f1 g1 f3 / f0 g0
+16/5 f2 f3 / f0
-4 f1 g2 f3 / f0 g1
+2 f1 f4 / f0
-4 g1 f4 / g0
+4 g2 f4 / g1
""")

_R5 = ("g4", """
-3/5 f1^3 g1 / f0^3
+1 f1 g1 f2 / f0^2
-3/5 f1^2 g2 / f0^2
+4/5 f2 g2 / f0
-6 g2^3 / g1^2
-2/5 g1 f3 / f0
+6 g2 g3 / g1
""")

_R6 = ("f5", """
-18/5 f1^5 / f0^4
+54/5 f1^3 f2 / f0^3
-7 f1 f2^2 / f0^2
-18/5 f1^4 g2 / f0^3 g1
+48/5 f1^2 f2 g2 / f0^2 g1
-22/5 f2^2 g2 / f0 g1
-22/5 f1^2 f3 / f0^2
+16/5 f2 f3 / f0
-4 f1 g2 f3 / f0 g1
+2 f1 f4 / f0
+4 g2 f4 / g1
""")

# f0..f5 occupy slots 0..5, g0..g6 slots 6..12.
_NVARS = 13


def _slot(name: str) -> int:
    k = int(name[1:])
    return k if name[0] == "f" else 6 + k


@dataclass(frozen=True)
class TermTable:
    """Sum of monomials in the jet entries f0..f5, g0..g6."""

    coefficients: tuple[Fraction, ...]
    exponents: np.ndarray  # (terms, 13) integer powers

    @classmethod
    def parse(cls, text: str) -> "TermTable":
        coefs, rows = [], []
        for line in text.strip().splitlines():
            toks = line.split()
            coefs.append(Fraction(toks[0]))
            row = np.zeros(_NVARS, dtype=int)
            sign = 1
            for tok in toks[1:]:
                if tok == "/":
                    sign = -1
                    continue
                name, _, p = tok.partition("^")
                row[_slot(name)] += sign * (int(p) if p else 1)
            rows.append(row)
        return cls(tuple(coefs), np.array(rows))

    def terms(self, v: np.ndarray) -> np.ndarray:
        c = np.array([float(q) for q in self.coefficients])
        with np.errstate(divide="ignore", invalid="ignore"):
            return c * np.prod(np.power(v[None, :], self.exponents), axis=1)

    def __len__(self):
        return len(self.coefficients)


H_TABLES = {name: TermTable.parse(t) for name, t in
            (("h11", _H11), ("h12", _H12), ("h21", _H21), ("h22", _H22))}
REDUCED = {
    name: (_slot(lhs), TermTable.parse(t))
    for name, (lhs, t) in (
        ("R1", _R1), ("R2", _R2), ("R3", _R3), ("R4", _R4), ("R5", _R5), ("R6", _R6)
    )
}


def _jet_vector(fj: Jet, gj: Jet) -> np.ndarray:
    return np.concatenate([fj.derivatives[:6], gj.derivatives[:7]])


def _check(fj: Jet, gj: Jet):
    if not fj.value > 0:
        raise DomainError(f"flexural rigidity must be positive, got {fj.value!r}")
    if gj[1] == 0:
        raise DomainError("g' vanishes")


# Values ----------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintResidual:
    value: float
    scale: float

    @property
    def normalized(self) -> float:
        if self.scale == 0.0:
            return 0.0 if self.value == 0.0 else float("inf")
        return abs(self.value) / self.scale


@dataclass(frozen=True)
class HValues:
    h11: float
    h12: float
    h21: float
    h22: float
    n11: float
    n12: float
    n21: float
    n22: float

    def normalized(self) -> np.ndarray:
        h = np.array([self.h11, self.h12, self.h21, self.h22])
        n = np.array([self.n11, self.n12, self.n21, self.n22])
        out = np.zeros(4)
        nz = n > 0
        out[nz] = np.abs(h[nz]) / n[nz]
        out[~nz & (h != 0)] = np.inf
        return out


def h_functions(fj: Jet, gj: Jet) -> HValues:
    _check(fj, gj)
    v = _jet_vector(fj, gj)
    vals, norms = [], []
    for name in ("h11", "h12", "h21", "h22"):
        t = H_TABLES[name].terms(v)
        vals.append(float(np.sum(t)))
        norms.append(float(np.sum(np.abs(t))))
    return HValues(*vals, *norms)


def _reduced(name: str, fj: Jet, gj: Jet) -> ConstraintResidual:
    lhs_slot, table = REDUCED[name]
    v = _jet_vector(fj, gj)
    t = table.terms(v)
    lhs = v[lhs_slot]
    return ConstraintResidual(float(lhs - np.sum(t)), float(abs(lhs) + np.sum(np.abs(t))))


def _check_g_nonzero(gj: Jet):
    if abs(gj.value) <= 1e-12 * abs(gj[1]):
        raise DomainError("g vanishes; constraint divides by g")


def residual_class1(fj: Jet, gj: Jet) -> tuple[ConstraintResidual, ConstraintResidual]:
    """Residuals of g''' and f'''' against the A3,3+A1 constraint system."""
    _check(fj, gj)
    return _reduced("R1", fj, gj), _reduced("R2", fj, gj)


def residual_class2(fj: Jet, gj: Jet) -> tuple[ConstraintResidual, ConstraintResidual]:
    """Residuals of g'''' and f^(5) against the A1+A2 constraint system."""
    _check(fj, gj)
    _check_g_nonzero(gj)
    return _reduced("R3", fj, gj), _reduced("R4", fj, gj)


def residual_class3(fj: Jet, gj: Jet) -> tuple[ConstraintResidual, ConstraintResidual]:
    """Residuals of g'''' and f^(5) against the 3A1 constraint system."""
    _check(fj, gj)
    return _reduced("R5", fj, gj), _reduced("R6", fj, gj)


# Classification ------------------------------------------------------------


class SymmetryLabel(str, enum.Enum):
    GENERIC = "2A1"
    ABELIAN3 = "3A1"
    A1_A2 = "A1⊕A2"
    A33_A1 = "A3,3⊕A1"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SampleResiduals:
    x: float
    g: float
    h: tuple[float, float, float, float]
    reduced: tuple[float | None, ...]
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SymmetryClass:
    label: SymmetryLabel
    tol: float
    g_shift: float
    samples: tuple[SampleResiduals, ...]
    hypotheses: dict = field(default_factory=dict)

    def h_max(self) -> np.ndarray:
        return np.max([s.h for s in self.samples], axis=0)

    def reduced_max(self) -> np.ndarray:
        out = np.zeros(6)
        for s in self.samples:
            for i, r in enumerate(s.reduced):
                if r is not None:
                    out[i] = max(out[i], r)
        return out

    @property
    def nongeneric(self) -> bool:
        return self.label is not SymmetryLabel.GENERIC


def chebyshev_nodes(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * n)))


def _sample_jets(profile: BeamProfile, nodes):
    return [(profile.f_jet(x), profile.g.jet(x)) for x in nodes]


def _shift(gj: Jet, c: float) -> Jet:
    return gj + c if c else gj


def _best_shift(jets) -> float:
    # H11 = K1 + g H12 and H21 = K2 + g H22; choose c so that g + c kills both.
    num = den = 0.0
    for fj, gj in jets:
        hv = h_functions(fj, gj)
        for h_affine, h_slope, scale in ((hv.h11, hv.h12, hv.n11), (hv.h21, hv.h22, hv.n21)):
            if scale == 0:
                continue
            w = 1.0 / scale**2
            num += w * h_slope * h_affine
            den += w * h_slope * h_slope
    return -num / den if den > 0 else 0.0


def _sample_table(jets, nodes, c: float) -> list[SampleResiduals]:
    rows = []
    for x, (fj, gj) in zip(nodes, jets):
        gs = _shift(gj, c)
        h = tuple(float(v) for v in h_functions(fj, gs).normalized())
        flags = []
        r1, r2 = residual_class1(fj, gs)
        try:
            r3, r4 = (r.normalized for r in residual_class2(fj, gs))
        except DomainError:
            r3 = r4 = None
            flags.append("g=0: A1+A2 cross-check skipped")
        r5, r6 = residual_class3(fj, gs)
        reduced = (r1.normalized, r2.normalized, r3, r4, r5.normalized, r6.normalized)
        rows.append(SampleResiduals(float(x), gs.value, h, reduced, tuple(flags)))
    return rows


def classify(profile: BeamProfile, samples: int = 33, tol: float = 1e-9) -> SymmetryClass:
    if samples < 8:
        raise ValueError("at least 8 samples are required")
    if not tol > 0:
        raise ValueError("tol must be positive")
    nodes = chebyshev_nodes(*profile.domain, samples)
    jets = _sample_jets(profile, nodes)
    base = _sample_table(jets, nodes, 0.0)
    hmax = np.max([s.h for s in base], axis=0)

    c = _best_shift(jets)
    shifted = _sample_table(jets, nodes, c) if np.isfinite(c) else None
    hmax_shift = np.max([s.h for s in shifted], axis=0) if shifted else np.full(4, np.inf)

    hypotheses = {
        "A3,3⊕A1": float(hmax.max()),
        "3A1": float(max(hmax[1], hmax[3])),
        "A1⊕A2": float(max(hmax_shift[0], hmax_shift[2])),
    }
    # 3A1 is tested before A1+A2: the two are disjoint outside A3,3+A1, and
    # the shift fit is ill-conditioned when H12 and H22 vanish.
    if hypotheses["A3,3⊕A1"] < tol:
        label, c, table = SymmetryLabel.A33_A1, 0.0, base
    elif hypotheses["3A1"] < tol:
        label, c, table = SymmetryLabel.ABELIAN3, 0.0, base
    elif hypotheses["A1⊕A2"] < tol:
        label, table = SymmetryLabel.A1_A2, shifted
    else:
        label, c, table = SymmetryLabel.GENERIC, 0.0, base
    return SymmetryClass(label, tol, float(c), tuple(table), hypotheses)


# Generators ------------------------------------------------------------------


@dataclass(frozen=True)
class XData:
    """Jets (in whatever variable is being differentiated) of f, f', f'', g, g', g'', g'''."""

    f: Jet
    f1: Jet
    f2: Jet
    g: Jet
    g1: Jet
    g2: Jet
    g3: Jet

    @classmethod
    def from_jets(cls, fj: Jet, gj: Jet) -> "XData":
        f1 = fj.deriv()
        g1 = gj.deriv()
        g2 = g1.deriv()
        return cls(fj, f1, f1.deriv(), gj, g1, g2, g2.deriv())

    def frozen(self) -> "XData":
        return XData(*(Jet.constant(j.value) for j in
                       (self.f, self.f1, self.f2, self.g, self.g1, self.g2, self.g3)))


def seeded(fn: Callable, profile: BeamProfile, t: float, x: float, u: float,
           g_shift: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Values and Jacobian (rows: outputs, columns: d/dt, d/dx, d/du) of ``fn(t, xd, u)``."""
    xd = XData.from_jets(profile.f_jet(x), _shift(profile.g.jet(x), g_shift))
    xc = xd.frozen()
    const = Jet.constant
    runs = (
        fn(Jet.variable(t), xc, const(u)),
        fn(const(t), xd, const(u)),
        fn(const(t), xc, Jet.variable(u)),
    )

    def val(v):
        return v.value if isinstance(v, Jet) else float(v)

    def der(v):
        return v[1] if isinstance(v, Jet) else 0.0

    values = np.array([val(v) for v in runs[0]])
    jac = np.array([[der(v) for v in run] for run in runs]).T
    return values, jac


GENERATOR_TAGS = ("X1", "X2", "X3", "X4")


@dataclass(frozen=True)
class SymmetryGenerator:
    tag: str

    def __post_init__(self):
        if self.tag not in GENERATOR_TAGS:
            raise ValueError(f"unknown generator {self.tag!r}")

    def components(self, t, xd: XData, u):
        """(tau, xi, eta) as functions of t, x (through xd) and u."""
        if self.tag == "X1":
            return 1.0, 0.0, 0.0
        if self.tag == "X2":
            return 0.0, 0.0, u
        phi4 = xd.f1 / (xd.f * xd.g1) + 3.0 * xd.g2 / (xd.g1 * xd.g1)
        if self.tag == "X3":
            return 4.0 * t, 2.0 * xd.g / xd.g1, -(xd.g * phi4) * u
        return 0.0, 2.0 / xd.g1, -phi4 * u


@dataclass(frozen=True)
class GeneratorField:
    generator: SymmetryGenerator
    profile: BeamProfile
    g_shift: float = 0.0

    def evaluate(self, t, x, u):
        return seeded(self.generator.components, self.profile, t, x, u, self.g_shift)

    def __call__(self, t, x, u) -> np.ndarray:
        return self.evaluate(t, x, u)[0]


def generator_at(gen: SymmetryGenerator, profile: BeamProfile, t: float, x: float, u: float,
                 g_shift: float = 0.0) -> np.ndarray:
    return GeneratorField(gen, profile, g_shift)(t, x, u)


def lie_bracket(A: GeneratorField, B: GeneratorField, t: float, x: float, u: float) -> np.ndarray:
    """Components of [A, B] = A(B) - B(A) at (t, x, u)."""
    a, ja = A.evaluate(t, x, u)
    b, jb = B.evaluate(t, x, u)
    return jb @ a - ja @ b
