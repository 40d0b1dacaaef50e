"""Truncated Taylor arithmetic (forward mode, order 6).

A :class:`Jet` carries the value and the first six derivatives of a scalar
function at a point.  Internally the normalized Taylor coefficients
``c[k] = f^(k)(x0) / k!`` are stored, which turns products into plain
convolutions and lets the elementary functions use the usual recurrences.

Coefficients that cannot be determined at the current truncation (for
instance the top slot after :meth:`Jet.deriv`) are NaN.  NaN never leaks
into lower orders: every recurrence below reads only lower-index slots.
"""
from __future__ import annotations

import math
from numbers import Real

import numpy as np

ORDER = 6
_FACT = np.array([math.factorial(k) for k in range(ORDER + 1)], dtype=float)


class DomainError(ValueError):
    """Raised when an operation leaves the domain of a function.

    ``x0`` is the evaluation point when it is known.
    """

    def __init__(self, message: str, x0: float | None = None):
        self.x0 = x0
        if x0 is not None:
            message = f"{message} (at x = {x0!r})"
        super().__init__(message)

    def at(self, x0: float) -> "DomainError":
        if self.x0 is not None:
            return self
        base = self.args[0]
        return type(self)(base, x0)


class Jet:
    __slots__ = ("_c",)

    def __init__(self, coefficients):
        c = np.zeros(ORDER + 1)
        coefficients = np.asarray(coefficients, dtype=float)
        c[: coefficients.size] = coefficients[: ORDER + 1]
        c.flags.writeable = False
        self._c = c

    # construction -----------------------------------------------------

    @classmethod
    def from_derivatives(cls, value: float, d=()) -> "Jet":
        derivs = np.zeros(ORDER + 1)
        derivs[0] = value
        d = np.asarray(d, dtype=float)
        derivs[1 : 1 + d.size] = d[:ORDER]
        return cls(derivs / _FACT)

    @classmethod
    def variable(cls, x0: float) -> "Jet":
        return cls([x0, 1.0])

    @classmethod
    def constant(cls, c: float) -> "Jet":
        return cls([c])

    # views ------------------------------------------------------------

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    @property
    def value(self) -> float:
        return float(self._c[0])

    @property
    def derivatives(self) -> np.ndarray:
        """Value followed by derivatives of orders 1..6."""
        return self._c * _FACT

    @property
    def d(self) -> np.ndarray:
        """Derivatives of orders 1..6."""
        return (self._c * _FACT)[1:]

    def __getitem__(self, k: int) -> float:
        """``j[k]`` is the k-th derivative."""
        return float(self._c[k] * _FACT[k])

    def __repr__(self):
        d = ", ".join(f"{v:.6g}" for v in self.d)
        return f"Jet({self.value:.6g}; {d})"

    def deriv(self) -> "Jet":
        """Jet of the derivative; the top coefficient becomes unknown (NaN)."""
        c = np.empty(ORDER + 1)
        k = np.arange(1, ORDER + 1)
        c[:-1] = k * self._c[1:]
        c[-1] = np.nan
        return Jet(c)

    def is_constant(self) -> bool:
        return bool(np.all(self._c[1:] == 0.0))

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _lift(other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, Real):
            return Jet.constant(float(other))
        return NotImplemented

    def __neg__(self):
        return Jet(-self._c)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Jet(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Jet(self._c - other._c)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Jet(other._c - self._c)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Jet(self._c * float(other))
        if not isinstance(other, Jet):
            return NotImplemented
        return Jet(np.convolve(self._c, other._c)[: ORDER + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Real):
            if other == 0:
                raise DomainError("division by zero")
            return Jet(self._c / float(other))
        if not isinstance(other, Jet):
            return NotImplemented
        return _divide(self, other)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _divide(other, self)

    def __pow__(self, r):
        if isinstance(r, Jet):
            if r.is_constant():
                return power(self, r.value)
            return exp(r * log(self))
        return power(self, r)

    def __rpow__(self, base):
        if not isinstance(base, Real):
            return NotImplemented
        if base <= 0:
            raise DomainError(f"non-positive base {base!r} with variable exponent")
        return exp(self * math.log(base))


def _divide(a: Jet, b: Jet) -> Jet:
    b0 = b._c[0]
    if b0 == 0.0:
        raise DomainError("division by a jet with zero value")
    q = np.empty(ORDER + 1)
    for k in range(ORDER + 1):
        q[k] = (a._c[k] - np.dot(q[:k], b._c[k:0:-1])) / b0
    return Jet(q)


def exp(a: Jet) -> Jet:
    a = Jet._lift(a)
    e = np.empty(ORDER + 1)
    e[0] = math.exp(a._c[0])
    j = np.arange(1, ORDER + 1)
    for k in range(1, ORDER + 1):
        e[k] = np.dot(j[:k] * a._c[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return Jet(e)


def log(a: Jet) -> Jet:
    a = Jet._lift(a)
    a0 = a._c[0]
    if not a0 > 0.0:
        raise DomainError(f"ln of non-positive value {a0!r}")
    out = np.empty(ORDER + 1)
    out[0] = math.log(a0)
    for k in range(1, ORDER + 1):
        j = np.arange(1, k)
        s = np.dot(j * out[1:k], a._c[k - 1 : 0 : -1]) if k > 1 else 0.0
        out[k] = (a._c[k] - s / k) / a0
    return Jet(out)


def _sincos(a: Jet) -> tuple[Jet, Jet]:
    s = np.empty(ORDER + 1)
    c = np.empty(ORDER + 1)
    s[0] = math.sin(a._c[0])
    c[0] = math.cos(a._c[0])
    j = np.arange(1, ORDER + 1)
    for k in range(1, ORDER + 1):
        w = j[:k] * a._c[1 : k + 1]
        s[k] = np.dot(w, c[k - 1 :: -1][:k]) / k
        c[k] = -np.dot(w, s[k - 1 :: -1][:k]) / k
    return Jet(s), Jet(c)


def sin(a: Jet) -> Jet:
    return _sincos(Jet._lift(a))[0]


def cos(a: Jet) -> Jet:
    return _sincos(Jet._lift(a))[1]


def power(a: Jet, r: float) -> Jet:
    """``a ** r``.

    Integer exponents use repeated multiplication (negative bases allowed);
    any other exponent goes through ``exp(r * ln a)`` and needs ``a > 0``.
    """
    a = Jet._lift(a)
    r = float(r)
    if r.is_integer() and abs(r) <= 64:
        n = int(r)
        if n < 0:
            return 1.0 / power(a, -n)
        result = Jet.constant(1.0)
        base = a
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result
    if not a._c[0] > 0.0:
        raise DomainError(f"non-integer power {r!r} of non-positive value {a._c[0]!r}")
    return exp(r * log(a))


def sqrt(a: Jet) -> Jet:
    a = Jet._lift(a)
    if not a._c[0] > 0.0:
        raise DomainError(f"sqrt of non-positive value {a._c[0]!r}")
    return power(a, 0.5)


def compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of ``phi(h(x))`` from the jet of phi at h(x0) and the jet of h at x0."""
    c = np.array(outer._c)
    unknown = np.flatnonzero(~np.isfinite(c))
    first_unknown = int(unknown[0]) if unknown.size else ORDER + 1
    c[first_unknown:] = 0.0
    delta = Jet(np.r_[0.0, inner._c[1:]])
    out = Jet.constant(c[ORDER])
    for k in range(ORDER - 1, -1, -1):
        out = out * delta + c[k]
    res = np.array(out._c)
    res[first_unknown:] = np.nan
    return Jet(res)


# Named entry points mirroring the operation catalogue.

_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def jet_binary(a: Jet, b: Jet, op: str) -> Jet:
    try:
        return _BINARY[op](a, b)
    except KeyError:
        raise ValueError(f"unknown binary operation {op!r}") from None


def jet_elementary(a: Jet, fn: str, r: float | None = None) -> Jet:
    if fn == "pow":
        if r is None:
            raise ValueError("pow needs an exponent")
        return power(a, r)
    funcs = {"exp": exp, "ln": log, "sqrt": sqrt, "sin": sin, "cos": cos}
    try:
        return funcs[fn](a)
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
