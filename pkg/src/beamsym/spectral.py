"""Clamped-clamped modal spectra of (f phi'')'' = omega^2 m phi by finite differences."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cholesky_banded
from scipy.optimize import brentq
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .beam import BeamProfile
from .expr import evaluate
from .symmetry import SymmetryClass, SymmetryLabel, classify

BC_CLAMPED = "clamped-clamped"


class SpectralError(RuntimeError):
    pass


class ClassMismatchError(ValueError):
    def __init__(self, cls: SymmetryClass):
        super().__init__(f"iso-spectrality needs class A3,3⊕A1, profile classifies as {cls.label}")
        self.classification = cls


@dataclass(frozen=True)
class Discretization:
    N: int
    nodes: np.ndarray  # all N+1 grid points
    K: sp.csc_matrix  # acts on the N-1 interior values
    M: np.ndarray  # diagonal mass, interior nodes
    bc: str = BC_CLAMPED

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    def banded(self) -> np.ndarray:
        """Upper banded storage (3 rows) of K."""
        n = self.K.shape[0]
        ab = np.zeros((3, n))
        for k in range(3):
            ab[2 - k, k:] = self.K.diagonal(k)
        return ab

    def cholesky_ok(self) -> bool:
        try:
            cholesky_banded(self.banded())
        except np.linalg.LinAlgError:
            return False
        return True


def assemble(profile: BeamProfile, N: int = 2000, bc: str = BC_CLAMPED) -> Discretization:
    """K = D2' W F D2 on interior unknowns; ghost values phi_{-1} = phi_1 impose phi' = 0."""
    if bc != BC_CLAMPED:
        raise ValueError(f"unsupported boundary condition {bc!r}")
    if N < 64:
        raise ValueError("N must be at least 64")
    a, b = profile.domain
    x = np.linspace(a, b, N + 1)
    h = (b - a) / N
    n = N - 1
    # D2: interior values -> second differences at all N+1 nodes
    rows = np.r_[np.arange(1, N), np.arange(1, N), np.arange(1, N)]
    cols = np.r_[np.arange(n) - 1, np.arange(n), np.arange(n) + 1]
    vals = np.r_[np.ones(n), -2.0 * np.ones(n), np.ones(n)]
    keep = (cols >= 0) & (cols < n)
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    rows = np.r_[rows, 0, N]
    cols = np.r_[cols, 0, n - 1]
    vals = np.r_[vals, 2.0, 2.0]
    D2 = sp.csr_matrix((vals / h**2, (rows, cols)), shape=(N + 1, n))
    w = np.ones(N + 1)
    w[[0, -1]] = 0.5
    f = evaluate(profile.f, x)
    K = (D2.T @ sp.diags(w * f) @ D2).tocsc()
    K = ((K + K.T) * 0.5).tocsc()
    M = evaluate(profile.m, x[1:-1])
    return Discretization(N, x, K, M, bc)


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    modes: np.ndarray  # (N+1, n) with clamped zeros at the ends
    N: int
    domain: tuple[float, float]


def solve_spectrum(d: Discretization, n_modes: int = 3, maxiter: int = 5000) -> Spectrum:
    n = d.K.shape[0]
    if not 1 <= n_modes <= (d.N) // 4:
        raise ValueError("n_modes must be between 1 and N/4")
    try:
        lam, vec = eigsh(d.K, k=n_modes, M=sp.diags(d.M).tocsc(), sigma=0.0, which="LM",
                         v0=np.ones(n), maxiter=maxiter)
    except ArpackNoConvergence as exc:
        res = [np.linalg.norm(d.K @ v - l * d.M * v) for l, v in
               zip(exc.eigenvalues, exc.eigenvectors.T)]
        raise SpectralError(f"eigensolver did not converge; residual norms {res}") from None
    order = np.argsort(lam)
    lam, vec = lam[order], vec[:, order]
    if np.any(lam <= 0):
        raise SpectralError("nonpositive eigenvalue; stiffness is not definite")
    modes = np.zeros((d.N + 1, n_modes))
    modes[1:-1] = vec
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(modes), axis=0)
    modes *= np.sign(modes[idx, np.arange(n_modes)])
    return Spectrum(np.sqrt(lam), modes, d.N, (float(d.nodes[0]), float(d.nodes[-1])))


def spectrum(profile: BeamProfile, N: int = 2000, n_modes: int = 3) -> Spectrum:
    return solve_spectrum(assemble(profile, N), n_modes)


# Uniform-beam reference ----------------------------------------------------


def clamped_root(k: int) -> float:
    """k-th positive root of cos(b) cosh(b) = 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = (k + 0.5) * math.pi

    def F(b):
        return math.cos(b) - 1.0 / math.cosh(b)

    root = brentq(F, c - 0.4, c + 0.4, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    for _ in range(2):
        dF = -math.sin(root) + math.tanh(root) / math.cosh(root)
        step = F(root) / dF
        if abs(step) > 1e-13:
            root -= step
    return root


def uniform_frequencies(n: int, length: float = 1.0) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.array([(clamped_root(k) / length) ** 2 for k in range(1, n + 1)])


def observed_order(errors) -> np.ndarray:
    e = np.asarray(errors, dtype=float)
    return np.log2(np.abs(e[:-1]) / np.abs(e[1:]))


def richardson(coarse: np.ndarray, fine: np.ndarray, p: float = 2.0) -> np.ndarray:
    return fine + (fine - coarse) / (2**p - 1)


# Iso-spectrality -----------------------------------------------------------


@dataclass(frozen=True)
class IsospectralRow:
    mode: int
    omega: float
    reference: float
    deviation: float
    orders: tuple[float, ...]  # one per consecutive grid pair
    extrapolated_deviation: float


@dataclass(frozen=True)
class IsospectralReport:
    profile: BeamProfile
    length: float
    grids: tuple[int, ...]
    rows: tuple[IsospectralRow, ...]
    tol: float
    order_window: tuple[float, float]

    @property
    def passed(self) -> bool:
        lo, hi = self.order_window
        return all(r.deviation < self.tol and all(lo <= q <= hi for q in r.orders) for r in self.rows)


def isospectral_check(profile: BeamProfile, n_modes: int = 3, N: int = 2000, tol: float = 5e-3,
                      cls: SymmetryClass | None = None,
                      order_window=(1.7, 2.3)) -> IsospectralReport:
    """Compare the clamped spectrum with a uniform beam of length g(b) - g(a).

    Grids N/4, N/2, N give the observed order and a Richardson limit.
    """
    cls = cls if cls is not None else classify(profile)
    if cls.label is not SymmetryLabel.A33_A1:
        raise ClassMismatchError(cls)
    grids = (N // 4, N // 2, N)
    length = profile.g.total
    ref = uniform_frequencies(n_modes, length)
    omegas = np.array([spectrum(profile, n, n_modes).omega for n in grids])
    errs = omegas - ref
    orders = observed_order(errs)
    limit = richardson(omegas[-2], omegas[-1])
    rows = tuple(
        IsospectralRow(k + 1, float(omegas[-1, k]), float(ref[k]),
                       float(abs(errs[-1, k]) / ref[k]), tuple(float(q) for q in orders[:, k]),
                       float(abs(limit[k] - ref[k]) / ref[k]))
        for k in range(n_modes)
    )
    return IsospectralReport(profile, float(length), grids, rows, tol, tuple(order_window))
