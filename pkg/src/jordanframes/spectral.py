"""Spectral decomposition and the function calculus built on it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    CLUSTER_GAP,
    TOL_ALG,
    TOL_COMMUTE,
    Element,
    Projection,
    T_matrix,
)

DYADIC_DEPTH = 40


class NotPositiveError(ValueError):
    pass


class OutOfUnitIntervalError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) with their spectral projections.

    The projections sum to the unit; a zero eigenvalue is kept explicitly.
    """

    eigenvalues: tuple
    projections: tuple

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.projections))

    def __len__(self):
        return len(self.eigenvalues)

    def recompose(self) -> Element:
        A = self.projections[0].algebra
        total = A.zero()
        for lam, p in self:
            total = total + lam * p
        return total


def _raw_pairs(x: Element):
    """(eigenvalue, factor index, block projection) for every eigenvector."""
    pairs = []
    for i, (f, b) in enumerate(zip(x.algebra.factors, x.blocks)):
        for lam, proj in f.eig(b):
            pairs.append((lam, i, proj))
    return pairs


def spectral_decompose(x: Element, gap: float = CLUSTER_GAP) -> SpectralDecomposition:
    """Spectral decomposition of ``x`` with eigenvalues closer than ``gap`` merged.

    Eigenvalues are clustered by single linkage: consecutive sorted values
    within ``gap`` of each other share a cluster, and the cluster's projection
    is the sum of the members' eigenprojections. The reported eigenvalue of
    a cluster is the mean of its members.
    """
    A = x.algebra
    pairs = sorted(_raw_pairs(x), key=lambda t: -t[0])
    clusters = [[pairs[0]]]
    for item in pairs[1:]:
        if clusters[-1][-1][0] - item[0] <= gap:
            clusters[-1].append(item)
        else:
            clusters.append([item])

    eigenvalues, projections = [], []
    for cl in clusters:
        blocks = [f.zero() for f in A.factors]
        for _, i, proj in cl:
            blocks[i] = blocks[i] + proj
        eigenvalues.append(float(np.mean([t[0] for t in cl])))
        projections.append(Projection(A, tuple(blocks)))
    return SpectralDecomposition(tuple(eigenvalues), tuple(projections))


def eigenvalues(x: Element) -> np.ndarray:
    """All eigenvalues with multiplicity, descending."""
    return np.array(sorted((t[0] for t in _raw_pairs(x)), reverse=True))


def min_eigenvalue(x: Element) -> float:
    return float(min(t[0] for t in _raw_pairs(x)))


def max_eigenvalue(x: Element) -> float:
    return float(max(t[0] for t in _raw_pairs(x)))


def range_projection(x: Element, threshold: float = CLUSTER_GAP) -> Projection:
    """Sum of the spectral projections of a positive ``x`` with eigenvalue above ``threshold``."""
    if min_eigenvalue(x) < -TOL_ALG * max(1.0, x.norm()):
        raise NotPositiveError("range_projection needs a positive element")
    A = x.algebra
    blocks = [f.zero() for f in A.factors]
    for lam, i, proj in _raw_pairs(x):
        if lam > threshold:
            blocks[i] = blocks[i] + proj
    return Projection(A, tuple(blocks))


def spectral_projection(x: Element, keep: Callable[[float], bool]) -> Projection:
    """Sum of the eigenprojections whose eigenvalue satisfies ``keep``."""
    A = x.algebra
    blocks = [f.zero() for f in A.factors]
    for lam, i, proj in _raw_pairs(x):
        if keep(lam):
            blocks[i] = blocks[i] + proj
    return Projection(A, tuple(blocks))


def apply_function(x: Element, f: Callable[[float], float]) -> Element:
    """``sum f(lambda_i) p_i`` over the spectral decomposition of ``x``."""
    dec = spectral_decompose(x)
    A = x.algebra
    total = A.zero()
    for lam, p in dec:
        total = total + float(f(lam)) * p
    return total


def dyadic_expand(x: Element, N: int = DYADIC_DEPTH) -> list:
    """Greedy binary digits of ``0 <= x <= 1`` as projections.

    Digit ``n`` (1-based) is the spectral projection of the running residual
    onto eigenvalues ``>= 2**-n``; the residual then drops by ``2**-n`` on
    that projection. The residual stays positive and its norm is below
    ``2**-N``. Residuals are tracked on the eigenvalues of ``x`` itself, so
    every digit is a sum of spectral projections of ``x``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    dec = spectral_decompose(x)
    lo, hi = min(dec.eigenvalues), max(dec.eigenvalues)
    scale = max(1.0, x.norm())
    if lo < -TOL_ALG * scale or hi > 1.0 + TOL_ALG * scale:
        raise OutOfUnitIntervalError(f"spectrum [{lo:.3g}, {hi:.3g}] is not inside [0, 1]")
    A = x.algebra
    residual = np.clip(np.array(dec.eigenvalues), 0.0, 1.0)
    digits = []
    for n in range(1, N + 1):
        step = 2.0**-n
        on = residual >= step
        p = A.zero()
        for keep, proj in zip(on, dec.projections):
            if keep:
                p = p + proj
        digits.append(Projection(A, p.blocks))
        residual = np.where(on, residual - step, residual)
    return digits


def dyadic_sum(digits) -> Element:
    A = digits[0].algebra
    total = A.zero()
    for n, p in enumerate(digits, start=1):
        total = total + 2.0**-n * p
    return total


def digits_commute(x: Element, digits, tol: float = TOL_COMMUTE) -> bool:
    """Whether every digit operator-commutes with ``x``.

    Same test as :func:`operator_commute`, with ``T_x`` built once and
    repeated digits tested once.
    """
    Tx = T_matrix(x)
    seen = set()
    for p in digits:
        key = p.coords.tobytes()
        if key in seen:
            continue
        seen.add(key)
        Tp = T_matrix(p)
        scale = max(1.0, x.norm() * p.norm())
        if np.linalg.norm(Tx @ Tp - Tp @ Tx, 2) > tol * scale:
            return False
    return True
