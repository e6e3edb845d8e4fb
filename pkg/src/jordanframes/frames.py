"""Associative subalgebras as frames of orthogonal projections.

In finite dimension an associative subalgebra is the linear span of a finite
family of nonzero pairwise orthogonal projections, and that family (its
minimal projections) is unique. Frames are therefore the only representation
used here: unital subalgebras are frames summing to the unit, arbitrary ones
are any frame, and the zero algebra is the empty frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import (
    TOL_ALG,
    TOL_IDEM,
    AlgebraDescriptor,
    AlgebraMismatchError,
    Element,
    Projection,
    RealFactor,
    SpinFactor,
    HermFactor,
    as_projection,
    distance,
    jordan_product,
    numerical_rank,
    operator_commute,
    u_compression_dim,
)
from .spectral import spectral_decompose

_ROUND = 6


class FrameError(ValueError):
    pass


class NotUnitalError(FrameError):
    """A unital frame was required."""


class NonCommutingGeneratorsError(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"generators {i} and {j} do not operator commute")
        self.pair = (i, j)


class SumDetectPreconditionError(ValueError):
    pass


def _sort_key(p: Element):
    coords = np.round(p.coords, _ROUND) + 0.0
    return (-int(round(p.trace())), tuple(-coords))


@dataclass(frozen=True, eq=False)
class Frame:
    """Nonzero pairwise orthogonal projections in canonical order.

    Use :meth:`of` to build one; it validates and sorts. Two frames compare
    equal when they span the same subalgebra.
    """

    algebra: AlgebraDescriptor
    projections: tuple

    @classmethod
    def of(cls, algebra: AlgebraDescriptor, projections: Sequence[Element] = (), tol: float = TOL_IDEM) -> "Frame":
        projs = [as_projection(p, tol) for p in projections]
        for p in projs:
            if p.algebra != algebra:
                raise AlgebraMismatchError("frame projection from a different algebra")
            if p.is_zero(tol):
                raise FrameError("frame projections must be nonzero")
        for (i, p), (j, q) in combinations(enumerate(projs), 2):
            if not jordan_product(p, q).is_zero(tol):
                raise FrameError(f"frame projections {i} and {j} are not orthogonal")
        projs.sort(key=_sort_key)
        frame = Frame(algebra, tuple(projs))
        if cls is UnitalFrame:
            return frame.as_unital()
        return frame

    @classmethod
    def empty(cls, algebra: AlgebraDescriptor) -> "Frame":
        return Frame(algebra, ())

    def __len__(self):
        return len(self.projections)

    def __iter__(self):
        return iter(self.projections)

    def total(self) -> Element:
        s = self.algebra.zero()
        for p in self.projections:
            s = s + p
        return s

    @property
    def is_unital(self) -> bool:
        return bool(self.projections) and distance(self.total(), self.algebra.unit()) <= TOL_IDEM

    def as_unital(self) -> "UnitalFrame":
        if not self.is_unital:
            raise NotUnitalError("frame projections do not sum to the unit")
        return UnitalFrame(self.algebra, self.projections)

    def coordinate_matrix(self) -> np.ndarray:
        """Projections as columns, shape ``(dim A, k)``."""
        if not self.projections:
            return np.zeros((self.algebra.dim, 0))
        return np.column_stack([p.coords for p in self.projections])

    def contains(self, x: Element, tol: float = TOL_ALG) -> bool:
        """Whether ``x`` lies in the span of the frame."""
        return _span_residual(self, x) <= tol * max(1.0, x.norm())

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and len(self) == len(other)
            and includes(self, other)
            and includes(other, self)
        )

    def __hash__(self):
        return hash((self.algebra, tuple(int(round(p.trace())) for p in self.projections)))

    def __repr__(self):
        traces = [round(p.trace(), 3) for p in self.projections]
        return f"{type(self).__name__}(k={len(self)}, traces={traces})"


class UnitalFrame(Frame):
    """A frame whose projections sum to the unit."""


def _span_coefficients(F: Frame, x: Element):
    M = F.coordinate_matrix()
    if M.shape[1] == 0:
        return np.zeros(0), float(np.linalg.norm(x.coords))
    c, *_ = np.linalg.lstsq(M, x.coords, rcond=None)
    return c, float(np.linalg.norm(M @ c - x.coords))


def _span_residual(F: Frame, x: Element) -> float:
    return _span_coefficients(F, x)[1]


def _check_same(C: Frame, D: Frame):
    if C.algebra != D.algebra:
        raise AlgebraMismatchError("frames belong to different algebras")


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def generate_assoc(generators: Sequence[Element]) -> Frame:
    """Frame of minimal projections of the associative algebra generated by ``generators``.

    The generators must pairwise operator commute. The spectral frames of the
    generators are refined against each other; the joint-zero piece is dropped,
    since the generated algebra need not contain the unit.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("generate_assoc needs at least one generator (or use Frame.empty)")
    A = gens[0].algebra
    for (i, a), (j, b) in combinations(enumerate(gens), 2):
        if b.algebra != A:
            raise AlgebraMismatchError("generators belong to different algebras")
        if not operator_commute(a, b):
            raise NonCommutingGeneratorsError(i, j)

    pieces = [(A.unit(), ())]
    for g in gens:
        dec = spectral_decompose(g)
        refined = []
        for piece, values in pieces:
            for lam, e in dec:
                # commuting projections: the compression U_piece(e) is their product
                q = 2.0 * jordan_product(piece, jordan_product(piece, e)) - jordan_product(piece, e)
                if not q.is_zero(1e-6):
                    refined.append((q, values + (lam,)))
        pieces = refined
    scale = max(1.0, max(g.norm() for g in gens))
    kept = [q for q, values in pieces if max(abs(v) for v in values) > 1e-8 * scale]
    return Frame.of(A, kept, tol=1e-7)


# ---------------------------------------------------------------------------
# order and orthogonality
# ---------------------------------------------------------------------------


def _subset_coefficients_ok(c: np.ndarray, tol: float = 1e-6) -> bool:
    return bool(np.all((np.abs(c) <= tol) | (np.abs(c - 1.0) <= tol)))


def includes(C: Frame, D: Frame, tol: float = TOL_ALG) -> bool:
    """``span D`` is contained in ``span C``.

    Each projection of D must be a sum of a subset of C's projections: the
    least-squares coefficients over C must reproduce it and be 0 or 1.
    """
    _check_same(C, D)
    for q in D.projections:
        c, res = _span_coefficients(C, q)
        if res > tol * max(1.0, q.norm()) * max(1, C.algebra.dim) or not _subset_coefficients_ok(c):
            return False
    return True


def intersect(C: Frame, D: Frame) -> Frame:
    """Frame of ``span C`` intersected with ``span D``.

    The common subspace is the null space of ``[C | -D]``. Its vectors, read
    as coefficient functions on C's projections, form a subalgebra of
    ``R^k``; indices with equal coefficient rows merge into one projection
    and indices whose row vanishes are dropped.
    """
    _check_same(C, D)
    if not C.projections or not D.projections:
        return Frame.empty(C.algebra)
    MC, MD = C.coordinate_matrix(), D.coordinate_matrix()
    ns = scipy.linalg.null_space(np.hstack([MC, -MD]), rcond=1e-9)
    if ns.shape[1] == 0:
        return Frame.empty(C.algebra)
    rows = ns[: MC.shape[1]]
    groups: list = []
    for i, r in enumerate(rows):
        if np.max(np.abs(r)) <= 1e-7:
            continue
        for g in groups:
            if np.max(np.abs(rows[g[0]] - r)) <= 1e-7:
                g.append(i)
                break
        else:
            groups.append([i])
    projs = []
    for g in groups:
        s = C.algebra.zero()
        for i in g:
            s = s + C.projections[i]
        projs.append(s)
    return Frame.of(C.algebra, projs, tol=1e-7)


def orthogonal(C: Frame, D: Frame, tol: float = TOL_IDEM) -> bool:
    _check_same(C, D)
    return all(jordan_product(p, q).is_zero(tol) for p in C.projections for q in D.projections)


def height(C: Frame) -> int:
    return len(C.projections)


def span_dimension(C: Frame) -> int:
    return numerical_rank(C.coordinate_matrix())


def covers(C: Frame, D: Frame) -> bool:
    return includes(C, D) and height(C) == height(D) + 1


def maximal_chain(C: Frame) -> list:
    """Chain ``C = X_k > X_{k-1} > ... > X_1 > {0}`` dropping one projection at a time."""
    chain = [C]
    projs = list(C.projections)
    while projs:
        projs = projs[1:]
        chain.append(Frame.of(C.algebra, projs))
    return chain


def chain_length(C: Frame) -> int:
    """Length of :func:`maximal_chain`, verifying each step is a covering by rank."""
    chain = maximal_chain(C)
    for X, Y in zip(chain, chain[1:]):
        if not includes(X, Y) or span_dimension(X) != span_dimension(Y) + 1:
            raise FrameError("chain step is not a covering")
    return len(chain) - 1


def is_atom_AS(C: Frame) -> bool:
    return len(C) == 1


def is_atom_ASU(C: Frame) -> bool:
    return len(C) == 2 and C.is_unital


def proper_unital_subalgebra(C: Frame) -> UnitalFrame:
    """Merge the first and last projections of a unital frame of size ``k >= 2``."""
    if not C.is_unital:
        raise NotUnitalError("proper_unital_subalgebra needs a unital frame")
    k = len(C)
    if k < 2:
        raise FrameError("a unital frame of size 1 has no proper unital subalgebra")
    ps = C.projections
    merged = [ps[0] + ps[-1], *ps[1:-1]]
    return UnitalFrame.of(C.algebra, merged)


def is_maximal_assoc(A: AlgebraDescriptor, C: Frame) -> bool:
    """A unital frame is maximal iff each of its compressions ``U_p(A)`` is one-dimensional."""
    if C.algebra != A:
        raise AlgebraMismatchError("frame does not belong to the algebra")
    if not C.is_unital:
        raise NotUnitalError("maximality is only decided for unital frames; non-unital frames are never maximal")
    return all(u_compression_dim(A, p) == 1 for p in C.projections)


def relative_commutant_dimension(A: AlgebraDescriptor, C: Frame) -> int:
    """Dimension of the set of elements operator commuting with span C.

    Computed as the common null space of ``T_x T_p - T_p T_x`` over the frame,
    i.e. directly from commutation rather than from compressions.
    """
    from .algebra import T_matrix

    basis = A.basis()
    rows = []
    for p in C.projections:
        Tp = T_matrix(p)
        cols = []
        for e in basis:
            Te = T_matrix(e)
            cols.append((Tp @ Te - Te @ Tp).ravel())
        rows.append(np.column_stack(cols))
    M = np.vstack(rows)
    return A.dim - numerical_rank(M)


def classify_two_dim_maximal(A: AlgebraDescriptor) -> bool:
    """Whether A has a two-dimensional maximal unital associative subalgebra.

    This happens exactly for a single spin factor (the 2 x 2 matrix factors
    are spin factors too) and for ``R (+) R``.
    """
    fs = A.factors
    if len(fs) == 1:
        f = fs[0]
        return isinstance(f, SpinFactor) or (isinstance(f, HermFactor) and f.n == 2)
    return len(fs) == 2 and all(isinstance(f, RealFactor) for f in fs)


def search_two_dim_maximal(A: AlgebraDescriptor, rng: np.random.Generator, samples: int = 200):
    """Randomised cross-check of :func:`classify_two_dim_maximal`.

    Returns a maximal unital frame ``(p, 1 - p)`` if one is found among
    ``samples`` random projections, else None.
    """
    from .sampling import random_projection

    unit = A.unit()
    for _ in range(samples):
        p = random_projection(A, rng)
        if p.is_zero(1e-9) or distance(p, unit) <= 1e-9:
            continue
        F = UnitalFrame.of(A, [p, p.complement()])
        if is_maximal_assoc(A, F):
            return F
    return None


def sum_detect(p: Element, q: Element, z: Element, tol: float = TOL_ALG) -> bool:
    """Whether ``{p, q, z}`` spans a two-dimensional associative subalgebra.

    For nonzero orthogonal projections p, q and a nonzero projection z not
    equal to either, this holds exactly when ``z = p + q``.
    """
    A = p.algebra
    for name, x in (("p", p), ("q", q), ("z", z)):
        if x.algebra != A:
            raise AlgebraMismatchError("projections belong to different algebras")
        if x.is_zero(tol):
            raise SumDetectPreconditionError(f"{name} is zero")
        as_projection(x, 1e-7)
    if not jordan_product(p, q).is_zero(1e-7):
        raise SumDetectPreconditionError("p and q are not orthogonal")
    if distance(z, p) <= tol or distance(z, q) <= tol:
        raise SumDetectPreconditionError("z coincides with p or q")

    items = [p, q, z]
    # span{p, q, z} is two-dimensional iff z lies in span{p, q}; the residual is
    # measured in the algebra norm so the cutoff matches ||z - (p + q)|| <= tol
    P = np.column_stack([p.coords, q.coords])
    c, *_ = np.linalg.lstsq(P, z.coords, rcond=None)
    if (z - c[0] * p - c[1] * q).spectral_norm() > tol:
        return False
    if not all(operator_commute(a, b) for a, b in combinations(items, 2)):
        return False
    M = np.column_stack([x.coords for x in items])
    for a, b in combinations(items, 2):
        prod = jordan_product(a, b)
        c, *_ = np.linalg.lstsq(M, prod.coords, rcond=None)
        if (prod - A.from_coords(M @ c)).spectral_norm() > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# spin factor subalgebras
# ---------------------------------------------------------------------------


def spin_projection(xi, algebra: AlgebraDescriptor | None = None) -> Projection:
    """The projection ``(1 + xi) / 2`` of the spin factor on ``R^len(xi)``."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > TOL_ALG:
        raise ValueError("spin_projection needs a unit vector")
    A = algebra if algebra is not None else AlgebraDescriptor.spin(len(xi))
    return as_projection(A.spin_element(0.5, 0.5 * xi))


def spin_frame(xi, algebra: AlgebraDescriptor | None = None) -> UnitalFrame:
    p = spin_projection(xi, algebra)
    return UnitalFrame.of(p.algebra, [p, p.complement()])
