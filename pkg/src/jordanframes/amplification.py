"""Full matrix *-algebras, 2 x 2 amplification, and the 2-positivity test.

Maps on ``M_n(C)`` are handled as :class:`ComplexMap` superoperators acting on
row-major vectorised matrices. A real Jordan map on the hermitian part of
``M_n(C)`` is turned into one by :func:`complexify`. The amplification
``id (x) rho`` acts on ``M_2(M_n) = M_2 (x) M_n`` blockwise.

A unital Jordan map is a *-homomorphism exactly when it is 2-positive, so
:func:`two_positivity_test` separates *-isomorphisms from anti-isomorphisms
(such as the transpose).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import TOL_ALG, AlgebraDescriptor, HermFactor
from .linmap import LinearMap
from .sampling import random_unitary


class NotJordanMapError(ValueError):
    pass


class AmplificationFormError(ValueError):
    """The candidate map does not send ``p (x) q`` to ``p (x) q'``."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class StarAlgebra:
    """``M_n(C)``; its hermitian part is ``AlgebraDescriptor.herm(n, "complex")``."""

    n: int

    @property
    def self_adjoint_part(self) -> AlgebraDescriptor:
        return AlgebraDescriptor.herm(self.n, "complex")

    def unit(self) -> np.ndarray:
        return np.eye(self.n, dtype=complex)

    def matrix_unit(self, i: int, j: int) -> np.ndarray:
        e = np.zeros((self.n, self.n), dtype=complex)
        e[i, j] = 1.0
        return e

    def embed_diagonal(self, x: np.ndarray) -> "AmplifiedElement":
        """``x -> 1 (x) x``, the block-diagonal pair ``(x, x)``."""
        return AmplifiedElement(np.kron(np.eye(2), x), self.n)


@dataclass(frozen=True, eq=False)
class AmplifiedElement:
    """A ``2n x 2n`` matrix read as a 2 x 2 block matrix over ``M_n``."""

    matrix: np.ndarray
    n: int

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.n
        return self.matrix[i * n : (i + 1) * n, j * n : (j + 1) * n]

    @classmethod
    def from_blocks(cls, blocks) -> "AmplifiedElement":
        m = np.block([[np.asarray(blocks[0][0]), np.asarray(blocks[0][1])], [np.asarray(blocks[1][0]), np.asarray(blocks[1][1])]])
        return cls(m, m.shape[0] // 2)


def is_projection_matrix(p: np.ndarray, tol: float = TOL_ALG) -> bool:
    return np.allclose(p, p.conj().T, atol=tol) and np.allclose(p @ p, p, atol=tol)


@dataclass(frozen=True, eq=False)
class AbelianFrame:
    """Pairwise orthogonal self-adjoint projections of ``M_n(C)``."""

    projections: tuple

    def __post_init__(self):
        ps = tuple(np.asarray(p, dtype=complex) for p in self.projections)
        for i, p in enumerate(ps):
            if not is_projection_matrix(p):
                raise ValueError(f"frame member {i} is not a self-adjoint projection")
            if np.allclose(p, 0.0, atol=TOL_ALG):
                raise ValueError(f"frame member {i} is zero")
        for (i, p), (j, q) in combinations(enumerate(ps), 2):
            if not np.allclose(p @ q, 0.0, atol=TOL_ALG):
                raise ValueError(f"frame members {i} and {j} are not orthogonal")
        object.__setattr__(self, "projections", ps)

    def __len__(self):
        return len(self.projections)

    @property
    def is_unital(self) -> bool:
        if not self.projections:
            return False
        total = sum(self.projections)
        return np.allclose(total, np.eye(total.shape[0]), atol=TOL_ALG)

    def is_abelian(self, tol: float = TOL_ALG) -> bool:
        ps = self.projections
        return all(np.allclose(p @ q, q @ p, atol=tol) for p in ps for q in ps)


def tensor_abelian(C: AbelianFrame, D: AbelianFrame) -> AbelianFrame:
    """Frame ``{p (x) q}`` of the tensor product of two abelian subalgebras."""
    return AbelianFrame(tuple(np.kron(p, q) for p in C.projections for q in D.projections))


# ---------------------------------------------------------------------------
# superoperators
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexMap:
    """Complex-linear map on ``M_n(C)`` as an ``n^2 x n^2`` matrix on row-major vec."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.shape != (self.n * self.n, self.n * self.n):
            raise ValueError("superoperator has the wrong shape")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(x, dtype=complex).reshape(-1)).reshape(self.n, self.n)

    @classmethod
    def from_function(cls, n: int, f: Callable[[np.ndarray], np.ndarray]) -> "ComplexMap":
        cols = []
        for k in range(n * n):
            e = np.zeros(n * n, dtype=complex)
            e[k] = 1.0
            cols.append(np.asarray(f(e.reshape(n, n)), dtype=complex).reshape(-1))
        return cls(n, np.column_stack(cols))

    @classmethod
    def identity(cls, n: int) -> "ComplexMap":
        return cls(n, np.eye(n * n))

    def compose(self, other: "ComplexMap") -> "ComplexMap":
        return ComplexMap(self.n, self.matrix @ other.matrix)

    def distance(self, other: "ComplexMap") -> float:
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def choi(self) -> np.ndarray:
        """``sum_ij e_ij (x) rho(e_ij)``."""
        n = self.n
        C = np.zeros((n * n, n * n), dtype=complex)
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1.0
                C[i * n : (i + 1) * n, j * n : (j + 1) * n] = self(e)
        return C


def complexify(L: LinearMap) -> ComplexMap:
    """Extend a real map on the hermitian part of ``M_n(C)`` by ``rho(x + iy) = rho(x) + i rho(y)``."""
    A = L.domain
    if L.codomain != A or len(A.factors) != 1 or not isinstance(A.factors[0], HermFactor) or not A.factors[0].complex:
        raise ValueError("complexify needs a map on a single complex hermitian matrix factor")
    n = A.factors[0].n

    def rho(z):
        x = 0.5 * (z + z.conj().T)
        y = -0.5j * (z - z.conj().T)
        rx = L(A.element(x)).blocks[0]
        ry = L(A.element(y)).blocks[0]
        return rx + 1j * ry

    return ComplexMap.from_function(n, rho)


def _as_complex(rho) -> ComplexMap:
    return rho if isinstance(rho, ComplexMap) else complexify(rho)


def amplify(rho) -> ComplexMap:
    """``id (x) rho`` on ``M_2(M_n)``: apply ``rho`` to each of the four blocks."""
    rho = _as_complex(rho)
    n = rho.n

    def f(X):
        out = np.empty_like(X)
        for a in range(2):
            for b in range(2):
                out[a * n : (a + 1) * n, b * n : (b + 1) * n] = rho(X[a * n : (a + 1) * n, b * n : (b + 1) * n])
        return out

    return ComplexMap.from_function(2 * n, f)


def maximally_entangled_projection(n: int) -> np.ndarray:
    """``(1/2) sum_{i,j<2} e_ij (x) e_ij`` inside ``M_2 (x) M_n``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    X = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(2):
        for j in range(2):
            X[i * n + i, j * n + j] = 0.5
    return X


def _min_eig(X: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (X + X.conj().T))[0])


@dataclass
class PositivityReport:
    two_positive: bool
    witness_min_eigenvalue: float
    witness_eigenvalues: list
    random_min_eigenvalue: float
    violations: int
    trials: int
    choi_min_eigenvalue: float
    choi_positive: bool
    consistent: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def two_positivity_test(rho: LinearMap, trials: int = 100, rng: Optional[np.random.Generator] = None, tol: float = TOL_ALG) -> PositivityReport:
    """Look for a positive ``X`` in ``M_2(M_n)`` with ``(id (x) rho)(X)`` not positive.

    Tries the maximally entangled projection and ``trials`` random positive
    matrices (alternately rank one and full rank). As a deterministic
    cross-check the Choi matrix of ``rho`` is tested as well; for unital
    Jordan maps both verdicts must agree.
    """
    if not (rho.has("jordan") and rho.has("unital")):
        raise NotJordanMapError("two_positivity_test needs a map flagged Jordan and unital")
    rng = rng if rng is not None else np.random.default_rng(0)
    cm = complexify(rho)
    Psi = amplify(cm)
    n = cm.n
    W = Psi(maximally_entangled_projection(n))
    wvals = np.linalg.eigvalsh(0.5 * (W + W.conj().T))
    wmin = float(wvals[0])
    violations = int(wmin < -tol)
    rmin = np.inf
    for t in range(trials):
        G = rng.standard_normal((2 * n, 2 * n if t % 2 else 1)) + 1j * rng.standard_normal((2 * n, 2 * n if t % 2 else 1))
        X = G @ G.conj().T
        X /= np.linalg.norm(X, 2)
        m = _min_eig(Psi(X))
        rmin = min(rmin, m)
        violations += int(m < -tol)
    choi_min = _min_eig(cm.choi())
    choi_pos = choi_min >= -tol * n
    two_pos = violations == 0
    return PositivityReport(
        two_positive=two_pos,
        witness_min_eigenvalue=wmin,
        witness_eigenvalues=[float(v) for v in wvals],
        random_min_eigenvalue=float(rmin),
        violations=violations,
        trials=trials,
        choi_min_eigenvalue=choi_min,
        choi_positive=bool(choi_pos),
        consistent=bool(choi_pos == two_pos),
    )


def _random_projection_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    U = random_unitary(n, rng)
    r = int(rng.integers(1, n + 1))
    V = U[:, :r]
    return V @ V.conj().T


def _factor_right(Y: np.ndarray, p: np.ndarray, n: int):
    """If ``Y = p (x) z`` return z, from the block with the largest entry of p."""
    a, b = np.unravel_index(np.argmax(np.abs(p)), p.shape)
    z = Y[a * n : (a + 1) * n, b * n : (b + 1) * n] / p[a, b]
    return z, float(np.max(np.abs(Y - np.kron(p, z))))


@dataclass
class AmplificationReport:
    verdict: str
    tensor_form_max_residual: float
    pairs_checked: int
    amplified_form_residual: float
    recovered_vs_jordan_residual: float
    positivity: Optional[PositivityReport] = None

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "positivity"}
        out["positivity"] = self.positivity.to_json() if self.positivity else None
        return out


def amplification_audit(
    psi: LinearMap,
    Psi: ComplexMap,
    samples: int = 20,
    rng: Optional[np.random.Generator] = None,
    trials: int = 100,
    tol: float = 1e-8,
) -> AmplificationReport:
    """Audit a candidate amplification ``Psi`` of the Jordan isomorphism ``psi``.

    1. ``Psi(p (x) q) = p (x) q'`` with ``q'`` a projection, on sampled pairs;
    2. ``Psi = id (x) rho`` where ``rho`` is read off the (0, 0) block;
    3. ``rho = psi``;
    4. ``psi`` is 2-positive.

    Verdict ``"*-isomorphism"`` if all pass, ``"rejected"`` otherwise. A
    failure of step 1 raises :class:`AmplificationFormError` naming the pair.
    """
    if not psi.has("jordan"):
        raise NotJordanMapError("amplification_audit needs a map flagged Jordan")
    rng = rng if rng is not None else np.random.default_rng(0)
    n = Psi.n // 2
    if 2 * n != Psi.n:
        raise ValueError("candidate does not act on a 2 x 2 amplification")
    e = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex), np.eye(2, dtype=complex)]
    left = e + [_random_projection_matrix(2, rng) for _ in range(3)]
    worst = 0.0
    checked = 0
    for k in range(samples):
        p = left[k % len(left)]
        q = _random_projection_matrix(n, rng)
        Y = Psi(np.kron(p, q))
        z, res = _factor_right(Y, p, n)
        proj_res = float(np.max(np.abs(z @ z - z)) + np.max(np.abs(z - z.conj().T)))
        worst = max(worst, res, proj_res)
        checked += 1
        if res > tol or proj_res > tol:
            raise AmplificationFormError(f"Psi(p (x) q) is not of the form p (x) q' (residual {max(res, proj_res):.3g})", (p, q))

    e00 = np.zeros((2, 2), dtype=complex)
    e00[0, 0] = 1.0
    rho = ComplexMap.from_function(n, lambda y: Psi(np.kron(e00, y))[:n, :n])
    form_res = amplify(rho).distance(Psi)
    jordan_res = rho.distance(complexify(psi))
    report = AmplificationReport("rejected", worst, checked, form_res, jordan_res)
    if form_res > tol or jordan_res > tol:
        return report
    A = psi.domain
    if np.max(np.abs(psi(A.unit()).coords - A.unit().coords)) > tol:
        return report
    flagged = psi.with_flags("unital")
    pos = two_positivity_test(flagged, trials=trials, rng=rng)
    report.positivity = pos
    if pos.two_positive and pos.consistent:
        report.verdict = "*-isomorphism"
    return report
