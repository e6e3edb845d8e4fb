"""Finite-dimensional Jordan algebras as direct sums of simple factors.

An algebra is described by a tuple of factors. Three kinds are supported:

* ``HermFactor(n, field)``: n x n real-symmetric or complex-hermitian matrices
  with ``a o b = (ab + ba) / 2``.
* ``SpinFactor(n)``: ``V_n = H_n (+) R`` with
  ``(v + l1) o (w + m1) = (m v + l w) + (<v, w> + l m) 1``.
* ``RealFactor()``: the real line.

Elements store one block per factor. Every algebra also carries a fixed ordered
orthonormal real basis, and all linear maps are matrices in that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

TOL_SYM = 1e-9
TOL_IDEM = 1e-9
TOL_ALG = 1e-9
TOL_COMMUTE = 1e-8
CLUSTER_GAP = 1e-8

_SQRT2 = np.sqrt(2.0)


class DescriptorError(ValueError):
    """Malformed algebra descriptor."""


class UnsupportedFactorError(DescriptorError):
    """Factor kind that is recognised but deliberately not implemented."""


class AlgebraMismatchError(ValueError):
    """Operands live in different algebras."""


# ---------------------------------------------------------------------------
# factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermFactor:
    n: int
    field: str = "real"

    def __post_init__(self):
        if self.n < 2:
            raise DescriptorError("HermFactor needs n >= 2; use RealFactor for n = 1")
        if self.field not in ("real", "complex"):
            raise DescriptorError(f"unknown scalar field {self.field!r}")

    @property
    def complex(self) -> bool:
        return self.field == "complex"

    @property
    def dim(self) -> int:
        return self.n * self.n if self.complex else self.n * (self.n + 1) // 2

    @property
    def dtype(self):
        return complex if self.complex else float

    def zero(self) -> np.ndarray:
        return np.zeros((self.n, self.n), dtype=self.dtype)

    def unit(self) -> np.ndarray:
        return np.eye(self.n, dtype=self.dtype)

    def product(self, a, b):
        # (ab)* = ba for hermitian a, b
        ab = a @ b
        return 0.5 * (ab + ab.conj().T)

    def to_coords(self, a) -> np.ndarray:
        iu = _upper_indices(self.n)
        parts = [np.real(np.diag(a)), _SQRT2 * np.real(a[iu])]
        if self.complex:
            parts.append(_SQRT2 * np.imag(a[iu]))
        return np.concatenate(parts)

    def from_coords(self, c) -> np.ndarray:
        n = self.n
        m = n * (n - 1) // 2
        iu = _upper_indices(n)
        a = np.zeros((n, n), dtype=self.dtype)
        a[np.diag_indices(n)] = c[:n]
        upper = c[n : n + m] / _SQRT2
        if self.complex:
            upper = upper + 1j * c[n + m :] / _SQRT2
        a[iu] = upper
        a[iu[1], iu[0]] = np.conj(upper)
        return a

    def eig(self, a):
        w, v = np.linalg.eigh(a)
        return [(float(w[i]), np.outer(v[:, i], v[:, i].conj())) for i in range(self.n)]

    def norm(self, a) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(a)))) if a.any() else 0.0

    spectral_norm = norm

    def trace(self, a) -> float:
        return float(np.real(np.trace(a)))

    def asymmetry(self, a) -> float:
        return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0

    def check_block(self, a) -> np.ndarray:
        a = np.asarray(a)
        if a.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} block, got shape {a.shape}")
        if not self.complex and np.iscomplexobj(a):
            if np.max(np.abs(a.imag)) > TOL_SYM:
                raise ValueError("complex entries in a real-symmetric block")
            a = a.real
        return a.astype(self.dtype)

    def transpose(self, a):
        return a.T.copy()

    def to_json(self) -> dict:
        return {"kind": "herm", "n": self.n, "field": self.field}

    def __str__(self):
        return f"Herm{self.n}({'C' if self.complex else 'R'})"


@dataclass(frozen=True)
class SpinFactor:
    """Spin factor on R^n; a block is the vector ``[lambda, v_1, ..., v_n]``."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DescriptorError("SpinFactor needs n >= 2")

    @property
    def dim(self) -> int:
        return self.n + 1

    dtype = float

    def zero(self):
        return np.zeros(self.n + 1)

    def unit(self):
        u = np.zeros(self.n + 1)
        u[0] = 1.0
        return u

    def product(self, a, b):
        out = np.empty(self.n + 1)
        out[0] = a[0] * b[0] + a[1:] @ b[1:]
        out[1:] = b[0] * a[1:] + a[0] * b[1:]
        return out

    def to_coords(self, a):
        return np.asarray(a, dtype=float).copy()

    def from_coords(self, c):
        return np.asarray(c, dtype=float).copy()

    def eig(self, a):
        lam, v = a[0], a[1:]
        r = float(np.linalg.norm(v))
        if r == 0.0:
            return [(float(lam), self.unit())]
        vhat = v / r
        up = np.concatenate([[0.5], 0.5 * vhat])
        down = np.concatenate([[0.5], -0.5 * vhat])
        return [(float(lam + r), up), (float(lam - r), down)]

    def norm(self, a) -> float:
        # |lambda| + ||v||, which is also max |lambda +- ||v|||
        return float(abs(a[0]) + np.linalg.norm(a[1:]))

    def spectral_norm(self, a) -> float:
        r = float(np.linalg.norm(a[1:]))
        return max(abs(a[0] + r), abs(a[0] - r))

    def trace(self, a) -> float:
        return float(2.0 * a[0])

    def asymmetry(self, a) -> float:
        return 0.0

    def check_block(self, a):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.n + 1,):
            raise ValueError(f"expected a spin block of length {self.n + 1}")
        return a

    def transpose(self, a):
        return a.copy()

    def to_json(self) -> dict:
        return {"kind": "spin", "n": self.n}

    def __str__(self):
        return f"Spin{self.n}"


@dataclass(frozen=True)
class RealFactor:
    dim = 1
    dtype = float

    def zero(self):
        return np.zeros(())

    def unit(self):
        return np.ones(())

    def product(self, a, b):
        return np.asarray(a * b)

    def to_coords(self, a):
        return np.array([float(a)])

    def from_coords(self, c):
        return np.asarray(float(c[0]))

    def eig(self, a):
        return [(float(a), np.ones(()))]

    def norm(self, a) -> float:
        return float(abs(a))

    spectral_norm = norm

    def trace(self, a) -> float:
        return float(a)

    def asymmetry(self, a) -> float:
        return 0.0

    def check_block(self, a):
        a = np.asarray(a, dtype=float)
        if a.size != 1:
            raise ValueError("expected a scalar block for a real factor")
        return a.reshape(())

    def transpose(self, a):
        return a.copy()

    def to_json(self) -> dict:
        return {"kind": "real"}

    def __str__(self):
        return "R"


Factor = Union[HermFactor, SpinFactor, RealFactor]

_UNSUPPORTED_KINDS = {"quaternion", "quaternionic", "albert", "exceptional", "octonion"}


@lru_cache(maxsize=None)
def _upper_indices(n: int):
    return np.triu_indices(n, 1)


@lru_cache(maxsize=64)
def _basis(A: "AlgebraDescriptor") -> tuple:
    return tuple(A.from_coords(row) for row in np.eye(A.dim))


def parse_factor(spec: dict) -> Factor:
    kind = spec.get("kind")
    if kind in _UNSUPPORTED_KINDS or spec.get("field") in ("quaternion", "quaternionic"):
        raise UnsupportedFactorError(f"factor kind {kind!r} is not supported")
    if kind == "herm":
        n = int(spec["n"])
        if n == 1:
            return RealFactor()
        return HermFactor(n, spec.get("field", "real"))
    if kind == "spin":
        return SpinFactor(int(spec["n"]))
    if kind == "real":
        return RealFactor()
    raise DescriptorError(f"unknown factor kind {kind!r}")


# ---------------------------------------------------------------------------
# descriptor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraDescriptor:
    """A formal direct sum of simple factors."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise DescriptorError("an algebra needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    # construction helpers -------------------------------------------------
    @classmethod
    def herm(cls, n: int, field: str = "real") -> "AlgebraDescriptor":
        return cls((RealFactor(),) if n == 1 else (HermFactor(n, field),))

    @classmethod
    def spin(cls, n: int) -> "AlgebraDescriptor":
        return cls((SpinFactor(n),))

    @classmethod
    def real(cls, copies: int = 1) -> "AlgebraDescriptor":
        return cls(tuple(RealFactor() for _ in range(copies)))

    def __add__(self, other: "AlgebraDescriptor") -> "AlgebraDescriptor":
        return AlgebraDescriptor(self.factors + other.factors)

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraDescriptor":
        if "factors" not in data:
            raise DescriptorError("descriptor JSON needs a 'factors' list")
        return cls(tuple(parse_factor(f) for f in data["factors"]))

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}

    def __str__(self):
        return "+".join(str(f) for f in self.factors)

    # structure -------------------------------------------------------------
    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([f.dim for f in self.factors])])

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    def __len__(self):
        return len(self.factors)

    def zero(self) -> "Element":
        return Element(self, tuple(f.zero() for f in self.factors))

    def unit(self) -> "Projection":
        return Projection(self, tuple(f.unit() for f in self.factors))

    def factor_unit(self, i: int) -> "Projection":
        blocks = tuple(f.unit() if j == i else f.zero() for j, f in enumerate(self.factors))
        return Projection(self, blocks)

    def from_coords(self, c) -> "Element":
        c = np.asarray(c, dtype=float)
        if c.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coordinates, got shape {c.shape}")
        o = self.offsets
        return Element(self, tuple(f.from_coords(c[o[i] : o[i + 1]]) for i, f in enumerate(self.factors)))

    def basis(self) -> list:
        return list(_basis(self))

    def element(self, *blocks) -> "Element":
        """Build an element from per-factor blocks, validating symmetry."""
        if len(blocks) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} blocks, got {len(blocks)}")
        checked = []
        for f, b in zip(self.factors, blocks):
            b = f.check_block(b)
            if f.asymmetry(b) > TOL_SYM * max(1.0, float(np.max(np.abs(b), initial=0.0))):
                raise ValueError("matrix block is not (conjugate) symmetric")
            checked.append(b)
        return Element(self, tuple(checked))

    def spin_element(self, lam: float, v: Sequence[float]) -> "Element":
        """Element ``lam 1 + v`` of a single-spin-factor algebra."""
        if len(self.factors) != 1 or not isinstance(self.factors[0], SpinFactor):
            raise ValueError("spin_element needs a single spin factor algebra")
        return self.element(np.concatenate([[lam], np.asarray(v, dtype=float)]))

    @property
    def is_associative(self) -> bool:
        return all(isinstance(f, RealFactor) for f in self.factors)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Element:
    algebra: AlgebraDescriptor
    blocks: tuple

    def __post_init__(self):
        blocks = []
        for b in self.blocks:
            b = np.array(b, copy=True)
            b.setflags(write=False)
            blocks.append(b)
        object.__setattr__(self, "blocks", tuple(blocks))

    @cached_property
    def coords(self) -> np.ndarray:
        c = np.concatenate([f.to_coords(b) for f, b in zip(self.algebra.factors, self.blocks)])
        c.setflags(write=False)
        return c

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatchError("elements belong to different algebras")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return Element(self.algebra, tuple(-b for b in self.blocks))

    def __mul__(self, s):
        if not np.isscalar(s):
            return NotImplemented
        return Element(self.algebra, tuple(float(s) * b for b in self.blocks))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def norm(self) -> float:
        return max(f.norm(b) for f, b in zip(self.algebra.factors, self.blocks))

    def spectral_norm(self) -> float:
        return max(f.spectral_norm(b) for f, b in zip(self.algebra.factors, self.blocks))

    def trace(self) -> float:
        return sum(f.trace(b) for f, b in zip(self.algebra.factors, self.blocks))

    def is_zero(self, tol: float = TOL_ALG) -> bool:
        return float(np.max(np.abs(self.coords), initial=0.0)) <= tol

    def close_to(self, other: "Element", tol: float = TOL_ALG) -> bool:
        return distance(self, other) <= tol

    def __repr__(self):
        return f"Element({np.array2string(self.coords, precision=4)})"


@dataclass(frozen=True, eq=False)
class Projection(Element):
    """An idempotent element. Construct via :func:`as_projection` to validate."""

    @cached_property
    def ranks(self) -> tuple:
        out = []
        for f, b in zip(self.algebra.factors, self.blocks):
            t = f.trace(b)
            out.append(int(round(t)))
        return tuple(out)

    def complement(self) -> "Projection":
        return Projection(self.algebra, tuple(u - b for u, b in zip(self.algebra.unit().blocks, self.blocks)))


def distance(a: Element, b: Element) -> float:
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("elements belong to different algebras")
    return float(np.max(np.abs(a.coords - b.coords), initial=0.0))


def as_projection(x: Element, tol: float = TOL_IDEM) -> Projection:
    """Return ``x`` as a :class:`Projection`, raising if it is not idempotent."""
    if isinstance(x, Projection):
        return x
    if distance(jordan_product(x, x), x) > tol * max(1.0, x.norm()):
        raise ValueError("element is not a projection")
    return Projection(x.algebra, x.blocks)


def is_projection(x: Element, tol: float = TOL_IDEM) -> bool:
    return distance(jordan_product(x, x), x) <= tol * max(1.0, x.norm())


# ---------------------------------------------------------------------------
# Jordan operations
# ---------------------------------------------------------------------------


def jordan_product(a: Element, b: Element) -> Element:
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("jordan_product operands belong to different algebras")
    return Element(a.algebra, tuple(f.product(x, y) for f, x, y in zip(a.algebra.factors, a.blocks, b.blocks)))


def square(a: Element) -> Element:
    return jordan_product(a, a)


def T_matrix(a: Element) -> np.ndarray:
    """Matrix of ``b -> a o b`` in the coordinate basis of ``a.algebra``."""
    A = a.algebra
    cols = [jordan_product(a, e).coords for e in A.basis()]
    return np.column_stack(cols)


def T_map(a: Element):
    from .linmap import LinearMap

    return LinearMap(a.algebra, a.algebra, T_matrix(a))


def U_map(a: Element, b: Element) -> Element:
    """Quadratic representation ``U_a(b) = 2 a o (a o b) - a^2 o b``."""
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("U_map operands belong to different algebras")
    return 2.0 * jordan_product(a, jordan_product(a, b)) - jordan_product(square(a), b)


def U_matrix(a: Element) -> np.ndarray:
    return np.column_stack([U_map(a, e).coords for e in a.algebra.basis()])


def commutator_norm(a: Element, b: Element) -> float:
    Ta, Tb = T_matrix(a), T_matrix(b)
    return float(np.linalg.norm(Ta @ Tb - Tb @ Ta, 2))


def operator_commute(a: Element, b: Element, tol: float = TOL_COMMUTE) -> bool:
    """True iff ``T_a T_b = T_b T_a`` up to a tolerance relative to ``|a| |b|``."""
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("operator_commute operands belong to different algebras")
    scale = max(1.0, a.norm() * b.norm())
    return commutator_norm(a, b) <= tol * scale


def center(A: AlgebraDescriptor) -> list:
    """Minimal central projections: one factor unit per simple summand."""
    return [A.factor_unit(i) for i in range(len(A.factors))]


def central_cover(p: Element, tol: float = TOL_IDEM) -> Projection:
    A = p.algebra
    blocks = []
    for f, b in zip(A.factors, p.blocks):
        nonzero = float(np.max(np.abs(b), initial=0.0)) > tol
        blocks.append(f.unit() if nonzero else f.zero())
    return Projection(A, tuple(blocks))


def numerical_rank(m: np.ndarray, tol: float = TOL_ALG) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0]) * max(m.shape)))


def u_compression_dim(A: AlgebraDescriptor, p: Element) -> int:
    """Real dimension of ``U_p(A)``."""
    if p.algebra != A:
        raise AlgebraMismatchError("projection does not belong to the algebra")
    return numerical_rank(U_matrix(p))


def is_positive(x: Element, tol: float = TOL_ALG) -> bool:
    from .spectral import min_eigenvalue

    return min_eigenvalue(x) >= -tol * max(1.0, x.norm())


def blocks_equal(a: Element, b: Element) -> bool:
    """Bit-exact equality of the stored blocks."""
    return a.algebra == b.algebra and all(
        x.dtype == y.dtype and x.shape == y.shape and np.array_equal(x, y) for x, y in zip(a.blocks, b.blocks)
    )


def sum_elements(items: Iterable[Element], algebra: AlgebraDescriptor) -> Element:
    total = algebra.zero()
    for x in items:
        total = total + x
    return total
