"""Real-linear maps between coordinatized Jordan algebras."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    AlgebraDescriptor,
    AlgebraMismatchError,
    Element,
    HermFactor,
    SpinFactor,
)

FLAGS = ("additive_on_projections", "jordan", "unital", "bijective", "unique", "two_positive")


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix of a real-linear map ``domain -> codomain`` in the coordinate bases.

    ``flags`` records properties that an audit has confirmed. Flags are never
    set by constructors; use :meth:`with_flags` after the audit passes.
    """

    domain: AlgebraDescriptor
    codomain: AlgebraDescriptor
    matrix: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(f"matrix shape {m.shape} does not match {self.codomain.dim}x{self.domain.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        unknown = set(self.flags) - set(FLAGS)
        if unknown:
            raise ValueError(f"unknown flags {sorted(unknown)}")
        object.__setattr__(self, "flags", frozenset(self.flags))

    def __call__(self, x: Element) -> Element:
        if x.algebra != self.domain:
            raise AlgebraMismatchError("element is not in the domain of the map")
        return self.codomain.from_coords(self.matrix @ x.coords)

    def with_flags(self, *names: str) -> "LinearMap":
        return LinearMap(self.domain, self.codomain, self.matrix, self.flags | set(names))

    def has(self, name: str) -> bool:
        return name in self.flags

    def compose(self, other: "LinearMap") -> "LinearMap":
        """``self o other``."""
        if other.codomain != self.domain:
            raise AlgebraMismatchError("cannot compose maps with mismatched algebras")
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    def inverse(self) -> "LinearMap":
        return LinearMap(self.codomain, self.domain, np.linalg.inv(self.matrix))

    def distance(self, other: "LinearMap") -> float:
        """Operator norm of the difference (coordinates are orthonormal)."""
        return float(np.linalg.norm(self.matrix - other.matrix, 2))

    # constructors ----------------------------------------------------------
    @classmethod
    def identity(cls, A: AlgebraDescriptor) -> "LinearMap":
        return cls(A, A, np.eye(A.dim))

    @classmethod
    def from_function(cls, A: AlgebraDescriptor, B: AlgebraDescriptor, f: Callable[[Element], Element]) -> "LinearMap":
        return cls(A, B, np.column_stack([f(e).coords for e in A.basis()]))


def blockwise_map(A: AlgebraDescriptor, block_maps: dict) -> LinearMap:
    """Map acting factor by factor; ``block_maps[i]`` transforms block ``i``.

    Factors without an entry are left unchanged.
    """

    def f(x: Element) -> Element:
        blocks = tuple(block_maps[i](b) if i in block_maps else b for i, b in enumerate(x.blocks))
        return Element(A, blocks)

    return LinearMap.from_function(A, A, f)


def unitary_conjugation(A: AlgebraDescriptor, unitaries: dict) -> LinearMap:
    """``x -> U x U*`` on the matrix factors listed in ``unitaries``."""
    maps = {}
    for i, U in unitaries.items():
        if not isinstance(A.factors[i], HermFactor):
            raise ValueError(f"factor {i} is not a matrix factor")
        U = np.asarray(U)
        maps[i] = lambda b, U=U: U @ b @ U.conj().T
    return blockwise_map(A, maps)


def transpose_map(A: AlgebraDescriptor, factors=None) -> LinearMap:
    """Entrywise transpose on the chosen matrix factors (all by default)."""
    idx = [i for i, f in enumerate(A.factors) if isinstance(f, HermFactor)] if factors is None else list(factors)
    return blockwise_map(A, {i: A.factors[i].transpose for i in idx})


def spin_flip(A: AlgebraDescriptor) -> LinearMap:
    """``lambda 1 + v -> lambda 1 - v`` on every spin factor."""
    idx = [i for i, f in enumerate(A.factors) if isinstance(f, SpinFactor)]
    if not idx:
        raise ValueError("algebra has no spin factor")

    def flip(b):
        out = -b
        out[0] = b[0]
        return out

    return blockwise_map(A, {i: flip for i in idx})
