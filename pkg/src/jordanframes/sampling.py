"""Seeded random elements, projections, frames and Jordan automorphisms."""
from __future__ import annotations

import zlib

import numpy as np
from scipy.stats import ortho_group, unitary_group

from .algebra import (
    AlgebraDescriptor,
    Element,
    HermFactor,
    Projection,
    RealFactor,
    SpinFactor,
)
from .linmap import LinearMap, blockwise_map


def check_rng(seed: int, check_id: str) -> np.random.Generator:
    """Per-check generator derived from one master seed and the check name.

    The stream depends only on ``(seed, check_id)``, so any check can be
    rerun in isolation.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(check_id.encode()),))
    return np.random.default_rng(ss)


def random_unitary(n: int, rng: np.random.Generator, field: str = "complex") -> np.ndarray:
    if field == "complex":
        return unitary_group.rvs(n, random_state=rng)
    return ortho_group.rvs(n, random_state=rng)


def _random_block(f, rng):
    if isinstance(f, HermFactor):
        g = rng.standard_normal((f.n, f.n))
        if f.complex:
            g = g + 1j * rng.standard_normal((f.n, f.n))
        return 0.5 * (g + g.conj().T)
    if isinstance(f, SpinFactor):
        return rng.standard_normal(f.n + 1)
    return np.asarray(rng.standard_normal())


def random_element(A: AlgebraDescriptor, rng: np.random.Generator) -> Element:
    return Element(A, tuple(_random_block(f, rng) for f in A.factors))


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def minimal_projections(A: AlgebraDescriptor, rng: np.random.Generator) -> list:
    """A random maximal family of orthogonal minimal projections (a Jordan frame)."""
    out = []
    for i, f in enumerate(A.factors):
        def embed(block, i=i):
            blocks = tuple(block if j == i else g.zero() for j, g in enumerate(A.factors))
            return Projection(A, blocks)

        if isinstance(f, HermFactor):
            U = random_unitary(f.n, rng, f.field)
            for k in range(f.n):
                out.append(embed(np.outer(U[:, k], U[:, k].conj())))
        elif isinstance(f, SpinFactor):
            xi = random_unit_vector(f.n, rng)
            out.append(embed(np.concatenate([[0.5], 0.5 * xi])))
            out.append(embed(np.concatenate([[0.5], -0.5 * xi])))
        else:
            out.append(embed(f.unit()))
    return out


def random_frame(A: AlgebraDescriptor, rng: np.random.Generator, unital: bool = False, size: int | None = None):
    """Random frame built by grouping a random Jordan frame.

    Minimal projections are assigned to random groups; group sums become the
    frame. Non-unital frames also drop a random group.
    """
    from .frames import Frame, UnitalFrame

    mins = minimal_projections(A, rng)
    r = len(mins)
    k = size if size is not None else int(rng.integers(1, r + 1))
    k = min(k, r)
    labels = np.concatenate([np.arange(k), rng.integers(0, k, r - k)])
    rng.shuffle(labels)
    groups = [A.zero() for _ in range(k)]
    for lab, p in zip(labels, mins):
        groups[lab] = groups[lab] + p
    if not unital and size is None and k > 1 and rng.random() < 0.5:
        groups = groups[: k - 1]
    cls = UnitalFrame if unital else Frame
    return cls.of(A, groups)


def random_projection(A: AlgebraDescriptor, rng: np.random.Generator) -> Projection:
    """Sum of a random subset of a random Jordan frame (may be 0 or 1)."""
    mins = minimal_projections(A, rng)
    p = A.zero()
    for m in mins:
        if rng.random() < 0.5:
            p = p + m
    return Projection(A, p.blocks)


def random_positive(A: AlgebraDescriptor, rng: np.random.Generator) -> Element:
    x = random_element(A, rng)
    from .algebra import square

    return square(x)


def random_unit_interval(A: AlgebraDescriptor, rng: np.random.Generator) -> Element:
    """Random element with spectrum in [0, 1]."""
    mins = minimal_projections(A, rng)
    x = A.zero()
    for m in mins:
        x = x + float(rng.random()) * m
    return x


def random_jordan_automorphism(A: AlgebraDescriptor, rng: np.random.Generator, transpose: bool | None = None) -> LinearMap:
    """Random automorphism: unitary/orthogonal conjugation per matrix factor,
    optionally composed with transpose, and a random rotation of every spin factor."""
    maps = {}
    for i, f in enumerate(A.factors):
        if isinstance(f, HermFactor):
            U = random_unitary(f.n, rng, f.field)
            t = bool(rng.integers(2)) if transpose is None else transpose
            if t:
                maps[i] = lambda b, U=U: U @ b.T @ U.conj().T
            else:
                maps[i] = lambda b, U=U: U @ b @ U.conj().T
        elif isinstance(f, SpinFactor):
            O = ortho_group.rvs(f.n, random_state=rng) if f.n > 1 else np.eye(1)

            def rot(b, O=O):
                out = np.empty_like(b)
                out[0] = b[0]
                out[1:] = O @ b[1:]
                return out

            maps[i] = rot
    return blockwise_map(A, maps)
