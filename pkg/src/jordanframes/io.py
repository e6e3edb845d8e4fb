"""JSON encoding of descriptors, elements, frames, fragments, oracles and maps.

Matrices are row-major nested lists; complex entries are ``[re, im]`` pairs;
spin blocks are ``{"lambda": x, "v": [...]}``; real-line blocks are numbers.
Python floats round-trip through JSON exactly, so encoding and decoding an
element reproduces its blocks bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import (
    AlgebraDescriptor,
    Element,
    HermFactor,
    Projection,
    SpinFactor,
)
from .frames import Frame, UnitalFrame
from .linmap import LinearMap
from .reconstruction import IsoOracle, PosetFragment
from .spectral import SpectralDecomposition


class SchemaError(ValueError):
    pass


def _block_to_json(f, b):
    if isinstance(f, HermFactor):
        if f.complex:
            return [[[float(z.real), float(z.imag)] for z in row] for row in b]
        return [[float(v) for v in row] for row in b]
    if isinstance(f, SpinFactor):
        return {"lambda": float(b[0]), "v": [float(v) for v in b[1:]]}
    return float(b)


def _block_from_json(f, data):
    if isinstance(f, HermFactor):
        arr = np.array(data, dtype=float)
        if f.complex:
            if arr.shape != (f.n, f.n, 2):
                raise SchemaError("complex matrix block needs [re, im] entries")
            return arr[..., 0] + 1j * arr[..., 1]
        return arr
    if isinstance(f, SpinFactor):
        if not isinstance(data, dict) or "lambda" not in data or "v" not in data:
            raise SchemaError('spin block needs {"lambda": ..., "v": [...]}')
        return np.concatenate([[float(data["lambda"])], np.asarray(data["v"], dtype=float)])
    return float(data)


def element_to_json(x: Element) -> dict:
    return {"blocks": [_block_to_json(f, b) for f, b in zip(x.algebra.factors, x.blocks)]}


def element_from_json(A: AlgebraDescriptor, data: dict) -> Element:
    blocks = data.get("blocks") if isinstance(data, dict) else None
    if blocks is None or len(blocks) != len(A.factors):
        raise SchemaError(f"element needs {len(A.factors)} blocks")
    return A.element(*[_block_from_json(f, b) for f, b in zip(A.factors, blocks)])


def frame_to_json(F: Frame) -> dict:
    return {"projections": [element_to_json(p) for p in F.projections]}


def frame_from_json(A: AlgebraDescriptor, data: dict) -> Frame:
    return Frame.of(A, [element_from_json(A, p) for p in data["projections"]], tol=1e-7)


def fragment_to_json(frag: PosetFragment) -> dict:
    return {
        "descriptor": frag.algebra.to_json(),
        "variant": frag.variant,
        "frames": [frame_to_json(F) for F in frag.frames],
        "order": [list(p) for p in frag.order],
        "orth": [list(p) for p in frag.orth],
        "spanning": [element_to_json(p) for p in frag.spanning],
    }


def fragment_from_json(data: dict) -> PosetFragment:
    """Decode a fragment and check its relation tables against its frames."""
    A = AlgebraDescriptor.from_json(data["descriptor"])
    frames = tuple(frame_from_json(A, F) for F in data["frames"])
    frag = PosetFragment(
        A,
        frames,
        data.get("variant", "as"),
        tuple(tuple(p) for p in data.get("order", [])),
        tuple(tuple(p) for p in data.get("orth", [])),
        tuple(element_from_json(A, p) for p in data.get("spanning", [])),
    )
    if not frag.check_relations():
        raise SchemaError("fragment relation tables are inconsistent with its frames")
    return frag


def oracle_to_json(oracle: IsoOracle) -> dict:
    return {"descriptor": oracle.codomain.to_json(), "images": [frame_to_json(F) for F in oracle.images]}


def oracle_from_json(data: dict) -> IsoOracle:
    B = AlgebraDescriptor.from_json(data["descriptor"])
    return IsoOracle(B, tuple(frame_from_json(B, F) for F in data["images"]))


def linear_map_to_json(L: LinearMap) -> dict:
    return {
        "domain": L.domain.to_json(),
        "codomain": L.codomain.to_json(),
        "matrix": [[float(v) for v in row] for row in L.matrix],
        "flags": sorted(L.flags),
    }


def linear_map_from_json(data: dict) -> LinearMap:
    A = AlgebraDescriptor.from_json(data["domain"])
    B = AlgebraDescriptor.from_json(data.get("codomain", data["domain"]))
    return LinearMap(A, B, np.array(data["matrix"], dtype=float), frozenset(data.get("flags", [])))


def decomposition_to_json(dec: SpectralDecomposition) -> dict:
    return {
        "eigenvalues": [float(v) for v in dec.eigenvalues],
        "projections": [element_to_json(p) for p in dec.projections],
    }


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def dump_json(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
