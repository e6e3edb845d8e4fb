"""Command-line entry point: ``jordanframes <command> ...``.

All output is JSON on stdout. Exit status is 0 when every audit or check
passes (expected failures count as passes), 1 when one fails and 2 for bad
input.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .algebra import AlgebraDescriptor, DescriptorError, UnsupportedFactorError
from .amplification import amplification_audit, amplify
from .frames import (
    classify_two_dim_maximal,
    chain_length,
    is_atom_AS,
    is_atom_ASU,
    is_maximal_assoc,
    search_two_dim_maximal,
)
from .io import (
    SchemaError,
    decomposition_to_json,
    dump_json,
    element_from_json,
    element_to_json,
    fragment_from_json,
    fragment_to_json,
    linear_map_from_json,
    linear_map_to_json,
    load_json,
    oracle_from_json,
    oracle_to_json,
)
from .reconstruction import (
    ReconstructionError,
    induce_oracle,
    random_fragment,
    reconstruct,
    rr_atom_permutation_counterexample,
    spin_flip_counterexample,
    verify_jordan,
    NotJordanError,
)
from .sampling import check_rng, random_jordan_automorphism
from .spectral import dyadic_expand, dyadic_sum, spectral_decompose
from .suite import CHECKS, DEMOS, ConfigError, demo, run_suite


class _Failure(Exception):
    """Carries a report whose audits did not all pass."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--samples", type=int, default=200, help="samples per check (default 200)")
    p.add_argument("--tol", type=float, default=None, help="override the numerical tolerance")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamps and timings for byte-identical output")
    p.set_defaults(pretty=False)
    return p


def _load_element(path):
    """An element file holds ``{"descriptor": ..., "blocks": [...]}``."""
    data = load_json(path)
    if "descriptor" not in data:
        raise SchemaError("element file needs a 'descriptor' next to its 'blocks'")
    A = AlgebraDescriptor.from_json(data["descriptor"])
    return element_from_json(A, data)


def _write(path, obj, args):
    with open(path, "w") as fh:
        fh.write(dump_json(obj, args.pretty) + "\n")


# ---------------------------------------------------------------------------
# command handlers; each returns a JSON-able dict or raises _Failure
# ---------------------------------------------------------------------------


def cmd_spectral(args):
    x = _load_element(args.element)
    dec = spectral_decompose(x) if args.tol is None else spectral_decompose(x, args.tol)
    out = {"descriptor": x.algebra.to_json(), **decomposition_to_json(dec)}
    out["recomposition_residual"] = float(np.max(np.abs(dec.recompose().coords - x.coords)))
    return out


def cmd_dyadic(args):
    x = _load_element(args.element)
    digits = dyadic_expand(x, args.depth)
    err = (x - dyadic_sum(digits)).spectral_norm() if digits else x.spectral_norm()
    return {
        "descriptor": x.algebra.to_json(),
        "depth": args.depth,
        "digits": [element_to_json(p) for p in digits],
        "truncation_error": err,
        "bound": 2.0 ** -args.depth,
    }


def cmd_poset(args):
    action = args.action
    if action == "classify":
        A = AlgebraDescriptor.from_json(load_json(args.descriptor))
        rng = check_rng(args.seed, "poset.classify")
        found = search_two_dim_maximal(A, rng, samples=args.samples)
        return {
            "descriptor": A.to_json(),
            "has_two_dim_maximal": classify_two_dim_maximal(A),
            "search_found": found is not None,
            "witness": [element_to_json(p) for p in found.projections] if found is not None else None,
        }
    if action == "build":
        A = AlgebraDescriptor.from_json(load_json(args.descriptor))
        rng = check_rng(args.seed, "poset.build")
        frag = random_fragment(A, rng, args.variant, n_elements=args.elements)
        out = fragment_to_json(frag)
        if args.oracle_out:
            psi = verify_jordan(random_jordan_automorphism(A, rng), rng)
            _write(args.oracle_out, oracle_to_json(induce_oracle(psi, frag)), args)
            if args.map_out:
                _write(args.map_out, linear_map_to_json(psi), args)
        return out
    frag = fragment_from_json(load_json(args.fragment))
    A = frag.algebra
    if action == "atoms":
        test = is_atom_ASU if frag.variant == "asu" else is_atom_AS
        return {"variant": frag.variant, "atoms": [i for i, F in enumerate(frag.frames) if test(F)]}
    if action == "height":
        return {"heights": [{"frame": i, "size": len(F), "chain_length": chain_length(F)} for i, F in enumerate(frag.frames)]}
    if action == "maximal":
        return {"maximal": [i for i, F in enumerate(frag.frames) if F.is_unital and is_maximal_assoc(A, F)]}
    raise ValueError(f"unknown poset action {action!r}")


def cmd_reconstruct(args):
    frag = fragment_from_json(load_json(args.fragment))
    oracle = oracle_from_json(load_json(args.oracle))
    variant = args.variant or frag.variant
    if variant != frag.variant:
        raise ConfigError(f"fragment was built for variant {frag.variant!r}, not {variant!r}")
    rng = check_rng(args.seed, "reconstruct")
    try:
        res = reconstruct(oracle, frag, variant, rng=rng)
    except ReconstructionError as e:
        raise _Failure({"variant": variant, "ok": False, "failed_stage": e.stage, "error": str(e), "audits": []})
    out = res.to_json()
    if res.ok and args.out:
        _write(args.out, linear_map_to_json(res.map), args)
    if not res.ok:
        raise _Failure(out)
    return out


def cmd_counterexample(args):
    if args.name == "spin-flip":
        _, rep = spin_flip_counterexample(args.n, check_rng(args.seed, "counterexample.spin-flip"), samples=min(args.samples, 50))
    else:
        rep = rr_atom_permutation_counterexample()
    out = rep.to_json()
    if not rep.passed:
        raise _Failure(out)
    return out


def cmd_amplify_test(args):
    L = linear_map_from_json(load_json(args.map))
    A = L.domain
    f = A.factors[0]
    if len(A.factors) != 1 or getattr(f, "n", None) != args.n or not getattr(f, "complex", False):
        raise SchemaError(f"map must act on complex {args.n} x {args.n} hermitian matrices")
    rng = check_rng(args.seed, "amplify-test")
    try:
        L = verify_jordan(L, rng)
    except NotJordanError as e:
        raise _Failure({"verdict": "rejected", "error": str(e)})
    tol = args.tol if args.tol is not None else 1e-8
    rep = amplification_audit(L, amplify(L), samples=min(args.samples, 20), rng=rng, trials=args.trials, tol=tol)
    out = rep.to_json()
    if rep.verdict != "*-isomorphism":
        raise _Failure(out)
    return out


def cmd_suite(args):
    if args.config:
        config = load_json(args.config)
    elif args.descriptor:
        config = {"descriptor": load_json(args.descriptor)}
    else:
        raise ConfigError("suite needs --config or --descriptor")
    config.setdefault("seed", args.seed)
    config.setdefault("samples", args.samples)
    if args.checks:
        config["checks"] = args.checks
    if args.tol is not None:
        config.setdefault("tolerances", {})
        for area in ("algebra", "spectral", "poset", "reconstruction", "amplification"):
            config["tolerances"].setdefault(area, args.tol)
    report = run_suite(config, workers=args.workers)
    out = report.to_json(timestamp=not args.no_timestamp)
    if not report.passed:
        raise _Failure(out)
    return out


def cmd_demo(args):
    report = demo(args.name, seed=args.seed)
    out = report.to_json(timestamp=not args.no_timestamp)
    if not report.passed:
        raise _Failure(out)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="jordanframes", description="Jordan algebra frames, subalgebra posets and isomorphism reconstruction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectral", parents=[common], help="spectral decomposition of an element")
    p.add_argument("element", help="element JSON with its descriptor")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("dyadic", parents=[common], help="dyadic expansion of an element with spectrum in [0, 1]")
    p.add_argument("element")
    p.add_argument("--depth", type=int, default=40)
    p.set_defaults(func=cmd_dyadic)

    p = sub.add_parser("poset", parents=[common], help="subalgebra fragments: build, atoms, height, maximal, classify")
    p.add_argument("action", choices=["build", "atoms", "height", "maximal", "classify"])
    p.add_argument("--descriptor", help="descriptor JSON (build, classify)")
    p.add_argument("--fragment", help="fragment JSON (atoms, height, maximal)")
    p.add_argument("--variant", choices=["asu", "as"], default="as")
    p.add_argument("--elements", type=int, default=4, help="random elements whose spectral frames seed the fragment")
    p.add_argument("--oracle-out", help="build: also write the oracle of a random automorphism here")
    p.add_argument("--map-out", help="build: write that automorphism here")
    p.set_defaults(func=cmd_poset)

    p = sub.add_parser("reconstruct", parents=[common], help="recover a Jordan isomorphism from a fragment oracle")
    p.add_argument("--fragment", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--variant", choices=["asu", "as"])
    p.add_argument("--out", help="write the recovered map here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("counterexample", parents=[common], help="spin-flip or rr-permutation certificate")
    p.add_argument("name", choices=["spin-flip", "rr-permutation"])
    p.add_argument("--n", type=int, default=3)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("amplify-test", parents=[common], help="2-positivity verdict for a Jordan map on M_n(C)")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_amplify_test)

    p = sub.add_parser("suite", parents=[common], help="run the property-check suite")
    p.add_argument("--config", help="config JSON with descriptor, seed, samples, tolerances, checks")
    p.add_argument("--descriptor", help="descriptor JSON (instead of --config)")
    p.add_argument("--checks", nargs="+", choices=sorted(CHECKS), help="subset of checks")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("demo", parents=[common], help="narrated counterexample")
    p.add_argument("name", choices=DEMOS)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code = 0
    try:
        out = args.func(args)
    except _Failure as f:
        out, code = f.payload, 1
    except (ConfigError, SchemaError, DescriptorError, UnsupportedFactorError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if not args.no_timestamp and "timestamp" not in out:
        out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    print(dump_json(out, args.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
