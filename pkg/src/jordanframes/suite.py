"""Property-check suite and counterexample demos behind the ``suite`` and ``demo`` commands.

Every check draws its randomness from :func:`check_rng` with its own id, so a
single check can be rerun in isolation and reports are reproducible from
``(seed, config)``. Records are always emitted in check-id order.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    TOL_ALG,
    AlgebraDescriptor,
    DescriptorError,
    HermFactor,
    UnsupportedFactorError,
    blocks_equal,
    distance,
    jordan_product,
    square,
    U_map,
)
from .amplification import (
    amplification_audit,
    amplify,
    complexify,
    maximally_entangled_projection,
    two_positivity_test,
)
from .frames import (
    chain_length,
    classify_two_dim_maximal,
    search_two_dim_maximal,
    span_dimension,
    sum_detect,
)
from .io import element_from_json, element_to_json
from .linmap import transpose_map, unitary_conjugation
from .reconstruction import (
    TOL_RECON,
    HypothesisViolationError,
    check_hypothesis,
    induce_oracle,
    verify_jordan,
    random_fragment,
    reconstruct,
    rr_atom_permutation_counterexample,
    spin_flip_counterexample,
)
from .sampling import (
    check_rng,
    minimal_projections,
    random_element,
    random_frame,
    random_jordan_automorphism,
    random_projection,
    random_unit_interval,
    random_unitary,
)
from .spectral import digits_commute, dyadic_expand, dyadic_sum, min_eigenvalue, spectral_decompose, spectral_projection

PASS, FAIL, XFAIL, SKIP = "pass", "fail", "expected-failure", "skipped"
DEFAULT_TOLERANCES = {"algebra": TOL_ALG, "spectral": TOL_ALG, "poset": TOL_ALG, "reconstruction": TOL_RECON, "amplification": TOL_ALG}


class ConfigError(ValueError):
    pass


@dataclass
class CheckRecord:
    check_id: str
    statement: str
    status: str
    max_residual: float
    runtime_ms: float
    seed: int
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "check_id": self.check_id,
            "statement": self.statement,
            "status": self.status,
            "max_residual": float(self.max_residual),
            "seed": self.seed,
            "details": self.details,
        }
        if timing:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass
class SuiteReport:
    name: str
    config: dict
    records: list
    narrative: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.records)

    def to_json(self, timestamp: bool = True) -> dict:
        out = {
            "suite": self.name,
            "config": self.config,
            "passed": self.passed,
            "checks": [r.to_json(timing=timestamp) for r in self.records],
        }
        if self.narrative:
            out["narrative"] = self.narrative
        if timestamp:
            out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return out


@dataclass
class _Outcome:
    status: str
    residual: float = 0.0
    details: dict = field(default_factory=dict)


def _verdict(ok: bool, residual: float, **details) -> _Outcome:
    return _Outcome(PASS if ok else FAIL, float(residual), details)


# ---------------------------------------------------------------------------
# individual checks; each takes (algebra, rng, samples, tol)
# ---------------------------------------------------------------------------


def check_jordan_identity(A, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x, y = random_element(A, rng), random_element(A, rng)
        x2 = square(x)
        scale = max(1.0, x.spectral_norm() ** 3 * y.spectral_norm())
        lhs = jordan_product(jordan_product(x, y), x2)
        rhs = jordan_product(x, jordan_product(y, x2))
        comm = distance(jordan_product(x, y), jordan_product(y, x))
        worst = max(worst, distance(lhs, rhs) / scale, comm)
    return _verdict(worst <= tol, worst, samples=samples)


def check_norm_axioms(A, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x, y = random_element(A, rng), random_element(A, rng)
        nx, ny = x.spectral_norm(), y.spectral_norm()
        scale = max(1.0, nx * ny, nx * nx, ny * ny)
        submult = max(0.0, jordan_product(x, y).spectral_norm() - nx * ny)
        cstar = abs(square(x).spectral_norm() - nx * nx)
        order = max(0.0, square(x).spectral_norm() - (square(x) + square(y)).spectral_norm())
        worst = max(worst, submult / scale, cstar / scale, order / scale)
    return _verdict(worst <= tol, worst, samples=samples)


def check_u_positivity(A, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        a, b = random_element(A, rng), random_element(A, rng)
        y = U_map(a, square(b))
        scale = max(1.0, a.spectral_norm() ** 2 * b.spectral_norm() ** 2)
        worst = max(worst, max(0.0, -min_eigenvalue(y)) / scale)
    return _verdict(worst <= tol, worst, samples=samples)


def check_json_roundtrip(A, rng, samples, tol):
    bad = 0
    for _ in range(samples):
        x = random_element(A, rng)
        y = element_from_json(A, json.loads(json.dumps(element_to_json(x))))
        bad += int(not blocks_equal(x, y))
    return _verdict(bad == 0, float(bad), mismatches=bad, samples=samples)


def check_spectral_decomposition(A, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x = random_element(A, rng)
        dec = spectral_decompose(x)
        scale = max(1.0, x.spectral_norm())
        res = distance(dec.recompose(), x) / scale
        total = distance(sum(dec.projections, A.zero()), A.unit())
        orth = max(
            (jordan_product(p, q).spectral_norm() for i, p in enumerate(dec.projections) for q in dec.projections[i + 1 :]),
            default=0.0,
        )
        worst = max(worst, res, total, orth)
    return _verdict(worst <= tol, worst, samples=samples)


def check_dyadic(A, rng, samples, tol):
    worst_excess = 0.0
    noncommuting = 0
    for N in (8, 20, 40):
        for _ in range(max(1, samples // 3)):
            x = random_unit_interval(A, rng)
            digits = dyadic_expand(x, N)
            err = (x - dyadic_sum(digits)).spectral_norm()
            worst_excess = max(worst_excess, err - 2.0**-N)
            noncommuting += int(not digits_commute(x, digits))
    ok = worst_excess <= tol and noncommuting == 0
    return _verdict(ok, max(0.0, worst_excess), noncommuting=noncommuting)


def check_dimension_height(A, rng, samples, tol):
    mismatches = 0
    for _ in range(samples):
        F = random_frame(A, rng)
        if not (span_dimension(F) == len(F) == chain_length(F)):
            mismatches += 1
    return _verdict(mismatches == 0, float(mismatches), mismatches=mismatches, samples=samples)


def _orthogonal_pair(A, rng):
    """Random orthogonal nonzero ``p, q`` grouped from a Jordan frame.

    Minimal projections labelled 2 belong to neither and feed the impostors.
    """
    mins = minimal_projections(A, rng)
    labels = np.concatenate([[0, 1], rng.integers(0, 3, len(mins) - 2)])
    rng.shuffle(labels)
    p = sum((m for m, l in zip(mins, labels) if l == 0), A.zero())
    q = sum((m for m, l in zip(mins, labels) if l == 1), A.zero())
    return p, q, mins, labels


def _adversarial_candidates(A, rng, p, q, mins, labels):
    """Projections competing with ``p + q``: the sum itself, other frame sums,
    random projections and projections within about 1e-5 of ``p + q``."""
    s = p + q
    rest = [m for m, l in zip(mins, labels) if l == 2]
    out = [s, A.unit()]
    if rest:
        out += [s + rest[0], p + rest[0], q + rest[-1], rest[0]]
    out += [random_projection(A, rng) for _ in range(2)]
    for eps in (1e-5, 1e-3):
        out.append(spectral_projection(s + random_element(A, rng) * eps, lambda lam: lam > 0.5))
    return out


def check_sum_detect(A, rng, samples, tol):
    if len(minimal_projections(A, rng)) < 2:
        return _Outcome(SKIP, 0.0, {"reason": "algebra has no orthogonal pair of nonzero projections"})
    discrepancies = 0
    tested = 0
    for _ in range(samples):
        p, q, mins, labels = _orthogonal_pair(A, rng)
        s = p + q
        for z in _adversarial_candidates(A, rng, p, q, mins, labels):
            if z.is_zero(tol) or distance(z, p) <= tol or distance(z, q) <= tol:
                continue  # outside the precondition of sum_detect
            truth = distance(z, s) <= tol
            discrepancies += int(sum_detect(p, q, z) != truth)
            tested += 1
    return _verdict(discrepancies == 0, float(discrepancies), discrepancies=discrepancies, candidates=tested)


def check_two_dim_maximal(A, rng, samples, tol):
    predicted = classify_two_dim_maximal(A)
    found = search_two_dim_maximal(A, rng, samples=max(10, samples // 4)) is not None
    # a random search can miss but must never find a frame the classifier rules out
    ok = found == predicted if predicted else not found
    return _verdict(ok, 0.0, classified=predicted, found_by_search=found)


def _reconstruction_check(variant):
    def run(A, rng, samples, tol):
        check_hypothesis(A, variant)  # may raise HypothesisViolationError
        worst = 0.0
        failures = []
        for k in range(max(1, samples // 50)):
            psi = verify_jordan(random_jordan_automorphism(A, rng), rng)
            frag = random_fragment(A, rng, variant)
            res = reconstruct(induce_oracle(psi, frag), frag, variant, rng=rng)
            if not res.ok:
                failures.append(res.failed_stage)
                continue
            worst = max(worst, res.map.distance(psi))
            if not res.certificate.unique:
                failures.append("not unique")
        return _verdict(not failures and worst <= tol, worst, failures=failures)

    return run


def _single_complex_matrix(A):
    return len(A.factors) == 1 and isinstance(A.factors[0], HermFactor) and A.factors[0].complex


def check_two_positivity(A, rng, samples, tol):
    if not _single_complex_matrix(A):
        return _Outcome(SKIP, 0.0, {"reason": "needs a single complex matrix factor"})
    n = A.factors[0].n
    trials = max(4, samples // 10)
    worst = 0.0
    failures = 0
    for _ in range(max(1, samples // 20)):
        U = random_unitary(n, rng)
        phi = unitary_conjugation(A, {0: U}).with_flags("jordan", "unital", "bijective")
        rep = two_positivity_test(phi, trials=trials, rng=rng, tol=tol)
        failures += int(not (rep.two_positive and rep.consistent))
        worst = max(worst, max(0.0, -rep.witness_min_eigenvalue))
    T = transpose_map(A).with_flags("jordan", "unital", "bijective")
    trep = two_positivity_test(T, trials=trials, rng=rng, tol=tol)
    witness_err = abs(trep.witness_min_eigenvalue + 0.5)
    ok = failures == 0 and not trep.two_positive and witness_err <= tol
    return _verdict(
        ok,
        max(worst, witness_err),
        conjugation_failures=failures,
        transpose_witness=trep.witness_min_eigenvalue,
    )


@dataclass(frozen=True)
class _Check:
    statement: str
    run: Callable
    area: str


CHECKS = {
    "algebra.jordan_identity": _Check("Jordan identity and commutativity of the product", check_jordan_identity, "algebra"),
    "algebra.norm_axioms": _Check("JB norm axioms: submultiplicative, square-isometric, monotone on squares", check_norm_axioms, "algebra"),
    "algebra.u_positivity": _Check("quadratic representation maps squares to positive elements", check_u_positivity, "algebra"),
    "algebra.json_roundtrip": _Check("plumbing", check_json_roundtrip, "algebra"),
    "spectral.decomposition": _Check("spectral theorem: orthogonal projections summing to 1 recompose x", check_spectral_decomposition, "spectral"),
    "spectral.dyadic": _Check("dyadic expansion by commuting projections", check_dyadic, "spectral"),
    "poset.dimension_height": _Check("frame size equals span dimension equals chain height", check_dimension_height, "poset"),
    "poset.sum_detect": _Check("orthogonal sums detected from two-dimensional subalgebras", check_sum_detect, "poset"),
    "poset.two_dim_maximal": _Check("two-dimensional maximal associative subalgebras characterise spin and R+R", check_two_dim_maximal, "poset"),
    "reconstruction.as": _Check("Jordan isomorphism recovered from the poset of all associative subalgebras", _reconstruction_check("as"), "reconstruction"),
    "reconstruction.asu": _Check("Jordan isomorphism recovered from the poset of unital associative subalgebras", _reconstruction_check("asu"), "reconstruction"),
    "amplification.two_positivity": _Check("2-positivity separates *-isomorphisms from anti-isomorphisms", check_two_positivity, "amplification"),
}


def _run_one(check_id: str, A, seed: int, samples: int, tolerances: dict) -> CheckRecord:
    chk = CHECKS[check_id]
    tol = tolerances.get(check_id, tolerances.get(chk.area, DEFAULT_TOLERANCES[chk.area]))
    rng = check_rng(seed, check_id)
    t0 = time.perf_counter()
    try:
        out = chk.run(A, rng, samples, tol)
    except HypothesisViolationError as e:
        out = _Outcome(XFAIL, 0.0, {"refused": str(e)})
    except Exception as e:  # a crashing check is a failed check, not a crashed suite
        out = _Outcome(FAIL, float("nan"), {"error": f"{type(e).__name__}: {e}"})
    ms = (time.perf_counter() - t0) * 1e3
    return CheckRecord(check_id, chk.statement, out.status, out.residual, ms, seed, out.details)


def parse_config(config: dict) -> tuple:
    if not isinstance(config, dict) or "descriptor" not in config:
        raise ConfigError("config needs a 'descriptor'")
    try:
        A = AlgebraDescriptor.from_json(config["descriptor"])
    except UnsupportedFactorError:
        raise
    except (DescriptorError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed descriptor: {e}") from e
    checks = config.get("checks") or sorted(CHECKS)
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {unknown}")
    samples = int(config.get("samples", 200))
    if samples < 1:
        raise ConfigError("samples must be positive")
    return A, sorted(set(checks)), int(config.get("seed", 0)), samples, dict(config.get("tolerances", {}))


def run_suite(config: dict, workers: int = 1) -> SuiteReport:
    """Run the selected checks on one algebra.

    ``config`` keys: ``descriptor`` (required), ``seed``, ``samples``,
    ``tolerances`` (by check id or by area name) and ``checks`` (ids; all by
    default). Results do not depend on ``workers``.
    """
    A, checks, seed, samples, tolerances = parse_config(config)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(lambda c: _run_one(c, A, seed, samples, tolerances), checks))
    else:
        records = [_run_one(c, A, seed, samples, tolerances) for c in checks]
    records.sort(key=lambda r: r.check_id)
    normalized = {"descriptor": A.to_json(), "seed": seed, "samples": samples, "tolerances": tolerances, "checks": checks}
    return SuiteReport("suite", normalized, records)


# ---------------------------------------------------------------------------
# demos
# ---------------------------------------------------------------------------

DEMOS = ("spin-flip", "rr-permutation", "transpose")


def _record(check_id, statement, passed, residual, ms, seed, details):
    return CheckRecord(check_id, statement, PASS if passed else FAIL, residual, ms, seed, details)


def _demo_spin_flip(seed):
    t0 = time.perf_counter()
    _, rep = spin_flip_counterexample(3, check_rng(seed, "demo.spin-flip"))
    ms = (time.perf_counter() - t0) * 1e3
    d = rep.details
    narrative = [
        "Spin factor V_3: the flip lambda*1 + v -> lambda*1 - v.",
        f"It is a Jordan automorphism (product deviation {d['jordan_deviation']:.2e}).",
        f"Its operator-norm distance from the identity is {d['distance_from_identity']:.3f}.",
        f"It maps {d['fixed']} of {d['samples']} sampled subalgebras span{{(1+xi)/2, (1-xi)/2}} onto themselves.",
        "So the unital-subalgebra poset cannot tell it apart from the identity, and reconstruction on spin factors is refused.",
    ]
    rec = _record("demo.spin-flip", "non-uniqueness of the implementing map on spin factors", rep.passed, 0.0, ms, seed, {"checks": rep.checks, **d})
    return [rec], narrative


def _demo_rr_permutation(seed):
    t0 = time.perf_counter()
    rep = rr_atom_permutation_counterexample()
    ms = (time.perf_counter() - t0) * 1e3
    narrative = ["R (+) R has three atoms in its associative-subalgebra poset: span(1,0), span(0,1) and span(1,1)."]
    for row in rep.details["permutations"]:
        narrative.append(
            f"atoms -> {row['permutation']}: order {'kept' if row['order_preserving'] else 'broken'}, "
            f"orthogonality {'kept' if row['orthogonality_preserving'] else 'broken'}, "
            f"Jordan-implemented: {'yes' if row['jordan_implemented'] else 'no'}"
        )
    narrative.append("Order alone admits all six permutations; orthogonality pins down the two that Jordan maps realise.")
    rec = _record("demo.rr-permutation", "order without orthogonality does not determine the map", rep.passed, 0.0, ms, seed, {"checks": rep.checks})
    return [rec], narrative


def _demo_transpose(seed):
    rng = check_rng(seed, "demo.transpose")
    A = AlgebraDescriptor.herm(2, "complex")
    records, narrative = [], []
    t0 = time.perf_counter()
    U = random_unitary(2, rng)
    conj = unitary_conjugation(A, {0: U}).with_flags("jordan", "unital", "bijective")
    T = transpose_map(A).with_flags("jordan", "unital", "bijective")
    crep = amplification_audit(conj, amplify(conj), rng=rng)
    trep = amplification_audit(T, amplify(T), rng=rng)
    W = amplify(complexify(T))(maximally_entangled_projection(2))
    wmin = float(np.linalg.eigvalsh(0.5 * (W + W.conj().T))[0])
    ms = (time.perf_counter() - t0) * 1e3
    narrative += [
        "M_2(C): a random unitary conjugation and the transpose are both Jordan automorphisms.",
        f"Amplified conjugation: verdict {crep.verdict}.",
        f"Amplified transpose: verdict {trep.verdict}; on the maximally entangled projection its smallest eigenvalue is {wmin:.12f}.",
        "A negative eigenvalue means the transpose is not 2-positive, so it is a Jordan map that is not a *-isomorphism.",
    ]
    ok = crep.verdict == "*-isomorphism" and trep.verdict == "rejected" and abs(wmin + 0.5) <= TOL_ALG
    records.append(
        _record(
            "demo.transpose",
            "2-positivity separates *-isomorphisms from anti-isomorphisms",
            ok,
            abs(wmin + 0.5),
            ms,
            seed,
            {"conjugation_verdict": crep.verdict, "transpose_verdict": trep.verdict, "witness_min_eigenvalue": wmin},
        )
    )
    return records, narrative


def demo(name: str, seed: int = 0) -> SuiteReport:
    runners = {"spin-flip": _demo_spin_flip, "rr-permutation": _demo_rr_permutation, "transpose": _demo_transpose}
    if name not in runners:
        raise ConfigError(f"unknown demo {name!r}; choose from {DEMOS}")
    records, narrative = runners[name](seed)
    return SuiteReport(f"demo:{name}", {"demo": name, "seed": seed}, records, narrative)
