import json

import numpy as np
import pytest

from jordanframes.algebra import AlgebraDescriptor
from jordanframes.cli import main
from jordanframes.io import (
    SchemaError,
    dump_json,
    element_from_json,
    element_to_json,
    fragment_from_json,
    fragment_to_json,
    linear_map_from_json,
    linear_map_to_json,
    oracle_from_json,
    oracle_to_json,
)
from jordanframes.linmap import transpose_map, unitary_conjugation
from jordanframes.reconstruction import induce_oracle, random_fragment, verify_jordan
from jordanframes.sampling import random_element, random_unitary

H3C = AlgebraDescriptor.herm(3, "complex")
MIXED = AlgebraDescriptor.herm(2, "complex") + AlgebraDescriptor.spin(2) + AlgebraDescriptor.real()


# --- serialization ---------------------------------------------------------------------


def test_element_json_is_exact_through_text():
    x = random_element(MIXED, np.random.default_rng(0))
    back = element_from_json(MIXED, json.loads(dump_json(element_to_json(x))))
    np.testing.assert_array_equal(back.coords, x.coords)


def test_element_json_rejects_wrong_block_count():
    with pytest.raises(SchemaError):
        element_from_json(MIXED, {"blocks": [[[1.0]]]})


@pytest.mark.parametrize("variant", ["as", "asu"])
def test_fragment_and_oracle_round_trip(variant):
    rng = np.random.default_rng(1)
    frag = random_fragment(H3C, rng, variant)
    back = fragment_from_json(json.loads(dump_json(fragment_to_json(frag))))
    assert back.variant == variant
    assert back.frames == frag.frames
    assert back.order == frag.order and back.orth == frag.orth
    psi = verify_jordan(unitary_conjugation(H3C, {0: random_unitary(3, rng)}))
    oracle = induce_oracle(psi, frag)
    back_oracle = oracle_from_json(json.loads(dump_json(oracle_to_json(oracle))))
    assert back_oracle.images == oracle.images


def test_fragment_with_tampered_order_is_rejected():
    frag = random_fragment(H3C, np.random.default_rng(2), "as")
    data = fragment_to_json(frag)
    data["order"] = data["order"][1:] if data["order"] else [[0, 0]]
    with pytest.raises(SchemaError):
        fragment_from_json(data)


def test_linear_map_round_trip():
    L = verify_jordan(transpose_map(H3C))
    back = linear_map_from_json(json.loads(dump_json(linear_map_to_json(L))))
    assert back.distance(L) == 0.0
    assert back.has("jordan")


def test_dump_json_is_canonical():
    assert dump_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert dump_json({"a": 1}, pretty=True) == '{\n  "a": 1\n}'


# --- command line -------------------------------------------------------------------------


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def h3c_file(tmp_path):
    return _write(tmp_path / "h3c.json", H3C.to_json())


def test_cli_spectral(tmp_path, capsys):
    A = AlgebraDescriptor.herm(2)
    path = _write(tmp_path / "x.json", {"descriptor": A.to_json(), "blocks": [[[2.0, 0.0], [0.0, 5.0]]]})
    code, out = _run(capsys, "spectral", path, "--no-timestamp")
    assert code == 0
    assert out["eigenvalues"] == pytest.approx([5.0, 2.0])
    assert out["recomposition_residual"] < 1e-12
    assert "timestamp" not in out


def test_cli_dyadic(tmp_path, capsys):
    A = AlgebraDescriptor.spin(2)
    x = A.spin_element(0.5, [0.25, 0.0])  # spectrum {0.75, 0.25}
    path = _write(tmp_path / "x.json", {"descriptor": A.to_json(), **element_to_json(x)})
    code, out = _run(capsys, "dyadic", path, "--depth", 2, "--no-timestamp")
    assert code == 0
    assert len(out["digits"]) == 2
    assert out["truncation_error"] == pytest.approx(0.0, abs=1e-12)


def test_cli_dyadic_rejects_large_spectrum(tmp_path, capsys):
    A = AlgebraDescriptor.real()
    path = _write(tmp_path / "x.json", {"descriptor": A.to_json(), "blocks": [3.0]})
    assert main(["dyadic", path]) == 2


def test_cli_poset_build_and_reconstruct(tmp_path, capsys, h3c_file):
    frag, oracle, truth, rec = (str(tmp_path / n) for n in ("frag.json", "oracle.json", "psi.json", "rec.json"))
    code, out = _run(capsys, "poset", "build", "--descriptor", h3c_file, "--variant", "as", "--seed", 3, "--oracle-out", oracle, "--map-out", truth, "--no-timestamp")
    assert code == 0
    (tmp_path / "frag.json").write_text(json.dumps(out))

    code, out = _run(capsys, "poset", "height", "--fragment", frag, "--no-timestamp")
    assert code == 0
    assert all(h["size"] == h["chain_length"] for h in out["heights"])
    code, out = _run(capsys, "poset", "atoms", "--fragment", frag, "--no-timestamp")
    assert code == 0 and out["atoms"]
    code, out = _run(capsys, "poset", "maximal", "--fragment", frag, "--no-timestamp")
    assert code == 0

    code, out = _run(capsys, "reconstruct", "--fragment", frag, "--oracle", oracle, "--out", rec, "--no-timestamp")
    assert code == 0 and out["ok"]
    got = linear_map_from_json(json.loads((tmp_path / "rec.json").read_text()))
    want = linear_map_from_json(json.loads((tmp_path / "psi.json").read_text()))
    assert got.distance(want) <= 1e-8


def test_cli_reconstruct_reports_failed_stage(tmp_path, capsys, h3c_file):
    frag, oracle = str(tmp_path / "frag.json"), str(tmp_path / "oracle.json")
    code, out = _run(capsys, "poset", "build", "--descriptor", h3c_file, "--seed", 4, "--oracle-out", oracle, "--no-timestamp")
    (tmp_path / "frag.json").write_text(json.dumps(out))
    data = json.loads((tmp_path / "oracle.json").read_text())
    data["images"][0], data["images"][1] = data["images"][1], data["images"][0]
    (tmp_path / "oracle.json").write_text(json.dumps(data))
    code, out = _run(capsys, "reconstruct", "--fragment", frag, "--oracle", oracle, "--no-timestamp")
    assert code == 1
    assert out["ok"] is False


def test_cli_poset_classify(tmp_path, capsys):
    path = _write(tmp_path / "v.json", AlgebraDescriptor.spin(3).to_json())
    code, out = _run(capsys, "poset", "classify", "--descriptor", path, "--samples", 40, "--no-timestamp")
    assert code == 0
    assert out["has_two_dim_maximal"] is True and out["search_found"] is True


@pytest.mark.parametrize("name", ["spin-flip", "rr-permutation"])
def test_cli_counterexample(capsys, name):
    code, out = _run(capsys, "counterexample", name, "--samples", 20, "--no-timestamp")
    assert code == 0


def test_cli_amplify_test(tmp_path, capsys):
    A = AlgebraDescriptor.herm(2, "complex")
    U = random_unitary(2, np.random.default_rng(5))
    good = _write(tmp_path / "good.json", linear_map_to_json(unitary_conjugation(A, {0: U})))
    bad = _write(tmp_path / "bad.json", linear_map_to_json(transpose_map(A)))
    code, out = _run(capsys, "amplify-test", "--map", good, "--n", 2, "--trials", 10, "--no-timestamp")
    assert code == 0 and out["verdict"] == "*-isomorphism"
    code, out = _run(capsys, "amplify-test", "--map", bad, "--n", 2, "--trials", 10, "--no-timestamp")
    assert code == 1 and out["verdict"] == "rejected"
    assert main(["amplify-test", "--map", good, "--n", "3"]) == 2


def test_cli_suite_is_byte_identical_without_timestamp(capsys, h3c_file):
    argv = ["suite", "--descriptor", h3c_file, "--samples", "20", "--checks", "algebra.jordan_identity", "spectral.decomposition", "--no-timestamp"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv + ["--workers", "2"]) == 0
    assert capsys.readouterr().out == first
    out = json.loads(first)
    assert {r["status"] for r in out["checks"]} == {"pass"}
    assert "timestamp" not in out and all("runtime_ms" not in r for r in out["checks"])


def test_cli_suite_adds_timestamp_by_default(capsys, h3c_file):
    code, out = _run(capsys, "suite", "--descriptor", h3c_file, "--samples", "5", "--checks", "algebra.norm_axioms")
    assert code == 0 and "timestamp" in out


def test_cli_config_errors_exit_2(tmp_path, capsys):
    empty = _write(tmp_path / "empty.json", {"factors": []})
    assert main(["suite", "--descriptor", empty, "--samples", "5"]) == 2
    bad = _write(tmp_path / "bad.json", {"kind": "octonion"})
    assert main(["suite", "--descriptor", bad]) == 2
    assert main(["suite"]) == 2
    assert main(["spectral", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("name", ["spin-flip", "rr-permutation", "transpose"])
def test_cli_demo(capsys, name):
    code, out = _run(capsys, "demo", name, "--no-timestamp")
    assert code == 0
    assert out["narrative"]
