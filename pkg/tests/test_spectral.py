import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jordanframes.algebra import AlgebraDescriptor, jordan_product, operator_commute
from jordanframes.sampling import random_element, random_unit_interval
from jordanframes.spectral import (
    NotPositiveError,
    OutOfUnitIntervalError,
    apply_function,
    digits_commute,
    dyadic_expand,
    dyadic_sum,
    range_projection,
    spectral_decompose,
)

H2 = AlgebraDescriptor.herm(2)
H3 = AlgebraDescriptor.herm(3)
V2 = AlgebraDescriptor.spin(2)
V3 = AlgebraDescriptor.spin(3)
MIXED = AlgebraDescriptor.herm(3, "complex") + AlgebraDescriptor.spin(2) + AlgebraDescriptor.real()
DESCRIPTORS = [H3, AlgebraDescriptor.herm(4, "complex"), V3, MIXED]


def diag(*d):
    return H3.element(np.diag(d)) if len(d) == 3 else H2.element(np.diag(d))


def test_repeated_eigenvalue_groups_projections():
    dec = spectral_decompose(diag(3.0, 1.0, 3.0))
    assert dec.eigenvalues == pytest.approx([3.0, 1.0])
    assert dec.projections[0].close_to(diag(1.0, 0.0, 1.0))
    assert dec.projections[1].close_to(diag(0.0, 1.0, 0.0))


def test_spin_decomposition():
    x = V2.spin_element(2.0, [1.0, 0.0])
    dec = spectral_decompose(x)
    assert dec.eigenvalues == pytest.approx([3.0, 1.0])
    up, down = dec.projections
    assert up.close_to(V2.spin_element(0.5, [0.5, 0.0]))
    assert down.close_to(V2.spin_element(0.5, [-0.5, 0.0]))
    # independent checks: idempotent and recomposing
    for p in dec.projections:
        assert jordan_product(p, p).close_to(p)
    assert (3.0 * up + 1.0 * down).close_to(x)


def test_zero_decomposes_to_unit():
    dec = spectral_decompose(H3.zero())
    assert list(dec.eigenvalues) == [0.0]
    assert dec.projections[0].close_to(H3.unit())


def test_spin_with_zero_vector_part():
    dec = spectral_decompose(V3.spin_element(1.5, [0.0, 0.0, 0.0]))
    assert dec.eigenvalues == pytest.approx([1.5])
    assert dec.projections[0].close_to(V3.unit())


def test_eigenvalues_merge_across_factors():
    A = AlgebraDescriptor.herm(2) + AlgebraDescriptor.real()
    dec = spectral_decompose(A.element(np.diag([2.0, 1.0]), 2.0))
    assert dec.eigenvalues == pytest.approx([2.0, 1.0])
    assert dec.projections[0].close_to(A.element(np.diag([1.0, 0.0]), 1.0))


@pytest.mark.parametrize("A", DESCRIPTORS, ids=str)
def test_decomposition_invariants(A):
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = random_element(A, rng)
        dec = spectral_decompose(x)
        assert np.all(np.diff(dec.eigenvalues) < -1e-8)
        assert dec.recompose().close_to(x, 1e-9 * max(1.0, x.spectral_norm()))
        assert sum(dec.projections, A.zero()).close_to(A.unit())
        for i, p in enumerate(dec.projections):
            for j, q in enumerate(dec.projections):
                want = p if i == j else A.zero()
                assert jordan_product(p, q).close_to(want, 1e-9)


def test_range_projection_examples():
    assert range_projection(diag(2.0, 0.0, 5.0)).close_to(diag(1.0, 0.0, 1.0))
    p = V3.spin_element(0.5, [0.5, 0.0, 0.0])
    assert range_projection(p).close_to(p)


def test_range_projection_threshold():
    x = H2.element(np.diag([1e-12, 1.0]))
    assert range_projection(x, threshold=1e-10).close_to(diag(0.0, 1.0))


def test_range_projection_rejects_non_positive():
    with pytest.raises(NotPositiveError):
        range_projection(diag(1.0, -1.0))


@pytest.mark.parametrize("A", DESCRIPTORS, ids=str)
def test_range_projection_acts_as_unit_on_x(A):
    rng = np.random.default_rng(12)
    for _ in range(10):
        y = random_element(A, rng)
        x = jordan_product(y, y)
        r = range_projection(x)
        assert jordan_product(r, x).close_to(x, 1e-9 * max(1.0, x.spectral_norm()))


def test_apply_function_examples():
    x = random_element(H3, np.random.default_rng(0))
    assert apply_function(x, lambda t: t).close_to(x)
    assert apply_function(diag(2.0, -1.0), lambda t: t * t).close_to(diag(4.0, 1.0))
    assert apply_function(diag(3.0, 0.5), lambda t: max(t - 1.0, 0.0)).close_to(diag(2.0, 0.0))


@pytest.mark.parametrize("A", DESCRIPTORS, ids=str)
def test_function_calculus_is_multiplicative(A):
    rng = np.random.default_rng(13)
    for _ in range(10):
        x = random_element(A, rng)
        f = apply_function(x, lambda t: t**2 + t)
        g = apply_function(x, lambda t: 3 * t)
        fg = apply_function(x, lambda t: (t**2 + t) * 3 * t)
        assert jordan_product(f, g).close_to(fg, 1e-9 * max(1.0, fg.spectral_norm()))


# --- dyadic expansion ------------------------------------------------------------------


def test_three_quarters():
    digits = dyadic_expand(0.75 * H3.unit(), 2)
    assert len(digits) == 2
    assert all(p.close_to(H3.unit()) for p in digits)
    assert dyadic_sum(digits).close_to(0.75 * H3.unit(), 0.0)


def test_greedy_digits_by_hand():
    x = H2.element(np.diag([1.0, 0.5]))
    digits = dyadic_expand(x, 2)
    assert digits[0].close_to(diag(1.0, 1.0))
    assert digits[1].close_to(diag(1.0, 0.0))
    assert (x - dyadic_sum(digits)).spectral_norm() == pytest.approx(0.25)


def test_zero_has_zero_digits():
    digits = dyadic_expand(H3.zero(), 3)
    assert len(digits) == 3
    assert all(p.is_zero() for p in digits)


def test_dyadic_rational_takes_terminating_branch():
    # 1/2 = 0.1000... never 0.0111...
    digits = dyadic_expand(0.5 * H2.unit(), 10)
    assert digits[0].close_to(H2.unit())
    assert all(p.is_zero() for p in digits[1:])


@pytest.mark.parametrize("bad", [diag(1.5, 0.0, 0.0), diag(-0.1, 0.5, 0.5)])
def test_dyadic_rejects_spectrum_outside_unit_interval(bad):
    with pytest.raises(OutOfUnitIntervalError):
        dyadic_expand(bad, 5)


@pytest.mark.parametrize("A", DESCRIPTORS, ids=str)
@pytest.mark.parametrize("N", [1, 8, 20, 40])
def test_dyadic_error_bound_and_commutation(A, N):
    rng = np.random.default_rng(N)
    for _ in range(10):
        x = random_unit_interval(A, rng)
        digits = dyadic_expand(x, N)
        r = x - dyadic_sum(digits)
        assert r.spectral_norm() <= 2.0**-N + 1e-12
        assert min(spectral_decompose(r).eigenvalues) >= -1e-12  # residual stays positive
        assert digits_commute(x, digits)
        assert all(operator_commute(x, p) for p in digits[:3])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2**20), min_size=3, max_size=3), st.integers(1, 40))
def test_dyadic_digits_match_binary_expansion(ints, N):
    # dyadic rationals at least 1e-6 apart, so clustering only merges equal eigenvalues
    vals = [k / 2**20 for k in ints]
    x = diag(*vals)
    digits = dyadic_expand(x, N)
    got = np.array([np.diag(p.blocks[0]) for p in digits])  # shape (N, 3)
    for k, v in enumerate(vals):
        # independent greedy expansion of a single number
        r, want = v, []
        for n in range(1, N + 1):
            bit = r >= 2.0**-n
            want.append(1.0 if bit else 0.0)
            r -= bit * 2.0**-n
        np.testing.assert_array_equal(np.round(got[:, k]), want)
