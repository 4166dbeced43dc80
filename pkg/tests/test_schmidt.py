import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schmidt_scope import (InvalidDensityError, ccn, hs_inner, partial_trace, random_pure,
                           random_state, realign, schmidt_decomposition, schmidt_equivalent, schmidt_observables,
                           schmidt_spectrum, symmetric_polynomials, validate_density)
from schmidt_scope.linalg import hs_norm
from schmidt_scope.schmidt import spectrum_from_values, unrealign
from schmidt_scope.states import random_density, random_unitary

from conftest import brute_esp, brute_realign, ket, proj


def test_realign_product_pure(product00):
    r = realign(product00)
    expect = np.zeros((4, 4))
    expect[0, 0] = 1
    assert np.array_equal(r, expect)


def test_realign_bell(bell):
    assert np.allclose(realign(bell), np.eye(4) / 2, atol=1e-15)


@pytest.mark.parametrize("na,nb", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_realign_matches_loops(na, nb):
    rho = random_density(na * nb, na * 10 + nb)
    assert np.array_equal(realign(rho, na, nb), brute_realign(rho, na, nb))
    assert np.array_equal(unrealign(realign(rho, na, nb), na, nb), rho)


def test_realign_of_product_is_rank_one():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    sv = np.linalg.svd(realign(np.kron(a, b), 2, 3), compute_uv=False)
    assert sv[0] == pytest.approx(hs_norm(a) * hs_norm(b), rel=1e-12)
    assert np.all(sv[1:] < 1e-12)


def test_spectrum_goldens(bell, mixed4, product00):
    sp = schmidt_spectrum(product00)
    assert sp.coeffs == pytest.approx([1, 0, 0, 0], abs=1e-15) and sp.rank == 1
    sp = schmidt_spectrum(bell)
    assert np.abs(sp.as_array() - 0.5).max() <= 1e-10 and sp.rank == 4
    sp = schmidt_spectrum(mixed4)
    assert sp.coeffs == pytest.approx([0.5, 0, 0, 0], abs=1e-15) and sp.rank == 1


def test_spectrum_padding_and_rank():
    sp = spectrum_from_values([0.7, 0.2], 4)
    assert sp.coeffs == (0.7, 0.2, 0.0, 0.0) and sp.rank == 2
    assert sp.smallest_retained == 0.2 and sp.largest_discarded == 0.0
    sp = spectrum_from_values([1.0, 1e-12, 0.0], 3)
    assert sp.rank == 1 and sp.largest_discarded == 1e-12
    assert spectrum_from_values([0.0, 0.0], 2).rank == 0


def test_spectrum_2x3_has_four_values():
    assert schmidt_spectrum(random_state(2, 3, 0)).d == 4
    assert schmidt_spectrum(random_state(3, 2, 0)).d == 4


def test_decomposition_product(product00):
    dec = schmidt_decomposition(product00)
    assert dec.spectrum.rank == 1
    a, b = dec.ops_a[0], dec.ops_b[0]
    # up to a phase the factors are |0><0|
    assert abs(abs(a[0, 0]) - 1) < 1e-12 and abs(abs(b[0, 0]) - 1) < 1e-12


@pytest.mark.parametrize("na,nb,seed", [(2, 2, 0), (2, 3, 1), (3, 2, 2), (3, 3, 3)])
def test_decomposition_reconstructs_and_is_orthonormal(na, nb, seed):
    s = random_state(na, nb, seed)
    dec = schmidt_decomposition(s)
    assert np.abs(dec.reconstruct() - s.rho).max() <= 1e-9
    for ops in (dec.ops_a, dec.ops_b):
        gram = np.array([[hs_inner(x, y) for y in ops] for x in ops])
        assert np.abs(gram - np.eye(len(ops))).max() <= 1e-10


def test_decomposition_bell(bell):
    dec = schmidt_decomposition(bell)
    assert len(dec.ops_a) == 4
    assert np.abs(dec.reconstruct() - bell.rho).max() <= 1e-9


def test_observables_bell_and_mixed(bell, mixed4):
    dec = schmidt_observables(bell)
    assert np.allclose(dec.spectrum.as_array(), 0.5)
    for op in dec.ops_a + dec.ops_b:
        assert np.allclose(op, op.conj().T)
    dec = schmidt_observables(mixed4)
    assert dec.spectrum.rank == 1 and dec.spectrum.coeffs[0] == pytest.approx(0.5)
    sign = np.sign(dec.ops_a[0][0, 0].real)
    assert np.allclose(sign * dec.ops_a[0], np.eye(2) / np.sqrt(2))


def test_observables_measurable():
    s = random_state(2, 2, 17)
    dec = schmidt_observables(s)
    assert np.abs(dec.spectrum.as_array() - schmidt_spectrum(s).as_array()).max() <= 1e-10
    for mu, ea, eb in zip(dec.spectrum.coeffs, dec.ops_a, dec.ops_b):
        assert abs(np.trace(np.kron(ea, eb) @ s.rho).real - mu) <= 1e-9
    assert np.abs(dec.reconstruct() - s.rho).max() <= 1e-9


def test_observables_reject_non_hermitian():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.1
    with pytest.raises(InvalidDensityError):
        schmidt_observables(m, na=2, nb=2)


def test_ccn_goldens(bell, mixed4):
    assert ccn(bell) == pytest.approx(2, abs=1e-12)
    assert ccn(mixed4) == pytest.approx(0.5, abs=1e-15)
    rng = np.random.default_rng(5)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert ccn(np.kron(a, b), 2, 2) == pytest.approx(hs_norm(a) * hs_norm(b), rel=1e-12)


def test_symmetric_polynomial_goldens():
    assert symmetric_polynomials([0.5] * 4).values == pytest.approx([2, 1.5, 0.5, 0.0625], abs=1e-15)
    assert symmetric_polynomials([1, 0, 0, 0]).values == (1.0, 0.0, 0.0, 0.0)
    m = symmetric_polynomials([0.5] * 4)
    assert m[1] == 2 and m[4] == 0.0625 and len(m) == 4
    with pytest.raises(IndexError):
        m[0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=9))
def test_symmetric_polynomials_match_roots_oracle(mu):
    got = np.array(symmetric_polynomials(mu).values)
    assert np.allclose(got, brute_esp(mu), atol=1e-10, rtol=1e-10)


def test_symmetric_polynomials_match_subset_sums():
    from itertools import combinations
    mu = [0.3, 0.25, 0.1, 0.05, 0.01]
    m = symmetric_polynomials(mu)
    for l in range(1, 6):
        assert m[l] == pytest.approx(sum(np.prod(c) for c in combinations(mu, l)), rel=1e-12)


def test_equivalence(bell, mixed4):
    s = random_state(2, 3, 2)
    ua, ub = random_unitary(2, 1), random_unitary(3, 2)
    u = np.kron(ua, ub)
    rotated = validate_density(u @ s.rho @ u.conj().T, 2, 3)
    assert schmidt_equivalent(s, rotated)
    assert schmidt_equivalent(s, s)
    assert not schmidt_equivalent(bell, mixed4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1_000_000), st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_purity_identity(seed, dims):
    s = random_state(*dims, seed)
    mu = schmidt_spectrum(s).as_array()
    assert abs(np.sum(mu ** 2) - np.trace(s.rho @ s.rho).real) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1_000_000), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_pure_state_factorization(seed, dims):
    na, nb = dims
    s = random_pure(na, nb, seed)
    # vector Schmidt coefficients from the reduced state
    lam2 = np.clip(np.linalg.eigvalsh(partial_trace(s, "A")), 0, None)
    lam = np.sqrt(lam2)
    products = np.sort(np.outer(lam, lam).ravel())[::-1][:min(na, nb) ** 2]
    d = min(na, nb) ** 2
    mu = schmidt_spectrum(s).as_array()
    expect = np.zeros(min(na * na, nb * nb))
    expect[:d] = products
    assert np.abs(mu - expect).max() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1_000_000))
def test_ccn_invariant_under_local_unitaries(seed):
    s = random_state(2, 3, seed)
    u = np.kron(random_unitary(2, seed + 1), random_unitary(3, seed + 2))
    assert abs(ccn(u @ s.rho @ u.conj().T, 2, 3) - ccn(s)) <= 1e-10


def test_product_pure_has_rank_one():
    v = np.kron(ket(1), np.array([1, 1j, 0]) / np.sqrt(2))
    sp = schmidt_spectrum(proj(v), na=2, nb=3)
    assert sp.rank == 1 and sp.coeffs[0] == pytest.approx(1)
