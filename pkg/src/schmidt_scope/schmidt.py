"""Realignment, mixed-state Schmidt spectra and decompositions, CCN and
symmetric polynomials of the Schmidt coefficients."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .bases import gell_mann_basis
from .errors import DimensionError, InvalidDensityError, Violation
from .linalg import Operator, operator_dims, singular_values, svd, unvec

DEFAULT_RANK_TOL = 1e-9


def realign(x: Operator, na: Optional[int] = None, nb: Optional[int] = None) -> np.ndarray:
    """Reshuffled matrix of shape (na^2, nb^2).

    ``R[i*na + j, k*nb + l] = x[i*nb + k, j*nb + l]``, so that
    ``realign(A (x) B) == outer(vec(A), vec(B))``.
    """
    rho, na, nb = operator_dims(x, na, nb)
    return rho.reshape(na, nb, na, nb).transpose(0, 2, 1, 3).reshape(na * na, nb * nb)


def unrealign(r, na: int, nb: int) -> np.ndarray:
    """Inverse of :func:`realign`."""
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (na * na, nb * nb):
        raise DimensionError(f"realigned matrix shape {r.shape} does not match ({na * na}, {nb * nb})")
    return r.reshape(na, na, nb, nb).transpose(0, 2, 1, 3).reshape(na * nb, na * nb)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt coefficients, sorted non-increasing and zero-padded to length d."""

    coeffs: Tuple[float, ...]
    rank: int
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def d(self) -> int:
        return len(self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs)

    @property
    def smallest_retained(self) -> Optional[float]:
        return self.coeffs[self.rank - 1] if self.rank > 0 else None

    @property
    def largest_discarded(self) -> Optional[float]:
        return self.coeffs[self.rank] if self.rank < self.d else None


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``x = sum_a mu_a ops_a[a] (x) ops_b[a]`` with HS-orthonormal local systems."""

    spectrum: SchmidtSpectrum
    ops_a: Tuple[np.ndarray, ...]
    ops_b: Tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        mu = self.spectrum.coeffs
        return sum(m * np.kron(a, b) for m, a, b in zip(mu, self.ops_a, self.ops_b))


@dataclass(frozen=True)
class SymmetricPolynomials:
    """``values[l-1]`` is the elementary symmetric polynomial of degree l."""

    values: Tuple[float, ...]

    def __getitem__(self, l: int) -> float:
        # 1-based, matching the polynomial degree.
        if not 1 <= l <= len(self.values):
            raise IndexError(f"degree {l} outside 1..{len(self.values)}")
        return self.values[l - 1]

    def __len__(self) -> int:
        return len(self.values)


def spectrum_from_values(values, d: int, rank_tol: float = DEFAULT_RANK_TOL) -> SchmidtSpectrum:
    """Build a spectrum from raw singular values: sort, pad/truncate to d, compute rank."""
    s = np.sort(np.clip(np.asarray(values, dtype=float), 0.0, None))[::-1]
    s = np.concatenate([s, np.zeros(max(0, d - s.size))])[:d]
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > rank_tol * s[0]))
    return SchmidtSpectrum(tuple(float(v) for v in s), rank, rank_tol)


def schmidt_spectrum(x: Operator, rank_tol: float = DEFAULT_RANK_TOL,
                     na: Optional[int] = None, nb: Optional[int] = None) -> SchmidtSpectrum:
    rho, na, nb = operator_dims(x, na, nb)
    d = min(na * na, nb * nb)
    return spectrum_from_values(singular_values(realign(rho, na, nb)), d, rank_tol)


def schmidt_decomposition(x: Operator, rank_tol: float = DEFAULT_RANK_TOL,
                          na: Optional[int] = None, nb: Optional[int] = None) -> SchmidtDecomposition:
    """Operator Schmidt decomposition from the SVD of the realigned matrix.

    With ``realign(x) = U S V^dag`` the local operators are
    ``unvec(U[:, a])`` and ``unvec(conj(V[:, a]))``.
    """
    rho, na, nb = operator_dims(x, na, nb)
    u, s, vh = svd(realign(rho, na, nb))
    # Columns of V are conj(vh) rows, so conj(V[:, a]) == vh[a, :].
    ops_a = tuple(unvec(u[:, a], na, na) for a in range(s.size))
    ops_b = tuple(unvec(vh[a, :], nb, nb) for a in range(s.size))
    spectrum = spectrum_from_values(s, s.size, rank_tol)
    return SchmidtDecomposition(spectrum, ops_a, ops_b)


def schmidt_observables(x: Operator, rank_tol: float = DEFAULT_RANK_TOL,
                        na: Optional[int] = None, nb: Optional[int] = None,
                        herm_tol: float = 1e-9) -> SchmidtDecomposition:
    """Schmidt decomposition whose local operators are Hermitian (observables).

    The real correlation matrix ``T[a, b] = tr((G_a (x) H_b) x)`` over Gell-Mann
    bases is decomposed by a real SVD; then ``mu_c = tr((E_c (x) F_c) x)``.
    """
    rho, na, nb = operator_dims(x, na, nb)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_err > herm_tol:
        raise InvalidDensityError([Violation("NotHermitian", herm_err, herm_tol)])
    ga, gb = gell_mann_basis(na), gell_mann_basis(nb)
    r4 = rho.reshape(na, nb, na, nb)
    t = np.einsum("aji,blk,ikjl->ab", ga.elements, gb.elements, r4, optimize=True).real
    u, s, vt = np.linalg.svd(t, full_matrices=False)
    ops_a = tuple(np.einsum("a,aij->ij", u[:, c], ga.elements) for c in range(s.size))
    ops_b = tuple(np.einsum("b,bij->ij", vt[c, :], gb.elements) for c in range(s.size))
    spectrum = spectrum_from_values(s, s.size, rank_tol)
    return SchmidtDecomposition(spectrum, ops_a, ops_b)


def ccn(x: Operator, na: Optional[int] = None, nb: Optional[int] = None) -> float:
    """Computable cross norm: trace norm of the realigned matrix."""
    return float(np.sum(singular_values(realign(x, na, nb))))


def symmetric_polynomials(sp: Union[SchmidtSpectrum, Sequence[float]]) -> SymmetricPolynomials:
    """Elementary symmetric polynomials e_1..e_d of the coefficients.

    Incremental product recursion over ``prod_a (1 + mu_a t)``; all terms are
    non-negative so there is no cancellation.
    """
    mu = sp.coeffs if isinstance(sp, SchmidtSpectrum) else tuple(float(v) for v in sp)
    e = np.zeros(len(mu) + 1)
    e[0] = 1.0
    for k, m in enumerate(mu, start=1):
        e[1:k + 1] = e[1:k + 1] + m * e[0:k]
    return SymmetricPolynomials(tuple(float(v) for v in e[1:]))


def schmidt_equivalent(s1: Operator, s2: Operator, tol: float = 1e-9) -> bool:
    """True iff the two sorted Schmidt spectra agree componentwise within ``tol``."""
    _, na1, nb1 = operator_dims(s1)
    _, na2, nb2 = operator_dims(s2)
    if (na1, nb1) != (na2, nb2):
        raise DimensionError(f"dimension mismatch: ({na1}, {nb1}) vs ({na2}, {nb2})")
    a = schmidt_spectrum(s1).as_array()
    b = schmidt_spectrum(s2).as_array()
    return bool(np.max(np.abs(a - b)) <= tol)
