"""Orthonormal operator bases and coefficient matrices of bipartite operators."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError
from .linalg import Operator, as_matrix, operator_dims


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """An HS-orthonormal basis of n x n matrices.

    ``elements`` has shape ``(n*n, n, n)``.
    """

    dim: int
    elements: np.ndarray
    hermitian: bool
    name: str

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.elements[k]

    def gram(self) -> np.ndarray:
        flat = self.elements.reshape(len(self), -1)
        return flat.conj() @ flat.T


def _frozen(elements: np.ndarray) -> np.ndarray:
    elements.setflags(write=False)
    return elements


def matrix_unit_basis(n: int) -> OperatorBasis:
    """Matrix units E_ij ordered row-major in (i, j)."""
    if n < 2:
        raise DimensionError(f"basis dimension must be >= 2, got {n}")
    elements = np.eye(n * n, dtype=np.complex128).reshape(n * n, n, n)
    return OperatorBasis(n, _frozen(elements), False, "matrix_unit")


def gell_mann_basis(n: int) -> OperatorBasis:
    """Normalized identity followed by the generalized Gell-Mann matrices.

    Order: ``I/sqrt(n)``; symmetric ``(E_ij + E_ji)/sqrt2`` for i<j; antisymmetric
    ``(-i E_ij + i E_ji)/sqrt2`` for i<j; diagonal
    ``(sum_{k<l} E_kk - l E_ll)/sqrt(l(l+1))`` for l = 1..n-1. Every element has
    unit HS norm, so for n = 2 this is ``{I, sx, sy, sz}/sqrt2``.
    """
    if n < 2:
        raise DimensionError(f"basis dimension must be >= 2, got {n}")
    out = [np.eye(n, dtype=np.complex128) / np.sqrt(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, j] = m[j, i] = 1 / np.sqrt(2)
        out.append(m)
    for i, j in pairs:
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, j] = -1j / np.sqrt(2)
        m[j, i] = 1j / np.sqrt(2)
        out.append(m)
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        out.append(np.diag(d / np.sqrt(l * (l + 1))).astype(np.complex128))
    return OperatorBasis(n, _frozen(np.array(out)), True, "gell_mann")


BASES = {"matrix_unit": matrix_unit_basis, "gell_mann": gell_mann_basis}


def make_basis(name: str, n: int) -> OperatorBasis:
    try:
        return BASES[name](n)
    except KeyError:
        raise ValueError(f"unknown basis {name!r}; choose from {sorted(BASES)}") from None


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Expansion coefficients ``c[a, alpha] = <F_a (x) F_alpha, x>_HS``."""

    entries: np.ndarray
    basis_a: str
    basis_b: str


def coefficient_matrix(x: Operator, ba: OperatorBasis, bb: OperatorBasis,
                       na: Optional[int] = None, nb: Optional[int] = None) -> CoefficientMatrix:
    """Coefficients of ``x`` in the product basis ``{F_a (x) F_alpha}``.

    Uses the daggered HS product ``tr((F_a (x) F_alpha)^dag x)`` so that
    :func:`reconstruct` is an exact inverse for non-Hermitian bases too. For
    Hermitian bases this is ``tr(F_a (x) F_alpha x)``.
    """
    rho, na, nb = operator_dims(x, na, nb)
    if ba.dim != na or bb.dim != nb:
        raise DimensionError(f"basis dims ({ba.dim}, {bb.dim}) do not match operator dims ({na}, {nb})")
    r4 = rho.reshape(na, nb, na, nb)
    c = np.einsum("aij,bkl,ikjl->ab", ba.elements.conj(), bb.elements.conj(), r4, optimize=True)
    return CoefficientMatrix(c, ba.name, bb.name)


def reconstruct(c, ba: OperatorBasis, bb: OperatorBasis) -> np.ndarray:
    """Sum of ``c[a, alpha] * F_a (x) F_alpha``."""
    entries = as_matrix(c.entries if isinstance(c, CoefficientMatrix) else c, "coefficients")
    if entries.shape != (len(ba), len(bb)):
        raise DimensionError(f"coefficient shape {entries.shape} does not match bases ({len(ba)}, {len(bb)})")
    na, nb = ba.dim, bb.dim
    r4 = np.einsum("ab,aij,bkl->ikjl", entries, ba.elements, bb.elements, optimize=True)
    return r4.reshape(na * nb, na * nb)


def bloch_form(x: Operator, na: Optional[int] = None, nb: Optional[int] = None):
    """Local Bloch vectors and correlation matrix of a Hermitian operator.

    Returns ``(x, y, xi)`` in the convention
    ``rho = (I + x_a L_a (x) I + y_b I (x) L_b + xi_ab L_a (x) L_b) / (na*nb)``
    where ``L`` are the generalized Gell-Mann matrices with ``tr(L_a L_b) = 2 delta_ab``.
    The unit-norm Gell-Mann coefficient matrix ``c`` maps to these as
    ``x = na*sqrt(nb/2) c[1:, 0]``, ``y = nb*sqrt(na/2) c[0, 1:]``, ``xi = (na*nb/2) c[1:, 1:]``.
    """
    rho, na, nb = operator_dims(x, na, nb)
    c = coefficient_matrix(rho, gell_mann_basis(na), gell_mann_basis(nb), na, nb).entries.real
    bx = na * np.sqrt(nb / 2) * c[1:, 0]
    by = nb * np.sqrt(na / 2) * c[0, 1:]
    xi = (na * nb / 2) * c[1:, 1:]
    return bx, by, xi
