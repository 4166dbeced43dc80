"""Dense complex-matrix primitives and density-operator validation.

Conventions used everywhere in the package:

* matrices are 2-D ``numpy.complex128`` arrays;
* vectorization is row-major, ``vec(a)[i*cols + j] == a[i, j]``;
* the composite index of ``|i>_A (x) |j>_B`` is ``i*nb + j``.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DimensionError, InvalidDensityError, NumericError, Violation

# Largest number of entries kron() will allocate.
MAX_ENTRIES = 1 << 26


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used when validating a density operator."""

    hermitian: float = 1e-9
    trace: float = 1e-9
    positive: float = 1e-9

    @classmethod
    def uniform(cls, tol: float) -> "Tolerances":
        return cls(tol, tol, tol)

    def as_dict(self) -> dict:
        return {"hermitian": self.hermitian, "trace": self.trace, "positive": self.positive}


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A validated density operator on C^na (x) C^nb.

    Construct through :func:`validate_density`; the stored matrix is read-only.
    """

    rho: np.ndarray
    na: int
    nb: int

    @property
    def dim(self) -> int:
        return self.na * self.nb

    def __repr__(self) -> str:
        return f"BipartiteState(na={self.na}, nb={self.nb})"


Operator = Union[BipartiteState, np.ndarray]


def operator_dims(x: Operator, na: Optional[int] = None, nb: Optional[int] = None) -> Tuple[np.ndarray, int, int]:
    """Return ``(matrix, na, nb)`` for a state or for a raw operator with declared dims."""
    if isinstance(x, BipartiteState):
        if (na is not None and na != x.na) or (nb is not None and nb != x.nb):
            raise DimensionError(f"declared dims ({na}, {nb}) disagree with state dims ({x.na}, {x.nb})")
        return x.rho, x.na, x.nb
    if na is None or nb is None:
        raise DimensionError("local dimensions na, nb are required for a raw operator")
    m = as_matrix(x, "operator")
    if m.shape != (na * nb, na * nb):
        raise DimensionError(f"operator shape {m.shape} does not match na*nb = {na * nb}")
    return m, int(na), int(nb)


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``out[i*b.rows + k, j*b.cols + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    size = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if size > MAX_ENTRIES:
        raise DimensionError(f"kron result would have {size} entries (limit {MAX_ENTRIES})")
    return np.kron(a, b)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a^dag b)."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionError(f"hs_inner needs equal square shapes, got {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def singular_values(a) -> np.ndarray:
    """Singular values sorted non-increasing, length ``min(rows, cols)``."""
    a = as_matrix(a)
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge for {a.shape} matrix (max |entry| = {np.abs(a).max():.3e})") from exc
    # LAPACK already sorts; re-sort to make the contract independent of the backend.
    return np.sort(s)[::-1]


def svd(a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``a = u @ diag(s) @ vh`` with NumericError on non-convergence."""
    a = as_matrix(a)
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge for {a.shape} matrix") from exc


def trace_norm(a) -> float:
    return float(np.sum(singular_values(a)))


def partial_trace(s: Operator, keep: str, na: Optional[int] = None, nb: Optional[int] = None) -> np.ndarray:
    """Reduced operator on subsystem ``keep`` ("A" or "B")."""
    rho, na, nb = operator_dims(s, na, nb)
    r4 = rho.reshape(na, nb, na, nb)
    if keep == "A":
        return np.einsum("ijkj->ik", r4)
    if keep == "B":
        return np.einsum("ijil->jl", r4)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def vec(a) -> np.ndarray:
    """Row-major vectorization."""
    return as_matrix(a).reshape(-1).copy()


def unvec(v, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(f"cannot reshape vector of length {v.size} to {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def density_violations(m: np.ndarray, tols: Tolerances = DEFAULT_TOLERANCES) -> list:
    """Every violated density invariant of the square matrix ``m``."""
    out = []
    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > tols.hermitian:
        out.append(Violation("NotHermitian", herm_err, tols.hermitian))
    tr = np.trace(m)
    trace_err = float(abs(tr - 1.0))
    if trace_err > tols.trace:
        out.append(Violation("TraceNotOne", trace_err, tols.trace))
    # Positivity is judged on the Hermitian part so it is reported even when
    # hermiticity also fails.
    h = 0.5 * (m + m.conj().T)
    try:
        lam_min = float(np.linalg.eigvalsh(h)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericError("Hermitian eigensolver did not converge during validation") from exc
    if lam_min < -tols.positive:
        out.append(Violation("NotPositive", -lam_min, tols.positive))
    return out


def validate_density(m, na: int, nb: int, tols: Tolerances = DEFAULT_TOLERANCES) -> BipartiteState:
    """Check ``m`` is a density operator on C^na (x) C^nb and wrap it.

    Raises
    ------
    InvalidDensityError
        Listing every violated invariant with its measured magnitude.
    """
    if na < 2 or nb < 2:
        raise DimensionError(f"local dimensions must be >= 2, got ({na}, {nb})")
    m = as_matrix(m, "density matrix")
    n = na * nb
    if m.shape != (n, n):
        raise DimensionError(f"density matrix shape {m.shape} does not match na*nb = {n}")
    violations = density_violations(m, tols)
    if violations:
        raise InvalidDensityError(violations)
    rho = m.copy()
    rho.setflags(write=False)
    return BipartiteState(rho, int(na), int(nb))
