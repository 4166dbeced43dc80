"""Quantum channels in Kraus form, their canonical (Choi) states, and
necessary conditions for entanglement breaking.

A channel maps operators on H_B (``in_dim = nb``) to operators on H_A
(``out_dim = na``); its Kraus operators are ``na x nb``.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bases import OperatorBasis, matrix_unit_basis
from .criteria import CriterionReport, Verdict, _sympoly_report, DEFAULT_DECISION_TOL
from .errors import DimensionError, NotTracePreservingError
from .linalg import BipartiteState, DEFAULT_TOLERANCES, Tolerances, as_matrix, singular_values, validate_density
from .schmidt import DEFAULT_RANK_TOL, spectrum_from_values
from .states import SeededStream, max_entangled_vector

KRAUS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    kraus: tuple
    in_dim: int
    out_dim: int

    def __call__(self, sigma) -> np.ndarray:
        return apply_channel(self, sigma)


def kraus_deviation(kraus: Sequence[np.ndarray], in_dim: int) -> float:
    total = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(total - np.eye(in_dim))))


def make_channel(kraus, tol: float = KRAUS_TOL) -> QuantumChannel:
    """Validate Kraus operators (all ``out_dim x in_dim``) and build a channel."""
    ops = [as_matrix(k, f"kraus[{i}]") for i, k in enumerate(kraus)]
    if not ops:
        raise DimensionError("a channel needs at least one Kraus operator")
    shape = ops[0].shape
    if any(k.shape != shape for k in ops):
        raise DimensionError(f"Kraus operators have inconsistent shapes: {[k.shape for k in ops]}")
    out_dim, in_dim = shape
    dev = kraus_deviation(ops, in_dim)
    if dev > tol:
        raise NotTracePreservingError(dev, tol)
    for k in ops:
        k.setflags(write=False)
    return QuantumChannel(tuple(ops), in_dim, out_dim)


def apply_channel(ch: QuantumChannel, sigma) -> np.ndarray:
    sigma = as_matrix(sigma, "sigma")
    if sigma.shape != (ch.in_dim, ch.in_dim):
        raise DimensionError(f"input shape {sigma.shape} does not match channel in_dim {ch.in_dim}")
    return sum(k @ sigma @ k.conj().T for k in ch.kraus)


def identity_channel(n: int) -> QuantumChannel:
    return make_channel([np.eye(n)])


def weyl_operators(n: int):
    """The n^2 unitaries X^j Z^k, (j, k) in row-major order; (0, 0) is the identity."""
    shift = np.roll(np.eye(n), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    return [np.linalg.matrix_power(shift, j) @ np.linalg.matrix_power(clock, k)
            for j in range(n) for k in range(n)]


def depolarizing_channel(n: int, p: float) -> QuantumChannel:
    """sigma -> (1 - p) sigma + p tr(sigma) I/n.

    Kraus set: ``sqrt(1 - p + p/n^2) I`` and ``sqrt(p)/n W`` for the non-identity
    Weyl operators W; zero operators are dropped.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 2:
        raise DimensionError(f"n must be >= 2, got {n}")
    ws = weyl_operators(n)
    kraus = [np.sqrt(1 - p + p / n**2) * ws[0]]
    if p > 0:
        kraus += [np.sqrt(p) / n * w for w in ws[1:]]
    return make_channel(kraus)


def random_channel(in_dim: int, out_dim: int, seed: int, n_kraus: Optional[int] = None) -> QuantumChannel:
    """Random channel from a Gaussian isometry: K = G (G^dag G)^{-1/2}, split into blocks."""
    n_kraus = in_dim * out_dim if n_kraus is None else n_kraus
    g = SeededStream(seed).complex_normal((n_kraus * out_dim, in_dim))
    w, s, vh = np.linalg.svd(g, full_matrices=False)
    iso = w @ vh
    return make_channel([iso[i * out_dim:(i + 1) * out_dim] for i in range(n_kraus)])


def choi_state(ch: QuantumChannel, tols: Tolerances = DEFAULT_TOLERANCES) -> BipartiteState:
    """(E (x) I)(|psi><psi|) on H_A (x) H_B with psi = sum_a |a>|a>/sqrt(nb).

    Equivalently ``(1/nb) sum_{ab} E(|a><b|) (x) |a><b|``.
    """
    na, nb = ch.out_dim, ch.in_dim
    psi = max_entangled_vector(nb)
    phi = np.outer(psi, psi.conj())
    rho = np.zeros((na * nb, na * nb), dtype=np.complex128)
    for k in ch.kraus:
        kk = np.kron(k, np.eye(nb))
        rho += kk @ phi @ kk.conj().T
    return validate_density(rho, na, nb, tols)


def channel_coeff_matrix(ch: QuantumChannel, ba: Optional[OperatorBasis] = None,
                         bb: Optional[OperatorBasis] = None) -> np.ndarray:
    """``E~[a, alpha] = tr(F_a^dag E(F_alpha^dag))``, shape (na^2, nb^2).

    The Choi state satisfies ``rho_E = (1/nb) sum E~[a, alpha] F_a (x) F_alpha^T``
    (note the transpose on the B factor), so the singular values of ``E~/nb``
    are the Schmidt coefficients of ``rho_E`` for any pair of bases.
    """
    ba = matrix_unit_basis(ch.out_dim) if ba is None else ba
    bb = matrix_unit_basis(ch.in_dim) if bb is None else bb
    if ba.dim != ch.out_dim or bb.dim != ch.in_dim:
        raise DimensionError(f"basis dims ({ba.dim}, {bb.dim}) do not match channel (out={ch.out_dim}, in={ch.in_dim})")
    images = np.array([apply_channel(ch, f.conj().T) for f in bb.elements])
    # tr(F_a^dag Y) = sum_ij conj(F_a[i, j]) Y[i, j]
    return np.einsum("aij,bij->ab", ba.elements.conj(), images)


def eb_check(ch: QuantumChannel, l: int, use_rank: bool = True, rank_tol: float = DEFAULT_RANK_TOL,
             decision_tol: float = DEFAULT_DECISION_TOL) -> CriterionReport:
    """Necessary condition for entanglement breaking on the singular values of E~.

    ``lhs = M^[l](|E~|)``; bound ``C(R, l)(nb/R)^l`` (rank-aware) or
    ``C(d, l)(nb/d)^l`` (rank-free; the volume bound ``(nb/d)^d`` at l = d).
    Violation means the Choi state is entangled, hence the channel is ``NotEB``.
    No channel is ever certified entanglement breaking.
    """
    sv = singular_values(channel_coeff_matrix(ch))
    d = min(ch.out_dim ** 2, ch.in_dim ** 2)
    sp = spectrum_from_values(sv, d, rank_tol)
    rep = _sympoly_report("eb", sp.coeffs, sp.rank, l, use_rank, rank_tol, decision_tol, scale=float(ch.in_dim))
    verdict = Verdict.NOT_EB if rep.verdict is Verdict.DETECTED else Verdict.INCONCLUSIVE
    return CriterionReport(rep.criterion_id, rep.lhs, rep.bound, verdict, dict(rep.params, nb=ch.in_dim))
