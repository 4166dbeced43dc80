"""Separability criteria built on Schmidt coefficients.

Every check returns a :class:`CriterionReport`. The criteria are necessary
conditions for separability, so a report can only ever say
``EntanglementDetected`` or ``Inconclusive``; ties within ``decision_tol``
resolve to ``Inconclusive``.
"""

import enum
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, FilterNotContractiveError, NegativeRadicandError
from .linalg import Operator, as_matrix, hs_inner, operator_dims, partial_trace, singular_values
from .schmidt import (DEFAULT_RANK_TOL, ccn, realign, schmidt_spectrum, symmetric_polynomials,
                      unrealign)

DEFAULT_DECISION_TOL = 1e-9
# Radicands down to this value are treated as rounding noise and clamped to 0.
RADICAND_FLOOR = -1e-12


class Verdict(str, enum.Enum):
    DETECTED = "EntanglementDetected"
    INCONCLUSIVE = "Inconclusive"
    NOT_EB = "NotEB"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CriterionReport:
    criterion_id: str
    lhs: float
    bound: float
    verdict: Verdict
    params: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.lhs - self.bound

    @property
    def detected(self) -> bool:
        return self.verdict in (Verdict.DETECTED, Verdict.NOT_EB)

    def to_dict(self) -> dict:
        return {
            "criterion_id": self.criterion_id,
            "lhs": self.lhs,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict.value,
            "params": self.params,
        }


def _report(criterion_id: str, lhs: float, bound: float, params: dict,
            decision_tol: float, extra_condition: bool = True) -> CriterionReport:
    lhs, bound = float(lhs), float(bound)
    detected = (lhs - bound > decision_tol) and extra_condition
    verdict = Verdict.DETECTED if detected else Verdict.INCONCLUSIVE
    return CriterionReport(criterion_id, lhs, bound, verdict, dict(params, decision_tol=decision_tol))


# -- realignment / CCN -------------------------------------------------------

def rc_check(s: Operator, decision_tol: float = DEFAULT_DECISION_TOL) -> CriterionReport:
    """Realignment (CCN) criterion: separable implies ccn(rho) <= 1."""
    return _report("rc", ccn(s), 1.0, {}, decision_tol)


# -- symmetric polynomials ---------------------------------------------------

def sympoly_bounds(l: int, rank: int, d: int, scale: float = 1.0) -> Tuple[float, float]:
    """``(rank_aware, rank_free)`` upper bounds on the degree-l polynomial.

    Rank-aware: ``C(R, l) (scale/R)^l`` for l <= R, else 0.
    Rank-free: ``C(d, l) (scale/d)^l``; at l = d this is the determinant bound.
    """
    minors = comb(rank, l) * (scale / rank) ** l if 1 <= l <= rank else 0.0
    naive = comb(d, l) * (scale / d) ** l
    return float(minors), float(naive)


def _sympoly_report(criterion_id: str, coeffs: Sequence[float], rank: int, l: int, use_rank: bool,
                    rank_tol: float, decision_tol: float, scale: float = 1.0) -> CriterionReport:
    d = len(coeffs)
    if not 1 <= l <= d:
        raise ValueError(f"degree l must lie in 1..{d}, got {l}")
    lhs = symmetric_polynomials(coeffs)[l]
    minors, naive = sympoly_bounds(l, rank, d, scale)
    bound = minors if use_rank else naive
    # A zero bound for l > R is only as trustworthy as the numerical rank; require
    # the polynomial to clear the rank cutoff as well before reporting detection.
    extra = not (use_rank and l > rank) or lhs > rank_tol * d * scale ** l
    params = {
        "l": l,
        "use_rank": use_rank,
        "rank": rank,
        "d": d,
        "rank_tol": rank_tol,
        "bound_minors": minors,
        "bound_naive": naive,
        "smallest_retained": coeffs[rank - 1] if rank > 0 else None,
        "largest_discarded": coeffs[rank] if rank < d else None,
    }
    # Tolerances are stated for the state normalization; rescale with the bound.
    return _report(criterion_id, lhs, bound, params, decision_tol * scale ** l, extra)


def sympoly_check(s: Operator, l: int, use_rank: bool = True, rank_tol: float = DEFAULT_RANK_TOL,
                  decision_tol: float = DEFAULT_DECISION_TOL) -> CriterionReport:
    """Bound on the degree-l symmetric polynomial of the Schmidt coefficients.

    ``use_rank=True`` selects ``C(R,l)/R^l`` (0 beyond the rank), otherwise
    ``C(d,l)/d^l``. Both bounds are recorded in ``params``.
    """
    sp = schmidt_spectrum(s, rank_tol)
    return _sympoly_report("sympoly", sp.coeffs, sp.rank, l, use_rank, rank_tol, decision_tol)


# -- superoperators and the transform family ---------------------------------

@dataclass(frozen=True, eq=False)
class SuperOperatorSpec:
    """Linear map on matrices given by a kernel acting on row-major vec.

    If ``antilinear`` the action is ``X -> Lambda(conj(X))``: entrywise
    conjugation in the computational basis followed by the linear kernel.
    """

    in_dim: int
    out_dim: int
    kernel: np.ndarray
    antilinear: bool = False

    def __post_init__(self):
        k = as_matrix(self.kernel, "kernel")
        if k.shape != (self.out_dim ** 2, self.in_dim ** 2):
            raise DimensionError(f"kernel shape {k.shape} does not match dims in={self.in_dim}, out={self.out_dim}")
        object.__setattr__(self, "kernel", k)

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"input shape {x.shape} does not match in_dim {self.in_dim}")
        if self.antilinear:
            x = x.conj()
        return (self.kernel @ x.reshape(-1)).reshape(self.out_dim, self.out_dim)

    @classmethod
    def identity(cls, n: int, phase: complex = 1.0, antilinear: bool = False) -> "SuperOperatorSpec":
        return cls(n, n, phase * np.eye(n * n, dtype=np.complex128), antilinear)

    @classmethod
    def conjugation(cls, op, phase: complex = 1.0, antilinear: bool = False) -> "SuperOperatorSpec":
        """``X -> phase * L X L^dag`` (after entrywise conjugation if antilinear)."""
        op = as_matrix(op, "L")
        if op.shape[0] != op.shape[1]:
            raise DimensionError("conjugation superoperator needs a square operator")
        # Row-major vec(L X L^dag) = (L (x) conj(L)) vec(X).
        return cls(op.shape[0], op.shape[0], phase * np.kron(op, op.conj()), antilinear)

    @classmethod
    def from_linear_map(cls, fn, in_dim: int, out_dim: Optional[int] = None,
                        antilinear: bool = False) -> "SuperOperatorSpec":
        """Tabulate a linear map on the matrix units.

        ``fn`` must be linear; for an antilinear spec pass the linear part
        (the map applied after conjugation).
        """
        out_dim = in_dim if out_dim is None else out_dim
        cols = []
        for a in range(in_dim * in_dim):
            unit = np.zeros(in_dim * in_dim, dtype=np.complex128)
            unit[a] = 1.0
            cols.append(as_matrix(fn(unit.reshape(in_dim, in_dim))).reshape(-1))
        return cls(in_dim, out_dim, np.array(cols).T, antilinear)


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """n pairs of jointly (anti)linear local superoperators with bounds eps_a, eps_b."""

    pairs: Tuple[Tuple[SuperOperatorSpec, SuperOperatorSpec], ...]
    eps_a: float
    eps_b: float

    def __post_init__(self):
        pairs = tuple((a, b) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("a transform needs at least one pair of superoperators")
        flags = {op.antilinear for pair in pairs for op in pair}
        if len(flags) != 1:
            raise ValueError("superoperators must be jointly linear or jointly antilinear")
        if self.eps_a < 0 or self.eps_b < 0:
            raise ValueError(f"eps values must be non-negative, got ({self.eps_a}, {self.eps_b})")
        dims_a = {(a.in_dim, a.out_dim) for a, _ in pairs}
        dims_b = {(b.in_dim, b.out_dim) for _, b in pairs}
        if len(dims_a) != 1 or len(dims_b) != 1:
            raise DimensionError("all superoperators on one subsystem must share dimensions")
        (ia, oa), = dims_a
        (ib, ob), = dims_b
        if ia != oa or ib != ob:
            raise DimensionError("transform superoperators must map each local space to itself")

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def antilinear(self) -> bool:
        return self.pairs[0][0].antilinear

    @property
    def na(self) -> int:
        return self.pairs[0][0].in_dim

    @property
    def nb(self) -> int:
        return self.pairs[0][1].in_dim


def _apply_kron(sa: SuperOperatorSpec, sb: SuperOperatorSpec, x: np.ndarray, na: int, nb: int) -> np.ndarray:
    # Expanding x over matrix units gives coefficients realign(x); the product map
    # sends realign(x) to K_A realign(x) K_B^T.
    if sa.antilinear:
        x = x.conj()
    r = realign(x, na, nb)
    return unrealign(sa.kernel @ r @ sb.kernel.T, sa.out_dim, sb.out_dim)


def apply_product_superop(ts: TransformSpec, pair_index: int, x, na: Optional[int] = None,
                          nb: Optional[int] = None, b_index: Optional[int] = None) -> np.ndarray:
    """Apply ``E_k^A (x) E_l^B`` to an operator on the bipartite space.

    ``k = pair_index``; ``l = b_index`` if given, else ``k``.
    """
    na = ts.na if na is None else na
    nb = ts.nb if nb is None else nb
    x, na, nb = operator_dims(x, na, nb)
    if (na, nb) != (ts.na, ts.nb):
        raise DimensionError(f"operator dims ({na}, {nb}) do not match transform dims ({ts.na}, {ts.nb})")
    l = pair_index if b_index is None else b_index
    return _apply_kron(ts.pairs[pair_index][0], ts.pairs[l][1], x, na, nb)


def _marginals(s: Operator):
    rho, na, nb = operator_dims(s)
    return rho, partial_trace(rho, "A", na, nb), partial_trace(rho, "B", na, nb), na, nb


def e_transform(s: Operator, ts: TransformSpec) -> np.ndarray:
    """(1/n) sum_k (E_k^A (x) E_k^B)(rho) + (1/n) sum_{k != l} (E_k^A (x) E_l^B)(rho_A (x) rho_B)."""
    rho, rho_a, rho_b, na, nb = _marginals(s)
    if (na, nb) != (ts.na, ts.nb):
        raise DimensionError(f"state dims ({na}, {nb}) do not match transform dims ({ts.na}, {ts.nb})")
    n = ts.n
    prod = np.kron(rho_a, rho_b)
    out = np.zeros_like(rho)
    for k in range(n):
        out += _apply_kron(ts.pairs[k][0], ts.pairs[k][1], rho, na, nb)
        for l in range(n):
            if l != k:
                out += _apply_kron(ts.pairs[k][0], ts.pairs[l][1], prod, na, nb)
    return out / n


def _radicand(eps: float, images: Sequence[np.ndarray], n: int) -> float:
    cross = sum(2.0 * hs_inner(images[k], images[l]).real
                for k in range(n) for l in range(k + 1, n))
    return eps + cross / n


def transform_bound(s: Operator, ts: TransformSpec) -> Tuple[float, float, float]:
    """Return ``(bound, radicand_a, radicand_b)``.

    Raises NegativeRadicandError when a radicand is below -1e-12.
    """
    _, rho_a, rho_b, _, _ = _marginals(s)
    rad_a = _radicand(ts.eps_a, [a(rho_a) for a, _ in ts.pairs], ts.n)
    rad_b = _radicand(ts.eps_b, [b(rho_b) for _, b in ts.pairs], ts.n)
    for side, r in (("A", rad_a), ("B", rad_b)):
        if r < RADICAND_FLOOR:
            raise NegativeRadicandError(side, r)
    rad_a, rad_b = max(rad_a, 0.0), max(rad_b, 0.0)
    return float(np.sqrt(rad_a * rad_b)), rad_a, rad_b


def transform_check(s: Operator, ts: TransformSpec, decision_tol: float = DEFAULT_DECISION_TOL,
                    criterion_id: str = "transform") -> CriterionReport:
    """CCN of the transformed operator against its separable-state bound.

    The eps values in ``ts`` are trusted: the caller asserts that
    ``sum_k ||E_k(sigma_k)||_HS^2 <= n * eps`` holds for all local states on
    each side. See :func:`estimate_eps` for an empirical sanity check.
    """
    lhs = ccn(e_transform(s, ts), ts.na, ts.nb)
    bound, rad_a, rad_b = transform_bound(s, ts)
    params = {"n": ts.n, "eps_a": ts.eps_a, "eps_b": ts.eps_b, "antilinear": ts.antilinear,
              "radicand_a": rad_a, "radicand_b": rad_b}
    return _report(criterion_id, lhs, bound, params, decision_tol)


@dataclass(frozen=True)
class EpsEstimate:
    """Empirical lower bound on the eps a set of superoperators requires.

    Obtained by sampling pure states; it is never a certificate that the
    hypothesis holds.
    """

    value: float
    per_operator: Tuple[float, ...]
    samples: int
    is_certificate: bool = False


def estimate_eps(ops: Sequence[SuperOperatorSpec], samples: int = 500, seed: int = 0) -> EpsEstimate:
    """Lower-estimate the smallest valid eps for one side of a transform.

    The constraint decouples over k, so the required eps is
    ``(1/n) sum_k sup_sigma ||E_k(sigma)||_HS^2``; the squared HS norm is convex
    in sigma, so the sup is attained on pure states, which are sampled here.
    """
    from .states import SeededStream

    stream = SeededStream(seed)
    n = ops[0].in_dim
    best = np.zeros(len(ops))
    for _ in range(samples):
        v = stream.complex_normal((n,))
        v /= np.linalg.norm(v)
        sigma = np.outer(v, v.conj())
        for k, op in enumerate(ops):
            best[k] = max(best[k], float(np.linalg.norm(op(sigma)) ** 2))
    return EpsEstimate(float(best.mean()), tuple(float(b) for b in best), samples)


# -- named instances ---------------------------------------------------------

def identity_transform(na: int, nb: int) -> TransformSpec:
    """n = 1 with identity superoperators and eps = 1: reproduces the RC."""
    return TransformSpec(((SuperOperatorSpec.identity(na), SuperOperatorSpec.identity(nb)),), 1.0, 1.0)


def theta_transform(theta: float, na: int, nb: int) -> TransformSpec:
    """Pairs (e^{i theta} I, e^{-i theta} I) and (-I, -I) with eps = 1."""
    return TransformSpec((
        (SuperOperatorSpec.identity(na, np.exp(1j * theta)), SuperOperatorSpec.identity(nb, np.exp(-1j * theta))),
        (SuperOperatorSpec.identity(na, -1.0), SuperOperatorSpec.identity(nb, -1.0)),
    ), 1.0, 1.0)


def filter_transform(la, lb) -> TransformSpec:
    """Pairs (L_A . L_A^dag, L_B . L_B^dag) and (i L_A . L_A^dag, -i L_B . L_B^dag) with eps = 1.

    Valid eps only when both filters have operator norm at most one.
    """
    return TransformSpec((
        (SuperOperatorSpec.conjugation(la), SuperOperatorSpec.conjugation(lb)),
        (SuperOperatorSpec.conjugation(la, 1j), SuperOperatorSpec.conjugation(lb, -1j)),
    ), 1.0, 1.0)


def theta_check(s: Operator, theta: float, decision_tol: float = DEFAULT_DECISION_TOL,
                criterion_id: str = "theta") -> CriterionReport:
    """||rho - cos(theta) rho_A (x) rho_B||_CCN <= sqrt((1 - cos(theta) tr rho_A^2)(1 - cos(theta) tr rho_B^2))."""
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    rho, rho_a, rho_b, na, nb = _marginals(s)
    c = np.cos(theta)
    lhs = ccn(rho - c * np.kron(rho_a, rho_b), na, nb)
    pur_a = hs_inner(rho_a, rho_a).real
    pur_b = hs_inner(rho_b, rho_b).real
    bound = np.sqrt(max(1 - c * pur_a, 0.0) * max(1 - c * pur_b, 0.0))
    return _report(criterion_id, lhs, bound, {"theta": theta, "purity_a": pur_a, "purity_b": pur_b}, decision_tol)


def zhang_check(s: Operator, decision_tol: float = DEFAULT_DECISION_TOL) -> CriterionReport:
    """Zhang et al. criterion ||rho - rho_A (x) rho_B||_CCN <= sqrt((1 - tr rho_A^2)(1 - tr rho_B^2)).

    This is the theta = 0 member of the theta family. It detects every state the
    RC detects. The theta = pi member is weaker than the RC, so it is not used here.
    """
    return theta_check(s, 0.0, decision_tol, criterion_id="zhang")


def filter_check(s: Operator, la, lb, normalize: bool = True,
                 decision_tol: float = DEFAULT_DECISION_TOL) -> CriterionReport:
    """Local-filter RC: ||(L_A (x) L_B) rho (L_A (x) L_B)^dag||_CCN <= 1 for contractive filters."""
    rho, na, nb = operator_dims(s)
    la = as_matrix(la, "L_A")
    lb = as_matrix(lb, "L_B")
    if la.shape != (na, na) or lb.shape != (nb, nb):
        raise DimensionError(f"filter shapes {la.shape}, {lb.shape} do not match dims ({na}, {nb})")
    norms = []
    scaled = []
    for name, op in (("L_A", la), ("L_B", lb)):
        nrm = float(singular_values(op)[0])
        if nrm == 0.0:
            raise ValueError(f"filter {name} is zero")
        if normalize:
            op = op / nrm
        elif nrm > 1 + 1e-12:
            raise FilterNotContractiveError(name, nrm)
        norms.append(nrm)
        scaled.append(op)
    k = np.kron(*scaled)
    lhs = ccn(k @ rho @ k.conj().T, na, nb)
    return _report("filter", lhs, 1.0, {"normalize": normalize, "opnorm_a": norms[0], "opnorm_b": norms[1]},
                   decision_tol)
