"""Deterministic generators for test states.

Randomness comes from :class:`SeededStream`: numpy's PCG64 bit generator
(PCG-XSL-RR 128/64) seeded with a 64-bit integer, with doubles formed from the
top 53 bits of each raw output and normals from the Box-Muller transform. Only
raw bit-generator output is used, so streams do not depend on numpy's
distribution samplers, which are not version-stable.
"""

import numpy as np

from .errors import DimensionError
from .linalg import BipartiteState, Tolerances, DEFAULT_TOLERANCES, as_matrix, kron, validate_density

PRNG_NAME = "pcg64-boxmuller-v1"


class SeededStream:
    """Portable stream of uniforms and Gaussians from one 64-bit seed."""

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self._bits = np.random.PCG64(seed)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in (0, 1]."""
        raw = self._bits.random_raw(size)
        return ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53

    def normal(self, size: int) -> np.ndarray:
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:size]

    def complex_normal(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        z = self.normal(2 * n)
        return (z[0::2] + 1j * z[1::2]).reshape(shape)


def _check_dim(n: int, name: str = "n") -> None:
    if n < 2:
        raise DimensionError(f"{name} must be >= 2, got {n}")


def _check_unit(x: float, name: str) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def max_entangled_vector(n: int) -> np.ndarray:
    _check_dim(n)
    return np.eye(n, dtype=np.complex128).reshape(-1) / np.sqrt(n)


def max_entangled(n: int) -> BipartiteState:
    """|psi><psi| with psi = sum_a |a>|a> / sqrt(n)."""
    psi = max_entangled_vector(n)
    return validate_density(np.outer(psi, psi.conj()), n, n)


def product_state(ra, rb, tols: Tolerances = DEFAULT_TOLERANCES) -> BipartiteState:
    ra = as_matrix(ra, "ra")
    rb = as_matrix(rb, "rb")
    return validate_density(kron(ra, rb), ra.shape[0], rb.shape[0], tols)


def singlet() -> np.ndarray:
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def werner(p: float) -> BipartiteState:
    """Two-qubit Werner state p |Psi-><Psi-| + (1 - p) I/4."""
    _check_unit(p, "p")
    return validate_density(p * singlet() + (1 - p) * np.eye(4) / 4, 2, 2)


def isotropic(f: float, n: int) -> BipartiteState:
    """f Phi + (1 - f) (I - Phi) / (n^2 - 1), Phi the maximally entangled projector."""
    _check_unit(f, "f")
    phi = max_entangled(n).rho
    eye = np.eye(n * n)
    return validate_density(f * phi + (1 - f) * (eye - phi) / (n * n - 1), n, n)


def _density(stream: SeededStream, n: int) -> np.ndarray:
    g = stream.complex_normal((n, n))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def _pure(stream: SeededStream, n: int) -> np.ndarray:
    v = stream.complex_normal((n,))
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_density(n: int, seed: int) -> np.ndarray:
    """G G^dag / tr(G G^dag) with G an n x n standard complex Gaussian matrix."""
    _check_dim(n)
    return _density(SeededStream(seed), n)


def random_pure_vector(na: int, nb: int, seed: int) -> np.ndarray:
    _check_dim(na, "na")
    _check_dim(nb, "nb")
    v = SeededStream(seed).complex_normal((na * nb,))
    return v / np.linalg.norm(v)


def random_pure(na: int, nb: int, seed: int) -> BipartiteState:
    v = random_pure_vector(na, nb, seed)
    return validate_density(np.outer(v, v.conj()), na, nb)


def random_state(na: int, nb: int, seed: int) -> BipartiteState:
    """Random full-rank state on C^na (x) C^nb (see :func:`random_density`)."""
    _check_dim(na, "na")
    _check_dim(nb, "nb")
    return validate_density(random_density(na * nb, seed), na, nb)


def random_separable(na: int, nb: int, seed: int, terms: int = 10, pure_terms: bool = True) -> BipartiteState:
    """Convex mixture of ``terms`` random product states.

    Weights are normalized i.i.d. uniforms. With ``pure_terms`` the factors are
    random pure states (extreme points, so small mixtures sit close to the
    separable boundary); otherwise random full-rank densities. This samples a
    proper subset of the separable set, but every sample is separable.
    """
    _check_dim(na, "na")
    _check_dim(nb, "nb")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    stream = SeededStream(seed)
    w = stream.uniform(terms)
    w = w / w.sum()
    local = _pure if pure_terms else _density
    rho = np.zeros((na * nb, na * nb), dtype=np.complex128)
    for wk in w:
        rho += wk * np.kron(local(stream, na), local(stream, nb))
    return validate_density(rho, na, nb)


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar unitary from the QR decomposition of a complex Gaussian matrix."""
    q, r = np.linalg.qr(SeededStream(seed).complex_normal((n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))
