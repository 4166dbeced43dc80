import numpy as np
import pytest

from schmidt_scope import max_entangled, validate_density


def ket(*bits, n=2):
    v = np.zeros(n ** len(bits), dtype=complex)
    idx = 0
    for b in bits:
        idx = idx * n + b
    v[idx] = 1
    return v


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def brute_realign(rho, na, nb):
    """R[(i,j),(k,l)] = rho[(i,k),(j,l)], written as explicit loops."""
    r = np.zeros((na * na, nb * nb), dtype=complex)
    for i in range(na):
        for j in range(na):
            for k in range(nb):
                for l in range(nb):
                    r[i * na + j, k * nb + l] = rho[i * nb + k, j * nb + l]
    return r


def brute_esp(values):
    """Elementary symmetric polynomials via numpy's polynomial-from-roots."""
    # prod(x + mu) = x^d + e1 x^(d-1) + ... + ed; np.poly gives prod(x - r)
    coeffs = np.poly(-np.asarray(values, dtype=float))
    return coeffs[1:].real


@pytest.fixture
def bell():
    return max_entangled(2)


@pytest.fixture
def mixed4():
    return validate_density(np.eye(4) / 4, 2, 2)


@pytest.fixture
def product00():
    return validate_density(proj(ket(0, 0)), 2, 2)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
