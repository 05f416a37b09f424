"""Brute-force dense oracles shared by the test modules.

Nothing here goes through PauliSum or the Jordan-Wigner code under test:
matrices are assembled from explicit Kronecker products.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, removes an occupied |1>


def embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Operator acting with ``ops[q]`` on qubit q (bit q of the index)."""
    mat = np.eye(1)
    for q in reversed(range(n)):
        mat = np.kron(mat, ops.get(q, I2))
    return mat


def dense_annihilator(p: int, n: int) -> np.ndarray:
    return embed({**{q: Z for q in range(p)}, p: LOWER}, n)


def qubit_of(sigma: int, m: int, j: int) -> int:
    labels = [k for k in range(-j, j + 1) if k != 0]
    return labels.index(m) + (2 * j if sigma == 1 else 0)


def dense_agassi(j: int, eps: float, V: float, g: float, beta: float):
    """Dense (H_full, H_penalized, N) for the Agassi model from ladder matrices."""
    n = 4 * j
    c = {(s, m): dense_annihilator(qubit_of(s, m, j), n) for s in (-1, 1) for m in range(-j, j + 1) if m}
    cd = {k: v.conj().T for k, v in c.items()}
    ms = [m for m in range(-j, j + 1) if m]
    j0 = 0.5 * sum(cd[1, m] @ c[1, m] - cd[-1, m] @ c[-1, m] for m in ms)
    jp = sum(cd[1, m] @ c[-1, m] for m in ms)
    jm = jp.conj().T
    a = {s: sum(c[s, -m] @ c[s, m] for m in range(1, j + 1)) for s in (-1, 1)}
    pair = sum(a[s].conj().T @ a[t] for s in (-1, 1) for t in (-1, 1))
    h = eps * j0 - V / 2 * (jp @ jp + jm @ jm) - g * pair
    number = sum(cd[k] @ c[k] for k in c)
    excess = number - 2 * j * np.eye(2**n)
    return h, h + beta * excess @ excess, number


def dense_lipkin(n: int, lam: float, h: float) -> np.ndarray:
    out = np.zeros((2**n, 2**n), dtype=complex)
    for a, b in itertools.combinations(range(n), 2):
        out -= lam / n * embed({a: X, b: X}, n)
    for a in range(n):
        out -= h * embed({a: Z}, n)
    return out


def random_letters(rng, n: int) -> str:
    return "".join(rng.choice(list("IXYZ"), size=n))


def random_pauli_dict(rng, n: int, k: int, hermitian: bool = True) -> dict[str, complex]:
    terms = {}
    for _ in range(k):
        coeff = rng.normal()
        if not hermitian:
            coeff = coeff + 1j * rng.normal()
        terms[random_letters(rng, n)] = coeff
    return terms


def dense_from_dict(terms: dict[str, complex], n: int) -> np.ndarray:
    mats = {"I": I2, "X": X, "Y": Y, "Z": Z}
    out = np.zeros((2**n, 2**n), dtype=complex)
    for letters, coeff in terms.items():
        out += coeff * embed({q: mats[ch] for q, ch in enumerate(letters)}, n)
    return out


def random_state(rng, n: int) -> np.ndarray:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def permute_qubits(psi: np.ndarray, perm, n: int) -> np.ndarray:
    """Move the content of qubit q to qubit perm[q]."""
    tensor = psi.reshape([2] * n)
    # reshape axis a is qubit n-1-a
    axes = [n - 1 - q for q in range(n)]
    src = [axes[q] for q in range(n)]
    dst = [n - 1 - perm[q] for q in range(n)]
    return np.moveaxis(tensor, src, dst).reshape(-1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
