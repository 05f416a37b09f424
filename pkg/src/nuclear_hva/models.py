"""Lipkin and Agassi Hamiltonians with their HVA generator decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fermions import FermionOpSum, ModeIndex, jordan_wigner, magnetic_labels
from .paulis import PauliSum


@dataclass(frozen=True)
class LipkinParams:
    n: int
    lam: float = 1.0
    h: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"Lipkin model needs n >= 2, got {self.n}")
        if not (np.isfinite(self.lam) and np.isfinite(self.h)):
            raise ValueError("couplings must be finite")


@dataclass(frozen=True)
class AgassiParams:
    j: int
    epsilon: float = 1.0
    V: float = 0.5
    g: float = 0.5
    beta: float | None = None

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"Agassi model needs j >= 1, got {self.j}")
        if self.beta is None:
            object.__setattr__(self, "beta", default_penalty(self.j, self.epsilon, self.V, self.g))
        if not self.beta > 0:
            raise ValueError(f"penalty weight must be positive, got {self.beta}")

    @property
    def n_qubits(self) -> int:
        return 4 * self.j


def default_penalty(j: int, epsilon: float, V: float, g: float) -> float:
    scale = max(abs(epsilon), abs(V), abs(g))
    return 10.0 * (scale if scale > 0 else 1.0) * j


@dataclass(frozen=True)
class ModelDecomposition:
    """A model Hamiltonian and the generators its HVA layers exponentiate.

    ``full_hamiltonian == sum(w * G for w, G in zip(weights, generators))``.
    For the Agassi model ``penalized_hamiltonian`` adds the half-filling
    penalty and is what VQE minimises.
    """

    name: str
    n_qubits: int
    full_hamiltonian: PauliSum
    generators: tuple[PauliSum, ...]
    weights: tuple[float, ...]
    initial_state_index: int
    penalized_hamiltonian: PauliSum | None = None
    number_operator: PauliSum | None = None
    params: object = field(default=None, compare=False)

    @property
    def target_hamiltonian(self) -> PauliSum:
        return self.penalized_hamiltonian if self.penalized_hamiltonian is not None else self.full_hamiltonian

    def initial_state(self) -> np.ndarray:
        return basis_state(self.n_qubits, self.initial_state_index)

    def sector_indices(self) -> np.ndarray | None:
        """Basis states of the sector the ansatz explores, or None for the full space."""
        if self.name == "agassi":
            return half_filling_indices(self.n_qubits // 4)
        return None


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def build_lipkin(p: LipkinParams) -> ModelDecomposition:
    n = p.n
    xx = PauliSum({_letters(n, {a: "X", b: "X"}): 1.0 for a in range(n) for b in range(a + 1, n)}, n)
    zs = PauliSum({_letters(n, {a: "Z"}): 1.0 for a in range(n)}, n)
    weights = (-p.lam / n, -p.h)
    full = weights[0] * xx + weights[1] * zs
    return ModelDecomposition(
        name="lipkin",
        n_qubits=n,
        full_hamiltonian=full,
        generators=(xx, zs),
        weights=weights,
        initial_state_index=0,
        params=p,
    )


def _letters(n: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(q, "I") for q in range(n))


def build_agassi_operators(j: int) -> dict[str, FermionOpSum]:
    """Collective operators J0, J+, J-, A0, A1, A-1, N1, N-1 over 4j modes."""
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")

    def c(sigma, m):
        return FermionOpSum.annihilate(ModeIndex(sigma, m).qubit(j))

    def cdag(sigma, m):
        return FermionOpSum.create(ModeIndex(sigma, m).qubit(j))

    def n_op(sigma, m):
        return FermionOpSum.number(ModeIndex(sigma, m).qubit(j))

    ms = magnetic_labels(j)
    zero = FermionOpSum()
    j0, jp, n_up, n_down = zero, zero, zero, zero
    for m in ms:
        j0 = j0 + 0.5 * n_op(1, m) - 0.5 * n_op(-1, m)
        jp = jp + cdag(1, m) * c(-1, m)
        n_up = n_up + n_op(1, m)
        n_down = n_down + n_op(-1, m)
    a0, a1, am1 = zero, zero, zero
    for m in range(1, j + 1):
        a0 = a0 + c(1, -m) * c(-1, m) - c(1, m) * c(-1, -m)
        a1 = a1 + c(1, -m) * c(1, m)
        am1 = am1 + c(-1, -m) * c(-1, m)
    return {
        "J0": j0,
        "J+": jp,
        "J-": jp.adjoint(),
        "A0": a0,
        "A1": a1,
        "A-1": am1,
        "N1": n_up,
        "N-1": n_down,
    }


@lru_cache(maxsize=16)
def _agassi_generators(j: int) -> tuple[PauliSum, PauliSum, PauliSum, PauliSum]:
    ops = build_agassi_operators(j)
    n = 4 * j
    h1 = ops["J0"]
    h2 = ops["J+"] * ops["J+"] + ops["J-"] * ops["J-"]
    pairs = [ops["A1"], ops["A-1"]]
    h3 = FermionOpSum()
    for a in pairs:
        for b in pairs:
            h3 = h3 + a.adjoint() * b
    number = ops["N1"] + ops["N-1"]
    gens = tuple(jordan_wigner(f.normal_ordered(), n).real() for f in (h1, h2, h3, number))
    return gens  # type: ignore[return-value]


def build_agassi(p: AgassiParams) -> ModelDecomposition:
    j, n = p.j, p.n_qubits
    h1, h2, h3, number = _agassi_generators(j)
    weights = (p.epsilon, -p.V / 2, -p.g)
    full = weights[0] * h1 + weights[1] * h2 + weights[2] * h3
    excess = number - 2 * j
    penalized = full + p.beta * (excess * excess)
    return ModelDecomposition(
        name="agassi",
        n_qubits=n,
        full_hamiltonian=full,
        generators=(h1, h2, h3),
        weights=weights,
        initial_state_index=(1 << (2 * j)) - 1,
        penalized_hamiltonian=penalized,
        number_operator=number,
        params=p,
    )


def number_operator(j: int) -> PauliSum:
    return _agassi_generators(j)[3]


def half_filling_indices(j: int) -> np.ndarray:
    n = 4 * j
    idx = np.arange(1 << n)
    weight = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        weight += (idx >> q) & 1
    return idx[weight == 2 * j]


def commutes_with_number(h: PauliSum, j: int, tol: float = 1e-10) -> bool:
    """True iff ``[h, N1 + N-1]`` vanishes as a Pauli sum."""
    if h.n_qubits != 4 * j:
        raise ValueError(f"operator acts on {h.n_qubits} qubits, expected {4 * j}")
    return h.commutator(number_operator(j)).is_zero(tol)
