"""Hamiltonian variational ansatz circuits for the Lipkin and Agassi models."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import apply_exp
from .models import AgassiParams, LipkinParams, build_agassi, build_lipkin
from .paulis import PauliSum

KINDS = ("lipkin_symmetric", "lipkin_free", "agassi_hva", "custom")
WARM_START_WIDTH = 1e-4


@dataclass(frozen=True)
class AnsatzProgram:
    """Ordered gates ``exp(-i theta[slot] G)``; gates may share a slot.

    ``size`` is the qubit count for Lipkin programs and ``j`` for Agassi.
    """

    kind: str
    size: int
    layers: int
    n_qubits: int
    gates: tuple[tuple[PauliSum, int], ...]
    n_params: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        slots = {s for _, s in self.gates}
        if slots != set(range(self.n_params)):
            raise ValueError("parameter slots must cover 0..n_params-1 without gaps")

    @property
    def per_layer(self) -> int:
        return self.n_params // self.layers if self.layers else 0

    def check_params(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        return theta


def build_lipkin_ansatz(n: int, layers: int, symmetric: bool) -> AnsatzProgram:
    """Layers of ``prod_j exp(-i g Z_j) prod_{j<k} exp(-i t X_j X_k)``.

    Read as an operator product, so within a layer the XX rotations act on
    the state first and the Z rotations last. Slots per layer are numbered
    Z before XX. With ``symmetric`` all Z gates of a layer share one angle and
    all XX gates share another, making the circuit invariant under qubit
    relabelling.
    """
    if n < 2 or layers < 0:
        raise ValueError(f"invalid sizes n={n}, layers={layers}")
    z_gates = [PauliSum.single(n, {a: "Z"}) for a in range(n)]
    xx_gates = [PauliSum.single(n, {a: "X", b: "X"}) for a in range(n) for b in range(a + 1, n)]
    per_layer = 2 if symmetric else n + len(xx_gates)
    gates = []
    for layer in range(layers):
        base = layer * per_layer
        if symmetric:
            z_slots = [base] * n
            xx_slots = [base + 1] * len(xx_gates)
        else:
            z_slots = list(range(base, base + n))
            xx_slots = list(range(base + n, base + per_layer))
        gates += zip(xx_gates, xx_slots)
        gates += zip(z_gates, z_slots)
    kind = "lipkin_symmetric" if symmetric else "lipkin_free"
    return AnsatzProgram(kind, n, layers, n, tuple(gates), layers * per_layer)


def build_agassi_ansatz(j: int, layers: int) -> AnsatzProgram:
    """Layers of ``exp(-i t1 H1) exp(-i t2 H2) exp(-i t3 H3)``, slots (t1, t2, t3).

    Operator-product order: H3 acts first and H1 last. Since the reference
    state is an H1 eigenstate, applying H1 first would waste a parameter.
    """
    if j < 1 or layers < 0:
        raise ValueError(f"invalid sizes j={j}, layers={layers}")
    gens = build_agassi(AgassiParams(j)).generators
    gates = tuple((gens[k], 3 * layer + k) for layer in range(layers) for k in (2, 1, 0))
    return AnsatzProgram("agassi_hva", j, layers, 4 * j, gates, 3 * layers)


def build_ansatz(kind: str, size: int, layers: int) -> AnsatzProgram:
    if kind == "agassi_hva" or kind == "agassi":
        return build_agassi_ansatz(size, layers)
    if kind in ("lipkin_symmetric", "lipkin_free"):
        return build_lipkin_ansatz(size, layers, symmetric=kind == "lipkin_symmetric")
    raise ValueError(f"unknown ansatz kind {kind!r}")


def model_for(kind: str, size: int, **couplings):
    if kind.startswith("lipkin"):
        return build_lipkin(LipkinParams(size, **couplings))
    return build_agassi(AgassiParams(size, **couplings))


def run_ansatz(a: AnsatzProgram, theta, psi0: np.ndarray) -> np.ndarray:
    theta = a.check_params(theta)
    psi = np.array(psi0, dtype=complex)
    for g, slot in a.gates:
        psi = apply_exp(g, theta[slot], psi)
    return psi


def warm_start_extend(prev, prev_program: AnsatzProgram, rng: np.random.Generator) -> np.ndarray:
    """Copy a trained Agassi parameter vector and append one near-identity layer.

    The new layer is applied last, so at initialisation the extended circuit
    reproduces the old state up to O(1e-4) rotations.
    """
    if prev_program.kind != "agassi_hva":
        raise ValueError(f"warm starts need an agassi_hva program, got {prev_program.kind}")
    prev = prev_program.check_params(prev)
    fresh = rng.uniform(-WARM_START_WIDTH, WARM_START_WIDTH, size=3)
    return np.concatenate([prev, fresh])


def save_parameters(path, theta, program: AnsatzProgram, seed: int | None = None) -> None:
    theta = program.check_params(theta)
    meta = {
        "kind": program.kind,
        "n": program.n_qubits,
        "j": program.size if program.kind == "agassi_hva" else None,
        "layers": program.layers,
        "seed": seed,
        "values": [float(x) for x in theta],
    }
    Path(path).write_text(json.dumps(meta, indent=2))


def load_parameters(path) -> tuple[np.ndarray, dict]:
    meta = json.loads(Path(path).read_text())
    return np.array(meta.pop("values"), dtype=float), meta
