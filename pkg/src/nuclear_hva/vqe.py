"""Energy costs, adjoint gradients and the Adam training loop."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .ansatz import AnsatzProgram, run_ansatz
from .engine import SpectrumBounds, apply_exp, expectation, extremal_eigs
from .paulis import PauliSum, pauli_sum_apply

NORMALIZED_SLACK = 1e-8


@dataclass(frozen=True)
class CostContext:
    hamiltonian: PauliSum
    ansatz: AnsatzProgram
    psi0: np.ndarray
    bounds: SpectrumBounds | None = None

    def __post_init__(self):
        if self.hamiltonian.n_qubits != self.ansatz.n_qubits:
            raise ValueError("Hamiltonian and ansatz act on different registers")
        if len(self.psi0) != 1 << self.ansatz.n_qubits:
            raise ValueError("initial state does not match the ansatz register")


def cost(ctx: CostContext, theta) -> float:
    return expectation(ctx.hamiltonian, run_ansatz(ctx.ansatz, theta, ctx.psi0))


def normalize_energy(energy, bounds: SpectrumBounds):
    """Map energies onto [0, 1] using the spectrum's extremal eigenvalues."""
    span = bounds.e_max - bounds.e_min
    if span <= 0:
        raise ValueError("degenerate spectrum: e_max equals e_min")
    e = (np.asarray(energy, dtype=float) - bounds.e_min) / span
    if np.any(e < -NORMALIZED_SLACK) or np.any(e > 1 + NORMALIZED_SLACK):
        raise ValueError(f"normalized energy {e} outside [0, 1]; bounds are wrong")
    e = np.clip(e, 0.0, 1.0)
    return float(e) if e.ndim == 0 else e


def normalized_cost(ctx: CostContext, theta) -> float:
    if ctx.bounds is None:
        raise ValueError("normalized cost needs spectrum bounds in the context")
    return normalize_energy(cost(ctx, theta), ctx.bounds)


def value_and_grad(ctx: CostContext, theta) -> tuple[float, np.ndarray]:
    """Energy and its exact gradient by reverse-mode (adjoint) sweep.

    For ``U = exp(-i t G)``, ``dU/dt = -i G U``; a slot shared by several
    gates accumulates the contribution of each.
    """
    program = ctx.ansatz
    theta = program.check_params(theta)
    phi = run_ansatz(program, theta, ctx.psi0)
    lam = pauli_sum_apply(ctx.hamiltonian, phi)
    energy = float(np.vdot(phi, lam).real)
    grad = np.zeros(program.n_params)
    for g, slot in reversed(program.gates):
        t = theta[slot]
        grad[slot] += 2.0 * np.vdot(lam, pauli_sum_apply(g, phi)).imag
        if t != 0:
            phi = apply_exp(g, -t, phi)
            lam = apply_exp(g, -t, lam)
    return energy, grad


def gradient(ctx: CostContext, theta) -> np.ndarray:
    return value_and_grad(ctx, theta)[1]


def finite_difference_gradient(ctx: CostContext, theta, step: float = 1e-5) -> np.ndarray:
    """Central differences; a test oracle, not used for training."""
    theta = ctx.ansatz.check_params(theta)
    grad = np.zeros_like(theta)
    for k in range(len(theta)):
        up, down = theta.copy(), theta.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (cost(ctx, up) - cost(ctx, down)) / (2 * step)
    return grad


@dataclass(frozen=True)
class AdamState:
    t: int
    m: np.ndarray
    v: np.ndarray
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def init(cls, n_params: int, **hyper) -> AdamState:
        return cls(0, np.zeros(n_params), np.zeros(n_params), **hyper)


def adam_step(s: AdamState, grad, theta) -> tuple[AdamState, np.ndarray]:
    grad = np.asarray(grad, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if grad.shape != s.m.shape or theta.shape != s.m.shape:
        raise ValueError("gradient, parameters and optimizer state have different lengths")
    t = s.t + 1
    m = s.beta1 * s.m + (1 - s.beta1) * grad
    v = s.beta2 * s.v + (1 - s.beta2) * grad**2
    m_hat = m / (1 - s.beta1**t)
    v_hat = v / (1 - s.beta2**t)
    new_theta = theta - s.lr * m_hat / (np.sqrt(v_hat) + s.eps)
    return replace(s, t=t, m=m, v=v), new_theta


def percent_error(energy, e_exact: float):
    if e_exact == 0:
        raise ValueError("percentage error is undefined for a zero reference energy")
    return 100.0 * np.abs(np.asarray(energy) - e_exact) / abs(e_exact)


@dataclass
class TrainTrace:
    """Energies after each optimizer step; ``energies[k]`` follows update ``k + 1``."""

    energies: np.ndarray
    percent_error: np.ndarray
    final_params: np.ndarray
    initial_params: np.ndarray
    initial_energy: float
    e_exact: float
    seed: int | None = None
    config: dict = field(default_factory=dict)

    @property
    def final_percent_error(self) -> float:
        return float(self.percent_error[-1])

    def write(self, csv_path, json_path=None) -> None:
        csv_path = Path(csv_path)
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "energy", "percent_error"])
            for k, (e, p) in enumerate(zip(self.energies, self.percent_error), 1):
                writer.writerow([k, repr(float(e)), repr(float(p))])
        json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
        json_path.write_text(json.dumps(self.sidecar(), indent=2))

    def sidecar(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "e_exact": self.e_exact,
            "initial_energy": self.initial_energy,
            "initial_params": [float(x) for x in self.initial_params],
            "final_params": [float(x) for x in self.final_params],
        }

    @classmethod
    def read(cls, csv_path, json_path=None) -> TrainTrace:
        csv_path = Path(csv_path)
        with csv_path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        side = json.loads((Path(json_path) if json_path else csv_path.with_suffix(".json")).read_text())
        return cls(
            energies=np.array([float(r["energy"]) for r in rows]),
            percent_error=np.array([float(r["percent_error"]) for r in rows]),
            final_params=np.array(side["final_params"]),
            initial_params=np.array(side["initial_params"]),
            initial_energy=side["initial_energy"],
            e_exact=side["e_exact"],
            seed=side["seed"],
            config=side["config"],
        )


def train(
    ctx: CostContext,
    theta0=None,
    steps: int = 500,
    rng_seed: int = 0,
    init_range: tuple[float, float] = (-10.0, 10.0),
    e_exact: float | None = None,
    lr: float = 0.05,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> TrainTrace:
    """Run a fixed budget of Adam steps from ``theta0``.

    When ``theta0`` is None the start point is drawn uniformly from
    ``init_range`` with ``rng_seed``. The reference energy defaults to the
    lowest eigenvalue of the context's Hamiltonian.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if theta0 is None:
        rng = np.random.default_rng(rng_seed)
        theta0 = rng.uniform(*init_range, size=ctx.ansatz.n_params)
    theta = ctx.ansatz.check_params(theta0).copy()
    if e_exact is None:
        e_exact = ctx.bounds.e_min if ctx.bounds is not None else extremal_eigs(ctx.hamiltonian).e_min
    state = AdamState.init(len(theta), lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    energy, grad = value_and_grad(ctx, theta)
    initial_energy = energy
    energies = np.empty(steps)
    for k in range(steps):
        state, theta = adam_step(state, grad, theta)
        if k == steps - 1:
            energy = cost(ctx, theta)
        else:
            energy, grad = value_and_grad(ctx, theta)
        energies[k] = energy
    return TrainTrace(
        energies=energies,
        percent_error=percent_error(energies, e_exact),
        final_params=theta,
        initial_params=np.asarray(theta0, dtype=float),
        initial_energy=initial_energy,
        e_exact=float(e_exact),
        seed=rng_seed,
        config={"kind": ctx.ansatz.kind, "size": ctx.ansatz.size, "layers": ctx.ansatz.layers,
                "steps": steps, "lr": lr, "beta1": beta1, "beta2": beta2, "eps": eps},
    )
