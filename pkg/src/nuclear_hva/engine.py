"""Statevector engine: exact generator exponentials, expectations, spectrum bounds.

States are plain complex numpy vectors of length ``2**n`` in the little-endian
basis. Every operation returns a new array and leaves its input untouched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .paulis import DROP_TOL, PauliSum, _masks, _parity_table, pauli_sum_apply

log = logging.getLogger(__name__)

KRYLOV_DIM = 30
EXP_TOL = 1e-10
SPECTRAL_MAX_QUBITS = 14
SPECTRAL_MAX_BLOCK = 2048
DENSE_MAX_QUBITS = 10


class ConvergenceError(RuntimeError):
    """Raised when an iterative kernel misses its tolerance within its budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


def _check_size(h: PauliSum, psi: np.ndarray) -> None:
    if psi.shape[0] != 1 << h.n_qubits:
        raise ValueError(f"state of length {psi.shape[0]} does not match {h.n_qubits} qubits")


def _require_hermitian(h: PauliSum) -> None:
    if not h.is_hermitian():
        raise ValueError("operator is not Hermitian")


def expectation(h: PauliSum, psi: np.ndarray) -> float:
    """Return Re<psi|H|psi>."""
    _require_hermitian(h)
    _check_size(h, psi)
    val = np.vdot(psi, pauli_sum_apply(h, psi))
    scale = max(1.0, abs(val.real), h.norm_bound())
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def particle_number(psi: np.ndarray, j: int) -> float:
    """<N1 + N-1> for a state on 4j qubits; occupations are the bit counts."""
    n = 4 * j
    if psi.shape[0] != 1 << n:
        raise ValueError(f"state of length {psi.shape[0]} is not a {n}-qubit state")
    return float(np.dot(np.abs(psi) ** 2, _popcounts(n)))


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


# --------------------------------------------------------------------------
# exponentials
# --------------------------------------------------------------------------


class _CommutingExp:
    """exp(-i theta G) as a product of Pauli rotations; valid when terms commute."""

    kind = "commuting"

    def __init__(self, g: PauliSum):
        n = g.n_qubits
        dim = 1 << n
        self.index = np.arange(dim, dtype=np.int64)
        parity = _parity_table(n)
        self.diagonal = np.zeros(dim)
        self.rotations = []
        for letters, coeff in g.terms.items():
            x, z, ny = _masks(letters)
            d = (1j ** ny) * parity[self.index & z]
            if x == 0:
                self.diagonal += coeff.real * d.real
            else:
                self.rotations.append((coeff.real, x, d))
        self.has_diagonal = bool(np.any(self.diagonal))

    def apply(self, theta: float, psi: np.ndarray) -> np.ndarray:
        out = psi * np.exp(-1j * theta * self.diagonal) if self.has_diagonal else psi.copy()
        for c, x, d in self.rotations:
            a = theta * c
            out = np.cos(a) * out - 1j * np.sin(a) * (d * out)[self.index ^ x]
        return out


class _SpectralExp:
    """exp(-i theta G) through cached eigendecompositions of G's connected blocks.

    G is block diagonal over the connected components of its sparsity graph,
    so each block is diagonalised once and reused for every angle.
    """

    kind = "spectral"

    def __init__(self, g: PauliSum, max_block: int = SPECTRAL_MAX_BLOCK):
        mat = g.to_sparse().tocsr()
        dim = mat.shape[0]
        n_comp, labels = connected_components(abs(mat) > DROP_TOL, directed=False)
        order = np.argsort(labels, kind="stable")
        bounds = np.searchsorted(labels[order], np.arange(n_comp + 1))
        by_size: dict[int, list[np.ndarray]] = {}
        for c in range(n_comp):
            members = order[bounds[c]:bounds[c + 1]]
            by_size.setdefault(len(members), []).append(members)
        if max(by_size) > max_block:
            raise ValueError(f"largest block {max(by_size)} exceeds {max_block}")
        self.diag_index = np.zeros(0, dtype=np.int64)
        self.diag_values = np.zeros(0)
        self.groups = []
        diag = mat.diagonal().real
        for size, blocks in sorted(by_size.items()):
            idx = np.array(blocks, dtype=np.int64)
            if size == 1:
                self.diag_index = idx[:, 0]
                self.diag_values = diag[idx[:, 0]]
                continue
            evals = np.empty((len(blocks), size))
            evecs = np.empty((len(blocks), size, size), dtype=complex)
            for b, members in enumerate(idx):
                block = mat[members][:, members].toarray()
                evals[b], evecs[b] = np.linalg.eigh(block)
            self.groups.append((idx, evals, evecs))
        self.dim = dim

    def apply(self, theta: float, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi, dtype=complex)
        if len(self.diag_index):
            out[self.diag_index] = psi[self.diag_index] * np.exp(-1j * theta * self.diag_values)
        for idx, evals, evecs in self.groups:
            amps = psi[idx]
            live = np.flatnonzero(np.any(amps != 0, axis=1))
            if len(live) == 0:
                continue
            if len(live) < len(idx):
                idx, evals, evecs, amps = idx[live], evals[live], evecs[live], amps[live]
            coeffs = np.einsum("bsk,bs->bk", evecs.conj(), amps)
            coeffs *= np.exp(-1j * theta * evals)
            out[idx] = np.einsum("bsk,bk->bs", evecs, coeffs)
        return out


class _KrylovExp:
    kind = "krylov"

    def __init__(self, g: PauliSum, krylov_dim: int = KRYLOV_DIM, tol: float = EXP_TOL):
        self.g = g
        self.krylov_dim = krylov_dim
        self.tol = tol

    def apply(self, theta: float, psi: np.ndarray) -> np.ndarray:
        return krylov_expm_multiply(
            lambda v: pauli_sum_apply(self.g, v), psi, theta, krylov_dim=self.krylov_dim, tol=self.tol
        )


def exp_plan(g: PauliSum, method: str = "auto"):
    """Return a reusable object whose ``apply(theta, psi)`` gives exp(-i theta g) psi.

    ``auto`` picks the commuting-term product when all terms commute, the
    cached block eigendecomposition for up to ``SPECTRAL_MAX_QUBITS`` qubits,
    and Lanczos-Krylov otherwise. Plans are cached on the operator.
    """
    _require_hermitian(g)
    cache = g.__dict__.setdefault("_exp_plans", {})
    if method in cache:
        return cache[method]
    if method == "auto":
        if g.terms_commute():
            plan = _CommutingExp(g)
        elif g.n_qubits <= SPECTRAL_MAX_QUBITS:
            try:
                plan = _SpectralExp(g)
            except ValueError:
                plan = _KrylovExp(g)
        else:
            plan = _KrylovExp(g)
    elif method == "commuting":
        if not g.terms_commute():
            raise ValueError("generator terms do not all commute")
        plan = _CommutingExp(g)
    elif method == "spectral":
        plan = _SpectralExp(g)
    elif method == "krylov":
        plan = _KrylovExp(g)
    else:
        raise ValueError(f"unknown exponential method {method!r}")
    cache[method] = plan
    return plan


def apply_exp(g: PauliSum, theta: float, psi: np.ndarray, method: str = "auto") -> np.ndarray:
    """Return exp(-i theta g)|psi> for a Hermitian Pauli sum ``g``."""
    _check_size(g, psi)
    if theta == 0:
        return psi.copy()
    return exp_plan(g, method).apply(float(theta), psi)


def _lanczos_basis(matvec, v: np.ndarray, m: int, breakdown: float):
    """Lanczos with full reorthogonalisation; returns (V, alpha, beta, beta_last)."""
    beta0 = np.linalg.norm(v)
    basis = [v / beta0]
    alpha, beta = [], []
    for k in range(m):
        w = matvec(basis[k])
        a = np.vdot(basis[k], w).real
        w = w - a * basis[k]
        if k > 0:
            w = w - beta[-1] * basis[k - 1]
        stacked = np.array(basis)
        w = w - stacked.T @ (stacked.conj() @ w)
        w = w - stacked.T @ (stacked.conj() @ w)
        b = np.linalg.norm(w)
        alpha.append(a)
        if b < breakdown or k == m - 1:
            return np.array(basis), np.array(alpha), np.array(beta), b
        beta.append(b)
        basis.append(w / b)
    raise AssertionError("unreachable")


def _tridiag_eigh(alpha: np.ndarray, beta: np.ndarray):
    from scipy.linalg import eigh_tridiagonal

    if len(alpha) == 1:
        return alpha.copy(), np.ones((1, 1))
    return eigh_tridiagonal(alpha, beta)


def krylov_expm_multiply(
    matvec,
    psi: np.ndarray,
    t: float,
    krylov_dim: int = KRYLOV_DIM,
    tol: float = EXP_TOL,
    max_substeps: int = 10_000,
) -> np.ndarray:
    """exp(-i t A) psi for Hermitian A given as ``matvec``.

    Each restart builds one Lanczos basis and takes the largest substep
    whose a-posteriori error estimate ``beta_m |e_m^T exp(-i tau T) e_1|``
    stays within its share of ``tol``.
    """
    out = np.array(psi, dtype=complex)
    norm = np.linalg.norm(out)
    if norm == 0 or t == 0:
        return out
    remaining = float(t)
    total = abs(remaining)
    for _ in range(max_substeps):
        basis, alpha, beta, b_last = _lanczos_basis(matvec, out, krylov_dim, breakdown=1e-13 * norm)
        evals, evecs = _tridiag_eigh(alpha, beta)
        exact = b_last < 1e-13 * norm

        def propagate(tau):
            return evecs @ (np.exp(-1j * tau * evals) * evecs[0].conj())

        tau = remaining
        while True:
            y = propagate(tau)
            err = 0.0 if exact else b_last * abs(y[-1])
            if err <= tol * max(abs(tau) / total, 1e-3):
                break
            tau *= 0.5
            if abs(tau) < 1e-14 * total:
                raise ConvergenceError("Krylov exponential failed to converge", err)
        out = norm * (basis.T @ y)
        remaining -= tau
        if abs(remaining) <= 1e-15 * total:
            return out
    raise ConvergenceError("Krylov exponential exceeded its substep budget", abs(remaining))


# --------------------------------------------------------------------------
# spectrum bounds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumBounds:
    e_min: float
    e_max: float
    residual_min: float = 0.0
    residual_max: float = 0.0
    method: str = "lanczos"

    def __post_init__(self):
        if self.e_min > self.e_max:
            raise ValueError("e_min exceeds e_max")


def lanczos_extremal(
    matvec,
    v0: np.ndarray,
    krylov_dim: int = 80,
    tol: float = 1e-9,
    max_restarts: int = 200,
) -> tuple[float, np.ndarray, float]:
    """Smallest eigenpair of a Hermitian operator by explicitly restarted Lanczos.

    Returns ``(value, vector, residual_norm)``; the residual bounds the
    distance to the nearest true eigenvalue.
    """
    v = v0 / np.linalg.norm(v0)
    res = np.inf
    for _ in range(max_restarts):
        basis, alpha, beta, b_last = _lanczos_basis(matvec, v, krylov_dim, breakdown=1e-12)
        evals, evecs = _tridiag_eigh(alpha, beta)
        theta, s = evals[0], evecs[:, 0]
        v = basis.T @ s
        v /= np.linalg.norm(v)
        res = np.linalg.norm(matvec(v) - theta * v)
        if res <= tol * max(1.0, abs(theta)) or b_last < 1e-12:
            return float(theta), v, float(res)
    raise ConvergenceError("Lanczos eigensolver did not converge", res)


def _start_vector(dim: int, basis: np.ndarray | None, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = np.zeros(dim, dtype=complex)
    support = np.arange(dim) if basis is None else np.asarray(basis)
    v[support] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
    return v


def dense_spectrum(h: PauliSum, basis: np.ndarray | None = None) -> np.ndarray:
    """All eigenvalues by dense diagonalisation, optionally on a basis subset."""
    mat = h.to_sparse()
    if basis is not None:
        mat = mat[basis][:, basis]
    return np.linalg.eigvalsh(mat.toarray())


def extremal_eigs(
    h: PauliSum,
    basis: np.ndarray | None = None,
    method: str = "lanczos",
    tol: float = 1e-9,
    seed: int = 1234,
) -> SpectrumBounds:
    """Smallest and largest eigenvalues of ``h``.

    ``basis`` optionally restricts to the span of those computational basis
    states, which must be an invariant subspace of ``h`` (a particle-number
    sector, say). ``method="dense"`` is the brute-force oracle, allowed up to
    ``DENSE_MAX_QUBITS`` qubits unless a basis subset is given.
    """
    _require_hermitian(h)
    if method == "dense":
        if basis is None and h.n_qubits > DENSE_MAX_QUBITS:
            raise ValueError(f"dense fallback limited to {DENSE_MAX_QUBITS} qubits")
        w = dense_spectrum(h, basis)
        return SpectrumBounds(float(w[0]), float(w[-1]), method="dense")
    if method != "lanczos":
        raise ValueError(f"unknown eigensolver {method!r}")
    dim = 1 << h.n_qubits
    v0 = _start_vector(dim, basis, seed)
    m = min(80, dim if basis is None else len(basis))
    lo, _, r_lo = lanczos_extremal(lambda v: pauli_sum_apply(h, v), v0, krylov_dim=m, tol=tol)
    hi, _, r_hi = lanczos_extremal(lambda v: -pauli_sum_apply(h, v), v0, krylov_dim=m, tol=tol)
    return SpectrumBounds(lo, -hi, r_lo, r_hi, method="lanczos")


def ground_state(h: PauliSum, basis: np.ndarray | None = None, seed: int = 1234) -> tuple[float, np.ndarray]:
    """Lowest eigenpair by Lanczos; convenience for tests and demos."""
    dim = 1 << h.n_qubits
    v0 = _start_vector(dim, basis, seed)
    m = min(80, dim if basis is None else len(basis))
    e, v, _ = lanczos_extremal(lambda x: pauli_sum_apply(h, x), v0, krylov_dim=m)
    return e, v
