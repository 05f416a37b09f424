"""Fermionic ladder-operator sums and the Jordan-Wigner map to Pauli sums."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .paulis import DROP_TOL, PauliSum


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Single-particle mode ``(sigma, m)`` of the two-level model.

    ``sigma`` is the level (-1 lower, +1 upper) and ``m`` the magnetic label,
    one of -j..-1, 1..j. The lower level occupies qubits 0..2j-1 with ``m``
    ascending; the upper level follows.
    """

    sigma: int
    m: int

    def qubit(self, j: int) -> int:
        if self.sigma not in (-1, 1):
            raise ValueError(f"sigma must be -1 or +1, got {self.sigma}")
        if self.m == 0 or abs(self.m) > j:
            raise ValueError(f"m={self.m} is not a valid label for j={j}")
        rank = self.m + j if self.m < 0 else self.m + j - 1
        return rank + (2 * j if self.sigma == 1 else 0)

    @staticmethod
    def from_qubit(p: int, j: int) -> ModeIndex:
        if not 0 <= p < 4 * j:
            raise ValueError(f"qubit {p} out of range for j={j}")
        sigma = 1 if p >= 2 * j else -1
        rank = p % (2 * j)
        m = rank - j if rank < j else rank - j + 1
        return ModeIndex(sigma, m)


def magnetic_labels(j: int) -> list[int]:
    return [m for m in range(-j, j + 1) if m != 0]


# A factor is (mode, dagger). Modes are plain qubit indices once mapped.
Factor = tuple[int, bool]


class FermionOpSum:
    """Sum of coefficient-weighted products of ladder operators on integer modes.

    Each term is ``(coeff, ((mode, dagger), ...))`` read left to right; the
    empty product is the identity. Mode labels from :class:`ModeIndex` are
    turned into integers with :meth:`ModeIndex.qubit` before construction.
    """

    def __init__(self, terms: Iterable[tuple[complex, Sequence[Factor]]] = ()):
        self.terms: tuple[tuple[complex, tuple[Factor, ...]], ...] = tuple(
            (complex(c), tuple((int(p), bool(d)) for p, d in f)) for c, f in terms
        )

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> FermionOpSum:
        return cls([(coeff, ())])

    @classmethod
    def create(cls, p: int) -> FermionOpSum:
        return cls([(1.0, ((p, True),))])

    @classmethod
    def annihilate(cls, p: int) -> FermionOpSum:
        return cls([(1.0, ((p, False),))])

    @classmethod
    def number(cls, p: int) -> FermionOpSum:
        return cls([(1.0, ((p, True), (p, False)))])

    def __repr__(self) -> str:
        def fmt(f):
            return " ".join(f"c{'†' if d else ''}_{p}" for p, d in f) or "1"

        return "FermionOpSum(" + " + ".join(f"({c:.4g}) {fmt(f)}" for c, f in self.terms) + ")"

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = FermionOpSum.identity(other)
        return FermionOpSum(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return FermionOpSum((c * other, f) for c, f in self.terms)
        if not isinstance(other, FermionOpSum):
            return NotImplemented
        return FermionOpSum((ca * cb, fa + fb) for ca, fa in self.terms for cb, fb in other.terms)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> FermionOpSum:
        out = FermionOpSum.identity()
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> FermionOpSum:
        return FermionOpSum(
            (complex(c).conjugate(), tuple((p, not d) for p, d in reversed(f))) for c, f in self.terms
        )

    def max_mode(self) -> int:
        return max((p for _, f in self.terms for p, _ in f), default=-1)

    def normal_ordered(self) -> FermionOpSum:
        """Rewrite with creators left of annihilators, each block in descending mode order.

        Uses the canonical anticommutators; equal-mode products such as
        ``c_p c_p`` vanish and identical terms are merged.
        """
        collected: dict[tuple[Factor, ...], complex] = {}
        stack = list(self.terms)
        while stack:
            coeff, factors = stack.pop()
            factors = list(factors)
            # bubble sort with anticommutation; the first swap that needs a
            # contraction spawns an extra term
            for i in range(1, len(factors)):
                k = i
                while k > 0:
                    (pl, dl), (pr, dr) = factors[k - 1], factors[k]
                    if dl == dr:
                        if pl == pr:
                            coeff = 0
                            break
                        if pl < pr:
                            factors[k - 1], factors[k] = factors[k], factors[k - 1]
                            coeff = -coeff
                            k -= 1
                            continue
                        break
                    if dr and not dl:
                        # c_p c†_q = delta_pq - c†_q c_p
                        if pl == pr:
                            stack.append((coeff, tuple(factors[: k - 1] + factors[k + 1:])))
                        factors[k - 1], factors[k] = factors[k], factors[k - 1]
                        coeff = -coeff
                        k -= 1
                        continue
                    break
                if coeff == 0:
                    break
            if coeff == 0:
                continue
            key = tuple(factors)
            collected[key] = collected.get(key, 0j) + coeff
        return FermionOpSum(
            (c, f) for f, c in sorted(collected.items(), key=lambda kv: (len(kv[0]), kv[0])) if abs(c) >= DROP_TOL
        )

    def is_zero(self) -> bool:
        return len(self.normal_ordered()) == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, FermionOpSum):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None


def _ladder_pauli(p: int, dagger: bool, n_modes: int) -> PauliSum:
    # c_p = Z_0 ... Z_{p-1} (X_p + i Y_p) / 2 ; |1> is occupied
    z_tail = "Z" * p
    pad = "I" * (n_modes - p - 1)
    sign = -1j if dagger else 1j
    return PauliSum({z_tail + "X" + pad: 0.5, z_tail + "Y" + pad: 0.5 * sign}, n_modes)


def jordan_wigner(f: FermionOpSum, n_modes: int) -> PauliSum:
    """Map a fermionic operator sum onto qubits, mode ``p`` on qubit ``p``."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    if f.max_mode() >= n_modes:
        raise ValueError(f"mode {f.max_mode()} out of range for {n_modes} modes")
    cache: dict[Factor, PauliSum] = {}
    out: dict[str, complex] = {}
    for coeff, factors in f.terms:
        term = PauliSum.identity(n_modes, coeff)
        for factor in factors:
            if factor not in cache:
                cache[factor] = _ladder_pauli(factor[0], factor[1], n_modes)
            term = term * cache[factor]
        for k, v in term.terms.items():
            out[k] = out.get(k, 0j) + v
    return PauliSum(out, n_modes)
