"""Pauli strings, weighted Pauli sums and matrix-free application to statevectors.

Basis convention is little-endian: qubit ``q`` is bit ``q`` of the basis-state
index, and ``letters[q]`` is the Pauli acting on qubit ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

DROP_TOL = 1e-12

# (a, b) -> (phase, a*b) for single-qubit Paulis
_PRODUCT_TABLE: dict[tuple[str, str], tuple[complex, str]] = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_letters(letters: str) -> str:
    letters = letters.upper()
    bad = set(letters) - set("IXYZ")
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {letters!r}")
    return letters


def _masks(letters: str) -> tuple[int, int, int]:
    """Return (flip mask, sign mask, number of Y letters)."""
    x = z = ny = 0
    for q, c in enumerate(letters):
        if c == "X":
            x |= 1 << q
        elif c == "Z":
            z |= 1 << q
        elif c == "Y":
            x |= 1 << q
            z |= 1 << q
            ny += 1
    return x, z, ny


@dataclass(frozen=True)
class PauliString:
    letters: str
    coefficient: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "letters", _check_letters(self.letters))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_multiply(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; intended for tests and small registers only."""
        mat = np.array([[1.0 + 0j]])
        # kron puts the left factor on the high bit, so walk qubits from the top
        for c in reversed(self.letters):
            mat = np.kron(mat, _PAULI_MATRICES[c])
        return self.coefficient * mat


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a * b`` including the accumulated phase."""
    if len(a.letters) != len(b.letters):
        raise ValueError(f"length mismatch: {len(a.letters)} vs {len(b.letters)}")
    phase = a.coefficient * b.coefficient
    out = []
    for pa, pb in zip(a.letters, b.letters):
        ph, c = _PRODUCT_TABLE[pa, pb]
        phase *= ph
        out.append(c)
    return PauliString("".join(out), phase)


def _parity_table(n: int) -> np.ndarray:
    """Return +/-1 parity of every integer below 2**n."""
    table = np.ones(1, dtype=np.int8)
    for _ in range(n):
        table = np.concatenate([table, -table])
    return table


@dataclass(frozen=True)
class _Compiled:
    """Terms grouped by flip mask: ``H|psi> = sum_x P_x (d_x * psi)``."""

    flip_masks: tuple[int, ...]
    diagonals: tuple[np.ndarray, ...]
    index: np.ndarray


class PauliSum:
    """Immutable weighted sum of Pauli strings on ``n_qubits`` qubits."""

    __slots__ = ("_terms", "n_qubits", "__dict__")

    def __init__(self, terms: Mapping[str, complex] | Iterable[PauliString] = (), n_qubits: int | None = None):
        collected: dict[str, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((t.letters, t.coefficient) for t in terms)
        for letters, coeff in items:
            letters = _check_letters(letters)
            if n_qubits is None:
                n_qubits = len(letters)
            elif len(letters) != n_qubits:
                raise ValueError(f"term {letters!r} does not act on {n_qubits} qubits")
            collected[letters] = collected.get(letters, 0j) + complex(coeff)
        if n_qubits is None or n_qubits < 1:
            raise ValueError("n_qubits must be given for an empty PauliSum")
        self.n_qubits = n_qubits
        self._terms = {k: v for k, v in sorted(collected.items()) if abs(v) >= DROP_TOL}

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls({"I" * n_qubits: coeff}, n_qubits)

    @classmethod
    def single(cls, n_qubits: int, ops: Mapping[int, str], coeff: complex = 1.0) -> PauliSum:
        """Build one term from a ``{qubit: letter}`` map, e.g. ``{0: "X", 3: "Z"}``."""
        letters = ["I"] * n_qubits
        for q, c in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            letters[q] = c
        return cls({"".join(letters): coeff}, n_qubits)

    @property
    def terms(self) -> dict[str, complex]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return (PauliString(k, v) for k, v in self._terms.items())

    def __repr__(self) -> str:
        body = " + ".join(f"({v:.6g})*{k}" for k, v in list(self._terms.items())[:6])
        more = "" if len(self) <= 6 else f" + ... [{len(self)} terms]"
        return f"PauliSum({body or '0'}{more})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and (self - other).is_zero()

    __hash__ = None

    def _check(self, other: PauliSum) -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"size mismatch: {self.n_qubits} vs {other.n_qubits} qubits")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliSum.identity(self.n_qubits, other)
        self._check(other)
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, 0j) + v
        return PauliSum(merged, self.n_qubits)

    __radd__ = __add__

    def __neg__(self) -> PauliSum:
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum({k: v * other for k, v in self._terms.items()}, self.n_qubits)
        if not isinstance(other, PauliSum):
            return NotImplemented
        self._check(other)
        out: dict[str, complex] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                p = pauli_multiply(PauliString(ka, va), PauliString(kb, vb))
                out[p.letters] = out.get(p.letters, 0j) + p.coefficient
        return PauliSum(out, self.n_qubits)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __pow__(self, k: int) -> PauliSum:
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = PauliSum.identity(self.n_qubits)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> PauliSum:
        return PauliSum({k: np.conj(v) for k, v in self._terms.items()}, self.n_qubits)

    def commutator(self, other: PauliSum) -> PauliSum:
        return self * other - other * self

    def is_zero(self, tol: float = DROP_TOL) -> bool:
        return all(abs(v) < tol for v in self._terms.values())

    def is_hermitian(self, tol: float = DROP_TOL) -> bool:
        return all(abs(v.imag) < tol for v in self._terms.values())

    def is_diagonal(self) -> bool:
        return all(set(k) <= {"I", "Z"} for k in self._terms)

    def terms_commute(self) -> bool:
        """True when every pair of terms commutes."""
        masks = [_masks(k)[:2] for k in self._terms]
        for i, (xa, za) in enumerate(masks):
            for xb, zb in masks[i + 1:]:
                # symplectic form: anticommute iff odd overlap count
                if (bin(xa & zb).count("1") + bin(za & xb).count("1")) % 2:
                    return False
        return True

    def norm_bound(self) -> float:
        """Upper bound on the spectral norm, sum of |coefficients|."""
        return float(sum(abs(v) for v in self._terms.values()))

    def real(self) -> PauliSum:
        return PauliSum({k: v.real for k, v in self._terms.items()}, self.n_qubits)

    @cached_property
    def compiled(self) -> _Compiled:
        n = self.n_qubits
        dim = 1 << n
        index = np.arange(dim, dtype=np.int64)
        parity = _parity_table(n)
        groups: dict[int, np.ndarray] = {}
        for letters, coeff in self._terms.items():
            x, z, ny = _masks(letters)
            # P|b> = i^ny (-1)^{|b & z|} |b ^ x>
            d = coeff * (1j ** ny) * parity[index & z]
            if x in groups:
                groups[x] = groups[x] + d
            else:
                groups[x] = d.astype(complex)
        flips = tuple(sorted(groups))
        return _Compiled(flips, tuple(groups[x] for x in flips), index)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix built term by term; a brute-force oracle for small n."""
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for term in self:
            mat += term.to_matrix()
        return mat

    def to_sparse(self):
        """Sparse CSR matrix assembled from the compiled flip-mask groups."""
        from scipy import sparse

        comp = self.compiled
        dim = 1 << self.n_qubits
        rows, cols, data = [], [], []
        for x, d in zip(comp.flip_masks, comp.diagonals):
            keep = np.abs(d) > DROP_TOL
            rows.append(comp.index[keep] ^ x)
            cols.append(comp.index[keep])
            data.append(d[keep])
        if not rows:
            return sparse.csr_matrix((dim, dim), dtype=complex)
        return sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )

    def to_text(self) -> str:
        return "".join(f"{v.real!r} {v.imag!r} {k}\n" for k, v in self._terms.items())

    @classmethod
    def from_text(cls, text: str) -> PauliSum:
        terms: dict[str, complex] = {}
        n_qubits = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '<real> <imag> <letters>', got {line!r}")
            re_, im_, letters = parts
            n_qubits = n_qubits or len(letters)
            terms[letters] = terms.get(letters, 0j) + complex(float(re_), float(im_))
        return cls(terms, n_qubits)


def pauli_sum_apply(h: PauliSum, psi: np.ndarray) -> np.ndarray:
    """Return ``H|psi>`` without forming the 2^n x 2^n matrix.

    ``psi`` may also be a 2-D array of shape ``(2**n, k)``; columns are
    treated as independent states.
    """
    psi = np.asarray(psi)
    dim = 1 << h.n_qubits
    if psi.shape[0] != dim:
        raise ValueError(f"state of length {psi.shape[0]} does not match {h.n_qubits} qubits")
    comp = h.compiled
    out = np.zeros(psi.shape, dtype=complex)
    for x, d in zip(comp.flip_masks, comp.diagonals):
        if psi.ndim == 1:
            term = d * psi
        else:
            term = d[:, None] * psi
        if x == 0:
            out += term
        else:
            out += term[comp.index ^ x]
    return out
