import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from nuclear_hva.engine import (
    ConvergenceError,
    SpectrumBounds,
    apply_exp,
    exp_plan,
    expectation,
    extremal_eigs,
    krylov_expm_multiply,
    particle_number,
)
from nuclear_hva.models import AgassiParams, LipkinParams, build_agassi, build_lipkin, half_filling_indices
from nuclear_hva.paulis import PauliSum

from conftest import dense_agassi, dense_from_dict, random_pauli_dict, random_state


class TestExpectation:
    def test_z_sum(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = 1
        assert expectation(PauliSum({"ZI": 1, "IZ": 1}), psi) == 2

    def test_lipkin_reference(self):
        m = build_lipkin(LipkinParams(2, 1.0, 0.7))
        assert expectation(m.full_hamiltonian, m.initial_state()) == pytest.approx(-1.4, abs=1e-15)

    def test_against_dense(self, rng):
        for _ in range(100):
            terms = random_pauli_dict(rng, 4, 7)
            psi = random_state(rng, 4)
            ref = (psi.conj() @ dense_from_dict(terms, 4) @ psi).real
            assert expectation(PauliSum(terms), psi) == pytest.approx(ref, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            expectation(PauliSum({"X": 1j}), np.array([1, 0], dtype=complex))


class TestApplyExp:
    def test_zero_angle_is_bitwise_identity(self, rng):
        psi = random_state(rng, 3)
        out = apply_exp(PauliSum({"XYZ": 0.3, "ZZI": 1.0}), 0.0, psi)
        assert np.array_equal(out, psi) and out is not psi

    def test_bloch_rotation(self):
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        out = apply_exp(PauliSum({"Z": 1.0}), np.pi / 4, plus)
        assert expectation(PauliSum({"X": 1.0}), out) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("method", ["auto", "krylov", "spectral"])
    def test_agassi_h2_against_expm(self, rng, method):
        g = build_agassi(AgassiParams(1)).generators[1]
        G = g.to_matrix()
        for _ in range(10):
            theta = rng.uniform(-10, 10)
            psi = random_state(rng, 4)
            ref = expm(-1j * theta * G) @ psi
            assert np.linalg.norm(apply_exp(g, theta, psi, method=method) - ref) < 1e-9

    def test_auto_detects_commuting(self):
        lipkin = build_lipkin(LipkinParams(4))
        agassi = build_agassi(AgassiParams(1))
        assert exp_plan(lipkin.generators[0]).kind == "commuting"
        assert exp_plan(lipkin.generators[1]).kind == "commuting"
        assert exp_plan(agassi.generators[0]).kind == "commuting"
        assert exp_plan(build_agassi(AgassiParams(2)).generators[1]).kind == "spectral"

    def test_commuting_rejects_noncommuting(self):
        with pytest.raises(ValueError):
            exp_plan(PauliSum({"X": 1, "Z": 1}), method="commuting")

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_random_generators_against_expm(self, rng, n):
        # 6 sizes x 20 cases x 3 methods
        for _ in range(20):
            terms = random_pauli_dict(rng, n, 6)
            g = PauliSum(terms)
            theta = rng.uniform(-3, 3)
            psi = random_state(rng, n)
            ref = expm(-1j * theta * dense_from_dict(terms, n)) @ psi
            for method in ("auto", "krylov", "spectral"):
                out = apply_exp(g, theta, psi, method=method)
                assert np.linalg.norm(out - ref) < 1e-9
                assert abs(np.linalg.norm(out) - 1) < 1e-10

    def test_commuting_path_matches_generic(self, rng):
        for g in build_lipkin(LipkinParams(5)).generators + build_agassi(AgassiParams(1)).generators[:1]:
            psi = random_state(rng, g.n_qubits)
            a = apply_exp(g, 1.7, psi, method="commuting")
            b = apply_exp(g, 1.7, psi, method="krylov")
            c = apply_exp(g, 1.7, psi, method="spectral")
            assert np.linalg.norm(a - b) < 1e-10 and np.linalg.norm(a - c) < 1e-10

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.floats(-20, 20), st.floats(-20, 20))
    def test_group_law_and_norm(self, seed, n, a, b):
        rng = np.random.default_rng(seed)
        g = PauliSum(random_pauli_dict(rng, n, 5))
        psi = random_state(rng, n)
        for method in ("auto", "krylov"):
            combined = apply_exp(g, a + b, psi, method=method)
            stepwise = apply_exp(g, a, apply_exp(g, b, psi, method=method), method=method)
            assert np.linalg.norm(combined - stepwise) < 1e-9
            assert abs(np.linalg.norm(combined) - 1) < 1e-10

    def test_krylov_large_angle(self, rng):
        g = build_agassi(AgassiParams(2)).generators[2]
        psi = random_state(rng, 8)
        a = apply_exp(g, 40.0, psi, method="krylov")
        b = apply_exp(g, 40.0, psi, method="spectral")
        assert np.linalg.norm(a - b) < 1e-9

    def test_krylov_budget_exhaustion(self):
        diag = np.linspace(-1e3, 1e3, 64)
        with pytest.raises(ConvergenceError) as err:
            krylov_expm_multiply(lambda v: diag * v, np.ones(64) / 8, 50.0, krylov_dim=4, max_substeps=3)
        assert err.value.residual > 0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            apply_exp(PauliSum({"XX": 1}), 0.1, np.zeros(8))


class TestExtremalEigs:
    def test_lipkin_n2(self):
        b = extremal_eigs(build_lipkin(LipkinParams(2)).full_hamiltonian)
        assert b.e_min == pytest.approx(-np.sqrt(4.25), rel=1e-8)
        assert b.e_max == pytest.approx(np.sqrt(4.25), rel=1e-8)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_z_sum(self, n):
        z = PauliSum({"".join("Z" if q == k else "I" for q in range(n)): 1.0 for k in range(n)})
        b = extremal_eigs(z)
        assert b.e_min == pytest.approx(-n, rel=1e-8) and b.e_max == pytest.approx(n, rel=1e-8)

    def test_agassi_j1_penalized(self):
        h = build_agassi(AgassiParams(1)).penalized_hamiltonian
        _, hp, _ = dense_agassi(1, 1.0, 0.5, 0.5, 10.0)
        w = np.linalg.eigvalsh(hp)
        b = extremal_eigs(h)
        assert b.e_min == pytest.approx(w[0], rel=1e-8) and b.e_max == pytest.approx(w[-1], rel=1e-8)

    def test_random_against_dense(self, rng):
        for k in range(100):
            n = 1 + k % 6
            terms = random_pauli_dict(rng, n, 6)
            w = np.linalg.eigvalsh(dense_from_dict(terms, n))
            b = extremal_eigs(PauliSum(terms))
            assert abs(b.e_min - w[0]) <= 1e-9 * max(1, abs(w[0]))
            assert abs(b.e_max - w[-1]) <= 1e-9 * max(1, abs(w[-1]))

    def test_sector_restriction(self):
        m = build_agassi(AgassiParams(2))
        idx = half_filling_indices(2)
        lanczos = extremal_eigs(m.penalized_hamiltonian, basis=idx)
        dense = extremal_eigs(m.penalized_hamiltonian, basis=idx, method="dense")
        assert lanczos.e_min == pytest.approx(dense.e_min, rel=1e-8)
        assert lanczos.e_max == pytest.approx(dense.e_max, rel=1e-8)
        # the penalty only inflates the spectrum outside the sector
        assert dense.e_max < extremal_eigs(m.penalized_hamiltonian).e_max

    def test_dense_limit(self):
        with pytest.raises(ValueError):
            extremal_eigs(PauliSum.identity(11), method="dense")

    def test_bounds_ordering(self):
        with pytest.raises(ValueError):
            SpectrumBounds(1.0, 0.0)


class TestParticleNumber:
    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_reference_state(self, j):
        m = build_agassi(AgassiParams(j))
        assert particle_number(m.initial_state(), j) == 2 * j

    def test_vacuum(self):
        psi = np.zeros(2**8, dtype=complex)
        psi[0] = 1
        assert particle_number(psi, 2) == 0

    def test_against_dense_operator(self, rng):
        psi = random_state(rng, 4)
        _, _, number = dense_agassi(1, 1, 0.5, 0.5, 10)
        assert particle_number(psi, 1) == pytest.approx((psi.conj() @ number @ psi).real, abs=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            particle_number(np.zeros(8), 1)
