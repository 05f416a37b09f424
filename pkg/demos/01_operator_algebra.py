# %% [markdown]
# # Operators, Jordan-Wigner and the Agassi Hamiltonian
#
# Pauli sums are dictionaries from letter strings to coefficients, with
# qubit q stored in bit q of a basis index. Fermionic operators go through
# Jordan-Wigner before anything touches a state vector.

# %%
import numpy as np

from nuclear_hva import FermionOpSum, PauliSum, build_agassi, AgassiParams, jordan_wigner, extremal_eigs

a = PauliSum({"XI": 1.0, "ZZ": 0.5})
b = PauliSum({"YI": 1.0})
print("[a, b] =\n" + a.commutator(b).to_text())

# %%
# A hopping term between modes 0 and 2 picks up a Z string on mode 1.
hop = FermionOpSum.create(0) * FermionOpSum.annihilate(2)
print(jordan_wigner(hop + hop.adjoint(), 3).to_text())

# %%
# The Agassi model at j = 1 lives on 4 qubits. The particle-number penalty
# pushes states outside half filling up the spectrum.
m = build_agassi(AgassiParams(1))
for label, h in (("full", m.full_hamiltonian), ("penalized", m.penalized_hamiltonian)):
    b = extremal_eigs(h)
    print(f"{label:10s} E_min {b.e_min: .6f}  E_max {b.e_max: .6f}")
sector = extremal_eigs(m.full_hamiltonian, basis=m.sector_indices())
print(f"half filling E_min {sector.e_min: .6f}  (closed form {-(0.5 + np.sqrt(2)): .6f})")
