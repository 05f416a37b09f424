# %% [markdown]
# # Cost landscapes of the Lipkin model
#
# With one free angle per gate the normalized cost flattens out
# exponentially fast as qubits are added. Tying angles so the circuit keeps
# the permutation symmetry of the model keeps the landscape rough.

# %%
from nuclear_hva import VarianceScanConfig, variance_scan

sizes = [4, 6, 8, 10]
records = {m: variance_scan(VarianceScanConfig(model=m, sizes=sizes)) for m in ("lipkin_free", "lipkin_symmetric")}

# %%
print(" n   free          symmetric")
for k, n in enumerate(sizes):
    free = records["lipkin_free"].per_size[k]["variance_normalized"]
    sym = records["lipkin_symmetric"].per_size[k]["variance_normalized"]
    print(f"{n:2d}   {free:.3e}     {sym:.3e}")

# %%
for model, rec in records.items():
    fit = rec.fit["variance_normalized"]
    print(f"{model:17s} ln Var ~ {fit['rate']:.3f} n  (r2 {fit['rate_r2']:.3f})")
