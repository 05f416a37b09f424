# %% [markdown]
# # Training the Agassi ansatz
#
# Adam with exact adjoint gradients, 500 steps, parameters started
# uniformly in [-10, 10]. The exact energy comes from Lanczos.

# %%
import numpy as np

from nuclear_hva import ModelConfig, VarianceScanConfig, training_ensemble, variance_scan

scan = variance_scan(VarianceScanConfig(model="agassi", sizes=[1, 2, 3]))
fit = scan.fit["variance_normalized"]
print(f"normalized variance ~ n^{fit['exponent']:.2f} (r2 {fit['exponent_r2']:.3f}); "
      f"exponential r2 {fit['rate_r2']:.3f}")

# %%
for j in (1, 2):
    rec = training_ensemble(ModelConfig("agassi", j), runs=10, seed=0)
    s = rec.summary
    curve = np.array(s["mean_per_step"])
    print(f"j={j}: E0 {s['e_exact']:.6f}, mean error at steps 1/100/500: "
          f"{curve[0]:.2f}% / {curve[99]:.3f}% / {curve[-1]:.4f}%, median final {s['final_median']:.2e}%")
