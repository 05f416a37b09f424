# %% [markdown]
# # Warm starts across system sizes
#
# Solutions at j - 1 that got within 2% of the exact energy seed the runs
# at j: their angles are copied and one near-identity layer is appended.
# A cold ensemble with the same seeds is trained next to it. j = 3 takes a
# couple of minutes on one core.

# %%
from nuclear_hva import warm_start_sweep

rec = warm_start_sweep(3, threshold_pct=2.0, runs=20, seed=0, out_dir="warm_start_runs")

# %%
for row in rec.per_size[1:]:
    c, w = row["cold"], row["warm"]
    print(f"j={row['j']}: mean {c['final_mean']:.3f}% -> {w['final_mean']:.3f}% "
          f"({row['mean_reduction_pct']:.0f}% lower), std {c['final_std']:.3f}% -> {w['final_std']:.3f}%")
