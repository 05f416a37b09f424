from __future__ import annotations

import math

import numpy as np
import pytest

from nuclear_hva.ansatz import WARM_START_WIDTH
from nuclear_hva.experiments import (
    ModelConfig,
    RunRecord,
    VarianceScanConfig,
    fit_scaling,
    keyed_rng,
    log_variance,
    reduction_pct,
    resolve_layers,
    setup,
    training_ensemble,
    variance_scan,
    warm_start_sweep,
)
from nuclear_hva.vqe import TrainTrace, train


class TestKeyedRng:
    def test_same_key_same_stream(self):
        assert np.array_equal(keyed_rng(3, 4, 5).uniform(size=8), keyed_rng(3, 4, 5).uniform(size=8))

    def test_keys_are_independent_of_order(self):
        assert not np.array_equal(keyed_rng(3, 4, 5).uniform(size=8), keyed_rng(3, 5, 4).uniform(size=8))


class TestLayers:
    @pytest.mark.parametrize(
        "rule,model,size,expected",
        [("equal_to_n", "lipkin_free", 6, 6), ("equal_to_j", "agassi", 2, 2), (0, "agassi", 3, 0), ("4", "lipkin_symmetric", 8, 4)],
    )
    def test_rules(self, rule, model, size, expected):
        assert resolve_layers(rule, model, size) == expected

    def test_equal_to_j_rejects_lipkin(self):
        with pytest.raises(ValueError):
            resolve_layers("equal_to_j", "lipkin_free", 4)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            VarianceScanConfig(model="ising")


class TestStatistics:
    def test_unbiased_log_variance(self):
        # ln values 0, 1, 2 -> mean 1, sum of squares 2, ddof=1 -> 1
        assert log_variance([1.0, math.e, math.e**2]) == pytest.approx(1.0, abs=1e-14)

    def test_log_variance_unavailable_for_nonpositive(self):
        assert log_variance([1.0, 0.0, 2.0]) is None
        assert log_variance([1.0, -1.0]) is None

    def test_power_law_fit(self):
        pts = [(n, 3.0 * n**-2.0) for n in (2, 4, 6, 8)]
        fit = fit_scaling(pts)
        assert fit.exponent == pytest.approx(-2.0, abs=1e-12)
        assert fit.exponent_r2 == pytest.approx(1.0, abs=1e-12)
        assert fit.log_prefactor_power == pytest.approx(math.log(3.0), abs=1e-12)
        assert fit.rate_r2 < 1.0

    def test_exponential_fit(self):
        fit = fit_scaling([(n, 2.0**-n) for n in (4, 6, 8, 10)])
        assert fit.rate == pytest.approx(-math.log(2), abs=1e-12)
        assert fit.rate_r2 == pytest.approx(1.0, abs=1e-12)
        assert fit.exponent_r2 < 1.0

    def test_fit_needs_three_positive_points(self):
        with pytest.raises(ValueError):
            fit_scaling([(1, 1.0), (2, 0.5)])
        with pytest.raises(ValueError):
            fit_scaling([(1, 1.0), (2, 0.0), (3, 0.1)])

    def test_reduction(self):
        assert reduction_pct(2.0, 0.5) == pytest.approx(75.0)
        assert math.isnan(reduction_pct(0.0, 0.0))


class TestVarianceScan:
    def test_csv_is_deterministic(self, tmp_path):
        cfg = VarianceScanConfig(model="lipkin_free", sizes=[4, 6], samples=6, master_seed=7)
        variance_scan(cfg, tmp_path / "a")
        variance_scan(cfg, tmp_path / "b")
        assert (tmp_path / "a" / "scan.csv").read_bytes() == (tmp_path / "b" / "scan.csv").read_bytes()
        header = (tmp_path / "a" / "scan.csv").read_text().splitlines()[0]
        assert header == "size,n_qubits,variance,variance_normalized,log_variance_normalized"

    def test_seed_changes_samples(self):
        a = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[4], samples=6, master_seed=0))
        b = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[4], samples=6, master_seed=1))
        assert a.per_size[0]["variance"] != b.per_size[0]["variance"]

    def test_sizes_use_disjoint_streams(self):
        # adding a size must not change the samples drawn for another size
        a = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[4], samples=5))
        b = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[6, 4], samples=5))
        assert a.per_size[0]["variance"] == b.per_size[1]["variance"]

    @pytest.mark.parametrize("model,sizes", [("agassi", [1, 2]), ("lipkin_symmetric", [4, 6])])
    def test_zero_layers_gives_zero_variance(self, model, sizes):
        rec = variance_scan(VarianceScanConfig(model=model, sizes=sizes, samples=4, layers_rule=0))
        for row in rec.per_size:
            assert row["n_params"] == 0
            assert row["variance"] == 0.0
            assert row["log_variance"] is None
        assert rec.fit == {}

    def test_normalized_values_in_unit_interval(self):
        rec = variance_scan(VarianceScanConfig(model="agassi", sizes=[1, 2], samples=8))
        for row in rec.per_size:
            assert 0.0 <= row["mean_normalized"] <= 1.0
            assert row["variance_normalized"] == pytest.approx(
                row["variance"] / (row["e_max"] - row["e_min"]) ** 2, rel=1e-9
            )

    def test_unnormalized_skips_bounds(self):
        rec = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[4, 6, 8], samples=4, normalized=False))
        assert all(r["variance_normalized"] is None for r in rec.per_size)
        assert set(rec.fit) == {"variance"}

    def test_record_round_trip(self, tmp_path):
        rec = variance_scan(VarianceScanConfig(model="lipkin_free", sizes=[4, 6, 8], samples=4), tmp_path)
        back = RunRecord.load(tmp_path / "record.json")
        assert back == RunRecord.from_json(rec.to_json())
        assert back.kind == "variance_scan"
        assert back.fit["variance_normalized"]["rate"] == rec.fit["variance_normalized"]["rate"]
        assert back.artifacts == ["scan.csv", "record.json"]


class TestTrainingEnsemble:
    def test_single_run_matches_train(self):
        cfg = ModelConfig("agassi", 1, steps=40)
        rec = training_ensemble(cfg, runs=1, seed=5)
        _, ctx = setup("agassi", 1, 1)
        theta0 = keyed_rng(5, 1, 0).uniform(-10, 10, ctx.ansatz.n_params)
        trace = train(ctx, theta0, steps=40, e_exact=rec.summary["e_exact"])
        assert rec.runs[0]["final_percent_error"] == trace.final_percent_error
        assert rec.summary["final_std"] == 0.0
        assert rec.summary["mean_per_step"] == list(trace.percent_error)

    def test_duplicate_starts_have_zero_spread(self):
        cfg = ModelConfig("lipkin_symmetric", 4, layers=2, steps=25)
        start = np.full(4, 0.3)
        rec = training_ensemble(cfg, runs=3, initial_params=[start, start, start])
        finals = {r["final_percent_error"] for r in rec.runs}
        assert len(finals) == 1
        assert max(rec.summary["std_per_step"]) < 1e-12

    def test_traces_written(self, tmp_path):
        cfg = ModelConfig("agassi", 1, steps=10)
        rec = training_ensemble(cfg, runs=2, out_dir=tmp_path)
        for k in range(2):
            trace = TrainTrace.read(tmp_path / f"trace_{k}.csv")
            assert len(trace.energies) == 10
            assert trace.final_percent_error == pytest.approx(rec.runs[k]["final_percent_error"], abs=1e-12)
        assert RunRecord.load(tmp_path / "record.json").summary == rec.summary

    def test_agassi_j1_converges(self):
        rec = training_ensemble(ModelConfig("agassi", 1), runs=20, seed=0)
        assert rec.summary["final_mean"] < 1.0


class TestWarmStartSweep:
    def test_singleton_pool_seeds_every_run(self, tmp_path):
        rec = warm_start_sweep(2, threshold_pct=1e9, runs=1, steps=15, out_dir=tmp_path)
        j1 = RunRecord.load(tmp_path / "j1_cold" / "record.json")
        j2 = RunRecord.load(tmp_path / "j2_warm" / "record.json")
        parent = np.array(j1.runs[0]["final_params"])
        child = np.array(j2.runs[0]["initial_params"])
        assert child.size == 6
        assert np.array_equal(child[:3], parent)
        assert np.all(np.abs(child[3:]) <= WARM_START_WIDTH)
        assert rec.per_size[1]["pool_size"] == 1
        assert "record.json" in rec.artifacts

    def test_empty_pool_halts(self):
        rec = warm_start_sweep(3, threshold_pct=-1.0, runs=2, steps=5)
        assert len(rec.per_size) == 2
        assert "halted" in rec.per_size[1]
        assert "warm" not in rec.per_size[1]

    def test_reductions_reported(self):
        rec = warm_start_sweep(2, threshold_pct=1e9, runs=3, steps=20, seed=2)
        row = rec.per_size[1]
        assert row["mean_reduction_pct"] == pytest.approx(
            reduction_pct(row["cold"]["final_mean"], row["warm"]["final_mean"])
        )

    def test_requires_two_sizes(self):
        with pytest.raises(ValueError):
            warm_start_sweep(1)
