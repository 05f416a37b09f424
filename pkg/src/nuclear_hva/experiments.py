"""Variance scans, training ensembles and warm-start sweeps with persisted records."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from . import __version__
from .ansatz import AnsatzProgram, build_ansatz, model_for, warm_start_extend
from .engine import extremal_eigs
from .models import ModelDecomposition
from .vqe import CostContext, cost, normalize_energy, train

log = logging.getLogger(__name__)

MODELS = ("lipkin_symmetric", "lipkin_free", "agassi")
DEFAULT_SIZES = {"lipkin_symmetric": [4, 6, 8, 10, 12], "lipkin_free": [4, 6, 8, 10, 12], "agassi": [1, 2, 3]}
DEFAULT_RANGE = {"lipkin_symmetric": (-2 * math.pi, 2 * math.pi), "lipkin_free": (-2 * math.pi, 2 * math.pi),
                 "agassi": (-10.0, 10.0)}
DEFAULT_LAYERS_RULE = {"lipkin_symmetric": "equal_to_n", "lipkin_free": "equal_to_n", "agassi": "equal_to_j"}


def keyed_rng(*key: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by integers, e.g. (seed, size, sample)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


def _ansatz_kind(model: str) -> str:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    return "agassi_hva" if model == "agassi" else model


def resolve_layers(rule, model: str, size: int) -> int:
    if isinstance(rule, (int, np.integer)) or (isinstance(rule, str) and rule.isdigit()):
        return int(rule)
    if rule == "equal_to_n":
        return size if model != "agassi" else 4 * size
    if rule == "equal_to_j":
        if model != "agassi":
            raise ValueError("layers rule equal_to_j only applies to the Agassi model")
        return size
    raise ValueError(f"unknown layers rule {rule!r}")


def setup(model: str, size: int, layers: int, couplings: dict | None = None,
          normalized: bool = False) -> tuple[ModelDecomposition, CostContext]:
    """Model, ansatz and cost context for one system size.

    Agassi bounds are taken inside the half-filling sector, which is where
    the particle-conserving ansatz lives.
    """
    decomposition = model_for(model, size, **(couplings or {}))
    program = build_ansatz(_ansatz_kind(model), size, layers)
    h = decomposition.target_hamiltonian
    bounds = extremal_eigs(h, basis=decomposition.sector_indices()) if normalized else None
    return decomposition, CostContext(h, program, decomposition.initial_state(), bounds)


@dataclass
class RunRecord:
    kind: str
    config: dict
    master_seed: int
    version: str = __version__
    per_size: list[dict] = field(default_factory=list)
    fit: dict = field(default_factory=dict)
    runs: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunRecord:
        return cls(**json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> RunRecord:
        return cls.from_json(Path(path).read_text())


# --------------------------------------------------------------------------
# variance scans
# --------------------------------------------------------------------------


@dataclass
class VarianceScanConfig:
    model: str
    sizes: list[int] | None = None
    samples: int = 32
    param_range: tuple[float, float] | None = None
    layers_rule: str | int | None = None
    master_seed: int = 0
    normalized: bool = True
    couplings: dict = field(default_factory=dict)

    def __post_init__(self):
        _ansatz_kind(self.model)
        if self.sizes is None:
            self.sizes = list(DEFAULT_SIZES[self.model])
        if self.param_range is None:
            self.param_range = DEFAULT_RANGE[self.model]
        if self.layers_rule is None:
            self.layers_rule = DEFAULT_LAYERS_RULE[self.model]
        self.param_range = tuple(float(x) for x in self.param_range)
        if self.samples < 2:
            raise ValueError("need at least two samples for a variance")
        if not self.param_range[0] < self.param_range[1]:
            raise ValueError("param_range must satisfy lo < hi")


def log_variance(values) -> float | None:
    """Sample variance of ln(values); None unless every value is positive."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        return None
    return float(np.var(np.log(values), ddof=1))


def variance_scan(cfg: VarianceScanConfig, out_dir=None) -> RunRecord:
    """Sample the cost landscape at each size and fit how its variance scales."""
    record = RunRecord("variance_scan", _jsonable(asdict(cfg)), cfg.master_seed)
    lo, hi = cfg.param_range
    for size in cfg.sizes:
        layers = resolve_layers(cfg.layers_rule, cfg.model, size)
        decomposition, ctx = setup(cfg.model, size, layers, cfg.couplings, cfg.normalized)
        energies = np.array([
            cost(ctx, keyed_rng(cfg.master_seed, size, s).uniform(lo, hi, ctx.ansatz.n_params))
            for s in range(cfg.samples)
        ])
        row = {
            "size": size,
            "n_qubits": decomposition.n_qubits,
            "layers": layers,
            "n_params": ctx.ansatz.n_params,
            "mean": float(np.mean(energies)),
            "variance": float(np.var(energies, ddof=1)),
            "log_variance": log_variance(energies),
            "mean_normalized": None,
            "variance_normalized": None,
            "log_variance_normalized": None,
        }
        if cfg.normalized:
            normed = normalize_energy(energies, ctx.bounds)
            row.update(
                e_min=ctx.bounds.e_min,
                e_max=ctx.bounds.e_max,
                mean_normalized=float(np.mean(normed)),
                variance_normalized=float(np.var(normed, ddof=1)),
                log_variance_normalized=log_variance(normed),
            )
        log.info("size %s: var %.4g, normalized var %s", size, row["variance"], row["variance_normalized"])
        record.per_size.append(row)
    for key in ("variance", "variance_normalized"):
        points = [(r["n_qubits"], r[key]) for r in record.per_size if r[key] is not None]
        if len(points) >= 3 and all(v > 0 for _, v in points):
            record.fit[key] = asdict(fit_scaling(points))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_scan_csv(record, out / "scan.csv")
        record.artifacts = ["scan.csv", "record.json"]
        record.save(out / "record.json")
    return record


SCAN_COLUMNS = ("size", "n_qubits", "variance", "variance_normalized", "log_variance_normalized")


def write_scan_csv(record: RunRecord, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCAN_COLUMNS)
        for row in record.per_size:
            writer.writerow(["" if row[c] is None else repr(row[c]) for c in SCAN_COLUMNS])


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    exponent_r2: float
    rate: float
    rate_r2: float
    log_prefactor_power: float
    log_prefactor_exp: float


def fit_scaling(points: Sequence[tuple[float, float]]) -> ScalingFit:
    """Least-squares power law on (ln n, ln var) and exponential on (n, ln var)."""
    if len(points) < 3:
        raise ValueError("need at least three points to fit")
    sizes = np.array([p[0] for p in points], dtype=float)
    var = np.array([p[1] for p in points], dtype=float)
    if np.any(var <= 0):
        raise ValueError("variances must be positive to fit in log space")
    power = stats.linregress(np.log(sizes), np.log(var))
    expo = stats.linregress(sizes, np.log(var))
    return ScalingFit(
        exponent=float(power.slope),
        exponent_r2=float(power.rvalue**2),
        rate=float(expo.slope),
        rate_r2=float(expo.rvalue**2),
        log_prefactor_power=float(power.intercept),
        log_prefactor_exp=float(expo.intercept),
    )


# --------------------------------------------------------------------------
# training
# --------------------------------------------------------------------------


@dataclass
class ModelConfig:
    model: str = "agassi"
    size: int = 1
    layers: int | None = None
    steps: int = 500
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    couplings: dict = field(default_factory=dict)

    def __post_init__(self):
        _ansatz_kind(self.model)
        if self.layers is None:
            self.layers = resolve_layers(DEFAULT_LAYERS_RULE[self.model], self.model, self.size)

    def adam(self) -> dict:
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps}


def _summarize(traces) -> dict:
    errors = np.array([t.percent_error for t in traces])
    finals = errors[:, -1]
    return {
        "mean_per_step": errors.mean(axis=0).tolist(),
        "std_per_step": errors.std(axis=0).tolist(),
        "final_mean": float(finals.mean()),
        "final_std": float(finals.std()),
        "final_median": float(np.median(finals)),
        "final_min": float(finals.min()),
        "final_max": float(finals.max()),
    }


def _run_entry(index: int, trace) -> dict:
    return {
        "run": index,
        "final_percent_error": trace.final_percent_error,
        "initial_params": [float(x) for x in trace.initial_params],
        "final_params": [float(x) for x in trace.final_params],
    }


def _write_traces(traces, out: Path, prefix: str = "") -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for k, t in enumerate(traces):
        name = f"{prefix}trace_{k}.csv"
        t.write(out / name)
        names += [name, name.replace(".csv", ".json")]
    return names


def training_ensemble(
    cfg: ModelConfig,
    runs: int = 20,
    init_range: tuple[float, float] | None = None,
    seed: int = 0,
    out_dir=None,
    initial_params: Sequence[np.ndarray] | None = None,
) -> RunRecord:
    """Train ``runs`` independent circuits; run ``r`` draws from stream (seed, size, r)."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    lo, hi = init_range if init_range is not None else DEFAULT_RANGE[cfg.model]
    _, ctx = setup(cfg.model, cfg.size, cfg.layers, cfg.couplings, normalized=False)
    e_exact = extremal_eigs(ctx.hamiltonian).e_min
    traces = []
    for r in range(runs):
        if initial_params is not None:
            theta0 = initial_params[r]
        else:
            theta0 = keyed_rng(seed, cfg.size, r).uniform(lo, hi, ctx.ansatz.n_params)
        trace = train(ctx, theta0, steps=cfg.steps, rng_seed=seed, e_exact=e_exact, **cfg.adam())
        trace.config.update(model=cfg.model, run=r)
        traces.append(trace)
    config = _jsonable({**asdict(cfg), "runs": runs, "init_range": [lo, hi]})
    record = RunRecord("training_ensemble", config, seed)
    record.runs = [_run_entry(k, t) for k, t in enumerate(traces)]
    record.summary = {"e_exact": e_exact, **_summarize(traces)}
    if out_dir is not None:
        out = Path(out_dir)
        record.artifacts = _write_traces(traces, out) + ["record.json"]
        record.save(out / "record.json")
    return record


def reduction_pct(cold: float, warm: float) -> float:
    return 100.0 * (cold - warm) / cold if cold != 0 else float("nan")


def warm_start_sweep(
    j_max: int,
    threshold_pct: float = 2.0,
    runs: int = 20,
    seed: int = 0,
    steps: int = 500,
    couplings: dict | None = None,
    out_dir=None,
    **adam,
) -> RunRecord:
    """Grow the Agassi system one j at a time, seeding each size from the last.

    At j = 1 the ensemble is cold. For j >= 2 each run copies a random
    previous warm solution whose final error is below ``threshold_pct``,
    appends a near-identity layer and trains again; a cold ensemble with the
    same seeds and budget is trained alongside for comparison.
    """
    if j_max < 2:
        raise ValueError("a warm-start sweep needs j_max >= 2")
    couplings = couplings or {}
    out = Path(out_dir) if out_dir is not None else None
    config = {"j_max": j_max, "threshold_pct": threshold_pct, "runs": runs, "steps": steps,
              "couplings": couplings, **adam}
    record = RunRecord("warm_start_sweep", _jsonable(config), seed)
    pool: list[np.ndarray] = []
    prev_program: AnsatzProgram | None = None
    for j in range(1, j_max + 1):
        cfg = ModelConfig("agassi", j, layers=j, steps=steps, couplings=couplings, **adam)
        cold = training_ensemble(cfg, runs, seed=seed, out_dir=out / f"j{j}_cold" if out else None)
        row = {"j": j, "cold": _brief(cold)}
        if j == 1:
            warm = cold
        else:
            if not pool:
                row["halted"] = f"no j={j - 1} solution below {threshold_pct}%"
                record.per_size.append(row)
                log.warning("warm-start sweep halted at j=%d: empty pool", j)
                break
            starts = []
            for r in range(runs):
                rng = keyed_rng(seed, j, r)
                pick = pool[rng.integers(len(pool))]
                starts.append(warm_start_extend(pick, prev_program, rng))
            warm = training_ensemble(cfg, runs, seed=seed, initial_params=starts,
                                     out_dir=out / f"j{j}_warm" if out else None)
            row["warm"] = _brief(warm)
            row["pool_size"] = len(pool)
            row["mean_reduction_pct"] = reduction_pct(cold.summary["final_mean"], warm.summary["final_mean"])
            row["std_reduction_pct"] = reduction_pct(cold.summary["final_std"], warm.summary["final_std"])
        record.per_size.append(row)
        pool = [np.array(r["final_params"]) for r in warm.runs if r["final_percent_error"] < threshold_pct]
        prev_program = build_ansatz("agassi_hva", j, j)
    if out is not None:
        record.artifacts = sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file()) + ["record.json"]
        record.save(out / "record.json")
    return record


def _brief(rec: RunRecord) -> dict:
    s = rec.summary
    return {
        "final_mean": s["final_mean"],
        "final_std": s["final_std"],
        "final_median": s["final_median"],
        "final_errors": [r["final_percent_error"] for r in rec.runs],
        "e_exact": s["e_exact"],
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
