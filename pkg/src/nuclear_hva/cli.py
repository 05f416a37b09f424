"""Command line entry point: ``nuclear-hva <subcommand> [options]``.

Options may also come from a ``--config`` file of ``key = value`` lines
(keys spelled like the long flags, with or without the leading dashes);
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .ansatz import model_for
from .engine import extremal_eigs
from .experiments import (
    DEFAULT_RANGE,
    MODELS,
    ModelConfig,
    VarianceScanConfig,
    training_ensemble,
    variance_scan,
    warm_start_sweep,
)

EXPERIMENTS = ("variance-scan", "train", "ensemble", "warm-start-sweep")
COUPLINGS = {"lipkin": ("lam", "h"), "agassi": ("epsilon", "V", "g", "beta")}


def read_config(path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _int_list(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _family(model: str) -> str:
    return "agassi" if model.startswith("agassi") else "lipkin"


def _couplings(args) -> dict:
    names = COUPLINGS[_family(args.model)]
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def _size(args) -> int:
    family = _family(args.model)
    value = args.j if family == "agassi" else args.n
    if value is None:
        raise SystemExit(f"--{'j' if family == 'agassi' else 'n'} is required for the {family} model")
    sizes = _int_list(value)
    if len(sizes) != 1:
        raise SystemExit("this subcommand takes a single system size")
    return sizes[0]


def _init_range(args, model: str):
    lo, hi = DEFAULT_RANGE[model]
    return (args.param_lo if args.param_lo is not None else lo, args.param_hi if args.param_hi is not None else hi)


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_dump_hamiltonian(args) -> int:
    m = model_for(_family(args.model), _size(args), **_couplings(args))
    h = m.target_hamiltonian if args.penalized else m.full_hamiltonian
    text = h.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_exact(args) -> int:
    m = model_for(_family(args.model), _size(args), **_couplings(args))
    h = m.target_hamiltonian if args.penalized else m.full_hamiltonian
    basis = m.sector_indices() if args.sector else None
    b = extremal_eigs(h, basis=basis, method=args.method)
    print(json.dumps({"e_min": b.e_min, "e_max": b.e_max, "residual_min": b.residual_min,
                      "residual_max": b.residual_max, "method": b.method}))
    return 0


def cmd_variance_scan(args) -> int:
    family = _family(args.model)
    sizes = args.j if family == "agassi" else args.n
    rng = None
    if args.param_lo is not None or args.param_hi is not None:
        rng = _init_range(args, args.model)
    cfg = VarianceScanConfig(
        model=args.model,
        sizes=_int_list(sizes) if sizes else None,
        samples=args.samples,
        param_range=rng,
        layers_rule=args.layers_rule,
        master_seed=args.seed,
        normalized=args.normalized,
        couplings=_couplings(args),
    )
    record = variance_scan(cfg, out_dir=_out(args))
    for row in record.per_size:
        print(f"size={row['size']} n_qubits={row['n_qubits']} variance={row['variance']:.6g} "
              f"variance_normalized={row['variance_normalized']}")
    for key, fit in record.fit.items():
        print(f"{key}: power exponent {fit['exponent']:.3f} (r2 {fit['exponent_r2']:.3f}), "
              f"exponential rate {fit['rate']:.3f} (r2 {fit['rate_r2']:.3f})")
    return 0


def _model_config(args) -> ModelConfig:
    return ModelConfig(
        model=args.model, size=_size(args), layers=args.layers, steps=args.steps, lr=args.lr,
        couplings=_couplings(args),
    )


def cmd_train(args, runs: int | None = None) -> int:
    cfg = _model_config(args)
    runs = runs if runs is not None else 1
    record = training_ensemble(cfg, runs, _init_range(args, cfg.model), seed=args.seed, out_dir=_out(args))
    s = record.summary
    print(f"runs={runs} e_exact={s['e_exact']:.10g} final percent error: mean {s['final_mean']:.4g} "
          f"std {s['final_std']:.4g} median {s['final_median']:.4g}")
    return 0


def cmd_ensemble(args) -> int:
    return cmd_train(args, runs=args.runs)


def cmd_warm_start_sweep(args) -> int:
    j_max = _int_list(args.j or "3")[-1]
    record = warm_start_sweep(j_max, args.threshold, args.runs, args.seed, args.steps, _couplings(args),
                              out_dir=_out(args), lr=args.lr)
    for row in record.per_size:
        line = f"j={row['j']} cold mean {row['cold']['final_mean']:.4g} std {row['cold']['final_std']:.4g}"
        if "warm" in row:
            line += (f" | warm mean {row['warm']['final_mean']:.4g} std {row['warm']['final_std']:.4g}"
                     f" | reduction mean {row['mean_reduction_pct']:.2f}% std {row['std_reduction_pct']:.2f}%")
        if "halted" in row:
            line += f" | halted: {row['halted']}"
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nuclear-hva", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file with default option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_choices, default_model):
        p.add_argument("--model", choices=model_choices, default=default_model)
        p.add_argument("--n", help="Lipkin qubit count (comma list for scans)")
        p.add_argument("--j", help="Agassi max spin (comma list for scans)")
        p.add_argument("--lam", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--V", type=float)
        p.add_argument("--g", type=float)
        p.add_argument("--beta", type=float)

    families = ("lipkin", "agassi")
    p = sub.add_parser("dump-hamiltonian", help="print a Hamiltonian as '<re> <im> <letters>' lines")
    common(p, families + MODELS, "agassi")
    p.add_argument("--penalized", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_hamiltonian)

    p = sub.add_parser("exact", help="extremal eigenvalues")
    common(p, families + MODELS, "agassi")
    p.add_argument("--penalized", action="store_true")
    p.add_argument("--sector", action="store_true", help="restrict to the half-filling sector")
    p.add_argument("--method", choices=("lanczos", "dense"), default="lanczos")
    p.set_defaults(func=cmd_exact)

    def experiment(p):
        common(p, MODELS, "agassi")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--param-lo", type=float)
        p.add_argument("--param-hi", type=float)
        p.add_argument("--out", default="runs")

    p = sub.add_parser("variance-scan", help="cost variance versus system size")
    experiment(p)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--layers-rule", help="equal_to_n, equal_to_j or a fixed integer")
    p.add_argument("--normalized", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_variance_scan)

    for name, func, help_ in (("train", cmd_train, "one Adam training run"),
                              ("ensemble", cmd_ensemble, "independent training runs")):
        p = sub.add_parser(name, help=help_)
        experiment(p)
        p.add_argument("--layers", type=int)
        p.add_argument("--steps", type=int, default=500)
        p.add_argument("--lr", type=float, default=0.05)
        p.add_argument("--runs", type=int, default=20)
        p.set_defaults(func=func)

    p = sub.add_parser("warm-start-sweep", help="warm versus cold Agassi ensembles for j = 1..J")
    experiment(p)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--threshold", type=float, default=2.0)
    p.set_defaults(func=cmd_warm_start_sweep)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    given = {a.split("=", 1)[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, raw in read_config(args.config).items():
        if key in given or key in ("config", "command"):
            continue
        if not hasattr(args, key):
            parser.error(f"unknown config key {key!r}")
        current = getattr(args, key)
        if isinstance(current, bool):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif key in ("n", "j", "layers_rule", "model", "out"):
            value = raw
        elif key in ("seed", "samples", "steps", "runs", "layers"):
            value = int(raw)
        else:
            value = float(raw)
        setattr(args, key, value)
    allowed = MODELS if args.command in EXPERIMENTS else ("lipkin", "agassi") + MODELS
    if args.model not in allowed:
        parser.error(f"invalid model {args.model!r}")
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
