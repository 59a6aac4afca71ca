"""Command-line front end.

Subcommands: prepare-epr, prepare-ghz, ghz-test, probe-sweep,
dispersive-convergence.  Every run emits one JSON report with a stable key set
(config echo, package version, seed); the sweep commands can additionally
write their table as CSV.  Values are resolved as flags over config-file
entries over defaults.  Exit codes: 0 success, 2 validation failure,
3 numerical (tail mass / zero-probability) failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, replace

from . import __version__
from .dynamics import dispersive_distance, optimal_probe_time, probe_branches
from .errors import DegenerateCat, NumericalError, ValidationError
from .ghztest import exact_branch_probabilities, run_ghz_test
from .hilbert import fidelity, make_coherent, reduce
from .protocol import (
    EPR_VARIANTS,
    bell_pair,
    ghz_triple,
    hybrid_ghz_target,
    prepare_epr,
    prepare_ghz,
    success_probability_report,
)

PROBE_SWEEP_POINTS = 41


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by all subcommands."""

    alpha: float = 2.0
    dim: int = 64
    shots: int = 1
    seed: int = 0
    gt: float | None = None
    phi: float | None = None
    mode: str = "atomic"
    sign: str = "+"
    variant: str = "phi+"
    delta_over_g: tuple[float, ...] = (50.0, 100.0, 200.0)
    output: str | None = None
    csv: str | None = None

    def echo(self) -> dict:
        d = asdict(self)
        d["delta_over_g"] = list(self.delta_over_g)
        return d


_CONFIG_PARSERS = {
    "alpha": float,
    "dim": int,
    "shots": int,
    "seed": int,
    "gt": float,
    "phi": float,
    "mode": str,
    "sign": str,
    "variant": str,
    "delta_over_g": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
    "output": str,
    "csv": str,
}


def load_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` UTF-8 file with ``#`` comments."""
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, text = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_PARSERS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](text)
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **load_config_file(args.config))
    overrides = {
        key: getattr(args, key)
        for key in _CONFIG_PARSERS
        if getattr(args, key, None) is not None
    }
    return replace(cfg, **overrides)


def validate_config(cfg: RunConfig, command: str) -> None:
    if cfg.alpha <= 0:
        raise DegenerateCat(f"alpha must be positive, got {cfg.alpha}")
    if cfg.dim < 1:
        raise ValidationError(f"dim must be at least 1, got {cfg.dim}")
    if cfg.seed < 0:
        raise ValidationError(f"seed must be non-negative, got {cfg.seed}")
    if cfg.gt is not None and cfg.gt <= 0:
        raise ValidationError(f"gt must be positive, got {cfg.gt}")
    if cfg.mode not in ("atomic", "hybrid"):
        raise ValidationError(f"mode must be atomic or hybrid, got {cfg.mode!r}")
    if cfg.sign not in ("+", "-"):
        raise ValidationError(f"sign must be + or -, got {cfg.sign!r}")
    if cfg.variant not in EPR_VARIANTS:
        raise ValidationError(f"variant must be one of {EPR_VARIANTS}, got {cfg.variant!r}")
    if command == "ghz-test" and cfg.shots < 1:
        raise ValidationError(f"shots must be at least 1, got {cfg.shots}")
    if command == "dispersive-convergence":
        if not cfg.delta_over_g:
            raise ValidationError("delta_over_g list must not be empty")
        bad = [d for d in cfg.delta_over_g if d < 10]
        if bad:
            raise ValidationError(f"delta_over_g entries must be >= 10, got {bad}")


def _records_payload(run) -> list[dict]:
    return [
        {
            "atom": r.atom,
            "outcome": r.outcome,
            "probability": r.probability,
            "post_selected": r.post_selected,
        }
        for r in run.records
    ]


def cmd_prepare_epr(cfg: RunConfig) -> dict:
    phi = cfg.phi if cfg.phi is not None else math.pi
    run = prepare_epr(cfg.variant, cfg.alpha, cfg.dim, gt_probe=cfg.gt, rng=cfg.seed, phi=phi)
    pair = reduce(run.final_state, ["A1", "A2"])
    return {
        "variant": cfg.variant,
        "fidelity": fidelity(pair, bell_pair(cfg.variant)),
        "probe_success_probability": success_probability_report(run),
        "branch_probability": run.branch_probability,
        "records": _records_payload(run),
    }


def cmd_prepare_ghz(cfg: RunConfig) -> dict:
    phi = cfg.phi if cfg.phi is not None else math.pi
    run = prepare_ghz(cfg.sign, cfg.mode, cfg.alpha, cfg.dim, gt_probe=cfg.gt, rng=cfg.seed, phi=phi)
    if cfg.mode == "atomic":
        block = reduce(run.final_state, ["A1", "A2", "A3"])
        fid = fidelity(block, ghz_triple(cfg.sign))
    else:
        fid = fidelity(run.final_state, hybrid_ghz_target(cfg.sign, cfg.alpha, cfg.dim))
    return {
        "sign": cfg.sign,
        "mode": cfg.mode,
        "fidelity": fid,
        "probe_success_probability": success_probability_report(run),
        "branch_probability": run.branch_probability,
        "records": _records_payload(run),
    }


def cmd_ghz_test(cfg: RunConfig) -> dict:
    result = run_ghz_test(
        cfg.sign,
        cfg.mode,
        shots=cfg.shots,
        alpha=cfg.alpha,
        dim=cfg.dim,
        gt_probe=cfg.gt,
        seed=cfg.seed,
    )
    expected = exact_branch_probabilities(
        cfg.sign, cfg.mode, alpha=cfg.alpha, dim=cfg.dim, gt_probe=cfg.gt
    )
    payload = result.as_dict()
    payload["branch_expected"] = {
        ",".join(k): v for k, v in sorted(expected.items()) if v > 1e-12
    }
    return payload


def cmd_probe_sweep(cfg: RunConfig) -> dict:
    nbar = round(abs(2 * cfg.alpha) ** 2)
    gt_opt = optimal_probe_time(abs(2 * cfg.alpha) ** 2)
    gt_max = cfg.gt if cfg.gt is not None else 2.0 * gt_opt
    field = make_coherent(2 * cfg.alpha, cfg.dim)
    table = []
    for i in range(PROBE_SWEEP_POINTS):
        gt = gt_max * i / (PROBE_SWEEP_POINTS - 1)
        _, _, p_a, p_b = probe_branches(field, gt)
        table.append({"gt": gt, "p_a": p_a, "p_b": p_b})
    return {
        "nbar": nbar,
        "optimal_gt": gt_opt,
        "table": table,
        "csv_columns": ["gt", "p_a", "p_b"],
    }


def cmd_dispersive_convergence(cfg: RunConfig) -> dict:
    phi = cfg.phi if cfg.phi is not None else math.pi / 16.0
    distances = [dispersive_distance(phi, ratio, cfg.dim) for ratio in cfg.delta_over_g]
    table = [
        {"delta_over_g": ratio, "distance": dist}
        for ratio, dist in zip(cfg.delta_over_g, distances)
    ]
    payload: dict = {"phi": phi, "table": table, "csv_columns": ["delta_over_g", "distance"]}
    if len(distances) > 1:
        payload["monotone_decreasing"] = all(
            later < earlier for earlier, later in zip(distances, distances[1:])
        )
        payload["ratios"] = [
            earlier / later for earlier, later in zip(distances, distances[1:])
        ]
    return payload


_COMMANDS = {
    "prepare-epr": cmd_prepare_epr,
    "prepare-ghz": cmd_prepare_ghz,
    "ghz-test": cmd_ghz_test,
    "probe-sweep": cmd_probe_sweep,
    "dispersive-convergence": cmd_dispersive_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityghz",
        description="Cavity-QED Bell/GHZ preparation and GHZ-test simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--alpha", type=float, help="initial coherent amplitude (> 0)")
        p.add_argument("--dim", type=int, help="Fock-space truncation")
        p.add_argument("--shots", type=int, help="number of Monte Carlo shots")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--gt", type=float, help="probe interaction time (default: pi/(2 sqrt(nbar)))")
        p.add_argument("--phi", type=float, help="conditional phase (default: pi)")
        p.add_argument("--mode", choices=["atomic", "hybrid"])
        p.add_argument("--sign", choices=["+", "-"])
        p.add_argument("--variant", choices=list(EPR_VARIANTS))
        p.add_argument("--delta-over-g", dest="delta_over_g", type=_CONFIG_PARSERS["delta_over_g"],
                       help="comma-separated detuning ratios for the convergence sweep")
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="write the sweep table as CSV (sweep commands)")
        p.add_argument("--config", help="flat key = value config file")
    return parser


def write_report(report: dict, cfg: RunConfig) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def write_csv(report: dict, cfg: RunConfig) -> None:
    if not cfg.csv or "table" not in report:
        return
    columns = report["csv_columns"]
    with open(cfg.csv, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in report["table"]:
            writer.writerow([repr(row[c]) for c in columns])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        validate_config(cfg, args.command)
        payload = _COMMANDS[args.command](cfg)
        report = {
            "command": args.command,
            "version": __version__,
            "seed": cfg.seed,
            "config": cfg.echo(),
        }
        report.update(payload)
        write_report(report, cfg)
        write_csv(report, cfg)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
