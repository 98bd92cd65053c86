"""Command-line front end.

``schedrisk analyze`` runs the full pipeline on a project file and writes
four artifacts into the output directory: the metrics table (csv or
json), the risk-baseline curve series, the activity-risk-index report,
and a run manifest echoing the configuration so published numbers can be
re-derived.  ``schedrisk validate`` checks a project file and reports
violations.

Exit codes: 0 success, 1 input/validation failure, 2 computation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .cpm import planned_schedule
from .errors import ComputationError, ParseError, SamplingError, SchedRiskError
from .metrics import METRIC_KEYS, MetricsReport, compute_metrics, rank_activities
from .network import load_project, validate
from .riskbaseline import (
    DEFAULT_SCALING,
    PROPORTIONAL_SIGMA,
    PROPORTIONAL_VARIANCE,
    AriReport,
    RiskBaselineCurve,
    ari,
    make_control_grid,
)
from .simulation import SimulationConfig, run_batch

METRIC_CHOICES = ("ci", "cri", "si", "ssi", "moi", "ari")
_EXPANSION = {
    "ci": ("ci",),
    "cri": ("cri_pearson", "cri_spearman", "cri_kendall"),
    "si": ("si",),
    "ssi": ("ssi",),
    "moi": ("moi",),
}


@dataclass(frozen=True)
class RunConfig:
    input: str
    replications: int = 20000
    seed: int = 42
    grid_step: float | None = None
    scaling: str = DEFAULT_SCALING
    metrics: tuple[str, ...] = METRIC_CHOICES
    tie_eps: float = 1e-3
    moi_successors: str = "immediate"
    determinize_with: str = "mean"
    format: str = "csv"
    out: str = "."


def _config_echo(config: RunConfig) -> dict:
    echo = asdict(config)
    echo["metrics"] = list(config.metrics)
    return echo


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _metric_columns(selected: tuple[str, ...]) -> list[str]:
    cols: list[str] = []
    for token in ("ci", "cri", "si", "ssi", "moi"):
        if token in selected:
            cols.extend(_EXPANSION[token])
    return cols


def emit_metrics(
    metrics: MetricsReport,
    ari_report: AriReport | None,
    fmt: str,
    selected: tuple[str, ...] = METRIC_CHOICES,
    tie_eps: float = 1e-3,
    config_echo: dict | None = None,
) -> str:
    """Render the per-activity metrics table with rankings."""
    value_cols = _metric_columns(selected)
    want_ari = "ari" in selected and ari_report is not None
    header = ["activity_id"] + value_cols
    if want_ari:
        header += ["ari_raw", "ari_normalized"]
    rank_cols = [f"rank_{c}" for c in value_cols]
    if want_ari:
        rank_cols.append("rank_ari")
    header += rank_cols

    ari_rank = (
        rank_activities(ari_report.ari_normalized, tie_eps) if want_ari else {}
    )

    rows = []
    for aid in metrics.ids:
        row: list[str] = [aid]
        row += [_fmt(metrics.values[c][aid]) for c in value_cols]
        if want_ari:
            row += [_fmt(ari_report.ari_raw[aid]), _fmt(ari_report.ari_normalized[aid])]
        row += [str(metrics.ranks[c][aid]) for c in value_cols]
        if want_ari:
            row.append(str(ari_rank[aid]))
        rows.append(row)

    if fmt == "csv":
        buf = io.StringIO()
        if config_echo is not None:
            buf.write("# config: " + json.dumps(config_echo) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    doc: dict[str, dict] = {}
    for aid in metrics.ids:
        entry: dict = {c: metrics.values[c][aid] for c in value_cols}
        if want_ari:
            entry["ari_raw"] = ari_report.ari_raw[aid]
            entry["ari_normalized"] = ari_report.ari_normalized[aid]
        for c in value_cols:
            entry[f"rank_{c}"] = metrics.ranks[c][aid]
        if want_ari:
            entry["rank_ari"] = ari_rank[aid]
        doc[aid] = entry
    return json.dumps(doc, indent=2) + "\n"


def emit_curves(
    curves: tuple[RiskBaselineCurve, ...] | list[RiskBaselineCurve],
    fmt: str = "csv",
    config_echo: dict | None = None,
) -> str:
    """Wide table of curve values: one time column, one column per scenario."""
    if not curves:
        raise SchedRiskError("no curves to emit")
    grid = curves[0].grid
    for curve in curves[1:]:
        if curve.grid.points != grid.points:
            raise SchedRiskError("curves do not share one control grid")

    if fmt == "csv":
        buf = io.StringIO()
        if config_echo is not None:
            buf.write("# config: " + json.dumps(config_echo) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time"] + [c.label for c in curves])
        for i, t in enumerate(grid.points):
            writer.writerow([f"{t:.9g}"] + [f"{c.values[i]:.9g}" for c in curves])
        return buf.getvalue()

    doc: dict = {"time": list(grid.points)}
    for c in curves:
        doc[c.label] = list(c.values)
    if config_echo is not None:
        doc["config"] = config_echo
    return json.dumps(doc, indent=2) + "\n"


def _emit_ari(report: AriReport, config_echo: dict | None) -> str:
    doc = {
        "srv_0": report.srv_0,
        "srv": dict(report.srv),
        "ari_raw": dict(report.ari_raw),
        "ari_raw_se": dict(report.ari_raw_se),
        "ari_normalized": dict(report.ari_normalized),
        "warnings": list(report.warnings),
    }
    if config_echo is not None:
        doc["config"] = config_echo
    return json.dumps(doc, indent=2) + "\n"


def _emit_manifest(config_echo: dict, sac: float, grid_points: int) -> str:
    doc = {
        "tool": "schedrisk",
        "version": __version__,
        "config": config_echo,
        "resolved": {"sac": sac, "grid_points": grid_points},
    }
    return json.dumps(doc, indent=2) + "\n"


def analyze(config: RunConfig, workers: int = 1) -> int:
    """Run the full analysis and write artifacts; returns the exit status."""
    try:
        network = load_project(config.input)
    except OSError as exc:
        print(f"error: cannot read '{config.input}': {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report = validate(network)
    if not report.ok:
        print(str(report), file=sys.stderr)
        return 1

    selected = config.metrics
    echo = _config_echo(config)
    try:
        plan = planned_schedule(network, config.determinize_with)
        grid = make_control_grid(plan.sac, config.grid_step)
        sim_config = SimulationConfig(replications=config.replications, seed=config.seed)
        batch = run_batch(network, sim_config, workers)

        if "ari" in selected and batch.pd_sd == 0.0:
            raise ComputationError("ARI undefined: project has no uncertainty")

        metric_keys = tuple(k for k in METRIC_KEYS if k in _metric_columns(selected))
        metrics = compute_metrics(
            network,
            batch,
            tie_eps=config.tie_eps,
            moi_successor_scope=config.moi_successors,
            selected=metric_keys,
        )
        ari_report = None
        if "ari" in selected:
            ari_report = ari(
                network,
                plan,
                grid,
                sim_config,
                scaling=config.scaling,
                workers=workers,
                determinize=config.determinize_with,
            )
    except (ComputationError, SamplingError, ValueError, SchedRiskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(config.out, exist_ok=True)
    ext = config.format
    paths = []

    metrics_path = os.path.join(config.out, f"metrics.{ext}")
    content = emit_metrics(
        metrics,
        ari_report,
        config.format,
        selected=selected,
        tie_eps=config.tie_eps,
        config_echo=echo if config.format == "csv" else None,
    )
    _write(metrics_path, content)
    paths.append(metrics_path)

    if ari_report is not None:
        curves_path = os.path.join(config.out, f"curves.{ext}")
        _write(curves_path, emit_curves(ari_report.curves, config.format, config_echo=echo))
        paths.append(curves_path)

        ari_path = os.path.join(config.out, "ari.json")
        _write(ari_path, _emit_ari(ari_report, echo))
        paths.append(ari_path)

    manifest_path = os.path.join(config.out, "manifest.json")
    _write(manifest_path, _emit_manifest(echo, plan.sac, len(grid.points)))
    paths.append(manifest_path)

    for warning in list(metrics.warnings) + (list(ari_report.warnings) if ari_report else []):
        print(f"warning: {warning}", file=sys.stderr)
    print("wrote " + ", ".join(paths))
    return 0


def _write(path: str, content: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)


def cmd_validate(path: str) -> int:
    try:
        network = load_project(path)
    except OSError as exc:
        print(f"error: cannot read '{path}': {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = validate(network)
    print(str(report))
    return 0 if report.ok else 1


def _parse_metrics(text: str) -> tuple[str, ...]:
    tokens = tuple(t.strip() for t in text.split(",") if t.strip())
    for t in tokens:
        if t not in METRIC_CHOICES:
            raise argparse.ArgumentTypeError(
                f"unknown metric '{t}' (choose from {', '.join(METRIC_CHOICES)})"
            )
    return tokens


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schedrisk",
        description="Monte Carlo schedule risk analysis for stochastic project networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run the full analysis and write report artifacts")
    pa.add_argument("input", help="project file (JSON)")
    pa.add_argument("--replications", type=int, default=20000)
    pa.add_argument("--seed", type=int, default=None,
                    help="simulation seed (default: $SCHEDRISK_SEED or 42)")
    pa.add_argument("--grid-step", type=float, default=None,
                    help="control-grid spacing (default: planned duration / 40)")
    pa.add_argument("--scaling", choices=(PROPORTIONAL_VARIANCE, PROPORTIONAL_SIGMA),
                    default=DEFAULT_SCALING)
    pa.add_argument("--metrics", type=_parse_metrics, default=METRIC_CHOICES,
                    help="comma-separated subset of: " + ",".join(METRIC_CHOICES))
    pa.add_argument("--tie-eps", type=float, default=1e-3)
    pa.add_argument("--moi-successors", choices=("transitive", "immediate"), default="immediate")
    pa.add_argument("--determinize-with", choices=("mean", "mode"), default="mean")
    pa.add_argument("--format", choices=("csv", "json"), default="csv")
    pa.add_argument("--out", default=".")
    pa.add_argument("--workers", type=int, default=1,
                    help="worker threads for the simulation (output is identical for any count)")

    pv = sub.add_parser("validate", help="check a project file and report violations")
    pv.add_argument("input", help="project file (JSON)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.input)

    seed = args.seed
    if seed is None:
        try:
            seed = int(os.environ.get("SCHEDRISK_SEED", "42"))
        except ValueError:
            print("error: SCHEDRISK_SEED must be an integer", file=sys.stderr)
            return 1
    config = RunConfig(
        input=args.input,
        replications=args.replications,
        seed=seed,
        grid_step=args.grid_step,
        scaling=args.scaling,
        metrics=tuple(args.metrics),
        tie_eps=args.tie_eps,
        moi_successors=args.moi_successors,
        determinize_with=args.determinize_with,
        format=args.format,
        out=args.out,
    )
    return analyze(config, workers=args.workers)


if __name__ == "__main__":
    sys.exit(main())
