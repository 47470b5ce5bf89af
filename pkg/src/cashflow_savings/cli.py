"""Command line entry point.

    cashflow-savings summarize --config run.toml
    cashflow-savings cv --config run.toml --out results/ --seed 3
    cashflow-savings sweep --config run.toml --format csv

Every file written starts with ``# seed=N config_hash=HEX created=TIMESTAMP``;
everything below that line depends only on the config and the seed.
Set CASHFLOW_SAVINGS_LOG (DEBUG, INFO, ...) for progress messages on stderr.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (accuracy_savings_sweep, compare_savings, improvement_decision,
                       render_sweep, write_sweep_csv)
from .config import header_line, load_config
from .errors import CashFlowError, ValidationError
from .evaluation import SUMMARY_HEADER, cross_validate, parameter_search
from .models import fixed_lambda_for, to_dict
from .timeseries import SUMMARY_HEADER as SERIES_SUMMARY_HEADER
from .timeseries import Variant, derive_variant, load_series, summarize, write_series

log = logging.getLogger("cashflow_savings")

COMMANDS = ("summarize", "derive", "cv", "compare", "sweep")
LOG_ENV = "CASHFLOW_SAVINGS_LOG"


class Run:
    """One command invocation: config, output directory and header line."""

    def __init__(self, cfg, out_dir, fmt="csv+plot"):
        self.cfg = cfg
        self.out = Path(out_dir)
        self.fmt = fmt
        created = dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        self.header = header_line(cfg, created)
        self.written = []

    def path(self, name):
        return self.out / name

    def write_rows(self, name, header_row, rows):
        p = self.path(name)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# {self.header}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header_row)
            w.writerows(rows)
        self.written.append(p)
        return p

    def series(self):
        cfg = self.cfg
        s = load_series(cfg.input_path)
        if cfg.variant is not None:
            variant = Variant.parse(cfg.variant.name)
            seed = cfg.variant_seed() if variant is Variant.RANDOM_SHOCK else None
            s = derive_variant(s, variant, seed)
        return s

    def split(self, series):
        g = int(round(self.cfg.g_fraction * len(series)))
        if g < 2:
            raise ValidationError(f"g_fraction {self.cfg.g_fraction} leaves {g} training rows")
        return g

    def spec(self, series, g):
        """The configured model spec; a hyperparameter grid is settled by validation R^2."""
        cfg = self.cfg
        candidates = cfg.candidates()
        if len(candidates) == 1:
            spec = candidates[0]
        else:
            spec, scored = parameter_search(series, candidates, cfg.g_fraction,
                                            seed=cfg.fit_seed())
            rows = [[s.label, s.describe_parameters(), "" if r2 is None else repr(r2),
                     "" if k is None else k, int(s is spec)] for s, r2, k in scored]
            self.write_rows("search.csv", ("model", "parameters", "r2", "n_parameters",
                                           "chosen"), rows)
        if cfg.model.lambda_mode == "global":
            spec = fixed_lambda_for(spec, series.amounts[:g])
        return spec


def cmd_summarize(run):
    s = run.series()
    row = summarize(s).csv_row(run.cfg.label)
    run.write_rows("summary.csv", SERIES_SUMMARY_HEADER, [row])


def cmd_derive(run):
    if run.cfg.variant is None:
        raise ValidationError("variant: required by the derive command")
    s = run.series()
    p = run.path("derived.csv")
    write_series(s, p, run.header)
    run.written.append(p)


def cmd_cv(run):
    cfg = run.cfg
    s = run.series()
    g = run.split(s)
    spec = run.spec(s, g)
    report = cross_validate(s, spec, g, cfg.H, cfg.fixed_origin, cfg.fold_stride,
                            seed=cfg.fit_seed())
    p = run.path("cv_horizons.csv")
    report.write_csv(p, run.header)
    run.written.append(p)
    run.write_rows("cv_summary.csv", SUMMARY_HEADER, [report.summary_row()])
    model = spec.fit(s.window(0, g), seed=cfg.fit_seed())
    doc = to_dict(model)
    doc["provenance"] = run.header
    p = run.path("model.json")
    p.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    run.written.append(p)
    log.info("%s epsilon_bar=%.4f", spec.label, report.mean_epsilon)


def cmd_compare(run):
    cfg = run.cfg
    s = run.series()
    g = run.split(s)
    spec = run.spec(s, g)
    report = compare_savings(s, spec, cfg.cost_structures(), g, cfg.H, cfg.risk_levels,
                             cfg.fold_stride, cfg.fit_seed(), cfg.workdays_per_year,
                             cfg.costs.shortage_basis)
    p = run.path("savings.csv")
    report.write_csv(p, run.header)
    run.written.append(p)


def cmd_sweep(run):
    cfg = run.cfg
    s = run.series()
    g = run.split(s)
    sd = float(np.std(s.amounts[:g], ddof=1))
    grid = [m * sd for m in cfg.sweep.sigma_multipliers]
    points = accuracy_savings_sweep(s, grid, cfg.cost_structures(), cfg.risk_levels, g, cfg.H,
                                    cfg.sub_seed("sweep"), cfg.fold_stride,
                                    cfg.workdays_per_year, cfg.costs.shortage_basis)
    refs = [(r.epsilon, r.label) for r in cfg.sweep.reference]
    if run.fmt == "csv+plot" and len(points) >= 2:
        run.written.extend(render_sweep(points, run.out, refs, run.header))
    else:
        p = run.path("sweep.csv")
        write_sweep_csv(points, p, run.header)
        run.written.append(p)
    dec = cfg.sweep.decision
    if dec is not None:
        rows = [[f"{risk:g}", repr(dec.current_epsilon), repr(dec.target_epsilon), repr(gain),
                 repr(dec.improvement_cost), "yes" if ok else "no"]
                for risk, gain, ok in improvement_decision(points, dec.current_epsilon,
                                                           dec.target_epsilon,
                                                           dec.improvement_cost)]
        run.write_rows("decision.csv", ("risk", "current_epsilon", "target_epsilon",
                                        "extra_saving_per_day", "improvement_cost",
                                        "worthwhile"), rows)


HANDLERS = {"summarize": cmd_summarize, "derive": cmd_derive, "cv": cmd_cv,
            "compare": cmd_compare, "sweep": cmd_sweep}


def run(command, cfg, out_dir=None, fmt="csv+plot"):
    """Execute ``command`` with a validated config; returns the written paths."""
    if command not in HANDLERS:
        raise ValidationError(f"unknown command {command!r}")
    r = Run(cfg, out_dir if out_dir is not None else cfg.output_path, fmt)
    r.out.mkdir(parents=True, exist_ok=True)
    HANDLERS[command](r)
    return r.written


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cashflow-savings",
        description="Cash-flow forecast accuracy versus cash-management cost savings.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "summarize": "length, mean, std dev and kurtosis of the input series",
        "derive": "write the configured variant of the input series",
        "cv": "cross-validated error ratio per horizon of the configured model",
        "compare": "policy cost savings of the configured model over the mean forecast",
        "sweep": "savings of synthetic forecasts over a grid of noise levels",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, type=Path, help="TOML pipeline config")
        p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="master seed (overrides seed)")
        p.add_argument("--format", choices=("csv", "csv+plot"), default="csv+plot")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {"seed": args.seed} if args.seed is not None else None
    try:
        cfg = load_config(args.config, overrides)
    except ValidationError as exc:
        print(f"error: config {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        written = run(args.command, cfg, args.out, args.format)
    except (CashFlowError, OSError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
