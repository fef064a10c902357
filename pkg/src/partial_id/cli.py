"""``partial-id`` command line: test, region, oracle and mc subcommands.

Exit status: 0 on completion (a rejection is a completed run), 2 on usage
errors, 3 on input errors.  Every artifact embeds a run manifest; the worker
count is deliberately left out of it because it never changes results.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .empirical import IngestError, load_sample
from .kstest import TestConfig, run_test
from .mc import (DgpSpec, McConfig, run_coverage, run_power, run_rejection_table,
                 run_sensitivity, run_tuning_table)
from .models import FAMILIES, JovanovicModel, ModelSpaceError, TabulatedModel, TinbergenModel
from .oracle import DiscreteStructure, check_duality, feasible_coupling, sup_deficiency, worst_set
from .region import GridSpec, RegionError, confidence_region, region_summary

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 2, 3
DEFAULT_SCHEMA = {"jovanovic": "d", "tinbergen": "c"}


class InputError(Exception):
    pass


def _digest(*paths) -> str | None:
    h = hashlib.sha256()
    seen = False
    for p in paths:
        if p is None:
            continue
        try:
            h.update(Path(p).read_bytes())
        except OSError as exc:
            raise InputError(f"cannot read {p}: {exc.strerror}") from None
        seen = True
    return "sha256:" + h.hexdigest() if seen else None


def manifest(subcommand: str, config: dict, digest: str | None) -> dict:
    return {"subcommand": subcommand, "config": config, "version": __version__,
            "input_digest": digest}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_artifact(man: dict, result: dict) -> str:
    return json.dumps({"manifest": man, "result": result}, indent=2, sort_keys=True) + "\n"


def _csv_artifact(man: dict, rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _bandwidth(args) -> float | str:
    if args.no_filter:
        return 1.0
    if args.bandwidth == "auto":
        return "auto"
    try:
        return float(args.bandwidth)
    except ValueError:
        raise InputError(f"--bandwidth must be 'auto' or a number, got {args.bandwidth!r}") from None


def _model(args, sample):
    if args.model == "jovanovic":
        if args.theta is None:
            raise InputError("jovanovic needs --theta")
        return JovanovicModel(args.theta)
    if args.model == "tinbergen":
        if args.s is None:
            raise InputError("tinbergen needs --s")
        return TinbergenModel(args.s)
    if args.nu_file is None:
        raise InputError("tabulated needs --nu-file")
    return TabulatedModel.from_csv(args.nu_file, sample.d_discrete, sample.d_continuous)


def cmd_test(args) -> int:
    bandwidth = _bandwidth(args)
    schema = args.schema or DEFAULT_SCHEMA.get(args.model)
    if schema is None:
        raise InputError("--schema is required for tabulated models")
    digest = _digest(args.data, args.nu_file)
    sample = load_sample(args.data, schema)
    model = _model(args, sample)
    cfg = TestConfig(alpha=args.alpha, B=args.bootstrap, bandwidth=bandwidth, seed=args.seed,
                     threads=args.threads, keep_draws=args.dump_draws)
    res = run_test(sample, model, cfg)
    config = {"data": str(args.data), "schema": schema, "model": model.describe(),
              "alpha": cfg.alpha, "bootstrap": cfg.B, "bandwidth": bandwidth,
              "bandwidth_resolved": res.bandwidth_used, "seed": cfg.seed, "n": sample.n,
              "dump_draws": bool(args.dump_draws)}
    _emit(_json_artifact(manifest("test", config, digest), res.to_dict(args.dump_draws)), args.out)
    return EXIT_OK


def cmd_region(args) -> int:
    bandwidth = _bandwidth(args)
    schema = args.schema or DEFAULT_SCHEMA[args.model]
    try:
        grid = GridSpec.parse(args.grid)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    digest = _digest(args.data)
    sample = load_sample(args.data, schema)
    cfg = TestConfig(alpha=args.alpha, B=args.bootstrap, bandwidth=bandwidth, seed=args.seed,
                     threads=args.threads)
    reg = confidence_region(sample, FAMILIES[args.model], grid, cfg)
    dim = len(grid.axes)
    names = ["theta"] if dim == 1 else [f"theta_{i + 1}" for i in range(dim)]
    rows = [names + ["statistic", "critical_value", "in_region"]]
    for r in reg.rows:
        rows.append([repr(t) for t in r.theta] + [repr(r.statistic), repr(r.critical_value),
                                                   str(r.in_region).lower()])
    config = {"data": str(args.data), "schema": schema, "model": args.model,
              "grid": [list(a) for a in grid.axes], "alpha": cfg.alpha, "bootstrap": cfg.B,
              "bandwidth": bandwidth, "seed": cfg.seed, "n": sample.n}
    _emit(_csv_artifact(manifest("region", config, digest), rows), args.out)
    summ = region_summary(reg)
    if summ.empty:
        print(f"region empty: {summ.message}", file=sys.stderr)
    else:
        for i, ax in enumerate(summ.axes):
            print(f"theta[{i}] in [{ax.lo:g}, {ax.hi:g}] ({summ.message})", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    digest = _digest(args.structure)
    try:
        d = DiscreteStructure.load(args.structure)
    except (KeyError, IndexError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed structure file: {exc}") from None
    sup = sup_deficiency(d)
    feasible, coupling = feasible_coupling(d)
    result = {
        "m": d.m, "k": d.k,
        "sup_deficiency": sup,
        "feasible": feasible,
        "duality_agrees": check_duality(d),
        "coupling": coupling.tolist() if coupling is not None else None,
        "violated_set": worst_set(d) if sup > 1e-12 else None,
    }
    _emit(_json_artifact(manifest("oracle", {"structure": str(args.structure)}, digest), result),
          args.out)
    return EXIT_OK


def _h_range(spec: str) -> np.ndarray:
    try:
        lo, hi, count = spec.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError:
        raise InputError(f"--h-range must be lo:hi:count, got {spec!r}") from None


def cmd_mc(args) -> int:
    cfg = McConfig(reps=args.reps, B=args.bootstrap, seed=args.seed, threads=args.threads,
                   upper_sets=args.upper_sets)
    config = {"reps": cfg.reps, "bootstrap": cfg.B, "seed": cfg.seed, "upper_sets": cfg.upper_sets,
              "alphas": list(cfg.alphas), "sample_sizes": list(cfg.sample_sizes)}
    if args.table in ("4", "5"):
        if args.table == "4":
            table = run_rejection_table(cfg, DgpSpec(0.15))
        else:
            cfg = replace(cfg, bandwidth=1.0)
            table = run_rejection_table(cfg, DgpSpec(0.0))
        config.update(mode=f"table{args.table}", bandwidths=list(table.bandwidths))
        rows = table.to_rows()
    elif args.table == "6":
        table = run_tuning_table(cfg, DgpSpec(0.15))
        config.update(mode="table6", settings=[list(p) for p in table.settings])
        rows = table.to_rows()
    elif args.sensitivity:
        hs = _h_range(args.h_range)
        curve = run_sensitivity(cfg, DgpSpec(0.15), hs, n=args.n, alpha=args.alpha)
        config.update(mode="sensitivity", n=args.n, alpha=args.alpha, h_range=args.h_range)
        rows = curve.to_rows()
    elif args.power:
        table = run_power(cfg, DgpSpec(0.15), args.s_model)
        config.update(mode="power", s_model=args.s_model, bandwidths=list(table.bandwidths))
        rows = table.to_rows()
    else:
        cov = run_coverage(cfg, p=args.p, n=args.n)
        config.update(mode="coverage", p=args.p, n=args.n, thetas=list(cov.thetas))
        rows = cov.to_rows()
    _emit(_csv_artifact(manifest("mc", config, None), rows), args.out)
    return EXIT_OK


def _add_test_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--schema", help="column roles, e.g. 'd,c' (default: from model)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap replications B")
    bw = p.add_mutually_exclusive_group()
    bw.add_argument("--bandwidth", default="auto", help="'auto' or a fixed h > 0")
    bw.add_argument("--no-filter", action="store_true", help="keep every set (h = 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partial-id", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"partial-id {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test internal consistency of one structure")
    _add_test_flags(t)
    t.add_argument("--model", required=True, choices=["jovanovic", "tinbergen", "tabulated"])
    t.add_argument("--theta", type=float)
    t.add_argument("--s", type=float)
    t.add_argument("--nu-file", help="tabulated model: CSV with columns set,nu_gamma")
    t.add_argument("--dump-draws", action="store_true")
    t.set_defaults(func=cmd_test)

    r = sub.add_parser("region", help="confidence region by test inversion over a grid")
    _add_test_flags(r)
    r.add_argument("--model", required=True, choices=sorted(FAMILIES))
    r.add_argument("--grid", action="append", required=True, metavar="LO:HI:STEPS")
    r.set_defaults(func=cmd_region)

    o = sub.add_parser("oracle", help="finite-support deficiency vs coupling check")
    o.add_argument("--structure", required=True, help="JSON or CSV structure file")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("mc", help="Monte Carlo rejection tables and curves")
    mode = m.add_mutually_exclusive_group(required=True)
    mode.add_argument("--table", choices=["4", "5", "6"])
    mode.add_argument("--sensitivity", action="store_true")
    mode.add_argument("--power", action="store_true")
    mode.add_argument("--coverage", action="store_true")
    m.add_argument("--reps", type=int, default=1000)
    m.add_argument("--bootstrap", type=int, default=1000)
    m.add_argument("--seed", type=int, default=777)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--n", type=int, default=500)
    m.add_argument("--alpha", type=float, default=0.05)
    m.add_argument("--h-range", default="0.005:0.15:30")
    m.add_argument("--s-model", type=float, default=0.05)
    m.add_argument("--p", type=float, default=0.25)
    m.add_argument("--upper-sets", choices=["closed", "open"], default="closed")
    m.add_argument("--out")
    m.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, IngestError, ModelSpaceError, RegionError, FileNotFoundError) as exc:
        print(f"partial-id: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"partial-id: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
