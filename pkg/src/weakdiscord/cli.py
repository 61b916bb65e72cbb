"""Command-line entry point ``weakdiscord``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import states
from .qcore import StateError, save_density_matrix
from .xprmt import (
    FAMILIES,
    ExperimentConfig,
    _round_floats,
    analyze_state,
    metadata,
    run_ensemble,
    run_histogram,
    sweep_table,
    write_histogram_json,
    write_json,
    write_records_csv,
    write_sweep_csv,
)

log = logging.getLogger("weakdiscord")


def parse_floats(text: str) -> tuple[float, ...]:
    """``0.25,0.75`` or an inclusive range ``start:stop:step``."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        n = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 12) for i in range(n))
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _add_ensemble_args(p, n_default, alphas_default):
    p.add_argument("--n", type=int, default=n_default, help="number of random states")
    p.add_argument("--ranks", type=parse_ints, default=(2, 3, 4))
    p.add_argument("--alphas", type=parse_floats, default=alphas_default)
    p.add_argument("--seed", type=int, default=42, help="master seed (unsigned 64-bit)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--family", choices=FAMILIES, default="random-mixed")
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakdiscord", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("histogram", help="D_w - D histograms over random states")
    _add_ensemble_args(p, 20000, (0.25, 0.75))
    p.add_argument("--bins", type=int, default=100)

    p = sub.add_parser("sweep", help="mean/std of D_w - D across alpha")
    _add_ensemble_args(p, 10000, parse_floats("0.1:0.9:0.1"))
    p.add_argument("--records", help="also write per-sample records CSV here")

    p = sub.add_parser("analyze", help="report discord and weak discord for a state file")
    p.add_argument("state")
    p.add_argument("--alphas", type=parse_floats, default=(0.25, 0.5, 0.75))
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("make-state", help="write a density matrix JSON file")
    p.add_argument("family", choices=("bell-diagonal", "werner", "random-mixed", "random-pure", "dqc1"))
    p.add_argument("--c", type=parse_floats, help="c1,c2,c3 (bell-diagonal) or c (werner)")
    p.add_argument("--rank", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dimA", type=int, default=2)
    p.add_argument("--dimB", type=int, default=2)
    p.add_argument("--qubits", type=int, default=2, help="DQC1 register size n")
    p.add_argument("--identity", action="store_true", help="DQC1 with U = identity instead of Haar U")
    p.add_argument("--out", required=True)
    return parser


def _make_state(args):
    fam = args.family
    if fam == "bell-diagonal":
        if not args.c or len(args.c) != 3:
            raise SystemExit("bell-diagonal needs --c c1,c2,c3")
        return states.bell_diagonal(states.BellDiagonalParams(*args.c))
    if fam == "werner":
        if not args.c or len(args.c) != 1:
            raise SystemExit("werner needs --c c")
        return states.werner(args.c[0])
    if fam == "random-mixed":
        return states.random_mixed(states.RandomStateSpec(args.rank, args.seed))
    if fam == "random-pure":
        return states.random_pure(args.dimA, args.dimB, args.seed)
    d = 2**args.qubits
    u = np.eye(d) if args.identity else states.haar_unitary(d, args.seed)
    return states.dqc1(u)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "histogram":
            cfg = ExperimentConfig(args.n, args.ranks, args.alphas, args.seed, args.bins, args.out,
                                   args.workers, args.family)
            records, hists = run_histogram(cfg)
            write_records_csv(records, cfg.out_path)
            write_histogram_json(cfg, hists, Path(cfg.out_path).with_suffix(".json"))
            for h in hists:
                print(f"alpha={h.alpha:g} n={h.n} excluded={h.excluded} mean={h.mean:.6g} std={h.std:.6g}")
        elif args.command == "sweep":
            cfg = ExperimentConfig(args.n, args.ranks, args.alphas, args.seed, 2, args.out,
                                   args.workers, args.family)
            if len(cfg.alphas) < 2:
                raise ValueError("a sweep needs at least two alphas")
            records = run_ensemble(cfg)
            rows = sweep_table(cfg, records)
            write_sweep_csv(rows, cfg.out_path)
            write_json(metadata(cfg), Path(cfg.out_path).with_suffix(".json"))
            if args.records:
                write_records_csv(records, args.records)
            for r in rows:
                print(f"alpha={r.alpha:g} mean={r.mean_diff:.6g} std={r.std_diff:.6g} excluded={r.excluded}")
        elif args.command == "analyze":
            report = analyze_state(args.state, args.alphas)
            text = json.dumps(_round_floats(report), indent=1)
            if args.out:
                Path(args.out).write_text(text + "\n")
            else:
                print(text)
        elif args.command == "make-state":
            save_density_matrix(_make_state(args), args.out)
    except (StateError, ValueError, OSError) as exc:
        print(f"weakdiscord: error: {exc}", file=sys.stderr)
        return 2
    return 0
