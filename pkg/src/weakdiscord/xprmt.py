"""Monte-Carlo harness: ensembles of random states, D_w - D statistics, reports.

Every sample derives its own seed from ``(master_seed, index)`` so results do
not depend on how samples are distributed across worker processes.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .correlations import classical_work, discord, quantum_work
from .qcore import load_density_matrix
from .states import (
    DIAGONAL_DISTRIBUTION,
    RandomStateSpec,
    bell_diagonal,
    random_bell_params,
    random_mixed,
)
from .weak import alternative_weak_discord, disturbance_probability, weak_discord

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
FAMILIES = ("random-mixed", "bell-diagonal")
CSV_COLUMNS = ("index", "rank", "alpha", "seed", "discord", "weak_discord", "diff", "prob_valid")


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def sample_seed(master_seed: int, index: int) -> int:
    return splitmix64((master_seed ^ splitmix64(index)) & MASK64)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ExperimentConfig:
    n_states: int = 20000
    ranks: tuple = (2, 3, 4)
    alphas: tuple = (0.25, 0.75)
    master_seed: int = 42
    bins: int = 100
    out_path: str = "hist.csv"
    workers: int = 1
    family: str = "random-mixed"

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("n_states must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if not self.alphas:
            raise ValueError("at least one alpha is required")
        for a in self.alphas:
            if not 0.0 < a <= 1.0:
                raise ValueError(f"alpha {a} outside (0, 1]")
        if not self.ranks or any(r not in (2, 3, 4) for r in self.ranks):
            raise ValueError(f"ranks must be a nonempty subset of {{2, 3, 4}}, got {self.ranks}")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")


@dataclass(frozen=True)
class ExperimentRecord:
    index: int
    rank: int
    alpha: float
    seed: int
    discord: float
    weak_discord: float
    diff: float
    prob_valid: bool

    def csv_row(self) -> list[str]:
        return [str(self.index), str(self.rank), fmt(self.alpha), str(self.seed), fmt(self.discord),
                fmt(self.weak_discord), fmt(self.diff), "true" if self.prob_valid else "false"]


@dataclass
class AlphaHistogram:
    alpha: float
    edges: list
    counts: list
    n: int
    excluded: int
    mean: float
    std: float


@dataclass
class SweepRow:
    alpha: float
    mean_diff: float
    std_diff: float
    n: int
    excluded: int


def _evaluate(job) -> list[ExperimentRecord]:
    index, master_seed, ranks, alphas, family = job
    seed = sample_seed(master_seed, index)
    if family == "bell-diagonal":
        rho = bell_diagonal(random_bell_params(seed))
        rank = int(np.sum(np.linalg.eigvalsh(rho.mat) > 1e-10))
    else:
        rank = ranks[splitmix64(seed) % len(ranks)]
        rho = random_mixed(RandomStateSpec(rank, seed))
    res = discord(rho)
    out = []
    for a in alphas:
        w = weak_discord(rho, a, res)
        out.append(ExperimentRecord(index, rank, float(a), seed, res.discord, w.weak_discord,
                                    w.weak_discord - res.discord, w.prob_valid))
    return out


def run_ensemble(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Evaluate every sample once and every alpha on that same state."""
    jobs = [(i, cfg.master_seed, tuple(cfg.ranks), tuple(cfg.alphas), cfg.family) for i in range(cfg.n_states)]
    if cfg.workers == 1:
        chunks = map(_evaluate, jobs)
        records = [r for chunk in chunks for r in chunk]
    else:
        chunksize = max(1, math.ceil(len(jobs) / (cfg.workers * 8)))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = [r for chunk in pool.map(_evaluate, jobs, chunksize=chunksize) for r in chunk]
    records.sort(key=lambda r: (r.index, cfg.alphas.index(r.alpha)))
    return records


def _diffs_by_alpha(cfg, records):
    out = {}
    for a in cfg.alphas:
        rows = [r for r in records if r.alpha == a]
        valid = np.array([r.diff for r in rows if r.prob_valid])
        out[a] = (valid, len(rows) - len(valid))
    return out


def _std(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def run_histogram(cfg: ExperimentConfig):
    """Records plus, per alpha, equal-width histogram of D_w - D over its observed range."""
    records = run_ensemble(cfg)
    return records, histograms(cfg, records)


def histograms(cfg: ExperimentConfig, records) -> list[AlphaHistogram]:
    hists = []
    for a, (diffs, excluded) in _diffs_by_alpha(cfg, records).items():
        if excluded:
            log.warning("alpha=%g: %d records excluded (weak probabilities out of range)", a, excluded)
        if len(diffs):
            counts, edges = np.histogram(diffs, bins=cfg.bins, range=(diffs.min(), diffs.max()))
            mean = float(diffs.mean())
        else:
            counts, edges, mean = np.zeros(cfg.bins, int), np.zeros(cfg.bins + 1), float("nan")
        hists.append(AlphaHistogram(float(a), edges.tolist(), counts.astype(int).tolist(), len(diffs),
                                    excluded, mean, _std(diffs)))
    return hists


def run_alpha_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Mean and sample standard deviation of D_w - D per alpha over one shared ensemble."""
    if len(cfg.alphas) < 2:
        raise ValueError("a sweep needs at least two alphas")
    records = run_ensemble(cfg)
    return sweep_table(cfg, records)


def sweep_table(cfg: ExperimentConfig, records) -> list[SweepRow]:
    rows = []
    for a, (diffs, excluded) in _diffs_by_alpha(cfg, records).items():
        mean = float(diffs.mean()) if len(diffs) else float("nan")
        rows.append(SweepRow(float(a), mean, _std(diffs), len(diffs), excluded))
    return rows


def metadata(cfg: ExperimentConfig) -> dict:
    return {
        "version": __version__,
        "family": cfg.family,
        "n_states": cfg.n_states,
        "ranks": list(cfg.ranks),
        "alphas": list(cfg.alphas),
        "master_seed": cfg.master_seed,
        "bins": cfg.bins,
        "diagonal_distribution": DIAGONAL_DISTRIBUTION,
        "ensemble": "one state ensemble shared across all alpha values",
        "seed_derivation": "splitmix64(master_seed XOR splitmix64(index))",
        "std": "sample standard deviation (ddof=1)",
    }


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())


def _round_floats(obj):
    # 17 significant digits throughout
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(doc, path) -> None:
    with open(path, "w") as fh:
        json.dump(_round_floats(doc), fh, indent=1)
        fh.write("\n")


def write_histogram_json(cfg: ExperimentConfig, hists, path) -> None:
    write_json({"metadata": metadata(cfg), "histograms": [asdict(h) for h in hists]}, path)


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("alpha", "mean_diff", "std_diff", "n", "excluded"))
        for r in rows:
            w.writerow((fmt(r.alpha), fmt(r.mean_diff), fmt(r.std_diff), r.n, r.excluded))


def analyze_state(path, alphas) -> dict:
    """Discord, demon work and per-alpha weak quantities for a state stored as JSON."""
    rho = load_density_matrix(path)
    res = discord(rho)
    report = {
        "dimA": rho.dim_a,
        "dimB": rho.dim_b,
        "mutual_info": res.mutual_info,
        "max_J": res.max_J,
        "discord": res.discord,
        "optimal": {"theta": res.optimal.theta, "phi": res.optimal.phi},
        "probs": list(res.probs),
        "cond_entropies": list(res.cond_entropies),
        "quantum_work": quantum_work(rho),
        "classical_work": classical_work(rho, res.optimal),
        "alphas": [],
    }
    for a in alphas:
        w = weak_discord(rho, a, res)
        report["alphas"].append({
            "alpha": float(a),
            "weak_discord": w.weak_discord,
            "diff": w.weak_discord - res.discord,
            "weak_value": w.weak_value,
            "weak_probs": list(w.weak_probs),
            "p_f": disturbance_probability(rho, a),
            "coincides": w.coincides,
            "prob_valid": w.prob_valid,
            "alternative_weak_discord": alternative_weak_discord(rho, a),
        })
    return report
