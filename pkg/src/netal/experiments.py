"""Experiment driver: dataset preparation, baselines, and benchmark grids.

Every command persists its result table three ways (aligned text, CSV,
JSON) plus the per-trace artifacts the aggregates are computed from, so
any reported mean is recomputable offline. Wall-clock measurements are
written to separate *_timings files: the result tables proper contain
only seed-determined values and rerun byte-identical.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import (
    BinaryDataset,
    EncodedDataset,
    Encoder,
    Splits,
    build_attack_datasets,
    read_sidecar,
    split,
    write_sidecar,
)
from .ensemble import EnsembleSpec, default_ensemble_spec
from .kdd import KddRecords, parse_kdd_file
from .learners import (
    ISOLATION_FOREST,
    LOGISTIC,
    RANDOM_FOREST,
    LearnerConfig,
    train as train_learner,
)
from .learners.isolation import train_isolation
from .loop import DEFAULT_BUDGET, DEFAULT_CHECKPOINTS, DEFAULT_N_SEED, LoopConfig, run
from .metrics import aggregate, feature_z_scores, snapshot, zscore_table

log = logging.getLogger("netal.experiments")

ENSEMBLE_LEARNER = "ensemble"
GRID_LEARNERS = (LOGISTIC, RANDOM_FOREST)
GRID_STRATEGIES = ("random", "uncertainty", "entropy")
UNSUP_STRATEGIES = ("entropy", "isolation")

RECORDS_FILE = "records.kdd"
SIDECAR_FILE = "sidecar.json"


def make_learner(name: str, seed: int = 0) -> LearnerConfig | EnsembleSpec:
    """Learner name as it appears in tables -> trainable config."""
    if name == ENSEMBLE_LEARNER:
        return default_ensemble_spec(seed)
    return LearnerConfig(kind=name, seed=seed)


def slug_of(attack_label: str) -> str:
    return attack_label.rstrip(".")


# ---------------------------------------------------------------------------
# result tables


@dataclass(frozen=True)
class Cell:
    mean: float
    std: float

    def text(self, show_std: bool = True) -> str:
        if show_std:
            return f"{self.mean:.2f} +- {self.std:.2f}"
        return f"{self.mean:.2f}"


@dataclass
class ResultTable:
    title: str
    key_name: str
    columns: list[str]
    rows: list[tuple[str, dict[str, Cell]]] = field(default_factory=list)

    def add_row(self, key: str, cells: dict[str, Cell]) -> None:
        missing = [c for c in self.columns if c not in cells]
        if missing:
            raise ValueError(f"row {key!r} missing columns {missing}")
        self.rows.append((key, cells))

    def cell(self, key: str, column: str) -> Cell:
        for k, cells in self.rows:
            if k == key:
                return cells[column]
        raise KeyError(key)

    def render_text(self, std_rows: set[str] | None = None) -> str:
        """Aligned table; +- std shown only for rows in std_rows (None = all)."""
        body = []
        for key, cells in self.rows:
            show = std_rows is None or key in std_rows
            body.append([key] + [cells[c].text(show) for c in self.columns])
        widths = [len(self.key_name)] + [len(c) for c in self.columns]
        for row in body:
            widths = [max(w, len(v)) for w, v in zip(widths, row)]
        def fmt(row):
            return "  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
        lines = [self.title, fmt([self.key_name] + self.columns)]
        lines.append("-" * len(lines[1]))
        lines.extend(fmt(r) for r in body)
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            heads = [self.key_name]
            for c in self.columns:
                heads += [f"{c}_mean", f"{c}_std"]
            fh.write(",".join(heads) + "\n")
            for key, cells in self.rows:
                vals = [key]
                for c in self.columns:
                    vals += [repr(cells[c].mean), repr(cells[c].std)]
                fh.write(",".join(vals) + "\n")

    def to_json_dict(self) -> dict:
        return {
            "title": self.title,
            "key": self.key_name,
            "columns": list(self.columns),
            "rows": [
                {
                    "key": key,
                    "cells": {
                        c: {"mean": cells[c].mean, "std": cells[c].std}
                        for c in self.columns
                    },
                }
                for key, cells in self.rows
            ],
        }

    def save(self, out_dir, stem: str, std_rows: set[str] | None = None) -> None:
        out_dir = Path(out_dir)
        (out_dir / f"{stem}.txt").write_text(
            self.render_text(std_rows), encoding="utf-8"
        )
        self.to_csv(out_dir / f"{stem}.csv")
        with open(out_dir / f"{stem}.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _agg_cell(values) -> Cell:
    mean, std = aggregate(values)
    return Cell(mean, std)


# ---------------------------------------------------------------------------
# prepared datasets


@dataclass
class PreparedDataset:
    """One per-attack dataset, encoded and split, ready for experiments."""

    slug: str
    attack_label: str
    n_attacks: int
    n_normals: int
    prevalence: float
    split_seed: int
    encoder: Encoder
    splits: Splits
    records: KddRecords | None = None

    @property
    def n_records(self) -> int:
        return self.n_attacks + self.n_normals


@dataclass(frozen=True)
class ExperimentConfig:
    data_dir: str
    out_dir: str
    attacks: tuple[str, ...] = ()  # empty = every prepared dataset
    learners: tuple[str, ...] = GRID_LEARNERS
    strategies: tuple[str, ...] = GRID_STRATEGIES
    seeds: tuple[int, ...] = (0,)
    n_seed: int = DEFAULT_N_SEED
    budget: int = DEFAULT_BUDGET
    checkpoints: tuple[int, ...] = DEFAULT_CHECKPOINTS
    tie_tolerance: float = 0.0
    subsample: int = 0  # rows per dataset before splitting; 0 = use all
    workers: int = 1

    def __post_init__(self):
        if not self.learners or not self.strategies or not self.seeds:
            raise ValueError("need at least one learner, strategy, and seed")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.subsample < 0:
            raise ValueError("subsample must be >= 0")


def prepare_datasets(
    records: KddRecords, out_root, split_seed: int = 0, min_occurrences: int = 100
) -> list[dict]:
    """Write one directory per attack: raw records plus a JSON sidecar.

    The sidecar pins the one-hot vocabulary (fitted on the whole binary
    dataset, before splitting) and the split seed, so later loads
    reproduce the exact same design matrix and 80/10/10 partition.
    """
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    summary = []
    for ds in build_attack_datasets(records, min_occurrences):
        slug = slug_of(ds.attack_label)
        d = out_root / slug
        d.mkdir(exist_ok=True)
        with open(d / RECORDS_FILE, "w", encoding="utf-8") as fh:
            for line in ds.records.to_lines():
                fh.write(line + "\n")
        encoder = Encoder.fit(ds.records)
        write_sidecar(d / SIDECAR_FILE, ds, encoder, split_seed)
        attacks, normals = ds.counts
        summary.append(
            {
                "attack": slug,
                "records": attacks + normals,
                "attacks": attacks,
                "normals": normals,
                "prevalence": ds.prevalence,
            }
        )
    return summary


def discover_prepared(root, attacks: tuple[str, ...] = ()) -> list[Path]:
    """Prepared dataset dirs under root, largest first (sidecar counts)."""
    root = Path(root)
    found = []
    for d in sorted(root.iterdir()) if root.is_dir() else []:
        if d.is_dir() and (d / SIDECAR_FILE).exists():
            meta = read_sidecar(d / SIDECAR_FILE)
            found.append((int(meta["counts"]["records"]), d))
    found.sort(key=lambda t: (-t[0], t[1].name))
    dirs = [d for _, d in found]
    if attacks:
        by_slug = {d.name: d for d in dirs}
        missing = [a for a in attacks if a not in by_slug]
        if missing:
            raise FileNotFoundError(f"no prepared dataset for {missing} under {root}")
        dirs = [by_slug[a] for a in attacks]
    if not dirs:
        raise FileNotFoundError(f"no prepared datasets under {root}")
    return dirs


def load_prepared(
    path, subsample: int = 0, keep_records: bool = False
) -> PreparedDataset:
    path = Path(path)
    meta = read_sidecar(path / SIDECAR_FILE)
    records = parse_kdd_file(path / RECORDS_FILE)
    ds = BinaryDataset(records, meta["attack_label"])
    encoder = Encoder.from_dict(meta["encoder"])
    encoded = EncodedDataset(
        encoder.transform(ds.records), ds.binary_labels, encoder.feature_names
    )
    seed = int(meta["seed"])
    if subsample and subsample < len(encoded):
        keep = np.sort(
            np.random.default_rng(seed).choice(len(encoded), subsample, replace=False)
        )
        encoded = encoded.take(keep)
        records = records.take(keep)
    attacks, normals = ds.counts
    return PreparedDataset(
        slug=path.name,
        attack_label=meta["attack_label"],
        n_attacks=attacks,
        n_normals=normals,
        prevalence=float(meta["prevalence"]),
        split_seed=seed,
        encoder=encoder,
        splits=split(encoded, seed),
        records=records if keep_records else None,
    )


def cmd_prepare(
    input_path, out_root, split_seed: int = 0, min_occurrences: int = 100
) -> list[dict]:
    input_path = Path(input_path)
    if not input_path.exists():
        raise FileNotFoundError(f"input file not found: {input_path}")
    records = parse_kdd_file(input_path)
    summary = prepare_datasets(records, out_root, split_seed, min_occurrences)
    out_root = Path(out_root)
    with open(out_root / "prepare_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_root / "prepare_summary.csv", "w", encoding="utf-8") as fh:
        fh.write("attack,records,attacks,normals,prevalence\n")
        for row in summary:
            fh.write(
                f"{row['attack']},{row['records']},{row['attacks']},"
                f"{row['normals']},{repr(row['prevalence'])}\n"
            )
    widths = (12, 8, 8, 8)
    lines = ["attack".ljust(widths[0]) + "records".rjust(widths[1])
             + "attacks".rjust(widths[2]) + "normals".rjust(widths[3])
             + "  prevalence"]
    for row in summary:
        lines.append(
            row["attack"].ljust(widths[0])
            + str(row["records"]).rjust(widths[1])
            + str(row["attacks"]).rjust(widths[2])
            + str(row["normals"]).rjust(widths[3])
            + f"  {row['prevalence']:.4f}"
        )
    (out_root / "prepare_summary.txt").write_text(
        "\n".join(lines) + "\n", encoding="utf-8"
    )
    return summary


# ---------------------------------------------------------------------------
# trace grids


def _trace_record(pd: PreparedDataset, learner: str, strategy: str, trace) -> dict:
    final = trace.events[-1].metrics if trace.events else trace.initial
    fc = final.confusion
    rec = {
        "attack": pd.slug,
        "learner": learner,
        "strategy": strategy,
        "seed": trace.config.seed,
        "queries_used": len(trace.events),
        "final_f1": final.f1,
        "final_tp": fc.tp,
        "final_fp": fc.fp,
        "final_fn": fc.fn,
        "final_tn": fc.tn,
        "mean_retrain_time_s": trace.mean_retrain_time(),
        "mean_query_time_s": trace.mean_query_time(),
    }
    for cp, f1 in trace.checkpoint_f1s().items():
        rec[f"f1_after_{cp}" if cp else "f1_initial"] = f1
    return rec


def _trace_stem(slug: str, learner: str, strategy: str, seed: int) -> str:
    return f"{slug}__{learner}__{strategy}__s{seed}"


def _run_attack_cells(args) -> list[dict]:
    """All (learner, strategy, seed) traces for one prepared dataset.

    Self-contained (loads its own data) so it can run in a worker process;
    per-trace JSONL, summary, and query-vs-F1 curve files land in out_dir.
    """
    (dir_path, learners, strategies, seeds, loop_kwargs, subsample, out_dir) = args
    t0 = time.perf_counter()
    pd = load_prepared(dir_path, subsample=subsample)
    traces_dir = Path(out_dir) / "traces"
    curves_dir = Path(out_dir) / "curves"
    traces_dir.mkdir(parents=True, exist_ok=True)
    curves_dir.mkdir(parents=True, exist_ok=True)
    out = []
    for learner in learners:
        for strategy in strategies:
            for seed in seeds:
                cfg = LoopConfig(
                    learner=make_learner(learner),
                    strategy=strategy,
                    seed=seed,
                    **loop_kwargs,
                )
                trace = run(cfg, pd.splits)
                stem = _trace_stem(pd.slug, learner, strategy, seed)
                trace.save_jsonl(traces_dir / f"{stem}.jsonl")
                trace.save_summary(traces_dir / f"{stem}.json")
                with open(curves_dir / f"{stem}.csv", "w", encoding="utf-8") as fh:
                    fh.write("query,f1\n")
                    for q, f1 in trace.curve():
                        fh.write(f"{q},{repr(f1)}\n")
                out.append(_trace_record(pd, learner, strategy, trace))
    log.info(
        "%s: %d traces in %.1fs", pd.slug, len(out), time.perf_counter() - t0
    )
    return out


def run_cells(config: ExperimentConfig, dirs: list[Path]) -> list[dict]:
    """Trace records for the whole grid; attack-major execution order.

    Each dataset loads once and runs all its cells; independent attacks
    may be fanned out to worker processes (results are seed-determined,
    so the schedule cannot change any value).
    """
    loop_kwargs = {
        "n_seed": config.n_seed,
        "budget": config.budget,
        "checkpoints": config.checkpoints,
        "tie_tolerance": config.tie_tolerance,
    }
    tasks = [
        (
            d,
            config.learners,
            config.strategies,
            config.seeds,
            loop_kwargs,
            config.subsample,
            config.out_dir,
        )
        for d in dirs
    ]
    if config.workers == 1 or len(tasks) == 1:
        results = [_run_attack_cells(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            results = list(ex.map(_run_attack_cells, tasks))
    return [rec for group in results for rec in group]


def _checkpoint_columns(checkpoints) -> list[str]:
    return ["f1_initial"] + [f"f1_after_{c}" for c in checkpoints]


def grid_tables(
    records: list[dict], config: ExperimentConfig, title: str
) -> tuple[ResultTable, ResultTable]:
    """(metrics table, timing table), rows keyed learner+strategy.

    A cell first averages a (learner, strategy, attack) group over its
    seeds, then reports mean +- std of those per-attack values across
    attacks; seeds replicate, attacks spread. Timing cells aggregate all
    traces in the group without the per-attack collapse.
    """
    cols = _checkpoint_columns(config.checkpoints)
    table = ResultTable(title, "learner+strategy", cols)
    timing = ResultTable(
        title + " (wall clock)",
        "learner+strategy",
        ["mean_retrain_time_s", "mean_query_time_s"],
    )
    for learner in config.learners:
        for strategy in config.strategies:
            group = [
                r
                for r in records
                if r["learner"] == learner and r["strategy"] == strategy
            ]
            key = f"{learner}+{strategy}"
            cells = {}
            for col in cols:
                per_attack = []
                for slug in sorted({r["attack"] for r in group}):
                    vals = [r[col] for r in group if r["attack"] == slug]
                    per_attack.append(aggregate(vals)[0])
                cells[col] = _agg_cell(per_attack)
            table.add_row(key, cells)
            timing.add_row(
                key,
                {
                    "mean_retrain_time_s": _agg_cell(
                        [r["mean_retrain_time_s"] for r in group]
                    ),
                    "mean_query_time_s": _agg_cell(
                        [r["mean_query_time_s"] for r in group]
                    ),
                },
            )
    return table, timing


def _write_runs_csv(records: list[dict], config: ExperimentConfig, path) -> None:
    cols = (
        ["attack", "learner", "strategy", "seed", "queries_used"]
        + _checkpoint_columns(config.checkpoints)
        + ["final_f1", "final_tp", "final_fp", "final_fn", "final_tn"]
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for r in records:
            fh.write(
                ",".join(
                    repr(r[c]) if isinstance(r[c], float) else str(r[c])
                    for c in cols
                )
                + "\n"
            )


def _write_timings_csv(records: list[dict], path) -> None:
    cols = ["attack", "learner", "strategy", "seed",
            "mean_retrain_time_s", "mean_query_time_s"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for r in records:
            fh.write(
                ",".join(
                    repr(r[c]) if isinstance(r[c], float) else str(r[c])
                    for c in cols
                )
                + "\n"
            )


def cmd_grid(config: ExperimentConfig, stem: str = "grid") -> ResultTable:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dirs = discover_prepared(config.data_dir, config.attacks)
    records = run_cells(config, dirs)
    table, timing = grid_tables(records, config, f"{stem}: F1 by checkpoint")
    table.save(out_dir, f"{stem}_table")
    _write_runs_csv(records, config, out_dir / f"{stem}_runs.csv")
    _write_timings_csv(records, out_dir / f"{stem}_timings.csv")
    (out_dir / f"{stem}_timings.txt").write_text(
        timing.render_text(), encoding="utf-8"
    )
    return table


def cmd_unsup_sampling(config: ExperimentConfig) -> ResultTable:
    """Entropy vs isolation-scored sampling, both driving an RF learner."""
    config = ExperimentConfig(
        **{
            **config.__dict__,
            "learners": (RANDOM_FOREST,),
            "strategies": UNSUP_STRATEGIES,
        }
    )
    return cmd_grid(config, stem="unsup")


# ---------------------------------------------------------------------------
# baseline and oracle


def baseline_oracle_row(pd: PreparedDataset, seed: int) -> tuple[dict, dict]:
    """(metrics, timings) for one attack: unsupervised IF vs supervised RF.

    The baseline trains on the train split without labels and classifies
    dev at the standard 0.5 anomaly threshold; the oracle is the full-label
    upper bound the active learner is meant to approach.
    """
    train, dev = pd.splits.train, pd.splits.dev
    t0 = time.perf_counter()
    iso = train_isolation(
        LearnerConfig(ISOLATION_FOREST, seed=seed), train.X, train.feature_names
    )
    baseline = snapshot(iso.classify(dev.X), dev.y)
    t1 = time.perf_counter()
    rf = train_learner(LearnerConfig(RANDOM_FOREST, seed=seed), train)
    oracle = snapshot(rf.classify(dev.X), dev.y)
    t2 = time.perf_counter()
    metrics = {
        "attack": pd.slug,
        "baseline_if_f1": baseline.f1,
        "oracle_rf_f1": oracle.f1,
    }
    timings = {
        "attack": pd.slug,
        "baseline_train_s": t1 - t0,
        "oracle_train_s": t2 - t1,
    }
    return metrics, timings


def cmd_baseline_oracle(config: ExperimentConfig, seed: int = 0) -> ResultTable:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dirs = discover_prepared(config.data_dir, config.attacks)
    rows, times = [], []
    for d in dirs:
        pd = load_prepared(d, subsample=config.subsample)
        m, t = baseline_oracle_row(pd, seed)
        rows.append(m)
        times.append(t)
    table = ResultTable(
        "unsupervised baseline vs full-label oracle (dev F1)",
        "attack",
        ["baseline_if_f1", "oracle_rf_f1"],
    )
    for m in rows:
        table.add_row(
            m["attack"],
            {
                "baseline_if_f1": Cell(m["baseline_if_f1"], 0.0),
                "oracle_rf_f1": Cell(m["oracle_rf_f1"], 0.0),
            },
        )
    table.add_row(
        "mean",
        {
            "baseline_if_f1": _agg_cell([m["baseline_if_f1"] for m in rows]),
            "oracle_rf_f1": _agg_cell([m["oracle_rf_f1"] for m in rows]),
        },
    )
    table.save(out_dir, "baseline_table", std_rows={"mean"})
    with open(out_dir / "baseline_timings.csv", "w", encoding="utf-8") as fh:
        fh.write("attack,baseline_train_s,oracle_train_s\n")
        for t in times:
            fh.write(
                f"{t['attack']},{repr(t['baseline_train_s'])},"
                f"{repr(t['oracle_train_s'])}\n"
            )
    return table


# ---------------------------------------------------------------------------
# z-score diagnostic


def cmd_zscore_report(
    config: ExperimentConfig,
    attack: str,
    learner: str = RANDOM_FOREST,
    seed: int = 0,
):
    """Feature z-scores of an under-trained model (seed set only, no queries).

    Separates the signal the model already exploits from what it still
    confuses: detected attacks vs mispredictions, per feature.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    d = discover_prepared(config.data_dir, (attack,))[0]
    pd = load_prepared(d, subsample=config.subsample)
    train, dev = pd.splits.train, pd.splits.dev
    if len(train) < config.n_seed:
        raise ValueError(f"train split smaller than n_seed={config.n_seed}")
    rng = np.random.default_rng(seed)
    seed_idx = rng.choice(len(train), size=config.n_seed, replace=False)
    cfg = make_learner(learner, seed)
    if isinstance(cfg, EnsembleSpec):
        from .ensemble import train_ensemble

        model = train_ensemble(cfg, train.take(seed_idx))
    else:
        model = train_learner(cfg, train.take(seed_idx))
    report = feature_z_scores(model, dev)
    (out_dir / f"zscore_{pd.slug}.txt").write_text(
        zscore_table(report), encoding="utf-8"
    )
    with open(out_dir / f"zscore_{pd.slug}.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
