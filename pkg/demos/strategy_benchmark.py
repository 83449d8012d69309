"""Compare query strategies on one attack at reduced scale.

Runs random vs uncertainty vs entropy selection for both learners, two
seeds each, and prints the checkpoint table plus where each strategy
spent its budget. A full-scale version of the same comparison is one
CLI call: netal grid --data ... --out ... --seeds 0,1,2,3,4
"""

import tempfile
from pathlib import Path

import numpy as np

from netal.experiments import (
    ExperimentConfig,
    cmd_grid,
    cmd_prepare,
    load_prepared,
)
from netal.simulate import write_corpus

workdir = Path(tempfile.mkdtemp(prefix="netal_bench_"))
write_corpus(workdir / "raw.kdd", seed=7, scale=0.03)
cmd_prepare(workdir / "raw.kdd", workdir / "data", split_seed=0)

config = ExperimentConfig(
    data_dir=str(workdir / "data"),
    out_dir=str(workdir / "out"),
    attacks=("neptune",),
    learners=("random_forest", "logistic"),
    strategies=("random", "uncertainty", "entropy"),
    seeds=(0, 1),
    n_seed=25,      # tiny free-label pool so the strategies separate
    budget=25,
    checkpoints=(5, 25),
    subsample=4000,
)
table = cmd_grid(config)
print()
print(table.render_text(), end="")

# how many of the queried rows were actually attacks, per strategy
pd = load_prepared(Path(config.data_dir) / "neptune", subsample=4000)
print("\nattack fraction among queried rows (seed 0):")
import json

for strategy in config.strategies:
    path = Path(config.out_dir) / "traces"
    stem = f"neptune__random_forest__{strategy}__s0"
    events = [json.loads(s) for s in
              (path / f"{stem}.jsonl").read_text().splitlines()]
    labels = np.array([ev["label"] for ev in events])
    print(f"  {strategy:12s} {labels.mean():.2f}  "
          f"({int(labels.sum())}/{len(labels)} queries hit an attack)")

print(f"\ntables and traces in {config.out_dir}")
