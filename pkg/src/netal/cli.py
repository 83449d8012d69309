"""Command-line entry point.

Subcommands mirror the experiment pipeline: simulate a corpus, prepare
per-attack datasets, then run baselines, grids, diagnostics, or the
labeling service. Any flag can also be set in a key=value config file
passed with --config; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    GRID_LEARNERS,
    GRID_STRATEGIES,
    cmd_baseline_oracle,
    cmd_grid,
    cmd_prepare,
    cmd_unsup_sampling,
    cmd_zscore_report,
)
from .metrics import zscore_table

log = logging.getLogger("netal")


def _csv_strs(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in _csv_strs(text))


def read_config_file(path) -> list[tuple[str, str]]:
    """key=value lines; # comments and blanks ignored; order preserved."""
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def _config_argv(pairs: list[tuple[str, str]]) -> list[str]:
    out = []
    for key, value in pairs:
        out += ["--" + key.replace("_", "-"), value]
    return out


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="root of prepared dataset dirs")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--attacks", type=_csv_strs, default=(),
                   help="comma-separated attack names (default: all prepared)")
    p.add_argument("--subsample", type=int, default=0,
                   help="rows per dataset before splitting (0 = all)")


def _add_loop_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seeds", type=_csv_ints, default=(0,),
                   help="comma-separated loop seeds")
    p.add_argument("--n-seed", type=int, default=1000,
                   help="size of the free initially-labeled set")
    p.add_argument("--budget", type=int, default=100, help="query budget")
    p.add_argument("--checkpoints", type=_csv_ints, default=(10, 50, 100),
                   help="query counts to report F1 at")
    p.add_argument("--tie-tolerance", type=float, default=0.0,
                   help="scores within this of the max count as tied")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel worker processes across attacks")


def _experiment_config(args, **overrides) -> ExperimentConfig:
    base = dict(
        data_dir=args.data,
        out_dir=args.out,
        attacks=args.attacks,
        subsample=args.subsample,
        seeds=getattr(args, "seeds", (0,)),
        n_seed=getattr(args, "n_seed", 1000),
        budget=getattr(args, "budget", 100),
        checkpoints=getattr(args, "checkpoints", (10, 50, 100)),
        tie_tolerance=getattr(args, "tie_tolerance", 0.0),
        workers=getattr(args, "workers", 1),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _cmd_simulate(args) -> int:
    from .simulate import write_corpus

    n = write_corpus(
        args.out, seed=args.seed, scale=args.scale,
        include_rare=bool(args.include_rare),
    )
    log.info("wrote %d records to %s", n, args.out)
    return 0


def _cmd_prepare(args) -> int:
    summary = cmd_prepare(args.input, args.out, args.seed, args.min_occurrences)
    print((Path(args.out) / "prepare_summary.txt").read_text(encoding="utf-8"), end="")
    log.info("prepared %d datasets under %s", len(summary), args.out)
    return 0


def _cmd_baseline_oracle(args) -> int:
    config = _experiment_config(args)
    table = cmd_baseline_oracle(config, seed=args.seed)
    print(table.render_text(std_rows={"mean"}), end="")
    return 0


def _cmd_grid(args) -> int:
    config = _experiment_config(
        args, learners=args.learners, strategies=args.strategies
    )
    table = cmd_grid(config)
    print(table.render_text(), end="")
    return 0


def _cmd_unsup(args) -> int:
    config = _experiment_config(args)
    table = cmd_unsup_sampling(config)
    print(table.render_text(), end="")
    return 0


def _cmd_zscore(args) -> int:
    config = _experiment_config(args, seeds=(args.seed,), n_seed=args.n_seed)
    report = cmd_zscore_report(
        config, attack=args.attack, learner=args.learner, seed=args.seed
    )
    print(zscore_table(report), end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data, args.state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netal",
        description="Active learning for network intrusion detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a KDD-format corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--include-rare", type=int, default=1, choices=(0, 1))
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("prepare", help="build per-attack dataset directories")
    p.add_argument("--input", required=True, help="raw KDD CSV file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0, help="split seed")
    p.add_argument("--min-occurrences", type=int, default=100)
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("baseline-oracle",
                       help="unsupervised baseline vs full-label oracle")
    _add_experiment_flags(p)
    p.add_argument("--seed", type=int, default=0, help="model seed")
    p.set_defaults(func=_cmd_baseline_oracle)

    p = sub.add_parser("grid", help="learner x strategy active-learning grid")
    _add_experiment_flags(p)
    _add_loop_flags(p)
    p.add_argument("--learners", type=_csv_strs, default=GRID_LEARNERS)
    p.add_argument("--strategies", type=_csv_strs, default=GRID_STRATEGIES)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("unsup-sampling",
                       help="entropy vs isolation-scored sampling (RF learner)")
    _add_experiment_flags(p)
    _add_loop_flags(p)
    p.set_defaults(func=_cmd_unsup)

    p = sub.add_parser("zscore-report",
                       help="feature z-scores of an under-trained model")
    _add_experiment_flags(p)
    p.add_argument("--attack", required=True)
    p.add_argument("--learner", default="random_forest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-seed", type=int, default=1000)
    p.set_defaults(func=_cmd_zscore)

    p = sub.add_parser("serve", help="run the interactive labeling service")
    p.add_argument("--data", required=True, help="root of prepared dataset dirs")
    p.add_argument("--state", required=True, help="session persistence directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv:
        i = argv.index("--config")
        try:
            path = argv[i + 1]
        except IndexError:
            print("--config requires a file path", file=sys.stderr)
            return 2
        del argv[i : i + 2]
        pairs = read_config_file(path)
        # splice file values right after the subcommand so explicit flags,
        # parsed later, win
        sub_at = next(
            (j for j, a in enumerate(argv) if not a.startswith("-")), None
        )
        if sub_at is None:
            print("--config requires a subcommand", file=sys.stderr)
            return 2
        argv = argv[: sub_at + 1] + _config_argv(pairs) + argv[sub_at + 1 :]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
