"""Command-line entry point.

Subcommands: prepare-data, train-baseline, ptq-sweep, train-sweep, summarize,
selftest. Exit codes: 0 success, 2 configuration error, 3 data error,
4 partial trial failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .circuits import ARCHITECTURES
from .datasets import (
    DATASET_NAMES,
    DataError,
    prepare_dataset,
    read_manifest,
    save_dataset,
    write_manifest,
)
from .sweep import (
    BITS_DEFAULT,
    PTQ_BITS_DEFAULT,
    SEEDS_DEFAULT,
    TEMPS_DEFAULT,
    OrchestrationError,
    SweepSpec,
    aggregate_training,
    emit_summary,
    execute_configs,
    load_records,
    run_ptq_inference,
    run_training_sweep,
)
from .trainer import TrainConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PARTIAL = 4


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _processed(args) -> Path:
    return Path(args.data_dir) / "processed"


def _add_dirs(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--data-dir",
        default=os.environ.get("DACQNN_DATA_DIR", "data"),
        help="root data directory (env DACQNN_DATA_DIR); processed files live in <data-dir>/processed",
    )
    p.add_argument("--out-dir", default="results", help="directory for records and summaries")


def _add_grid(p: argparse.ArgumentParser, ptq: bool = False) -> None:
    p.add_argument("--arch", nargs="+", choices=ARCHITECTURES, default=list(ARCHITECTURES))
    p.add_argument("--dataset", nargs="+", choices=DATASET_NAMES, default=list(DATASET_NAMES))
    p.add_argument("--seeds", nargs="+", type=int, default=list(SEEDS_DEFAULT))
    default_bits = list(PTQ_BITS_DEFAULT if ptq else BITS_DEFAULT)
    p.add_argument("--bits", nargs="+", type=int, default=default_bits)
    p.add_argument("--no-feature-quant", action="store_true", help="skip quantizing encoded features")


def _manifest_meta(args) -> dict:
    path = _processed(args) / "manifest.json"
    try:
        return {"data_manifest": read_manifest(path)}
    except DataError:
        return {}


# --- Subcommands ------------------------------------------------------------


def cmd_prepare_data(args) -> int:
    processed = _processed(args)
    processed.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"schema_version": 1, "seed": args.seed, "datasets": {}}
    for name in args.dataset:
        dataset, input_hashes = prepare_dataset(name, args.data_dir, seed=args.seed)
        save_dataset(dataset, processed / f"{name}.npz")
        manifest["datasets"][name] = {
            "inputs": input_hashes,
            "fingerprint": dataset.fingerprint(),
            "train_size": int(dataset.train_y.shape[0]),
            "test_size": int(dataset.test_y.shape[0]),
        }
        _log(f"{name}: train={dataset.train_y.shape[0]} test={dataset.test_y.shape[0]}")
    write_manifest(processed / "manifest.json", manifest)
    return EXIT_OK


def cmd_train_baseline(args) -> int:
    configs = [
        TrainConfig(
            architecture=arch,
            dataset=ds,
            mode="fp32",
            seed=seed,
            epochs=args.epochs_override,
        )
        for arch in args.arch
        for ds in args.dataset
        for seed in args.seeds
    ]
    records = execute_configs(configs, _processed(args), args.out_dir, jobs=args.jobs, log=_log)
    failed = [r for r in records if r.status != "ok"]
    for r in records:
        if r.status == "ok":
            _log(
                f"{r.config.architecture}/{r.config.dataset} seed {r.config.seed}: "
                f"test_acc={r.final_test_accuracy:.4f}"
            )
        else:
            _log(f"{r.config.architecture}/{r.config.dataset} seed {r.config.seed}: FAILED {r.error}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_ptq_sweep(args) -> int:
    sweep = SweepSpec(
        paradigm="ptq_inference",
        architectures=tuple(args.arch),
        datasets=tuple(args.dataset),
        bits=tuple(args.bits),
        seeds=tuple(args.seeds),
        epochs_override=args.epochs_override,
        quantize_features=not args.no_feature_quant,
    )
    rows = run_ptq_inference(sweep, _processed(args), args.out_dir, log=_log)
    out = Path(args.out_dir) / "ptq_summary.csv"
    emit_summary(rows, out, {"sweep": sweep.to_dict(), **_manifest_meta(args)})
    _log(f"wrote {out}")
    return EXIT_OK


def cmd_train_sweep(args) -> int:
    sweep = SweepSpec(
        paradigm="quant_training",
        architectures=tuple(args.arch),
        datasets=tuple(args.dataset),
        bits=tuple(args.bits),
        temperatures=tuple(args.temps),
        seeds=tuple(args.seeds),
        epochs_override=args.epochs_override,
        quantize_features=not args.no_feature_quant,
    )
    rows, records, failed = run_training_sweep(
        sweep, _processed(args), args.out_dir, jobs=args.jobs, log=_log
    )
    out = Path(args.out_dir) / "training_summary.csv"
    emit_summary(rows, out, {"sweep": sweep.to_dict(), **_manifest_meta(args)})
    _log(f"wrote {out} ({len(records)} records, {failed} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_summarize(args) -> int:
    records = load_records(args.out_dir)
    if not records:
        raise OrchestrationError(f"no records under {args.out_dir}/records")
    rows = aggregate_training(records)
    out = Path(args.output) if args.output else Path(args.out_dir) / "training_summary.csv"
    emit_summary(rows, out, _manifest_meta(args) if hasattr(args, "data_dir") else {})
    _log(f"wrote {out} from {len(records)} records")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(verbose=True) else 1


# --- Parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dacqnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare-data", help="ingest raw files, preprocess, write npz + manifest")
    _add_dirs(p)
    p.add_argument("--dataset", nargs="+", choices=DATASET_NAMES, default=list(DATASET_NAMES))
    p.add_argument("--seed", type=int, default=0, help="subsample/split seed")
    p.set_defaults(func=cmd_prepare_data)

    p = sub.add_parser("train-baseline", help="train FP32 reference runs")
    _add_dirs(p)
    p.add_argument("--arch", nargs="+", choices=ARCHITECTURES, default=list(ARCHITECTURES))
    p.add_argument("--dataset", nargs="+", choices=DATASET_NAMES, default=list(DATASET_NAMES))
    p.add_argument("--seeds", nargs="+", type=int, default=list(SEEDS_DEFAULT))
    p.add_argument("--epochs-override", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("ptq-sweep", help="post-training quantization inference sweep")
    _add_dirs(p)
    _add_grid(p, ptq=True)
    p.add_argument(
        "--epochs-override", type=int, default=None,
        help="match baselines trained with the same override",
    )
    p.set_defaults(func=cmd_ptq_sweep)

    p = sub.add_parser("train-sweep", help="training-under-quantization sweep")
    _add_dirs(p)
    _add_grid(p)
    p.add_argument("--temps", nargs="+", type=float, default=list(TEMPS_DEFAULT))
    p.add_argument("--epochs-override", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_train_sweep)

    p = sub.add_parser("summarize", help="re-aggregate stored records into a summary CSV")
    _add_dirs(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("selftest", help="run built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA
    except (OrchestrationError, ValueError) as exc:
        _log(f"configuration error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
