"""Command-line entry point: ``avtrace synth|train|eval|export-embeddings|plot``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from avtrace._cache import CACHE_DIR_ENV, ArrayCache
from avtrace._errors import AvtraceError, ConfigError
from avtrace.checkpoint import load_checkpoint
from avtrace.config import ABLATION_FLAGS, PRESETS, load_config
from avtrace.datapipe import read_manifest
from avtrace.evaluators import (
    REPRESENTATIONS,
    compare_ablations,
    export_embeddings,
    read_predictions,
    read_similarity,
    report_from_predictions,
    run_inference,
    similarity_by_generator,
    write_predictions,
    write_similarity,
)
from avtrace.models import MetricsReport
from avtrace.report import (
    PLOT_KINDS,
    ablation_table,
    confusion_figure,
    render_ablation_table,
    roc_figure,
    score_histogram,
    similarity_bars,
)
from avtrace.synthesizers import MANIFEST_FILE, generate_synthetic
from avtrace.training import ablate, train

logger = logging.getLogger("avtrace.cli")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="avtrace", description="Audio-visual deepfake detection and generator attribution")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="YAML/JSON run configuration (defaults to the preset)")
        p.add_argument("--preset", choices=sorted(PRESETS), help="Scale preset (default: desk)")

    def with_cache(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--no-cache",
            action="store_true",
            help=f"Recompute spectrograms instead of reading the cache (${CACHE_DIR_ENV}, default .avtrace_cache)",
        )

    synth = sub.add_parser("synth", help="Write a synthetic-fingerprint dataset")
    with_config(synth)
    synth.add_argument("--out", required=True, help="Output dataset directory")

    tr = sub.add_parser("train", help="Train a model")
    with_config(tr)
    tr.add_argument("--manifest", required=True)
    tr.add_argument("--out", required=True, help="Run directory (checkpoints, log, config echo)")
    tr.add_argument(
        "--ablate",
        action="append",
        default=[],
        metavar="FLAG",
        help=f"Disable a component; repeatable or comma-separated ({', '.join(sorted(ABLATION_FLAGS))})",
    )
    tr.add_argument("--resume", help="Continue from a 'last' checkpoint directory")
    tr.add_argument("--stop-after", type=int, metavar="EPOCHS", help="Stop once this many epochs are complete")
    with_cache(tr)

    ev = sub.add_parser("eval", help="Evaluate a checkpoint")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--threshold", type=float, help="Detection threshold (default from the run config)")
    ev.add_argument("--split", choices=["train", "val", "test"])
    ev.add_argument("--silent-audio", action="store_true", help="Replace every audio track with silence")
    ev.add_argument("--out", help="Output directory (default: <checkpoint>-eval-<split> next to the checkpoint)")
    with_cache(ev)

    ex = sub.add_parser("export-embeddings", help="Write per-clip embeddings as TSV")
    ex.add_argument("--checkpoint", required=True)
    ex.add_argument("--manifest", required=True)
    ex.add_argument("--which", required=True, choices=list(REPRESENTATIONS))
    ex.add_argument("--split", choices=["train", "val", "test"])
    ex.add_argument("--out", required=True)
    with_cache(ex)

    pl = sub.add_parser("plot", help="Render figures and tables from eval outputs")
    pl.add_argument("kind", choices=list(PLOT_KINDS))
    pl.add_argument(
        "inputs",
        nargs="+",
        help="predictions.tsv (score_hist, roc), similarity.json (similarity_bars), "
        "metrics.json (confusion) or NAME=metrics.json pairs (ablation_table)",
    )
    pl.add_argument("--names", help="generators.json mapping class ids to display names")
    pl.add_argument("--out", required=True)
    return parser


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def cmd_synth(args: argparse.Namespace) -> int:
    config = load_config(args.config, preset=args.preset)
    manifest = generate_synthetic(config.synth, args.out)
    print(f"{len(manifest.entries)} clips, {manifest.num_classes} classes -> {Path(args.out) / MANIFEST_FILE}")
    return EXIT_OK


def _cache(args: argparse.Namespace) -> ArrayCache | None:
    return None if args.no_cache else ArrayCache()


def _ablation_flags(values: list[str]) -> set[str]:
    return {flag.strip() for value in values for flag in value.split(",") if flag.strip()}


def cmd_train(args: argparse.Namespace) -> int:
    config = load_config(args.config, preset=args.preset)
    disable = _ablation_flags(args.ablate)
    manifest = read_manifest(args.manifest)
    cache = _cache(args)
    kwargs = {"resume_from": args.resume, "stop_after": args.stop_after, "cache": cache}
    result = ablate(manifest, config, args.out, disable, **kwargs) if disable else train(
        manifest, config, args.out, **kwargs
    )
    if cache is not None:
        logger.info("Spectrogram cache %s holds %d entries", cache.cache_dir, cache.size())
    print(f"trained {result.epochs_completed} epoch(s); log {result.log}; last {result.last}; best {result.best}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    manifest = read_manifest(args.manifest)
    split = args.split or ckpt.config.eval.split
    threshold = ckpt.config.eval.threshold if args.threshold is None else args.threshold
    predictions = run_inference(ckpt, manifest, split=split, silent_audio=args.silent_audio, cache=_cache(args))
    report = report_from_predictions(
        predictions, threshold=threshold, split=split, generator_names=manifest.generator_names
    )
    checkpoint = Path(args.checkpoint).resolve()
    out = Path(args.out) if args.out else checkpoint.with_name(f"{checkpoint.name}-eval-{split}")
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(report.to_dict(), indent=2))
    write_predictions(predictions, out / "predictions.tsv")
    stats = similarity_by_generator(predictions.embeddings["p_v"], predictions.embeddings["p_a"], predictions.g)
    write_similarity(stats, out / "similarity.json")
    print(report.summary())
    print(f"wrote {out}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    path = export_embeddings(
        args.checkpoint, read_manifest(args.manifest), args.which, args.out, split=args.split, cache=_cache(args)
    )
    print(f"wrote {path}")
    return EXIT_OK


def _read_report(path: str) -> MetricsReport:
    return MetricsReport.model_validate(json.loads(Path(path).read_text()))


def _variant(spec: str) -> tuple[str, str]:
    if "=" in spec:
        name, _, path = spec.partition("=")
        return name, path
    return Path(spec).parent.name or Path(spec).stem, spec


def cmd_plot(args: argparse.Namespace) -> int:
    names = None
    if args.names:
        names = {int(k): v for k, v in json.loads(Path(args.names).read_text()).items()}
    kind, inputs = args.kind, args.inputs
    if kind == "ablation_table":
        if len(inputs) < 2:
            raise _UsageError("ablation_table needs at least two metrics files")
        reports = dict(_variant(spec) for spec in inputs)
        if len(reports) != len(inputs):
            raise _UsageError("variant names must be unique; use NAME=path")
        comparison = compare_ablations({name: _read_report(path) for name, path in reports.items()})
        ablation_table(comparison, args.out)
        print(render_ablation_table(comparison))
    elif len(inputs) != 1:
        raise _UsageError(f"{kind} takes exactly one input")
    elif kind in ("score_hist", "roc"):
        columns = read_predictions(inputs[0])
        if kind == "score_hist":
            score_histogram(columns["y"], columns["detect_prob"], args.out)
        else:
            roc_figure(columns["y"], columns["g"], columns["detect_prob"], args.out, names)
    elif kind == "similarity_bars":
        similarity_bars(read_similarity(inputs[0]), args.out, names)
    else:
        confusion_figure(_read_report(inputs[0]), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "eval": cmd_eval,
    "export-embeddings": cmd_export,
    "plot": cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, _UsageError) as exc:
        print(f"avtrace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AvtraceError, OSError, ValueError) as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"avtrace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


__all__ = ["main"]
