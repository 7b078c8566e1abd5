"""Command line: ``train``, ``scan`` and ``eval``.

Exit codes: 0 clean, 1 findings, 2 operational error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .evaluation import kfold
from .hmm import CorpusError, HmmModel, ModelError, load_bundled_model, load_corpus, read_model, save_model, train
from .isl import ConfigError, load_config
from .scanner import ScanReport, collect_php_files, scan_paths
from .slicer import DEFAULT_INLINE_DEPTH, DEFAULT_PATH_CAP, SliceOptions

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

log = logging.getLogger("islhmm")


@dataclass
class ScanConfig:
    paths: list[str]
    config_dir: str | None = None
    model: str | None = None
    classes: tuple[str, ...] = ()
    path_cap: int = DEFAULT_PATH_CAP
    inline_depth: int = DEFAULT_INLINE_DEPTH
    format: str = "text"
    strict_listing4: bool = False
    renormalize: bool = False
    jobs: int = 1
    dump_slices: bool = False
    dump_isl: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ScanConfig":
        return cls(
            paths=list(args.paths),
            config_dir=args.config_dir,
            model=args.model,
            classes=tuple(args.classes or ()),
            path_cap=args.path_cap,
            inline_depth=args.inline_depth,
            format=args.format,
            strict_listing4=args.strict_listing4,
            renormalize=args.renormalize,
            jobs=args.jobs,
            dump_slices=args.dump_slices,
            dump_isl=args.dump_isl,
        )


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_ERROR


def _block_checksum(text: str, label: str) -> str:
    lines = text.splitlines()
    start = lines.index(label) + 1
    end = start
    while end < len(lines) and lines[end] not in ("trans", "emit"):
        end += 1
    return hashlib.sha256("\n".join(lines[start:end]).encode()).hexdigest()[:12]


def cmd_train(args: argparse.Namespace) -> int:
    try:
        corpus = load_corpus(Path(args.corpus).read_text(encoding="utf-8"))
    except OSError as e:
        return _fail(f"{args.corpus}: {e.strerror or e}")
    except CorpusError as e:
        return _fail(f"{args.corpus}: {e}")
    model = train(corpus)
    text = save_model(model)
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as e:
        return _fail(f"{args.out}: {e.strerror or e}")
    sums = " ".join(f"{b}={_block_checksum(text, b)}" for b in ("start", "trans", "emit"))
    print(f"trained {args.out}: {len(corpus)} entries, max_len {corpus.max_len}, {sums}")
    return EXIT_CLEAN


def _load_model(path: str | None, renormalize: bool) -> HmmModel:
    if path is None:
        return load_bundled_model()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = read_model(path, renormalize=renormalize)
    for w in caught:
        log.warning("%s: %s", path, w.message)
    return model


def run_scan(cfg: ScanConfig) -> tuple[ScanReport | None, int]:
    try:
        config = load_config(cfg.config_dir)
        model = _load_model(cfg.model, cfg.renormalize)
        files = collect_php_files(cfg.paths)
    except (ConfigError, ModelError) as e:
        return None, _fail(str(e))
    except OSError as e:
        return None, _fail(str(e))
    unknown = [c for c in cfg.classes if c not in config.classes]
    if unknown:
        return None, _fail(f"unknown vulnerability class: {', '.join(unknown)}")
    options = SliceOptions(cfg.path_cap, cfg.inline_depth, cfg.classes)
    reports = scan_paths(files, config, model, options, cfg.strict_listing4, cfg.jobs)
    report = ScanReport(reports, model.checksum())
    return report, report.exit_code


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = ScanConfig.from_args(args)
    report, code = run_scan(cfg)
    if report is None:
        return code
    if cfg.format == "json":
        sys.stdout.write(report.to_json(cfg.dump_slices, cfg.dump_isl))
    else:
        for d in report.diagnostics:
            print(f"warning: {d}", file=sys.stderr)
        for e in report.errors:
            print(f"error: {e}", file=sys.stderr)
        sys.stdout.write(report.to_text(cfg.dump_slices, cfg.dump_isl))
    return code


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        corpus = load_corpus(Path(args.corpus).read_text(encoding="utf-8"))
        cv = kfold(corpus, args.k, args.seed)
    except OSError as e:
        return _fail(f"{args.corpus}: {e.strerror or e}")
    except (CorpusError, ValueError) as e:
        return _fail(str(e))
    if args.format in ("text", "both"):
        sys.stdout.write(cv.to_text())
    if args.format in ("json", "both"):
        sys.stdout.write(cv.to_json())
    if args.json_out:
        Path(args.json_out).write_text(cv.to_json(), encoding="utf-8")
    return EXIT_CLEAN


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="islhmm", description="HMM-based taint detection for PHP.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from an annotated corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("scan", help="scan PHP files or directories")
    p.add_argument("paths", nargs="+", metavar="PATH")
    p.add_argument("--model", help="model file (default: bundled demo model)")
    p.add_argument("--config-dir", help="directory of *.cfg files (default: bundled)")
    p.add_argument("--class", dest="classes", action="append", metavar="C",
                   help="only report this vulnerability class (repeatable)")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--dump-slices", action="store_true")
    p.add_argument("--dump-isl", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict-listing4", action="store_true",
                   help="only typechk_num and contentchk mark a variable as validated")
    p.add_argument("--renormalize", action="store_true",
                   help="rescale model columns that do not sum to one")
    p.add_argument("--path-cap", type=_positive, default=DEFAULT_PATH_CAP)
    p.add_argument("--inline-depth", type=int, default=DEFAULT_INLINE_DEPTH)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("eval", help="k-fold cross-validation on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json", "both"), default="both")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
