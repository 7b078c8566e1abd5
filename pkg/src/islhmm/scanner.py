"""File-level pipeline: parse, slice, translate, classify."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .detector import Alert, Decoding, classify_slice
from .hmm import HmmModel
from .isl import TokenConfig
from .php import PhpSyntaxError, desugar, parse_file
from .slicer import SliceOptions, extract
from .slices import Slice
from .translator import TranslationError, translate_slice

REPORT_VERSION = 1


@dataclass(frozen=True)
class SliceResult:
    slice: Slice
    decoding: Decoding | None
    error: str | None = None

    @property
    def sort_key(self) -> tuple:
        return (self.slice.sink_line, self.slice.path_index, self.slice.sink_class)

    def to_dict(self, dump_slice: bool, dump_isl: bool) -> dict:
        d = {
            "file": self.slice.origin,
            "sink_line": self.slice.sink_line,
            "class": self.slice.sink_class,
            "path": self.slice.path_index,
            "lines": list(self.slice.lines),
            "final_state": self.decoding.final_state.value if self.decoding else None,
        }
        if self.error:
            d["error"] = self.error
        if dump_slice:
            d["slice"] = self.slice.dump()
        if dump_isl and self.decoding:
            d["isl"] = self.decoding.table()
        return d


@dataclass
class FileReport:
    path: str
    results: list[SliceResult] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def alerts(self) -> list[Alert]:
        return [r.decoding.alert for r in self.results if r.decoding and r.decoding.alert]


def scan_source(
    source: str,
    path: str,
    config: TokenConfig,
    model: HmmModel,
    options: SliceOptions | None = None,
    strict_listing4: bool = False,
) -> FileReport:
    report = FileReport(path)
    try:
        ast = desugar(parse_file(source, path))
    except PhpSyntaxError as e:
        report.errors.append(str(e))
        return report
    ex = extract(ast, config, options)
    report.diagnostics.extend(ex.diagnostics)
    for s in ex.slices:
        try:
            isl = translate_slice(s, config)
        except TranslationError as e:
            msg = f"{path}:{e.line}: {e}"
            report.diagnostics.append(msg)
            report.results.append(SliceResult(s, None, msg))
            continue
        report.results.append(SliceResult(s, classify_slice(isl, model, strict_listing4)))
    report.results.sort(key=lambda r: r.sort_key)
    return report


def scan_file(
    path: str,
    config: TokenConfig,
    model: HmmModel,
    options: SliceOptions | None = None,
    strict_listing4: bool = False,
) -> FileReport:
    try:
        source = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as e:
        return FileReport(path, errors=[f"{path}: {e.strerror or e}"])
    opts = options or SliceOptions()
    if opts.root is None:
        opts = SliceOptions(opts.path_cap, opts.inline_depth, opts.classes, Path(path).parent)
    return scan_source(source, path, config, model, opts, strict_listing4)


def collect_php_files(targets: Iterable[str]) -> list[str]:
    """Expand directories to their ``.php`` files; missing targets raise."""
    out: set[str] = set()
    for t in targets:
        p = Path(t)
        if p.is_dir():
            out.update(str(f) for f in p.rglob("*.php") if f.is_file())
        elif p.is_file():
            out.add(str(p))
        else:
            raise FileNotFoundError(f"no such file or directory: {t}")
    return sorted(out)


def _scan_one(args) -> FileReport:
    return scan_file(*args)


def scan_paths(
    files: Sequence[str],
    config: TokenConfig,
    model: HmmModel,
    options: SliceOptions | None = None,
    strict_listing4: bool = False,
    jobs: int = 1,
) -> list[FileReport]:
    """Scan files, in parallel when ``jobs`` > 1; output order follows ``files``."""
    work = [(f, config, model, options, strict_listing4) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_scan_one, work))
    else:
        reports = [_scan_one(w) for w in work]
    return sorted(reports, key=lambda r: r.path)


@dataclass
class ScanReport:
    files: list[FileReport]
    model_checksum: str = ""

    @property
    def alerts(self) -> list[Alert]:
        alerts = [a for f in self.files for a in f.alerts]
        return sorted(alerts, key=lambda a: (a.file, a.sink_line, a.entry_line, a.sink_class, a.lines))

    @property
    def errors(self) -> list[str]:
        return [e for f in self.files for e in f.errors]

    @property
    def diagnostics(self) -> list[str]:
        return [d for f in self.files for d in f.diagnostics]

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        return 1 if self.alerts else 0

    def to_dict(self, dump_slices: bool = False, dump_isl: bool = False) -> dict:
        d = {
            "version": REPORT_VERSION,
            "model": self.model_checksum,
            "files": [f.path for f in self.files],
            "slices": sum(len(f.results) for f in self.files),
            "alerts": [a.to_dict() for a in self.alerts],
            "diagnostics": self.diagnostics,
            "errors": self.errors,
        }
        if dump_slices or dump_isl:
            d["details"] = [
                r.to_dict(dump_slices, dump_isl) for f in self.files for r in f.results
            ]
        return d

    def to_json(self, dump_slices: bool = False, dump_isl: bool = False) -> str:
        return json.dumps(self.to_dict(dump_slices, dump_isl), indent=2, sort_keys=False) + "\n"

    def to_text(self, dump_slices: bool = False, dump_isl: bool = False) -> str:
        out: list[str] = []
        for f in self.files:
            for r in f.results:
                if dump_slices:
                    out.append(r.slice.dump())
                if dump_isl and r.decoding:
                    out.append(r.decoding.table())
        for a in self.alerts:
            lines = ",".join(str(n) for n in a.lines)
            out.append(
                f"{a.file}:{a.sink_line}: {a.sink_class} vulnerability, "
                f"input at line {a.entry_line}, slice lines {{{lines}}}\n"
            )
            out.extend(f"    {t}\n" for t in a.trace)
        n_slices = sum(len(f.results) for f in self.files)
        out.append(
            f"{len(self.alerts)} alert(s), {n_slices} slice(s), {len(self.files)} file(s)\n"
        )
        return "".join(out)
