"""Annotated corpus, supervised HMM training and the model file format."""

from __future__ import annotations

import hashlib
import re
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .isl import (
    FINAL_STATES,
    N_STATES,
    N_TOKENS,
    STATES,
    State,
    Token,
    can_emit,
)

MODEL_HEADER = "dekant-model v1"
STOCHASTIC_TOL = 1e-9


class CorpusError(ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    pairs: tuple[tuple[Token, State], ...]

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(t for t, _ in self.pairs)

    @property
    def states(self) -> tuple[State, ...]:
        return tuple(s for _, s in self.pairs)

    @property
    def final_state(self) -> State:
        return self.pairs[-1][1]

    def render(self) -> str:
        return " ".join(f"<{t.value},{s.value}>" for t, s in self.pairs)

    def padded(self, length: int) -> "CorpusEntry":
        last = self.final_state
        extra = ((Token.MISS, last),) * max(0, length - len(self.pairs))
        return CorpusEntry(self.pairs + extra)


@dataclass(frozen=True)
class Corpus:
    entries: tuple[CorpusEntry, ...]

    @property
    def max_len(self) -> int:
        return max((len(e.pairs) for e in self.entries), default=0)

    def padded(self) -> tuple[CorpusEntry, ...]:
        n = self.max_len
        return tuple(e.padded(n) for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def render(self) -> str:
        return "".join(e.render() + "\n" for e in self.entries)


_PAIR = re.compile(r"<\s*([A-Za-z_0-9]+)\s*,\s*([A-Za-z_\-]+)\s*>")


def parse_entry(line: str, lineno: int = 0) -> CorpusEntry:
    pairs = []
    pos = 0
    text = line.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _PAIR.match(text, pos)
        if not m:
            raise CorpusError(f"malformed pair near {text[pos:pos + 20]!r}", lineno)
        try:
            token = Token.parse(m.group(1))
        except ValueError:
            raise CorpusError(f"unknown token {m.group(1)!r}", lineno) from None
        try:
            state = State(m.group(2))
        except ValueError:
            raise CorpusError(f"unknown state {m.group(2)!r}", lineno) from None
        if not can_emit(state, token):
            raise CorpusError(f"state {state.value} cannot emit {token.value}", lineno)
        pairs.append((token, state))
        pos = m.end()
    if not pairs:
        raise CorpusError("empty sequence", lineno)
    if pairs[-1][1] not in FINAL_STATES:
        raise CorpusError(f"final state {pairs[-1][1].value} is not Taint or N-Taint", lineno)
    return CorpusEntry(tuple(pairs))


def load_corpus(text: str) -> Corpus:
    """Parse, validate and deduplicate (first occurrence wins) a corpus file.

    Blank lines and ``#`` comments are ignored.
    """
    seen: set[CorpusEntry] = set()
    entries: list[CorpusEntry] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entry = parse_entry(line, lineno)
        if entry not in seen:
            seen.add(entry)
            entries.append(entry)
    if not entries:
        raise CorpusError("empty corpus")
    return Corpus(tuple(entries))


@dataclass(frozen=True, eq=False)
class HmmModel:
    """Column-stochastic parameters.

    ``trans[k, i]`` is P(next=k | current=i); ``emit[t, s]`` is P(token t | s).
    """

    start: np.ndarray
    trans: np.ndarray
    emit: np.ndarray
    max_len: int

    def __post_init__(self) -> None:
        for arr in (self.start, self.trans, self.emit):
            arr.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HmmModel):
            return NotImplemented
        return (
            self.max_len == other.max_len
            and np.array_equal(self.start, other.start)
            and np.array_equal(self.trans, other.trans)
            and np.array_equal(self.emit, other.emit)
        )

    __hash__ = None  # type: ignore[assignment]

    def allclose(self, other: "HmmModel", rtol: float = 1e-12) -> bool:
        return (
            self.max_len == other.max_len
            and np.allclose(self.start, other.start, rtol=rtol, atol=0)
            and np.allclose(self.trans, other.trans, rtol=rtol, atol=0)
            and np.allclose(self.emit, other.emit, rtol=rtol, atol=0)
        )

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(save_model(self).encode())
        return h.hexdigest()[:16]


def count(corpus: Corpus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw start, transition and emission counts over the padded corpus."""
    start = np.zeros(N_STATES)
    trans = np.zeros((N_STATES, N_STATES))
    emit = np.zeros((N_TOKENS, N_STATES))
    for entry in corpus.padded():
        states = [s.index for s in entry.states]
        start[states[0]] += 1
        for a, b in zip(states, states[1:]):
            trans[b, a] += 1
        for t, s in entry.pairs:
            emit[t.index, s.index] += 1
    return start, trans, emit


def train(corpus: Corpus) -> HmmModel:
    """Add-one smoothed maximum likelihood estimates."""
    if not corpus.entries:
        raise CorpusError("empty corpus")
    start, trans, emit = count(corpus)
    start = (start + 1) / (start.sum() + N_STATES)
    trans = (trans + 1) / (trans.sum(axis=0, keepdims=True) + N_STATES)
    emit = (emit + 1) / (emit.sum(axis=0, keepdims=True) + N_TOKENS)
    return HmmModel(start, trans, emit, corpus.max_len)


# ---------------------------------------------------------------------------
# model file


def _fmt(x: float) -> str:
    return repr(float(x))


def save_model(model: HmmModel) -> str:
    lines = [MODEL_HEADER, f"maxlen {model.max_len}", "start"]
    lines.append(" ".join(_fmt(x) for x in model.start))
    lines.append("trans")
    lines.extend(" ".join(_fmt(x) for x in row) for row in model.trans)
    lines.append("emit")
    lines.extend(" ".join(_fmt(x) for x in row) for row in model.emit)
    return "\n".join(lines) + "\n"


def _block(lines: list[str], i: int, label: str, rows: int, cols: int) -> tuple[np.ndarray, int]:
    if i >= len(lines) or lines[i] != label:
        raise ModelError(f"expected block '{label}' at line {i + 1}")
    i += 1
    data = []
    for r in range(rows):
        if i >= len(lines):
            raise ModelError(f"block '{label}' has {r} rows, expected {rows}")
        try:
            values = [float(v) for v in lines[i].split()]
        except ValueError:
            raise ModelError(f"non-numeric value in block '{label}' at line {i + 1}") from None
        if len(values) != cols:
            raise ModelError(
                f"dimension mismatch in block '{label}' at line {i + 1}: "
                f"{len(values)} values, expected {cols}"
            )
        data.append(values)
        i += 1
    return np.array(data, dtype=float), i


def load_model(text: str, renormalize: bool = False) -> HmmModel:
    """Parse a model file.

    Columns must sum to one within 1e-9. With ``renormalize`` a column off by
    more than that is rescaled and a warning issued instead of an error.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != MODEL_HEADER:
        raise ModelError(f"missing header '{MODEL_HEADER}'")
    m = re.fullmatch(r"maxlen\s+(\d+)", lines[1]) if len(lines) > 1 else None
    if not m or int(m.group(1)) < 1:
        raise ModelError("missing or invalid 'maxlen' line")
    max_len = int(m.group(1))
    i = 2
    start, i = _block(lines, i, "start", 1, N_STATES)
    trans, i = _block(lines, i, "trans", N_STATES, N_STATES)
    emit, i = _block(lines, i, "emit", N_TOKENS, N_STATES)
    if i != len(lines):
        raise ModelError(f"unexpected content at line {i + 1}")
    start = start[0]
    for name, arr in (("start", start), ("trans", trans), ("emit", emit)):
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ModelError(f"smoothing violated: nonpositive entry in '{name}'")
    start = _check_columns("start", start[:, None], renormalize)[:, 0]
    trans = _check_columns("trans", trans, renormalize)
    emit = _check_columns("emit", emit, renormalize)
    return HmmModel(start, trans, emit, max_len)


def _check_columns(name: str, arr: np.ndarray, renormalize: bool) -> np.ndarray:
    sums = arr.sum(axis=0)
    bad = np.abs(sums - 1.0) > STOCHASTIC_TOL
    if not bad.any():
        return arr
    cols = ", ".join(f"{STATES[j].value}={sums[j]:.6g}" for j in np.flatnonzero(bad))
    if not renormalize:
        raise ModelError(f"non-stochastic columns in '{name}': {cols}")
    warnings.warn(f"renormalized columns in '{name}': {cols}", stacklevel=3)
    return arr / sums


def bundled_model_text(name: str = "demo") -> str:
    return (resources.files("islhmm") / "data" / "models" / f"{name}.model").read_text(encoding="utf-8")


def load_bundled_model(name: str = "demo") -> HmmModel:
    """The shipped models: ``demo`` (trained) or ``fig5`` (printed reference, renormalized)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load_model(bundled_model_text(name), renormalize=(name != "demo"))


def read_model(path: str | Path, renormalize: bool = False) -> HmmModel:
    return load_model(Path(path).read_text(encoding="utf-8"), renormalize=renormalize)


__all__ = [
    "Corpus",
    "CorpusEntry",
    "CorpusError",
    "HmmModel",
    "MODEL_HEADER",
    "ModelError",
    "bundled_model_text",
    "count",
    "load_bundled_model",
    "load_corpus",
    "load_model",
    "parse_entry",
    "read_model",
    "save_model",
    "train",
]
