"""Confusion matrices, detection metrics and k-fold cross-validation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .detector import FINAL_INDICES, decode_chained
from .hmm import Corpus, CorpusEntry, HmmModel, train
from .isl import State

METRIC_NAMES = ("acc", "pr", "fpr", "fnr")
UNDEFINED = "n/a"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Taint (vulnerable) as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    def record(self, actual: State, predicted: State) -> "ConfusionMatrix":
        pos_a = actual is State.TAINT
        pos_p = predicted is State.TAINT
        return self + ConfusionMatrix(
            int(pos_a and pos_p), int(pos_p and not pos_a), int(pos_a and not pos_p), int(not pos_a and not pos_p)
        )

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics(cm: ConfusionMatrix) -> dict[str, float | None]:
    """acc, pr, fpr and fnr; a zero denominator yields None."""
    return {
        "acc": _ratio(cm.tp + cm.tn, cm.n),
        "pr": _ratio(cm.tp, cm.tp + cm.fp),
        "fpr": _ratio(cm.fp, cm.fp + cm.tn),
        "fnr": _ratio(cm.fn, cm.fn + cm.tp),
    }


def fmt_metric(x: float | None, digits: int = 3) -> str:
    return UNDEFINED if x is None else f"{x:.{digits}f}"


# ---------------------------------------------------------------------------
# cross-validation


def fold_assignment(n: int, k: int, seed: int) -> list[list[int]]:
    """Seeded shuffle, then round-robin into ``k`` disjoint folds."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} is larger than the corpus ({n} entries)")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return [sorted(order[i::k]) for i in range(k)]


def predict_entry(entry: CorpusEntry, model: HmmModel) -> State:
    # A held-out entry is a one-instruction slice whose lists start empty, so
    # the token adjustment before decoding is a no-op and plain decoding of
    # the annotated tokens is equivalent.
    result = decode_chained(entry.tokens, model, model.max_len, FINAL_INDICES)
    return result.states[-1]


@dataclass(frozen=True)
class FoldResult:
    index: int
    held_out: tuple[int, ...]
    matrix: ConfusionMatrix


@dataclass(frozen=True)
class CrossValidation:
    k: int
    seed: int
    size: int
    folds: tuple[FoldResult, ...]

    @property
    def aggregate(self) -> ConfusionMatrix:
        total = ConfusionMatrix()
        for f in self.folds:
            total = total + f.matrix
        return total

    def to_dict(self) -> dict:
        def row(cm: ConfusionMatrix) -> dict:
            return {**metrics(cm), **cm.as_dict()}

        return {
            "k": self.k,
            "seed": self.seed,
            "entries": self.size,
            "folds": [{"fold": f.index, "size": len(f.held_out), **row(f.matrix)} for f in self.folds],
            "aggregate": row(self.aggregate),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        head = f"{'fold':>9} {'size':>5} " + " ".join(f"{c:>4}" for c in ("tp", "fp", "fn", "tn"))
        head += " " + " ".join(f"{m:>6}" for m in METRIC_NAMES)
        lines = [f"{self.k}-fold cross-validation, seed {self.seed}, {self.size} entries", head]

        def line(label: str, size: int, cm: ConfusionMatrix) -> str:
            ms = metrics(cm)
            counts = " ".join(f"{v:>4}" for v in cm.as_dict().values())
            return f"{label:>9} {size:>5} {counts} " + " ".join(f"{fmt_metric(ms[m]):>6}" for m in METRIC_NAMES)

        for f in self.folds:
            lines.append(line(str(f.index), len(f.held_out), f.matrix))
        lines.append(line("aggregate", self.size, self.aggregate))
        return "\n".join(lines) + "\n"


def kfold(corpus: Corpus, k: int, seed: int = 0) -> CrossValidation:
    """Train on k-1 folds, classify the held-out fold by its final decoded state."""
    entries = corpus.entries
    folds = []
    for i, held in enumerate(fold_assignment(len(entries), k, seed)):
        keep = set(held)
        model = train(Corpus(tuple(e for j, e in enumerate(entries) if j not in keep)))
        cm = ConfusionMatrix()
        for j in held:
            cm = cm.record(entries[j].final_state, predict_entry(entries[j], model))
        folds.append(FoldResult(i, tuple(held), cm))
    return CrossValidation(k, seed, len(entries), tuple(folds))


def score_predictions(actual: Sequence[State], predicted: Sequence[State]) -> ConfusionMatrix:
    if len(actual) != len(predicted):
        raise ValueError("actual and predicted differ in length")
    cm = ConfusionMatrix()
    for a, p in zip(actual, predicted):
        cm = cm.record(a, p)
    return cm
