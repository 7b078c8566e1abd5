"""Taint-aware Viterbi classification of translated slices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hmm import HmmModel
from .isl import (
    CHECK_TOKENS,
    FINAL_STATES,
    STATES,
    IslInstruction,
    SliceIsl,
    State,
    Token,
)

INPUT_MARK = "input"
STRICT_CHECK_TOKENS = frozenset({Token.TYPECHK_NUM, Token.CONTENTCHK})
FINAL_INDICES = tuple(sorted(s.index for s in FINAL_STATES))


@dataclass
class TaintArtifacts:
    """Per-slice lists and flags; never shared between slices."""

    tl: set[str] = field(default_factory=set)
    ctl: set[str] = field(default_factory=set)
    sl: set[str] = field(default_factory=set)
    condition: int = 0
    val: bool = False
    san: bool = False
    # first time each name entered any list; fixes display order
    order: dict[str, int] = field(default_factory=dict)

    def _seen(self, name: str) -> None:
        self.order.setdefault(name, len(self.order))

    def add(self, which: str, name: str) -> None:
        self._seen(name)
        getattr(self, which).add(name)

    def ordered(self, which: str) -> tuple[str, ...]:
        return tuple(sorted(getattr(self, which), key=lambda n: (self.order.get(n, 1 << 30), n)))

    def snapshot(self) -> dict[str, tuple[str, ...]]:
        return {"TL": self.ordered("tl"), "CTL": self.ordered("ctl"), "SL": self.ordered("sl")}


def instruction_shape(tokens: Sequence[Token]) -> int:
    """0: plain or else marker, 1: if header, 2: inside a then-branch."""
    if not tokens or tokens[0] is not Token.COND:
        return 0
    if len(tokens) == 1:
        return 0
    if tokens[-1] is Token.COND:
        return 1
    return 2


def before_vit(
    instr: IslInstruction,
    art: TaintArtifacts,
    model: HmmModel,
    strict_listing4: bool = False,
) -> tuple[tuple[Token, ...], np.ndarray]:
    """Adjust tokens from the artifacts and pick their emission rows."""
    tokens = list(instr.tokens)
    names = instr.varmap.names
    art.val = False
    art.san = Token.SANIT_F in tokens
    art.condition = instruction_shape(tokens)
    if instr.is_else:
        art.ctl.clear()
    checks = STRICT_CHECK_TOKENS if strict_listing4 else CHECK_TOKENS
    guard = art.ctl | art.sl
    for i, tok in enumerate(tokens):
        if art.condition == 1 and i > 0:
            if tok in checks:
                art.val = True
            elif tok is Token.VAR and art.val:
                art.add("ctl", names[i])
                art.val = False
            elif tok is Token.INPUT and art.val:
                art.add("ctl", INPUT_MARK)
                art.val = False
        elif art.condition == 2:
            if tok is Token.INPUT and INPUT_MARK in guard:
                tokens[i] = Token.VAR
            elif tok is Token.VAR and names[i] in art.tl and names[i] not in guard:
                tokens[i] = Token.VAR_VV
        elif art.condition == 0:
            if tok is Token.VAR and names[i] in art.tl and names[i] not in art.sl:
                tokens[i] = Token.VAR_VV
    rows = np.array([model.emit[t.index] for t in tokens])
    return tuple(tokens), rows


# ---------------------------------------------------------------------------
# Viterbi


@dataclass(frozen=True)
class ViterbiResult:
    states: tuple[State, ...]
    scores: np.ndarray  # log delta after the last observation
    log_prob: float


def _forward(
    emis_rows: np.ndarray, model: HmmModel, carry: np.ndarray | None
) -> tuple[np.ndarray, list[np.ndarray]]:
    log_t = np.log(model.trans)
    log_e = np.log(emis_rows)
    backs: list[np.ndarray] = []
    if carry is None:
        delta = np.log(model.start) + log_e[0]
        backs.append(np.full(len(STATES), -1))
    else:
        cand = carry[None, :] + log_t
        backs.append(np.argmax(cand, axis=1))
        delta = cand.max(axis=1) + log_e[0]
    for i in range(1, len(log_e)):
        cand = delta[None, :] + log_t  # cand[s, p]
        backs.append(np.argmax(cand, axis=1))
        delta = cand.max(axis=1) + log_e[i]
    return delta, backs


def _backtrack(delta: np.ndarray, backs: list[np.ndarray], final: Sequence[int] | None) -> list[int]:
    if final is None:
        s = int(np.argmax(delta))
    else:
        idx = list(final)
        s = idx[int(np.argmax(delta[idx]))]
    path = [s]
    for b in reversed(backs[1:]):
        s = int(b[s])
        path.append(s)
    return path[::-1]


def decode_vit(
    tokens: Sequence[Token],
    model: HmmModel,
    init: np.ndarray | None = None,
    final: Sequence[int] | None = None,
) -> ViterbiResult:
    """Max-product decoding in log space.

    ``init`` is a carried log-score vector from a preceding sub-sequence; when
    None the start distribution is used. ``final`` restricts the state of the
    last observation. Ties go to the lower state index.
    """
    if not tokens:
        raise ValueError("cannot decode an empty sequence")
    rows = model.emit[[t.index for t in tokens]]
    delta, backs = _forward(rows, model, init)
    path = _backtrack(delta, backs, final)
    last = path[-1]
    return ViterbiResult(tuple(STATES[i] for i in path), delta, float(delta[last]))


def decode_chained(
    tokens: Sequence[Token],
    model: HmmModel,
    max_len: int | None = None,
    final: Sequence[int] | None = None,
    emis_rows: np.ndarray | None = None,
) -> ViterbiResult:
    """Decode in sub-sequences of at most ``max_len`` observations.

    Each sub-sequence starts from the scores the previous one ended with, and
    backpointers are kept across the split, so the result equals one unsplit
    pass.
    """
    if not tokens:
        raise ValueError("cannot decode an empty sequence")
    n = max_len or model.max_len or len(tokens)
    rows = emis_rows if emis_rows is not None else model.emit[[t.index for t in tokens]]
    carry = None
    all_backs: list[np.ndarray] = []
    for lo in range(0, len(tokens), n):
        carry, backs = _forward(rows[lo : lo + n], model, carry)
        all_backs.extend(backs)
    path = _backtrack(carry, all_backs, final)
    return ViterbiResult(tuple(STATES[i] for i in path), carry, float(carry[path[-1]]))


# ---------------------------------------------------------------------------
# after


def after_vit(
    instr: IslInstruction,
    tokens: Sequence[Token],
    states: Sequence[State],
    art: TaintArtifacts,
) -> TaintArtifacts:
    names = instr.varmap.names
    if instr.is_if_header:
        for tok, name in zip(tokens, names):
            if tok in (Token.VAR, Token.VAR_VV) and name in art.tl:
                art.add("ctl", name)
    if instr.varmap.is_assignment:
        name = instr.varmap.assigned
        if states[-1] is State.TAINT:
            art.add("tl", name)
            art.sl.discard(name)
        elif art.san:
            art.add("sl", name)
            art.san = False
            art.tl.discard(name)
    return art


# ---------------------------------------------------------------------------
# slices


def display_token(tok: Token, state: State, name: str) -> str:
    if tok is Token.VAR_VV or (tok is Token.VAR and state is State.TAINT):
        return f"var_vv_{name}"
    return tok.value


@dataclass(frozen=True)
class StepDecoding:
    instruction: IslInstruction
    tokens: tuple[Token, ...]
    states: tuple[State, ...]
    scores: tuple[float, ...]
    lists: dict

    def trace(self) -> str:
        names = self.instruction.varmap.names
        return " ".join(
            f"<{display_token(t, s, n)},{s.value}>"
            for t, s, n in zip(self.tokens, self.states, names)
        )


def render_lists(lists: dict, which: Sequence[str] = ("TL", "CTL", "SL")) -> str:
    return "; ".join(f"{w} = {{{', '.join(lists[w])}}}" for w in which)


@dataclass(frozen=True)
class Alert:
    file: str
    entry_line: int
    sink_line: int
    sink_class: str
    trace: tuple[str, ...]
    lines: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "entry_line": self.entry_line,
            "sink_line": self.sink_line,
            "class": self.sink_class,
            "lines": list(self.lines),
            "trace": list(self.trace),
        }


@dataclass(frozen=True)
class Decoding:
    steps: tuple[StepDecoding, ...]
    final_state: State
    alert: Alert | None

    @property
    def trace(self) -> tuple[str, ...]:
        return tuple(s.trace() for s in self.steps)

    def table(self, which: Sequence[str] = ("TL", "CTL", "SL")) -> str:
        """line, slice-isl, variable map, lists and decoded pairs, tab separated."""
        rows = []
        for s in self.steps:
            i = s.instruction
            rows.append(
                f"{i.loc.line}\t{i.text}\t{i.varmap.render()}\t"
                f"{render_lists(s.lists, which)}\t{s.trace()}\n"
            )
        return "".join(rows)


def classify_instructions(
    instructions: Sequence[IslInstruction],
    model: HmmModel,
    strict_listing4: bool = False,
    artifacts: TaintArtifacts | None = None,
) -> tuple[tuple[StepDecoding, ...], State]:
    art = artifacts if artifacts is not None else TaintArtifacts()
    steps = []
    for instr in instructions:
        tokens, rows = before_vit(instr, art, model, strict_listing4)
        result = decode_chained(tokens, model, model.max_len, FINAL_INDICES, rows)
        after_vit(instr, tokens, result.states, art)
        steps.append(
            StepDecoding(
                instr,
                tokens,
                result.states,
                tuple(float(x) for x in result.scores),
                art.snapshot(),
            )
        )
    if not steps:
        raise ValueError("cannot classify an empty slice")
    return tuple(steps), steps[-1].states[-1]


def classify_slice(
    slice_isl: SliceIsl, model: HmmModel, strict_listing4: bool = False
) -> Decoding:
    steps, final = classify_instructions(slice_isl.instructions, model, strict_listing4)
    alert = None
    if final is State.TAINT:
        alert = Alert(
            slice_isl.origin,
            slice_isl.entry_line,
            slice_isl.sink_line,
            slice_isl.sink_class,
            tuple(s.trace() for s in steps),
            tuple(i.loc.line for i in slice_isl.instructions),
        )
    return Decoding(steps, final, alert)
