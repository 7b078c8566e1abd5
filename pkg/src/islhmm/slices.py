"""Slice data types shared by the extractor and the translator."""

from __future__ import annotations

from dataclasses import dataclass

from .php.nodes import If, Stmt


@dataclass(frozen=True)
class SliceStep:
    """One slice element.

    ``role`` is ``"stmt"`` for an ordinary statement, ``"if"`` for the header
    of an if statement and ``"else"`` for the marker of an else branch taken.
    ``guarded`` marks statements inside a then-branch whose header is part of
    the slice.
    """

    stmt: Stmt
    line: int
    role: str = "stmt"
    guarded: bool = False


@dataclass(frozen=True)
class Slice:
    steps: tuple[SliceStep, ...]
    sink_class: str
    origin: str
    entry_line: int
    sink_line: int
    path_index: int = 0
    branches: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def lines(self) -> tuple[int, ...]:
        return tuple(s.line for s in self.steps)

    def dump(self) -> str:
        from .php.printer import print_expr, print_stmt

        head = (
            f"# slice {self.origin} class={self.sink_class} entry={self.entry_line} "
            f"sink={self.sink_line} path={self.path_index}"
        )
        if self.branches:
            head += " branches=" + ",".join(self.branches)
        out = [head]
        for note in self.notes:
            out.append(f"# note: {note}")
        for step in self.steps:
            if step.role == "if":
                assert isinstance(step.stmt, If)
                text = f"if ({print_expr(step.stmt.cond)})"
            elif step.role == "else":
                text = "else"
            else:
                text = " ".join(x.strip() for x in print_stmt(step.stmt))
                if step.guarded:
                    text = "    " + text
            out.append(f"{step.line}\t{text}")
        return "\n".join(out) + "\n"
