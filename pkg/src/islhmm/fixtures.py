"""Bundled worked examples with their expected pipeline outputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .hmm import Corpus, CorpusEntry, load_corpus, parse_entry
from .isl import State, Token


class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class ExpectedSlice:
    lines: tuple[int, ...]
    sink_class: str
    final_state: State


@dataclass(frozen=True)
class Listing2Item:
    php: str
    isl: tuple[tuple[Token, ...], ...]


@dataclass(frozen=True)
class Fixture:
    """One example: optional PHP source plus whatever outputs it pins down.

    ``isl`` holds the three-column rows (line, ISL, variable map) of the
    program view; ``table`` the decoded rows with the TL column; ``lists``
    the TL/CTL rows of the program view.
    """

    name: str
    php: str | None = None
    isl: str | None = None
    table: str | None = None
    lists: str | None = None
    slices: tuple[ExpectedSlice, ...] = ()
    corpus: Corpus | None = None
    sequences: tuple[CorpusEntry, ...] = ()
    listing: tuple[Listing2Item, ...] = field(default=())


def fixture_text(name: str) -> str:
    try:
        return (resources.files("islhmm") / "fixtures" / name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FixtureError(f"missing fixture file {name}") from None


def fixture_path(name: str):
    return resources.files("islhmm") / "fixtures" / name


def _check_rows(name: str, text: str, columns: int) -> str:
    for n, row in enumerate(text.splitlines(), 1):
        cells = row.split("\t")
        if len(cells) != columns or not cells[0].isdigit():
            raise FixtureError(f"{name}:{n}: expected {columns} tab-separated columns")
        if columns >= 3:
            try:
                tokens = [Token.parse(t) for t in cells[1].split()]
            except ValueError as e:
                raise FixtureError(f"{name}:{n}: {e}") from None
            if len(cells[2].split()) != len(tokens) + 1:
                raise FixtureError(f"{name}:{n}: variable map does not fit the tokens")
    return text


def _parse_slices(name: str, text: str) -> tuple[ExpectedSlice, ...]:
    out = []
    for n, row in enumerate(text.splitlines(), 1):
        try:
            lines, cls, state = row.split("\t")
            out.append(ExpectedSlice(tuple(int(x) for x in lines.split(",")), cls, State(state)))
        except ValueError as e:
            raise FixtureError(f"{name}:{n}: {e}") from None
    return tuple(out)


def parse_listing2(text: str) -> tuple[Listing2Item, ...]:
    items: list[Listing2Item] = []
    php = None
    reps: list[tuple[Token, ...]] = []
    for n, row in enumerate(text.splitlines(), 1):
        if not row.strip() or row.startswith("#"):
            continue
        if row.startswith("    "):
            if php is None:
                raise FixtureError(f"listing2.txt:{n}: representation before any instruction")
            try:
                reps.append(tuple(Token.parse(t) for t in row.split()))
            except ValueError as e:
                raise FixtureError(f"listing2.txt:{n}: {e}") from None
        else:
            if php is not None:
                items.append(Listing2Item(php, tuple(reps)))
            php, reps = row, []
    if php is not None:
        items.append(Listing2Item(php, tuple(reps)))
    if any(not it.isl for it in items):
        raise FixtureError("listing2.txt: instruction without representation")
    return tuple(items)


def load_fixtures() -> list[Fixture]:
    """Parse and validate every bundled fixture; a corrupt one raises FixtureError."""
    fixtures = []
    for fig in ("fig1", "fig2"):
        fixtures.append(
            Fixture(
                fig,
                php=fixture_text(f"{fig}.php"),
                isl=_check_rows(f"{fig}.isl", fixture_text(f"{fig}.isl"), 3),
                table=_check_rows(f"{fig}.table", fixture_text(f"{fig}.table"), 5) if fig == "fig1" else None,
                lists=_check_rows(f"{fig}.lists", fixture_text(f"{fig}.lists"), 2) if fig == "fig2" else None,
                slices=_parse_slices(f"{fig}.slices", fixture_text(f"{fig}.slices")),
            )
        )
    seqs = []
    for n, row in enumerate(fixture_text("fig4.seq").splitlines(), 1):
        if row.strip():
            seqs.append(parse_entry(row, n))
    fixtures.append(Fixture("fig4", sequences=tuple(seqs)))
    for name in ("listing3", "demo"):
        fixtures.append(Fixture(name, corpus=load_corpus(fixture_text(f"{name}.corpus"))))
    fixtures.append(Fixture("listing2", listing=parse_listing2(fixture_text("listing2.txt"))))
    return fixtures


def get_fixture(name: str) -> Fixture:
    for f in load_fixtures():
        if f.name == name:
            return f
    raise KeyError(name)
