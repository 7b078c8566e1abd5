"""ISL vocabulary, HMM state set, instruction data model and grammar checker."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class Token(str, enum.Enum):
    INPUT = "input"
    VAR = "var"
    SANIT_F = "sanit_f"
    SS = "ss"
    TYPECHK_STR = "typechk_str"
    TYPECHK_NUM = "typechk_num"
    CONTENTCHK = "contentchk"
    FILLCHK = "fillchk"
    COND = "cond"
    JOIN_STR = "join_str"
    ERASE_STR = "erase_str"
    REPLACE_STR = "replace_str"
    SPLIT_STR = "split_str"
    ADD_STR = "add_str"
    SUB_STR = "sub_str"
    SUB_STR_REPLACE = "sub_str_replace"
    CHAR5 = "char5"
    CHAR6 = "char6"
    START_WHERE = "start_where"
    CONC = "conc"
    VAR_VV = "var_vv"
    MISS = "miss"

    def __str__(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return TOKEN_INDEX[self]

    @classmethod
    def parse(cls, text: str) -> "Token":
        text = text.strip()
        text = TOKEN_ALIASES.get(text, text)
        return cls(text)


class State(str, enum.Enum):
    TAINT = "Taint"
    N_TAINT = "N-Taint"
    SAN = "San"
    VAL = "Val"
    CHG_STR = "Chg_str"

    def __str__(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return STATE_INDEX[self]

    @property
    def is_final(self) -> bool:
        return self in FINAL_STATES


TOKENS: tuple[Token, ...] = tuple(Token)
STATES: tuple[State, ...] = tuple(State)
TOKEN_INDEX = {t: i for i, t in enumerate(TOKENS)}
STATE_INDEX = {s: i for i, s in enumerate(STATES)}
N_TOKENS = len(TOKENS)
N_STATES = len(STATES)
FINAL_STATES = frozenset({State.TAINT, State.N_TAINT})

# corpus listings write typechk_int; the vocabulary only has typechk_num
TOKEN_ALIASES = {"typechk_int": "typechk_num"}

CHECK_TOKENS = frozenset(
    {Token.TYPECHK_STR, Token.TYPECHK_NUM, Token.CONTENTCHK, Token.FILLCHK}
)
MOD_ALL_TOKENS = frozenset(
    {Token.JOIN_STR, Token.ERASE_STR, Token.REPLACE_STR, Token.SPLIT_STR}
)
VARIABLE_TOKENS = frozenset({Token.VAR, Token.VAR_VV})

_T = Token
EMISSIONS: Mapping[State, frozenset[Token]] = {
    # miss is not listed for any state, but padding pairs <miss,Taint> and
    # <miss,N-Taint> are part of every normalized corpus.
    State.TAINT: frozenset({_T.CONC, _T.INPUT, _T.VAR, _T.VAR_VV, _T.MISS}),
    State.N_TAINT: frozenset(
        {_T.CONC, _T.COND, _T.INPUT, _T.VAR, _T.VAR_VV, _T.SS, _T.MISS}
    ),
    State.SAN: frozenset({_T.INPUT, _T.SANIT_F, _T.VAR, _T.VAR_VV}),
    State.VAL: frozenset(
        {
            _T.CONTENTCHK,
            _T.FILLCHK,
            _T.INPUT,
            _T.TYPECHK_NUM,
            _T.TYPECHK_STR,
            _T.VAR,
            _T.VAR_VV,
        }
    ),
    State.CHG_STR: frozenset(
        {
            _T.ADD_STR,
            _T.CHAR5,
            _T.CHAR6,
            _T.ERASE_STR,
            _T.INPUT,
            _T.JOIN_STR,
            _T.REPLACE_STR,
            _T.SPLIT_STR,
            _T.START_WHERE,
            _T.SUB_STR,
            _T.SUB_STR_REPLACE,
            _T.VAR,
            _T.VAR_VV,
        }
    ),
}

# Taint column of the token table, kept as metadata only.
TAINT_COLUMN: Mapping[Token, str] = {
    _T.INPUT: "Yes",
    _T.VAR: "No",
    _T.SANIT_F: "No",
    _T.SS: "Yes",
    _T.TYPECHK_STR: "Yes",
    _T.TYPECHK_NUM: "No",
    _T.CONTENTCHK: "No",
    _T.FILLCHK: "Yes",
    _T.COND: "No",
    _T.JOIN_STR: "No",
    _T.ERASE_STR: "Yes",
    _T.REPLACE_STR: "No",
    _T.SPLIT_STR: "Yes",
    _T.ADD_STR: "Yes/No",
    _T.SUB_STR: "Yes/No",
    _T.SUB_STR_REPLACE: "Yes/No",
    _T.CHAR5: "No",
    _T.CHAR6: "Yes",
    _T.START_WHERE: "Yes/No",
    _T.CONC: "Yes/No",
    _T.VAR_VV: "Yes",
    _T.MISS: "Yes/No",
}


def can_emit(state: State, token: Token) -> bool:
    return token in EMISSIONS[state]


VULN_CLASSES: tuple[str, ...] = (
    "sqli",
    "xss",
    "rfi",
    "lfi",
    "osci",
    "phpci",
    "ldapi",
    "dtpt",
    "scd",
    "cs",
    "hi",
    "sf",
)


@dataclass(frozen=True)
class VarMapEntry:
    is_assignment: bool
    names: tuple[str, ...]

    def render(self) -> str:
        return " ".join(["1" if self.is_assignment else "0", *self.names])

    @property
    def assigned(self) -> str | None:
        if not self.is_assignment or not self.names:
            return None
        return self.names[-1]


@dataclass(frozen=True)
class SourceLoc:
    path: str
    line: int


@dataclass(frozen=True)
class IslInstruction:
    tokens: tuple[Token, ...]
    varmap: VarMapEntry
    loc: SourceLoc = SourceLoc("", 0)

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("an ISL instruction needs at least one token")
        if len(self.varmap.names) != len(self.tokens):
            raise ValueError(
                f"variable map has {len(self.varmap.names)} names "
                f"for {len(self.tokens)} tokens"
            )
        if self.varmap.is_assignment and self.varmap.names[-1] == "-":
            raise ValueError("assignment without an assigned variable name")

    @classmethod
    def build(
        cls,
        pairs: Sequence[tuple[Token, str]],
        is_assignment: bool = False,
        loc: SourceLoc = SourceLoc("", 0),
    ) -> "IslInstruction":
        tokens = tuple(t for t, _ in pairs)
        names = tuple(n for _, n in pairs)
        return cls(tokens, VarMapEntry(is_assignment, names), loc)

    @property
    def text(self) -> str:
        return " ".join(t.value for t in self.tokens)

    @property
    def is_if_header(self) -> bool:
        return (
            len(self.tokens) > 1
            and self.tokens[0] is Token.COND
            and self.tokens[-1] is Token.COND
        )

    @property
    def is_else(self) -> bool:
        return self.tokens == (Token.COND,)


@dataclass(frozen=True)
class SliceIsl:
    instructions: tuple[IslInstruction, ...]
    sink_class: str
    origin: str
    entry_line: int = 0
    sink_line: int = 0
    path_index: int = 0


# ---------------------------------------------------------------------------
# grammar
#
# Extensions over the published rules, all needed so that translator output is
# derivable: var_vv stands wherever var does, function arguments may be nested
# calls or concatenations, a lone `cond` marks an else branch, and the last
# string argument of add_str / sub_str_replace may vanish when it is a literal.

_P = "param"
_ARG = "arg"
_GRAMMAR: dict[str, list[tuple[str, ...]]] = {
    "statement": [
        ("sensitive_sink",),
        ("sanitization",),
        ("validation",),
        ("mod_all",),
        ("mod_add",),
        ("mod_sub",),
        ("mod_rep",),
        ("concat",),
        ("cond", "statements", "cond"),
        ("cond", "statements"),
        ("cond",),
        ("assignment",),
    ],
    "statements": [("statement",), ("statement", "statements")],
    "sensitive_sink": [("ss", _ARG)],
    "sanitization": [("sanit_f", _ARG)],
    "validation": [(chk, _ARG) for chk in ("typechk_str", "typechk_num", "fillchk", "contentchk")],
    "mod_all": [(m, _ARG) for m in ("join_str", "erase_str", "replace_str", "split_str")],
    "mod_add": [
        ("add_str", _ARG, "num_chars", _ARG),
        ("add_str", _ARG, "num_chars"),
    ],
    "mod_sub": [
        ("sub_str", _ARG, "num_chars", "start_where"),
        ("sub_str", _ARG, "num_chars"),
    ],
    "mod_rep": [
        ("sub_str_replace", _ARG, "num_chars", _ARG, "start_where"),
        ("sub_str_replace", _ARG, "num_chars", _ARG),
        ("sub_str_replace", _ARG, "num_chars", "start_where"),
        ("sub_str_replace", _ARG, "num_chars"),
    ],
    "concat": [("operand", "conc", "concat"), ("operand",)],
    "operand": [("statement",), (_P,)],
    "assignment": [("operand", "attrib_var"), ("concat", "attrib_var")],
    _ARG: [(_P,), ("concat",)],
    _P: [("input",), ("var",)],
    "attrib_var": [("var",)],
    "num_chars": [("char5",), ("char6",)],
}
_TERMINALS = frozenset(t.value for t in Token)


def _normalize_for_grammar(tokens: Iterable[Token]) -> tuple[str, ...]:
    return tuple("var" if t is Token.VAR_VV else t.value for t in tokens)


@lru_cache(maxsize=4096)
def _derives(symbols: tuple[str, ...]) -> bool:
    n = len(symbols)
    # chart[(i, j)] = nonterminals deriving symbols[i:j]
    chart: dict[tuple[int, int], set[str]] = {}
    for length in range(1, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            found: set[str] = set()
            if length == 1:
                found.add(symbols[i])
            chart[(i, j)] = found
            changed = True
            while changed:
                changed = False
                for lhs, alternatives in _GRAMMAR.items():
                    if lhs in found:
                        continue
                    for rhs in alternatives:
                        if _matches(rhs, i, j, chart):
                            found.add(lhs)
                            changed = True
                            break
    return "statement" in chart.get((0, n), set())


def _matches(rhs: tuple[str, ...], i: int, j: int, chart) -> bool:
    if not rhs:
        return i == j
    head, rest = rhs[0], rhs[1:]
    if not rest:
        return head in chart.get((i, j), ())
    # every symbol consumes at least one token
    for k in range(i + 1, j - len(rest) + 1):
        if head in chart.get((i, k), ()) and _matches(rest, k, j, chart):
            return True
    return False


def validate_sequence(tokens: Sequence[Token]) -> bool:
    """True iff ``tokens`` derives from the ``statement`` production."""
    if not tokens:
        return False
    if any(t is Token.MISS for t in tokens):
        return False
    return _derives(_normalize_for_grammar(tokens))


# ---------------------------------------------------------------------------
# function configuration

CONFIG_TOKEN_FILES: Mapping[str, Token] = {
    "input": Token.INPUT,
    "sanit_f": Token.SANIT_F,
    "typechk_str": Token.TYPECHK_STR,
    "typechk_num": Token.TYPECHK_NUM,
    "contentchk": Token.CONTENTCHK,
    "fillchk": Token.FILLCHK,
    "join_str": Token.JOIN_STR,
    "erase_str": Token.ERASE_STR,
    "replace_str": Token.REPLACE_STR,
    "split_str": Token.SPLIT_STR,
    "add_str": Token.ADD_STR,
    "sub_str": Token.SUB_STR,
    "sub_str_replace": Token.SUB_STR_REPLACE,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ArgSpec:
    """Which call arguments carry data worth representing.

    ``indices`` empty means every argument; ``rest_from`` includes every
    argument at or after that position (variadic binders).
    """

    indices: tuple[int, ...] = ()
    rest_from: int | None = None

    def select(self, n_args: int) -> list[int]:
        if not self.indices and self.rest_from is None:
            return list(range(n_args))
        chosen = [i for i in self.indices if i < n_args]
        if self.rest_from is not None:
            chosen.extend(range(self.rest_from, n_args))
        return sorted(set(chosen))


_ALL_ARGS = ArgSpec()


@dataclass(frozen=True)
class TokenConfig:
    functions: Mapping[str, Token]
    sinks: Mapping[str, tuple[str, ...]]
    inputs: frozenset[str]
    arg_specs: Mapping[str, ArgSpec] = field(default_factory=dict)
    short_substring_limit: int = 6

    def token_for(self, name: str) -> Token | None:
        key = name.lower()
        if key in self.sinks:
            return Token.SS
        return self.functions.get(key)

    def sink_classes(self, name: str) -> tuple[str, ...]:
        return self.sinks.get(name.lower(), ())

    def is_input(self, superglobal: str) -> bool:
        return superglobal.lstrip("$") in self.inputs

    def arg_spec(self, name: str) -> ArgSpec:
        return self.arg_specs.get(name.lower(), _ALL_ARGS)

    def num_chars(self, length: int | None) -> Token:
        if length is None or length >= self.short_substring_limit:
            return Token.CHAR6
        return Token.CHAR5

    @property
    def classes(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for classes in self.sinks.values():
            for c in classes:
                seen.setdefault(c)
        return tuple(seen)


def token_for_function(name: str, config: TokenConfig) -> Token | None:
    return config.token_for(name)


_ARG_RE = re.compile(r"^(\d+)(\+)?$")


def _parse_config_line(line: str, path: str, lineno: int) -> tuple[str, ArgSpec] | None:
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    name, *args = line.split()
    indices: list[int] = []
    rest_from: int | None = None
    for a in args:
        m = _ARG_RE.match(a)
        if not m:
            raise ConfigError(f"{path}:{lineno}: bad argument position {a!r}")
        if m.group(2):
            rest_from = int(m.group(1))
        else:
            indices.append(int(m.group(1)))
    return name.lower(), ArgSpec(tuple(indices), rest_from)


def _read_cfg(text: str, path: str) -> list[tuple[str, ArgSpec]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parsed = _parse_config_line(line, path, lineno)
        if parsed is not None:
            out.append(parsed)
    return out


def parse_config_files(files: Mapping[str, str]) -> TokenConfig:
    """Build a TokenConfig from ``{file name: contents}``."""
    functions: dict[str, Token] = {}
    origin: dict[str, str] = {}
    sinks: dict[str, list[str]] = {}
    inputs: set[str] = set()
    arg_specs: dict[str, ArgSpec] = {}

    for fname in sorted(files):
        if not fname.endswith(".cfg"):
            continue
        stem = fname[: -len(".cfg")]
        entries = _read_cfg(files[fname], fname)
        if stem.startswith("ss_"):
            vclass = stem[3:]
            for name, spec in entries:
                if name in functions:
                    raise ConfigError(
                        f"{fname}: {name} already listed in {origin[name]}"
                    )
                classes = sinks.setdefault(name, [])
                if vclass not in classes:
                    classes.append(vclass)
                if spec != _ALL_ARGS:
                    arg_specs[name] = spec
            continue
        if stem not in CONFIG_TOKEN_FILES:
            raise ConfigError(f"unknown configuration file {fname}")
        token = CONFIG_TOKEN_FILES[stem]
        if token is Token.INPUT:
            inputs.update(name.lstrip("$").upper() for name, _ in entries)
            continue
        for name, spec in entries:
            if name in sinks or (name in functions and functions[name] is not token):
                where = origin.get(name, "a sink file")
                raise ConfigError(f"{fname}: {name} already listed in {where}")
            functions[name] = token
            origin[name] = fname
            if spec != _ALL_ARGS:
                arg_specs[name] = spec
    for name in sinks:
        if name in functions:
            raise ConfigError(f"{name} is both a sink and a {functions[name]}")
    return TokenConfig(
        functions=dict(functions),
        sinks={k: tuple(v) for k, v in sinks.items()},
        inputs=frozenset(inputs),
        arg_specs=arg_specs,
    )


def load_config(directory: str | Path | None = None) -> TokenConfig:
    """Load every ``*.cfg`` in ``directory`` (bundled defaults when None)."""
    if directory is None:
        root = resources.files("islhmm") / "data" / "config"
        files = {
            p.name: p.read_text(encoding="utf-8")
            for p in root.iterdir()
            if p.name.endswith(".cfg")
        }
    else:
        d = Path(directory)
        if not d.is_dir():
            raise ConfigError(f"config directory not found: {d}")
        files = {p.name: p.read_text(encoding="utf-8") for p in d.glob("*.cfg")}
    if not files:
        raise ConfigError("no configuration files found")
    return parse_config_files(files)
