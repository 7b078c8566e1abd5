"""AST node types for the supported PHP subset.

Every node carries a ``line`` that is excluded from equality so that trees
can be compared structurally after a print/parse round trip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


def _line() -> int:
    return field(default=0, compare=False)


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    line: int = _line()


@dataclass(frozen=True)
class Superglobal:
    """Access to an entry-point array, e.g. ``$_POST['name']``."""

    name: str
    key: "Expr | None" = None
    line: int = _line()


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: "Expr | None" = None
    line: int = _line()


@dataclass(frozen=True)
class Lit:
    """String, number or bare constant. ``kind`` is 'str', 'num' or 'const'."""

    value: str
    kind: str = "str"
    line: int = _line()


@dataclass(frozen=True)
class Interp:
    """Double-quoted string with embedded variables."""

    parts: tuple["Expr", ...]
    line: int = _line()


@dataclass(frozen=True)
class Concat:
    parts: tuple["Expr", ...]
    line: int = _line()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _line()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    line: int = _line()


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...] = ()
    line: int = _line()


@dataclass(frozen=True)
class MethodCall:
    obj: "Expr"
    name: str
    args: tuple["Expr", ...] = ()
    line: int = _line()


@dataclass(frozen=True)
class Prop:
    obj: "Expr"
    name: str
    line: int = _line()


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr | None"
    other: "Expr"
    line: int = _line()


@dataclass(frozen=True)
class AssignExpr:
    target: "Expr"
    op: str
    value: "Expr"
    line: int = _line()


@dataclass(frozen=True)
class ArrayLit:
    items: tuple["Expr", ...] = ()
    line: int = _line()


@dataclass(frozen=True)
class CutCall:
    """Call whose inlining stopped at the depth limit; result treated as tainted."""

    name: str
    args: tuple["Expr", ...] = ()
    line: int = _line()


Expr = Union[
    Var,
    Superglobal,
    Index,
    Lit,
    Interp,
    Concat,
    BinOp,
    Unary,
    Call,
    MethodCall,
    Prop,
    Ternary,
    AssignExpr,
    ArrayLit,
    CutCall,
]


# --- statements -------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: Expr
    op: str
    value: Expr
    line: int = _line()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    line: int = _line()


@dataclass(frozen=True)
class Echo:
    args: tuple[Expr, ...]
    keyword: str = "echo"
    line: int = _line()


@dataclass(frozen=True)
class ElseIf:
    cond: Expr
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple["Stmt", ...]
    elifs: tuple[ElseIf, ...] = ()
    orelse: tuple["Stmt", ...] | None = None
    line: int = _line()
    else_line: int = _line()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class For:
    init: tuple[Expr, ...]
    cond: tuple[Expr, ...]
    step: tuple[Expr, ...]
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class Foreach:
    subject: Expr
    key: Expr | None
    value: Expr
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class Loop:
    """Desugared loop; the slicer walks its body once."""

    kind: str
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple[str, ...]
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class Return:
    value: Expr | None = None
    line: int = _line()


@dataclass(frozen=True)
class Include:
    keyword: str
    expr: Expr
    line: int = _line()


@dataclass(frozen=True)
class InlineHTML:
    text: str
    line: int = _line()


@dataclass(frozen=True)
class Opaque:
    """Unsupported construct kept for line accounting; the slicer skips it."""

    text: str
    line: int = _line()


Stmt = Union[
    Assign,
    ExprStmt,
    Echo,
    If,
    While,
    For,
    Foreach,
    Loop,
    FuncDef,
    Return,
    Include,
    InlineHTML,
    Opaque,
]


@dataclass(frozen=True)
class Ast:
    statements: tuple[Stmt, ...]
    functions: dict[str, FuncDef] = field(default_factory=dict, compare=False)
    path: str = field(default="", compare=False)


def iter_exprs(expr: Expr):
    """Pre-order walk over an expression tree."""
    stack = [expr]
    while stack:
        e = stack.pop()
        if e is None:
            continue
        yield e
        stack.extend(reversed(list(children(e))))


def children(e: Expr):
    if isinstance(e, (Superglobal,)):
        return (e.key,) if e.key is not None else ()
    if isinstance(e, Index):
        return tuple(x for x in (e.base, e.index) if x is not None)
    if isinstance(e, (Interp, Concat)):
        return e.parts
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, (Call, CutCall)):
        return e.args
    if isinstance(e, MethodCall):
        return (e.obj, *e.args)
    if isinstance(e, Prop):
        return (e.obj,)
    if isinstance(e, Ternary):
        return tuple(x for x in (e.cond, e.then, e.other) if x is not None)
    if isinstance(e, AssignExpr):
        return (e.target, e.value)
    if isinstance(e, ArrayLit):
        return e.items
    return ()


def base_name(e: Expr) -> str | None:
    """Name of the variable an access path is rooted at (``$a['k']->p`` -> ``a``)."""
    while True:
        if isinstance(e, Var):
            return e.name
        if isinstance(e, Superglobal):
            return e.name
        if isinstance(e, Index):
            e = e.base
        elif isinstance(e, Prop):
            e = e.obj
        else:
            return None
