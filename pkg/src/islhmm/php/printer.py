"""Pretty-printer: AST back to PHP source (parse(print(ast)) == ast)."""

from __future__ import annotations

from .nodes import (
    ArrayLit,
    Assign,
    AssignExpr,
    Ast,
    BinOp,
    Call,
    Concat,
    CutCall,
    Echo,
    Expr,
    ExprStmt,
    For,
    Foreach,
    FuncDef,
    If,
    Include,
    Index,
    InlineHTML,
    Interp,
    Lit,
    Loop,
    MethodCall,
    Opaque,
    Prop,
    Return,
    Stmt,
    Superglobal,
    Ternary,
    Unary,
    Var,
    While,
)

_ATOMIC = (Var, Superglobal, Index, Lit, Interp, Call, MethodCall, Prop, ArrayLit, CutCall)


def _quote(s: str) -> str:
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _dq_escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in '\\"${':
            out.append("\\" + ch if ch != "{" else "{")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        else:
            out.append(ch)
    return "".join(out)


def _sub(e: Expr) -> str:
    text = print_expr(e)
    return text if isinstance(e, _ATOMIC) else f"({text})"


def _args(args) -> str:
    return ", ".join(print_expr(a) for a in args)


def print_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return f"${e.name}"
    if isinstance(e, Superglobal):
        if e.key is None:
            return f"${e.name}"
        return f"${e.name}[{print_expr(e.key)}]"
    if isinstance(e, Index):
        idx = "" if e.index is None else print_expr(e.index)
        return f"{_sub(e.base)}[{idx}]"
    if isinstance(e, Lit):
        if e.kind == "str":
            return _quote(e.value)
        return e.value
    if isinstance(e, Interp):
        chunks = []
        for p in e.parts:
            if isinstance(p, Lit):
                chunks.append(_dq_escape(p.value))
            else:
                chunks.append("{" + print_expr(p) + "}")
        return '"' + "".join(chunks) + '"'
    if isinstance(e, Concat):
        return " . ".join(_sub(p) for p in e.parts)
    if isinstance(e, BinOp):
        if e.op == "=>":
            return f"{_sub(e.left)} => {_sub(e.right)}"
        return f"{_sub(e.left)} {e.op} {_sub(e.right)}"
    if isinstance(e, Unary):
        if e.op.startswith("post"):
            return f"{_sub(e.operand)}{e.op[4:]}"
        if e.op.startswith("("):
            return f"{e.op}{_sub(e.operand)}"
        return f"{e.op}{_sub(e.operand)}"
    if isinstance(e, (Call, CutCall)):
        if e.name.startswith("new "):
            return f"{e.name}({_args(e.args)})"
        if e.name in ("include", "include_once", "require", "require_once", "print"):
            return f"{e.name}({_args(e.args)})"
        return f"{e.name}({_args(e.args)})"
    if isinstance(e, MethodCall):
        return f"{_sub(e.obj)}->{e.name}({_args(e.args)})"
    if isinstance(e, Prop):
        return f"{_sub(e.obj)}->{e.name}"
    if isinstance(e, Ternary):
        then = "" if e.then is None else f" {_sub(e.then)} "
        return f"{_sub(e.cond)} ?{then}: {_sub(e.other)}"
    if isinstance(e, AssignExpr):
        return f"{print_expr(e.target)} {e.op} {_sub(e.value)}"
    if isinstance(e, ArrayLit):
        return f"array({_args(e.items)})"
    raise TypeError(f"cannot print {type(e).__name__}")


def _block(body, indent: int) -> list[str]:
    lines = []
    for s in body:
        lines.extend(print_stmt(s, indent + 1))
    return lines


def print_stmt(s: Stmt, indent: int = 0) -> list[str]:
    pad = "    " * indent
    if isinstance(s, Assign):
        return [f"{pad}{print_expr(s.target)} {s.op} {print_expr(s.value)};"]
    if isinstance(s, ExprStmt):
        return [f"{pad}{print_expr(s.expr)};"]
    if isinstance(s, Echo):
        if s.keyword == "print":
            return [f"{pad}print {print_expr(s.args[0])};"]
        return [f"{pad}echo {_args(s.args)};"]
    if isinstance(s, If):
        out = [f"{pad}if ({print_expr(s.cond)}) {{", *_block(s.then, indent)]
        for ei in s.elifs:
            out.append(f"{pad}}} elseif ({print_expr(ei.cond)}) {{")
            out.extend(_block(ei.body, indent))
        if s.orelse is not None:
            out.append(f"{pad}}} else {{")
            out.extend(_block(s.orelse, indent))
        out.append(f"{pad}}}")
        return out
    if isinstance(s, While):
        return [f"{pad}while ({print_expr(s.cond)}) {{", *_block(s.body, indent), f"{pad}}}"]
    if isinstance(s, For):
        head = "; ".join(_args(part) for part in (s.init, s.cond, s.step))
        return [f"{pad}for ({head}) {{", *_block(s.body, indent), f"{pad}}}"]
    if isinstance(s, Foreach):
        kv = print_expr(s.value)
        if s.key is not None:
            kv = f"{print_expr(s.key)} => {kv}"
        return [
            f"{pad}foreach ({print_expr(s.subject)} as {kv}) {{",
            *_block(s.body, indent),
            f"{pad}}}",
        ]
    if isinstance(s, Loop):
        return [f"{pad}while (true) {{", *_block(s.body, indent), f"{pad}}}"]
    if isinstance(s, FuncDef):
        params = ", ".join(f"${p}" for p in s.params)
        return [f"{pad}function {s.name}({params}) {{", *_block(s.body, indent), f"{pad}}}"]
    if isinstance(s, Return):
        if s.value is None:
            return [f"{pad}return;"]
        return [f"{pad}return {print_expr(s.value)};"]
    if isinstance(s, Include):
        return [f"{pad}{s.keyword} {print_expr(s.expr)};"]
    if isinstance(s, InlineHTML):
        return [f"{pad}?>{s.text}<?php"]
    if isinstance(s, Opaque):
        return [f"{pad}{s.text}"]
    raise TypeError(f"cannot print {type(s).__name__}")


def print_ast(ast: Ast) -> str:
    lines = ["<?php"]
    for s in ast.statements:
        lines.extend(print_stmt(s))
    return "\n".join(lines) + "\n"
