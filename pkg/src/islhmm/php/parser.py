"""Recursive-descent parser for the supported PHP subset."""

from __future__ import annotations

import re

from .lexer import PhpSyntaxError, Tok, tokenize, unescape_dq
from .nodes import (
    ArrayLit,
    Assign,
    AssignExpr,
    Ast,
    BinOp,
    Call,
    Echo,
    ElseIf,
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

_SUPERGLOBAL = re.compile(r"^(_[A-Z_]+|HTTP_[A-Z_]+_VARS|GLOBALS)$")

ASSIGN_OPS = ("=", ".=", "+=", "-=", "*=", "/=", "%=", "??=")
INCLUDE_KEYWORDS = ("include", "include_once", "require", "require_once")
UNSUPPORTED_KEYWORDS = {
    "class",
    "abstract",
    "final",
    "interface",
    "trait",
    "enum",
    "namespace",
    "use",
    "switch",
    "try",
    "throw",
    "global",
    "static",
    "break",
    "continue",
    "unset",
    "do",
    "declare",
    "const",
    "goto",
    "list",
}

# binary operator precedence, loosest first
_BINARY_LEVELS: list[tuple[str, ...]] = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!=", "===", "!==", "<>", "<=>"),
    ("<", ">", "<=", ">="),
    ("<<", ">>"),
    ("+", "-", "."),
    ("*", "/", "%"),
]


class Unsupported(Exception):
    """Construct outside the subset; the statement becomes Opaque."""


def is_superglobal(name: str) -> bool:
    return bool(_SUPERGLOBAL.match(name))


class Parser:
    def __init__(self, toks: list[Tok], path: str = "") -> None:
        self.toks = toks
        self.i = 0
        self.path = path
        self.functions: dict[str, FuncDef] = {}

    # -- token helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at_op(self, *ops: str) -> bool:
        t = self.peek()
        return t.kind == "OP" and t.value in ops

    def at_kw(self, *kws: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "IDENT" and t.value.lower() in kws

    def error(self, msg: str, tok: Tok | None = None) -> PhpSyntaxError:
        tok = tok or self.peek()
        return PhpSyntaxError(msg, tok.line, tok.col, self.path)

    def expect_op(self, op: str) -> Tok:
        t = self.peek()
        if t.kind == "OP" and t.value == op:
            return self.next()
        found = t.value or t.kind
        raise self.error(f"expected '{op}', found '{found}'")

    def expect_kw(self, kw: str) -> Tok:
        if self.at_kw(kw):
            return self.next()
        raise self.error(f"expected '{kw}'")

    def end_statement(self) -> None:
        if self.at_op(";"):
            self.next()
            return
        if self.peek().kind in ("EOF", "HTML"):
            return
        raise self.error(f"expected ';', found '{self.peek().value or self.peek().kind}'")

    # -- statements ----------------------------------------------------------

    def parse_file(self) -> Ast:
        stmts = []
        while self.peek().kind != "EOF":
            stmts.extend(self.statement())
        return Ast(tuple(stmts), dict(self.functions), self.path)

    def statement(self) -> list[Stmt]:
        t = self.peek()
        if t.kind == "HTML":
            self.next()
            return [InlineHTML(t.value, line=t.line)]
        if t.kind == "OP" and t.value == ";":
            self.next()
            return []
        if t.kind == "OP" and t.value == "{":
            return list(self.block())
        if t.kind == "IDENT":
            kw = t.value.lower()
            if kw in UNSUPPORTED_KEYWORDS and not self._is_call_ahead():
                return [self.opaque()]
            handler = {
                "if": self.if_stmt,
                "while": self.while_stmt,
                "for": self.for_stmt,
                "foreach": self.foreach_stmt,
                "function": self.function_def,
                "return": self.return_stmt,
                "echo": self.echo_stmt,
                "print": self.echo_stmt,
            }.get(kw)
            if kw == "function" and not (
                self.peek(1).kind == "IDENT"
                or (self.peek(1).kind == "OP" and self.peek(1).value == "&")
            ):
                return [self.opaque()]
            if kw in INCLUDE_KEYWORDS:
                handler = self.include_stmt
            if handler is not None:
                start = self.i
                try:
                    return [handler()]
                except Unsupported:
                    self.i = start
                    return [self.opaque()]
            if kw in ("else", "elseif", "endif", "endwhile", "endfor", "endforeach"):
                raise self.error(f"unexpected '{t.value}'")
        start = self.i
        try:
            expr = self.expression()
            self.end_statement()
        except Unsupported:
            self.i = start
            return [self.opaque()]
        if isinstance(expr, AssignExpr):
            return [Assign(expr.target, expr.op, expr.value, line=t.line)]
        return [ExprStmt(expr, line=t.line)]

    def _is_call_ahead(self) -> bool:
        return self.peek(1).kind == "OP" and self.peek(1).value == "("

    def opaque(self) -> Opaque:
        first = self.peek()
        parts = []
        depth = 0
        while True:
            t = self.next()
            if t.kind == "EOF":
                break
            parts.append(t.value)
            if t.kind == "OP" and t.value == "{":
                depth += 1
            elif t.kind == "OP" and t.value == "}":
                depth -= 1
                if depth <= 0:
                    break
            elif t.kind == "OP" and t.value == ";" and depth == 0:
                break
        return Opaque(" ".join(parts), line=first.line)

    def block(self) -> tuple[Stmt, ...]:
        self.expect_op("{")
        out: list[Stmt] = []
        while not self.at_op("}"):
            if self.peek().kind == "EOF":
                raise self.error("unexpected end of file, expected '}'")
            out.extend(self.statement())
        self.next()
        return tuple(out)

    def body(self, *terminators: str) -> tuple[Stmt, ...]:
        """Block, single statement, or alternative (colon) syntax."""
        if self.at_op("{"):
            return self.block()
        if self.at_op(":") and terminators:
            self.next()
            out: list[Stmt] = []
            while not self.at_kw(*terminators):
                if self.peek().kind == "EOF":
                    raise self.error(f"expected '{terminators[-1]}'")
                out.extend(self.statement())
            return tuple(out)
        return tuple(self.statement())

    def paren_expr(self) -> Expr:
        self.expect_op("(")
        e = self.expression()
        self.expect_op(")")
        return e

    def if_stmt(self) -> If:
        tok = self.expect_kw("if")
        cond = self.paren_expr()
        alt = self.at_op(":")
        then = self.body("elseif", "else", "endif")
        elifs: list[ElseIf] = []
        orelse = None
        else_line = 0
        while True:
            if self.at_kw("elseif") or (self.at_kw("else") and self.at_kw("if", k=1)):
                et = self.next()
                if et.value.lower() == "else":
                    self.next()
                c = self.paren_expr()
                elifs.append(ElseIf(c, self.body("elseif", "else", "endif"), line=et.line))
                continue
            if self.at_kw("else"):
                et = self.next()
                else_line = et.line
                orelse = self.body("endif")
            break
        if alt:
            self.expect_kw("endif")
            self.end_statement()
        return If(cond, then, tuple(elifs), orelse, line=tok.line, else_line=else_line)

    def while_stmt(self) -> While:
        tok = self.expect_kw("while")
        cond = self.paren_expr()
        alt = self.at_op(":")
        body = self.body("endwhile")
        if alt:
            self.expect_kw("endwhile")
            self.end_statement()
        return While(cond, body, line=tok.line)

    def _expr_list(self, closer: str) -> tuple[Expr, ...]:
        out = []
        while not self.at_op(closer):
            out.append(self.expression())
            if not self.at_op(","):
                break
            self.next()
        return tuple(out)

    def for_stmt(self) -> For:
        tok = self.expect_kw("for")
        self.expect_op("(")
        init = self._expr_list(";")
        self.expect_op(";")
        cond = self._expr_list(";")
        self.expect_op(";")
        step = self._expr_list(")")
        self.expect_op(")")
        alt = self.at_op(":")
        body = self.body("endfor")
        if alt:
            self.expect_kw("endfor")
            self.end_statement()
        return For(init, cond, step, body, line=tok.line)

    def foreach_stmt(self) -> Foreach:
        tok = self.expect_kw("foreach")
        self.expect_op("(")
        subject = self.expression()
        self.expect_kw("as")
        if self.at_op("&"):
            self.next()
        first = self.postfix()
        key = None
        value = first
        if self.at_op("=>"):
            self.next()
            if self.at_op("&"):
                self.next()
            key, value = first, self.postfix()
        self.expect_op(")")
        alt = self.at_op(":")
        body = self.body("endforeach")
        if alt:
            self.expect_kw("endforeach")
            self.end_statement()
        return Foreach(subject, key, value, body, line=tok.line)

    def function_def(self) -> FuncDef:
        tok = self.expect_kw("function")
        if self.at_op("&"):
            self.next()
        name_tok = self.next()
        if name_tok.kind != "IDENT":
            raise self.error("expected function name", name_tok)
        self.expect_op("(")
        params = []
        while not self.at_op(")"):
            while self.peek().kind == "IDENT" or self.at_op("?"):
                self.next()  # type hints
            if self.at_op("&"):
                self.next()
            if self.at_op("..."):
                self.next()
            v = self.next()
            if v.kind != "VAR":
                raise self.error("expected parameter variable", v)
            params.append(v.value)
            if self.at_op("="):
                self.next()
                self.expression()
            if not self.at_op(","):
                break
            self.next()
        self.expect_op(")")
        if self.at_op(":"):
            self.next()
            if self.at_op("?"):
                self.next()
            self.next()
        body = self.block()
        fd = FuncDef(name_tok.value, tuple(params), body, line=tok.line)
        self.functions.setdefault(name_tok.value.lower(), fd)
        return fd

    def return_stmt(self) -> Return:
        tok = self.expect_kw("return")
        value = None
        if not self.at_op(";") and self.peek().kind not in ("EOF", "HTML"):
            value = self.expression()
        self.end_statement()
        return Return(value, line=tok.line)

    def echo_stmt(self) -> Echo:
        tok = self.next()
        kw = tok.value.lower()
        if kw == "print":
            args: tuple[Expr, ...] = (self.expression(),)
        else:
            args = tuple(self._expr_list(";"))
            if not args:
                raise self.error("echo needs an argument")
        self.end_statement()
        return Echo(args, kw, line=tok.line)

    def include_stmt(self) -> Include:
        tok = self.next()
        expr = self.expression()
        self.end_statement()
        return Include(tok.value.lower(), expr, line=tok.line)

    # -- expressions ---------------------------------------------------------

    def expression(self) -> Expr:
        return self.low_or()

    def low_or(self) -> Expr:
        left = self.low_and()
        while self.at_kw("or", "xor"):
            op = self.next().value.lower()
            left = BinOp(op, left, self.low_and(), line=left_line(left))
        return left

    def low_and(self) -> Expr:
        left = self.assignment()
        while self.at_kw("and"):
            self.next()
            left = BinOp("and", left, self.assignment(), line=left_line(left))
        return left

    def assignment(self) -> Expr:
        start = self.peek()
        left = self.ternary()
        if self.at_op(*ASSIGN_OPS):
            if not isinstance(left, (Var, Index, Superglobal, Prop)):
                raise self.error("cannot assign to this expression")
            op = self.next().value
            if self.at_op("&"):
                self.next()
            value = self.assignment()
            return AssignExpr(left, op, value, line=start.line)
        return left

    def ternary(self) -> Expr:
        start = self.peek()
        cond = self.coalesce()
        if not self.at_op("?"):
            return cond
        self.next()
        then = None
        if not self.at_op(":"):
            then = self.assignment()
        self.expect_op(":")
        other = self.assignment()
        return Ternary(cond, then, other, line=start.line)

    def coalesce(self) -> Expr:
        left = self.binary(0)
        if self.at_op("??"):
            self.next()
            return BinOp("??", left, self.coalesce(), line=left_line(left))
        return left

    def binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.binary(level + 1)
        while self.at_op(*ops):
            op = self.next().value
            right = self.binary(level + 1)
            left = BinOp(op, left, right, line=left_line(left))
        return left

    def unary(self) -> Expr:
        t = self.peek()
        if t.kind == "OP" and t.value in ("!", "-", "+", "~"):
            self.next()
            return Unary(t.value, self.unary(), line=t.line)
        if t.kind == "OP" and t.value == "@":
            self.next()
            return self.unary()
        if t.kind == "OP" and t.value in ("++", "--"):
            self.next()
            return Unary(t.value, self.unary(), line=t.line)
        if t.kind == "OP" and t.value == "&":
            self.next()
            return self.unary()
        if t.kind == "CAST":
            self.next()
            return Unary(f"({t.value})", self.unary(), line=t.line)
        if t.kind == "IDENT" and t.value.lower() == "new":
            return self.new_expr()
        if t.kind == "IDENT" and t.value.lower() == "print":
            self.next()
            return Call("print", (self.assignment(),), line=t.line)
        if t.kind == "IDENT" and t.value.lower() in INCLUDE_KEYWORDS:
            self.next()
            return Call(t.value.lower(), (self.assignment(),), line=t.line)
        return self.postfix()

    def new_expr(self) -> Expr:
        t = self.next()
        cls = self.next()
        if cls.kind != "IDENT":
            raise Unsupported("dynamic class instantiation")
        args: tuple[Expr, ...] = ()
        if self.at_op("("):
            args = self.call_args()
        return Call(f"new {cls.value}", args, line=t.line)

    def call_args(self) -> tuple[Expr, ...]:
        self.expect_op("(")
        args = []
        while not self.at_op(")"):
            if self.at_op("..."):
                self.next()
            args.append(self.expression())
            if not self.at_op(","):
                break
            self.next()
        self.expect_op(")")
        return tuple(args)

    def postfix(self) -> Expr:
        e = self.primary()
        while True:
            t = self.peek()
            if t.kind == "OP" and t.value == "[":
                self.next()
                idx = None if self.at_op("]") else self.expression()
                self.expect_op("]")
                if isinstance(e, Superglobal) and e.key is None:
                    e = Superglobal(e.name, idx, line=e.line)
                else:
                    e = Index(e, idx, line=e.line)
            elif t.kind == "OP" and t.value == "{" and isinstance(e, (Var, Index)):
                raise Unsupported("curly-brace string offset")
            elif t.kind == "OP" and t.value == "->":
                self.next()
                name = self.next()
                if name.kind != "IDENT":
                    raise Unsupported("dynamic member access")
                if self.at_op("("):
                    e = MethodCall(e, name.value, self.call_args(), line=e.line)
                else:
                    e = Prop(e, name.value, line=e.line)
            elif t.kind == "OP" and t.value in ("++", "--"):
                self.next()
                e = Unary("post" + t.value, e, line=e.line)
            elif t.kind == "OP" and t.value == "(":
                raise Unsupported("dynamic call")
            else:
                return e

    def primary(self) -> Expr:
        t = self.next()
        if t.kind == "VAR":
            if is_superglobal(t.value):
                return Superglobal(t.value, None, line=t.line)
            return Var(t.value, line=t.line)
        if t.kind == "NUM":
            return Lit(t.value, "num", line=t.line)
        if t.kind == "SQ":
            return Lit(t.value, "str", line=t.line)
        if t.kind == "DQ":
            return parse_interpolated(t.value, t.line, self.path)
        if t.kind == "OP" and t.value == "(":
            e = self.expression()
            self.expect_op(")")
            return e
        if t.kind == "OP" and t.value == "[":
            return ArrayLit(self._array_items("]"), line=t.line)
        if t.kind == "IDENT":
            low = t.value.lower()
            if low == "function" or low == "fn":
                raise Unsupported("closure")
            if low == "array" and self.at_op("("):
                self.next()
                return ArrayLit(self._array_items(")"), line=t.line)
            if low in ("exit", "die"):
                args: tuple[Expr, ...] = ()
                if self.at_op("("):
                    args = self.call_args()
                return Call(low, args, line=t.line)
            if low in ("isset", "empty") and self.at_op("("):
                return Call(low, self.call_args(), line=t.line)
            if self.at_op("::"):
                self.next()
                member = self.next()
                if member.kind == "IDENT" and self.at_op("("):
                    return Call(f"{t.value}::{member.value}", self.call_args(), line=t.line)
                raise Unsupported("static member access")
            if self.at_op("("):
                return Call(t.value, self.call_args(), line=t.line)
            return Lit(t.value, "const", line=t.line)
        if t.kind == "EOF":
            raise self.error("unexpected end of file", t)
        raise self.error(f"unexpected '{t.value}'", t)

    def _array_items(self, closer: str) -> tuple[Expr, ...]:
        items = []
        while not self.at_op(closer):
            if self.at_op("&"):
                self.next()
            item = self.expression()
            if self.at_op("=>"):
                self.next()
                if self.at_op("&"):
                    self.next()
                item = BinOp("=>", item, self.expression(), line=left_line(item))
            items.append(item)
            if not self.at_op(","):
                break
            self.next()
        self.expect_op(closer)
        return tuple(items)


def left_line(e: Expr) -> int:
    return getattr(e, "line", 0)


_SIMPLE_VAR = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_interpolated(raw: str, line: int, path: str = "") -> Expr:
    """Split a double-quoted string body into literal and variable parts."""
    parts: list[Expr] = []
    buf: list[str] = []
    i = 0

    def flush() -> None:
        if buf:
            parts.append(Lit(unescape_dq("".join(buf)), "str", line=line))
            buf.clear()

    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            buf.append(raw[i : i + 2])
            i += 2
            continue
        if ch == "{" and raw.startswith("{$", i):
            depth = 0
            j = i
            while j < len(raw):
                if raw[j] == "{":
                    depth += 1
                elif raw[j] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if j >= len(raw):
                raise PhpSyntaxError("unterminated {$...} in string", line, 1, path)
            flush()
            parts.append(parse_expression(raw[i + 1 : j], path, line))
            i = j + 1
            continue
        if ch == "$" and raw.startswith("${", i):
            m = _NAME.match(raw, i + 2)
            if m and raw.startswith("}", m.end()):
                flush()
                parts.append(Var(m.group(0), line=line))
                i = m.end() + 1
                continue
        if ch == "$":
            m = _SIMPLE_VAR.match(raw, i)
            if m:
                flush()
                name = m.group(1)
                e: Expr = (
                    Superglobal(name, None, line=line)
                    if is_superglobal(name)
                    else Var(name, line=line)
                )
                i = m.end()
                if raw.startswith("[", i):
                    close = raw.find("]", i)
                    if close != -1:
                        key_text = raw[i + 1 : close].strip()
                        key = _simple_key(key_text, line)
                        if isinstance(e, Superglobal):
                            e = Superglobal(name, key, line=line)
                        else:
                            e = Index(e, key, line=line)
                        i = close + 1
                elif raw.startswith("->", i):
                    m2 = _NAME.match(raw, i + 2)
                    if m2:
                        e = Prop(e, m2.group(0), line=line)
                        i = m2.end()
                parts.append(e)
                continue
        buf.append(ch)
        i += 1
    flush()
    if not parts:
        return Lit("", "str", line=line)
    if len(parts) == 1 and isinstance(parts[0], Lit):
        return parts[0]
    return Interp(tuple(parts), line=line)


def _simple_key(text: str, line: int) -> Expr:
    if text.startswith("$"):
        return Var(text[1:], line=line)
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return Lit(text[1:-1], "str", line=line)
    if text.isdigit():
        return Lit(text, "num", line=line)
    return Lit(text, "str", line=line)


def parse_expression(text: str, path: str = "", line: int = 1) -> Expr:
    toks = tokenize("<?php " + text, path)
    toks = [Tok(t.kind, t.value, t.line + line - 1, t.col) for t in toks]
    p = Parser(toks, path)
    e = p.expression()
    if p.peek().kind != "EOF":
        raise p.error("trailing input in expression")
    return e


def parse_file(source: str, path: str = "") -> Ast:
    """Parse PHP source into an Ast; raises PhpSyntaxError on malformed input."""
    toks = tokenize(source, path)
    return Parser(toks, path).parse_file()
