"""Normalize sugar into the forms the slicer and translator handle.

After ``desugar``: no Ternary, Interp or AssignExpr nodes remain, compound
assignments are plain ``=`` with an explicit Concat/BinOp, ``elseif`` chains
are nested Ifs, and loops are ``Loop`` nodes whose header effects are
ordinary statements.
"""

from __future__ import annotations

from dataclasses import replace

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
    Interp,
    Lit,
    Loop,
    MethodCall,
    Prop,
    Return,
    Stmt,
    Superglobal,
    Ternary,
    Unary,
    While,
)

_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%", "??=": "??"}


class _Desugarer:
    def __init__(self) -> None:
        self.hoisted: list[Stmt] = []

    # expressions return a rewritten expression; nested assignments are moved
    # into self.hoisted as statements that run before the owning statement
    def expr(self, e: Expr | None, target: Expr | None = None) -> Expr | None:
        if e is None:
            return None
        if isinstance(e, Ternary):
            branches = [b for b in (e.then if e.then is not None else e.cond, e.other)]
            parts = [self.expr(b, target) for b in branches]
            return _concat(parts, e.line)
        if isinstance(e, Interp):
            return _concat([self.expr(p, target) for p in e.parts], e.line)
        if isinstance(e, AssignExpr):
            value = self.expr(e.value, target)
            if e.op != "=":
                value = _compound(e.target, e.op, value, e.line)
            if target is not None and e.target == target:
                return value
            self.hoisted.append(Assign(self.expr(e.target), "=", value, line=e.line))
            return self.expr(e.target)
        if isinstance(e, BinOp):
            left = self.expr(e.left, target)
            right = self.expr(e.right, target)
            if e.op == ".":
                return _concat([left, right], e.line)
            return BinOp(e.op, left, right, line=e.line)
        if isinstance(e, Concat):
            return _concat([self.expr(p, target) for p in e.parts], e.line)
        if isinstance(e, Unary):
            return Unary(e.op, self.expr(e.operand, target), line=e.line)
        if isinstance(e, Call):
            return Call(e.name, tuple(self.expr(a, target) for a in e.args), line=e.line)
        if isinstance(e, CutCall):
            return CutCall(e.name, tuple(self.expr(a, target) for a in e.args), line=e.line)
        if isinstance(e, MethodCall):
            return MethodCall(
                self.expr(e.obj, target),
                e.name,
                tuple(self.expr(a, target) for a in e.args),
                line=e.line,
            )
        if isinstance(e, Prop):
            return Prop(self.expr(e.obj, target), e.name, line=e.line)
        if isinstance(e, Index):
            return Index(self.expr(e.base, target), self.expr(e.index, target), line=e.line)
        if isinstance(e, Superglobal):
            return Superglobal(e.name, self.expr(e.key, target), line=e.line)
        if isinstance(e, ArrayLit):
            return ArrayLit(tuple(self.expr(i, target) for i in e.items), line=e.line)
        return e

    def take(self) -> list[Stmt]:
        out, self.hoisted = self.hoisted, []
        return out

    def stmts(self, body) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        for s in body:
            out.extend(self.stmt(s))
        return tuple(out)

    def stmt(self, s: Stmt) -> list[Stmt]:
        if isinstance(s, Assign):
            target = self.expr(s.target)
            value = self.expr(s.value, target)
            if s.op != "=":
                value = _compound(target, s.op, value, s.line)
            return [*self.take(), Assign(target, "=", value, line=s.line)]
        if isinstance(s, ExprStmt):
            e = self.expr(s.expr)
            pre = self.take()
            if isinstance(s.expr, AssignExpr):
                # a bare nested assignment left only its target behind
                return pre
            return [*pre, ExprStmt(e, line=s.line)]
        if isinstance(s, Echo):
            args = tuple(self.expr(a) for a in s.args)
            return [*self.take(), Echo(args, s.keyword, line=s.line)]
        if isinstance(s, Return):
            v = self.expr(s.value)
            return [*self.take(), Return(v, line=s.line)]
        if isinstance(s, Include):
            e = self.expr(s.expr)
            return [*self.take(), Include(s.keyword, e, line=s.line)]
        if isinstance(s, If):
            return self.if_stmt(s)
        if isinstance(s, While):
            cond = self.expr(s.cond)
            head = self.take()
            body = self.stmts(s.body)
            return [Loop("while", (*head, *_as_effects(cond, s.line), *body), line=s.line)]
        if isinstance(s, For):
            init: list[Stmt] = []
            for e in s.init:
                init.extend(self.stmt(ExprStmt(e, line=s.line)))
            conds: list[Stmt] = []
            for e in s.cond:
                conds.extend(self.stmt(ExprStmt(e, line=s.line)))
            steps: list[Stmt] = []
            for e in s.step:
                steps.extend(self.stmt(ExprStmt(e, line=s.line)))
            body = self.stmts(s.body)
            return [*init, Loop("for", (*conds, *body, *steps), line=s.line)]
        if isinstance(s, Foreach):
            subject = self.expr(s.subject)
            pre = self.take()
            header: list[Stmt] = []
            if s.key is not None:
                header.append(Assign(self.expr(s.key), "=", subject, line=s.line))
            header.append(Assign(self.expr(s.value), "=", subject, line=s.line))
            body = self.stmts(s.body)
            return [*pre, Loop("foreach", (*header, *body), line=s.line)]
        if isinstance(s, Loop):
            return [Loop(s.kind, self.stmts(s.body), line=s.line)]
        if isinstance(s, FuncDef):
            return [FuncDef(s.name, s.params, self.stmts(s.body), line=s.line)]
        return [s]

    def if_stmt(self, s: If) -> list[Stmt]:
        cond = self.expr(s.cond)
        pre = self.take()
        then = self.stmts(s.then)
        orelse = None if s.orelse is None else self.stmts(s.orelse)
        else_line = s.else_line
        for ei in reversed(s.elifs):
            inner = self.if_stmt(
                If(ei.cond, ei.body, (), orelse, line=ei.line, else_line=else_line)
            )
            orelse = tuple(inner)
            else_line = ei.line
        return [*pre, If(cond, then, (), orelse, line=s.line, else_line=else_line)]


def _as_effects(cond: Expr, line: int) -> list[Stmt]:
    return []


def _compound(target: Expr, op: str, value: Expr, line: int) -> Expr:
    if op == ".=":
        return _concat([target, value], line)
    return BinOp(_COMPOUND.get(op, op.rstrip("=")), target, value, line=line)


def _concat(parts, line: int) -> Expr:
    flat: list[Expr] = []
    for p in parts:
        if p is None:
            continue
        if isinstance(p, Concat):
            flat.extend(p.parts)
        else:
            flat.append(p)
    merged: list[Expr] = []
    for p in flat:
        if (
            merged
            and isinstance(p, Lit)
            and p.kind == "str"
            and isinstance(merged[-1], Lit)
            and merged[-1].kind == "str"
        ):
            merged[-1] = Lit(merged[-1].value + p.value, "str", line=merged[-1].line)
        else:
            merged.append(p)
    if len(merged) == 1:
        return merged[0]
    return Concat(tuple(merged), line=line)


def desugar(ast: Ast) -> Ast:
    d = _Desugarer()
    stmts = d.stmts(ast.statements)
    functions = {}
    for name, fd in ast.functions.items():
        functions[name] = FuncDef(fd.name, fd.params, d.stmts(fd.body), line=fd.line)
    return replace(ast, statements=stmts, functions=functions)


def is_desugared(ast: Ast) -> bool:
    """True when no sugar nodes remain anywhere in the tree."""
    from .nodes import iter_exprs

    def bad_expr(e: Expr | None) -> bool:
        if e is None:
            return False
        return any(isinstance(x, (Ternary, Interp, AssignExpr)) for x in iter_exprs(e))

    def bad(body) -> bool:
        for s in body:
            if isinstance(s, Assign) and (s.op != "=" or bad_expr(s.value) or bad_expr(s.target)):
                return True
            if isinstance(s, ExprStmt) and bad_expr(s.expr):
                return True
            if isinstance(s, Echo) and any(bad_expr(a) for a in s.args):
                return True
            if isinstance(s, (Return,)) and bad_expr(s.value):
                return True
            if isinstance(s, Include) and bad_expr(s.expr):
                return True
            if isinstance(s, If):
                if s.elifs or bad_expr(s.cond) or bad(s.then) or bad(s.orelse or ()):
                    return True
            if isinstance(s, (While, For, Foreach)):
                return True
            if isinstance(s, (Loop, FuncDef)) and bad(s.body):
                return True
        return False

    return not bad(ast.statements) and not any(bad(f.body) for f in ast.functions.values())
