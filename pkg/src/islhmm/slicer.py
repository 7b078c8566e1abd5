"""Entry-point to sink slice extraction.

The program is first flattened by inlining user function calls and literal
includes. For every sink, each acyclic path through the statements before it
is enumerated; a forward pass marks which variables carry input-derived data
and a backward pass keeps only the definitions and branch headers that feed
the sink.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .isl import Token, TokenConfig
from .php.desugar import desugar
from .php.lexer import PhpSyntaxError
from .php.nodes import (
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
    FuncDef,
    If,
    Include,
    Index,
    Lit,
    Loop,
    MethodCall,
    Opaque,
    Prop,
    Return,
    Stmt,
    Superglobal,
    Unary,
    Var,
    base_name,
    iter_exprs,
)
from .php.parser import parse_file
from .slices import Slice, SliceStep
from .translator import TranslationError, Translator

log = logging.getLogger(__name__)

DEFAULT_PATH_CAP = 64
DEFAULT_INLINE_DEPTH = 3


@dataclass
class SliceOptions:
    path_cap: int = DEFAULT_PATH_CAP
    inline_depth: int = DEFAULT_INLINE_DEPTH
    classes: tuple[str, ...] = ()  # empty means every configured class
    root: Path | None = None


# ---------------------------------------------------------------------------
# inlining


def _rename_expr(e: Expr | None, prefix: str) -> Expr | None:
    if e is None:
        return None
    if isinstance(e, Var):
        return Var(prefix + e.name, line=e.line)
    if isinstance(e, Index):
        return Index(_rename_expr(e.base, prefix), _rename_expr(e.index, prefix), line=e.line)
    if isinstance(e, Prop):
        return Prop(_rename_expr(e.obj, prefix), e.name, line=e.line)
    if isinstance(e, Superglobal):
        return Superglobal(e.name, _rename_expr(e.key, prefix), line=e.line)
    if isinstance(e, Concat):
        return Concat(tuple(_rename_expr(p, prefix) for p in e.parts), line=e.line)
    if isinstance(e, BinOp):
        return BinOp(e.op, _rename_expr(e.left, prefix), _rename_expr(e.right, prefix), line=e.line)
    if isinstance(e, Unary):
        return Unary(e.op, _rename_expr(e.operand, prefix), line=e.line)
    if isinstance(e, Call):
        return Call(e.name, tuple(_rename_expr(a, prefix) for a in e.args), line=e.line)
    if isinstance(e, CutCall):
        return CutCall(e.name, tuple(_rename_expr(a, prefix) for a in e.args), line=e.line)
    if isinstance(e, MethodCall):
        return MethodCall(
            _rename_expr(e.obj, prefix),
            e.name,
            tuple(_rename_expr(a, prefix) for a in e.args),
            line=e.line,
        )
    if isinstance(e, ArrayLit):
        return ArrayLit(tuple(_rename_expr(i, prefix) for i in e.items), line=e.line)
    if isinstance(e, AssignExpr):
        return AssignExpr(
            _rename_expr(e.target, prefix), e.op, _rename_expr(e.value, prefix), line=e.line
        )
    return e


def _rename_body(body, prefix: str) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    for s in body:
        if isinstance(s, Assign):
            out.append(
                Assign(_rename_expr(s.target, prefix), s.op, _rename_expr(s.value, prefix), line=s.line)
            )
        elif isinstance(s, ExprStmt):
            out.append(ExprStmt(_rename_expr(s.expr, prefix), line=s.line))
        elif isinstance(s, Echo):
            out.append(Echo(tuple(_rename_expr(a, prefix) for a in s.args), s.keyword, line=s.line))
        elif isinstance(s, Include):
            out.append(Include(s.keyword, _rename_expr(s.expr, prefix), line=s.line))
        elif isinstance(s, Return):
            value = _rename_expr(s.value, prefix)
            if value is not None:
                out.append(Assign(Var(prefix + "return", line=s.line), "=", value, line=s.line))
        elif isinstance(s, If):
            out.append(
                If(
                    _rename_expr(s.cond, prefix),
                    _rename_body(s.then, prefix),
                    (),
                    None if s.orelse is None else _rename_body(s.orelse, prefix),
                    line=s.line,
                    else_line=s.else_line,
                )
            )
        elif isinstance(s, Loop):
            out.append(Loop(s.kind, _rename_body(s.body, prefix), line=s.line))
        elif isinstance(s, FuncDef):
            continue
        else:
            out.append(s)
    return tuple(out)


class _Inliner:
    def __init__(self, functions: dict[str, FuncDef], depth: int, diagnostics: list[str], path: str):
        self.functions = functions
        self.depth = depth
        self.instances: dict[str, int] = {}
        self.diagnostics = diagnostics
        self.path = path

    def prefix_for(self, name: str) -> str:
        n = self.instances.get(name, 0) + 1
        self.instances[name] = n
        return f"{name}." if n == 1 else f"{name}#{n}."

    def expr(self, e: Expr | None, depth: int, pre: list[Stmt]) -> Expr | None:
        """Rewrite user calls inside ``e``; their bodies are appended to ``pre``."""
        if e is None:
            return None
        if isinstance(e, Call):
            args = tuple(self.expr(a, depth, pre) for a in e.args)
            fd = self.functions.get(e.name.lower())
            if fd is None:
                return Call(e.name, args, line=e.line)
            if depth <= 0:
                self.diagnostics.append(
                    f"{self.path}:{e.line}: inlining of {e.name} cut at depth {self.depth}"
                )
                return CutCall(e.name, args, line=e.line)
            prefix = self.prefix_for(fd.name)
            for i, param in enumerate(fd.params):
                value = args[i] if i < len(args) else Lit("", "const", line=e.line)
                pre.append(Assign(Var(prefix + param, line=e.line), "=", value, line=e.line))
            body = _rename_body(fd.body, prefix)
            pre.extend(self.stmts(body, depth - 1))
            return Var(prefix + "return", line=e.line)
        if isinstance(e, Concat):
            return Concat(tuple(self.expr(p, depth, pre) for p in e.parts), line=e.line)
        if isinstance(e, BinOp):
            return BinOp(e.op, self.expr(e.left, depth, pre), self.expr(e.right, depth, pre), line=e.line)
        if isinstance(e, Unary):
            return Unary(e.op, self.expr(e.operand, depth, pre), line=e.line)
        if isinstance(e, MethodCall):
            return MethodCall(
                self.expr(e.obj, depth, pre),
                e.name,
                tuple(self.expr(a, depth, pre) for a in e.args),
                line=e.line,
            )
        if isinstance(e, CutCall):
            return CutCall(e.name, tuple(self.expr(a, depth, pre) for a in e.args), line=e.line)
        if isinstance(e, Index):
            return Index(self.expr(e.base, depth, pre), self.expr(e.index, depth, pre), line=e.line)
        if isinstance(e, Prop):
            return Prop(self.expr(e.obj, depth, pre), e.name, line=e.line)
        if isinstance(e, Superglobal):
            return Superglobal(e.name, self.expr(e.key, depth, pre), line=e.line)
        if isinstance(e, ArrayLit):
            return ArrayLit(tuple(self.expr(i, depth, pre) for i in e.items), line=e.line)
        return e

    def stmts(self, body, depth: int) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        for s in body:
            pre: list[Stmt] = []
            if isinstance(s, Assign):
                value = self.expr(s.value, depth, pre)
                out.extend(pre)
                out.append(Assign(s.target, s.op, value, line=s.line))
            elif isinstance(s, ExprStmt):
                e = self.expr(s.expr, depth, pre)
                out.extend(pre)
                if not isinstance(e, Var):
                    out.append(ExprStmt(e, line=s.line))
            elif isinstance(s, Echo):
                args = tuple(self.expr(a, depth, pre) for a in s.args)
                out.extend(pre)
                out.append(Echo(args, s.keyword, line=s.line))
            elif isinstance(s, Include):
                e = self.expr(s.expr, depth, pre)
                out.extend(pre)
                out.append(Include(s.keyword, e, line=s.line))
            elif isinstance(s, Return):
                e = self.expr(s.value, depth, pre)
                out.extend(pre)
                out.append(Return(e, line=s.line))
            elif isinstance(s, If):
                cond = self.expr(s.cond, depth, pre)
                out.extend(pre)
                out.append(
                    If(
                        cond,
                        self.stmts(s.then, depth),
                        (),
                        None if s.orelse is None else self.stmts(s.orelse, depth),
                        line=s.line,
                        else_line=s.else_line,
                    )
                )
            elif isinstance(s, Loop):
                out.append(Loop(s.kind, self.stmts(s.body, depth), line=s.line))
            elif isinstance(s, FuncDef):
                continue
            else:
                out.append(s)
        return tuple(out)


def inline_calls(
    statements,
    functions: dict[str, FuncDef],
    depth: int = DEFAULT_INLINE_DEPTH,
    diagnostics: list[str] | None = None,
    path: str = "",
) -> tuple[Stmt, ...]:
    """Splice user function bodies into the statement list.

    Parameters become assignments from the arguments, callee variables are
    prefixed with the function name (``f.x``, then ``f#2.x`` for the second
    inlined instance) and ``return v`` becomes ``f.return = v``. Calls still
    pending when ``depth`` runs out become ``CutCall`` markers.
    """
    diags = diagnostics if diagnostics is not None else []
    return _Inliner(functions, depth, diags, path).stmts(statements, depth)


# ---------------------------------------------------------------------------
# includes


def resolve_includes(
    ast: Ast, root: Path | None, diagnostics: list[str], _seen: frozenset[str] = frozenset()
) -> Ast:
    """Splice files named by literal include paths; others stay as statements."""
    functions = dict(ast.functions)
    here = Path(ast.path).parent if ast.path else None
    seen = _seen | {str(Path(ast.path).resolve())} if ast.path else _seen

    def walk(body) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        for s in body:
            if isinstance(s, Include):
                target = _literal_path(s.expr)
                if target is None:
                    diagnostics.append(f"{ast.path}:{s.line}: include with a computed path not followed")
                    out.append(s)
                    continue
                found = None
                for base in (root, here):
                    if base is not None and (base / target).is_file():
                        found = (base / target).resolve()
                        break
                if found is None:
                    diagnostics.append(f"{ast.path}:{s.line}: included file {target} not found")
                    out.append(s)
                    continue
                if str(found) in seen:
                    diagnostics.append(f"{ast.path}:{s.line}: include cycle through {target}")
                    continue
                try:
                    sub = desugar(parse_file(found.read_text(encoding="utf-8"), str(found)))
                except (PhpSyntaxError, OSError, UnicodeDecodeError) as exc:
                    diagnostics.append(f"{ast.path}:{s.line}: cannot include {target}: {exc}")
                    continue
                sub = resolve_includes(sub, root, diagnostics, seen)
                for name, fd in sub.functions.items():
                    functions.setdefault(name, fd)
                out.extend(sub.statements)
            elif isinstance(s, If):
                out.append(
                    If(
                        s.cond,
                        walk(s.then),
                        (),
                        None if s.orelse is None else walk(s.orelse),
                        line=s.line,
                        else_line=s.else_line,
                    )
                )
            elif isinstance(s, Loop):
                out.append(Loop(s.kind, walk(s.body), line=s.line))
            else:
                out.append(s)
        return tuple(out)

    return replace(ast, statements=walk(ast.statements), functions=functions)


def _literal_path(e: Expr) -> str | None:
    if isinstance(e, Lit) and e.kind == "str":
        return e.value
    if isinstance(e, Concat) and all(isinstance(p, Lit) and p.kind == "str" for p in e.parts):
        return "".join(p.value for p in e.parts)
    return None


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class _Elem:
    stmt: Stmt
    role: str  # stmt | if | else
    pos: tuple
    scopes: tuple  # ((if_pos, "then"|"else"), ...) from outermost
    in_loop: int = 0  # line of the innermost enclosing loop, 0 if none

    @property
    def line(self) -> int:
        if self.role == "else":
            return self.stmt.else_line or self.stmt.line
        return self.stmt.line


class PathOverflow(Exception):
    pass


def _has_assignment(body) -> bool:
    for s in body:
        if isinstance(s, Assign):
            return True
        if isinstance(s, If) and (_has_assignment(s.then) or _has_assignment(s.orelse or ())):
            return True
        if isinstance(s, Loop) and _has_assignment(s.body):
            return True
    return False


def _product(parts: list[list[list[_Elem]]], cap: int) -> list[list[_Elem]]:
    out: list[list[_Elem]] = [[]]
    for alternatives in parts:
        nxt = []
        for prefix, alt in itertools.product(out, alternatives):
            nxt.append(prefix + alt)
            if len(nxt) > cap:
                break
        out = nxt
    return out


class _Paths:
    def __init__(self, cap: int) -> None:
        self.cap = cap

    def expand(self, s: Stmt, pos: tuple, scopes: tuple, loop: int) -> list[list[_Elem]]:
        if isinstance(s, (Assign, Echo, ExprStmt, Include)):
            return [[_Elem(s, "stmt", pos, scopes, loop)]]
        if isinstance(s, If):
            if not _has_assignment(s.then) and not _has_assignment(s.orelse or ()):
                return [[]]
            then_scope = scopes + ((pos, "then"),)
            else_scope = scopes + ((pos, "else"),)
            head = [_Elem(s, "if", pos, scopes, loop)]
            then_alts = [head + alt for alt in self.body(s.then, pos + ("then",), then_scope, loop)]
            marker = head + [_Elem(s, "else", pos, scopes, loop)]
            else_alts = [
                marker + alt for alt in self.body(s.orelse or (), pos + ("else",), else_scope, loop)
            ]
            return then_alts + else_alts
        if isinstance(s, Loop):
            return self.body(s.body, pos + ("loop",), scopes, s.line)
        return [[]]

    def body(self, stmts, pos: tuple, scopes: tuple, loop: int) -> list[list[_Elem]]:
        parts = [self.expand(s, pos + (i,), scopes, loop) for i, s in enumerate(stmts)]
        return _product(parts, self.cap)

    def to(self, stmts, target: tuple, pos: tuple = (), scopes: tuple = (), loop: int = 0):
        """Paths from the start of ``stmts`` ending at the statement at ``target``."""
        i = target[0]
        parts = [self.expand(s, pos + (j,), scopes, loop) for j, s in enumerate(stmts[:i])]
        s = stmts[i]
        here = pos + (i,)
        if len(target) == 1:
            parts.append([[_Elem(s, "stmt", here, scopes, loop)]])
        elif isinstance(s, If):
            branch = target[1]
            inner_scopes = scopes + ((here, branch),)
            if branch == "then":
                tails = [
                    [_Elem(s, "if", here, scopes, loop)] + t
                    for t in self.to(s.then, target[2:], here + ("then",), inner_scopes, loop)
                ]
            else:
                tails = [
                    [_Elem(s, "if", here, scopes, loop), _Elem(s, "else", here, scopes, loop)] + t
                    for t in self.to(s.orelse, target[2:], here + ("else",), inner_scopes, loop)
                ]
            parts.append(tails)
        elif isinstance(s, Loop):
            parts.append(self.to(s.body, target[2:], here + ("loop",), scopes, s.line))
        else:
            raise AssertionError("bad statement position")
        return _product(parts, self.cap)


# ---------------------------------------------------------------------------
# taint


@dataclass(frozen=True)
class _Site:
    """One sink occurrence inside a statement."""

    name: str
    args: tuple[Expr, ...]


def _sink_sites(s: Stmt, config: TokenConfig) -> list[_Site]:
    sites: list[_Site] = []
    exprs: list[Expr] = []
    if isinstance(s, Echo):
        if config.sink_classes(s.keyword):
            sites.append(_Site(s.keyword, s.args))
        exprs.extend(s.args)
    elif isinstance(s, Include):
        if config.sink_classes(s.keyword):
            sites.append(_Site(s.keyword, (s.expr,)))
        exprs.append(s.expr)
    elif isinstance(s, Assign):
        exprs.append(s.value)
    elif isinstance(s, ExprStmt):
        exprs.append(s.expr)
    for root in exprs:
        for e in iter_exprs(root):
            if isinstance(e, Call) and config.sink_classes(e.name):
                sites.append(_Site(e.name, e.args))
            elif isinstance(e, MethodCall):
                for cls in ("mysqli", "mysqli_stmt"):
                    q = f"{cls}::{e.name}"
                    if config.sink_classes(q):
                        sites.append(_Site(q, e.args))
                        break
    return sites


class _Taint:
    """Reads are taken from the translation itself, so a variable counts only
    where it would show up as a token (argument positions a call ignores do
    not carry data)."""

    def __init__(self, config: TokenConfig) -> None:
        self.config = config
        self.tr = Translator(config)

    @staticmethod
    def _scan(pairs, tainted: set[str]) -> tuple[bool, set[str]]:
        hit = False
        names: set[str] = set()
        for tok, name in pairs:
            if tok is Token.INPUT:
                hit = True
            elif tok is Token.VAR and name in tainted:
                hit = True
                names.add(name)
        return hit, names

    def tainted_reads(self, e: Expr | None, tainted: set[str]) -> tuple[bool, set[str]]:
        """(reads any input-derived data, tainted variable names read)."""
        try:
            return self._scan(self.tr.value(e), tainted)
        except TranslationError:
            return False, set()

    def site_reads(self, site: _Site, tainted: set[str]) -> tuple[bool, set[str]]:
        chosen = self.config.arg_spec(site.name).select(len(site.args))
        hit, names = False, set()
        for i in chosen:
            h, n = self.tainted_reads(site.args[i], tainted)
            hit |= h
            names |= n
        return hit, names

    def validates(self, cond: Expr, tainted: set[str]) -> tuple[bool, set[str]]:
        """Whether a condition applies some configured call to tracked data."""
        try:
            return self._scan(self.tr.condition(cond), tainted)
        except TranslationError:
            return False, set()


def _strong(target: Expr) -> bool:
    return isinstance(target, (Var, Superglobal))


def _slice_path(path: list[_Elem], site: _Site, taint: _Taint):
    """Return the kept elements (with guard flags) or None when no input flows."""
    before: list[set[str]] = []
    tainted: set[str] = set()
    defines: list[bool] = []
    for el in path[:-1]:
        before.append(set(tainted))
        flows = False
        if el.role == "stmt" and isinstance(el.stmt, Assign):
            name = base_name(el.stmt.target)
            flows, _ = taint.tainted_reads(el.stmt.value, tainted)
            if name is not None:
                if flows:
                    tainted.add(name)
                elif _strong(el.stmt.target):
                    tainted.discard(name)
        defines.append(flows)
    hit, relevant = taint.site_reads(site, tainted)
    if not hit:
        return None

    keep = [False] * len(path)
    keep[-1] = True
    sink = path[-1]
    # scopes that contain a kept element
    live_scopes: set = set(sink.scopes)
    headers_kept: set = set()
    for k in range(len(path) - 2, -1, -1):
        el = path[k]
        if el.role == "stmt":
            if not isinstance(el.stmt, Assign) or not defines[k]:
                if isinstance(el.stmt, Assign) and _strong(el.stmt.target):
                    relevant.discard(base_name(el.stmt.target))
                continue
            name = base_name(el.stmt.target)
            if name not in relevant:
                continue
            keep[k] = True
            live_scopes.update(el.scopes)
            if _strong(el.stmt.target):
                relevant.discard(name)
            _, names = taint.tainted_reads(el.stmt.value, before[k])
            relevant |= names
        elif el.role == "else":
            if (el.pos, "else") in live_scopes:
                keep[k] = True
        elif el.role == "if":
            then_live = (el.pos, "then") in live_scopes
            else_taken = k + 1 < len(path) and path[k + 1].role == "else" and path[k + 1].pos == el.pos
            else_live = else_taken and keep[k + 1]
            if not (then_live or else_live):
                continue
            ok, names = taint.validates(el.stmt.cond, before[k])
            if not ok:
                continue
            keep[k] = True
            live_scopes.update(el.scopes)
            if then_live:
                headers_kept.add(el.pos)
                relevant |= names
    # an else marker only makes sense behind its header
    for k, el in enumerate(path):
        if el.role == "else" and keep[k]:
            if not any(keep[j] and path[j].role == "if" and path[j].pos == el.pos for j in range(k)):
                keep[k] = False
    kept = []
    for k, el in enumerate(path):
        if not keep[k]:
            continue
        guarded = el.role == "stmt" and any(
            branch == "then" and p in headers_kept for p, branch in el.scopes
        )
        kept.append((el, guarded))
    return kept


# ---------------------------------------------------------------------------
# extraction


def _sink_positions(stmts, config: TokenConfig, pos: tuple = ()):
    for i, s in enumerate(stmts):
        here = pos + (i,)
        if isinstance(s, If):
            yield from _sink_positions(s.then, config, here + ("then",))
            if s.orelse is not None:
                yield from _sink_positions(s.orelse, config, here + ("else",))
        elif isinstance(s, Loop):
            yield from _sink_positions(s.body, config, here + ("loop",))
        elif _sink_sites(s, config):
            yield here, s


def _opaque_lines(stmts):
    for s in stmts:
        if isinstance(s, Opaque):
            yield s.line
        elif isinstance(s, If):
            yield from _opaque_lines(s.then)
            yield from _opaque_lines(s.orelse or ())
        elif isinstance(s, (Loop, FuncDef)):
            yield from _opaque_lines(s.body)


@dataclass
class Extraction:
    slices: list[Slice] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def extract(ast: Ast, config: TokenConfig, options: SliceOptions | None = None) -> Extraction:
    """Slices of a desugared Ast plus diagnostics."""
    opts = options or SliceOptions()
    diags: list[str] = []
    for line in _opaque_lines(ast.statements):
        diags.append(f"{ast.path}:{line}: unsupported construct skipped")
    resolved = resolve_includes(ast, opts.root, diags)
    stmts = inline_calls(
        resolved.statements, resolved.functions, opts.inline_depth, diags, ast.path
    )
    taint = _Taint(config)
    paths = _Paths(opts.path_cap)
    result: list[Slice] = []
    for target, stmt in _sink_positions(stmts, config):
        all_paths = paths.to(stmts, target)
        if len(all_paths) > opts.path_cap:
            diags.append(
                f"{ast.path}:{stmt.line}: more than {opts.path_cap} paths to this sink, "
                f"keeping the first {opts.path_cap}"
            )
            all_paths = all_paths[: opts.path_cap]
        seen: set = set()
        index = 0
        for site in _sink_sites(stmt, config):
            classes = [
                c for c in config.sink_classes(site.name) if not opts.classes or c in opts.classes
            ]
            if not classes:
                continue
            for path in all_paths:
                kept = _slice_path(path, site, taint)
                if kept is None:
                    continue
                key = tuple((el.pos, el.role, g) for el, g in kept)
                steps = tuple(SliceStep(el.stmt, el.line, el.role, g) for el, g in kept)
                branches = tuple(
                    f"{el.stmt.line}:{'else' if el.role == 'else' else 'then'}"
                    for el, _ in kept
                    if el.role in ("if", "else")
                    and not (el.role == "if" and any(o.role == "else" and o.pos == el.pos for o, _ in kept))
                )
                loops = sorted({el.in_loop for el, _ in kept if el.in_loop})
                notes = tuple(f"loop at line {ln} traversed once" for ln in loops)
                entry = _entry_line(kept, taint)
                for c in classes:
                    if (key, c) in seen:
                        continue
                    seen.add((key, c))
                    result.append(
                        Slice(
                            steps=steps,
                            sink_class=c,
                            origin=ast.path,
                            entry_line=entry,
                            sink_line=stmt.line,
                            path_index=index,
                            branches=branches,
                            notes=notes,
                        )
                    )
                    index += 1
    return Extraction(result, diags)


def _entry_line(kept, taint: _Taint) -> int:
    for el, _ in kept:
        exprs: list[Expr] = []
        s = el.stmt
        if el.role == "if":
            exprs.append(s.cond)
        elif el.role == "stmt":
            if isinstance(s, Assign):
                exprs.append(s.value)
            elif isinstance(s, Echo):
                exprs.extend(s.args)
            elif isinstance(s, Include):
                exprs.append(s.expr)
            elif isinstance(s, ExprStmt):
                exprs.append(s.expr)
        for e in exprs:
            for x in iter_exprs(e):
                if isinstance(x, CutCall) or (
                    isinstance(x, Superglobal) and taint.config.is_input(x.name)
                ):
                    return el.line
    return kept[0][0].line if kept else 0


def extract_slices(ast: Ast, config: TokenConfig, options: SliceOptions | None = None) -> list[Slice]:
    for d in (ex := extract(ast, config, options)).diagnostics:
        log.warning("%s", d)
    return ex.slices


__all__ = [
    "DEFAULT_INLINE_DEPTH",
    "DEFAULT_PATH_CAP",
    "Extraction",
    "SliceOptions",
    "extract",
    "extract_slices",
    "inline_calls",
    "resolve_includes",
]
