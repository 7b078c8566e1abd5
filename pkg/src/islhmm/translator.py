"""Statement to ISL translation."""

from __future__ import annotations

from .isl import (
    IslInstruction,
    SliceIsl,
    SourceLoc,
    Token,
    TokenConfig,
    validate_sequence,
)
from .php.nodes import (
    ArrayLit,
    Assign,
    BinOp,
    Call,
    Concat,
    CutCall,
    Echo,
    Expr,
    ExprStmt,
    If,
    Include,
    Index,
    Lit,
    Loop,
    MethodCall,
    Prop,
    Stmt,
    Superglobal,
    Unary,
    Var,
    base_name,
)
from .slices import Slice, SliceStep

Pairs = list[tuple[Token, str]]

_NO_NAME = "-"
_METHOD_CLASSES = ("mysqli", "mysqli_stmt")


class TranslationError(ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(message)
        self.line = line


def _join(groups) -> Pairs:
    out: Pairs = []
    for g in groups:
        if not g:
            continue
        if out:
            out.append((Token.CONC, _NO_NAME))
        out.extend(g)
    return out


def _int_literal(e: Expr | None) -> int | None:
    if isinstance(e, Lit) and e.kind == "num":
        try:
            return int(e.value, 0)
        except ValueError:
            try:
                return int(float(e.value))
            except ValueError:
                return None
    return None


class Translator:
    def __init__(self, config: TokenConfig) -> None:
        self.config = config

    # -- expressions in value position -------------------------------------

    def value(self, e: Expr | None) -> Pairs:
        if e is None or isinstance(e, Lit):
            return []
        if isinstance(e, Var):
            return [(Token.VAR, e.name)]
        if isinstance(e, Superglobal):
            if self.config.is_input(e.name):
                return [(Token.INPUT, _NO_NAME)]
            return [(Token.VAR, e.name)]
        if isinstance(e, (Index, Prop)):
            name = base_name(e)
            if name is None:
                inner = e.base if isinstance(e, Index) else e.obj
                return self.value(inner)
            if isinstance(e, Index):
                root = e
                while isinstance(root, (Index, Prop)):
                    root = root.base if isinstance(root, Index) else root.obj
                if isinstance(root, Superglobal):
                    return self.value(root)
            return [(Token.VAR, name)]
        if isinstance(e, Concat):
            return _join(self.value(p) for p in e.parts)
        if isinstance(e, BinOp):
            return _join([self.value(e.left), self.value(e.right)])
        if isinstance(e, Unary):
            return self.value(e.operand)
        if isinstance(e, ArrayLit):
            return _join(self.value(i) for i in e.items)
        if isinstance(e, CutCall):
            return [(Token.INPUT, _NO_NAME)]
        if isinstance(e, Call):
            return self.call(e.name, e.args, self.config.token_for(e.name))
        if isinstance(e, MethodCall):
            name, token = self.method(e.name)
            if token is None:
                return _join([self.value(e.obj), *(self.value(a) for a in e.args)])
            return self.call(name, e.args, token)
        raise TranslationError(f"cannot translate {type(e).__name__}", e.line)

    def method(self, name: str) -> tuple[str, Token | None]:
        for cls in _METHOD_CLASSES:
            qualified = f"{cls}::{name}"
            token = self.config.token_for(qualified)
            if token is not None:
                return qualified, token
        return name, None

    def call(self, name: str, args, token: Token | None) -> Pairs:
        if token is None:
            return _join(self.value(a) for a in args)
        if token is Token.SUB_STR:
            return self._sub_str(args)
        if token is Token.ADD_STR:
            return self._add_str(args)
        if token is Token.SUB_STR_REPLACE:
            return self._sub_str_replace(args)
        chosen = self.config.arg_spec(name).select(len(args))
        inner = _join(self.value(args[i]) for i in chosen)
        if not inner:
            return []
        return [(token, _NO_NAME), *inner]

    def _length_token(self, e: Expr | None) -> Token:
        n = _int_literal(e)
        if n is not None and n < 0:
            n = None
        return self.config.num_chars(n)

    def _sub_str(self, args) -> Pairs:
        subject = self.value(args[0]) if args else []
        if not subject:
            return []
        out: Pairs = [(Token.SUB_STR, _NO_NAME), *subject]
        out.append((self._length_token(args[2] if len(args) > 2 else None), _NO_NAME))
        if len(args) > 1:
            out.append((Token.START_WHERE, _NO_NAME))
        return out

    def _add_str(self, args) -> Pairs:
        subject = self.value(args[0]) if args else []
        pad = self.value(args[2]) if len(args) > 2 else []
        if not subject and not pad:
            return []
        if not subject:
            subject, pad = pad, []
        out: Pairs = [(Token.ADD_STR, _NO_NAME), *subject]
        if len(args) > 1:
            length = _int_literal(args[1])
            out.append((self.config.num_chars(length), _NO_NAME))
        else:
            out.append((Token.CHAR6, _NO_NAME))
        out.extend(pad)
        return out

    def _sub_str_replace(self, args) -> Pairs:
        subject = self.value(args[0]) if args else []
        repl = self.value(args[1]) if len(args) > 1 else []
        if not subject and not repl:
            return []
        if not subject:
            subject, repl = repl, []
        out: Pairs = [(Token.SUB_STR_REPLACE, _NO_NAME), *subject]
        out.append((self._length_token(args[3] if len(args) > 3 else None), _NO_NAME))
        out.extend(repl)
        if len(args) > 2:
            out.append((Token.START_WHERE, _NO_NAME))
        return out

    # -- conditions: only calls contribute ----------------------------------

    def condition(self, e: Expr | None) -> Pairs:
        if e is None:
            return []
        if isinstance(e, BinOp):
            return self.condition(e.left) + self.condition(e.right)
        if isinstance(e, Unary):
            return self.condition(e.operand)
        if isinstance(e, Call):
            token = self.config.token_for(e.name)
            if token is None:
                return [p for a in e.args for p in self.condition(a)]
            return self.call(e.name, e.args, token)
        if isinstance(e, MethodCall):
            name, token = self.method(e.name)
            if token is None:
                return [p for a in e.args for p in self.condition(a)]
            return self.call(name, e.args, token)
        if isinstance(e, CutCall):
            return [(Token.INPUT, _NO_NAME)]
        return []

    # -- statements ----------------------------------------------------------

    def statement(self, s: Stmt) -> tuple[Pairs, bool]:
        """Token/name pairs and the assignment flag for one statement."""
        if isinstance(s, Assign):
            name = base_name(s.target)
            if name is None:
                raise TranslationError("assignment target is not a variable", s.line)
            rhs = self.value(s.value)
            if not rhs:
                raise TranslationError("assignment carries no tracked data", s.line)
            return [*rhs, (Token.VAR, name)], True
        if isinstance(s, Echo):
            token = self.config.token_for(s.keyword)
            inner = _join(self.value(a) for a in s.args)
            if token is None or not inner:
                raise TranslationError(f"{s.keyword} carries no tracked data", s.line)
            return [(token, _NO_NAME), *inner], False
        if isinstance(s, Include):
            token = self.config.token_for(s.keyword)
            inner = self.value(s.expr)
            if token is None or not inner:
                raise TranslationError(f"{s.keyword} carries no tracked data", s.line)
            return [(token, _NO_NAME), *inner], False
        if isinstance(s, ExprStmt):
            pairs = self.value(s.expr)
            if not pairs:
                raise TranslationError("expression carries no tracked data", s.line)
            return pairs, False
        raise TranslationError(f"cannot translate {type(s).__name__}", getattr(s, "line", 0))

    def header(self, s: If) -> Pairs:
        inner = self.condition(s.cond)
        if not inner:
            raise TranslationError("condition has no check on tracked data", s.line)
        return [(Token.COND, _NO_NAME), *inner, (Token.COND, _NO_NAME)]

    def step(self, step: SliceStep, path: str = "") -> IslInstruction:
        loc = SourceLoc(path, step.line)
        if step.role == "if":
            assert isinstance(step.stmt, If)
            pairs, flag = self.header(step.stmt), False
        elif step.role == "else":
            pairs, flag = [(Token.COND, _NO_NAME)], False
        else:
            pairs, flag = self.statement(step.stmt)
            if step.guarded:
                pairs = [(Token.COND, _NO_NAME), *pairs]
        instr = IslInstruction.build(pairs, flag, loc)
        if not validate_sequence(instr.tokens):
            raise TranslationError(f"ungrammatical translation: {instr.text}", step.line)
        return instr


def translate_stmt(
    stmt: Stmt, config: TokenConfig, *, path: str = "", guarded: bool = False
) -> IslInstruction:
    role = "if" if isinstance(stmt, If) else "stmt"
    step = SliceStep(stmt, getattr(stmt, "line", 0), role, guarded)
    return Translator(config).step(step, path)


def translate_slice(slice_: Slice, config: TokenConfig) -> SliceIsl:
    tr = Translator(config)
    instructions = tuple(tr.step(step, slice_.origin) for step in slice_.steps)
    return SliceIsl(
        instructions,
        slice_.sink_class,
        slice_.origin,
        slice_.entry_line,
        slice_.sink_line,
        slice_.path_index,
    )


def program_steps(statements, config: TokenConfig, guarded: bool = False) -> list[SliceStep]:
    """Every translatable statement of a program in source order.

    Both branches of each if appear, the else branch behind its marker. An if
    whose condition checks nothing contributes no header, and its then-branch
    statements get no cond prefix.
    """
    tr = Translator(config)
    out: list[SliceStep] = []
    for s in statements:
        if isinstance(s, If):
            try:
                tr.header(s)
                has_header = True
                out.append(SliceStep(s, s.line, "if"))
            except TranslationError:
                has_header = False
            out.extend(program_steps(s.then, config, has_header or guarded))
            if s.orelse is not None:
                if has_header:
                    out.append(SliceStep(s, s.else_line or s.line, "else"))
                out.extend(program_steps(s.orelse, config, False if has_header else guarded))
        elif isinstance(s, Loop):
            out.extend(program_steps(s.body, config, guarded))
        elif isinstance(s, (Assign, Echo, Include, ExprStmt)):
            try:
                tr.statement(s)
            except TranslationError:
                continue
            out.append(SliceStep(s, s.line, "stmt", guarded))
    return out


def translate_program(ast, config: TokenConfig) -> list[IslInstruction]:
    """Translate every translatable statement of a file in source order."""
    tr = Translator(config)
    return [tr.step(step, ast.path) for step in program_steps(ast.statements, config)]


def render_isl_rows(instructions) -> str:
    """Three-column view: line, slice-isl, variable map (tab separated)."""
    return "".join(
        f"{i.loc.line}\t{i.text}\t{i.varmap.render()}\n" for i in instructions
    )
