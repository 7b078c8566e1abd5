"""Tokenizer for the supported PHP subset."""

from __future__ import annotations

import re
from dataclasses import dataclass


class PhpSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int, path: str = "") -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.path = path

    def __str__(self) -> str:
        return f"{self.path or '<input>'}:{self.line}:{self.col}: {self.message}"


@dataclass(frozen=True)
class Tok:
    kind: str  # VAR, IDENT, NUM, SQ, DQ, OP, CAST, HTML, END, EOF
    value: str
    line: int
    col: int


_CASTS = {
    "int",
    "integer",
    "bool",
    "boolean",
    "float",
    "double",
    "real",
    "string",
    "array",
    "object",
}

_OPS = sorted(
    [
        "===", "!==", "<=>", "**=", "...", "<<=", ">>=",
        "==", "!=", "<>", "<=", ">=", "&&", "||", "++", "--", ".=", "+=",
        "-=", "*=", "/=", "%=", "->", "=>", "::", "??", "<<", ">>",
        "=", "<", ">", "!", "+", "-", "*", "/", "%", ".", ",", ";", "(",
        ")", "[", "]", "{", "}", "?", ":", "&", "|", "^", "@", "~",
    ],
    key=len,
    reverse=True,
)

_IDENT = re.compile(r"[A-Za-z_\x80-\uffff][A-Za-z0-9_\x80-\uffff]*")
_NUM = re.compile(r"0[xX][0-9a-fA-F]+|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_CAST = re.compile(r"\(\s*([A-Za-z]+)\s*\)")


class Lexer:
    def __init__(self, source: str, path: str = "") -> None:
        self.src = source
        self.path = path
        self.pos = 0
        self.line = 1
        self.line_start = 0
        self.toks: list[Tok] = []

    def error(self, msg: str) -> PhpSyntaxError:
        return PhpSyntaxError(msg, self.line, self.pos - self.line_start + 1, self.path)

    def _advance(self, n: int) -> str:
        text = self.src[self.pos : self.pos + n]
        nl = text.count("\n")
        if nl:
            self.line += nl
            self.line_start = self.pos + text.rindex("\n") + 1
        self.pos += n
        return text

    def _emit(self, kind: str, value: str, line: int, col: int) -> None:
        self.toks.append(Tok(kind, value, line, col))

    def tokenize(self) -> list[Tok]:
        in_php = False
        src = self.src
        while self.pos < len(src):
            if not in_php:
                start = src.find("<?php", self.pos)
                short = src.find("<?=", self.pos)
                if start == -1 and short == -1:
                    line, col = self.line, self.pos - self.line_start + 1
                    self._emit("HTML", self._advance(len(src) - self.pos), line, col)
                    break
                candidates = [p for p in (start, short) if p != -1]
                nxt = min(candidates)
                if nxt > self.pos:
                    line, col = self.line, self.pos - self.line_start + 1
                    self._emit("HTML", self._advance(nxt - self.pos), line, col)
                if nxt == short:
                    line, col = self.line, self.pos - self.line_start + 1
                    self._advance(3)
                    self._emit("IDENT", "echo", line, col)
                else:
                    self._advance(5)
                in_php = True
                continue
            if self._php_token():
                in_php = False
        self._emit("EOF", "", self.line, self.pos - self.line_start + 1)
        return self.toks

    def _php_token(self) -> bool:
        """Lex one token; returns True when leaving PHP mode."""
        src = self.src
        c = src[self.pos]
        line, col = self.line, self.pos - self.line_start + 1
        if c in " \t\r\n":
            self._advance(1)
            return False
        if src.startswith("?>", self.pos):
            self._advance(2)
            if src.startswith("\n", self.pos):
                self._advance(1)
            self._emit("OP", ";", line, col)
            return True
        if c == "#" or src.startswith("//", self.pos):
            end = self.pos
            while end < len(src) and src[end] != "\n":
                if src.startswith("?>", end):
                    break
                end += 1
            self._advance(end - self.pos)
            return False
        if src.startswith("/*", self.pos):
            end = src.find("*/", self.pos + 2)
            if end == -1:
                raise self.error("unterminated comment")
            self._advance(end + 2 - self.pos)
            return False
        if c == "$":
            if src.startswith("${", self.pos):
                m = _IDENT.match(src, self.pos + 2)
                if not m or not src.startswith("}", m.end()):
                    raise self.error("unsupported variable-variable syntax")
                self._advance(m.end() + 1 - self.pos)
                self._emit("VAR", m.group(0), line, col)
                return False
            m = _IDENT.match(src, self.pos + 1)
            if not m:
                raise self.error("expected variable name after '$'")
            self._advance(m.end() - self.pos)
            self._emit("VAR", m.group(0), line, col)
            return False
        if c == "'":
            self._emit("SQ", self._single_quoted(), line, col)
            return False
        if c == '"':
            self._emit("DQ", self._double_quoted_raw(), line, col)
            return False
        if c.isdigit() or (c == "." and self.pos + 1 < len(src) and src[self.pos + 1].isdigit()):
            m = _NUM.match(src, self.pos)
            self._advance(m.end() - self.pos)
            self._emit("NUM", m.group(0), line, col)
            return False
        if c == "(":
            m = _CAST.match(src, self.pos)
            if m and m.group(1).lower() in _CASTS:
                self._advance(m.end() - self.pos)
                self._emit("CAST", m.group(1).lower(), line, col)
                return False
        m = _IDENT.match(src, self.pos)
        if m:
            name = m.group(0)
            end = m.end()
            # namespaced names are out of subset, but a leading backslash on a
            # global function is harmless
            self._advance(end - self.pos)
            self._emit("IDENT", name, line, col)
            return False
        if c == "\\":
            self._advance(1)
            return False
        for op in _OPS:
            if src.startswith(op, self.pos):
                self._advance(len(op))
                self._emit("OP", op, line, col)
                return False
        raise self.error(f"unexpected character {c!r}")

    def _single_quoted(self) -> str:
        src = self.src
        i = self.pos + 1
        out = []
        while i < len(src):
            ch = src[i]
            if ch == "\\" and i + 1 < len(src) and src[i + 1] in "\\'":
                out.append(src[i + 1])
                i += 2
                continue
            if ch == "'":
                self._advance(i + 1 - self.pos)
                return "".join(out)
            out.append(ch)
            i += 1
        raise self.error("unterminated string")

    def _double_quoted_raw(self) -> str:
        src = self.src
        i = self.pos + 1
        while i < len(src):
            ch = src[i]
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                raw = src[self.pos + 1 : i]
                self._advance(i + 1 - self.pos)
                return raw
            i += 1
        raise self.error("unterminated string")


def tokenize(source: str, path: str = "") -> list[Tok]:
    return Lexer(source, path).tokenize()


_DQ_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "v": "\v",
    "f": "\f",
    "e": "\x1b",
    "0": "\0",
    "\\": "\\",
    "$": "$",
    '"': '"',
}


def unescape_dq(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text) and text[i + 1] in _DQ_ESCAPES:
            out.append(_DQ_ESCAPES[text[i + 1]])
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)
