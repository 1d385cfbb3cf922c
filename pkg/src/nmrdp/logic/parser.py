"""Recursive-descent parser for the LTLf / LDLf concrete syntax.

Formula precedence, tightest first: ``!`` and the prefix operators
(``X WX F G <p> [p]``), then ``U``/``R`` (right associative), ``&&``, ``||``,
``->``/``<->``.  Inside ``<...>``/``[...]``: postfix ``*`` and ``?`` bind
tightest, then ``;``, then ``+``.  Golog sugar ``if f then p else p`` and
``while f do p`` may appear wherever a path atom may.

The letters ``X WX F G U R`` are operators only in operator position; a lone
``G`` in ``<(!G)*; G> end`` is a proposition.  UTF-8 symbols are always
operators.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .syntax import (
    FF, KEYWORDS, RESERVED, TT, Always, And, BoolLit, Box, Check, Concat, Diamond, End,
    Eventually, Formula, Last, Next, Not, Or, PathExpr, PropAtom, PropTest, Release, Star,
    Union, Until, WeakNext, from_prop_formula, is_propositional, to_prop_formula,
)


class FormulaSyntaxError(ValueError):
    """Raised on malformed input; carries 1-based ``line`` and ``col``."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.msg = message
        self.line = line
        self.col = col


ParseError = FormulaSyntaxError


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, OP, EOF
    text: str
    line: int
    col: int


_UNICODE = {
    "¬": "!", "∧": "&&", "∨": "||", "→": "->", "↔": "<->", "⟨": "<", "⟩": ">",
    "○": "○", "●": "●", "◇": "◇", "◊": "◇", "□": "□",
}
_SYMBOLS = ["<->", "->", "&&", "||", "&", "|", "!", "~", "(", ")", "<", ">", "[", "]",
            ";", "+", "*", "?"]
_ALIASES = {"&": "&&", "|": "||", "~": "!"}
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# prefix operator spellings; the unicode ones are unambiguous
_PREFIX_WORDS = {"X": Next, "WX": WeakNext, "F": Eventually, "G": Always}
_PREFIX_SYMBOLS = {"○": Next, "●": WeakNext, "◇": Eventually, "□": Always}


def tokenize(text: str) -> List[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch in _UNICODE:
            tokens.append(Token("OP", _UNICODE[ch], line, col))
            i += 1
            col += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("OP", _ALIASES.get(sym, sym), line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise FormulaSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.furthest: Optional[FormulaSyntaxError] = None

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "EOF" and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.pos += 1
        return t

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        err = FormulaSyntaxError(message, tok.line, tok.col)
        if self.furthest is None or (tok.line, tok.col) >= (self.furthest.line, self.furthest.col):
            self.furthest = err
        raise err

    def _starts_formula(self, t: Token) -> bool:
        if t.kind == "IDENT":
            return t.text not in ("U", "R") and t.text not in ("then", "else", "do")
        return t.text in ("!", "(", "<", "[", "○", "●", "◇", "□")

    # -- formulas --------------------------------------------------------
    def parse_formula(self) -> Formula:
        return self._equiv()

    def _equiv(self) -> Formula:
        left = self._implies()
        while self.at("<->"):
            self.pos += 1
            right = self._implies()
            left = And(Or(Not(left), right), Or(left, Not(right)))
        return left

    def _implies(self) -> Formula:
        left = self._or()
        if self.at("->"):
            self.pos += 1
            right = self._implies()
            return Or(Not(left), right)
        return left

    def _or(self) -> Formula:
        left = self._and()
        while self.at("||"):
            self.pos += 1
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._until()
        while self.at("&&"):
            self.pos += 1
            left = And(left, self._until())
        return left

    def _until(self) -> Formula:
        left = self._unary()
        t = self.tok
        if t.kind == "IDENT" and t.text in ("U", "R"):
            self.pos += 1
            right = self._until()
            return Until(left, right) if t.text == "U" else Release(left, right)
        return left

    def _unary(self) -> Formula:
        t = self.tok
        if self.at("!"):
            self.pos += 1
            return Not(self._unary())
        if t.kind == "OP" and t.text in _PREFIX_SYMBOLS:
            self.pos += 1
            return _PREFIX_SYMBOLS[t.text](self._unary())
        if t.kind == "IDENT" and t.text in _PREFIX_WORDS and self._starts_formula(self.peek()):
            self.pos += 1
            return _PREFIX_WORDS[t.text](self._unary())
        if self.at("<"):
            self.pos += 1
            path = self.parse_path()
            self.expect(">")
            return Diamond(path, self._unary())
        if self.at("["):
            self.pos += 1
            path = self.parse_path()
            self.expect("]")
            return Box(path, self._unary())
        return self._primary()

    def _primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.pos += 1
            f = self.parse_formula()
            self.expect(")")
            return f
        if t.kind == "IDENT":
            word = t.text
            constants = {"tt": TT(), "ff": FF(), "true": BoolLit(True),
                         "false": BoolLit(False), "last": Last(), "end": End()}
            if word in constants:
                self.pos += 1
                return constants[word]
            if word in KEYWORDS:
                self.fail(f"keyword {word!r} cannot start a formula")
            self.pos += 1
            return PropAtom(word)
        self.fail(f"unexpected {t.text or 'end of input'!r}")

    # -- paths -----------------------------------------------------------
    def parse_path(self) -> PathExpr:
        left = self._seq()
        while self.at("+"):
            self.pos += 1
            left = Union(left, self._seq())
        return left

    def _seq(self) -> PathExpr:
        left = self._postfix()
        while self.at(";"):
            self.pos += 1
            left = Concat(left, self._postfix())
        return left

    def _postfix(self) -> PathExpr:
        p = self._path_atom()
        while self.at("*") or self.at("?"):
            if self.at("*"):
                self.pos += 1
                p = Star(p)
            else:
                tok = self.tok
                if not isinstance(p, PropTest):
                    self.fail("'?' must follow a formula", tok)
                self.pos += 1
                p = Check(from_prop_formula(p.guard))
        return p

    def _path_atom(self) -> PathExpr:
        t = self.tok
        if t.kind == "IDENT" and t.text == "if":
            self.pos += 1
            cond = self.parse_formula()
            self.expect("then")
            then_branch = self.parse_path()
            self.expect("else")
            else_branch = self.parse_path()
            return Union(Concat(Check(cond), then_branch), Concat(Check(Not(cond)), else_branch))
        if t.kind == "IDENT" and t.text == "while":
            self.pos += 1
            cond = self.parse_formula()
            self.expect("do")
            body = self.parse_path()
            return Concat(Star(Concat(Check(cond), body)), Check(Not(cond)))

        start = self.pos
        try:
            f = self.parse_formula()
        except FormulaSyntaxError:
            f = None
        if f is not None:
            if self.at("?"):
                self.pos += 1
                return Check(f)
            if is_propositional(f):
                return PropTest(to_prop_formula(f))
        self.pos = start
        if self.at("("):
            self.pos += 1
            p = self.parse_path()
            self.expect(")")
            return p
        if f is not None:
            tok = self.tokens[start]
            if tok.kind == "IDENT" and tok.text in RESERVED and not isinstance(f, BoolLit):
                self.fail(f"reserved word {tok.text!r} is not a propositional step guard", tok)
            self.fail("step guards must be propositional; use 'psi?' for tests", tok)
        if self.furthest is not None:
            raise self.furthest
        self.fail(f"unexpected {t.text or 'end of input'!r} in path expression")


def parse(text: str) -> Formula:
    p = Parser(text)
    try:
        f = p.parse_formula()
        if p.tok.kind != "EOF":
            p.fail(f"unexpected {p.tok.text!r} after formula")
    except FormulaSyntaxError as err:
        raise (p.furthest if p.furthest is not None and _later(p.furthest, err) else err) from None
    return f


def parse_path(text: str) -> PathExpr:
    p = Parser(text)
    path = p.parse_path()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p.tok.text!r} after path expression")
    return path


def _later(a: FormulaSyntaxError, b: FormulaSyntaxError) -> bool:
    return (a.line, a.col) > (b.line, b.col)
