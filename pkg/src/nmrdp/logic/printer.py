"""Canonical ASCII rendering; ``parse(to_text(f)) == f`` for parser-producible ASTs."""
from __future__ import annotations

from .syntax import (
    FF, TT, Always, And, BoolLit, Box, Check, Concat, Diamond, End, Eventually, FMark,
    Last, Next, Not, NotProp, Or, PAnd, PConst, PNot, POr, PropAtom, PropTest, PVar,
    Release, Star, TMark, Union, Until, WeakNext,
)

_UNARY_OPS = {Not: "!", Next: "X ", WeakNext: "WX ", Eventually: "F ", Always: "G "}
_ATOMS = (TT, FF, Last, End, BoolLit, PropAtom, NotProp)
_BINARY_OPS = {And: "&&", Or: "||", Until: "U", Release: "R"}


def to_text(f) -> str:
    if isinstance(f, TT):
        return "tt"
    if isinstance(f, FF):
        return "ff"
    if isinstance(f, Last):
        return "last"
    if isinstance(f, End):
        return "end"
    if isinstance(f, BoolLit):
        return "true" if f.value else "false"
    if isinstance(f, PropAtom):
        return f.name
    if isinstance(f, NotProp):
        return "!" + f.name
    op = _UNARY_OPS.get(type(f))
    if op is not None:
        return op + _operand(f.arg)
    op = _BINARY_OPS.get(type(f))
    if op is not None:
        return f"({to_text(f.left)} {op} {to_text(f.right)})"
    if isinstance(f, Diamond):
        return f"<{path_to_text(f.path)}>" + _operand(f.arg)
    if isinstance(f, Box):
        return f"[{path_to_text(f.path)}]" + _operand(f.arg)
    if isinstance(f, TMark):
        return f"T{{{to_text(f.arg)}}}"
    if isinstance(f, FMark):
        return f"F{{{to_text(f.arg)}}}"
    raise TypeError(f"cannot print {f!r}")


def _operand(f) -> str:
    text = to_text(f)
    # prefix operators read their operand at unary precedence; anything that
    # is not already atomic or parenthesised gets wrapped
    if text.startswith("(") or isinstance(f, _ATOMS):
        return text
    if isinstance(f, Not) and isinstance(f.arg, _ATOMS):
        return text
    return f"({text})"


def path_to_text(p) -> str:
    if isinstance(p, PropTest):
        return _guard(p.guard)
    if isinstance(p, Check):
        return f"({to_text(p.formula)})?"
    if isinstance(p, Union):
        return f"({path_to_text(p.left)} + {path_to_text(p.right)})"
    if isinstance(p, Concat):
        return f"({path_to_text(p.left)}; {path_to_text(p.right)})"
    if isinstance(p, Star):
        inner = path_to_text(p.arg)
        if not inner.startswith("("):
            inner = f"({inner})"
        return inner + "*"
    raise TypeError(f"cannot print {p!r}")


def _guard(g) -> str:
    if isinstance(g, PVar):
        return g.name
    if isinstance(g, PConst):
        return "true" if g.value else "false"
    if isinstance(g, PNot):
        inner = _guard(g.arg)
        return "!" + inner if isinstance(g.arg, (PVar, PConst)) else f"!({inner})"
    if isinstance(g, PAnd):
        return f"({_guard(g.left)} && {_guard(g.right)})"
    if isinstance(g, POr):
        return f"({_guard(g.left)} || {_guard(g.right)})"
    raise TypeError(g)
