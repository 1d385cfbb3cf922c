"""Abstract syntax for LTLf / LDLf formulas and regular path expressions.

All nodes are frozen dataclasses, so formulas are hashable and can be used
directly as automaton-state atoms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Iterator

RESERVED = frozenset({"last", "true", "false", "tt", "ff", "end"})
KEYWORDS = frozenset({"if", "then", "else", "while", "do"})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def check_prop_name(name: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ValueError(f"invalid proposition name {name!r}")
    if name in RESERVED or name in KEYWORDS:
        raise ValueError(f"{name!r} is reserved and cannot be used as a proposition")
    return name


# --------------------------------------------------------------------------
# propositional formulas (path guards)


class PropFormula:
    __slots__ = ()

    def holds(self, interp: FrozenSet[str]) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class PVar(PropFormula):
    name: str

    def holds(self, interp):
        return self.name in interp


@dataclass(frozen=True)
class PConst(PropFormula):
    value: bool

    def holds(self, interp):
        return self.value


@dataclass(frozen=True)
class PNot(PropFormula):
    arg: PropFormula

    def holds(self, interp):
        return not self.arg.holds(interp)


@dataclass(frozen=True)
class PAnd(PropFormula):
    left: PropFormula
    right: PropFormula

    def holds(self, interp):
        return self.left.holds(interp) and self.right.holds(interp)


@dataclass(frozen=True)
class POr(PropFormula):
    left: PropFormula
    right: PropFormula

    def holds(self, interp):
        return self.left.holds(interp) or self.right.holds(interp)


PTRUE = PConst(True)
PFALSE = PConst(False)


# --------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        from .printer import to_text

        return to_text(self)


@dataclass(frozen=True, repr=False)
class TT(Formula):
    def __repr__(self):
        return "TT()"


@dataclass(frozen=True, repr=False)
class FF(Formula):
    def __repr__(self):
        return "FF()"


@dataclass(frozen=True)
class PropAtom(Formula):
    name: str


@dataclass(frozen=True)
class NotProp(Formula):
    """Negated atom; produced only by negation-normal-form conversion."""

    name: str


@dataclass(frozen=True)
class BoolLit(Formula):
    """The propositional constants ``true``/``false`` used as formulas."""

    value: bool


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class WeakNext(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    path: "PathExpr"
    arg: Formula


@dataclass(frozen=True)
class Box(Formula):
    path: "PathExpr"
    arg: Formula


@dataclass(frozen=True, repr=False)
class Last(Formula):
    def __repr__(self):
        return "Last()"


@dataclass(frozen=True, repr=False)
class End(Formula):
    def __repr__(self):
        return "End()"


# markers used by the delta construction for starred path expressions
@dataclass(frozen=True)
class TMark(Formula):
    arg: Formula


@dataclass(frozen=True)
class FMark(Formula):
    arg: Formula


# --------------------------------------------------------------------------
# path expressions


class PathExpr:
    __slots__ = ()

    def __str__(self) -> str:
        from .printer import path_to_text

        return path_to_text(self)


@dataclass(frozen=True)
class PropTest(PathExpr):
    """A single step whose letter satisfies a propositional guard."""

    guard: PropFormula


@dataclass(frozen=True)
class Check(PathExpr):
    """The ``psi?`` test: no step, psi must hold at the current position."""

    formula: Formula


@dataclass(frozen=True)
class Union(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Concat(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Star(PathExpr):
    arg: PathExpr


UNARY = (Not, Next, WeakNext, Eventually, Always, TMark, FMark)
BINARY = (And, Or, Until, Release)
ATOMIC = (TT, FF, PropAtom, NotProp, BoolLit, Last, End)


def children(node) -> Iterator:
    if isinstance(node, UNARY):
        yield node.arg
    elif isinstance(node, BINARY):
        yield node.left
        yield node.right
    elif isinstance(node, (Diamond, Box)):
        yield node.path
        yield node.arg
    elif isinstance(node, Check):
        yield node.formula
    elif isinstance(node, (Union, Concat)):
        yield node.left
        yield node.right
    elif isinstance(node, Star):
        yield node.arg
    elif isinstance(node, PropTest):
        yield node.guard
    elif isinstance(node, (PNot,)):
        yield node.arg
    elif isinstance(node, (PAnd, POr)):
        yield node.left
        yield node.right


def walk(node) -> Iterator:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(children(n))


def size(node) -> int:
    return sum(1 for _ in walk(node))


def props_of(node) -> FrozenSet[str]:
    out = set()
    for n in walk(node):
        if isinstance(n, (PropAtom, NotProp, PVar)):
            out.add(n.name)
    return frozenset(out)


def is_propositional(f: Formula) -> bool:
    """True when ``f`` is a boolean combination of atoms and true/false."""
    if isinstance(f, (PropAtom, NotProp, BoolLit)):
        return True
    if isinstance(f, Not):
        return is_propositional(f.arg)
    if isinstance(f, (And, Or)):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def to_prop_formula(f: Formula) -> PropFormula:
    if isinstance(f, PropAtom):
        return PVar(f.name)
    if isinstance(f, NotProp):
        return PNot(PVar(f.name))
    if isinstance(f, BoolLit):
        return PConst(f.value)
    if isinstance(f, Not):
        return PNot(to_prop_formula(f.arg))
    if isinstance(f, And):
        return PAnd(to_prop_formula(f.left), to_prop_formula(f.right))
    if isinstance(f, Or):
        return POr(to_prop_formula(f.left), to_prop_formula(f.right))
    raise TypeError(f"{type(f).__name__} is not a propositional formula")


def from_prop_formula(p: PropFormula) -> Formula:
    if isinstance(p, PVar):
        return PropAtom(p.name)
    if isinstance(p, PConst):
        return BoolLit(p.value)
    if isinstance(p, PNot):
        return Not(from_prop_formula(p.arg))
    if isinstance(p, PAnd):
        return And(from_prop_formula(p.left), from_prop_formula(p.right))
    if isinstance(p, POr):
        return Or(from_prop_formula(p.left), from_prop_formula(p.right))
    raise TypeError(p)
