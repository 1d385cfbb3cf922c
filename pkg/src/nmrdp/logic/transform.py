"""Sugar expansion to the LDLf core and negation normal form."""
from __future__ import annotations

from functools import lru_cache

from .syntax import (
    FF, PTRUE, TT, Always, And, BoolLit, Box, Check, Concat, Diamond, End, Eventually, FMark,
    Last, Next, Not, NotProp, Or, PropAtom, PropTest, Release, Star, TMark, Union, Until,
    WeakNext,
)

STEP = PropTest(PTRUE)
# "there is a current position", i.e. the trace has not ended yet
NOT_END = Diamond(STEP, TT())
END = Box(Check(NOT_END), FF())


def holds_at_end(f) -> bool:
    """Truth value of a core LDLf formula at the position just past the trace."""
    if isinstance(f, TT):
        return True
    if isinstance(f, (FF, PropAtom)):
        return False
    if isinstance(f, NotProp):
        return True
    if isinstance(f, Not):
        return not holds_at_end(f.arg)
    if isinstance(f, And):
        return holds_at_end(f.left) and holds_at_end(f.right)
    if isinstance(f, Or):
        return holds_at_end(f.left) or holds_at_end(f.right)
    if isinstance(f, Diamond):
        return _nullable_at_end(f.path) and holds_at_end(f.arg)
    if isinstance(f, Box):
        return not _nullable_at_end(f.path) or holds_at_end(f.arg)
    raise TypeError(f"not an LDLf core formula: {f!r}")


def _nullable_at_end(p) -> bool:
    if isinstance(p, PropTest):
        return False
    if isinstance(p, Check):
        return holds_at_end(p.formula)
    if isinstance(p, Union):
        return _nullable_at_end(p.left) or _nullable_at_end(p.right)
    if isinstance(p, Concat):
        return _nullable_at_end(p.left) and _nullable_at_end(p.right)
    if isinstance(p, Star):
        return True
    raise TypeError(p)


def _strict(f):
    # LTLf positions are real trace positions, while <true>phi may land on the
    # end position; guard phi there whenever it would hold vacuously
    return And(f, NOT_END) if holds_at_end(f) else f


@lru_cache(maxsize=None)
def expand_sugar(f):
    """Rewrite LTLf connectives, ``last``, ``end`` and ``true``/``false`` into the LDLf core."""
    if isinstance(f, (TT, FF, PropAtom)):
        return f
    if isinstance(f, NotProp):
        return Not(PropAtom(f.name))
    if isinstance(f, BoolLit):
        return NOT_END if f.value else FF()
    if isinstance(f, Not):
        return Not(expand_sugar(f.arg))
    if isinstance(f, And):
        return And(expand_sugar(f.left), expand_sugar(f.right))
    if isinstance(f, Or):
        return Or(expand_sugar(f.left), expand_sugar(f.right))
    if isinstance(f, Next):
        return Diamond(STEP, _strict(expand_sugar(f.arg)))
    if isinstance(f, WeakNext):
        return Not(expand_sugar(Next(Not(f.arg))))
    if isinstance(f, Until):
        body = Star(Concat(Check(expand_sugar(f.left)), STEP))
        return Diamond(body, _strict(expand_sugar(f.right)))
    if isinstance(f, Release):
        return Not(expand_sugar(Until(Not(f.left), Not(f.right))))
    if isinstance(f, Eventually):
        return expand_sugar(Until(BoolLit(True), f.arg))
    if isinstance(f, Always):
        return Not(expand_sugar(Eventually(Not(f.arg))))
    if isinstance(f, Last):
        return Diamond(STEP, END)
    if isinstance(f, End):
        return END
    if isinstance(f, Diamond):
        return Diamond(expand_path(f.path), expand_sugar(f.arg))
    if isinstance(f, Box):
        return Box(expand_path(f.path), expand_sugar(f.arg))
    if isinstance(f, (TMark, FMark)):
        raise TypeError("delta markers cannot appear in input formulas")
    raise TypeError(f"unknown formula node {f!r}")


def expand_path(p):
    if isinstance(p, PropTest):
        return p
    if isinstance(p, Check):
        return Check(expand_sugar(p.formula))
    if isinstance(p, Union):
        return Union(expand_path(p.left), expand_path(p.right))
    if isinstance(p, Concat):
        return Concat(expand_path(p.left), expand_path(p.right))
    if isinstance(p, Star):
        return Star(expand_path(p.arg))
    raise TypeError(p)


@lru_cache(maxsize=None)
def to_nnf(f, negate: bool = False):
    """Push negations down to atoms.

    Works on the LDLf core and on the LTLf connectives.  The atomic negations
    left in the output are ``NotProp`` and ``Not(Last())``; ``!true`` becomes
    ``end``, ``!end`` becomes ``true`` and ``!false`` becomes ``tt``.
    """
    if isinstance(f, TT):
        return FF() if negate else f
    if isinstance(f, FF):
        return TT() if negate else f
    if isinstance(f, PropAtom):
        return NotProp(f.name) if negate else f
    if isinstance(f, NotProp):
        return PropAtom(f.name) if negate else f
    if isinstance(f, BoolLit):
        if not negate:
            return f
        return End() if f.value else TT()
    if isinstance(f, End):
        return BoolLit(True) if negate else f
    if isinstance(f, Last):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    if isinstance(f, (And, Or)):
        left, right = to_nnf(f.left, negate), to_nnf(f.right, negate)
        flip = isinstance(f, And) == negate
        return Or(left, right) if flip else And(left, right)
    if isinstance(f, (Diamond, Box)):
        path = nnf_path(f.path)
        arg = to_nnf(f.arg, negate)
        return (Box if isinstance(f, Diamond) == negate else Diamond)(path, arg)
    if isinstance(f, (Next, WeakNext)):
        arg = to_nnf(f.arg, negate)
        return (WeakNext if isinstance(f, Next) == negate else Next)(arg)
    if isinstance(f, (Eventually, Always)):
        arg = to_nnf(f.arg, negate)
        return (Always if isinstance(f, Eventually) == negate else Eventually)(arg)
    if isinstance(f, (Until, Release)):
        left, right = to_nnf(f.left, negate), to_nnf(f.right, negate)
        return (Release if isinstance(f, Until) == negate else Until)(left, right)
    raise TypeError(f"unknown formula node {f!r}")


def nnf_path(p):
    if isinstance(p, PropTest):
        return p
    if isinstance(p, Check):
        return Check(to_nnf(p.formula))
    if isinstance(p, Union):
        return Union(nnf_path(p.left), nnf_path(p.right))
    if isinstance(p, Concat):
        return Concat(nnf_path(p.left), nnf_path(p.right))
    if isinstance(p, Star):
        return Star(nnf_path(p.arg))
    raise TypeError(p)


def is_nnf(f) -> bool:
    from .syntax import walk

    for node in walk(f):
        if isinstance(node, Not) and not isinstance(node.arg, Last):
            return False
    return True
