"""The delta function and the forward LDLf-to-NFA construction.

NFA states are macro-states: frozensets of quoted formulas read as a
conjunction, the empty set standing for ``true``.  During construction the
reserved proposition ``last`` marks the final letter of a trace;
:func:`eliminate_last` removes it again.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union as TUnion

from .automata import DEFAULT_STATE_CAP, Dfa, Nfa, StateCapError, determinize, minimize
from .logic.parser import parse
from .logic.printer import to_text
from .logic.syntax import (
    FF, TT, Always, And, BoolLit, Box, Check, Concat, Diamond, End, Eventually, FMark, Formula,
    Last, Next, Not, NotProp, Or, PropAtom, PropTest, Release, Star, TMark, Union, Until,
    WeakNext, check_prop_name, props_of,
)
from .logic.transform import expand_sugar, to_nnf

LAST = "last"
DEFAULT_ALPHABET_CAP = 12


class CompileError(ValueError):
    pass


# --------------------------------------------------------------------------
# positive boolean formulas


class PosBool:
    __slots__ = ()


@dataclass(frozen=True)
class ConstTrue(PosBool):
    def __repr__(self):
        return "ConstTrue"


@dataclass(frozen=True)
class ConstFalse(PosBool):
    def __repr__(self):
        return "ConstFalse"


@dataclass(frozen=True)
class Quoted(PosBool):
    formula: Formula

    def __repr__(self):
        return f"Quoted({to_text(self.formula)})"


@dataclass(frozen=True)
class BAnd(PosBool):
    left: PosBool
    right: PosBool


@dataclass(frozen=True)
class BOr(PosBool):
    left: PosBool
    right: PosBool


TRUE = ConstTrue()
FALSE = ConstFalse()


def b_and(a: PosBool, b: PosBool) -> PosBool:
    if isinstance(a, ConstFalse) or isinstance(b, ConstFalse):
        return FALSE
    if isinstance(a, ConstTrue):
        return b
    if isinstance(b, ConstTrue):
        return a
    return BAnd(a, b)


def b_or(a: PosBool, b: PosBool) -> PosBool:
    if isinstance(a, ConstTrue) or isinstance(b, ConstTrue):
        return TRUE
    if isinstance(a, ConstFalse):
        return b
    if isinstance(b, ConstFalse):
        return a
    return BOr(a, b)


def _const(value: bool) -> PosBool:
    return TRUE if value else FALSE


def pb_eval(pb: PosBool, model: FrozenSet[Formula]) -> bool:
    if isinstance(pb, ConstTrue):
        return True
    if isinstance(pb, ConstFalse):
        return False
    if isinstance(pb, Quoted):
        return pb.formula in model
    if isinstance(pb, BAnd):
        return pb_eval(pb.left, model) and pb_eval(pb.right, model)
    return pb_eval(pb.left, model) or pb_eval(pb.right, model)


# --------------------------------------------------------------------------
# E(.)


@lru_cache(maxsize=None)
def e_expand(f):
    """Replace every T/F marker by the formula it carries, recursively."""
    if isinstance(f, (TMark, FMark)):
        return e_expand(f.arg)
    if isinstance(f, (Not, Next, WeakNext, Eventually, Always)):
        return type(f)(e_expand(f.arg))
    if isinstance(f, (And, Or, Until, Release)):
        return type(f)(e_expand(f.left), e_expand(f.right))
    if isinstance(f, (Diamond, Box)):
        return type(f)(_e_path(f.path), e_expand(f.arg))
    return f


def _e_path(p):
    if isinstance(p, Check):
        return Check(e_expand(p.formula))
    if isinstance(p, (Union, Concat)):
        return type(p)(_e_path(p.left), _e_path(p.right))
    if isinstance(p, Star):
        return Star(_e_path(p.arg))
    return p


# --------------------------------------------------------------------------
# delta


@lru_cache(maxsize=None)
def delta(f, interp: Optional[FrozenSet[str]]) -> PosBool:
    """One step of the alternating automaton.

    ``interp`` is the current letter, possibly containing ``last``; ``None``
    evaluates at the end position (the empty remaining trace).
    """
    eps = interp is None
    if isinstance(f, TT):
        return TRUE
    if isinstance(f, FF):
        return FALSE
    if isinstance(f, PropAtom):
        return _const(not eps and f.name in interp)
    if isinstance(f, NotProp):
        return _const(eps or f.name not in interp)
    if isinstance(f, BoolLit):
        return _const(not eps and f.value)
    if isinstance(f, TMark):
        return TRUE
    if isinstance(f, FMark):
        return FALSE
    if isinstance(f, And):
        return b_and(delta(f.left, interp), delta(f.right, interp))
    if isinstance(f, Or):
        return b_or(delta(f.left, interp), delta(f.right, interp))
    if isinstance(f, Diamond):
        return _delta_diamond(f.path, f.arg, interp)
    if isinstance(f, Box):
        return _delta_box(f.path, f.arg, interp)
    # LTLf rows
    if isinstance(f, Last):
        return _const(not eps and LAST in interp)
    if isinstance(f, Not) and isinstance(f.arg, Last):
        return _const(eps or LAST not in interp)
    if isinstance(f, End):
        return _const(eps)
    if isinstance(f, Next):
        return FALSE if eps or LAST in interp else Quoted(f.arg)
    if isinstance(f, WeakNext):
        return TRUE if eps or LAST in interp else Quoted(f.arg)
    if isinstance(f, Eventually):
        if eps:
            return FALSE
        return b_or(delta(f.arg, interp), delta(Next(f), interp))
    if isinstance(f, Always):
        if eps:
            return TRUE
        return b_and(delta(f.arg, interp), delta(WeakNext(f), interp))
    if isinstance(f, Until):
        if eps:
            return FALSE
        return b_or(delta(f.right, interp),
                    b_and(delta(f.left, interp), delta(Next(f), interp)))
    if isinstance(f, Release):
        if eps:
            return TRUE
        return b_and(delta(f.right, interp),
                     b_or(delta(f.left, interp), delta(WeakNext(f), interp)))
    if isinstance(f, Not):
        raise CompileError(f"delta needs negation normal form, got {to_text(f)}")
    raise CompileError(f"delta cannot handle {f!r}")


def _delta_diamond(rho, phi, interp) -> PosBool:
    if isinstance(rho, PropTest):
        if interp is None or not rho.guard.holds(interp):
            return FALSE
        if LAST in interp:
            return delta(e_expand(phi), None)
        return Quoted(e_expand(phi))
    if isinstance(rho, Check):
        return b_and(delta(rho.formula, interp), delta(phi, interp))
    if isinstance(rho, Union):
        return b_or(delta(Diamond(rho.left, phi), interp), delta(Diamond(rho.right, phi), interp))
    if isinstance(rho, Concat):
        return delta(Diamond(rho.left, Diamond(rho.right, phi)), interp)
    if isinstance(rho, Star):
        return b_or(delta(phi, interp), delta(Diamond(rho.arg, FMark(Diamond(rho, phi))), interp))
    raise CompileError(f"unknown path expression {rho!r}")


def _delta_box(rho, phi, interp) -> PosBool:
    if isinstance(rho, PropTest):
        if interp is None or not rho.guard.holds(interp):
            return TRUE
        if LAST in interp:
            return delta(e_expand(phi), None)
        return Quoted(e_expand(phi))
    if isinstance(rho, Check):
        return b_or(delta(to_nnf(rho.formula, True), interp), delta(phi, interp))
    if isinstance(rho, Union):
        return b_and(delta(Box(rho.left, phi), interp), delta(Box(rho.right, phi), interp))
    if isinstance(rho, Concat):
        return delta(Box(rho.left, Box(rho.right, phi)), interp)
    if isinstance(rho, Star):
        return b_and(delta(phi, interp), delta(Box(rho.arg, TMark(Box(rho, phi))), interp))
    raise CompileError(f"unknown path expression {rho!r}")


def delta_epsilon(f) -> PosBool:
    """Value of ``f`` on the empty remaining trace; always a constant."""
    return delta(f, None)


# --------------------------------------------------------------------------
# minimal models


def _dnf(pb: PosBool) -> List[FrozenSet[Formula]]:
    if isinstance(pb, ConstTrue):
        return [frozenset()]
    if isinstance(pb, ConstFalse):
        return []
    if isinstance(pb, Quoted):
        return [frozenset((pb.formula,))]
    if isinstance(pb, BOr):
        return _antichain(_dnf(pb.left) + _dnf(pb.right))
    left, right = _dnf(pb.left), _dnf(pb.right)
    return _antichain([a | b for a in left for b in right])


def _antichain(sets: List[FrozenSet]) -> List[FrozenSet]:
    unique = sorted(set(sets), key=len)
    kept: List[FrozenSet] = []
    for s in unique:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def minimal_models(pb: PosBool) -> FrozenSet[FrozenSet[Formula]]:
    """Subset-minimal sets of quoted atoms satisfying ``pb``."""
    return frozenset(_dnf(pb))


# --------------------------------------------------------------------------
# closure


def closure(f) -> FrozenSet[Formula]:
    """Fischer-Ladner style closure of an NNF formula.

    Every quoted atom produced by the construction lies in this set, which
    bounds the number of macro-states by ``2**len(closure(f))``.
    """
    out: Set[Formula] = set()
    todo = [f]
    while todo:
        g = todo.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (And, Or)):
            todo += [g.left, g.right]
        elif isinstance(g, (Not, Next, WeakNext)):
            todo.append(g.arg)
        elif isinstance(g, (Eventually, Always)):
            todo.append(g.arg)
        elif isinstance(g, (Until, Release)):
            todo += [g.left, g.right]
        elif isinstance(g, (Diamond, Box)):
            rho, phi, mod = g.path, g.arg, type(g)
            todo.append(phi)
            if isinstance(rho, Check):
                todo.append(rho.formula)
                todo.append(to_nnf(rho.formula, True))
            elif isinstance(rho, Union):
                todo += [mod(rho.left, phi), mod(rho.right, phi)]
            elif isinstance(rho, Concat):
                todo += [mod(rho.left, mod(rho.right, phi)), mod(rho.right, phi)]
            elif isinstance(rho, Star):
                todo.append(mod(rho.arg, g))
    return frozenset(out)


# --------------------------------------------------------------------------
# NFA construction


def _alphabet(f, alphabet: Optional[Iterable[str]], cap: int) -> Tuple[str, ...]:
    props = props_of(f)
    if alphabet is None:
        alphabet = sorted(props)
    alphabet = tuple(alphabet)
    for p in alphabet:
        check_prop_name(p)
    if len(set(alphabet)) != len(alphabet):
        raise CompileError("duplicate propositions in alphabet")
    missing = props - set(alphabet)
    if missing:
        raise CompileError(f"formula uses undeclared propositions {sorted(missing)}")
    if len(alphabet) > cap:
        raise CompileError(f"alphabet of {len(alphabet)} propositions exceeds the cap of {cap}")
    return alphabet


def _state_key(s: FrozenSet[Formula]):
    return (len(s), sorted(to_text(g) for g in s))


def _build(root, alphabet, state_cap) -> Nfa:
    full = alphabet + (LAST,)
    n_letters = 1 << len(full)
    letters = [frozenset(p for k, p in enumerate(full) if m >> k & 1) for m in range(n_letters)]
    empty: FrozenSet[Formula] = frozenset()
    start = frozenset((root,))
    index: Dict[FrozenSet[Formula], int] = {start: 0}
    order = [start]
    if empty not in index:
        index[empty] = len(order)
        order.append(empty)
    succ: Dict[Tuple[int, int], FrozenSet[int]] = {}
    queue = deque(order)
    while queue:
        state = queue.popleft()
        src = index[state]
        for m, letter in enumerate(letters):
            pb = TRUE
            for g in sorted(state, key=to_text):
                pb = b_and(pb, delta(g, letter))
                if pb is FALSE:
                    break
            targets = []
            for model in sorted(minimal_models(pb), key=_state_key):
                if model not in index:
                    if len(order) >= state_cap:
                        raise StateCapError(f"NFA construction exceeded {state_cap} states")
                    index[model] = len(order)
                    order.append(model)
                    queue.append(model)
                targets.append(index[model])
            if targets:
                succ[(src, m)] = frozenset(targets)
    finals = {index[empty]}
    initial = {0}
    if delta_epsilon(root) == TRUE:
        # the empty trace is accepted; give it a dedicated initial state so
        # that no non-empty trace is accepted by accident
        eps_state = len(order)
        order.append(frozenset((TT(),)))
        initial.add(eps_state)
        finals.add(eps_state)
    names = ["{" + ", ".join(sorted(to_text(g) for g in s)) + "}" for s in order]
    if len(initial) > 1:
        names[-1] = "<empty trace>"
    return Nfa(full, len(order), frozenset(initial), frozenset(finals), succ, tuple(names),
               tuple(order))


def ldlf_to_nfa(f, alphabet: Optional[Iterable[str]] = None, *,
                state_cap: int = DEFAULT_STATE_CAP,
                alphabet_cap: int = DEFAULT_ALPHABET_CAP) -> Nfa:
    """NFA over ``alphabet + ('last',)`` accepting the last-marked models of ``f``."""
    alpha = _alphabet(f, alphabet, alphabet_cap)
    root = to_nnf(expand_sugar(f))
    return _build(root, alpha, state_cap)


def ltlf_to_nfa(f, alphabet: Optional[Iterable[str]] = None, *,
                state_cap: int = DEFAULT_STATE_CAP,
                alphabet_cap: int = DEFAULT_ALPHABET_CAP) -> Nfa:
    """Same construction using the LTLf rows of delta directly, without expansion."""
    alpha = _alphabet(f, alphabet, alphabet_cap)
    return _build(to_nnf(f), alpha, state_cap)


def eliminate_last(nfa: Nfa) -> Nfa:
    """Drop the ``last`` proposition, adding a fresh final state ``ended``.

    Edges on ``last``-free letters are kept.  An edge reading ``P + {last}``
    into a final state becomes an edge reading ``P`` into ``ended``.  Only
    ``ended`` (and an initial state accepting the empty trace) is final: the
    true state reached on a ``last``-free letter still expects more input.
    """
    if not nfa.alphabet or nfa.alphabet[-1] != LAST:
        raise CompileError("eliminate_last expects 'last' as the final alphabet symbol")
    alphabet = nfa.alphabet[:-1]
    bit = 1 << len(alphabet)
    names = list(nfa.names) if nfa.names else [str(q) for q in range(nfa.n_states)]
    ended = nfa.n_states
    succ: Dict[Tuple[int, int], Set[int]] = {}
    for (q, m), dsts in nfa.succ.items():
        if m & bit:
            if dsts & nfa.finals:
                succ.setdefault((q, m & ~bit), set()).add(ended)
        else:
            succ.setdefault((q, m), set()).update(dsts)
    # the empty trace never reads a last-marked letter
    extra_finals = set(nfa.initial & nfa.finals)
    return Nfa(alphabet, nfa.n_states + 1, nfa.initial, frozenset(extra_finals | {ended}),
               {k: frozenset(v) for k, v in succ.items()}, tuple(names) + ("ended",),
               nfa.contents + (None,) if nfa.contents else None)


# --------------------------------------------------------------------------
# pipeline


@dataclass
class Compiled:
    formula: Formula
    nfa_last: Nfa
    nfa: Nfa
    dfa: Dfa
    min_dfa: Dfa


def compile_formula(f: TUnion[str, Formula], alphabet: Optional[Iterable[str]] = None, *,
                    direct_ltlf: bool = False, state_cap: int = DEFAULT_STATE_CAP) -> Compiled:
    """Formula -> NFA (with last) -> NFA -> DFA -> minimal DFA."""
    if isinstance(f, str):
        f = parse(f)
    build = ltlf_to_nfa if direct_ltlf else ldlf_to_nfa
    nfa_last = build(f, alphabet, state_cap=state_cap)
    nfa = eliminate_last(nfa_last)
    dfa = determinize(nfa, cap=state_cap)
    return Compiled(f, nfa_last, nfa, dfa, minimize(dfa))


def formula_dfa(f, alphabet: Optional[Iterable[str]] = None, **kw) -> Dfa:
    return compile_formula(f, alphabet, **kw).min_dfa
