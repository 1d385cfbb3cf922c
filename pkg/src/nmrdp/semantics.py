"""Direct finite-trace semantics, used as the reference oracle.

A trace is a tuple of frozensets of proposition names.  Positions run from 0
to ``len(trace)``; position ``len(trace)`` is the end position, where every
step-taking modality fails and every test can still be evaluated.
"""
from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Sequence, Tuple

from .logic.syntax import (
    FF, TT, Always, And, BoolLit, Box, Check, Concat, Diamond, End, Eventually, Last, Next,
    Not, NotProp, Or, PropAtom, PropTest, Release, Star, Union, Until, WeakNext, props_of,
)

Trace = Tuple[FrozenSet[str], ...]

DEFAULT_TRACE_CAP = 2 ** 20


class UndeclaredPropositionError(ValueError):
    pass


class TraceCapError(RuntimeError):
    pass


def as_trace(steps: Iterable[Iterable[str]]) -> Trace:
    return tuple(frozenset(s) for s in steps)


class _Evaluator:
    def __init__(self, trace: Sequence[FrozenSet[str]]):
        self.trace = trace
        self.n = len(trace)
        self.memo: Dict[tuple, bool] = {}
        self.reach_memo: Dict[tuple, FrozenSet[int]] = {}

    def holds(self, f, i: int) -> bool:
        key = (f, i)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._holds(f, i)
        return hit

    def _holds(self, f, i: int) -> bool:
        n, tr = self.n, self.trace
        if isinstance(f, TT):
            return True
        if isinstance(f, FF):
            return False
        if isinstance(f, PropAtom):
            return i < n and f.name in tr[i]
        if isinstance(f, NotProp):
            return not (i < n and f.name in tr[i])
        if isinstance(f, BoolLit):
            return i < n and f.value
        if isinstance(f, Not):
            return not self.holds(f.arg, i)
        if isinstance(f, And):
            return self.holds(f.left, i) and self.holds(f.right, i)
        if isinstance(f, Or):
            return self.holds(f.left, i) or self.holds(f.right, i)
        if isinstance(f, Diamond):
            return any(self.holds(f.arg, j) for j in sorted(self.reach(i, f.path)))
        if isinstance(f, Box):
            return all(self.holds(f.arg, j) for j in sorted(self.reach(i, f.path)))
        if isinstance(f, Last):
            return i == n - 1
        if isinstance(f, End):
            return i >= n
        if isinstance(f, Next):
            return i + 1 < n and self.holds(f.arg, i + 1)
        if isinstance(f, WeakNext):
            return i + 1 >= n or self.holds(f.arg, i + 1)
        if isinstance(f, Eventually):
            return any(self.holds(f.arg, j) for j in range(i, n))
        if isinstance(f, Always):
            return all(self.holds(f.arg, j) for j in range(i, n))
        if isinstance(f, Until):
            for j in range(i, n):
                if self.holds(f.right, j):
                    return True
                if not self.holds(f.left, j):
                    return False
            return False
        if isinstance(f, Release):
            for j in range(i, n):
                if not self.holds(f.right, j):
                    return False
                if self.holds(f.left, j):
                    return True
            return True
        raise TypeError(f"cannot evaluate {f!r}")

    def reach(self, i: int, rho) -> FrozenSet[int]:
        """All j with (i, j) in the relation of ``rho``."""
        key = (i, rho)
        hit = self.reach_memo.get(key)
        if hit is None:
            hit = self.reach_memo[key] = self._reach(i, rho)
        return hit

    def _reach(self, i: int, rho) -> FrozenSet[int]:
        if isinstance(rho, PropTest):
            if i < self.n and rho.guard.holds(self.trace[i]):
                return frozenset((i + 1,))
            return frozenset()
        if isinstance(rho, Check):
            return frozenset((i,)) if self.holds(rho.formula, i) else frozenset()
        if isinstance(rho, Union):
            return self.reach(i, rho.left) | self.reach(i, rho.right)
        if isinstance(rho, Concat):
            out = set()
            for k in self.reach(i, rho.left):
                out |= self.reach(k, rho.right)
            return frozenset(out)
        if isinstance(rho, Star):
            # least fixpoint; positions are finite so this terminates even for
            # nullable bodies such as (tt?)*
            seen = {i}
            frontier = [i]
            while frontier:
                k = frontier.pop()
                for j in self.reach(k, rho.arg):
                    if j not in seen:
                        seen.add(j)
                        frontier.append(j)
            return frozenset(seen)
        raise TypeError(f"cannot evaluate path {rho!r}")


def _check_alphabet(f, trace: Trace, alphabet):
    if alphabet is None:
        return
    declared = set(alphabet)
    missing = props_of(f) - declared
    for letter in trace:
        missing |= letter - declared
    if missing:
        raise UndeclaredPropositionError(f"undeclared propositions: {sorted(missing)}")


def satisfies(trace: Sequence[Iterable[str]], f, alphabet: Optional[Iterable[str]] = None) -> bool:
    """``trace, 0 |= f`` for any formula (LTLf connectives, LDLf core, or a mix)."""
    trace = as_trace(trace)
    _check_alphabet(f, trace, alphabet)
    return _Evaluator(trace).holds(f, 0)


def holds_at(trace: Sequence[Iterable[str]], f, i: int) -> bool:
    return _Evaluator(as_trace(trace)).holds(f, i)


def path_matches(trace: Sequence[Iterable[str]], i: int, j: int, rho) -> bool:
    if not 0 <= i <= j:
        raise ValueError("path_matches requires 0 <= i <= j")
    return j in _Evaluator(as_trace(trace)).reach(i, rho)


def interpretations(alphabet: Sequence[str]):
    """All subsets of ``alphabet``, ordered by bitmask (bit k = k-th proposition)."""
    props = list(alphabet)
    return [frozenset(p for k, p in enumerate(props) if mask >> k & 1)
            for mask in range(1 << len(props))]


def count_traces(n_props: int, max_len: int) -> int:
    return sum((1 << n_props) ** length for length in range(max_len + 1))


def enumerate_traces(alphabet: Iterable[str], max_len: int,
                     cap: int = DEFAULT_TRACE_CAP) -> Iterator[Trace]:
    """Every trace of length 0..max_len over 2^alphabet, shortest first."""
    props = sorted(alphabet)
    total = count_traces(len(props), max_len)
    if total > cap:
        raise TraceCapError(f"{total} traces exceeds the cap of {cap}")
    letters = interpretations(props)
    for length in range(max_len + 1):
        yield from itertools.product(letters, repeat=length)
