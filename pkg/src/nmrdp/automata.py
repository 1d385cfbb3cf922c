"""Finite automata over the explicit alphabet 2^P.

Interpretations are bitmasks over the ordered ``alphabet``: bit k is set when
``alphabet[k]`` is true.  A :class:`Dfa` stores its total transition function
as an ``(n_states, 2**len(alphabet))`` integer array.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

DEFAULT_STATE_CAP = 100_000


class StateCapError(RuntimeError):
    """Raised when a construction would exceed its configured state cap."""


def letter_mask(alphabet: Sequence[str], letter: Iterable[str]) -> int:
    index = {p: k for k, p in enumerate(alphabet)}
    mask = 0
    for p in letter:
        if p not in index:
            raise ValueError(f"proposition {p!r} is not in the alphabet {list(alphabet)}")
        mask |= 1 << index[p]
    return mask


def mask_letter(alphabet: Sequence[str], mask: int) -> FrozenSet[str]:
    return frozenset(p for k, p in enumerate(alphabet) if mask >> k & 1)


def trace_masks(alphabet: Sequence[str], trace: Iterable[Iterable[str]]) -> List[int]:
    index = {p: k for k, p in enumerate(alphabet)}
    out = []
    for letter in trace:
        mask = 0
        for p in letter:
            if p not in index:
                raise ValueError(f"proposition {p!r} is not in the alphabet {list(alphabet)}")
            mask |= 1 << index[p]
        out.append(mask)
    return out


@dataclass(eq=False)
class Nfa:
    alphabet: Tuple[str, ...]
    n_states: int
    initial: FrozenSet[int]
    finals: FrozenSet[int]
    # (state, mask) -> successor set; missing keys mean no successor
    succ: Dict[Tuple[int, int], FrozenSet[int]]
    names: Optional[Tuple[str, ...]] = None
    # what each state stands for, e.g. the macro-state it was built from
    contents: Optional[Tuple[object, ...]] = None

    @property
    def n_letters(self) -> int:
        return 1 << len(self.alphabet)

    @property
    def transitions(self) -> List[Tuple[int, int, int]]:
        return sorted((q, m, d) for (q, m), dsts in self.succ.items() for d in dsts)

    def accepts(self, trace) -> bool:
        current = set(self.initial)
        for mask in trace_masks(self.alphabet, trace):
            nxt = set()
            for q in current:
                nxt |= self.succ.get((q, mask), frozenset())
            current = nxt
            if not current:
                return False
        return bool(current & self.finals)


@dataclass(eq=False)
class Dfa:
    alphabet: Tuple[str, ...]
    delta: np.ndarray
    initial: int
    finals: FrozenSet[int]
    labels: Optional[Tuple[FrozenSet[int], ...]] = None
    names: Optional[Tuple[str, ...]] = None
    # product states keep their component tuples here
    components: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        self.delta = np.asarray(self.delta, dtype=np.int64)
        self.finals = frozenset(int(q) for q in self.finals)
        if self.delta.ndim != 2 or self.delta.shape[1] != 1 << len(self.alphabet):
            raise ValueError("delta must have shape (n_states, 2**len(alphabet))")

    @property
    def n_states(self) -> int:
        return int(self.delta.shape[0])

    @property
    def n_letters(self) -> int:
        return 1 << len(self.alphabet)

    def step(self, q: int, mask: int) -> int:
        return int(self.delta[q, mask])

    def run(self, masks: Iterable[int], start: Optional[int] = None) -> int:
        q = self.initial if start is None else start
        for m in masks:
            q = int(self.delta[q, m])
        return q

    def accepts(self, trace) -> bool:
        return accepts(self, trace)

    def final_mask(self) -> np.ndarray:
        out = np.zeros(self.n_states, dtype=bool)
        out[list(self.finals)] = True
        return out


# --------------------------------------------------------------------------
# core operations


def determinize(nfa: Nfa, cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Subset construction; the empty subset acts as the sink."""
    start = frozenset(nfa.initial)
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        row = []
        for mask in range(nfa.n_letters):
            nxt = set()
            for q in subset:
                nxt |= nfa.succ.get((q, mask), frozenset())
            nxt = frozenset(nxt)
            if nxt not in index:
                if len(order) >= cap:
                    raise StateCapError(f"determinization exceeded {cap} states")
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    finals = frozenset(i for i, s in enumerate(order) if s & nfa.finals)
    return Dfa(nfa.alphabet, np.array(rows, dtype=np.int64).reshape(len(order), nfa.n_letters),
               0, finals)


def reachable_states(dfa: Dfa, start: Optional[int] = None) -> List[int]:
    """States reachable from ``start`` in breadth-first, letter-ordered discovery order."""
    start = dfa.initial if start is None else start
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for d in dfa.delta[q]:
            d = int(d)
            if d not in seen:
                seen.add(d)
                order.append(d)
                queue.append(d)
    return order


def reach(dfa: Dfa, q: int) -> FrozenSet[int]:
    if not 0 <= q < dfa.n_states:
        raise ValueError(f"state {q} out of range")
    return frozenset(reachable_states(dfa, q))


def _restrict(dfa: Dfa, order: Sequence[int]) -> Dfa:
    """Keep ``order`` (closed under delta) and renumber states by position in it."""
    new = {old: i for i, old in enumerate(order)}
    idx = np.asarray(order, dtype=np.int64)
    remap = np.full(dfa.n_states, -1, dtype=np.int64)
    remap[idx] = np.arange(len(order))
    delta = remap[dfa.delta[idx]]
    finals = frozenset(new[q] for q in dfa.finals if q in new)
    labels = tuple(dfa.labels[q] for q in order) if dfa.labels is not None else None
    names = tuple(dfa.names[q] for q in order) if dfa.names is not None else None
    comps = tuple(dfa.components[q] for q in order) if dfa.components is not None else None
    return Dfa(dfa.alphabet, delta, new[dfa.initial], finals, labels, names, comps)


def canonical(dfa: Dfa) -> Dfa:
    """Drop unreachable states and number the rest in BFS order from the initial state."""
    return _restrict(dfa, reachable_states(dfa))


def minimize(dfa: Dfa) -> Dfa:
    """Moore partition refinement; labelled states are only merged with equal labels."""
    dfa = canonical(dfa)
    n = dfa.n_states
    keys = []
    for q in range(n):
        lab = tuple(sorted(dfa.labels[q])) if dfa.labels is not None else ()
        keys.append((q in dfa.finals, lab))
    distinct = {k: i for i, k in enumerate(sorted(set(keys)))}
    block = np.array([distinct[k] for k in keys], dtype=np.int64)
    n_blocks = len(distinct)
    while True:
        signature = np.column_stack([block, block[dfa.delta]])
        _, new_block = np.unique(signature, axis=0, return_inverse=True)
        new_block = new_block.reshape(-1).astype(np.int64)
        count = int(new_block.max()) + 1 if n else 0
        block = new_block
        if count == n_blocks:
            break
        n_blocks = count
    reps = np.zeros(n_blocks, dtype=np.int64)
    for q in range(n - 1, -1, -1):
        reps[block[q]] = q
    delta = block[dfa.delta[reps]]
    finals = frozenset(int(block[q]) for q in dfa.finals)
    labels = tuple(dfa.labels[int(r)] for r in reps) if dfa.labels is not None else None
    quotient = Dfa(dfa.alphabet, delta, int(block[dfa.initial]), finals, labels)
    return canonical(quotient)


def reverse_nfa(nfa: Nfa) -> Nfa:
    """Reverse every edge and swap initial and final states."""
    succ: Dict[Tuple[int, int], set] = {}
    for (q, m), dsts in nfa.succ.items():
        for d in dsts:
            succ.setdefault((d, m), set()).add(q)
    return Nfa(nfa.alphabet, nfa.n_states, nfa.finals, nfa.initial,
               {k: frozenset(v) for k, v in succ.items()}, nfa.names)


def dfa_to_nfa(dfa: Dfa) -> Nfa:
    succ = {(q, m): frozenset((int(dfa.delta[q, m]),))
            for q in range(dfa.n_states) for m in range(dfa.n_letters)}
    return Nfa(dfa.alphabet, dfa.n_states, frozenset((dfa.initial,)), dfa.finals, succ)


def labeled_product(dfas: Sequence[Dfa], cap: int = DEFAULT_STATE_CAP) -> Dfa:
    """Synchronous product; ``labels[s]`` is the set of components accepting in ``s``.

    Final states are those where every component accepts.
    """
    if not dfas:
        raise ValueError("labeled_product needs at least one automaton")
    alphabet = dfas[0].alphabet
    for d in dfas[1:]:
        if d.alphabet != alphabet:
            raise ValueError("all automata in a product must share the same alphabet")
    n_letters = 1 << len(alphabet)
    start = tuple(d.initial for d in dfas)
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        state = queue.popleft()
        row = []
        for mask in range(n_letters):
            nxt = tuple(int(d.delta[q, mask]) for d, q in zip(dfas, state))
            if nxt not in index:
                if len(order) >= cap:
                    raise StateCapError(f"product exceeded {cap} states")
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    labels = tuple(frozenset(i for i, (d, q) in enumerate(zip(dfas, s)) if q in d.finals)
                   for s in order)
    finals = frozenset(i for i, lab in enumerate(labels) if len(lab) == len(dfas))
    return Dfa(alphabet, np.array(rows, dtype=np.int64).reshape(len(order), n_letters), 0,
               finals, labels, components=tuple(order))


def accepts(dfa: Dfa, trace) -> bool:
    return dfa.run(trace_masks(dfa.alphabet, trace)) in dfa.finals


def isomorphic(a: Dfa, b: Dfa) -> bool:
    """Equality of the canonical BFS numberings (for minimal DFAs: language equality)."""
    if a.alphabet != b.alphabet:
        return False
    ca, cb = canonical(a), canonical(b)
    return (ca.n_states == cb.n_states and np.array_equal(ca.delta, cb.delta)
            and ca.finals == cb.finals and ca.labels == cb.labels)


# --------------------------------------------------------------------------
# export


def _letter_text(alphabet, mask) -> str:
    return "{" + ",".join(p for k, p in enumerate(alphabet) if mask >> k & 1) + "}"


def to_dot(aut, name: str = "A", colors: Optional[Mapping[int, str]] = None) -> str:
    """GraphViz text; one edge per (state, interpretation) pair."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    if isinstance(aut, Dfa):
        n, initial, finals = aut.n_states, [aut.initial], aut.finals
        edges = [(q, m, int(aut.delta[q, m])) for q in range(n) for m in range(aut.n_letters)]
    else:
        n, initial, finals = aut.n_states, sorted(aut.initial), aut.finals
        edges = aut.transitions
    for q in range(n):
        shape = "doublecircle" if q in finals else "circle"
        label = str(q)
        if isinstance(aut, Dfa) and aut.labels is not None:
            label += " " + "{" + ",".join(str(i) for i in sorted(aut.labels[q])) + "}"
        extra = ""
        if colors is not None and q in colors:
            extra = f', style=filled, fillcolor="{colors[q]}"'
        lines.append(f'  {q} [shape={shape}, label="{label}"{extra}];')
    for q in initial:
        lines.append(f"  __start -> {q};")
    for q, m, d in edges:
        lines.append(f'  {q} -> {d} [label="{_letter_text(aut.alphabet, m)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(aut) -> dict:
    if isinstance(aut, Dfa):
        out = {
            "alphabet": list(aut.alphabet),
            "states": aut.n_states,
            "initial": aut.initial,
            "finals": sorted(aut.finals),
            "transitions": [[q, m, int(aut.delta[q, m])]
                            for q in range(aut.n_states) for m in range(aut.n_letters)],
        }
        if aut.labels is not None:
            out["labels"] = {str(q): sorted(lab) for q, lab in enumerate(aut.labels)}
        return out
    return {
        "alphabet": list(aut.alphabet),
        "states": aut.n_states,
        "initial": sorted(aut.initial),
        "finals": sorted(aut.finals),
        "transitions": [list(t) for t in aut.transitions],
    }


def from_json(data) -> "Dfa | Nfa":
    if isinstance(data, str):
        data = json.loads(data)
    alphabet = tuple(data["alphabet"])
    n = int(data["states"])
    if isinstance(data["initial"], list):
        succ: Dict[Tuple[int, int], set] = {}
        for q, m, d in data["transitions"]:
            succ.setdefault((q, m), set()).add(d)
        return Nfa(alphabet, n, frozenset(data["initial"]), frozenset(data["finals"]),
                   {k: frozenset(v) for k, v in succ.items()})
    delta = np.full((n, 1 << len(alphabet)), -1, dtype=np.int64)
    for q, m, d in data["transitions"]:
        delta[q, m] = d
    if (delta < 0).any():
        raise ValueError("DFA transition table is not total")
    labels = None
    if "labels" in data:
        labels = tuple(frozenset(data["labels"].get(str(q), [])) for q in range(n))
    return Dfa(alphabet, delta, int(data["initial"]), frozenset(data["finals"]), labels)
