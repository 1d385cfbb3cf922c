"""Runtime-verification colouring of DFA states and reward shaping from it.

The colour of a state describes the verdict on every trace whose run ends
there, including what can still happen to its extensions.
"""
from __future__ import annotations

import enum
import warnings
from collections import deque
from typing import Dict, List, Optional, Sequence, Set

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .automata import Dfa, reach, to_dot
from .rewards import COMPLETE, STOP, ExtendedMdp, ExtState

EARLY_POSITIVE = "early-positive"
NEGATIVE_TRANSFORM = "negative-transform"


class MonitorColor(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    WILL_TRUE = "will_true"
    WILL_FALSE = "will_false"
    WILL_TEMP_TRUE = "will_temp_true"
    TEMP_TRUE = "temp_true"
    TEMP_FALSE = "temp_false"


DOT_COLORS = {
    MonitorColor.TRUE: "palegreen",
    MonitorColor.FALSE: "lightcoral",
    MonitorColor.WILL_TRUE: "darkseagreen1",
    MonitorColor.WILL_FALSE: "mistyrose",
    MonitorColor.WILL_TEMP_TRUE: "lightcyan",
    MonitorColor.TEMP_TRUE: "lightyellow",
    MonitorColor.TEMP_FALSE: "lightgrey",
}

GOOD = frozenset({MonitorColor.TRUE, MonitorColor.WILL_TRUE, MonitorColor.WILL_TEMP_TRUE})
BAD = frozenset({MonitorColor.FALSE, MonitorColor.WILL_FALSE})


def _cyclic_nodes(dfa: Dfa, allowed: Set[int]) -> Set[int]:
    """States of ``allowed`` lying on a cycle that stays inside ``allowed``."""
    nodes = sorted(allowed)
    if not nodes:
        return set()
    pos = {q: i for i, q in enumerate(nodes)}
    rows, cols = [], []
    self_loop = set()
    for q in nodes:
        for d in set(int(x) for x in dfa.delta[q]):
            if d in pos:
                rows.append(pos[q])
                cols.append(pos[d])
                if d == q:
                    self_loop.add(q)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, comp = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(comp)
    return {q for q in nodes if sizes[comp[pos[q]]] > 1 or q in self_loop}


def _reach_within(dfa: Dfa, q: int, allowed: Set[int]) -> Set[int]:
    seen = {q}
    queue = deque([q])
    while queue:
        x = queue.popleft()
        for d in set(int(v) for v in dfa.delta[x]):
            if d in allowed and d not in seen:
                seen.add(d)
                queue.append(d)
    return seen


def _inevitable(dfa: Dfa, target: Set[int]) -> Set[int]:
    """States outside ``target`` from which every run enters ``target`` in finitely many steps."""
    outside = set(range(dfa.n_states)) - target
    cyclic = _cyclic_nodes(dfa, outside)
    return {q for q in outside if not (_reach_within(dfa, q, outside) & cyclic)}


def color_states(dfa: Dfa) -> Dict[int, MonitorColor]:
    n = dfa.n_states
    finals = set(dfa.finals)
    reaches = [reach(dfa, q) for q in range(n)]
    t_star = {q for q in range(n) if q in finals and reaches[q] <= finals}
    f_star = {q for q in range(n) if q not in finals and not (reaches[q] & finals)}
    will_true = _inevitable(dfa, t_star)
    will_false = _inevitable(dfa, f_star)
    will_temp_true = _inevitable(dfa, finals)
    colors = {}
    for q in range(n):
        if q in t_star:
            c = MonitorColor.TRUE
        elif q in f_star:
            c = MonitorColor.FALSE
        elif q in will_true:
            c = MonitorColor.WILL_TRUE
        elif q in will_false:
            c = MonitorColor.WILL_FALSE
        elif q not in finals and q in will_temp_true:
            c = MonitorColor.WILL_TEMP_TRUE
        elif q in finals:
            c = MonitorColor.TEMP_TRUE
        else:
            c = MonitorColor.TEMP_FALSE
        colors[q] = c
    return colors


def coloring_to_json(colors: Dict[int, MonitorColor]) -> Dict[str, str]:
    return {str(q): c.value for q, c in sorted(colors.items())}


def coloring_to_dot(dfa: Dfa, colors: Dict[int, MonitorColor], name: str = "M") -> str:
    return to_dot(dfa, name, {q: DOT_COLORS[c] for q, c in colors.items()})


def check_absorbing(dfa: Dfa, colors: Dict[int, MonitorColor]) -> List[str]:
    """Violations of: successors of TRUE states are TRUE, of FALSE states FALSE."""
    problems = []
    for q, c in colors.items():
        if c in (MonitorColor.TRUE, MonitorColor.FALSE):
            for d in set(int(x) for x in dfa.delta[q]):
                if colors[d] != c:
                    problems.append(f"state {q} is {c.value} but successor {d} is {colors[d].value}")
    return problems


# --------------------------------------------------------------------------
# shaping


def shape_rewards(mdp: ExtendedMdp, colorings: Sequence[Dict[int, MonitorColor]],
                  mode: str, gamma: Optional[float] = None) -> ExtendedMdp:
    """Re-issue formula rewards according to the monitor colours.

    ``early-positive`` adds ``r_i`` the first time the run of formula i
    enters a TRUE, WILL_TRUE or WILL_TEMP_TRUE state, on top of the original
    reward.  ``negative-transform`` (complete-trace mode only) replaces the
    reward of formula i by ``-r_i`` on the first entry into WILL_FALSE or
    FALSE, ``-r_i`` at stop if the trace fails and no such entry happened,
    and ``+r_i`` at stop if the trace succeeds although such an entry
    happened; every complete trace then earns exactly ``r_i`` less than before.

    The extended state gains one first-trigger bit per formula.
    """
    if mode not in (EARLY_POSITIVE, NEGATIVE_TRANSFORM):
        raise ValueError(f"unknown shaping mode {mode!r}")
    if mode == NEGATIVE_TRANSFORM and mdp.mode != COMPLETE:
        raise ValueError("the negative transform needs complete-trace mode")
    if len(colorings) != len(mdp.dfas):
        raise ValueError("need one colouring per reward formula")
    gamma = mdp.spec.discount if gamma is None else gamma
    if gamma < 1.0:
        warnings.warn("reward shaping with discount < 1 can change the optimal policy, "
                      "because earlier rewards are worth more", stacklevel=2)
    m = len(mdp.dfas)
    values = mdp.spec.values
    trigger = GOOD if mode == EARLY_POSITIVE else BAD
    stop_idx = mdp.actions.index(STOP) if STOP in mdp.actions else -1

    base0 = mdp.states[mdp.initial]
    start = ExtState(base0.qs, base0.t, base0.done, (0,) * m)
    states = [start]
    index = {start: 0}
    base_of = [mdp.initial]
    trans, reward, fired = {}, {}, {}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        st = states[s]
        b = base_of[s]
        for a in mdp.applicable(b):
            succ = mdp.trans[(b, a)]
            # the bonus depends only on the successors' automaton part, which
            # every successor of a given (state, action) shares
            first = mdp.states[succ[0][0]]
            bits, bonus = st.bits, 0.0
            if not st.done:
                new_bits = []
                for i in range(m):
                    now = not st.bits[i] and colorings[i][first.qs[i]] in trigger
                    hit = st.bits[i] or now
                    new_bits.append(1 if hit else 0)
                    if mode == EARLY_POSITIVE:
                        bonus += values[i] if now else 0.0
                        continue
                    bonus -= values[i] if now else 0.0
                    if a == stop_idx:
                        ok = first.qs[i] in mdp.dfas[i].finals
                        if ok and hit:
                            bonus += values[i]
                        elif not ok and not hit:
                            bonus -= values[i]
                bits = tuple(new_bits)
            out = []
            for d, p in succ:
                dst = mdp.states[d]
                key = ExtState(dst.qs, dst.t, dst.done, bits)
                if key not in index:
                    index[key] = len(states)
                    states.append(key)
                    base_of.append(d)
                    queue.append(index[key])
                out.append((index[key], p))
            trans[(s, a)] = out
            base = mdp.reward[(b, a)] if mode == EARLY_POSITIVE else 0.0
            reward[(s, a)] = base + bonus
            fired[(s, a)] = mdp.fired[(b, a)]
    shaped = ExtendedMdp(states, mdp.actions, 0, trans, reward, fired, mdp.dfas, mdp.domain,
                         mdp.spec, mdp.action_props, index,
                         note="shaped MDP: first-trigger bits break the minimality guarantee")
    return shaped


def complete_runs(mdp: ExtendedMdp, max_steps: int):
    """Every action sequence ending in stop, with its undiscounted total per run.

    Yields (domain-trace, probability-free total reward) pairs over all
    branches; the totals are sums of per-step rewards along the branch.
    """
    stop = mdp.actions.index(STOP)

    def walk(s, steps, total, trace):
        yield tuple(trace), total + mdp.reward[(s, stop)]
        if steps == max_steps:
            return
        for a in mdp.applicable(s):
            if a == stop:
                continue
            for d, p in mdp.trans[(s, a)]:
                yield from walk(d, steps + 1, total + mdp.reward[(s, a)],
                                trace + [(mdp.actions[a], mdp.states[d].t)])

    yield from walk(mdp.initial, 0, 0.0, [])


def shaping_deltas(base: ExtendedMdp, shaped: ExtendedMdp, max_steps: int) -> Dict[tuple, float]:
    """Undiscounted shaped-minus-original total for every complete run."""
    a = dict(complete_runs(base, max_steps))
    b = dict(complete_runs(shaped, max_steps))
    if a.keys() != b.keys():
        raise ValueError("the two MDPs do not have the same complete runs")
    return {k: b[k] - a[k] for k in a}


def shaping_invariance(base: ExtendedMdp, shaped: ExtendedMdp, max_steps: int) -> bool:
    """With gamma = 1, shaped minus original total is one constant per spec."""
    try:
        deltas = shaping_deltas(base, shaped, max_steps)
    except ValueError:
        return False
    return len({round(d, 9) for d in deltas.values()}) == 1
