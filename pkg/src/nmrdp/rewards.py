"""Non-Markovian reward decision processes and their Markovian extension.

A domain state is an interpretation: a frozenset of the domain propositions
that hold in it.  A trace is the sequence of visited domain states, optionally
with one ``p_<action>`` proposition added per step for the action taken there.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import (Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional,
                    Sequence, Tuple, Union)

from .automata import (DEFAULT_STATE_CAP, Dfa, StateCapError, determinize, letter_mask, minimize,
                       reverse_nfa)
from .compiler import compile_formula, eliminate_last, ldlf_to_nfa
from .logic.parser import parse
from .logic.printer import to_text
from .logic.syntax import Formula, check_prop_name, props_of
from .semantics import satisfies

STOP = "stop"
PREFIX = "prefix"
COMPLETE = "complete"
_MODE_ALIASES = {"prefix": PREFIX, "per-prefix": PREFIX, "complete": COMPLETE,
                 "complete-trace": COMPLETE}
PROB_TOL = 1e-9

State = FrozenSet[str]


class ModelError(ValueError):
    pass


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ModelError(f"unknown reward mode {mode!r}; use 'prefix' or 'complete'") from None


def action_prop(action: str) -> str:
    return "p_" + action


# --------------------------------------------------------------------------
# domain


@dataclass
class DomainModel:
    props: Tuple[str, ...]
    actions: Tuple[str, ...]
    initial: State
    trans: Dict[Tuple[State, str], Dict[State, float]]
    states: Tuple[State, ...] = ()

    def __post_init__(self):
        self.props = tuple(self.props)
        for p in self.props:
            check_prop_name(p)
        if len(set(self.props)) != len(self.props):
            raise ModelError("duplicate proposition in domain")
        self.actions = tuple(self.actions)
        if len(set(self.actions)) != len(self.actions):
            raise ModelError("duplicate action in domain")
        if STOP in self.actions:
            raise ModelError(f"{STOP!r} is reserved for complete-trace mode")
        self.initial = frozenset(self.initial)
        trans = {}
        for (t, a), dist in self.trans.items():
            t = frozenset(t)
            if a not in self.actions:
                raise ModelError(f"transition uses undeclared action {a!r}")
            clean: Dict[State, float] = {}
            for t2, p in dist.items():
                p = float(p)
                if not 0.0 <= p <= 1.0:
                    raise ModelError(f"probability {p} outside [0, 1]")
                if p > 0.0:
                    t2 = frozenset(t2)
                    clean[t2] = clean.get(t2, 0.0) + p
            if abs(sum(clean.values()) - 1.0) > PROB_TOL:
                raise ModelError(f"distribution for ({sorted(t)}, {a}) sums to {sum(clean.values())}")
            trans[(t, a)] = clean
        self.trans = trans
        known = set(frozenset(s) for s in self.states) if self.states else None
        mentioned = {self.initial}
        for (t, _), dist in trans.items():
            mentioned.add(t)
            mentioned.update(dist)
        for s in mentioned:
            if not s <= set(self.props):
                raise ModelError(f"state {sorted(s)} mentions undeclared propositions")
            if known is not None and s not in known:
                raise ModelError(f"state {sorted(s)} is not among the declared states")
        if not self.states:
            self.states = tuple(sorted(mentioned, key=self.mask))
        else:
            self.states = tuple(frozenset(s) for s in self.states)

    def mask(self, t: Iterable[str]) -> int:
        return letter_mask(self.props, t)

    def applicable(self, t: State) -> List[str]:
        return [a for a in self.actions if (t, a) in self.trans]

    def successors(self, t: State, a: str) -> Dict[State, float]:
        return self.trans[(t, a)]


# --------------------------------------------------------------------------
# reward specifications


@dataclass
class RewardSpec:
    pairs: List[Tuple[Formula, float]]
    discount: float = 0.95
    mode: str = PREFIX

    def __post_init__(self):
        self.pairs = [((parse(f) if isinstance(f, str) else f), float(r)) for f, r in self.pairs]
        self.mode = normalize_mode(self.mode)
        if not 0.0 < self.discount <= 1.0:
            raise ModelError("discount must lie in (0, 1]")

    @property
    def formulas(self) -> List[Formula]:
        return [f for f, _ in self.pairs]

    @property
    def values(self) -> List[float]:
        return [r for _, r in self.pairs]


def reward_of_prefix(spec: RewardSpec, prefix: Sequence[Iterable[str]]) -> float:
    """Sum of the rewards of all formulas satisfied by ``prefix`` (oracle semantics)."""
    total = 0.0
    for f, r in spec.pairs:
        if satisfies(prefix, f):
            total += r
    return total


def trace_letters(states: Sequence[State], actions: Optional[Sequence[str]] = None,
                  action_props: bool = False) -> List[State]:
    """Letters read by the automata: states, each extended with ``p_a`` when enabled."""
    if not action_props:
        return [frozenset(t) for t in states]
    if actions is None or len(actions) < len(states):
        raise ModelError("action-labelled traces need one action per state")
    return [frozenset(t) | {action_prop(a)} for t, a in zip(states, actions)]


@dataclass
class TraceValue:
    value: float
    satisfied: Tuple[Tuple[bool, ...], ...]


def trace_value(spec: RewardSpec, letters: Sequence[State]) -> TraceValue:
    """Discounted per-prefix value: sum over i of gamma^i R(letters[:i+1])."""
    value = 0.0
    flags = []
    for i in range(len(letters)):
        prefix = letters[: i + 1]
        sat = tuple(satisfies(prefix, f) for f in spec.formulas)
        flags.append(sat)
        value += spec.discount ** i * sum(r for ok, r in zip(sat, spec.values) if ok)
    return TraceValue(value, tuple(flags))


# --------------------------------------------------------------------------
# extended MDP


class ExtState(NamedTuple):
    qs: Tuple[int, ...]
    t: State
    done: bool = False
    bits: Tuple[int, ...] = ()


@dataclass
class ExtendedMdp:
    states: List[ExtState]
    actions: Tuple[str, ...]
    initial: int
    trans: Dict[Tuple[int, int], List[Tuple[int, float]]]
    reward: Dict[Tuple[int, int], float]
    fired: Dict[Tuple[int, int], FrozenSet[int]]
    dfas: List[Dfa]
    domain: DomainModel
    spec: RewardSpec
    action_props: bool = False
    index: Dict[ExtState, int] = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def mode(self) -> str:
        return self.spec.mode

    @property
    def n_states(self) -> int:
        return len(self.states)

    def applicable(self, s: int) -> List[int]:
        return [a for a in range(len(self.actions)) if (s, a) in self.trans]

    def encode(self, s: Union[int, ExtState]) -> str:
        st = self.states[s] if isinstance(s, int) else s
        text = "(" + ",".join(str(q) for q in st.qs) + "|" + str(self.domain.mask(st.t)) + ")"
        if st.done:
            text += "#done"
        if st.bits:
            text += "#b=" + "".join(str(b) for b in st.bits)
        return text

    def letter(self, t: State, action: str) -> int:
        if not self.dfas:
            return 0
        props = set(t) | ({action_prop(action)} if self.action_props else set())
        return letter_mask(self.dfas[0].alphabet, props)

    def step_automata(self, qs: Tuple[int, ...], t: State, action: str) -> Tuple[int, ...]:
        m = self.letter(t, action)
        return tuple(int(d.delta[q, m]) for d, q in zip(self.dfas, qs))

    def tau(self, s: int) -> State:
        return self.states[s].t


def spec_alphabet(domain: DomainModel, spec: RewardSpec, action_props: bool) -> Tuple[str, ...]:
    alphabet = list(domain.props)
    if action_props:
        names = list(domain.actions) + ([STOP] if spec.mode == COMPLETE else [])
        for a in names:
            p = action_prop(a)
            if p in alphabet:
                raise ModelError(f"action proposition {p!r} clashes with a domain proposition")
            alphabet.append(p)
    for f in spec.formulas:
        missing = props_of(f) - set(alphabet)
        if missing:
            raise ModelError(f"formula {to_text(f)} uses undeclared propositions {sorted(missing)}")
    return tuple(alphabet)


def compile_spec(domain: DomainModel, spec: RewardSpec, action_props: bool = False) -> List[Dfa]:
    alphabet = spec_alphabet(domain, spec, action_props)
    return [compile_formula(f, alphabet).min_dfa for f in spec.formulas]


def build_extended_mdp(domain: DomainModel, spec: RewardSpec, action_props: bool = False,
                       dfas: Optional[List[Dfa]] = None,
                       state_cap: int = DEFAULT_STATE_CAP) -> ExtendedMdp:
    """Product of the domain with one minimal DFA per reward formula.

    In state ``(q, t)`` the automata have read the trace up to, but not
    including, ``t``.  Per-prefix mode pays ``r_i`` whenever the DFA of
    ``phi_i`` accepts after reading ``t``.  Complete-trace mode pays only on
    ``stop``, which moves to an absorbing zero-reward terminal.
    """
    if dfas is None:
        dfas = compile_spec(domain, spec, action_props)
    alphabet = spec_alphabet(domain, spec, action_props)
    for d in dfas:
        if d.alphabet != alphabet:
            raise ModelError("automaton alphabet does not match the domain alphabet")
    complete = spec.mode == COMPLETE
    actions = domain.actions + ((STOP,) if complete else ())
    stop_idx = len(actions) - 1
    values = spec.values
    full = {p: k for k, p in enumerate(alphabet)}
    tmask = {}

    def letter(t: State, a: str) -> int:
        key = (t, a)
        if key not in tmask:
            bits = set(t) | ({action_prop(a)} if action_props else set())
            tmask[key] = sum(1 << full[p] for p in bits)
        return tmask[key]

    start = ExtState(tuple(d.initial for d in dfas), domain.initial)
    states = [start]
    index = {start: 0}
    trans: Dict[Tuple[int, int], List[Tuple[int, float]]] = {}
    reward: Dict[Tuple[int, int], float] = {}
    fired: Dict[Tuple[int, int], FrozenSet[int]] = {}
    queue = deque([0])

    def visit(st: ExtState) -> int:
        if st not in index:
            if len(states) >= state_cap:
                raise StateCapError(f"extended MDP exceeded {state_cap} states")
            index[st] = len(states)
            states.append(st)
            queue.append(index[st])
        return index[st]

    while queue:
        s = queue.popleft()
        st = states[s]
        if st.done:
            trans[(s, stop_idx)] = [(s, 1.0)]
            reward[(s, stop_idx)] = 0.0
            fired[(s, stop_idx)] = frozenset()
            continue
        names = domain.applicable(st.t)
        if complete:
            names = names + [STOP]
        if not names:
            raise ModelError(f"no applicable action in domain state {sorted(st.t)}")
        for a in names:
            ai = actions.index(a)
            m = letter(st.t, a)
            q2 = tuple(int(d.delta[q, m]) for d, q in zip(dfas, st.qs))
            acc = frozenset(i for i, (d, q) in enumerate(zip(dfas, q2)) if q in d.finals)
            if a == STOP:
                dst = visit(ExtState(q2, st.t, True))
                trans[(s, ai)] = [(dst, 1.0)]
                reward[(s, ai)] = sum(values[i] for i in sorted(acc))
                fired[(s, ai)] = acc
                continue
            out = []
            for t2, p in sorted(domain.successors(st.t, a).items(), key=lambda kv: domain.mask(kv[0])):
                out.append((visit(ExtState(q2, t2)), p))
            trans[(s, ai)] = out
            if complete:
                reward[(s, ai)] = 0.0
                fired[(s, ai)] = frozenset()
            else:
                reward[(s, ai)] = sum(values[i] for i in sorted(acc))
                fired[(s, ai)] = acc
    return ExtendedMdp(states, actions, 0, trans, reward, fired, list(dfas), domain, spec,
                       action_props, index)


# --------------------------------------------------------------------------
# policies


class LiftedPolicy:
    """History-dependent domain policy induced by a policy on the extended MDP."""

    def __init__(self, mdp: ExtendedMdp, ext_policy: Mapping[int, str]):
        self.mdp = mdp
        self.ext_policy = ext_policy

    def track(self, history: Sequence[Iterable[str]],
              actions: Optional[Sequence[str]] = None) -> int:
        """Extended state reached after ``history`` (domain states t0..tn)."""
        mdp = self.mdp
        hist = [frozenset(t) for t in history]
        if not hist:
            return mdp.initial
        if hist[0] != mdp.domain.initial:
            raise ModelError("history must start in the initial domain state")
        qs = tuple(d.initial for d in mdp.dfas)
        for k in range(len(hist) - 1):
            a = actions[k] if actions is not None else None
            if mdp.action_props and a is None:
                raise ModelError("action-labelled rewards need the actions of the history")
            qs = mdp.step_automata(qs, hist[k], a or "")
        st = ExtState(qs, hist[-1])
        if st not in mdp.index:
            raise ModelError(f"history leaves the reachable state space at {sorted(hist[-1])}")
        return mdp.index[st]

    def __call__(self, history: Sequence[Iterable[str]],
                 actions: Optional[Sequence[str]] = None) -> str:
        return self.ext_policy[self.track(history, actions)]


def lift_policy(mdp: ExtendedMdp, ext_policy: Mapping[int, str]) -> LiftedPolicy:
    return LiftedPolicy(mdp, ext_policy)


# --------------------------------------------------------------------------
# past-time rewards by reversal


def pltl_reward_dfa(f: Union[str, Formula], alphabet: Optional[Iterable[str]] = None) -> Dfa:
    """DFA that, run forwards over a prefix, accepts iff the reversed prefix satisfies ``f``."""
    if isinstance(f, str):
        f = parse(f)
    nfa = eliminate_last(ldlf_to_nfa(f, alphabet))
    return minimize(determinize(reverse_nfa(nfa)))


# --------------------------------------------------------------------------
# file formats


def domain_from_json(data) -> DomainModel:
    if isinstance(data, str):
        data = json.loads(data)
    trans: Dict[Tuple[State, str], Dict[State, float]] = {}
    for row in data["transitions"]:
        key = (frozenset(row["from"]), row["action"])
        dist = trans.setdefault(key, {})
        to = frozenset(row["to"])
        dist[to] = dist.get(to, 0.0) + float(row["p"])
    return DomainModel(tuple(data["props"]), tuple(data["actions"]), frozenset(data["initial"]),
                       trans, tuple(frozenset(s) for s in data.get("states", [])))


def domain_to_json(domain: DomainModel) -> dict:
    rows = []
    for (t, a), dist in domain.trans.items():
        for t2, p in dist.items():
            rows.append({"from": sorted(t), "action": a, "to": sorted(t2), "p": p})
    return {"props": list(domain.props), "states": [sorted(s) for s in domain.states],
            "actions": list(domain.actions), "initial": sorted(domain.initial),
            "transitions": rows}


def spec_from_json(data) -> RewardSpec:
    if isinstance(data, str):
        data = json.loads(data)
    pairs = [(row["formula"], row["value"]) for row in data["rewards"]]
    return RewardSpec(pairs, float(data.get("discount", 0.95)), data.get("mode", PREFIX))


def spec_to_json(spec: RewardSpec) -> dict:
    return {"discount": spec.discount, "mode": spec.mode,
            "rewards": [{"formula": to_text(f), "value": r} for f, r in spec.pairs]}


def load_domain(path: str) -> DomainModel:
    with open(path) as fh:
        return domain_from_json(json.load(fh))


def load_spec(path: str) -> RewardSpec:
    with open(path) as fh:
        return spec_from_json(json.load(fh))
