import itertools
import sys

import pytest

from nmrdp.semantics import enumerate_traces, satisfies


def mismatches(accepts, f, alphabet, max_len):
    """Traces of length <= max_len on which ``accepts`` disagrees with the oracle."""
    bad = []
    for trace in enumerate_traces(alphabet, max_len):
        if bool(accepts(trace)) != satisfies(trace, f):
            bad.append(trace)
    return bad


def same_language(acc_a, acc_b, alphabet, max_len):
    return all(acc_a(t) == acc_b(t) for t in enumerate_traces(alphabet, max_len))


def all_subsets(items):
    items = list(items)
    for k in range(len(items) + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


@pytest.fixture
def ab():
    return ("a", "b")


def histories(domain, max_states, extra_actions=()):
    """Feasible (states, actions, probability) trajectories with 1..max_states states."""
    out = []

    def grow(states, actions, prob):
        out.append((list(states), list(actions), prob))
        if len(states) == max_states:
            return
        t = states[-1]
        for a in domain.applicable(t):
            for t2, p in domain.successors(t, a).items():
                grow(states + [t2], actions + [a], prob * p)

    grow([domain.initial], [], 1.0)
    return out


def equivalence_violations(domain, spec, mdp, max_len=5, prob_tol=1e-12):
    """Check the three conditions relating a domain to its extended MDP.

    1. the initial extended state projects onto the initial domain state;
    2. each domain transition has exactly one extended counterpart with the
       same probability;
    3. along every feasible trajectory the extended rewards equal the rewards
       of the corresponding prefixes.
    """
    from nmrdp.rewards import COMPLETE, trace_letters, reward_of_prefix

    bad = []
    if mdp.tau(mdp.initial) != domain.initial:
        bad.append("initial state does not project onto t0")
    if mdp.states[mdp.initial].qs != tuple(d.initial for d in mdp.dfas):
        bad.append("initial automaton states differ")
    for s, st in enumerate(mdp.states):
        if st.done:
            continue
        for a in domain.applicable(st.t):
            ai = mdp.actions.index(a)
            out = mdp.trans.get((s, ai))
            if out is None:
                bad.append(f"action {a} missing at {mdp.encode(s)}")
                continue
            for t2, p in domain.successors(st.t, a).items():
                match = [(d, q) for d, q in out if mdp.tau(d) == t2]
                if len(match) != 1 or abs(match[0][1] - p) > prob_tol:
                    bad.append(f"successor mismatch at {mdp.encode(s)} --{a}--> {sorted(t2)}")
            if abs(sum(q for _, q in out) - 1.0) > prob_tol:
                bad.append(f"mass at {mdp.encode(s)}/{a}")
    stop = mdp.actions.index("stop") if mdp.mode == COMPLETE else None

    def walk(s, states, actions):
        if stop is not None:
            letters = trace_letters(states, actions + ["stop"], mdp.action_props)
            if mdp.reward[(s, stop)] != reward_of_prefix(spec, letters):
                bad.append(f"stop reward mismatch along {states}")
        if len(states) == max_len:
            return
        t = states[-1]
        for a in domain.applicable(t):
            ai = mdp.actions.index(a)
            if stop is None:
                letters = trace_letters(states, actions + [a], mdp.action_props)
                if mdp.reward[(s, ai)] != reward_of_prefix(spec, letters):
                    bad.append(f"reward mismatch along {states} then {a}")
            for t2 in domain.successors(t, a):
                nxt = [d for d, _ in mdp.trans[(s, ai)] if mdp.tau(d) == t2]
                if len(nxt) != 1:
                    bad.append(f"no unique successor along {states + [t2]}")
                    continue
                walk(nxt[0], states + [t2], actions + [a])

    walk(mdp.initial, [domain.initial], [])
    return bad


def clock_domain(horizon=3, p_flip=0.5, final_actions=False):
    """Domain whose clock propositions k1..kH count steps; g flips under 'work'.

    At the last clock value no action is applicable unless ``final_actions``,
    which adds a move to an absorbing state marked ``z``.
    """
    from nmrdp.rewards import DomainModel

    clocks = [f"k{i}" for i in range(1, horizon + 1)]
    props = tuple(clocks) + ("g", "z")

    def st(k, g):
        return frozenset(([clocks[k - 1]] if k else []) + (["g"] if g else []))

    trans = {}
    for k in range(horizon):
        for g in (0, 1):
            trans[(st(k, g), "work")] = {st(k + 1, 1 - g): p_flip, st(k + 1, g): 1 - p_flip}
            trans[(st(k, g), "wait")] = {st(k + 1, g): 1.0}
    if final_actions:
        end = frozenset({"z"})
        for g in (0, 1):
            trans[(st(horizon, g), "wait")] = {end: 1.0}
        trans[(end, "wait")] = {end: 1.0}
    return DomainModel(props, ("work", "wait"), st(0, 0), trans)


def bisimilar_pairs(dfa):
    """Pairs of distinct states no label-respecting experiment separates (table filling)."""
    n = dfa.n_states
    labels = dfa.labels or tuple(frozenset({0}) if q in dfa.finals else frozenset()
                                 for q in range(n))
    apart = {(p, q) for p in range(n) for q in range(n) if labels[p] != labels[q]}
    changed = True
    while changed:
        changed = False
        for p in range(n):
            for q in range(n):
                if p != q and (p, q) not in apart:
                    for m in range(dfa.n_letters):
                        if (int(dfa.delta[p, m]), int(dfa.delta[q, m])) in apart:
                            apart.add((p, q))
                            changed = True
                            break
    return [(p, q) for p in range(n) for q in range(p + 1, n) if (p, q) not in apart]


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines so they survive output capture."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
