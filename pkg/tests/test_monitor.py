import itertools
import random

import pytest

from nmrdp.automata import reach
from nmrdp.compiler import formula_dfa
from nmrdp.corpus import PARITY, corpus_formulas, random_domain, random_formulas
from nmrdp.logic import parse
from nmrdp.monitor import (
    BAD, EARLY_POSITIVE, GOOD, NEGATIVE_TRANSFORM, MonitorColor as C, check_absorbing,
    color_states, coloring_to_dot, coloring_to_json, complete_runs, shape_rewards,
    shaping_deltas, shaping_invariance,
)
from nmrdp.rewards import RewardSpec, build_extended_mdp
from nmrdp.semantics import enumerate_traces, satisfies

AB = ("a", "b")


def colors_of(text, alphabet=("a",)):
    dfa = formula_dfa(text, alphabet)
    return dfa, color_states(dfa)


def walks_avoiding(dfa, q, avoid, length):
    """Is there a run of ``length`` letters from q that never enters ``avoid``?"""
    frontier = {q} - avoid
    for _ in range(length):
        frontier = {int(d) for x in frontier for d in dfa.delta[x]} - avoid
        if not frontier:
            return False
    return True


# colourings


def test_tt_all_true():
    _, colors = colors_of("tt")
    assert colors == {0: C.TRUE}


def test_eventually_a():
    dfa, colors = colors_of("F a")
    q1 = int(dfa.delta[dfa.initial, 1])
    assert colors[dfa.initial] == C.TEMP_FALSE
    assert colors[q1] == C.TRUE


def test_always_a():
    dfa, colors = colors_of("G a")
    q1 = int(dfa.delta[dfa.initial, 0])
    assert colors[dfa.initial] == C.TEMP_TRUE
    assert colors[q1] == C.FALSE


def test_will_true_and_will_false():
    dfa, colors = colors_of("X tt")
    assert sorted(c.value for c in colors.values()) == ["true", "will_true", "will_true"]
    dfa, colors = colors_of("!(X tt)")
    assert sorted(c.value for c in colors.values()) == ["false", "will_false", "will_false"]


def test_parity_will_temp_true():
    dfa, colors = colors_of(PARITY)
    assert colors[dfa.initial] == C.TEMP_TRUE
    assert colors[1 - dfa.initial] == C.WILL_TEMP_TRUE


def corpus_dfas():
    return [formula_dfa(t, a) for t, a in corpus_formulas()] + \
           [formula_dfa(f, AB) for f in random_formulas(60, seed=21)]


def test_absorbing_and_stable():
    for dfa in corpus_dfas():
        colors = color_states(dfa)
        assert check_absorbing(dfa, colors) == []
        for q, c in colors.items():
            if c in (C.TRUE, C.FALSE):
                assert {colors[d] for d in reach(dfa, q)} == {c}


def test_colour_definitions_by_bounded_walks():
    for dfa in corpus_dfas():
        colors = color_states(dfa)
        n = dfa.n_states
        t_star = {q for q, c in colors.items() if c == C.TRUE}
        f_star = {q for q, c in colors.items() if c == C.FALSE}
        for q, c in colors.items():
            if c == C.WILL_TRUE:
                assert not walks_avoiding(dfa, q, t_star, n)
            if c == C.WILL_FALSE:
                assert not walks_avoiding(dfa, q, f_star, n)
            if c == C.WILL_TEMP_TRUE:
                assert q not in dfa.finals
                assert not walks_avoiding(dfa, q, set(dfa.finals), n)
            if c == C.TEMP_TRUE:
                assert q in dfa.finals and not reach(dfa, q) <= dfa.finals
            if c == C.TEMP_FALSE:
                assert q not in dfa.finals
                assert reach(dfa, q) & dfa.finals


def test_true_and_false_are_final_verdicts():
    for text, alphabet in corpus_formulas():
        f = parse(text)
        dfa = formula_dfa(f, alphabet)
        colors = color_states(dfa)
        for t in enumerate_traces(alphabet, 5):
            q = dfa.initial
            masks = [sum(1 << k for k, p in enumerate(alphabet) if p in s) for s in t]
            for k, m in enumerate(masks):
                q = dfa.step(q, m)
                if colors[q] == C.TRUE:
                    assert satisfies(t, f), (text, t)
                if colors[q] == C.FALSE:
                    assert not satisfies(t, f), (text, t)


def test_every_state_coloured_once():
    for dfa in corpus_dfas():
        colors = color_states(dfa)
        assert set(colors) == set(range(dfa.n_states))
        assert all(isinstance(c, C) for c in colors.values())


def test_exports():
    dfa, colors = colors_of("F a")
    assert coloring_to_json(colors) == {"0": "temp_false", "1": "true"}
    dot = coloring_to_dot(dfa, colors)
    assert "palegreen" in dot and "lightgrey" in dot


# shaping


def small_domain(seed):
    rng = random.Random(seed)
    return random_domain(rng, max_states=3)


def test_ff_is_not_shaped():
    dom = small_domain(0)
    mdp = build_extended_mdp(dom, RewardSpec([("ff", 2)], discount=1.0))
    shaped = shape_rewards(mdp, [color_states(d) for d in mdp.dfas], EARLY_POSITIVE)
    for (s, a), r in shaped.reward.items():
        base = mdp.index[type(mdp.states[0])(*shaped.states[s][:3])]
        assert r == mdp.reward[(base, a)]


def test_negative_transform_constant_per_formula():
    rng = random.Random(4)
    checked = 0
    for _ in range(12):
        dom = random_domain(rng, max_states=3)
        fs = [random_formulas(1, seed=rng.randint(0, 10 ** 6), depth=3)[0] for _ in range(2)]
        values = [float(rng.randint(1, 4)) for _ in fs]
        # each formula alone: every complete trace loses exactly its reward
        for f, r in zip(fs, values):
            spec = RewardSpec([(f, r)], discount=1.0, mode="complete")
            mdp = build_extended_mdp(dom, spec)
            shaped = shape_rewards(mdp, [color_states(d) for d in mdp.dfas], NEGATIVE_TRANSFORM)
            deltas = shaping_deltas(mdp, shaped, 5)
            assert set(deltas.values()) == {-r}
            checked += len(deltas)
        spec = RewardSpec(list(zip(fs, values)), discount=1.0, mode="complete")
        mdp = build_extended_mdp(dom, spec)
        shaped = shape_rewards(mdp, [color_states(d) for d in mdp.dfas], NEGATIVE_TRANSFORM)
        assert set(shaping_deltas(mdp, shaped, 5).values()) == {-sum(values)}
        assert shaping_invariance(mdp, shaped, 5)
    assert checked > 0


def test_early_positive_pays_on_first_good_entry():
    dom = small_domain(2)
    spec = RewardSpec([("F a", 3)], discount=1.0)
    mdp = build_extended_mdp(dom, spec)
    colors = [color_states(d) for d in mdp.dfas]
    shaped = shape_rewards(mdp, colors, EARLY_POSITIVE)
    for (s, a), out in shaped.trans.items():
        st = shaped.states[s]
        entered = [d for d, _ in out if not st.bits[0] and colors[0][shaped.states[d].qs[0]] in GOOD]
        base = mdp.index[type(st)(st.qs, st.t, st.done)]
        bonus = 3 if entered else 0
        assert shaped.reward[(s, a)] == pytest.approx(mdp.reward[(base, a)] + bonus)


def test_discount_warning():
    dom = small_domain(3)
    mdp = build_extended_mdp(dom, RewardSpec([("F a", 1)], discount=0.9, mode="complete"))
    with pytest.warns(UserWarning, match="earlier rewards"):
        shape_rewards(mdp, [color_states(d) for d in mdp.dfas], NEGATIVE_TRANSFORM)


def test_shaping_errors():
    dom = small_domain(3)
    mdp = build_extended_mdp(dom, RewardSpec([("F a", 1)], discount=1.0))
    colors = [color_states(d) for d in mdp.dfas]
    with pytest.raises(ValueError):
        shape_rewards(mdp, colors, NEGATIVE_TRANSFORM)
    with pytest.raises(ValueError):
        shape_rewards(mdp, colors, "sideways")
    with pytest.raises(ValueError):
        shape_rewards(mdp, colors * 2, EARLY_POSITIVE)


def test_shaped_mdp_reports_lost_minimality():
    dom = small_domain(5)
    mdp = build_extended_mdp(dom, RewardSpec([("G a", 1)], discount=1.0, mode="complete"))
    shaped = shape_rewards(mdp, [color_states(d) for d in mdp.dfas], NEGATIVE_TRANSFORM)
    assert "minimality" in shaped.note
    assert all(len(s.bits) == 1 for s in shaped.states)


def test_complete_runs_enumerates_action_sequences():
    dom = small_domain(6)
    mdp = build_extended_mdp(dom, RewardSpec([("tt", 1)], discount=1.0, mode="complete"))
    runs = list(complete_runs(mdp, 2))
    assert len(runs) == len(dict(runs))
    assert all(total == 1.0 for _, total in runs)


def test_colour_sets_are_disjoint():
    assert not (GOOD & BAD)
    assert set(itertools.chain(GOOD, BAD)) < set(C)
