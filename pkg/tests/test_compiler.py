import pytest

from nmrdp.automata import Nfa, StateCapError, mask_letter
from nmrdp.compiler import (
    FALSE, TRUE, BAnd, BOr, CompileError, Quoted, closure, compile_formula, delta,
    delta_epsilon, e_expand, eliminate_last, ldlf_to_nfa, ltlf_to_nfa, minimal_models, pb_eval,
)
from nmrdp.corpus import APPENDIX, PARITY, corpus_formulas, random_formulas
from nmrdp.logic import (
    FF, PVar, TT, Always, And, Box, Diamond, Eventually, FMark, PropAtom, PropTest, TMark,
    expand_sugar, parse, to_nnf,
)
from nmrdp.semantics import enumerate_traces, satisfies

from conftest import all_subsets, mismatches

a, b = PropAtom("a"), PropAtom("b")
A = PropTest(PVar("a"))


def letter(*props):
    return frozenset(props)


def with_last(trace):
    if not trace:
        return trace
    return tuple(trace[:-1]) + (trace[-1] | {"last"},)


def brute_minimal_models(pb, atoms):
    """Subset-minimal satisfying sets, by enumerating every subset of ``atoms``."""
    sat = [s for s in all_subsets(atoms) if pb_eval(pb, s)]
    return {s for s in sat if not any(o < s for o in sat)}


def quoted_atoms(pb):
    if isinstance(pb, Quoted):
        return {pb.formula}
    if isinstance(pb, (BAnd, BOr)):
        return quoted_atoms(pb.left) | quoted_atoms(pb.right)
    return set()


# delta


def test_delta_prop():
    assert delta(a, letter("a")) == TRUE
    assert delta(a, letter("b")) == FALSE


def test_delta_eventually_without_a():
    assert delta(Eventually(a), letter()) == Quoted(Eventually(a))


def test_delta_always_at_last():
    assert delta(Always(a), letter("a", "last")) == TRUE
    assert delta(Always(a), letter("last")) == FALSE


@pytest.mark.parametrize("f,interp,expect", [
    (Diamond(A, b), letter("a"), Quoted(b)),
    (Diamond(A, b), letter("b"), FALSE),
    (Diamond(A, b), letter("a", "last"), FALSE),
    (Diamond(A, TT()), letter("a", "last"), TRUE),
    (Box(A, FF()), letter("b"), TRUE),
    (Box(A, FF()), letter("a", "last"), FALSE),
    (Box(A, FF()), letter("last"), TRUE),
    (Box(A, b), letter("a"), Quoted(b)),
])
def test_delta_modal_rows(f, interp, expect):
    assert delta(f, interp) == expect


def test_delta_star_unrolls_once():
    star = to_nnf(parse("<a*> b"))
    assert delta(star, letter("b")) == TRUE
    assert delta(star, letter("a")) == Quoted(star)
    assert delta(star, letter()) == FALSE


def test_delta_epsilon_table():
    assert delta_epsilon(Diamond(A, TT())) == FALSE
    assert delta_epsilon(Box(A, FF())) == TRUE
    assert delta_epsilon(And(TT(), Box(A, FF()))) == TRUE


def test_delta_epsilon_matches_empty_trace():
    for f in random_formulas(150, seed=4):
        g = to_nnf(expand_sugar(f))
        assert (delta_epsilon(g) == TRUE) == satisfies([], f)


def test_e_expand():
    assert e_expand(TMark(a)) == a
    assert e_expand(parse("<a>b")) == parse("<a>b")
    assert e_expand(FMark(Diamond(A, TMark(b)))) == Diamond(A, b)


def test_delta_outputs_never_contain_markers():
    for f in random_formulas(100, seed=6):
        g = to_nnf(expand_sugar(f))
        for m in range(8):
            out = delta(g, mask_letter(("a", "b", "last"), m))
            for atom in quoted_atoms(out):
                assert e_expand(atom) == atom


# minimal models


def test_minimal_models_examples():
    assert minimal_models(TRUE) == {frozenset()}
    assert minimal_models(FALSE) == frozenset()
    assert minimal_models(BOr(Quoted(a), Quoted(b))) == {frozenset({a}), frozenset({b})}
    pb = BAnd(Quoted(a), BOr(Quoted(a), Quoted(b)))
    assert minimal_models(pb) == {frozenset({a})} == brute_minimal_models(pb, {a, b})


def test_minimal_models_against_enumeration():
    for f in random_formulas(150, seed=8):
        g = to_nnf(expand_sugar(f))
        for m in range(8):
            pb = delta(g, mask_letter(("a", "b", "last"), m))
            atoms = quoted_atoms(pb)
            if len(atoms) > 10:
                continue
            got = set(minimal_models(pb))
            assert got == brute_minimal_models(pb, atoms)
            assert not any(x < y for x in got for y in got)


# NFA construction


def test_tt_accepts_everything():
    nfa = eliminate_last(ldlf_to_nfa(TT(), ("a",)))
    assert all(nfa.accepts(t) for t in enumerate_traces(("a",), 4))


def test_parity_even_lengths():
    nfa = eliminate_last(ldlf_to_nfa(parse(PARITY), ("a",)))
    for t in enumerate_traces(("a",), 10, cap=10 ** 4):
        assert nfa.accepts(t) == (len(t) % 2 == 0)


def test_appendix_item_one_languages_agree():
    item = APPENDIX[0]
    left = compile_formula(item.ltlf, item.alphabet).nfa
    right = compile_formula(item.ldlf, item.alphabet).nfa
    assert all(left.accepts(t) == right.accepts(t) for t in enumerate_traces(item.alphabet, 5))


def test_last_marked_nfa_matches_oracle():
    for f in random_formulas(60, seed=9):
        for build in (ldlf_to_nfa, ltlf_to_nfa):
            nfa = build(f, ("a", "b"))
            for t in enumerate_traces(("a", "b"), 3):
                if t:
                    assert nfa.accepts(with_last(t)) == satisfies(t, f)


def test_trivially_true_self_loop():
    for text, alphabet in corpus_formulas():
        nfa = ldlf_to_nfa(parse(text), alphabet)
        empty = nfa.contents.index(frozenset())
        for m in range(nfa.n_letters):
            assert nfa.succ[(empty, m)] == {empty}


def test_states_within_closure():
    for f in random_formulas(100, seed=10) + [parse(t) for t, _ in corpus_formulas()]:
        root = to_nnf(expand_sugar(f))
        cl = closure(root)
        nfa = ldlf_to_nfa(f)
        for q, content in enumerate(nfa.contents):
            if nfa.names[q] == "<empty trace>":
                continue
            assert content <= cl
        assert nfa.n_states <= 2 ** len(cl) + 1


def test_master_oracle_property():
    bad = []
    for f in random_formulas(200, seed=1):
        for direct in (False, True):
            c = compile_formula(f, ("a", "b"), direct_ltlf=direct)
            bad += mismatches(c.nfa.accepts, f, ("a", "b"), 4)
            bad += mismatches(c.min_dfa.accepts, f, ("a", "b"), 4)
    assert bad == []


def test_direct_ltlf_agrees_with_expansion():
    for f in random_formulas(100, seed=2, ldlf=False):
        x = compile_formula(f, ("a", "b")).min_dfa
        y = compile_formula(f, ("a", "b"), direct_ltlf=True).min_dfa
        assert all(x.accepts(t) == y.accepts(t) for t in enumerate_traces(("a", "b"), 5))


# eliminate_last


def test_eliminate_last_single_step():
    nfa = eliminate_last(ldlf_to_nfa(parse("a && last"), ("a",)))
    assert "last" not in nfa.alphabet
    for t in enumerate_traces(("a",), 4):
        assert nfa.accepts(t) == (len(t) == 1 and "a" in t[0])


def test_eliminate_last_without_last_edges():
    succ = {(0, 0): frozenset({1}), (1, 1): frozenset({0})}
    nfa = Nfa(("a", "last"), 2, frozenset({0}), frozenset({0}), succ)
    out = eliminate_last(nfa)
    assert out.alphabet == ("a",)
    assert out.succ == succ
    assert out.finals == {0, 2}


def test_eliminate_last_needs_last():
    with pytest.raises(CompileError):
        eliminate_last(Nfa(("a",), 1, frozenset({0}), frozenset({0}), {}))


# limits


def test_state_cap():
    with pytest.raises(StateCapError):
        ldlf_to_nfa(parse("F(a && X X b)"), ("a", "b"), state_cap=2)


def test_alphabet_cap():
    props = tuple(f"p{k}" for k in range(13))
    with pytest.raises(CompileError):
        ldlf_to_nfa(parse("F p0"), props)


def test_undeclared_props():
    with pytest.raises(CompileError):
        ldlf_to_nfa(parse("F c"), ("a",))
