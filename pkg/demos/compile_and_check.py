"""
Compiling a temporal formula and checking it against the semantics
==================================================================

A formula goes through three automata: an NFA over letters that may
carry the ``last`` marker, an NFA with the marker folded away, and a
minimal DFA.  Every stage should accept exactly the traces that satisfy
the formula, which we confirm by enumeration.
"""
from nmrdp.automata import to_dot
from nmrdp.compiler import compile_formula
from nmrdp.corpus import APPENDIX, PARITY
from nmrdp.logic import parse
from nmrdp.semantics import enumerate_traces, satisfies

# "every request is eventually followed by coffee"
text = "G(request -> F coffee)"
alphabet = ("coffee", "request")
c = compile_formula(text, alphabet)
print(f"{text}")
print(f"  NFA with last: {c.nfa_last.n_states} states")
print(f"  NFA          : {c.nfa.n_states} states")
print(f"  DFA          : {c.dfa.n_states} states")
print(f"  minimal DFA  : {c.min_dfa.n_states} states")

f = parse(text)
errors = sum(c.min_dfa.accepts(t) != satisfies(t, f) for t in enumerate_traces(alphabet, 5))
print(f"  disagreements with the semantics on traces up to length 5: {errors}")

# A couple of traces by hand.
for trace in ([{"request"}], [{"request"}, {"coffee"}], [{"request"}, set(), {"request"}]):
    print(f"  {trace!s:40} accepted={c.min_dfa.accepts(trace)}")

# LDLf can say things LTLf cannot: "the trace has even length".
parity = compile_formula(PARITY, ("a",)).min_dfa
print(f"\n{PARITY}: {parity.n_states}-state DFA")
print("  lengths accepted:", [n for n in range(7) if parity.accepts([set()] * n)])

# The bundled reward formulas come in LTLf/LDLf pairs.  Not every pair
# denotes the same language; count where they part ways.
print("\nLTLf/LDLf pairs (traces up to length 4 that separate them):")
for item in APPENDIX:
    a = compile_formula(item.ltlf, item.alphabet).min_dfa
    b = compile_formula(item.ldlf, item.alphabet).min_dfa
    diff = sum(a.accepts(t) != b.accepts(t) for t in enumerate_traces(item.alphabet, 4))
    print(f"  {item.number:2d} {item.description:45} {diff:4d}")

# GraphViz source for the coffee DFA, ready for `dot -Tpng`.
print()
print(to_dot(c.min_dfa, name="coffee"))
