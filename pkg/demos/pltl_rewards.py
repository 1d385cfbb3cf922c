"""
Past-time rewards by reversal
=============================

A past-time condition looks backwards from the current step, e.g.
"coffee now, and a request at some earlier step".  Read the prefix in
reverse and this becomes an ordinary future-time formula about the
reversed trace: ``coffee && X F request``.  Reversing that formula's
automaton and determinizing it gives a DFA that runs forwards over the
prefix and accepts exactly when the past-time condition holds.
"""
from nmrdp.compiler import formula_dfa
from nmrdp.rewards import pltl_reward_dfa
from nmrdp.semantics import enumerate_traces, satisfies
from nmrdp.logic import parse

alphabet = ("coffee", "request")
text = "coffee && X F request"
backwards = pltl_reward_dfa(text, alphabet)
forwards = formula_dfa(text, alphabet)
print(f"{text}")
print(f"  forward DFA (about the future): {forwards.n_states} states")
print(f"  reversed DFA (about the past) : {backwards.n_states} states")

prefixes = [
    [{"coffee"}],
    [{"request"}, {"coffee"}],
    [{"request"}, set(), set(), {"coffee"}],
    [{"request"}, {"coffee"}, set()],
    [{"coffee"}, {"request"}],
]
for p in prefixes:
    print(f"  {p!s:45} rewarded={backwards.accepts(p)}")

# The reversed DFA agrees with the semantics applied to reversed prefixes.
f = parse(text)
errors = sum(backwards.accepts(t) != satisfies(t[::-1], f)
             for t in enumerate_traces(alphabet, 5))
print(f"  disagreements with the reversed semantics up to length 5: {errors}")

# Reversal can cost an exponential.  "a held exactly k steps ago" read
# forwards must remember the last k letters, while its mirror image
# "a holds k steps from now" needs only a counter.
print("\n'a held k steps ago':  k  past DFA  future DFA")
for k in range(1, 6):
    g = "X " * k + "a"
    past = pltl_reward_dfa(g, ("a",))
    fut = formula_dfa(g, ("a",))
    print(f"{'':22}{k:2d}  {past.n_states:8d}  {fut.n_states:10d}")
