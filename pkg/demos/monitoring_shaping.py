"""
Runtime monitoring and reward shaping
=====================================

Each DFA state gets a colour saying what can still happen: the formula
may be true now and forever (TRUE), true now but breakable
(TEMP_TRUE), certain to become true (WILL_TRUE), and so on.  The
colours drive two shaping schemes.  The early-positive scheme pays a
bonus as soon as success is guaranteed.  The negative transform
charges a penalty as soon as failure becomes possible; on complete
traces it shifts every return by the same constant.
"""
import warnings
from pathlib import Path

from nmrdp.compiler import formula_dfa
from nmrdp.monitor import (
    EARLY_POSITIVE, NEGATIVE_TRANSFORM, color_states, shape_rewards, shaping_deltas,
)
from nmrdp.rewards import RewardSpec, build_extended_mdp, load_domain, load_spec

for text in ("F a", "G a", "a U b", "G(a -> X b)"):
    dfa = formula_dfa(text, ("a", "b"))
    colors = color_states(dfa)
    shown = ", ".join(f"{q}:{c.name}" for q, c in sorted(colors.items()))
    print(f"{text:12} {shown}")

data = Path(__file__).parent / "data"
domain = load_domain(data / "coffee_domain.json")

# Early positive: extra reward on the first entry into a state from which
# success can no longer be lost.  With discounting this can change which
# policy is optimal, and the library says so.
prefix_mdp = build_extended_mdp(domain, RewardSpec([("F coffee", 1.0)], discount=0.9))
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    early = shape_rewards(prefix_mdp, [color_states(d) for d in prefix_mdp.dfas],
                          EARLY_POSITIVE)
print(f"\nearly positive: {prefix_mdp.n_states} -> {early.n_states} states")
for w in caught:
    print(f"  warning: {w.message}")
changed = sum(early.reward[k] != prefix_mdp.reward.get(k, 0.0) for k in early.reward)
print(f"  {changed} of {len(early.reward)} state-action rewards differ from the original")

# Negative transform on complete traces (the agent decides when to stop).
spec = load_spec(data / "coffee_complete.json")
mdp = build_extended_mdp(domain, spec)
shaped = shape_rewards(mdp, [color_states(d) for d in mdp.dfas], NEGATIVE_TRANSFORM)
deltas = shaping_deltas(mdp, shaped, 5)
shifts = sorted({round(v, 9) for v in deltas.values()})
print(f"\nnegative transform over {len(deltas)} complete runs of at most 5 steps")
print(f"  return shifts observed: {shifts}")
print(f"  minus the sum of rewards: {-sum(spec.values)}")
