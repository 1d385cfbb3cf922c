"""Reference formulas and a random formula generator for property tests."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .logic.parser import parse
from .logic.syntax import (
    FF, PAnd, PNot, POr, PTRUE, PVar, TT, Always, And, BoolLit, Box, Check, Concat,
    Diamond, End, Eventually, Last, Next, Not, Or, PropAtom, PropTest, Release, Star, Union,
    Until, WeakNext, props_of,
)


@dataclass(frozen=True)
class AppendixItem:
    number: int
    description: str
    ltlf: str
    ldlf: str

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(sorted(props_of(parse(self.ltlf)) | props_of(parse(self.ldlf))))


# Reward formulas written both in LTLf and in LDLf; the bounded ones use k = 2.
APPENDIX: Tuple[AppendixItem, ...] = (
    AppendixItem(1, "reward only at the first state where G holds",
                 "!G U (G && last)", "<(!G)*; G> end"),
    AppendixItem(2, "reward at every state following G",
                 "F G", "<true*; G; true*> end"),
    AppendixItem(3, "G rewarded at most once every k steps",
                 "F(X X (G && last)) && (!G && X !G)",
                 "<(!G)*; G; (!G; !G; (!G)*; G)*> end"),
    AppendixItem(4, "G rewarded within k steps of a state with !G",
                 "F(!G && (X(last -> G) && X X(last -> G)))",
                 "<true*; !G; G + ((!G + (!G; !G)); G)> end"),
    AppendixItem(5, "G followed immediately by H and then I",
                 "F(G && X H && X X(I && last))", "<true*; G; H; I> end"),
    AppendixItem(6, "G rewarded whenever it follows C",
                 "F(C && X F(G && last))", "<true*; C; true*; G> end"),
    AppendixItem(7, "only the first G following C",
                 "F(C && !G U (G && last))", "<true*; C; !G; (!G)*; G> end"),
    AppendixItem(8, "G immediately after C",
                 "F(C && X(G && last))", "<true*; C; G> end"),
    AppendixItem(9, "G within k steps of C",
                 "F(G && last && (X X C || X X C || X X C))",
                 "<true*; C; G + ((true + (true; true)); G)> end"),
    AppendixItem(10, "only the first G within k steps of C",
                 "F(C && (X(last <-> G) && X X(last <-> G)))",
                 "<true*; C; G + ((!G + (!G; !G)); G)> end"),
    AppendixItem(11, "G has always been true",
                 "G G", "<G*> end"),
    AppendixItem(12, "C held until G",
                 "C U (G && last)", "<C*; G> end"),
)

PARITY = "<(true; true)*> end"
PR_STAR = "<(p; r)*> end"
PR_CANDIDATE = "last || (p && G(p -> r) && G(r -> (p || last)))"

EXTRA: Tuple[str, ...] = (
    PARITY, PR_STAR, PR_CANDIDATE,
    "G(request -> F coffee)",
    "<while cold do heat> end",
    "<if wet then dry else true> tt",
)


def corpus_formulas() -> List[Tuple[str, Tuple[str, ...]]]:
    """Every bundled formula with the alphabet it is compiled over."""
    out = []
    for item in APPENDIX:
        out.append((item.ltlf, item.alphabet))
        out.append((item.ldlf, item.alphabet))
    for text in EXTRA:
        out.append((text, tuple(sorted(props_of(parse(text)))) or ("a",)))
    return out


# --------------------------------------------------------------------------
# random generation


def random_guard(rng: random.Random, props: Sequence[str], depth: int = 1):
    roll = rng.random()
    if depth <= 0 or roll < 0.5:
        if rng.random() < 0.15:
            return PTRUE
        return PVar(rng.choice(props))
    if roll < 0.7:
        return PNot(random_guard(rng, props, depth - 1))
    cls = PAnd if roll < 0.85 else POr
    return cls(random_guard(rng, props, depth - 1), random_guard(rng, props, depth - 1))


def random_path(rng: random.Random, props: Sequence[str], depth: int):
    if depth <= 1:
        if rng.random() < 0.8:
            return PropTest(random_guard(rng, props))
        return Check(random_formula(rng, props, 1, ldlf=True))
    kind = rng.choice(["step", "test", "union", "concat", "star", "star"])
    if kind == "step":
        return PropTest(random_guard(rng, props))
    if kind == "test":
        return Check(random_formula(rng, props, depth - 1, ldlf=True))
    if kind == "union":
        return Union(random_path(rng, props, depth - 1), random_path(rng, props, depth - 1))
    if kind == "concat":
        return Concat(random_path(rng, props, depth - 1), random_path(rng, props, depth - 1))
    return Star(random_path(rng, props, depth - 1))


_LEAVES = ["prop", "prop", "prop", "tt", "ff", "true", "false", "last", "end"]


def random_formula(rng: random.Random, props: Sequence[str], depth: int, ldlf: bool = True):
    """A random formula of nesting depth at most ``depth``.

    Mixes LTLf connectives with (when ``ldlf``) diamond and box modalities.
    """
    if depth <= 1:
        leaf = rng.choice(_LEAVES)
        if leaf == "prop":
            return PropAtom(rng.choice(props))
        return {"tt": TT(), "ff": FF(), "true": BoolLit(True), "false": BoolLit(False),
                "last": Last(), "end": End()}[leaf]
    ops = ["not", "and", "or", "next", "wnext", "until", "release", "ev", "alw"]
    if ldlf:
        ops += ["dia", "dia", "box", "box"]
    op = rng.choice(ops)
    sub = lambda: random_formula(rng, props, depth - 1, ldlf)  # noqa: E731
    if op == "not":
        return Not(sub())
    if op == "and":
        return And(sub(), sub())
    if op == "or":
        return Or(sub(), sub())
    if op == "next":
        return Next(sub())
    if op == "wnext":
        return WeakNext(sub())
    if op == "until":
        return Until(sub(), sub())
    if op == "release":
        return Release(sub(), sub())
    if op == "ev":
        return Eventually(sub())
    if op == "alw":
        return Always(sub())
    path = random_path(rng, props, min(depth - 1, 3))
    return (Diamond if op == "dia" else Box)(path, sub())


def random_formulas(count: int, props: Sequence[str] = ("a", "b"), depth: int = 4,
                    seed: int = 0, ldlf: bool = True) -> List:
    rng = random.Random(seed)
    return [random_formula(rng, props, rng.randint(1, depth), ldlf) for _ in range(count)]


def random_domain(rng: random.Random, props: Sequence[str] = ("a", "b"), max_states: int = 4,
                  actions: Sequence[str] = ("x", "y")):
    """A random probabilistic domain over at most ``max_states`` interpretations."""
    from .rewards import DomainModel

    universe = [frozenset(p for k, p in enumerate(props) if m >> k & 1)
                for m in range(1 << len(props))]
    states = rng.sample(universe, rng.randint(1, min(max_states, len(universe))))
    trans = {}
    for t in states:
        usable = [a for a in actions if rng.random() < 0.8] or [rng.choice(list(actions))]
        for a in usable:
            targets = rng.sample(states, rng.randint(1, len(states)))
            weights = [rng.randint(1, 4) for _ in targets]
            total = sum(weights)
            trans[(t, a)] = {d: w / total for d, w in zip(targets, weights)}
    return DomainModel(tuple(props), tuple(actions), states[0], trans)


def random_spec(rng: random.Random, props: Sequence[str] = ("a", "b"), max_formulas: int = 2,
                depth: int = 3, discount: float = 0.9, mode: str = "prefix"):
    from .rewards import RewardSpec

    pairs = [(random_formula(rng, props, rng.randint(1, depth)), float(rng.randint(1, 5)))
             for _ in range(rng.randint(1, max_formulas))]
    return RewardSpec(pairs, discount, mode)
