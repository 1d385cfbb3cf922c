"""Value iteration, greedy policies, exact finite-horizon values and rollouts."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .rewards import ExtendedMdp

TIE_TOL = 1e-10


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class SolverConfig:
    gamma: float = 0.95
    epsilon: float = 1e-8
    max_iters: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("value iteration needs a discount strictly between 0 and 1")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")

    @property
    def threshold(self) -> float:
        return self.epsilon * (1.0 - self.gamma) / (2.0 * self.gamma)


@dataclass
class ValueFunction:
    mdp: ExtendedMdp
    values: np.ndarray

    def __getitem__(self, s: int) -> float:
        return float(self.values[s])

    def to_json(self) -> Dict[str, float]:
        return {self.mdp.encode(s): float(v) for s, v in enumerate(self.values)}


@dataclass
class Policy:
    mdp: ExtendedMdp
    choice: np.ndarray  # action index per extended state

    def __getitem__(self, s: int) -> str:
        return self.mdp.actions[int(self.choice[s])]

    def __len__(self) -> int:
        return len(self.choice)

    def as_dict(self) -> Dict[int, str]:
        return {s: self[s] for s in range(len(self.choice))}

    def to_json(self) -> Dict[str, str]:
        return {self.mdp.encode(s): self[s] for s in range(len(self.choice))}


@dataclass
class SolveResult:
    value: ValueFunction
    policy: Policy
    iterations: int
    residual: float


class _Model:
    """Per-action sparse transition matrices and reward vectors."""

    def __init__(self, mdp: ExtendedMdp):
        n, k = mdp.n_states, len(mdp.actions)
        self.n, self.k = n, k
        self.mats = []
        self.rewards = np.zeros((k, n))
        self.mask = np.zeros((k, n), dtype=bool)
        for a in range(k):
            rows, cols, probs = [], [], []
            for s in range(n):
                out = mdp.trans.get((s, a))
                if out is None:
                    continue
                self.mask[a, s] = True
                self.rewards[a, s] = mdp.reward[(s, a)]
                for d, p in out:
                    rows.append(s)
                    cols.append(d)
                    probs.append(p)
            self.mats.append(sparse.csr_matrix((probs, (rows, cols)), shape=(n, n)))
        if n and not self.mask.any(axis=0).all():
            raise ValueError("every extended state needs at least one applicable action")

    def q_values(self, v: np.ndarray, gamma: float) -> np.ndarray:
        q = np.full((self.k, self.n), -np.inf)
        for a in range(self.k):
            qa = self.rewards[a] + gamma * (self.mats[a] @ v)
            q[a] = np.where(self.mask[a], qa, -np.inf)
        return q


def greedy(q: np.ndarray) -> np.ndarray:
    """Lowest action index among those within a small tolerance of the maximum."""
    best = q.max(axis=0)
    tol = TIE_TOL * np.maximum(1.0, np.abs(best))
    return np.argmax(q >= (best - tol)[None, :], axis=0)


def value_iterate(mdp: ExtendedMdp, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Bellman iteration from V = 0 until the max-norm change drops below eps(1-g)/(2g)."""
    cfg = cfg or SolverConfig(gamma=mdp.spec.discount if mdp.spec.discount < 1 else 0.95)
    model = _Model(mdp)
    v = np.zeros(model.n)
    residual = np.inf
    for it in range(1, cfg.max_iters + 1):
        v_new = model.q_values(v, cfg.gamma).max(axis=0)
        residual = float(np.max(np.abs(v_new - v))) if model.n else 0.0
        v = v_new
        if residual < cfg.threshold:
            q = model.q_values(v, cfg.gamma)
            return SolveResult(ValueFunction(mdp, v), Policy(mdp, greedy(q)), it, residual)
    raise ConvergenceError(f"value iteration did not converge in {cfg.max_iters} sweeps "
                           f"(residual {residual:.3e})", residual, cfg.max_iters)


def policy_value(mdp: ExtendedMdp, policy: Policy, gamma: float) -> np.ndarray:
    """Exact value of a stationary policy, by solving the linear system."""
    model = _Model(mdp)
    n = model.n
    rows, cols, probs = [], [], []
    r = np.zeros(n)
    for s in range(n):
        a = int(policy.choice[s])
        r[s] = mdp.reward[(s, a)]
        for d, p in mdp.trans[(s, a)]:
            rows.append(s)
            cols.append(d)
            probs.append(p)
    p_mat = sparse.csr_matrix((probs, (rows, cols)), shape=(n, n))
    system = sparse.identity(n, format="csc") - gamma * p_mat.tocsc()
    return np.atleast_1d(spsolve(system, r))


def brute_force_value(mdp: ExtendedMdp, horizon: int, gamma: Optional[float] = None,
                      cap: int = 10 ** 8) -> Dict[int, float]:
    """Optimal discounted value over ``horizon`` steps by plain backward induction.

    Written with dictionaries and loops only, to stay independent of the
    vectorised solver it is used to check.
    """
    gamma = mdp.spec.discount if gamma is None else gamma
    work = horizon * sum(len(out) for out in mdp.trans.values())
    if work > cap:
        raise RuntimeError(f"brute force would need {work} updates (cap {cap})")
    value = {s: 0.0 for s in range(mdp.n_states)}
    for _ in range(horizon):
        nxt = {}
        for s in range(mdp.n_states):
            best = None
            for a in range(len(mdp.actions)):
                out = mdp.trans.get((s, a))
                if out is None:
                    continue
                q = mdp.reward[(s, a)] + gamma * sum(p * value[d] for d, p in out)
                if best is None or q > best:
                    best = q
            nxt[s] = best
        value = nxt
    return value


@dataclass
class SimulationStats:
    mean: float
    std: float
    stderr: float
    episodes: int
    horizon: int
    triggered: Tuple[float, ...]
    returns: np.ndarray

    def to_json(self) -> dict:
        return {"mean": self.mean, "std": self.std, "stderr": self.stderr,
                "episodes": self.episodes, "horizon": self.horizon,
                "triggered": list(self.triggered)}


def simulate(mdp: ExtendedMdp, policy: Policy, episodes: int, horizon: int, seed: int,
             gamma: Optional[float] = None) -> SimulationStats:
    """Roll out ``policy``; returns discounted-return statistics.

    ``triggered[i]`` is the fraction of episodes in which formula i paid its
    reward at least once.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    gamma = mdp.spec.discount if gamma is None else gamma
    rng = np.random.default_rng(seed)
    m = len(mdp.spec.pairs)
    returns = np.zeros(episodes)
    hits = np.zeros(m)
    absorbing = absorbing_states(mdp)
    for e in range(episodes):
        s = mdp.initial
        total, disc = 0.0, 1.0
        seen = set()
        for _ in range(horizon):
            a = int(policy.choice[s])
            total += disc * mdp.reward[(s, a)]
            seen |= mdp.fired[(s, a)]
            disc *= gamma
            out = mdp.trans[(s, a)]
            if len(out) == 1:
                s = out[0][0]
            else:
                u = rng.random()
                acc = 0.0
                for d, p in out:
                    acc += p
                    if u < acc:
                        s = d
                        break
                else:
                    s = out[-1][0]
            if s in absorbing:
                break
        returns[e] = total
        for i in seen:
            hits[i] += 1
    std = float(returns.std(ddof=1)) if episodes > 1 else 0.0
    return SimulationStats(float(returns.mean()), std, std / np.sqrt(max(episodes, 1)),
                           episodes, horizon, tuple(hits / max(episodes, 1)), returns)


def absorbing_states(mdp: ExtendedMdp) -> set:
    """States where every applicable action loops back with zero reward."""
    ok = {}
    for (s, a), out in mdp.trans.items():
        loop = out == [(s, 1.0)] and mdp.reward[(s, a)] == 0.0
        ok[s] = ok.get(s, True) and loop
    return {s for s, flag in ok.items() if flag}


def export_json(result: SolveResult) -> str:
    return json.dumps({"policy": result.policy.to_json(), "value": result.value.to_json(),
                       "iterations": result.iterations, "residual": result.residual},
                      indent=2, sort_keys=True)
