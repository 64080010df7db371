"""Equilibria of the sequential observational-learning game.

Agent ``i`` sees the actions of agents ``1..i-1`` and one private signal.
Payoffs carry no externalities, so a profile is an equilibrium exactly when
every positive-probability (history, signal) pair is answered with an action
that is optimal at the Bayesian posterior.  That makes forward construction
on the history tree both sufficient and complete for pure tie resolutions.

Histories are tuples of actions.  A profile maps ``(history, signal)`` to a
distribution over actions given as ``{action: Fraction}``.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParameterViolation, ProfileIncomplete, ResourceLimit
from .model import (
    ZERO,
    BeliefDistribution,
    DecisionProblem,
    InformationStructure,
    as_prior,
    belief_from_likelihoods,
    best_response_set,
    fmt,
    iid_power,
    posterior_update,
    signal_beliefs,
)

DEFAULT_HORIZON = 10
DEFAULT_NODE_CAP = 2_000_000
DEFAULT_ENUMERATE_CAP = 256

History = tuple
ActionDist = dict


@dataclass(frozen=True)
class HistoryNode:
    actions: History
    lik_h: Fraction
    lik_l: Fraction

    @property
    def depth(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class TieBreakPolicy:
    """How an on-path indifference is resolved.

    ``preference=None`` means action-list order.  ``enumerate_cap`` marks the
    enumerate-all policy (see :func:`enumerate_equilibria`).
    """

    preference: tuple | None = None
    enumerate_cap: int | None = None

    def order(self, actions: tuple) -> tuple:
        if self.preference is None:
            return tuple(actions)
        return tuple(a for a in self.preference if a in actions)

    def validate(self, d: DecisionProblem) -> None:
        if self.preference is not None and sorted(map(repr, self.preference)) != sorted(map(repr, d.actions)):
            raise ParameterViolation("tie-break preference must be a permutation of the actions")


FIRST_IN_ACTION_ORDER = TieBreakPolicy()


def prefer(*actions) -> TieBreakPolicy:
    return TieBreakPolicy(preference=tuple(actions))


def enumerate_all(cap: int = DEFAULT_ENUMERATE_CAP) -> TieBreakPolicy:
    return TieBreakPolicy(enumerate_cap=cap)


class StrategyProfile:
    """Behaviour of agents ``1..horizon``.

    Either backed by an explicit table keyed by ``(history, signal)`` or by a
    rule ``decide(history, signal) -> {action: prob}``.
    """

    def __init__(self, horizon: int, decide: Callable | None = None, table: dict | None = None, label: str = ""):
        if (decide is None) == (table is None):
            raise ValueError("give exactly one of decide or table")
        self.horizon = horizon
        self.table = table
        self._decide = decide
        self.label = label

    def decision(self, history: History, signal: Hashable) -> ActionDist:
        if self.table is None:
            return self._decide(history, signal)
        try:
            return self.table[(history, signal)]
        except KeyError:
            raise ProfileIncomplete(
                f"profile has no decision at history {list(history)} with signal {signal!r}") from None

    __call__ = decision

    def to_json(self, pi: InformationStructure) -> dict:
        """Serialize as ``{"horizon", "decisions": {path: {signal: {action: p/q}}}}``.

        Only histories reachable under the profile are written.
        """
        decisions: dict[str, dict] = {}
        for level in _tree(pi, self, self.horizon):
            for node in level:
                key = "/".join(map(str, node.actions))
                decisions[key] = {
                    str(s): {str(a): fmt(q) for a, q in self.decision(node.actions, s).items()}
                    for s in pi.signals
                }
        return {"horizon": self.horizon, "decisions": decisions}


@dataclass
class EquilibriumResult:
    profile: StrategyProfile
    values: list[Fraction]
    action_laws: list[dict[str, dict]]
    diagnostics: dict = field(default_factory=dict)

    def value(self, i: int) -> Fraction:
        """V_i for 1-based agent index ``i``."""
        return self.values[i - 1]


class EquilibriumList(list):
    """List of equilibria with a ``truncated`` flag."""

    truncated = False


@dataclass(frozen=True)
class Violation:
    history: History
    signal: Hashable
    chosen: Hashable
    better: Hashable
    posterior: Fraction


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violation: Violation | None = None

    def __bool__(self):
        return self.ok


def _children(level, pi, decide, collect_laws=True):
    """Advance one period; returns (children, law_h, law_l, pruned)."""
    nxt: dict[History, list[Fraction]] = {}
    law_h: dict = {}
    law_l: dict = {}
    for node in level:
        for s, l, h in pi:
            jh, jl = node.lik_h * h, node.lik_l * l
            if not (jh or jl):
                continue
            for a, q in decide(node.actions, s).items():
                if not q:
                    continue
                if collect_laws:
                    law_h[a] = law_h.get(a, ZERO) + jh * q
                    law_l[a] = law_l.get(a, ZERO) + jl * q
                acc = nxt.setdefault(node.actions + (a,), [ZERO, ZERO])
                acc[0] += jh * q
                acc[1] += jl * q
    children = [HistoryNode(k, v[0], v[1]) for k, v in nxt.items() if v[0] or v[1]]
    return children, law_h, law_l, len(nxt) - len(children)


def _tree(pi, profile, depth, node_cap=None):
    """Surviving nodes at depths ``0..depth-1``."""
    level = [HistoryNode((), Fraction(1), Fraction(1))]
    levels = [level]
    count = 1
    for _ in range(depth - 1):
        level, *_ = _children(level, pi, profile.decision, collect_laws=False)
        count += len(level)
        if count > (node_cap or DEFAULT_NODE_CAP):
            raise ResourceLimit(f"history tree exceeds {node_cap or DEFAULT_NODE_CAP} nodes")
        levels.append(level)
    return levels


def _sort_key(d: DecisionProblem):
    pos = {a: k for k, a in enumerate(d.actions)}
    return lambda node: tuple(pos.get(a, len(pos)) for a in node.actions)


def _payoff(d, prior, law_h, law_l) -> Fraction:
    return (prior.mu0 * sum((q * d.u(a, "H") for a, q in law_h.items()), ZERO)
            + (1 - prior.mu0) * sum((q * d.u(a, "L") for a, q in law_l.items()), ZERO))


def _check_horizon(horizon):
    if not isinstance(horizon, int) or horizon < 1:
        raise ParameterViolation("horizon must be a positive integer")


def _prior_action(d, prior, policy):
    return policy.order(best_response_set(d, prior.mu0))[0]


def _solve(d, pi, prior, horizon, policy, chooser, node_cap):
    """Forward construction; ``chooser(options)`` picks among tied actions."""
    beliefs = signal_beliefs(pi, prior)
    off_path = _prior_action(d, prior, policy)
    table: dict = {}
    values, laws = [], []
    ties = pruned = 0
    tie_sites = []
    level = [HistoryNode((), Fraction(1), Fraction(1))]
    count = 1
    key = _sort_key(d)
    for depth in range(horizon):
        for node in level:
            public = belief_from_likelihoods(node.lik_h, node.lik_l, prior)
            for s, l, h in pi:
                if not (node.lik_h * h or node.lik_l * l):
                    table[(node.actions, s)] = {off_path: Fraction(1)}
                    continue
                posterior = posterior_update(public, beliefs[s], prior)
                options = policy.order(best_response_set(d, posterior))
                if len(options) > 1:
                    ties += 1
                    tie_sites.append((node.actions, s))
                    choice = chooser(options)
                else:
                    choice = options[0]
                table[(node.actions, s)] = {choice: Fraction(1)}
        decide = lambda hist, s: table[(hist, s)]
        children, law_h, law_l, dropped = _children(level, pi, decide)
        pruned += dropped
        values.append(_payoff(d, prior, law_h, law_l))
        laws.append({"H": law_h, "L": law_l})
        level = sorted(children, key=key)
        count += len(level)
        if count > (node_cap or DEFAULT_NODE_CAP):
            raise ResourceLimit(f"history tree exceeds {node_cap or DEFAULT_NODE_CAP} nodes")
    profile = StrategyProfile(horizon, table=table, label="equilibrium")
    diagnostics = {"tie_count": ties, "pruned_nodes": pruned, "node_count": count, "tie_sites": tie_sites}
    return EquilibriumResult(profile, values, laws, diagnostics)


def compute_equilibrium(d: DecisionProblem, pi: InformationStructure, prior, horizon: int = DEFAULT_HORIZON,
                        tiebreak: TieBreakPolicy = FIRST_IN_ACTION_ORDER,
                        node_cap: int | None = None) -> EquilibriumResult:
    """One pure equilibrium, ties resolved by ``tiebreak``.

    Zero-probability (history, signal) pairs get the action optimal at the
    prior; any choice there preserves the equilibrium property.
    """
    _check_horizon(horizon)
    prior = as_prior(prior)
    if tiebreak.enumerate_cap is not None:
        raise ParameterViolation("use enumerate_equilibria for the enumerate-all policy")
    tiebreak.validate(d)
    return _solve(d, pi, prior, horizon, tiebreak, lambda options: options[0], node_cap)


def enumerate_equilibria(d: DecisionProblem, pi: InformationStructure, prior, horizon: int = DEFAULT_HORIZON,
                         cap: int = DEFAULT_ENUMERATE_CAP, tiebreak: TieBreakPolicy = FIRST_IN_ACTION_ORDER,
                         node_cap: int | None = None, strict: bool = False) -> EquilibriumList:
    """All pure tie resolutions, depth-first, at most ``cap`` of them.

    Mixed resolutions of indifferences are not enumerated.  When the cap cuts
    the search the returned list has ``truncated = True``; with ``strict``
    a :class:`ResourceLimit` carrying the partial list is raised instead.
    """
    _check_horizon(horizon)
    if cap < 1:
        raise ParameterViolation("enumeration cap must be at least 1")
    prior = as_prior(prior)
    tiebreak.validate(d)
    policy = TieBreakPolicy(preference=tiebreak.preference)
    found = EquilibriumList()
    stack: list[tuple[int, ...]] = [()]
    while stack:
        if len(found) >= cap:
            found.truncated = True
            break
        prefix = stack.pop()
        taken: list[int] = []
        counts: list[int] = []

        def chooser(options):
            j = len(taken)
            pick = prefix[j] if j < len(prefix) else 0
            taken.append(pick)
            counts.append(len(options))
            return options[pick]

        result = _solve(d, pi, prior, horizon, policy, chooser, node_cap)
        result.diagnostics["choices"] = tuple(taken)
        found.append(result)
        for j in range(len(prefix), len(taken)):
            for option in range(counts[j] - 1, 0, -1):
                stack.append(tuple(taken[:j]) + (option,))
    if found.truncated and strict:
        raise ResourceLimit(f"more than {cap} equilibria", partial=found)
    return found


def evaluate_profile(d: DecisionProblem, pi: InformationStructure, prior, profile: StrategyProfile,
                     node_cap: int | None = None) -> EquilibriumResult:
    """Exact V_i and action laws of an arbitrary (possibly mixed) profile."""
    prior = as_prior(prior)
    level = [HistoryNode((), Fraction(1), Fraction(1))]
    values, laws = [], []
    count, pruned = 1, 0
    for depth in range(profile.horizon):
        for node in level:
            for s in pi.signals:
                dist = profile.decision(node.actions, s)
                if sum(dist.values()) != 1 or any(q < 0 for q in dist.values()):
                    raise ParameterViolation(f"decision at {list(node.actions)}, {s!r} is not a distribution")
        children, law_h, law_l, dropped = _children(level, pi, profile.decision)
        pruned += dropped
        values.append(_payoff(d, prior, law_h, law_l))
        laws.append({"H": law_h, "L": law_l})
        level = children
        count += len(level)
        if count > (node_cap or DEFAULT_NODE_CAP):
            raise ResourceLimit(f"history tree exceeds {node_cap or DEFAULT_NODE_CAP} nodes")
    return EquilibriumResult(profile, values, laws, {"tie_count": 0, "pruned_nodes": pruned, "node_count": count})


def verify_equilibrium(d: DecisionProblem, pi: InformationStructure, prior, profile: StrategyProfile,
                       node_cap: int | None = None) -> Verdict:
    """Pointwise optimality on every positive-probability (history, signal) pair."""
    prior = as_prior(prior)
    beliefs = signal_beliefs(pi, prior)
    for level in _tree(pi, profile, profile.horizon, node_cap):
        for node in level:
            public = belief_from_likelihoods(node.lik_h, node.lik_l, prior)
            for s, l, h in pi:
                if not (node.lik_h * h or node.lik_l * l):
                    continue
                posterior = posterior_update(public, beliefs[s], prior)
                best = best_response_set(d, posterior)
                for a, q in profile.decision(node.actions, s).items():
                    if q and a not in best:
                        return Verdict(False, Violation(node.actions, s, a, best[0], posterior))
    return Verdict(True)


def observable_signal_value(d: DecisionProblem, pi: InformationStructure, prior, horizon: int,
                            atom_cap: int | None = None) -> list[Fraction]:
    """Optimal payoff of agent ``i`` who sees ``i`` independent signals, for i = 1..horizon."""
    _check_horizon(horizon)
    prior = as_prior(prior)
    return [
        sum((prob * d.value(b) for b, prob in iid_power(pi, i, prior, atom_cap)), ZERO)
        for i in range(1, horizon + 1)
    ]


def public_belief_distribution(d: DecisionProblem, pi: InformationStructure, prior, profile: StrategyProfile,
                               i: int) -> BeliefDistribution:
    """Law of the belief held after observing agents ``1..i-1``."""
    if not 2 <= i <= profile.horizon:
        raise ParameterViolation(f"agent index must satisfy 2 <= i <= {profile.horizon}")
    prior = as_prior(prior)
    nodes = _tree(pi, profile, i)[i - 1]
    return BeliefDistribution(tuple(
        (belief_from_likelihoods(n.lik_h, n.lik_l, prior), prior.mu0 * n.lik_h + (1 - prior.mu0) * n.lik_l)
        for n in nodes))


def constant_profile(action, horizon: int) -> StrategyProfile:
    return StrategyProfile(horizon, decide=lambda hist, s: {action: Fraction(1)}, label=f"always {action}")
