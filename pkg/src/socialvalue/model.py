"""Exact representations of experiments, decision problems and beliefs.

All quantities are :class:`fractions.Fraction`; nothing in the library rounds.
The state space is binary with states ``"L"`` and ``"H"``; a belief is always
the probability of ``H``.
"""

from __future__ import annotations

import re
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .errors import IndeterminatePosterior, ParameterViolation, ResourceLimit

STATES = ("L", "H")
DEFAULT_ATOM_CAP = 100_000

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        # decimal and exponent forms are refused along with floats
        if not _RATIONAL.fullmatch(value.strip()):
            raise ValueError(f"not a rational of the form p/q: {value!r}")
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise ValueError(f"zero denominator: {value!r}") from None
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(value).__name__}")


def fmt(q: Fraction) -> str:
    """Render a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Prior:
    mu0: Fraction

    def __post_init__(self):
        mu0 = as_rational(self.mu0)
        if not 0 < mu0 < 1:
            raise ParameterViolation(f"prior must lie in (0, 1), got {mu0}")
        object.__setattr__(self, "mu0", mu0)

    @property
    def odds(self) -> Fraction:
        """Prior odds of H against L."""
        return self.mu0 / (1 - self.mu0)

    def weight(self, state: str) -> Fraction:
        return self.mu0 if state == "H" else 1 - self.mu0


def as_prior(prior) -> Prior:
    return prior if isinstance(prior, Prior) else Prior(prior)


def belief_from_likelihoods(lik_h: Fraction, lik_l: Fraction, prior: Prior) -> Fraction:
    """Posterior of H after an event with the given state likelihoods."""
    num = prior.mu0 * lik_h
    den = num + (1 - prior.mu0) * lik_l
    if den == 0:
        raise ZeroDivisionError("event has probability zero under both states")
    return num / den


class InformationStructure:
    """A finite experiment: one likelihood row per state over ordered signals.

    Signals that have probability zero under both states are dropped.
    """

    __slots__ = ("signals", "L", "H", "_index")

    def __init__(self, signals: Sequence[Hashable], likelihood: Mapping[str, Sequence]):
        signals = tuple(signals)
        if len(set(signals)) != len(signals):
            raise ParameterViolation("signal labels must be distinct")
        try:
            row_l = [as_rational(v) for v in likelihood["L"]]
            row_h = [as_rational(v) for v in likelihood["H"]]
        except KeyError as exc:
            raise ParameterViolation(f"missing likelihood row {exc}") from None
        if not (len(row_l) == len(row_h) == len(signals)):
            raise ParameterViolation("likelihood rows must have one entry per signal")
        if any(v < 0 for v in row_l + row_h):
            raise ParameterViolation("likelihoods must be nonnegative")
        if sum(row_l) != 1 or sum(row_h) != 1:
            raise ParameterViolation("each state's likelihood row must sum to exactly 1")
        keep = [k for k in range(len(signals)) if row_l[k] or row_h[k]]
        self.signals = tuple(signals[k] for k in keep)
        self.L = tuple(row_l[k] for k in keep)
        self.H = tuple(row_h[k] for k in keep)
        self._index = {s: k for k, s in enumerate(self.signals)}

    @classmethod
    def from_rows(cls, row_l, row_h, signals=None) -> InformationStructure:
        if signals is None:
            signals = [f"s{k}" for k in range(len(row_l))]
        return cls(signals, {"L": row_l, "H": row_h})

    @property
    def likelihood(self) -> dict[str, tuple[Fraction, ...]]:
        return {"L": self.L, "H": self.H}

    def row(self, state: str) -> tuple[Fraction, ...]:
        return self.H if state == "H" else self.L

    def prob(self, signal, state: str) -> Fraction:
        return self.row(state)[self._index[signal]]

    def index(self, signal) -> int:
        return self._index[signal]

    def __len__(self):
        return len(self.signals)

    def __iter__(self) -> Iterator[tuple[Hashable, Fraction, Fraction]]:
        """Yield ``(signal, P(s|L), P(s|H))`` triples."""
        return iter(zip(self.signals, self.L, self.H))

    def __eq__(self, other):
        if not isinstance(other, InformationStructure):
            return NotImplemented
        return (self.signals, self.L, self.H) == (other.signals, other.L, other.H)

    def __hash__(self):
        return hash((self.signals, self.L, self.H))

    def __repr__(self):
        cells = ", ".join(f"{s}: L={fmt(l)} H={fmt(h)}" for s, l, h in self)
        return f"InformationStructure({cells})"


def no_information(label="s") -> InformationStructure:
    return InformationStructure([label], {"L": [1], "H": [1]})


def full_information() -> InformationStructure:
    return InformationStructure(["sL", "sH"], {"L": [1, 0], "H": [0, 1]})


def symmetric_binary(accuracy) -> InformationStructure:
    """Two signals, each pointing to the right state with probability ``accuracy``."""
    q = as_rational(accuracy)
    return InformationStructure(["sL", "sH"], {"L": [q, 1 - q], "H": [1 - q, q]})


class DecisionProblem:
    """Finite action set with a payoff ``u(a, state)`` for every action and state."""

    __slots__ = ("actions", "_table")

    def __init__(self, actions: Sequence[Hashable], payoff: Mapping[Hashable, Mapping[str, object]]):
        actions = tuple(actions)
        if not actions:
            raise ParameterViolation("a decision problem needs at least one action")
        if len(set(actions)) != len(actions):
            raise ParameterViolation("action labels must be distinct")
        table = {}
        for a in actions:
            if a not in payoff:
                raise ParameterViolation(f"no payoff for action {a!r}")
            row = payoff[a]
            try:
                table[a] = (as_rational(row["L"]), as_rational(row["H"]))
            except KeyError as exc:
                raise ParameterViolation(f"payoff of {a!r} missing state {exc}") from None
        self.actions = actions
        self._table = table

    @property
    def payoff(self) -> dict[Hashable, dict[str, Fraction]]:
        return {a: {"L": self._table[a][0], "H": self._table[a][1]} for a in self.actions}

    def u(self, action, state: str) -> Fraction:
        lo, hi = self._table[action]
        return hi if state == "H" else lo

    def expected(self, action, belief: Fraction) -> Fraction:
        lo, hi = self._table[action]
        return belief * hi + (1 - belief) * lo

    def value(self, belief: Fraction) -> Fraction:
        """Optimal expected payoff at ``belief``."""
        return max(self.expected(a, belief) for a in self.actions)

    def __eq__(self, other):
        if not isinstance(other, DecisionProblem):
            return NotImplemented
        return self.actions == other.actions and self._table == other._table

    def __hash__(self):
        return hash((self.actions, tuple(self._table[a] for a in self.actions)))

    def __repr__(self):
        cells = ", ".join(f"{a}: L={fmt(l)} H={fmt(h)}" for a, (l, h) in self._table.items())
        return f"DecisionProblem({cells})"


@dataclass(frozen=True)
class BeliefDistribution:
    """Finitely supported law of a posterior belief.

    Atoms are sorted by belief, merged on exact equality, and carry positive
    probability.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        merged: dict[Fraction, Fraction] = {}
        for belief, prob in self.atoms:
            belief, prob = as_rational(belief), as_rational(prob)
            if not 0 <= belief <= 1 or prob < 0:
                raise ParameterViolation(f"invalid atom ({belief}, {prob})")
            if prob:
                merged[belief] = merged.get(belief, ZERO) + prob
        if sum(merged.values()) != 1:
            raise ParameterViolation("atom probabilities must sum to 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Fraction, Fraction]]) -> BeliefDistribution:
        return cls(tuple(pairs))

    def support(self) -> tuple[Fraction, ...]:
        return tuple(b for b, _ in self.atoms)

    def mean(self) -> Fraction:
        return sum((b * p for b, p in self.atoms), ZERO)

    def prob(self, belief) -> Fraction:
        return dict(self.atoms).get(as_rational(belief), ZERO)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True)
class PrivateBeliefSummary:
    distribution: BeliefDistribution
    conclusive_L_mass: Fraction
    conclusive_H_mass: Fraction
    signal_groups: dict = field(hash=False)
    # belief -> (P(group | L), P(group | H))
    group_likelihood: dict = field(hash=False)

    def belief_of(self, signal) -> Fraction:
        for belief, members in self.signal_groups.items():
            if signal in members:
                return belief
        raise KeyError(signal)


@dataclass(frozen=True)
class Classification:
    is_no_information: bool
    is_full_information: bool
    has_unbounded_beliefs: bool
    is_full_no_mixture: bool
    mixture_weight: Fraction | None


def posterior_update(public, private, prior) -> Fraction:
    """Combine a public and a private belief formed from the same prior."""
    x, y = as_rational(public), as_rational(private)
    prior = as_prior(prior)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ParameterViolation("beliefs must lie in [0, 1]")
    num = x * y
    den = num + prior.odds * (1 - x) * (1 - y)
    if den == 0:
        raise IndeterminatePosterior(
            f"public belief {fmt(x)} and private belief {fmt(y)} are contradictory")
    return num / den


def signal_beliefs(pi: InformationStructure, prior) -> dict:
    prior = as_prior(prior)
    return {s: belief_from_likelihoods(h, l, prior) for s, l, h in pi}


def private_belief_distribution(pi: InformationStructure, prior) -> PrivateBeliefSummary:
    prior = as_prior(prior)
    groups: dict[Fraction, list] = {}
    masses: dict[Fraction, list[Fraction]] = {}
    for s, l, h in pi:
        b = belief_from_likelihoods(h, l, prior)
        groups.setdefault(b, []).append(s)
        acc = masses.setdefault(b, [ZERO, ZERO])
        acc[0] += l
        acc[1] += h
    dist = BeliefDistribution(tuple(
        (b, prior.mu0 * mh + (1 - prior.mu0) * ml) for b, (ml, mh) in masses.items()))
    order = sorted(groups)
    return PrivateBeliefSummary(
        distribution=dist,
        conclusive_L_mass=masses[ZERO][0] if ZERO in masses else ZERO,
        conclusive_H_mass=masses[ONE][1] if ONE in masses else ZERO,
        signal_groups={b: tuple(groups[b]) for b in order},
        group_likelihood={b: tuple(masses[b]) for b in order},
    )


def product(pi: InformationStructure, rho: InformationStructure) -> InformationStructure:
    """Experiment that reveals one independent draw from each factor."""
    signals, row_l, row_h = [], [], []
    for s, l1, h1 in pi:
        for t, l2, h2 in rho:
            signals.append((s, t))
            row_l.append(l1 * l2)
            row_h.append(h1 * h2)
    return InformationStructure(signals, {"L": row_l, "H": row_h})


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first, *rest)


def iid_power(pi: InformationStructure, n: int, prior, cap: int | None = None) -> BeliefDistribution:
    """Posterior law after ``n`` conditionally independent draws from ``pi``.

    Works over signal-count vectors of the belief groups (signals sharing a
    posterior are interchangeable), weighting each vector by its multinomial
    coefficient.
    """
    if n < 1:
        raise ParameterViolation("n must be a positive integer")
    prior = as_prior(prior)
    if cap is None:
        cap = DEFAULT_ATOM_CAP
    groups = list(private_belief_distribution(pi, prior).group_likelihood.values())
    k = len(groups)
    if comb(n + k - 1, k - 1) > cap:
        raise ResourceLimit(f"iid_power({n}) needs {comb(n + k - 1, k - 1)} count vectors (cap {cap})")
    acc: dict[Fraction, Fraction] = {}
    n_fact = factorial(n)
    for counts in _compositions(n, k):
        lik_l, lik_h = ONE, ONE
        coeff = n_fact
        for c, (gl, gh) in zip(counts, groups):
            if c:
                lik_l *= gl ** c
                lik_h *= gh ** c
                coeff //= factorial(c)
        if not (lik_l or lik_h):
            continue
        mass = coeff * (prior.mu0 * lik_h + (1 - prior.mu0) * lik_l)
        b = belief_from_likelihoods(lik_h, lik_l, prior)
        acc[b] = acc.get(b, ZERO) + mass
    return BeliefDistribution(tuple(acc.items()))


def classify(pi: InformationStructure, prior) -> Classification:
    prior = as_prior(prior)
    summary = private_belief_distribution(pi, prior)
    support = set(summary.distribution.support())
    mixture = support <= {ZERO, prior.mu0, ONE}
    return Classification(
        is_no_information=support == {prior.mu0},
        is_full_information=support == {ZERO, ONE},
        has_unbounded_beliefs=ZERO in support and ONE in support,
        is_full_no_mixture=mixture,
        mixture_weight=summary.group_likelihood.get(prior.mu0, (ZERO, ZERO))[0] if mixture else None,
    )


def best_response_set(d: DecisionProblem, belief) -> tuple:
    """Actions maximizing expected payoff at ``belief``, in action-list order."""
    belief = as_rational(belief)
    values = [d.expected(a, belief) for a in d.actions]
    top = max(values)
    return tuple(a for a, v in zip(d.actions, values) if v == top)


def best_action_interval(d: DecisionProblem, action) -> tuple[Fraction, Fraction] | None:
    """Closed interval of beliefs at which ``action`` is optimal, or None."""
    if action not in d.actions:
        raise ParameterViolation(f"unknown action {action!r}")
    lo, hi = ZERO, ONE
    for other in d.actions:
        if other == action:
            continue
        d_l = d.u(action, "L") - d.u(other, "L")
        slope = (d.u(action, "H") - d.u(other, "H")) - d_l
        # need d_l + z * slope >= 0
        if slope == 0:
            if d_l < 0:
                return None
        elif slope > 0:
            lo = max(lo, -d_l / slope)
        else:
            hi = min(hi, -d_l / slope)
        if lo > hi:
            return None
    return lo, hi
