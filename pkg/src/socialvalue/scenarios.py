"""Canned instances, closed-form payoff oracles and constructive profiles.

The closed forms here are independent of the tree engine; tests compare the
two exactly.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from .blackwell import MixtureExperiment
from .equilibrium import StrategyProfile
from .errors import HypothesisViolated, ParameterViolation, ShapeMismatch
from .model import (
    ONE,
    ZERO,
    DecisionProblem,
    InformationStructure,
    Prior,
    as_prior,
    as_rational,
    belief_from_likelihoods,
    best_response_set,
    private_belief_distribution,
)
from .orders import threshold_problem


@dataclass
class ScenarioBundle:
    pi: InformationStructure
    pi_prime: InformationStructure
    prior: Prior
    problem: DecisionProblem
    params: dict
    oracles: dict[str, Callable[[int], Fraction]] = field(repr=False)
    oracle_from: dict[str, int] = field(default_factory=dict)

    def oracle_values(self, horizon: int) -> dict[tuple[str, int], Fraction]:
        """Closed-form values keyed by ``(label, agent)`` for the agents each formula covers."""
        return {(label, i): f(i) for label, f in self.oracles.items()
                for i in range(self.oracle_from.get(label, 1), horizon + 1)}


def _three_signal(eps, delta, labels=("s0", "s1", "s2")) -> InformationStructure:
    """Conclusive-L, conclusive-H and one interior signal; ``eps``/``delta`` are
    the interior signal's probabilities under H/L."""
    return InformationStructure(labels, {"L": [1 - delta, 0, delta], "H": [0, 1 - eps, eps]})


def example1(eps="2/5", delta="1/5", eps_prime="3/5", r="7/10", prior="1/2") -> ScenarioBundle:
    """Blackwell-ordered pair where the more informative experiment loses for every agent i >= 2."""
    eps, delta, eps_p, r = map(as_rational, (eps, delta, eps_prime, r))
    prior = as_prior(prior)
    m = prior.mu0
    if not 0 < delta < eps < eps_p < 1:
        raise ParameterViolation("need 0 < delta < eps < eps' < 1")
    lower = m * eps / (m * eps + (1 - m) * delta)
    upper = min(m * eps_p / (m * eps_p + (1 - m) * delta),
                m * eps ** 2 / (m * eps ** 2 + (1 - m) * delta ** 2))
    if not lower < r < upper:
        raise ParameterViolation(f"r must lie in ({lower}, {upper}), got {r}")
    pi, pi_p = _three_signal(eps, delta), _three_signal(eps_p, delta)
    problem = threshold_problem(r)

    def v_pi_prime(i):
        if i == 1:
            # agent 1 acts on the signal alone
            return sum((max(ZERO, m * h * (1 - r) - (1 - m) * l * r) for _, l, h in pi_p), ZERO)
        return m * (1 - r) - (1 - m) * delta ** i * r

    oracles = {
        "V_pi": lambda i: m * (1 - eps ** i) * (1 - r),
        "V_piprime": v_pi_prime,
        "gap": lambda i: m * eps ** i * (1 - r) - (1 - m) * delta ** i * r,
    }
    params = {"eps": eps, "delta": delta, "eps_prime": eps_p, "r": r, "interval": (lower, upper)}
    return ScenarioBundle(pi, pi_p, prior, problem, params, oracles, {"gap": 2})


def example2(eps="1/2", delta="1/10", eps_prime="3/5", delta_prime="1/5") -> ScenarioBundle:
    """Pair separating the strong order from the weak one; prior fixed at 1/2."""
    eps, delta, eps_p, delta_p = map(as_rational, (eps, delta, eps_prime, delta_prime))
    if not 0 < delta < delta_p < eps < eps_p < 1:
        raise ParameterViolation("need 0 < delta < delta' < eps < eps' < 1")
    x = eps / (eps + delta)
    lo = eps_p / (eps_p + delta_p)
    hi = eps_p ** 2 / (eps_p ** 2 + delta_p ** 2)
    if not lo < x < hi:
        raise ParameterViolation(f"need {lo} < eps/(eps+delta) = {x} < {hi}")
    prior = Prior(Fraction(1, 2))
    pi, pi_p = _three_signal(eps, delta), _three_signal(eps_p, delta_p)
    problem = DecisionProblem(["a0", "a1", "a2"], {
        "a0": {"L": 0, "H": 0}, "a1": {"L": -x, "H": 1 - x}, "a2": {"L": 0, "H": 0}})
    oracles = {
        "V_pi_sigma_star": lambda i: (1 - eps ** 2) * (1 - x) / 2,
        "V_piprime_sigma_2star": lambda i: (1 - x) / 2 - delta_p ** 2 * x / 2,
    }
    params = {"eps": eps, "delta": delta, "eps_prime": eps_p, "delta_prime": delta_p, "x": x}
    bundle = ScenarioBundle(pi, pi_p, prior, problem, params, oracles)
    bundle.oracle_from = {"V_pi_sigma_star": 2, "V_piprime_sigma_2star": 2}
    return bundle


def cascade_hypothesis(d: DecisionProblem, pi: InformationStructure, prior):
    """``(x, a0)`` witnessing the herding hypothesis, or None.

    The hypothesis asks for x >= mu0 with no private belief strictly between
    x and 1 and a single action optimal at both 0 and x.  The smallest
    admissible x is the largest non-conclusive belief (or mu0), and a smaller
    x only makes the action condition easier, so that x is the one to test.
    """
    prior = as_prior(prior)
    support = private_belief_distribution(pi, prior).distribution.support()
    x = max([prior.mu0] + [b for b in support if b < 1])
    at_zero, at_x = best_response_set(d, ZERO), best_response_set(d, x)
    if len(at_zero) == 1 and at_zero == at_x:
        return x, at_zero[0]
    return None


def cascade_value_oracle(d: DecisionProblem, pi: InformationStructure, prior, i: int) -> Fraction:
    """Payoff of agent ``i`` in any equilibrium of a herding instance."""
    prior = as_prior(prior)
    found = cascade_hypothesis(d, pi, prior)
    if found is None:
        raise HypothesisViolated("no belief x >= mu0 satisfies the herding hypothesis")
    _, a0 = found
    a1 = best_response_set(d, ONE)[0]
    p = 1 - private_belief_distribution(pi, prior).conclusive_H_mass
    m = prior.mu0
    return m * ((1 - p ** i) * d.u(a1, "H") + p ** i * d.u(a0, "H")) + (1 - m) * d.u(a0, "L")


def state_optima(d: DecisionProblem, prior) -> tuple[Fraction, Fraction, Fraction]:
    """Best payoff when H is known, when L is known, and at the prior."""
    prior = as_prior(prior)
    return (max(d.u(a, "H") for a in d.actions),
            max(d.u(a, "L") for a in d.actions),
            d.value(prior.mu0))


def three_support_value_oracle(d: DecisionProblem, p, prior, i: int) -> Fraction:
    """Payoff of agent ``i`` under a full/no-information mixture with weight ``p``."""
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise ParameterViolation("p must lie in [0, 1]")
    prior = as_prior(prior)
    u1, u0, um = state_optima(d, prior)
    return prior.mu0 * (1 - p ** i) * u1 + (1 - prior.mu0) * (1 - p ** i) * u0 + p ** i * um


@dataclass(frozen=True)
class HybridProfileSpec:
    k: int
    base: StrategyProfile
    q_L: Fraction
    q_H: Fraction


class ImitationProfile(StrategyProfile):
    """Act on conclusive signals with the mixture's frequencies, copy the predecessor otherwise."""

    def __init__(self, horizon, decide, q_L, q_H):
        super().__init__(horizon, decide=decide, label="imitation")
        self.q_L = q_L
        self.q_H = q_H


def imitation_profile(d: DecisionProblem, pi: InformationStructure, mixture: MixtureExperiment, prior,
                      horizon: int) -> ImitationProfile:
    prior = as_prior(prior)
    summary = private_belief_distribution(pi, prior)
    mass_l, mass_h = summary.conclusive_L_mass, summary.conclusive_H_mass
    if min(mass_l, mass_h) < 1 - mixture.p:
        raise HypothesisViolated("conclusive masses of pi must be at least 1 - p")
    q_l = (1 - mixture.p) / mass_l if mass_l else ZERO
    q_h = (1 - mixture.p) / mass_h if mass_h else ZERO
    a0 = best_response_set(d, ZERO)[0]
    a1 = best_response_set(d, ONE)[0]
    a2 = best_response_set(d, prior.mu0)[0]
    kind = {s: b for b, members in summary.signal_groups.items() for s in members}

    def mix(action, q, fallback):
        out = {}
        for a, w in ((action, q), (fallback, 1 - q)):
            if w:
                out[a] = out.get(a, ZERO) + w
        return out

    def decide(history, signal):
        fallback = history[-1] if history else a2
        b = kind[signal]
        if b == 0:
            return mix(a0, q_l, fallback)
        if b == 1:
            return mix(a1, q_h, fallback)
        return {fallback: ONE}

    return ImitationProfile(horizon, decide, q_l, q_h)


def hybrid_profile(equilibrium: StrategyProfile, imitation: StrategyProfile, k: int) -> StrategyProfile:
    """Agents 1..k follow ``equilibrium``, later agents follow ``imitation``."""
    if equilibrium.horizon != imitation.horizon:
        raise ShapeMismatch("profiles must share a horizon")
    if not 0 <= k <= equilibrium.horizon:
        raise ShapeMismatch(f"k must lie in [0, {equilibrium.horizon}]")

    def decide(history, signal):
        source = equilibrium if len(history) < k else imitation
        return source.decision(history, signal)

    return StrategyProfile(equilibrium.horizon, decide=decide, label=f"hybrid k={k}")


def augment_revealing(d: DecisionProblem, signal_labels):
    """Problem whose actions also name a signal, and a builder for the profile
    in which every agent announces the signal they received.

    Returns ``(augmented_problem, build)`` where ``build(pi_prime, prior, horizon)``
    gives the revealing profile.  Augmented actions are ``(action, signal)`` pairs.
    """
    labels = tuple(signal_labels)
    if not labels:
        raise ParameterViolation("need at least one signal label")
    actions = [(a, k) for a in d.actions for k in labels]
    augmented = DecisionProblem(actions, {(a, k): d.payoff[a] for a, k in actions})

    def build(pi_prime: InformationStructure, prior, horizon: int) -> StrategyProfile:
        prior = as_prior(prior)
        if not set(pi_prime.signals) <= set(labels):
            raise ParameterViolation("experiment uses signals outside the augmented label set")
        fallback = best_response_set(d, prior.mu0)[0]

        def decide(history, signal):
            lik_h = pi_prime.prob(signal, "H")
            lik_l = pi_prime.prob(signal, "L")
            for _, k in history:
                lik_h *= pi_prime.prob(k, "H")
                lik_l *= pi_prime.prob(k, "L")
            if lik_h or lik_l:
                a = best_response_set(d, belief_from_likelihoods(lik_h, lik_l, prior))[0]
            else:
                a = fallback
            return {(a, signal): ONE}

        return StrategyProfile(horizon, decide=decide, label="revealing")

    return augmented, build
