"""Deciding and refuting the social-value orders between experiments.

Verdicts are three-valued.  ``ProvedBySufficient`` rests on the mixture
sufficient condition (or, for the weak order, on explicitly constructed
equilibria over a problem family); ``Refuted`` always carries a certificate
that re-verifies in exact arithmetic; everything else is ``Inconclusive``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .blackwell import MixtureExperiment, blackwell_geq, mixture_bounds, mixture_exists
from .equilibrium import (
    DEFAULT_ENUMERATE_CAP,
    EquilibriumResult,
    StrategyProfile,
    compute_equilibrium,
    enumerate_equilibria,
    evaluate_profile,
    observable_signal_value,
    verify_equilibrium,
)
from .errors import ParameterViolation, PreconditionViolated
from .model import (
    ONE,
    ZERO,
    DecisionProblem,
    InformationStructure,
    Prior,
    as_prior,
    as_rational,
    best_action_interval,
    best_response_set,
    classify,
    fmt,
    iid_power,
    private_belief_distribution,
)


class Relation(str, enum.Enum):
    S = "S"
    ES = "ES"
    W = "W"
    SELF = "SELF"


class Status(str, enum.Enum):
    PROVED = "ProvedBySufficient"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class CounterexampleBundle:
    """A problem, an agent and an equilibrium under ``pi`` losing to a benchmark.

    ``benchmark`` is the observable-signal value of the alternative experiment
    unless ``benchmark_kind`` says otherwise.
    """

    problem: DecisionProblem
    agent: int
    equilibrium_value: Fraction
    benchmark: Fraction
    gap: Fraction
    equilibrium: EquilibriumResult | None = None
    r: Fraction | None = None
    benchmark_kind: str = "observable-signal"

    def recheck(self, pi: InformationStructure, pi_prime: InformationStructure, prior) -> bool:
        """Recompute both sides from scratch and re-verify the equilibrium."""
        prior = as_prior(prior)
        profile = self.equilibrium.profile
        if not verify_equilibrium(self.problem, pi, prior, profile):
            return False
        value = evaluate_profile(self.problem, pi, prior, profile).value(self.agent)
        if self.benchmark_kind == "observable-signal":
            bench = observable_signal_value(self.problem, pi_prime, prior, self.agent)[-1]
        else:
            bench = self.benchmark
        return value == self.equilibrium_value and bench == self.benchmark and value < bench

    def to_json(self) -> dict:
        out = {
            "agent": self.agent,
            "equilibrium_value": fmt(self.equilibrium_value),
            "benchmark": fmt(self.benchmark),
            "benchmark_kind": self.benchmark_kind,
            "gap": fmt(self.gap),
            "problem": {"actions": [str(a) for a in self.problem.actions],
                        "payoff": {str(a): {k: fmt(v) for k, v in row.items()}
                                   for a, row in self.problem.payoff.items()}},
        }
        if self.r is not None:
            out["r"] = fmt(self.r)
        return out


@dataclass
class OrderVerdict:
    relation: Relation
    status: Status
    certificate: object = None
    notes: dict = field(default_factory=dict)

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def proved(self) -> bool:
        return self.status is Status.PROVED

    def to_json(self) -> dict:
        cert = self.certificate
        if isinstance(cert, CounterexampleBundle):
            cert = cert.to_json()
        elif isinstance(cert, MixtureExperiment):
            cert = {"p": fmt(cert.p), "degenerate": cert.degenerate,
                    "p_range": [fmt(v) for v in cert.p_range] if cert.p_range else None}
        return {"relation": self.relation.value, "status": self.status.value,
                "certificate": cert, "notes": _jsonable(self.notes)}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def threshold_problem(r) -> DecisionProblem:
    """Safe action ``a0`` worth 0; risky ``a1`` worth 1-r in H and -r in L."""
    r = as_rational(r)
    if not 0 <= r <= 1:
        raise ParameterViolation(f"threshold must lie in [0, 1], got {r}")
    return DecisionProblem(["a0", "a1"], {"a0": {"L": 0, "H": 0}, "a1": {"L": -r, "H": 1 - r}})


def mirrored_threshold_problem(r) -> DecisionProblem:
    """Like :func:`threshold_problem` but ``a1`` is optimal iff the belief is at most ``r``."""
    r = as_rational(r)
    if not 0 <= r <= 1:
        raise ParameterViolation(f"threshold must lie in [0, 1], got {r}")
    return DecisionProblem(["a0", "a1"], {"a0": {"L": 0, "H": 0}, "a1": {"L": r, "H": r - 1}})


def duplicated_threshold_problem(r) -> DecisionProblem:
    """Threshold problem with a payoff-identical copy ``a2`` of the safe action."""
    r = as_rational(r)
    return DecisionProblem(["a0", "a1", "a2"], {"a0": {"L": 0, "H": 0}, "a1": {"L": -r, "H": 1 - r},
                                                "a2": {"L": 0, "H": 0}})


def breakpoints(experiments, prior, horizon: int) -> list[Fraction]:
    """Interior beliefs reachable from up to ``horizon`` draws of any experiment, plus the prior."""
    prior = as_prior(prior)
    points = {prior.mu0}
    for pi in experiments:
        for n in range(1, horizon + 1):
            points.update(iid_power(pi, n, prior).support())
    return sorted(p for p in points if 0 < p < 1)


def shortest_decimal(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational in the open interval ``(lo, hi)`` with the fewest decimal
    digits; among those, the one nearest the midpoint (lower on a tie)."""
    if not lo < hi:
        raise ParameterViolation("empty interval")
    mid = (lo + hi) / 2
    scale = 1
    while True:
        first = math.floor(lo * scale) + 1
        last = math.ceil(hi * scale) - 1
        if first <= last:
            best = min(range(first, last + 1), key=lambda m: (abs(Fraction(m, scale) - mid), m))
            return Fraction(best, scale)
        scale *= 10


def threshold_grid(experiments, prior, horizon: int) -> list[Fraction]:
    """One representative inside each gap between consecutive breakpoints
    (0 and 1 included as ends), followed by the breakpoints themselves.

    Gap representatives come first: thresholds there are never tied at a
    reachable belief, so certificates found on them hold for every
    equilibrium.  Each representative is the shortest decimal in its gap.
    """
    points = breakpoints(experiments, prior, horizon)
    ends = [ZERO, *points, ONE]
    inner = [shortest_decimal(a, b) for a, b in zip(ends, ends[1:])]
    return inner + points


def default_family(pi, pi_prime, prior, horizon: int) -> list[tuple[Fraction, DecisionProblem]]:
    return [(r, threshold_problem(r)) for r in threshold_grid([pi, pi_prime], prior, horizon)]


def _as_family(problem_family):
    """Accept ``[(r, problem)]``, ``[problem]`` or ``[r]``."""
    out = []
    for item in problem_family:
        if isinstance(item, tuple):
            out.append(item)
        elif isinstance(item, DecisionProblem):
            out.append((None, item))
        else:
            r = as_rational(item)
            out.append((r, threshold_problem(r)))
    return out


def check_sufficient_social(pi, pi_prime, prior) -> OrderVerdict:
    mixture = mixture_exists(pi, pi_prime, prior)
    lhs, rhs = mixture_bounds(pi, pi_prime, prior)
    notes = {"overlap_deficit": lhs, "min_conclusive_mass": rhs}
    if mixture is None:
        return OrderVerdict(Relation.S, Status.INCONCLUSIVE, None, notes)
    return OrderVerdict(Relation.S, Status.PROVED, mixture, notes)


def _cascade_certificate(pi, pi_prime, prior, search_limit):
    """Threshold problem making ``pi`` herd on the safe action from the start
    while enough draws of ``pi_prime`` eventually beat it."""
    summary = private_belief_distribution(pi, prior)
    support = summary.distribution.support()
    options = []
    if ONE not in support:
        top = max(max(support), prior.mu0)
        options.append(("high", top))
    if ZERO not in support:
        bottom = min(min(support), prior.mu0)
        options.append(("low", bottom))
    for n in range(1, search_limit + 1):
        atoms = iid_power(pi_prime, n, prior).support()
        for side, edge in options:
            if side == "high":
                beyond = [b for b in atoms if b > edge]
                if beyond:
                    r = (edge + min(beyond)) / 2
                    return n, r, threshold_problem(r)
            else:
                beyond = [b for b in atoms if b < edge]
                if beyond:
                    r = (edge + max(beyond)) / 2
                    return n, r, mirrored_threshold_problem(r)
    return None


def _bundle(problem, agent, result, bench, r=None, kind="observable-signal"):
    value = result.value(agent)
    return CounterexampleBundle(problem, agent, value, bench, bench - value, result, r, kind)


def check_necessary_social(pi, pi_prime, prior, search_limit: int = 64) -> OrderVerdict:
    """Refute via the cascade argument when ``pi`` has bounded beliefs."""
    prior = as_prior(prior)
    if classify(pi_prime, prior).is_no_information or classify(pi, prior).has_unbounded_beliefs:
        return OrderVerdict(Relation.S, Status.INCONCLUSIVE, None, {"reason": "hypothesis of the necessary condition fails"})
    found = _cascade_certificate(pi, pi_prime, prior, search_limit)
    if found is None:
        return OrderVerdict(Relation.S, Status.INCONCLUSIVE, None,
                            {"reason": f"no draw count up to {search_limit} escapes the cascade"})
    n, r, problem = found
    result = compute_equilibrium(problem, pi, prior, n)
    bench = observable_signal_value(problem, pi_prime, prior, n)[-1]
    bundle = _bundle(problem, n, result, bench, r)
    assert bundle.gap > 0 and verify_equilibrium(problem, pi, prior, result.profile)
    return OrderVerdict(Relation.S, Status.REFUTED, bundle, {"route": "cascade"})


def _search(pi, pi_prime, prior, horizon, family, cap, test):
    """Run ``test(r, problem, eq, bench)`` over the family and all enumerated equilibria."""
    for r, problem in family:
        bench = observable_signal_value(problem, pi_prime, prior, horizon)
        for eq in enumerate_equilibria(problem, pi, prior, horizon, cap):
            hit = test(r, problem, eq, bench)
            if hit is not None:
                return hit
    return None


def refute_social(pi, pi_prime, prior, horizon: int, problem_family=None,
                  enumerate_cap: int = DEFAULT_ENUMERATE_CAP) -> OrderVerdict:
    """Look for an agent whose equilibrium payoff under ``pi`` falls below the
    observable-signal payoff under ``pi_prime``.  Sound, not complete."""
    if horizon < 1:
        raise ParameterViolation("horizon must be at least 1")
    prior = as_prior(prior)
    family = (default_family(pi, pi_prime, prior, horizon) if problem_family is None
              else _as_family(problem_family))

    def test(r, problem, eq, bench):
        for i in range(1, horizon + 1):
            if eq.value(i) < bench[i - 1]:
                return _bundle(problem, i, eq, bench[i - 1], r)
        return None

    bundle = _search(pi, pi_prime, prior, horizon, family, enumerate_cap, test)
    notes = {"family_size": len(family), "horizon": horizon}
    if bundle is None:
        return OrderVerdict(Relation.S, Status.INCONCLUSIVE, None, notes)
    return OrderVerdict(Relation.S, Status.REFUTED, bundle, notes)


def self_social(pi, prior, horizon: int = 2) -> OrderVerdict:
    """Decide whether ``pi`` is more socially valuable than itself."""
    prior = as_prior(prior)
    info = classify(pi, prior)
    if info.is_full_no_mixture:
        return OrderVerdict(Relation.SELF, Status.PROVED, mixture_exists(pi, pi, prior))
    support = private_belief_distribution(pi, prior).distribution.support()
    above = [b for b in support if prior.mu0 < b < 1]
    if above:
        x = above[0]
    else:
        x = [b for b in support if 0 < b < prior.mu0][-1]
    doubled = x * x / (x * x + prior.odds * (1 - x) ** 2)
    r = (x + doubled) / 2
    problem = threshold_problem(r) if x > prior.mu0 else mirrored_threshold_problem(r)
    horizon = max(horizon, 2)
    bench = observable_signal_value(problem, pi, prior, horizon)
    for eq in enumerate_equilibria(problem, pi, prior, horizon):
        if eq.value(2) < bench[1]:
            bundle = _bundle(problem, 2, eq, bench[1], r)
            return OrderVerdict(Relation.SELF, Status.REFUTED, bundle, {"x": x, "two_signal_belief": doubled})
    return OrderVerdict(Relation.SELF, Status.INCONCLUSIVE, None, {"x": x})


def example1_shape(pi: InformationStructure, prior):
    """``(eps, delta)`` if ``pi`` has one conclusive signal per state plus one
    interior signal group, else None."""
    summary = private_belief_distribution(pi, prior)
    groups = summary.group_likelihood
    interior = [b for b in groups if 0 < b < 1]
    if set(groups) != {ZERO, ONE, *interior} or len(interior) != 1:
        return None
    lik_l, lik_h = groups[interior[0]]
    return lik_h, lik_l


def example1_persistence(pi, pi_prime, prior, r):
    """Closed-form proof that the threshold-``r`` gap is positive for every agent i >= 2.

    Applies when both experiments have the conclusive/interior/conclusive shape
    with a common false-alarm mass ``delta`` and ``delta < eps < eps'``.
    Returns the symbolic data of the argument or None.
    """
    prior = as_prior(prior)
    a, b = example1_shape(pi, prior), example1_shape(pi_prime, prior)
    if a is None or b is None or r is None:
        return None
    (eps, delta), (eps_p, delta_p) = a, b
    if delta != delta_p or not delta < eps < eps_p < 1:
        return None
    m = prior.mu0
    lower = m * eps / (m * eps + (1 - m) * delta)
    upper = min(m * eps_p / (m * eps_p + (1 - m) * delta),
                m * eps ** 2 / (m * eps ** 2 + (1 - m) * delta ** 2))
    if not lower < r < upper:
        return None
    return {"eps": eps, "delta": delta, "eps_prime": eps_p, "r": r,
            "gap": "mu0*eps^i*(1-r) - (1-mu0)*delta^i*r",
            "argument": "(eps/delta)^i >= (eps/delta)^2 and r < mu0 eps^2/(mu0 eps^2+(1-mu0) delta^2)"}


def refute_eventual(pi, pi_prime, prior, horizon: int, problem_family=None,
                    enumerate_cap: int = DEFAULT_ENUMERATE_CAP) -> OrderVerdict:
    """Look for a problem where the observable-signal benchmark of ``pi_prime``
    beats an equilibrium of ``pi`` for every agent 2..horizon."""
    if horizon < 2:
        raise ParameterViolation("horizon must be at least 2")
    prior = as_prior(prior)
    cascade = check_necessary_social(pi, pi_prime, prior)
    if cascade.refuted:
        bundle = cascade.certificate
        return OrderVerdict(Relation.ES, Status.REFUTED, bundle, {
            "route": "cascade", "persistence": "proved",
            "argument": f"equilibrium payoff is constant from agent 1 on and the benchmark is "
                        f"nondecreasing, positive gap from agent {bundle.agent} onward"})
    family = (default_family(pi, pi_prime, prior, horizon) if problem_family is None
              else _as_family(problem_family))

    def test(r, problem, eq, bench):
        if all(eq.value(i) < bench[i - 1] for i in range(2, horizon + 1)):
            return r, _bundle(problem, horizon, eq, bench[horizon - 1], r)
        return None

    hit = _search(pi, pi_prime, prior, horizon, family, enumerate_cap, test)
    if hit is None:
        return OrderVerdict(Relation.ES, Status.INCONCLUSIVE, None, {"family_size": len(family)})
    r, bundle = hit
    proof = example1_persistence(pi, pi_prime, prior, r)
    notes = {"gap_positive_for_agents": [2, horizon]}
    if proof is None:
        notes["persistence"] = "finite-horizon evidence only"
    else:
        notes["persistence"] = "proved"
        notes["closed_form"] = proof
    return OrderVerdict(Relation.ES, Status.REFUTED, bundle, notes)


def _mirror(pi: InformationStructure, d: DecisionProblem, prior: Prior):
    """Relabel the states; equilibria carry over unchanged."""
    pi_m = InformationStructure(pi.signals, {"L": pi.H, "H": pi.L})
    d_m = DecisionProblem(d.actions, {a: {"L": row["H"], "H": row["L"]} for a, row in d.payoff.items()})
    return pi_m, d_m, Prior(1 - prior.mu0)


def three_case_profile(d: DecisionProblem, pi: InformationStructure, prior, horizon: int):
    """Equilibrium of an experiment with beliefs in {0, x, 1} built case by case.

    Returns ``(case, profile)`` with case in ``{"i", "ii", "iii", "mixture"}``.
    """
    prior = as_prior(prior)
    summary = private_belief_distribution(pi, prior)
    interior = [b for b in summary.distribution.support() if 0 < b < 1]
    if len(interior) > 1 or summary.conclusive_L_mass == 0 or summary.conclusive_H_mass == 0:
        raise PreconditionViolated("beliefs must be supported on {0, x, 1}")
    if not interior or interior[0] == prior.mu0:
        return "mixture", compute_equilibrium(d, pi, prior, horizon).profile
    if interior[0] < prior.mu0:
        pi, d, prior = _mirror(pi, d, prior)
        summary = private_belief_distribution(pi, prior)
    x = [b for b in summary.distribution.support() if 0 < b < 1][0]
    kind = {s: b for b, members in summary.signal_groups.items() for s in members}
    one = Fraction(1)
    br0, br1, brx = (best_response_set(d, z) for z in (ZERO, ONE, x))

    common = [a for a in br0 if a in br1]
    if common:
        star = common[0]
        return "i", StrategyProfile(horizon, decide=lambda h, s: {star: one}, label="case i")

    if not set(br1) & set(brx) and br0 == brx and len(br0) == 1:
        a0, a1 = br0[0], br1[0]

        def decide_ii(h, s):
            b = kind[s]
            if b == 0 or (b == x and all(a == a0 for a in h)):
                return {a0: one}
            return {a1: one}

        return "ii", StrategyProfile(horizon, decide=decide_ii, label="case ii")

    a0 = _safe_action(d, br0, x)
    a1 = min(br1, key=lambda a: (best_action_interval(d, a)[0], d.actions.index(a)))
    steps = {}

    def step(i):
        if i not in steps:
            xi = x ** i / (x ** i + prior.odds ** (i - 1) * (1 - x) ** i)
            options = [a for a in best_response_set(d, xi) if a != a0]
            steps[i] = a1 if a1 in options else options[0]
        return steps[i]

    def decide_iii(h, s):
        b = kind[s]
        if b == 0 or a0 in h:
            return {a0: one}
        if b == 1:
            return {a1: one}
        if not any(a in br1 for a in h):
            return {step(len(h) + 1): one}
        return {h[-1]: one}

    return "iii", StrategyProfile(horizon, decide=decide_iii, label="case iii")


def _safe_action(d, br0, x):
    """An action optimal at 0 that is never the unique best response on [x, 1]."""
    for a in br0:
        twins = [b for b in d.actions if b != a and d.payoff[b] == d.payoff[a]]
        if twins:
            return a
        interval = best_action_interval(d, a)
        lo, hi = max(interval[0], x), interval[1]
        if lo > hi:
            return a
        if lo == hi and len(best_response_set(d, lo)) > 1:
            return a
    raise PreconditionViolated("no safe action exists; the problem falls under another case")


def check_weak_3support(pi, pi_prime, prior, horizon: int, problem_family=None,
                        enumerate_cap: int = DEFAULT_ENUMERATE_CAP) -> OrderVerdict:
    """Check the weak order for an experiment with beliefs on {0, x, 1}.

    For every problem of the family an equilibrium under ``pi`` is constructed
    case by case, verified, and compared with every enumerated equilibrium
    under ``pi_prime``.  A positive verdict is relative to the family.
    """
    prior = as_prior(prior)
    summary = private_belief_distribution(pi, prior)
    support = summary.distribution.support()
    interior = [b for b in support if 0 < b < 1]
    if ZERO not in support or ONE not in support or len(interior) > 1:
        raise PreconditionViolated("beliefs under pi must be supported on {0, x, 1}")
    if not blackwell_geq(pi, pi_prime):
        raise PreconditionViolated("pi must Blackwell-dominate pi_prime")
    x = interior[0] if interior else None
    other = [b for b in private_belief_distribution(pi_prime, prior).distribution.support() if 0 < b < 1]
    if x is not None and any(abs(prior.mu0 - x) < abs(prior.mu0 - y) for y in other):
        raise PreconditionViolated("the interior belief of pi must be at least as extreme as every interior belief of pi_prime")

    if problem_family is None:
        grid = threshold_grid([pi, pi_prime], prior, horizon)
        family = [(r, threshold_problem(r)) for r in grid] + [(r, duplicated_threshold_problem(r)) for r in grid]
    else:
        family = _as_family(problem_family)

    cases: dict[str, int] = {}
    truncated = False
    for r, problem in family:
        case, profile = three_case_profile(problem, pi, prior, horizon)
        cases[case] = cases.get(case, 0) + 1
        verdict = verify_equilibrium(problem, pi, prior, profile)
        if not verdict:
            return OrderVerdict(Relation.W, Status.INCONCLUSIVE, None,
                                {"reason": f"case {case} construction failed verification", "r": r,
                                 "violation": repr(verdict.violation)})
        constructed = evaluate_profile(problem, pi, prior, profile)
        rivals = enumerate_equilibria(problem, pi_prime, prior, horizon, enumerate_cap)
        truncated |= rivals.truncated
        for rival in rivals:
            if all(constructed.value(i) >= rival.value(i) for i in range(1, horizon + 1)):
                continue
            # the constructed equilibrium loses; try every other equilibrium under pi
            ours = enumerate_equilibria(problem, pi, prior, horizon, enumerate_cap)
            if not any(all(eq.value(i) >= rival.value(i) for i in range(1, horizon + 1)) for eq in ours):
                agent = next(i for i in range(1, horizon + 1) if constructed.value(i) < rival.value(i))
                bundle = _bundle(problem, agent, constructed, rival.value(agent), r, kind="equilibrium")
                return OrderVerdict(Relation.W, Status.REFUTED, bundle, {"pure_equilibria_only": True})
            return OrderVerdict(Relation.W, Status.INCONCLUSIVE, None,
                                {"reason": "constructed equilibrium lost but another pure equilibrium wins", "r": r})
    return OrderVerdict(Relation.W, Status.PROVED, {"cases": cases, "family_size": len(family)},
                        {"evidence": "checked over the problem family only", "rivals_truncated": truncated})


def refute_weak(pi, pi_prime, prior, horizon: int, problem_family=None,
                enumerate_cap: int = DEFAULT_ENUMERATE_CAP) -> OrderVerdict:
    """Look for a problem and an equilibrium under ``pi_prime`` that every
    equilibrium under ``pi`` loses to at some agent.

    Only complete enumerations under ``pi`` count, so a refutation is exact
    among pure equilibria.
    """
    if horizon < 1:
        raise ParameterViolation("horizon must be at least 1")
    prior = as_prior(prior)
    family = (default_family(pi, pi_prime, prior, horizon) if problem_family is None
              else _as_family(problem_family))
    skipped = 0
    for r, problem in family:
        ours = enumerate_equilibria(problem, pi, prior, horizon, enumerate_cap)
        if ours.truncated:
            skipped += 1
            continue
        for rival in enumerate_equilibria(problem, pi_prime, prior, horizon, enumerate_cap):
            losers = []
            for eq in ours:
                agent = next((i for i in range(1, horizon + 1) if eq.value(i) < rival.value(i)), None)
                if agent is None:
                    break
                losers.append((agent, eq))
            else:
                agent, eq = losers[0]
                bundle = _bundle(problem, agent, eq, rival.value(agent), r, kind="equilibrium")
                return OrderVerdict(Relation.W, Status.REFUTED, bundle,
                                    {"equilibria_under_pi": len(ours), "pure_equilibria_only": True})
    return OrderVerdict(Relation.W, Status.INCONCLUSIVE, None,
                        {"family_size": len(family), "skipped_truncated": skipped})
