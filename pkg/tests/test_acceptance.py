"""Acceptance criteria 1-12, one test each, each printing a PASS/FAIL line."""

from __future__ import annotations

import random
import time
from fractions import Fraction as F

import corpus as C
import pytest

from socialvalue import (
    InformationStructure,
    Status,
    StrategyProfile,
    augment_revealing,
    blackwell_geq,
    cascade_value_oracle,
    check_sufficient_social,
    compute_equilibrium,
    enumerate_equilibria,
    evaluate_profile,
    example1,
    example2,
    garbling_kernel,
    hybrid_profile,
    imitation_profile,
    mixture_exists,
    observable_signal_value,
    prefer,
    product,
    product_preserves_garbling_check,
    roc_dominates,
    self_social,
    three_support_value_oracle,
    verify_equilibrium,
)
from socialvalue.blackwell import mixture_experiment
from socialvalue.model import ONE, ZERO
from socialvalue.scenarios import cascade_hypothesis


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


# 1 ---------------------------------------------------------------------------

def test_criterion_01_example1_reproduction(report):
    def run():
        b = example1()
        assert b.params["r"] == F(7, 10)
        eq_pi = enumerate_equilibria(b.problem, b.pi, b.prior, 8)
        eq_pp = compute_equilibrium(b.problem, b.pi_prime, b.prior, 8)
        bad = []
        for i in range(2, 9):
            closed_pi = F(1, 2) * (1 - F(2, 5) ** i) * F(3, 10)
            closed_pp = F(1, 2) * F(3, 10) - F(1, 2) * F(1, 5) ** i * F(7, 10)
            if any(e.value(i) != closed_pi for e in eq_pi) or eq_pp.value(i) != closed_pp:
                bad.append(i)
            if not eq_pp.value(i) - eq_pi[0].value(i) > 0:
                bad.append(i)
        return bad, len(eq_pi)

    (bad, count), secs = _timed(run)
    report(1, not bad and secs < 5, f"agents 2..8 exact, {count} equilibrium under pi, {secs:.2f}s")


# 2 ---------------------------------------------------------------------------

def test_criterion_02_example2_reproduction(report):
    def run():
        b = example2()
        ours = enumerate_equilibria(b.problem, b.pi, b.prior, 2)
        theirs = enumerate_equilibria(b.problem, b.pi_prime, b.prior, 2)
        vbar = observable_signal_value(b.problem, b.pi_prime, b.prior, 2)[1]
        star = [e for e in ours if e.value(2) == F(1, 16)]
        two_star = [e for e in theirs if e.value(2) == F(1, 15)]
        return star, two_star, vbar, ours.truncated or theirs.truncated

    (star, two_star, vbar, truncated), secs = _timed(run)
    ok = bool(star) and bool(two_star) and vbar == F(1, 15) and F(1, 16) < F(1, 15) and not truncated
    report(2, ok and secs < 5, f"V2(pi,s*)=1/16 and V2(pi',s**)=Vbar2(pi')=1/15 found, {secs:.2f}s")


# 3 ---------------------------------------------------------------------------

def _random_profile(seed, actions, horizon, mixed):
    def decide(history, signal):
        r = random.Random(f"{seed}|{history}|{signal}")
        if not mixed:
            return {r.choice(actions): ONE}
        w = C.simplex(r, len(actions))
        return {a: q for a, q in zip(actions, w) if q}
    return StrategyProfile(horizon, decide=decide, label="random")


def test_criterion_03_signal_beats_observation(report):
    r = C.rng(3)
    instances = profiles = violations = 0
    for k in range(220):
        d, pi, mu = C.problem(r), C.experiment(r), C.prior(r)
        horizon = r.randint(1, 5)
        vbar = observable_signal_value(d, pi, mu, horizon)
        evaluated = [e.values for e in enumerate_equilibria(d, pi, mu, horizon, 16)]
        evaluated.append(compute_equilibrium(d, pi, mu, horizon, prefer(*reversed(d.actions))).values)
        for mixed in (False, True):
            profile = _random_profile(k, list(d.actions), horizon, mixed)
            evaluated.append(evaluate_profile(d, pi, mu, profile).values)
        instances += 1
        profiles += len(evaluated)
        violations += sum(v > b for values in evaluated for v, b in zip(values, vbar))
    report(3, instances >= 200 and violations == 0,
           f"{instances} instances, {profiles} profiles, {violations} violations")


# 4 ---------------------------------------------------------------------------

def test_criterion_04_mixture_collapse(report):
    r = C.rng(4)
    instances = checked = mismatches = 0
    while instances < 60:
        d, mu = C.problem(r), C.prior(r)
        p = F(r.randint(0, 8), 8)
        pi = mixture_experiment(p).experiment
        vbar = observable_signal_value(d, pi, mu, 6)
        for e in enumerate_equilibria(d, pi, mu, 6, 64):
            for i in range(1, 7):
                checked += 1
                closed = three_support_value_oracle(d, p, mu, i)
                mismatches += not (e.value(i) == vbar[i - 1] == closed)
        instances += 1
    report(4, mismatches == 0, f"{instances} instances, {checked} (equilibrium, agent) pairs, {mismatches} mismatches")


# 5 ---------------------------------------------------------------------------

def test_criterion_05_cascade_oracle(report):
    b = example1()
    cases = [(b.problem, b.pi, b.prior.mu0, 8)]
    r = C.rng(5)
    while len(cases) < 60:
        d, pi, mu = C.problem(r), C.experiment(r), C.prior(r)
        found = cascade_hypothesis(d, pi, mu)
        if found is None or len(d.actions) < 2:
            continue
        cases.append((d, pi, mu, r.randint(2, 5)))
    checked = mismatches = 0
    for d, pi, mu, horizon in cases:
        for e in enumerate_equilibria(d, pi, mu, horizon, 64):
            for i in range(1, horizon + 1):
                checked += 1
                mismatches += e.value(i) != cascade_value_oracle(d, pi, mu, i)
    report(5, len(cases) >= 50 and mismatches == 0,
           f"{len(cases)} instances incl. the first example, {checked} values, {mismatches} mismatches")


# 6 ---------------------------------------------------------------------------

def test_criterion_06_decider_agreement(report):
    b = example1()
    ok = blackwell_geq(b.pi, b.pi_prime, check=True) and not blackwell_geq(b.pi_prime, b.pi, check=True)
    r = C.rng(6)
    pairs = agree = true_count = kernels_ok = 0
    for k in range(240):
        pi = C.experiment(r)
        pi_p = C.garble(r, pi) if k % 2 else C.experiment(r)
        roc = roc_dominates(pi, pi_p)
        kern = garbling_kernel(pi, pi_p)
        pairs += 1
        agree += roc == (kern is not None)
        if kern is not None:
            true_count += 1
            kernels_ok += kern.reproduces(pi, pi_p)
    ok = ok and agree == pairs and kernels_ok == true_count and 0 < true_count < pairs
    report(6, ok, f"{pairs} random pairs, {agree} agree, {true_count} kernels all re-multiply; first example true, reversal false")


# 7 ---------------------------------------------------------------------------

def test_criterion_07_product_preservation(report):
    r = C.rng(7)
    quads = violations = 0
    while quads < 110:
        pi, rho = C.experiment(r), C.experiment(r)
        pi_p, rho_p = C.garble(r, pi), C.garble(r, rho)
        quads += 1
        holds = product_preserves_garbling_check(pi, pi_p, rho, rho_p)
        kern = garbling_kernel(product(pi, rho), product(pi_p, rho_p))
        violations += not holds or kern is None
    report(7, violations == 0, f"{quads} quadruples, {violations} violations")


# 8 ---------------------------------------------------------------------------

def _inequality(pi, pi_p):
    """Mixture condition computed straight from the likelihood rows."""
    overlap = sum((min(l, h) for _, l, h in pi_p), ZERO)
    mass_l = sum((l for _, l, h in pi if h == 0), ZERO)
    mass_h = sum((h for _, l, h in pi if l == 0), ZERO)
    return 1 - overlap, min(mass_l, mass_h)


def test_criterion_08_mixture_existence(report):
    r = C.rng(8)
    pairs = agree = somes = verified = 0
    for k in range(240):
        pi = C.conclusive_experiment(r, r.randint(0, 2)) if k % 3 else C.experiment(r)
        pi_p = C.garble(r, pi) if k % 4 else C.experiment(r)
        lhs, rhs = _inequality(pi, pi_p)
        mixture = mixture_exists(pi, pi_p, C.prior(r))
        pairs += 1
        if (mixture is not None) != (lhs <= rhs):
            continue
        if mixture is None:
            # the two candidate weights both fail the sandwich by the kernel solver
            sandwiched = [garbling_kernel(pi, mixture_experiment(w).experiment) is not None
                          and garbling_kernel(mixture_experiment(w).experiment, pi_p) is not None
                          for w in {1 - rhs, 1 - lhs} if 0 <= w <= 1]
            agree += not any(sandwiched)
            continue
        agree += 1
        somes += 1
        m = mixture.experiment
        k1, k2 = garbling_kernel(pi, m), garbling_kernel(m, pi_p)
        verified += k1 is not None and k2 is not None and k1.reproduces(pi, m) and k2.reproduces(m, pi_p)
    pi = InformationStructure.from_rows([F(17, 20), 0, F(3, 20)], [0, F(9, 10), F(1, 10)])
    pi_p = InformationStructure.from_rows([F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)])
    verdict = check_sufficient_social(pi, pi_p, F(1, 2))
    named = verdict.status is Status.PROVED and verdict.certificate.p == F(3, 20)
    ok = agree == pairs and verified == somes and 0 < somes < pairs and named
    report(8, ok, f"{pairs} pairs agree with the inequality, {somes} mixtures kernel-verified, p=3/20 on the named pair")


# 9 ---------------------------------------------------------------------------

def test_criterion_09_self_comparison(report):
    r = C.rng(9)
    proved = 0
    for _ in range(20):
        p = F(r.randint(0, 9), 10)
        proved += self_social(mixture_experiment(p).experiment, C.prior(r)).status is Status.PROVED
    pi = InformationStructure.from_rows([F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)])
    verdict = self_social(pi, F(1, 2))
    cert = verdict.certificate
    refuted = (verdict.refuted and cert.agent == 2 and cert.equilibrium_value < cert.benchmark
               and cert.recheck(pi, pi, F(1, 2)))
    report(9, proved == 20 and refuted,
           f"20/20 mixtures proved; supp {{1/4,3/4}} refuted with V2={cert.equilibrium_value} < Vbar2={cert.benchmark}")


# 10 --------------------------------------------------------------------------

def test_criterion_10_hybrid_chain(report):
    r = C.rng(10)
    instances = equilibria = failures = 0
    horizon = 6
    while instances < 30:
        d, mu = C.problem(r), C.prior(r)
        if len(d.actions) < 2:
            continue
        pi = C.conclusive_experiment(r, r.randint(1, 2))
        mass = min(sum(l for _, l, h in pi if h == 0), sum(h for _, l, h in pi if l == 0))
        p = 1 - mass + (mass * r.randint(0, 2)) / 4
        mixture = mixture_experiment(p)
        imitation = imitation_profile(d, pi, mixture, mu, horizon)
        base = evaluate_profile(d, pi, mu, imitation).values
        vbar_mix = observable_signal_value(d, mixture.experiment, mu, horizon)
        failures += base != vbar_mix
        for e in enumerate_equilibria(d, pi, mu, horizon, 8):
            equilibria += 1
            chain = [evaluate_profile(d, pi, mu, hybrid_profile(e.profile, imitation, k)).values
                     for k in range(horizon + 1)]
            failures += chain[0] != base
            failures += any(e.value(i) < base[i - 1] for i in range(1, horizon + 1))
            failures += any(chain[k + 1][i - 1] < chain[k][i - 1]
                            for i in range(1, horizon + 1) for k in range(i))
        instances += 1
    report(10, failures == 0, f"{instances} instances, {equilibria} equilibria, chains monotone, sigma(0) = Vbar(mixture)")


# 11 --------------------------------------------------------------------------

def test_criterion_11_revealing_profile(report):
    r = C.rng(11)
    instances = failures = 0
    while instances < 30:
        d, pi_p, mu = C.problem(r), C.experiment(r), C.prior(r)
        horizon = r.randint(1, 4)
        augmented, build = augment_revealing(d, pi_p.signals)
        profile = build(pi_p, mu, horizon)
        ok = bool(verify_equilibrium(augmented, pi_p, mu, profile))
        ok &= evaluate_profile(augmented, pi_p, mu, profile).values == observable_signal_value(d, pi_p, mu, horizon)
        failures += not ok
        instances += 1
    report(11, failures == 0, f"{instances} instances verified, V_i = Vbar_i(pi') exactly")


# 12 --------------------------------------------------------------------------

def test_criterion_12_suite_runtime(report, session_elapsed):
    elapsed = session_elapsed()
    report(12, elapsed <= 300, f"session so far {elapsed:.1f}s (limit 300s)")
