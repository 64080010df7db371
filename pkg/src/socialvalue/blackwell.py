"""Blackwell dominance for binary-state experiments.

Two deciders are kept deliberately independent: :func:`roc_dominates`
compares ROC envelopes geometrically, :func:`garbling_kernel` searches for a
stochastic kernel with an exact feasibility solver.  :func:`blackwell_geq`
answers with the first and can cross-check against the second.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalDisagreement, PreconditionViolated
from .lp import feasible_point
from .model import (
    ONE,
    ZERO,
    InformationStructure,
    as_prior,
    as_rational,
    private_belief_distribution,
    product,
)

# Cross-check every blackwell_geq call against the kernel solver.
VERIFY = os.environ.get("SOCIALVALUE_VERIFY", "") not in ("", "0")

MIXTURE_SIGNALS = ("s0", "s1", "s2")  # conclusive L, conclusive H, uninformative


@dataclass(frozen=True)
class RocCurve:
    """Upper concave envelope of an experiment in (P(s|L), P(s|H)) coordinates."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def of(cls, pi: InformationStructure) -> RocCurve:
        # likelihood ratio H/L, largest first; L = 0 means an infinite ratio
        def key(cell):
            _, l, h = cell
            return (0, 0) if l == 0 else (1, -h / l)

        vertices = [(ZERO, ZERO)]
        x = y = ZERO
        cells = sorted(pi, key=key)
        k = 0
        while k < len(cells):
            group_key = key(cells[k])
            while k < len(cells) and key(cells[k]) == group_key:
                x += cells[k][1]
                y += cells[k][2]
                k += 1
            vertices.append((x, y))
        return cls(tuple(vertices))

    def at(self, x: Fraction) -> Fraction:
        """Height of the envelope at false-positive rate ``x``."""
        x = as_rational(x)
        best = ZERO
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                if x1 == x0:
                    best = max(best, y1)
                else:
                    best = max(best, y0 + (y1 - y0) * (x - x0) / (x1 - x0))
        return best


@dataclass(frozen=True)
class GarblingKernel:
    source: tuple
    target: tuple
    kernel: dict = field(hash=False)  # source signal -> {target signal: prob}

    def apply(self, pi: InformationStructure) -> dict[str, list[Fraction]]:
        out = {}
        for state in ("L", "H"):
            out[state] = [
                sum((self.kernel[s].get(t, ZERO) * pi.prob(s, state) for s in self.source), ZERO)
                for t in self.target
            ]
        return out

    def is_stochastic(self) -> bool:
        return all(
            all(v >= 0 for v in row.values()) and sum(row.values()) == 1
            for row in self.kernel.values()
        )

    def reproduces(self, pi: InformationStructure, pi_prime: InformationStructure) -> bool:
        if not self.is_stochastic() or set(self.source) != set(pi.signals):
            return False
        image = self.apply(pi)
        return all(
            image[state] == [pi_prime.prob(t, state) for t in self.target]
            for state in ("L", "H")
        )


@dataclass(frozen=True)
class MixtureExperiment:
    """Mixture of full and no information with no-information weight ``p``."""

    p: Fraction
    experiment: InformationStructure
    p_range: tuple[Fraction, Fraction] | None = None

    @property
    def degenerate(self) -> bool:
        return self.p in (ZERO, ONE)


def mixture_experiment(p) -> MixtureExperiment:
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise PreconditionViolated(f"mixture weight must lie in [0, 1], got {p}")
    exp = InformationStructure(MIXTURE_SIGNALS, {"L": [1 - p, 0, p], "H": [0, 1 - p, p]})
    return MixtureExperiment(p, exp)


def roc_dominates(pi: InformationStructure, pi_prime: InformationStructure) -> bool:
    envelope = RocCurve.of(pi)
    return all(y <= envelope.at(x) for x, y in RocCurve.of(pi_prime).vertices)


def garbling_kernel(pi: InformationStructure, pi_prime: InformationStructure) -> GarblingKernel | None:
    """Exact kernel turning ``pi`` into ``pi_prime``, or None if none exists."""
    n_src, n_tgt = len(pi), len(pi_prime)
    n_var = n_src * n_tgt
    A, b = [], []
    for s in range(n_src):
        row = [0] * n_var
        for t in range(n_tgt):
            row[s * n_tgt + t] = 1
        A.append(row)
        b.append(1)
    for state in ("L", "H"):
        src, tgt = pi.row(state), pi_prime.row(state)
        for t in range(n_tgt):
            row = [ZERO] * n_var
            for s in range(n_src):
                row[s * n_tgt + t] = src[s]
            A.append(row)
            b.append(tgt[t])
    x = feasible_point(A, b)
    if x is None:
        return None
    kernel = {
        s: {t: x[i * n_tgt + j] for j, t in enumerate(pi_prime.signals) if x[i * n_tgt + j]}
        for i, s in enumerate(pi.signals)
    }
    result = GarblingKernel(pi.signals, pi_prime.signals, kernel)
    if not result.reproduces(pi, pi_prime):
        raise InternalDisagreement("feasibility solver returned a kernel that does not re-multiply")
    return result


def blackwell_geq(pi: InformationStructure, pi_prime: InformationStructure, check: bool | None = None) -> bool:
    """True iff ``pi_prime`` is a garbling of ``pi``."""
    verdict = roc_dominates(pi, pi_prime)
    if VERIFY if check is None else check:
        if verdict != (garbling_kernel(pi, pi_prime) is not None):
            raise InternalDisagreement(
                f"ROC test says {verdict} but kernel search disagrees for {pi} vs {pi_prime}")
    return verdict


def product_preserves_garbling_check(pi, pi_prime, rho, rho_prime) -> bool:
    if not (blackwell_geq(pi, pi_prime) and blackwell_geq(rho, rho_prime)):
        raise PreconditionViolated("both factor pairs must be Blackwell ordered")
    return blackwell_geq(product(pi, rho), product(pi_prime, rho_prime))


def min_mass(pi_prime: InformationStructure) -> Fraction:
    """Total overlap sum_s min{P(s|L), P(s|H)}."""
    return sum((min(l, h) for _, l, h in pi_prime), ZERO)


def mixture_bounds(pi: InformationStructure, pi_prime: InformationStructure, prior) -> tuple[Fraction, Fraction]:
    """Both sides of the mixture-existence inequality: (1 - overlap of pi', min conclusive mass of pi)."""
    summary = private_belief_distribution(pi, as_prior(prior))
    return 1 - min_mass(pi_prime), min(summary.conclusive_L_mass, summary.conclusive_H_mass)


def mixture_exists(pi: InformationStructure, pi_prime: InformationStructure, prior) -> MixtureExperiment | None:
    """Most informative full/no-information mixture sandwiched between the two, if any."""
    lhs, rhs = mixture_bounds(pi, pi_prime, prior)
    if lhs > rhs:
        return None
    p = 1 - rhs
    base = mixture_experiment(p)
    mixture = MixtureExperiment(p, base.experiment, (p, 1 - lhs))
    if not (blackwell_geq(pi, mixture.experiment, check=True)
            and blackwell_geq(mixture.experiment, pi_prime, check=True)):
        raise InternalDisagreement("constructed mixture is not sandwiched in the Blackwell order")
    return mixture


def three_point_garbling(mixture: MixtureExperiment, pi_prime: InformationStructure) -> GarblingKernel:
    """Explicit kernel from a full/no-information mixture onto ``pi_prime``.

    Routes through the three-signal experiment whose uninformative mass equals
    the overlap of ``pi_prime``: conclusive mass feeds the signals that lean
    the same way, overlap mass is shared by all.
    """
    p = mixture.p
    m = min_mass(pi_prime)
    if p > m:
        raise PreconditionViolated(f"mixture weight {p} exceeds the overlap {m} of the target")
    targets = pi_prime.signals
    row_s0 = {t: max(l - h, ZERO) / (1 - m) for t, l, h in pi_prime} if m < 1 else None
    row_s1 = {t: max(h - l, ZERO) / (1 - m) for t, l, h in pi_prime} if m < 1 else None
    row_s2 = {t: min(l, h) / m for t, l, h in pi_prime} if m > 0 else None

    def blend(conclusive_row):
        w_direct = (1 - m) / (1 - p)
        w_overlap = (m - p) / (1 - p)
        out = {}
        for t in targets:
            v = ZERO
            if w_direct:
                v += w_direct * conclusive_row[t]
            if w_overlap:
                v += w_overlap * row_s2[t]
            out[t] = v
        return out

    kernel = {}
    for s in mixture.experiment.signals:
        if s == "s2":
            row = row_s2
        else:
            row = blend(row_s0 if s == "s0" else row_s1)
        kernel[s] = {t: v for t, v in row.items() if v}
    result = GarblingKernel(mixture.experiment.signals, targets, kernel)
    if not result.reproduces(mixture.experiment, pi_prime):
        raise InternalDisagreement("three-point garbling failed to reproduce the target")
    return result
