"""Command-line front end.

Exit status: 0 on success, 2 when a relation is refuted with a certificate,
1 on any error.  Errors print a single ``Code: message`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import equilibrium as eqm
from . import model
from .blackwell import blackwell_geq, garbling_kernel, mixture_exists
from .errors import ParameterViolation, ParseError, PreconditionViolated, SocialValueError
from .model import Prior, classify, fmt, private_belief_distribution
from .orders import (
    Relation,
    Status,
    check_necessary_social,
    check_sufficient_social,
    check_weak_3support,
    refute_eventual,
    refute_social,
    refute_weak,
    self_social,
    threshold_grid,
    threshold_problem,
)
from .scenarios import example1, example2
from .serialize import SCHEMA_VERSION, dumps, dumps_csv, load, parse_rational

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _tiebreak(text):
    if text == "first":
        return eqm.FIRST_IN_ACTION_ORDER
    if text == "all":
        return "all"
    if text.startswith("pref:"):
        return eqm.prefer(*[a for a in text[5:].split(",") if a])
    raise argparse.ArgumentTypeError("expected first, all or pref:a,b,...")


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the "refuted" exit status
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="socialvalue", description="Information orders for sequential social learning.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prior", default="1/2", help="prior probability of H as P/Q (default 1/2)")
    common.add_argument("--horizon", type=_positive, help="number of agents")
    common.add_argument("--tie-break", type=_tiebreak, default=eqm.FIRST_IN_ACTION_ORDER,
                        help="first | pref:a1,a0 | all (enumerate pure equilibria)")
    common.add_argument("--cap-nodes", type=_positive, help="history-tree node cap")
    common.add_argument("--cap-atoms", type=_positive, help="belief atom cap for repeated draws")
    common.add_argument("--enumerate-cap", type=_positive, default=eqm.DEFAULT_ENUMERATE_CAP)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; unused")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", parents=[common], help="private beliefs and classification of an experiment")
    p.add_argument("--pi", required=True)

    p = sub.add_parser("blackwell", parents=[common], help="Blackwell comparison with certificates")
    p.add_argument("--pi", required=True)
    p.add_argument("--piprime", required=True)

    p = sub.add_parser("equilibrium", parents=[common], help="equilibrium payoffs and action laws")
    p.add_argument("--pi", required=True)
    p.add_argument("--problem", required=True)

    p = sub.add_parser("vbar", parents=[common], help="observable-signal benchmark")
    p.add_argument("--pi", required=True)
    p.add_argument("--problem", required=True)

    p = sub.add_parser("order", parents=[common], help="decide or refute an information order")
    p.add_argument("check", nargs="?", choices=("check",), help="optional verb")
    p.add_argument("--relation", required=True, choices=[r.value for r in Relation])
    p.add_argument("--pi", required=True)
    p.add_argument("--piprime")
    p.add_argument("--problem", help="search this problem only")
    p.add_argument("--r", action="append", help="threshold to search (repeatable)")

    p = sub.add_parser("refute", parents=[common], help="search for a counterexample to the strong order")
    p.add_argument("--pi", required=True)
    p.add_argument("--piprime", required=True)
    p.add_argument("--problem")
    p.add_argument("--r", action="append")

    p = sub.add_parser("reproduce", parents=[common], help="rebuild a canned example with its closed forms")
    p.add_argument("example", choices=("example1", "example2"))
    p.add_argument("--param", "--params", action="append", default=[], metavar="KEY=P/Q",
                   help="override a parameter (repeatable)")

    p = sub.add_parser("sweep", parents=[common], help="gap table over threshold problems")
    p.add_argument("--pi", required=True)
    p.add_argument("--piprime", required=True)
    p.add_argument("--r", action="append")
    return parser


def _prior(args) -> Prior:
    return Prior(parse_rational(args.prior, "--prior"))


def _horizon(args, default):
    return args.horizon if args.horizon is not None else default


def _family(args):
    if getattr(args, "problem", None):
        return [(None, load(args.problem, "problem"))]
    if getattr(args, "r", None):
        return [parse_rational(r, "--r") for r in args.r]
    return None


def _laws(law, actions):
    return ";".join(f"{a}={fmt(law.get(a, Fraction(0)))}" for a in actions)


def cmd_inspect(args):
    prior = _prior(args)
    pi = load(args.pi, "experiment")
    summary = private_belief_distribution(pi, prior)
    info = classify(pi, prior)
    if args.output == "csv":
        return EXIT_OK, dumps_csv(["belief", "probability"], summary.distribution.atoms)
    doc = {
        "version": SCHEMA_VERSION,
        "prior": prior.mu0,
        "private_beliefs": dict(summary.distribution.atoms),
        "conclusive_mass": {"L": summary.conclusive_L_mass, "H": summary.conclusive_H_mass},
        "signal_groups": {b: list(members) for b, members in summary.signal_groups.items()},
        "classification": {
            "no_information": info.is_no_information,
            "full_information": info.is_full_information,
            "unbounded_beliefs": info.has_unbounded_beliefs,
            "full_no_mixture": info.is_full_no_mixture,
            "mixture_weight": info.mixture_weight,
        },
    }
    return EXIT_OK, dumps(doc)


def _kernel(k):
    return None if k is None else {s: dict(row) for s, row in k.kernel.items()}


def cmd_blackwell(args):
    prior = _prior(args)
    pi, pi_p = load(args.pi, "experiment"), load(args.piprime, "experiment")
    forward, backward = blackwell_geq(pi, pi_p, check=True), blackwell_geq(pi_p, pi, check=True)
    mixture = mixture_exists(pi, pi_p, prior) if forward else None
    if args.output == "csv":
        rows = [["pi>=piprime", forward], ["piprime>=pi", backward]]
        return EXIT_OK, dumps_csv(["relation", "holds"], [[a, str(b).lower()] for a, b in rows])
    doc = {
        "version": SCHEMA_VERSION,
        "pi_geq_piprime": forward,
        "piprime_geq_pi": backward,
        "kernel": _kernel(garbling_kernel(pi, pi_p)),
        "reverse_kernel": _kernel(garbling_kernel(pi_p, pi)),
        "mixture": None if mixture is None else {
            "p": mixture.p, "p_range": list(mixture.p_range), "degenerate": mixture.degenerate,
            "experiment": mixture.experiment},
    }
    return EXIT_OK, dumps(doc)


def cmd_equilibrium(args):
    prior = _prior(args)
    pi, d = load(args.pi, "experiment"), load(args.problem, "problem")
    horizon = _horizon(args, eqm.DEFAULT_HORIZON)
    if args.tie_break == "all":
        found = eqm.enumerate_equilibria(d, pi, prior, horizon, args.enumerate_cap)
        truncated = found.truncated
    else:
        found = [eqm.compute_equilibrium(d, pi, prior, horizon, args.tie_break)]
        truncated = False
    vbar = eqm.observable_signal_value(d, pi, prior, horizon)
    if args.output == "csv":
        rows = []
        for k, res in enumerate(found):
            for i in range(1, horizon + 1):
                law = res.action_laws[i - 1]
                row = [i, res.value(i), vbar[i - 1], _laws(law["H"], d.actions), _laws(law["L"], d.actions)]
                rows.append(([k] if args.tie_break == "all" else []) + row)
        header = ["agent", "V", "Vbar", "alphaH", "alphaL"]
        return EXIT_OK, dumps_csv((["equilibrium"] if args.tie_break == "all" else []) + header, rows)
    doc = {
        "version": SCHEMA_VERSION,
        "horizon": horizon,
        "Vbar": vbar,
        "truncated": truncated,
        "equilibria": [{
            "V": res.values,
            "action_laws": res.action_laws,
            "diagnostics": {k: v for k, v in res.diagnostics.items() if k != "tie_sites"},
            "profile": res.profile.to_json(pi),
        } for res in found],
    }
    return EXIT_OK, dumps(doc)


def cmd_vbar(args):
    prior = _prior(args)
    pi, d = load(args.pi, "experiment"), load(args.problem, "problem")
    horizon = _horizon(args, eqm.DEFAULT_HORIZON)
    vbar = eqm.observable_signal_value(d, pi, prior, horizon)
    if args.output == "csv":
        return EXIT_OK, dumps_csv(["agent", "Vbar"], [[i + 1, v] for i, v in enumerate(vbar)])
    return EXIT_OK, dumps({"version": SCHEMA_VERSION, "horizon": horizon, "Vbar": vbar})


def _decide(relation, pi, pi_p, prior, horizon, family, cap):
    """Run the deciders for one relation, strongest tool first."""
    if relation is Relation.SELF:
        return self_social(pi, prior, max(horizon, 2))
    if pi_p is None:
        raise ParameterViolation(f"--piprime is required for relation {relation.value}")
    sufficient = check_sufficient_social(pi, pi_p, prior)
    if sufficient.proved:
        # the strong order implies the eventual and weak ones
        sufficient.relation = relation
        return sufficient
    if relation is Relation.S:
        if family is None:
            verdict = check_necessary_social(pi, pi_p, prior)
            if verdict.refuted:
                return verdict
        return refute_social(pi, pi_p, prior, horizon, family, cap)
    if relation is Relation.ES:
        return refute_eventual(pi, pi_p, prior, max(horizon, 2), family, cap)
    try:
        verdict = check_weak_3support(pi, pi_p, prior, horizon, family, cap)
        if verdict.status is not Status.INCONCLUSIVE:
            return verdict
    except PreconditionViolated:
        pass
    return refute_weak(pi, pi_p, prior, horizon, family, cap)


def _gap_rows(verdict, pi_p, prior, horizon):
    bundle = verdict.certificate
    res = bundle.equilibrium
    vbar = eqm.observable_signal_value(bundle.problem, pi_p, prior, len(res.values))
    r = "" if bundle.r is None else bundle.r
    return [[r, i, res.value(i), vbar[i - 1], vbar[i - 1] - res.value(i)] for i in range(1, len(res.values) + 1)]


def _verdict_output(args, verdict, pi_p, prior, horizon):
    code = EXIT_REFUTED if verdict.refuted else EXIT_OK
    if args.output == "csv":
        if verdict.refuted and pi_p is not None and verdict.certificate.benchmark_kind == "observable-signal":
            return code, dumps_csv(["r", "i", "V", "Vbar", "gap"], _gap_rows(verdict, pi_p, prior, horizon))
        return code, dumps_csv(["relation", "status"], [[verdict.relation.value, verdict.status.value]])
    return code, dumps({"version": SCHEMA_VERSION, **verdict.to_json()})


def cmd_order(args):
    prior = _prior(args)
    pi = load(args.pi, "experiment")
    pi_p = load(args.piprime, "experiment") if args.piprime else None
    horizon = _horizon(args, 4)
    relation = Relation(args.relation)
    verdict = _decide(relation, pi, pi_p, prior, horizon, _family(args), args.enumerate_cap)
    return _verdict_output(args, verdict, pi if relation is Relation.SELF else pi_p, prior, horizon)


def cmd_refute(args):
    prior = _prior(args)
    pi, pi_p = load(args.pi, "experiment"), load(args.piprime, "experiment")
    horizon = _horizon(args, 4)
    verdict = refute_social(pi, pi_p, prior, horizon, _family(args), args.enumerate_cap)
    return _verdict_output(args, verdict, pi_p, prior, horizon)


def _params(pairs):
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ParseError(f"--param expects KEY=P/Q, got {pair!r}")
        out[key.strip()] = parse_rational(value, f"--param {key}")
    return out


def cmd_reproduce(args):
    params = _params(args.param)
    try:
        bundle = (example1 if args.example == "example1" else example2)(**params)
    except TypeError:
        raise ParameterViolation(f"unknown parameter for {args.example}: {sorted(params)}") from None
    d, prior = bundle.problem, bundle.prior
    if args.example == "example1":
        horizon = _horizon(args, 8)
        v_pi = eqm.compute_equilibrium(d, bundle.pi, prior, horizon).values
        v_pp = eqm.compute_equilibrium(d, bundle.pi_prime, prior, horizon).values
        columns = {"V_pi": v_pi, "V_piprime": v_pp,
                   "gap": [b - a for a, b in zip(v_pi, v_pp)]}
        oracles = ["V_pi", "V_piprime", "gap"]
    else:
        horizon = _horizon(args, 2)
        ours = eqm.enumerate_equilibria(d, bundle.pi, prior, horizon, args.enumerate_cap)
        theirs = eqm.enumerate_equilibria(d, bundle.pi_prime, prior, horizon, args.enumerate_cap)
        # the worst equilibrium under pi and the best under pi' at agent 2 (agent 1 if alone)
        k = min(horizon, 2)
        star = min(ours, key=lambda e: e.value(k))
        two_star = max(theirs, key=lambda e: e.value(k))
        columns = {"V_pi_sigma_star": star.values, "V_piprime_sigma_2star": two_star.values}
        oracles = ["V_pi_sigma_star", "V_piprime_sigma_2star"]
    columns["Vbar_piprime"] = eqm.observable_signal_value(d, bundle.pi_prime, prior, horizon)
    known = bundle.oracle_values(horizon)
    rows = []
    for i in range(1, horizon + 1):
        row = {"agent": i, **{name: col[i - 1] for name, col in columns.items()}}
        for name in oracles:
            row[f"oracle_{name}"] = known.get((name, i), "")
        rows.append(row)
    if args.output == "csv":
        header = list(rows[0])
        return EXIT_OK, dumps_csv(header, [[row[h] for h in header] for row in rows])
    doc = {"version": SCHEMA_VERSION, "example": args.example,
           "params": {k: v for k, v in bundle.params.items()}, "prior": prior.mu0,
           "pi": bundle.pi, "piprime": bundle.pi_prime, "problem": d, "rows": rows}
    return EXIT_OK, dumps(doc)


def cmd_sweep(args):
    prior = _prior(args)
    pi, pi_p = load(args.pi, "experiment"), load(args.piprime, "experiment")
    horizon = _horizon(args, 4)
    if args.r:
        grid = [parse_rational(r, "--r") for r in args.r]
    else:
        grid = threshold_grid([pi, pi_p], prior, horizon)
    rows = []
    for r in sorted(set(grid)):
        d = threshold_problem(r)
        res = eqm.compute_equilibrium(d, pi, prior, horizon, args.tie_break)
        vbar = eqm.observable_signal_value(d, pi_p, prior, horizon)
        rows.extend([r, i, res.value(i), vbar[i - 1], vbar[i - 1] - res.value(i)] for i in range(1, horizon + 1))
    header = ["r", "i", "V", "Vbar", "gap"]
    if args.output == "csv":
        return EXIT_OK, dumps_csv(header, rows)
    return EXIT_OK, dumps({"version": SCHEMA_VERSION, "rows": [dict(zip(header, row)) for row in rows]})


COMMANDS = {
    "inspect": cmd_inspect, "blackwell": cmd_blackwell, "equilibrium": cmd_equilibrium, "vbar": cmd_vbar,
    "order": cmd_order, "refute": cmd_refute, "reproduce": cmd_reproduce, "sweep": cmd_sweep,
}


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv`` and execute; returns ``(exit status, output text)``."""
    args = build_parser().parse_args(argv)
    if args.tie_break == "all" and args.command != "equilibrium":
        raise ParameterViolation("--tie-break all applies to the equilibrium command only")
    saved = model.DEFAULT_ATOM_CAP, eqm.DEFAULT_NODE_CAP
    try:
        if args.cap_atoms:
            model.DEFAULT_ATOM_CAP = args.cap_atoms
        if args.cap_nodes:
            eqm.DEFAULT_NODE_CAP = args.cap_nodes
        code, text = COMMANDS[args.command](args)
    finally:
        model.DEFAULT_ATOM_CAP, eqm.DEFAULT_NODE_CAP = saved
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        return code, ""
    return code, text


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except SocialValueError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
