"""Command-line front end.

Exit codes: 0 = analysis completed (whatever the verdict), 1 = input error,
2 = internal defect (a structural/numeric disagreement or fixture failure).
All randomized commands refuse to run without --seed; JSON output is
byte-deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import balance as bal
from . import degeneracy as deg
from . import spectral as spec
from . import strong
from . import structural as struc
from .errors import LapctrlError
from .fixtures import run_fixture_suite, suite_summary
from .graph import LeaderSet, load_graph

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEFECT = 2


def _dump(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)


def _parse_leaders(text):
    try:
        return LeaderSet.of(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise LapctrlError(f"bad leader list {text!r}") from None


def _parse_vector(text, n, name):
    try:
        vec = [float(tok) for tok in text.split(",")]
    except ValueError:
        raise LapctrlError(f"bad {name} vector {text!r}") from None
    if len(vec) != n:
        raise LapctrlError(f"{name} must have {n} components, got {len(vec)}")
    return vec


def _protocols(arg):
    if arg == "both":
        return [spec.Protocol.ABS, spec.Protocol.SIGNED]
    return [spec.Protocol.of(arg)]


def _emit(args, doc, lines):
    if args.json:
        print(_dump(doc))
    else:
        for line in lines:
            print(line)


def cmd_analyze(args):
    g = load_graph(args.graph)
    leaders = _parse_leaders(args.leaders)
    exact = True if args.exact else None
    doc = {"command": "analyze", "graph": g.fingerprint(), "protocols": {}}
    lines = [f"graph: n={g.n} {'directed' if g.directed else 'undirected'}, "
             f"leaders {list(leaders.ids)}"]
    for protocol in _protocols(args.protocol):
        M = spec.build_laplacian(g, protocol)
        verdict = spec.kalman_dim(M, leaders, tol=args.tol, exact=exact)
        pbh = spec.pbh_test(M, leaders, tol=args.tol)
        entry = {"kalman": verdict.to_dict(), "pbh": pbh.to_dict(),
                 "basis": ["kalman-rank-test", "pbh-rank-test"]}
        word = "CONTROLLABLE" if verdict.controllable else "UNCONTROLLABLE"
        lines.append(f"[{protocol.value}] dim {verdict.dim}/{verdict.n}, {word} "
                     f"({verdict.mode}) [basis: kalman-rank-test]")
        lines.append(f"[{protocol.value}] pbh dim {pbh.dim}/{pbh.n}, "
                     f"{len(pbh.witnesses)} witness(es) [basis: pbh-rank-test]")
        for lam, vec in pbh.witnesses:
            lines.append(f"    witness at eigenvalue {lam}: "
                         + np.array2string(np.asarray(vec), precision=4))
        if len(leaders) == 1 and not g.directed and g.is_connected():
            bound = spec.distance_lower_bound(g, leaders.ids[0])
            entry["distance_lower_bound"] = bound
            lines.append(f"[{protocol.value}] dim >= {bound} "
                         f"[basis: distance-lower-bound]")
        doc["protocols"][protocol.value] = entry
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_degeneracy(args):
    g = load_graph(args.graph)
    report = deg.degeneracy_report(g, tol=args.tol, budget=args.budget)
    doc = report.to_dict()
    doc["basis"] = "kernel-multiplicity-count"
    lines = [f"k_structural={report.k_structural} k_numeric={report.k_numeric} "
             f"agree={report.agree} [basis: kernel-multiplicity-count]"]
    for c in report.circles:
        lines.append(f"  zero circle {list(c.nodes)} ({c.mode})")
    for grp in report.groups:
        lines.append(f"  identical nodes {list(grp.inside)} over {list(grp.outside)} "
                     f"(alpha={grp.alpha})")
    for p in report.pairs:
        lines.append(f"  opposite pair ({p.i},{p.j}) via {list(p.common)}")
    if args.leaders:
        verdict = deg.insufficiency_check(g, _parse_leaders(args.leaders),
                                          tol=args.tol, budget=args.budget)
        doc["insufficiency"] = verdict.to_dict()
        lines.append(f"inputs q={verdict.q} vs multiplicity k={verdict.k_numeric}: "
                     f"{verdict.verdict} [basis: zero-multiplicity-input-deficit]")
    _emit(args, doc, lines)
    return EXIT_OK if report.agree else EXIT_DEFECT


def cmd_balance(args):
    g = load_graph(args.graph)
    result = bal.check_balance(g)
    doc = result.to_dict()
    doc["basis"] = "balance-gauge-certificate"
    lines = [f"balanced={result.balanced} [basis: balance-gauge-certificate]"]
    if result.balanced:
        lines.append(f"  sigma={list(result.gauge.sigma)}")
    else:
        lines.append(f"  witness cycle {list(result.witness_cycle)}")
    if g.is_connected():
        eq = bal.verify_equivalences(g, tol=args.tol)
        doc["equivalences"] = eq.to_dict()
        doc["equivalences"]["basis"] = "balance-criteria-equivalence"
        lines.append(f"  criteria: cycles {eq.cycles_positive}, gauge {eq.gauge_exists}, "
                     f"abs-kernel {eq.zero_in_abs_spectrum}, consistent={eq.consistent} "
                     f"[basis: balance-criteria-equivalence]")
        if not eq.consistent:
            _emit(args, doc, lines)
            return EXIT_DEFECT
    if args.audit:
        if args.seed is None:
            raise LapctrlError("--audit requires --seed")
        leaders = _parse_leaders(args.leaders)
        audit = bal.invariance_audit(g, leaders, flips=args.audit, seed=args.seed)
        doc["invariance_audit"] = audit.to_dict()
        doc["invariance_audit"]["basis"] = "gauge-invariance-of-controllable-subspace"
        lines.append(f"  gauge invariance: base dim {audit.base_dim}, equality rate "
                     f"{audit.rate:.0%} over {audit.samples} gauges "
                     f"[basis: gauge-invariance-of-controllable-subspace]")
        if audit.rate < 1.0:
            _emit(args, doc, lines)
            return EXIT_DEFECT
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_structural(args):
    g = load_graph(args.graph)
    leaders = _parse_leaders(args.leaders)
    if args.seed is None:
        raise LapctrlError("structural requires --seed (witness search is randomized)")
    protocol = spec.Protocol.of(args.protocol if args.protocol != "both" else "signed")
    verdict = struc.structural_verdict(g, leaders, protocol=protocol,
                                       witness_trials=args.trials, seed=args.seed)
    doc = verdict.to_dict()
    doc["basis"] = "connectivity-accessibility-criterion"
    lines = [f"{verdict.verdict} (reason: {verdict.reason}) "
             f"[basis: connectivity-accessibility-criterion]"]
    if verdict.unaccessible:
        lines.append(f"  unaccessible nodes: {list(verdict.unaccessible)}")
    if verdict.witness is not None:
        lines.append("  weight witness found [basis: weight-witness-search]")
        for i, j, w in verdict.witness.edges:
            lines.append(f"    {i} {j} {float(w):.6g}")
    elif verdict.controllable and args.trials:
        lines.append("  no weight witness within the trial budget "
                     "[basis: weight-witness-search]")
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_ssc(args):
    g = load_graph(args.graph)
    leaders = _parse_leaders(args.leaders)
    if args.seed is None:
        raise LapctrlError("ssc requires --seed (the audit is randomized)")
    report = strong.ssc_report(g, leaders, samples=args.samples, seed=args.seed,
                               protocol=args.protocol)
    doc = report.to_dict()
    doc["basis"] = {
        "verdict": "zero-forcing-closure" if report.zf_complete
        else "layered-connection-rank" if report.layered_pass
        else "ssc-random-audit",
        "lower_bound": "control-path-bound",
    }
    lines = [
        f"{report.verdict} [basis: {doc['basis']['verdict']}]",
        f"  lower bound {report.lower_bound} [basis: control-path-bound]",
        f"  zero-forcing closure {len(report.zf_closure)}/{g.n} nodes "
        f"[basis: zero-forcing-closure]",
        f"  layered rank test: {'pass' if report.layered_pass else 'fail'} "
        f"[basis: layered-connection-rank]",
        f"  audit min dim {report.audit_min_dim} over {args.samples} samples "
        f"[basis: ssc-random-audit]",
    ]
    if report.symmetric_followers:
        lines.append(f"  symmetric follower orbits {list(report.symmetric_followers)} "
                     f"[basis: symmetric-follower-orbits]")
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_steer(args):
    g = load_graph(args.graph)
    leaders = _parse_leaders(args.leaders)
    protocol = spec.Protocol.of(args.protocol if args.protocol != "both" else "abs")
    M = spec.build_laplacian(g, protocol)
    x0 = _parse_vector(args.x0, g.n, "--x0")
    xf = _parse_vector(args.xf, g.n, "--xf")
    result = spec.steer(M, leaders, x0, xf, horizon=args.horizon, steps=args.steps,
                        tol=args.tol if args.tol is not None else 1e-8)
    doc = {"command": "steer", "terminal_error": result.terminal_error,
           "gramian_rank": result.gramian_rank, "steps": args.steps,
           "horizon": args.horizon, "basis": "controllability-gramian-steering"}
    lines = [f"steered over horizon {args.horizon} in {args.steps} steps; "
             f"terminal error {result.terminal_error:.3e} "
             f"[basis: controllability-gramian-steering]"]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
        doc["out"] = args.out
        lines.append(f"trajectories written to {args.out}")
    elif not args.json:
        sys.stdout.write(result.to_csv())
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_fixtures(args):
    results = run_fixture_suite(seed=args.seed if args.seed is not None else 7,
                                samples=args.samples, jobs=args.jobs)
    summary = suite_summary(results)
    if args.json:
        print(_dump(summary))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name} [basis: {r.basis}] "
                  f"-- {r.detail}")
        total = len(results)
        good = sum(r.passed for r in results)
        print(f"{good}/{total} fixtures passed")
    return EXIT_OK if summary["passed"] else EXIT_DEFECT


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lapctrl",
        description="Controllability analysis of signed-graph consensus dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, leaders_required=True):
        p.add_argument("--graph", required=True, help="graph file (edge list or JSON)")
        p.add_argument("--leaders", required=leaders_required, default="",
                       help="comma-separated leader ids")
        p.add_argument("--protocol", default="both", choices=["abs", "signed", "both"])
        p.add_argument("--tol", type=float, default=None,
                       help="eigenvalue-zero tolerance (relative)")
        p.add_argument("--exact", action="store_true",
                       help="force exact-rational arithmetic")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("analyze", help="Kalman and PBH controllability verdicts")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("degeneracy", help="kernel-inflating pattern detection")
    common(p, leaders_required=False)
    p.add_argument("--budget", type=int, default=10**5, help="cycle enumeration budget")
    p.set_defaults(func=cmd_degeneracy)

    p = sub.add_parser("balance", help="structural balance and gauge invariance")
    common(p, leaders_required=False)
    p.add_argument("--audit", type=int, default=0,
                   help="number of random gauges for the invariance audit")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("structural", help="structural controllability verdict")
    common(p)
    p.add_argument("--trials", type=int, default=20, help="weight witness trials")
    p.set_defaults(func=cmd_structural)

    p = sub.add_parser("ssc", help="strong structural controllability work-up")
    common(p)
    p.add_argument("--samples", type=int, default=200, help="audit sample count")
    p.set_defaults(func=cmd_ssc)

    p = sub.add_parser("steer", help="minimum-energy steering demo")
    common(p)
    p.add_argument("--x0", required=True, help="initial state, comma separated")
    p.add_argument("--xf", required=True, help="target state, comma separated")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default=None, help="trajectory CSV path")
    p.set_defaults(func=cmd_steer)

    p = sub.add_parser("fixtures", help="run the built-in fixture suite")
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LapctrlError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(args, "json", False):
            print(_dump(payload))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
