"""Command-line entry point: ``python -m sinrcast <command>``.

Commands:

    gen          write a network file
    run          one broadcast on a network file, trace written as JSON lines
    verify-ssf   build (or read) a strongly-selective family and check it
    experiment   run an experiment spec (JSON) and write per-run CSV

The exit status is 0 only when every run met its admissibility and
completion contracts.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..protocols import GEN, GRAN, InadmissibleNetwork, det_broadcast
from ..runtime import default_tau, write_trace
from ..selectors import EnumerationTooLarge, build_ssf, find_violation, read_ssf, write_ssf
from ..sinr import CLASSICAL, DISTURBANCE, SinrParams
from .experiment import ExperimentFailure, ExperimentSpec, run_experiment, summary, write_csv
from .generate import GENERATORS, GenerationFailure, generate
from .io import read_network, write_network


def _physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sinrcast", description="SINR broadcast simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a network file")
    g.add_argument("--generator", choices=GENERATORS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--area-scale", type=float, default=1.0)
    g.add_argument("--spacing", type=float)
    g.add_argument("--clusters", type=int, default=4)
    g.add_argument("--g-target", type=float, default=100.0)
    _physics(g)

    r = sub.add_parser("run", help="run one broadcast")
    r.add_argument("--network", required=True)
    r.add_argument("--variant", choices=(GEN, GRAN), default=GEN)
    r.add_argument("--model", choices=(CLASSICAL, DISTURBANCE), default=CLASSICAL)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--trace")
    r.add_argument("--eta", type=float, default=0.2)
    r.add_argument("--zeta", type=float, default=0.1)
    r.add_argument("--selector-k", type=int)
    r.add_argument("--tau", type=int, help="phase length; defaults to the disturbance-model default")
    r.add_argument("--round-budget", type=int, default=10**9)

    v = sub.add_parser("verify-ssf", help="check a strongly-selective family exhaustively")
    v.add_argument("--I", dest="id_domain", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--input", help="read the family from this file instead of building it")
    v.add_argument("--out", help="write the built family here")

    e = sub.add_parser("experiment", help="run an experiment spec")
    e.add_argument("--spec", required=True, help="JSON file with ExperimentSpec fields")
    e.add_argument("--out", required=True, help="CSV output")
    e.add_argument("--summary", help="also write the text summary here")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--trace-dir", help="where to write traces of failed runs")
    return ap


def cmd_gen(a) -> int:
    params = SinrParams(alpha=a.alpha, beta=a.beta, noise=a.noise, eps=a.eps)
    try:
        net, rejected = generate(
            a.generator,
            a.n,
            a.seed,
            params,
            area_scale=a.area_scale,
            spacing=a.spacing,
            clusters=a.clusters,
            g_target=a.g_target,
        )
    except GenerationFailure as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return 1
    write_network(net, a.out)
    print(f"wrote {len(net)} stations to {a.out} ({rejected} rejected draws)")
    return 0


def cmd_run(a) -> int:
    net = read_network(a.network, eta=a.eta, zeta=a.zeta)
    tau = a.tau
    if tau is None:
        tau = default_tau(net.n_bound, net.params.zeta) if a.model == DISTURBANCE else 1
    try:
        res = det_broadcast(
            a.variant,
            net,
            a.model,
            seed=a.seed,
            tau=tau,
            round_budget=a.round_budget,
            record=a.trace is not None,
            selector_k=a.selector_k,
        )
    except InadmissibleNetwork as exc:
        print(f"inadmissible network: {exc}", file=sys.stderr)
        return 1
    if a.trace:
        write_trace(res.trace, a.trace)
    report = {
        "variant": res.variant,
        "model": a.model,
        "tau": tau,
        "stages": res.stages_used,
        "rounds": res.rounds_used,
        "all_informed": res.all_informed,
        "timed_out": res.timed_out,
    }
    print(json.dumps(report))
    return 0 if res.all_informed and not res.timed_out else 1


def cmd_verify_ssf(a) -> int:
    if a.input:
        fam = read_ssf(a.input)
    elif a.id_domain is not None and a.k is not None:
        fam = build_ssf(a.id_domain, a.k)
    else:
        print("give --input, or both --I and --k", file=sys.stderr)
        return 2
    if a.out:
        write_ssf(fam, a.out)
    try:
        bad = find_violation(fam)
    except EnumerationTooLarge as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if bad is not None:
        Z, z = bad
        print(f"FAIL: no set isolates {z} in Z={sorted(Z)}")
        return 1
    print(f"PASS: ({fam.id_domain}, {fam.k})-strongly-selective, {len(fam)} sets")
    return 0


def cmd_experiment(a) -> int:
    spec = ExperimentSpec.load(a.spec)
    try:
        result = run_experiment(spec, workers=a.workers, trace_dir=a.trace_dir)
    except (ExperimentFailure, GenerationFailure) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    write_csv(result, a.out)
    text = summary(result)
    if a.summary:
        with open(a.summary, "w") as fh:
            fh.write(text)
    print(text, end="")
    return 0 if result.completion_rate == 1.0 else 1


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "verify-ssf": cmd_verify_ssf, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)
