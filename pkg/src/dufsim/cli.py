"""Command-line interface.

Subcommands:
  run           run a seeded experiment and write trials.csv / summary.csv /
                histogram.csv and a distribution plot
  export-graph  dump a decoding graph as line-delimited text
  trace         decode one sampled syndrome and dump the per-cycle trace

Every config-file key is also a flag; flags win.  Exit status is nonzero if
any trial fails annihilation or the worst-case cycle bound.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace

from .graph import build_circuit_level, build_phenomenological
from .harness import (ExperimentConfig, emit_outputs, parse_config,
                      run_experiment)
from .noise import (sample_circuit_level, sample_erasures,
                    sample_phenomenological)
from .pearray import decode_distributed, trace_to_text


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--d", type=int)
    sub.add_argument("--rounds", type=int)
    sub.add_argument("--model", choices=("phenomenological", "circuit", "erasure"))
    sub.add_argument("--p", type=float)
    sub.add_argument("--pe", type=float, dest="p_e")
    sub.add_argument("--wmax", type=int, dest="w_max")
    sub.add_argument("--weighted-noise", action="store_true", default=None,
                     dest="weighted_noise")
    sub.add_argument("--decoder", choices=("serial", "distributed"))
    sub.add_argument("--context-n", type=int, dest="context_n")
    sub.add_argument("--sliding-window", action="store_true", default=None,
                     dest="sliding_window")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--clock-ns", type=float, dest="clock_ns")
    sub.add_argument("--out-dir", dest="out_dir")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    overrides = {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            overrides[f.name] = v
    return replace(cfg, **overrides)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if not cfg.out_dir:
        cfg = replace(cfg, out_dir="out")
    outcome = run_experiment(cfg)
    paths = emit_outputs(outcome, cfg.out_dir)
    for path in paths:
        print(path)
    if outcome.summary is not None:
        s = outcome.summary
        print(f"trials={s.n} mean={s.mean_ns:.1f}ns p50={s.p50_ns:.0f}ns "
              f"p97={s.p97_ns:.0f}ns ns/round={s.ns_per_round:.2f} "
              f"LER={s.logical_error_rate:.2e} annihilated={s.all_annihilated}")
    if not outcome.ok:
        print("FAILURE: annihilation or cycle-bound violation", file=sys.stderr)
        return 1
    return 0


def cmd_export_graph(args: argparse.Namespace) -> int:
    builder = build_circuit_level if args.model == "circuit" else build_phenomenological
    g = builder(args.d, args.rounds)
    text = g.export_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    builder = build_circuit_level if args.model == "circuit" else build_phenomenological
    g = builder(args.d, args.rounds)
    if args.model == "erasure":
        g = build_phenomenological(args.d, args.rounds)
        pattern, s = sample_erasures(g, args.pe, args.seed, args.trial)
    elif args.model == "circuit":
        pattern, s = sample_circuit_level(g, args.p, args.seed, args.trial)
    else:
        pattern, s = sample_phenomenological(g, args.p, args.seed, args.trial)
    res = decode_distributed(g, s, record_trace=True)
    sys.stdout.write(trace_to_text(res.trace))
    print(f"# cycles={res.cycles} quiesce={res.quiesce_cycle} "
          f"iterations={res.iterations} clusters={len(res.clusters.clusters)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dufsim", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="run an experiment")
    _add_run_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    exp_p = subs.add_parser("export-graph", help="dump a decoding graph")
    exp_p.add_argument("--d", type=int, required=True)
    exp_p.add_argument("--rounds", type=int, required=True)
    exp_p.add_argument("--model", default="phenomenological",
                       choices=("phenomenological", "circuit"))
    exp_p.add_argument("--out")
    exp_p.set_defaults(func=cmd_export_graph)

    tr_p = subs.add_parser("trace", help="trace one decode cycle by cycle")
    tr_p.add_argument("--d", type=int, default=5)
    tr_p.add_argument("--rounds", type=int, default=5)
    tr_p.add_argument("--model", default="phenomenological",
                      choices=("phenomenological", "circuit", "erasure"))
    tr_p.add_argument("--p", type=float, default=0.01)
    tr_p.add_argument("--pe", type=float, default=0.01)
    tr_p.add_argument("--seed", type=int, default=0)
    tr_p.add_argument("--trial", type=int, default=0)
    tr_p.set_defaults(func=cmd_trace)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
