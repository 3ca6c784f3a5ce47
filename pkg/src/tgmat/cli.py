"""Command-line front end: one subcommand per engine mode plus compare and
corpus generation.

Exit codes: 0 ok, 2 parse error, 3 mode/program mismatch, 4 round cap
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chase import ChaseConfig, RoundCapExceeded, chase
from .datalog_opt import min_datalog, tg_mat
from .egraph import expand_until_fixpoint, materialize
from .generate import FAMILIES, generate_corpus
from .linear import min_linear, tgraph_linear
from .logic import equivalent
from .model import (ParseError, Program, parse_facts, parse_program,
                    print_facts, strip_internal)

EXIT_OK, EXIT_PARSE, EXIT_MISMATCH, EXIT_CAP = 0, 2, 3, 4


class ModeMismatch(ValueError):
    pass


def _load(program_path: str, facts_path: str | None):
    program = parse_program(Path(program_path).read_text())
    base = set()
    if facts_path:
        base = parse_facts(Path(facts_path).read_text(), program)
    return program, base


def _write(path: str | None, text: str):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_instance(path: str | None, facts, program: Program):
    _write(path, print_facts(strip_internal(facts, program)))


def _emit_metrics(path: str | None, metrics: dict):
    _write(path, json.dumps(metrics, indent=2, sort_keys=True) + "\n")


def _run_mode(mode: str, program: Program, base, args) -> tuple[set, dict, str | None]:
    """Run one engine mode; returns (facts, metrics, optional graph json)."""
    cap = args.cap
    if mode == "chase":
        result = chase(program, base,
                       ChaseConfig(variant=args.variant, round_cap=cap))
        return result.final, result.metrics(), None
    if mode == "full-eg":
        res = expand_until_fixpoint(program, base, cap=cap)
        union = set(res.snapshots[-1])  # alias facts already stripped
        metrics = {
            "rounds": res.rounds,
            "tg_nodes": len(res.graph.nodes),
            "tg_edges": len(res.graph.edges()),
            "facts_derived": len(union) - len(base),
        }
        return union, metrics, res.graph.to_json()
    if mode == "tg-linear":
        if not program.is_linear:
            raise ModeMismatch("tg-linear requires a linear program")
        g = tgraph_linear(program, round_cap=cap)
        if not args.no_min:
            g = min_linear(g, program)
        facts = materialize(g, base, program).union() if base else set(base)
        metrics = {
            "tg_nodes": len(g.nodes),
            "tg_edges": len(g.edges()),
            "facts_derived": len(facts) - len(base) if base else 0,
        }
        return facts, metrics, g.to_json()
    if mode == "tgmat":
        if not program.is_datalog:
            raise ModeMismatch("tgmat requires a Datalog program")
        res = tg_mat(program, base, use_min=not args.no_min,
                     use_exec=not args.no_exec_opt, cap=cap)
        return res.final, res.metrics, res.graph.to_json()
    raise ModeMismatch(f"unknown mode {mode!r}")


def _add_common(sp, facts_required: bool = True):
    sp.add_argument("--program", required=True)
    sp.add_argument("--facts", required=facts_required)
    sp.add_argument("--cap", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.add_argument("--metrics")
    sp.add_argument("--no-min", action="store_true")
    sp.add_argument("--no-exec-opt", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tgmat",
        description="Trigger-graph guided materialization and chase oracles")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("chase", help="run a chase variant")
    _add_common(sp)
    sp.add_argument("--variant", default="restricted",
                    choices=["restricted", "skolem", "equivalent"])

    sp = sub.add_parser("full-eg", help="instance-dependent full expansion")
    _add_common(sp)

    sp = sub.add_parser("tg-linear",
                        help="instance-independent TG for a linear program")
    _add_common(sp, facts_required=False)
    sp.add_argument("--graph-out")

    sp = sub.add_parser("tgmat", help="incremental Datalog materialization")
    _add_common(sp)
    sp.add_argument("--graph-out")

    sp = sub.add_parser("compare", help="run two modes and compare outputs")
    _add_common(sp)
    sp.add_argument("--mode-a", required=True,
                    choices=["chase", "full-eg", "tg-linear", "tgmat"])
    sp.add_argument("--mode-b", required=True,
                    choices=["chase", "full-eg", "tg-linear", "tgmat"])
    sp.add_argument("--variant", default="restricted",
                    choices=["restricted", "skolem", "equivalent"])

    sp = sub.add_parser("generate", help="write a reproducible KB corpus")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--family", required=True, choices=list(FAMILIES))
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--out-dir", required=True)
    return ap


def _cmd_compare(args) -> int:
    program, base = _load(args.program, args.facts)
    facts_a, metrics_a, _ = _run_mode(args.mode_a, program, base, args)
    facts_b, metrics_b, _ = _run_mode(args.mode_b, program, base, args)
    facts_a = strip_internal(facts_a, program)
    facts_b = strip_internal(facts_b, program)
    if facts_a == facts_b:
        verdict = "set-equal"
    elif equivalent(facts_a, facts_b):
        verdict = "hom-equivalent"
    else:
        verdict = "different"
    report = {
        "verdict": verdict,
        "mode_a": {"mode": args.mode_a, "facts": len(facts_a), **metrics_a},
        "mode_b": {"mode": args.mode_b, "facts": len(facts_b), **metrics_b},
    }
    ta = metrics_a.get("triggers", metrics_a.get("triggers_computed"))
    tb = metrics_b.get("triggers", metrics_b.get("triggers_computed"))
    if ta is not None and tb is not None:
        report["trigger_delta"] = ta - tb
    _emit_metrics(args.metrics, report)
    if args.metrics:
        print(verdict)
    return EXIT_OK


def _cmd_generate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, kb in enumerate(generate_corpus(args.seed, args.family, args.count)):
        (out / f"{args.family}-{args.seed}-{i:03d}.rules").write_text(kb.program_text)
        (out / f"{args.family}-{args.seed}-{i:03d}.facts").write_text(kb.facts_text)
    print(f"wrote {args.count} KBs to {out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "compare":
            return _cmd_compare(args)
        program, base = _load(args.program, args.facts)
        facts, metrics, graph_json = _run_mode(args.command, program, base, args)
        _emit_instance(args.out, facts, program)
        if args.metrics:
            _emit_metrics(args.metrics, metrics)
        if getattr(args, "graph_out", None) and graph_json:
            Path(args.graph_out).write_text(graph_json)
        return EXIT_OK
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ModeMismatch as e:
        print(f"mode mismatch: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except RoundCapExceeded as e:
        print(f"round cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
