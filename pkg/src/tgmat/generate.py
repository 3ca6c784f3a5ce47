"""Reproducible random knowledge bases for the property suites.

Three families:

* ``datalog``        - homogeneous-body Datalog programs with small,
                       quickly-saturating instances;
* ``linear-fes``     - linear programs, existentials allowed, with an
                       acyclic predicate graph on the existential rules so
                       every chase terminates (checked during generation);
* ``cyclic-datalog`` - Datalog programs built around an argument-flipping
                       rule cycle, the shape that defeats semi-naive
                       evaluation's redundancy blocking.

Programs are generated as rule text and parsed, so everything the generator
emits round-trips through the file formats.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .chase import ChaseConfig, RoundCapExceeded, chase
from .model import Atom, Program, parse_facts, parse_program

FAMILIES = ("datalog", "linear-fes", "cyclic-datalog")

_VARS = ["X", "Y", "Z", "W"]


@dataclass
class GeneratedKB:
    program: Program
    base: set[Atom]
    program_text: str
    facts_text: str


def _random_instance(rng: random.Random, ext_preds: list[tuple[str, int]],
                     n_facts: int, n_consts: int) -> list[str]:
    lines = []
    for _ in range(n_facts):
        pred, arity = rng.choice(ext_preds)
        args = [f"c{rng.randint(1, n_consts)}" for _ in range(arity)]
        lines.append("\t".join([pred] + args))
    return sorted(set(lines))


def _head_args(rng: random.Random, body_vars: list[str], arity: int,
               extra: list[str] | None = None) -> list[str]:
    pool = body_vars + (extra or [])
    return [rng.choice(pool) for _ in range(arity)]


def _gen_datalog_text(rng: random.Random) -> tuple[str, str]:
    ext = [(f"e{i}", rng.randint(1, 3)) for i in range(1, rng.randint(2, 3) + 1)]
    idb = [(f"P{i}", rng.randint(1, 3)) for i in range(1, rng.randint(2, 3) + 1)]
    rules = []
    used_ext = []
    # every intensional predicate gets at least one extensional feeder
    for pred, arity in idb:
        src, s_ar = rng.choice(ext)
        if (src, s_ar) not in used_ext:
            used_ext.append((src, s_ar))
        body_vars = _VARS[:s_ar]
        args = ", ".join(body_vars)
        head = ", ".join(_head_args(rng, body_vars, arity))
        rules.append(f"{src}({args}) -> {pred}({head})")
    for _ in range(rng.randint(1, 3)):
        n_body = rng.randint(1, 2)
        body = []
        seen_vars: list[str] = []
        for _ in range(n_body):
            pred, arity = rng.choice(idb)
            args = []
            for _ in range(arity):
                if seen_vars and rng.random() < 0.6:
                    args.append(rng.choice(seen_vars))
                else:
                    v = _VARS[len(set(seen_vars)) % len(_VARS)]
                    args.append(v)
                if args[-1] not in seen_vars:
                    seen_vars.append(args[-1])
            body.append(f"{pred}({', '.join(args)})")
        hp, h_ar = rng.choice(idb)
        head = ", ".join(_head_args(rng, seen_vars, h_ar))
        rules.append(f"{', '.join(body)} -> {hp}({head})")
    facts = _random_instance(rng, used_ext, rng.randint(2, 6), 4)
    return "\n".join(rules) + "\n", "\n".join(facts) + "\n"


def _gen_linear_fes_text(rng: random.Random) -> tuple[str, str]:
    ext = [(f"e{i}", rng.randint(1, 3)) for i in range(1, rng.randint(1, 2) + 1)]
    idb = [(f"P{i}", rng.randint(1, 3)) for i in range(1, rng.randint(2, 4) + 1)]
    # Two predicate strata.  Datalog rules never descend, existential rules
    # strictly climb, so every rule cycle is existential-free and the chase
    # terminates on any base instance.
    rank = {pred: rng.randint(1, 2) for pred, _ in idb}
    rules = []
    used_ext = []
    for pred, arity in idb:
        src, s_ar = rng.choice(ext)
        if (src, s_ar) not in used_ext:
            used_ext.append((src, s_ar))
        body_vars = _VARS[:s_ar]
        head = ", ".join(_head_args(rng, body_vars, arity))
        rules.append(f"{src}({', '.join(body_vars)}) -> {pred}({head})")
    for _ in range(rng.randint(1, 4)):
        src, s_ar = rng.choice(idb)
        body_vars = _VARS[:s_ar]
        upward = [(p, a) for p, a in idb if rank[p] > rank[src]]
        level = [(p, a) for p, a in idb if rank[p] >= rank[src]]
        if upward and rng.random() < 0.4:
            dst, d_ar = rng.choice(upward)
            head = _head_args(rng, body_vars, d_ar, extra=["V"])
            if "V" not in head:
                head[rng.randrange(d_ar)] = "V"
        elif level:
            dst, d_ar = rng.choice(level)
            head = _head_args(rng, body_vars, d_ar)
        else:
            continue
        rules.append(f"{src}({', '.join(body_vars)}) -> {dst}({', '.join(head)})")
    facts = _random_instance(rng, used_ext, rng.randint(1, 4), 3)
    return "\n".join(rules) + "\n", "\n".join(facts) + "\n"


def _gen_cyclic_datalog_text(rng: random.Random) -> tuple[str, str]:
    rules = [
        "e0(X, Y) -> R0(X, Y)",
        "R0(X, Y) -> T0(Y, X)",
        "T0(X, Y) -> R0(Y, X)",
    ]
    ext = [("e0", 2)]
    for i in range(1, rng.randint(1, 2) + 1):
        arity = rng.randint(1, 2)
        ext.append((f"e{i}", arity))
        body_vars = _VARS[:arity]
        head = ", ".join(_head_args(rng, body_vars, 2))
        rules.append(f"e{i}({', '.join(body_vars)}) -> R0({head})")
    facts = _random_instance(rng, ext, rng.randint(2, 5), 3)
    return "\n".join(rules) + "\n", "\n".join(facts) + "\n"


def generate_kb(rng: random.Random, family: str) -> GeneratedKB:
    """One KB of the family; regenerates until the family's health checks
    pass (chase terminates, saturation stays desk-sized)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; pick one of {FAMILIES}")
    while True:
        if family == "datalog":
            prog_text, facts_text = _gen_datalog_text(rng)
        elif family == "linear-fes":
            prog_text, facts_text = _gen_linear_fes_text(rng)
        else:
            prog_text, facts_text = _gen_cyclic_datalog_text(rng)
        program = parse_program(prog_text)
        base = parse_facts(facts_text, program)
        try:
            result = chase(program, base,
                           ChaseConfig(variant="equivalent", round_cap=24))
            if family == "linear-fes":
                # the linear TG construction chases representative
                # singletons, so those must terminate too
                from .linear import representative_facts
                for f in representative_facts(program).all_facts():
                    chase(program, {f},
                          ChaseConfig(variant="equivalent", round_cap=24))
        except RoundCapExceeded:
            continue
        # keep derivation depth small so full-EG expansion stays desk-sized
        if result.rounds > 4 or len(result.final) > 60:
            continue
        return GeneratedKB(program, base, prog_text, facts_text)


def generate_corpus(seed: int, family: str, count: int) -> list[GeneratedKB]:
    rng = random.Random(seed)
    return [generate_kb(rng, family) for _ in range(count)]
