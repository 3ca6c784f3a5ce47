"""Independent brute-force oracles the test suite checks the engines against.

Everything here enumerates exhaustively and stays deliberately stupid: no
indexing, no pruning beyond feasibility, no shared code with the engines
under test.
"""

from __future__ import annotations

import itertools
import random

from tgmat.model import Atom, Const, Null, Program, Rule, Term, Var


def brute_homomorphisms(source: list[Atom], target: set[Atom],
                        fixed: dict | None = None) -> list[dict]:
    """Every total assignment of source terms that lands inside target."""
    source_terms = []
    for a in source:
        for t in a.args:
            if t not in source_terms:
                source_terms.append(t)
    target_terms = sorted({t for f in target for t in f.args}, key=str)
    results = []
    for images in itertools.product(target_terms, repeat=len(source_terms)):
        m = dict(zip(source_terms, images))
        if fixed is not None:
            if any(m.get(k, v) != v for k, v in fixed.items()):
                continue
        ok = True
        for t, img in m.items():
            if isinstance(t, Const) and img != t:
                ok = False
                break
        if not ok:
            continue
        for a in source:
            img = Atom(a.pred, tuple(m[t] for t in a.args))
            if img not in target:
                ok = False
                break
        if ok:
            results.append(m)
    return results


def random_instance(rng: random.Random, preds: list[tuple[str, int]],
                    max_facts: int, consts: list[str],
                    with_nulls: bool = False) -> set[Atom]:
    terms: list[Term] = [Const(c) for c in consts]
    if with_nulls:
        terms += [Null(900 + i) for i in range(3)]
    out = set()
    for _ in range(rng.randint(0, max_facts)):
        pred, arity = rng.choice(preds)
        out.add(Atom(pred, tuple(rng.choice(terms) for _ in range(arity))))
    return out


def rule_holds(rule: Rule, instance: set[Atom]) -> bool:
    """First-order satisfaction: every body match extends to a head match."""
    for h in brute_homomorphisms(list(rule.body), instance):
        binding = {v: h[v] for v in rule.frontier}
        choices = sorted({t for f in instance for t in f.args}, key=str)
        exts = [dict(zip(sorted(rule.existentials, key=str), combo))
                for combo in itertools.product(choices, repeat=len(rule.existentials))]
        satisfied = False
        for ext in exts or [{}]:
            m = {**binding, **ext}
            head = Atom(rule.head.pred, tuple(m.get(t, t) for t in rule.head.args))
            if head in instance:
                satisfied = True
                break
        if not satisfied:
            return False
    return True


def all_models(program: Program, base: set[Atom], domain: list[Term],
               preds: list[tuple[str, int]]) -> list[set[Atom]]:
    """Every model of the program over the given fact universe (tiny inputs!)."""
    universe = [Atom(p, args) for p, n in preds
                for args in itertools.product(domain, repeat=n)]
    optional = [f for f in universe if f not in base]
    models = []
    for bits in itertools.product([False, True], repeat=len(optional)):
        inst = set(base) | {f for f, b in zip(optional, bits) if b}
        if all(rule_holds(r, inst) for r in program.rules):
            models.append(inst)
    return models


def minimum_tg_size(program: Program, bases: list[set[Atom]],
                    expected: list[set[Atom]], upper: int) -> int:
    """Smallest node count over all completely-wired acyclic execution
    graphs whose materialization equals `expected` on every base in `bases`.

    Enumerates every rule multiset up to `upper` nodes and every acyclic
    parent assignment (each intensional body position wired to a node with
    the matching head predicate).  Exponential; callers keep inputs tiny.
    """
    from tgmat.egraph import ExecutionGraph, materialize

    rules = program.rules
    needed_preds = {f.pred for inst in expected for f in inst
                    if f.pred in program.intensional}

    for size in range(0, upper + 1):
        for labeling in itertools.combinations_with_replacement(rules, size):
            if not needed_preds <= {r.head.pred for r in labeling}:
                continue
            slots = []  # (node index, position, candidate parents)
            feasible = True
            for i, rule in enumerate(labeling):
                for pos, batom in enumerate(rule.body, start=1):
                    if program.is_extensional_pred(batom.pred):
                        continue
                    cands = [j for j, r2 in enumerate(labeling)
                             if r2.head.pred == batom.pred]
                    if not cands:
                        feasible = False
                        break
                    slots.append((i, pos, cands))
                if not feasible:
                    break
            if not feasible:
                continue
            for wiring in itertools.product(*(c for (_, _, c) in slots)):
                g = ExecutionGraph()
                ids = [g.add_node(r) for r in labeling]
                for (i, pos, _), j in zip(slots, wiring):
                    g.parents[ids[i]][pos] = ids[j]
                if not g.is_acyclic():
                    continue
                if all(materialize(g, b, program).union() == want
                       for b, want in zip(bases, expected)):
                    return size
    raise AssertionError(f"no TG of size <= {upper} found")


def chain_datalog_program(rng: random.Random):
    """Tiny Datalog programs whose rule heads never repeat variables and
    whose joins are variable chains.  On this shape, containment between
    node rewritings of different depths is never strict in the
    shallow-inside-deep direction, so depth-guarded minimization reaches
    the true minimum and the brute-force oracle can certify it.
    """
    from tgmat.model import parse_program

    ext = [("e1", 2)] + ([("e2", rng.choice([1, 2]))] if rng.random() < 0.5 else [])
    idb = [(f"P{i}", rng.choice([1, 2])) for i in range(1, rng.randint(3, 4))]
    lines = []
    for pred, arity in idb:
        src, s_ar = rng.choice([e for e in ext if e[1] >= arity])
        body_vars = ["X", "Y"][:s_ar]
        head_vars = rng.sample(body_vars, k=arity)
        lines.append(
            f"{src}({', '.join(body_vars)}) -> {pred}({', '.join(head_vars)})")
    chain_vars = ["U", "V", "W", "S", "T4"]
    for _ in range(rng.randint(1, 2)):
        n_body = rng.randint(1, 2)
        body, nxt = [], 0
        for _ in range(n_body):
            pred, arity = rng.choice(idb)
            args = chain_vars[nxt:nxt + arity]
            body.append(f"{pred}({', '.join(args)})")
            nxt += arity - 1 if arity > 1 else 0
        used = list(dict.fromkeys(
            a for part in body for a in
            part[part.index("(") + 1:-1].split(", ")))
        hp, h_ar = rng.choice([p for p in idb if p[1] <= len(used)])
        head_vars = used[:h_ar]
        lines.append(f"{', '.join(body)} -> {hp}({', '.join(head_vars)})")
    return parse_program("\n".join(lines))
