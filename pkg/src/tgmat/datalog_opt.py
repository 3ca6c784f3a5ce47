"""Datalog-specific trigger-graph optimizations.

Three pieces work together:

* node rewritings: each graph node has an all-extensional conjunctive query
  whose answers on the base instance are exactly the node's facts, obtained
  by unfolding the node's rule through its ancestors;
* containment-based elimination (min_datalog): a node whose rewriting is
  contained in that of a node of equal or smaller depth with the same head
  predicate is redundant and gets removed, its children re-wired;
* the antijoin execution strategy (exec_node_under): before instantiating a
  node's body, restrict one covering atom of the rewriting to the tuples
  whose conclusions are not already known.

tg_mat combines them into the incremental materialization loop: expand the
graph one round, minimize, execute the surviving fresh nodes, stop when a
round derives nothing new.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .chase import Instance, RoundCapExceeded, check_base
from .egraph import ExecutionGraph, FactStore, NodeId, expand_full_eg
from .logic import (ConjunctiveQuery, TermMapping, answer_cq, apply_atom,
                    cq_contained, mgu, search_homomorphisms,
                    search_homomorphisms_counted)
from .model import (Atom, Program, Rule, Term, Var, normalize_program,
                    strip_internal, term_key)


# ---------------------------------------------------------------------------
# Node rewritings
# ---------------------------------------------------------------------------

@dataclass
class NodeRewriting:
    node: NodeId
    query: ConjunctiveQuery
    # node that produced each body atom's facts (None for extensional atoms
    # and for intensional atoms with no parent edge)
    assoc: tuple[Optional[NodeId], ...]


def _rename_rule(rule: Rule, step: int) -> Rule:
    # '.' cannot occur in parsed identifiers, so these names are always fresh
    m: TermMapping = {v: Var(f"{v.name}.{step}")
                      for a in list(rule.body) + [rule.head]
                      for v in a.args if isinstance(v, Var)}
    return Rule(rule.rid, tuple(apply_atom(m, a) for a in rule.body),
                apply_atom(m, rule.head))


def eg_rewriting(v: NodeId, g: ExecutionGraph, program: Program) -> NodeRewriting:
    """Unfold node v's rule through its ancestors until the body is
    all-extensional.  The head tuple tracks the rule's head arguments through
    the unifier chain, so answers line up with the node's derived facts."""
    rule = g.rule(v)
    head: list[Term] = list(rule.head.args)
    body: list[Atom] = [rule.head]
    assoc: list[Optional[NodeId]] = [v]
    step = 0
    while True:
        idx = next((i for i, a in enumerate(body)
                    if not program.is_extensional_pred(a.pred)), None)
        if idx is None:
            break
        alpha = body[idx]
        u = assoc[idx]
        if u is None:
            raise ValueError(
                f"node {v}: rewriting blocked, intensional atom {alpha} has "
                f"no parent edge")
        u_rule = g.rule(u)
        if u_rule.existentials:
            raise ValueError(
                f"node {v}: rewriting requires Datalog rules, {u_rule.rid} "
                f"has existentials")
        step += 1
        copy = _rename_rule(u_rule, step)
        theta = mgu([copy.head, alpha])
        if theta is None:
            raise ValueError(
                f"node {v}: constants clash while unfolding {alpha} "
                f"with {copy.head}")
        spliced = list(copy.body)
        spliced_assoc = [g.parents[u].get(j) for j in range(1, len(spliced) + 1)]
        body = body[:idx] + spliced + body[idx + 1:]
        assoc = assoc[:idx] + spliced_assoc + assoc[idx + 1:]
        body = [apply_atom(theta, a) for a in body]
        head = [theta.get(t, t) for t in head]
    return NodeRewriting(v, ConjunctiveQuery(tuple(head), tuple(body)),
                         tuple(assoc))


class _RewritingCache:
    """Rewritings keyed by the ancestor-cone signature, so re-wiring a node
    invalidates exactly the rewritings it affects."""

    def __init__(self, g: ExecutionGraph, program: Program):
        self.g = g
        self.program = program
        self._by_sig: dict[tuple, ConjunctiveQuery] = {}

    def query(self, v: NodeId) -> ConjunctiveQuery:
        sig = self.g.signature(v)
        q = self._by_sig.get(sig)
        if q is None:
            q = eg_rewriting(v, self.g, self.program).query
            self._by_sig[sig] = q
        return q


# ---------------------------------------------------------------------------
# Containment-based node elimination
# ---------------------------------------------------------------------------

def _min_datalog_inplace(g: ExecutionGraph, program: Program,
                         cache: Optional[_RewritingCache] = None) -> int:
    cache = cache or _RewritingCache(g, program)
    removed_total = 0
    while True:
        depths = g.depths()
        removed = False
        for v in sorted(g.nodes):
            for keeper in sorted(g.nodes):
                if v == keeper:
                    continue
                if depths[v] < depths[keeper]:
                    continue
                if g.rule(v).head.pred != g.rule(keeper).head.pred:
                    continue
                if not cq_contained(cache.query(v), cache.query(keeper)):
                    continue
                if (depths[v] == depths[keeper] and v < keeper
                        and cq_contained(cache.query(keeper), cache.query(v))):
                    continue  # mutual containment at equal depth: drop higher id
                g.remove_node_rewire(v, keeper)
                removed = True
                removed_total += 1
                break
            if removed:
                break
        if not removed:
            return removed_total


def min_datalog(g: ExecutionGraph, program: Program) -> ExecutionGraph:
    """Exhaustively remove nodes whose rewriting is contained in that of a
    same-head-predicate node of equal or smaller depth; children of removed
    nodes are re-parented under the keeper."""
    g = g.copy()
    _min_datalog_inplace(g, program)
    return g


# ---------------------------------------------------------------------------
# Node execution strategies
# ---------------------------------------------------------------------------

@dataclass
class NodeExecResult:
    new_facts: set[Atom]
    full_facts: frozenset[Atom]  # the node's complete factset (plain mode only)
    triggers: int
    tuples_examined: int
    cost_units: int
    selected: tuple[int, ...]  # rewriting body positions backing the antijoin


def _rel_size(atom_: Atom, target) -> int:
    return sum(1 for f in target if f.pred == atom_.pred)


def _node_targets(g: ExecutionGraph, v: NodeId, program: Program,
                  base: Instance, store: FactStore):
    targets = []
    for pos, batom in enumerate(g.rule(v).body, start=1):
        if program.is_extensional_pred(batom.pred):
            targets.append(base)
        else:
            parent = g.parents[v].get(pos)
            targets.append(store.of(parent) if parent is not None else frozenset())
    return targets


def plain_node_exec(v: NodeId, g: ExecutionGraph, program: Program,
                    base: Instance, current: Instance,
                    store: FactStore) -> NodeExecResult:
    """Unrestricted node execution followed by the membership check of every
    conclusion against `current`.  Cost model: each join is charged the scan
    of its smaller input; the final check is charged min(#conclusions,
    #current facts with the head predicate)."""
    rule = g.rule(v)
    targets = _node_targets(g, v, program, base, store)
    homs, partials = search_homomorphisms_counted(rule.body, targets)
    full = frozenset(apply_atom(h, rule.head) for h in homs)
    head_count = _rel_size(rule.head, current)
    cost = 0
    for i in range(1, len(rule.body)):
        cost += min(partials[i - 1], _rel_size(rule.body[i], targets[i]))
    cost += min(len(homs), head_count)
    return NodeExecResult(
        new_facts=set(full) - set(current), full_facts=full,
        triggers=len(homs), tuples_examined=len(homs), cost_units=cost,
        selected=())


def _choose_antijoin_atoms(rew: ConjunctiveQuery, base: Instance,
                           head_pred: str, current: Instance) -> tuple[int, ...]:
    head_vars = {t for t in rew.head if isinstance(t, Var)}
    covering = [i for i, a in enumerate(rew.body)
                if head_vars <= {t for t in a.args if isinstance(t, Var)}]
    if covering:
        # pick the atom whose tuples overlap the already-derived conclusions
        # the most: its antijoin prunes the most work
        best, best_overlap = covering[0], -1
        for i in covering:
            answers = answer_cq(ConjunctiveQuery(rew.head, (rew.body[i],)), base)
            overlap = sum(1 for t in answers if Atom(head_pred, t) in current)
            if overlap > best_overlap:
                best, best_overlap = i, overlap
        return (best,)
    for size in range(2, len(rew.body) + 1):
        for combo in itertools.combinations(range(len(rew.body)), size):
            vs = {t for i in combo for t in rew.body[i].args if isinstance(t, Var)}
            if head_vars <= vs:
                return combo
    return tuple(range(len(rew.body)))


def exec_node_under(v: NodeId, g: ExecutionGraph, program: Program,
                    base: Instance, current: Instance, store: FactStore,
                    rewriting: Optional[ConjunctiveQuery] = None) -> NodeExecResult:
    """Antijoin-restricted node execution.

    One covering atom (or a minimal covering subset) of the node's rewriting
    is evaluated on the base instance and antijoined against the conclusions
    already in `current`; only the surviving head tuples seed the body
    search.  Returns exactly the node's facts that are not in `current`.
    """
    rule = g.rule(v)
    rew = rewriting if rewriting is not None else eg_rewriting(v, g, program).query
    selected = _choose_antijoin_atoms(rew, base, rule.head.pred, current)
    q_sel = ConjunctiveQuery(rew.head, tuple(rew.body[i] for i in selected))

    sel_answers = answer_cq(q_sel, base)
    allowed = sorted((t for t in sel_answers if Atom(rule.head.pred, t) not in current),
                     key=lambda t: tuple(term_key(x) for x in t))

    head_count = _rel_size(rule.head, current)
    cost = 0
    if len(selected) == 1:
        cost += min(_rel_size(q_sel.body[0], base), head_count)
    else:
        # fallback: charge the joins that build the covering subset, then
        # the antijoin of its answers
        _, partials = search_homomorphisms_counted(
            q_sel.body, [base] * len(q_sel.body))
        for i in range(1, len(q_sel.body)):
            cost += min(partials[i - 1], _rel_size(q_sel.body[i], base))
        cost += min(len(sel_answers), head_count)

    # body search seeded by the surviving head tuples; when the selected
    # rewriting atom is one of the node's own body atoms (extensional-rule
    # nodes), its join is already paid for by the antijoin
    targets = _node_targets(g, v, program, base, store)
    aligned: Optional[int] = None
    if len(selected) == 1 and program.is_extensional_rule(rule):
        aligned = selected[0]
    order = list(range(len(rule.body)))
    if aligned is not None:
        order = [aligned] + [i for i in order if i != aligned]

    new_facts: set[Atom] = set()
    triggers = 0
    agg_partials = [0] * len(rule.body)
    for t in allowed:
        seed: TermMapping = {}
        ok = True
        for x, val in zip(rule.head.args, t):
            if isinstance(x, Var):
                if seed.get(x, val) != val:
                    ok = False
                    break
                seed[x] = val
            elif x != val:
                ok = False
                break
        if not ok:
            continue
        homs, partials = search_homomorphisms_counted(
            [rule.body[i] for i in order], [targets[i] for i in order], seed)
        triggers += len(homs)
        for d, c in enumerate(partials):
            agg_partials[d] += c
        if homs:
            new_facts.add(Atom(rule.head.pred, t))

    prev = len(allowed)
    for d, i in enumerate(order):
        if d == 0 and aligned is not None:
            prev = agg_partials[0]
            continue
        cost += min(prev, _rel_size(rule.body[i], targets[i]))
        prev = agg_partials[d]

    return NodeExecResult(
        new_facts=new_facts, full_facts=frozenset(),
        triggers=triggers, tuples_examined=triggers, cost_units=cost,
        selected=selected)


# ---------------------------------------------------------------------------
# The incremental materialization loop
# ---------------------------------------------------------------------------

@dataclass
class TgMatResult:
    final: Instance
    graph: ExecutionGraph
    metrics: dict
    per_round: list[dict] = field(default_factory=list)


def tg_mat(program: Program, base: Instance, *, use_min: bool = True,
           use_exec: bool = True, cap: int = 64) -> TgMatResult:
    """Trigger-graph guided Datalog materialization.

    Per round: grow the full execution graph, optionally minimize it, then
    execute this round's surviving nodes against the instance derived so far
    (nodes in id order, each seeing the facts its predecessors just added).
    Stops when a round derives nothing new; the result equals the chase.
    """
    norm = normalize_program(program)
    if not norm.is_datalog:
        raise ValueError("tg_mat requires a Datalog program")
    check_base(norm, base)

    g = ExecutionGraph()
    cache = _RewritingCache(g, norm)
    store = FactStore(base=frozenset(base))
    derived: set[Atom] = set()
    per_round: list[dict] = []
    triggers = tuples = cost = 0

    for k in range(1, cap + 1):
        before = set(g.nodes)
        expand_full_eg(g, norm, k)
        if use_min:
            _min_datalog_inplace(g, norm, cache)
        fresh = sorted(v for v in g.nodes if v not in before)

        round_triggers = round_tuples = round_cost = 0
        round_new: set[Atom] = set()
        for v in fresh:
            rew = cache.query(v)
            if use_exec:
                res = exec_node_under(v, g, norm, base, derived, store,
                                      rewriting=rew)
                store.node_facts[v] = frozenset(
                    Atom(g.rule(v).head.pred, t) for t in answer_cq(rew, base))
            else:
                res = plain_node_exec(v, g, norm, base, derived, store)
                store.node_facts[v] = res.full_facts
            round_triggers += res.triggers
            round_tuples += res.tuples_examined
            round_cost += res.cost_units
            round_new |= res.new_facts
            derived |= res.new_facts

        triggers += round_triggers
        tuples += round_tuples
        cost += round_cost
        per_round.append({"round": k, "nodes": len(fresh),
                          "triggers": round_triggers, "new_facts": len(round_new)})
        if not round_new:
            depths = g.depths()
            final = strip_internal(set(base) | derived, norm)
            metrics = {
                "rounds": k,
                "triggers": triggers,
                "tuples_examined": tuples,
                "cost_units": cost,
                "tg_nodes": len(g.nodes),
                "tg_edges": len(g.edges()),
                "tg_depth": max(depths.values(), default=-1) + 1,
                "facts_derived": len(final) - len(base),
            }
            return TgMatResult(final=final, graph=g, metrics=metrics,
                               per_round=per_round)

    raise RoundCapExceeded(
        f"tg_mat did not reach a fixpoint within {cap} rounds",
        set(base) | derived, cap)
