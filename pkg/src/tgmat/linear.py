"""Instance-independent trigger graphs for linear programs.

The construction chases one representative fact per pattern-isomorphism
class of each extensional predicate (two facts are pattern-isomorphic when
they share a predicate and their constants are related by a bijection) and
turns each recorded rule execution into a graph node.  Minimization removes
nodes whose factsets are covered, on every representative, by another
node's factset through a homomorphism that fixes the nulls shared with
ancestor factsets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chase import ChaseConfig, RoundCapExceeded, chase
from .egraph import ExecutionGraph, FactStore, NodeId, materialize
from .logic import TermMapping, find_homomorphisms
from .model import Atom, Const, Program, instance_nulls, sort_facts


@dataclass
class RepresentativeSet:
    per_pred: dict[str, list[Atom]]

    def all_facts(self) -> list[Atom]:
        out = []
        for pred in sorted(self.per_pred):
            out.extend(self.per_pred[pred])
        return out


def _partitions(n: int) -> list[list[int]]:
    """Set partitions of n positions as block-index vectors, finest first."""
    if n == 0:
        return [[]]
    vectors: list[list[int]] = []

    def grow(prefix: list[int]):
        if len(prefix) == n:
            vectors.append(list(prefix))
            return
        for b in range(max(prefix) + 2 if prefix else 1):
            prefix.append(b)
            grow(prefix)
            prefix.pop()

    grow([])
    vectors.sort(reverse=True)
    return vectors


def representative_facts(program: Program) -> RepresentativeSet:
    """One representative fact per argument-position partition of each
    extensional predicate; fresh constants c1, c2, ... minted globally."""
    taken = {t.name for r in program.rules
             for a in list(r.body) + [r.head]
             for t in a.args if isinstance(t, Const)}
    counter = [0]

    def fresh() -> Const:
        while True:
            counter[0] += 1
            name = f"c{counter[0]}"
            if name not in taken:
                return Const(name)

    per_pred: dict[str, list[Atom]] = {}
    for pred in sorted(program.extensional):
        n = program.arity[pred]
        facts = []
        for vec in _partitions(n):
            block_const: dict[int, Const] = {}
            args = []
            for b in vec:
                if b not in block_const:
                    block_const[b] = fresh()
                args.append(block_const[b])
            facts.append(Atom(pred, tuple(args)))
        per_pred[pred] = facts
    return RepresentativeSet(per_pred)


def tgraph_linear(program: Program, *, chase_variant: str = "equivalent",
                  round_cap: int = 64) -> ExecutionGraph:
    """Build an instance-independent TG for a linear program by chasing each
    representative fact and recording one node per rule execution."""
    if not program.is_linear:
        raise ValueError("tgraph_linear requires a linear program "
                         "(single-atom bodies)")
    g = ExecutionGraph()
    for f in representative_facts(program).all_facts():
        try:
            result = chase(program, {f},
                           ChaseConfig(variant=chase_variant,
                                       round_cap=round_cap, record_graph=True))
        except RoundCapExceeded as e:
            raise RoundCapExceeded(
                f"chase of representative {f} hit the round cap; the program "
                f"may not have finite expansions", e.partial, e.rounds) from e
        edges = result.graph.edges
        node_of: list[NodeId] = []
        for (_, rid, _) in edges:
            node_of.append(g.add_node(program.rule_by_id(rid)))
        for i, (_, _, produced) in enumerate(edges):
            for j, (consumed, _, _) in enumerate(edges):
                if consumed == produced:
                    g.add_edge(node_of[i], 1, node_of[j])
    return g


def preserving_hom_exists(u: NodeId, v: NodeId, g: ExecutionGraph,
                          store: FactStore) -> bool:
    """A homomorphism from u's facts into v's facts that maps to itself every
    null also occurring in an ancestor-of-u factset."""
    source = store.of(u)
    protected = instance_nulls(source) & {
        n for w in g.ancestors(u) for n in instance_nulls(store.of(w))}
    fixed: TermMapping = {n: n for n in protected}
    return next(find_homomorphisms(sort_facts(source), store.of(v), fixed),
                None) is not None


def dominated(u: NodeId, v: NodeId, g: ExecutionGraph,
              reps: RepresentativeSet, program: Program) -> bool:
    """u is dominated by v: a preserving homomorphism from u's facts into
    v's facts exists on every representative singleton instance."""
    return all(
        preserving_hom_exists(u, v, g, materialize(g, {f}, program))
        for f in reps.all_facts())


def min_linear(g: ExecutionGraph, program: Program) -> ExecutionGraph:
    """Exhaustively remove dominated nodes, re-parenting their children under
    the dominating node.  Mutually dominating pairs keep the lower id; pairs
    whose re-wiring would create a cycle are skipped."""
    reps = representative_facts(program)
    g = g.copy()
    while True:
        stores = {f: materialize(g, {f}, program) for f in reps.all_facts()}

        def dom(a: NodeId, b: NodeId) -> bool:
            return all(preserving_hom_exists(a, b, g, stores[f])
                       for f in reps.all_facts())

        removed = False
        for v in sorted(g.nodes):
            for keeper in sorted(g.nodes):
                if v == keeper or not dom(v, keeper):
                    continue
                if dom(keeper, v) and v < keeper:
                    continue  # mutual domination: drop the higher id instead
                if any(keeper in g.reachable_from(w)
                       for _, w in g.children(v)):
                    continue  # re-wiring would create a cycle
                g.remove_node_rewire(v, keeper)
                removed = True
                break
            if removed:
                break
        if not removed:
            return g
