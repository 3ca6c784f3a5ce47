"""Execution graphs: the rule-execution blueprints and their materialization.

An execution graph (EG) is an acyclic digraph whose nodes are labeled with
rules and whose edges u ->_j v feed the facts derived at u into the j-th
body atom of v's rule.  Reasoning over an EG processes nodes in topological
order; a node's facts are computed from the base instance (extensional body
atoms) and from its parents' factsets only (intensional body atoms).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .chase import ChaseConfig, Instance, RoundCapExceeded, chase
from .logic import apply_atom, entails, equivalent, search_homomorphisms
from .model import (Atom, NullCounter, Program, Rule, normalize_program,
                    strip_internal)

NodeId = int


@dataclass
class EGNode:
    nid: NodeId
    rule: Rule
    level: Optional[int] = None  # creation round of the full-EG expansion


class ExecutionGraph:
    def __init__(self):
        self.nodes: dict[NodeId, EGNode] = {}
        self.parents: dict[NodeId, dict[int, NodeId]] = {}
        self._next_id = 0

    def add_node(self, rule: Rule, level: Optional[int] = None) -> NodeId:
        nid = self._next_id
        self._next_id += 1
        self.nodes[nid] = EGNode(nid, rule, level)
        self.parents[nid] = {}
        return nid

    def add_edge(self, u: NodeId, pos: int, v: NodeId):
        if pos in self.parents[v]:
            raise ValueError(f"node {v} already has a parent for position {pos}")
        self.parents[v][pos] = u

    def rule(self, v: NodeId) -> Rule:
        return self.nodes[v].rule

    def edges(self) -> list[tuple[NodeId, int, NodeId]]:
        out = []
        for v in sorted(self.parents):
            for pos in sorted(self.parents[v]):
                out.append((self.parents[v][pos], pos, v))
        return out

    def children(self, u: NodeId) -> list[tuple[int, NodeId]]:
        out = []
        for v in sorted(self.parents):
            for pos, p in sorted(self.parents[v].items()):
                if p == u:
                    out.append((pos, v))
        return out

    def depths(self) -> dict[NodeId, int]:
        """Longest-path depth per node; raises on cycles."""
        memo: dict[NodeId, int] = {}
        visiting: set[NodeId] = set()

        def depth(v: NodeId) -> int:
            if v in memo:
                return memo[v]
            if v in visiting:
                raise ValueError("execution graph contains a cycle")
            visiting.add(v)
            ps = [p for p in self.parents.get(v, {}).values() if p in self.nodes]
            memo[v] = 1 + max((depth(p) for p in ps), default=-1)
            visiting.discard(v)
            return memo[v]

        for v in self.nodes:
            depth(v)
        return memo

    def is_acyclic(self) -> bool:
        try:
            self.depths()
            return True
        except ValueError:
            return False

    def topo_order(self) -> list[NodeId]:
        d = self.depths()
        return sorted(self.nodes, key=lambda v: (d[v], v))

    def ancestors(self, v: NodeId) -> set[NodeId]:
        seen: set[NodeId] = set()
        stack = [p for p in self.parents.get(v, {}).values() if p in self.nodes]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(p for p in self.parents.get(u, {}).values() if p in self.nodes)
        return seen

    def reachable_from(self, v: NodeId) -> set[NodeId]:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for _, w in self.children(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def remove_node_rewire(self, v: NodeId, keeper: NodeId):
        """Drop v and hand each outgoing edge v ->_j w to the keeper."""
        for pos, w in self.children(v):
            self.parents[w][pos] = keeper
        del self.nodes[v]
        del self.parents[v]

    def copy(self) -> "ExecutionGraph":
        g = ExecutionGraph()
        g._next_id = self._next_id
        g.nodes = {v: EGNode(n.nid, n.rule, n.level) for v, n in self.nodes.items()}
        g.parents = {v: dict(ps) for v, ps in self.parents.items()}
        return g

    def signature(self, v: NodeId) -> tuple:
        """Hashable summary of v's ancestor cone (rule ids and wiring)."""
        return (self.rule(v).rid,
                tuple((pos, self.signature(p))
                      for pos, p in sorted(self.parents[v].items())
                      if p in self.nodes))

    def to_json(self) -> str:
        doc = {
            "nodes": [{"id": v, "rule": self.nodes[v].rule.rid}
                      for v in sorted(self.nodes)],
            "edges": [{"from": u, "pos": pos, "to": v}
                      for (u, pos, v) in self.edges()],
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str, program: Program) -> "ExecutionGraph":
        doc = json.loads(text)
        g = cls()
        remap: dict[int, NodeId] = {}
        for node in doc["nodes"]:
            remap[node["id"]] = g.add_node(program.rule_by_id(node["rule"]))
        for e in doc["edges"]:
            g.add_edge(remap[e["from"]], e["pos"], remap[e["to"]])
        return g


@dataclass
class FactStore:
    """Per-node factsets of one materialization, plus the base instance."""
    base: frozenset[Atom]
    node_facts: dict[NodeId, frozenset[Atom]] = field(default_factory=dict)

    def union(self) -> set[Atom]:
        out = set(self.base)
        for facts in self.node_facts.values():
            out |= facts
        return out

    def of(self, v: NodeId) -> frozenset[Atom]:
        return self.node_facts.get(v, frozenset())


@dataclass
class EGReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_eg(g: ExecutionGraph, program: Program) -> EGReport:
    """Check the structural invariants; missing parents are warnings only."""
    report = EGReport()
    if not g.is_acyclic():
        report.violations.append("graph is cyclic")
    for v, node in g.nodes.items():
        try:
            program.rule_by_id(node.rule.rid)
        except KeyError:
            report.violations.append(f"node {v}: rule {node.rule.rid} not in program")
    for (u, pos, v) in g.edges():
        rule = g.rule(v)
        if not 1 <= pos <= len(rule.body):
            report.violations.append(
                f"edge {u}->_{pos} {v}: position out of range for {rule.rid}")
            continue
        batom = rule.body[pos - 1]
        if program.is_extensional_pred(batom.pred):
            report.violations.append(
                f"edge {u}->_{pos} {v}: body atom {pos} of {rule.rid} is extensional")
        elif g.rule(u).head.pred != batom.pred:
            report.violations.append(
                f"edge {u}->_{pos} {v}: head of {g.rule(u).rid} does not feed "
                f"body atom {pos} of {rule.rid}")
    for v, node in g.nodes.items():
        if program.is_extensional_rule(node.rule):
            if g.parents[v]:
                report.violations.append(f"extensional-rule node {v} has parents")
            continue
        for pos, batom in enumerate(node.rule.body, start=1):
            if not program.is_extensional_pred(batom.pred) and pos not in g.parents[v]:
                report.warnings.append(
                    f"node {v}: no parent for body position {pos}; factset will be empty")
    return report


def _node_targets(g: ExecutionGraph, v: NodeId, program: Program,
                  base: Instance, store: FactStore) -> list[Iterable[Atom]]:
    targets: list[Iterable[Atom]] = []
    for pos, batom in enumerate(g.rule(v).body, start=1):
        if program.is_extensional_pred(batom.pred):
            targets.append(base)
        else:
            parent = g.parents[v].get(pos)
            targets.append(store.of(parent) if parent is not None else frozenset())
    return targets


def node_facts(g: ExecutionGraph, v: NodeId, program: Program, base: Instance,
               store: FactStore, counter: NullCounter) -> frozenset[Atom]:
    """Facts derived at one node from the base and its parents' factsets."""
    rule = g.rule(v)
    targets = _node_targets(g, v, program, base, store)
    out: set[Atom] = set()
    for h in search_homomorphisms(rule.body, targets):
        ext = dict(h)
        for z in sorted(rule.existentials, key=lambda t: t.name):
            ext[z] = counter.fresh()
        out.add(apply_atom(ext, rule.head))
    return frozenset(out)


def materialize(g: ExecutionGraph, base: Instance, program: Program) -> FactStore:
    """Reason over the graph: nodes in depth-ascending order, each node's
    facts computed from its parents only.  Fresh nulls per trigger."""
    counter = NullCounter()
    store = FactStore(base=frozenset(base))
    for v in g.topo_order():
        store.node_facts[v] = node_facts(g, v, program, base, store, counter)
    return store


def is_tg_for(g: ExecutionGraph, program: Program, base: Instance,
              cfg: Optional[ChaseConfig] = None) -> bool:
    """Sampled trigger-graph check: the guided materialization and the chase
    agree on this base instance (hom-equivalence, i.e. agreement on all
    BCQs).  Instance-independent status is only ever sampled, not proven."""
    cfg = cfg or ChaseConfig(variant="equivalent")
    result = chase(program, base, cfg)
    return equivalent(materialize(g, base, program).union(), result.final)


# ---------------------------------------------------------------------------
# Instance-dependent full expansion
# ---------------------------------------------------------------------------

def _require_homogeneous(program: Program):
    for r in program.rules:
        kinds = {program.is_extensional_pred(a.pred) for a in r.body}
        if len(kinds) == 2:
            raise ValueError(
                f"rule {r.rid} mixes extensional and intensional body atoms; "
                "normalize the program first")


def expand_full_eg(g: ExecutionGraph, program: Program, k: int) -> ExecutionGraph:
    """Grow the full execution graph by one round (in place).

    Round 1 adds one node per extensional rule.  Round k >= 2 adds, for every
    intensional rule and every combination of existing nodes that feeds its
    body positionwise, has creation rounds < k and includes at least one
    round-(k-1) node, a fresh node wired to that combination.  Combinations
    whose (rule, parent vector) already exists are skipped, so the expansion
    is idempotent per round.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_homogeneous(program)
    if k == 1:
        existing = {(g.rule(v).rid,) for v in g.nodes if not g.parents[v]}
        for rule in program.rules:
            if program.is_extensional_rule(rule) and (rule.rid,) not in existing:
                g.add_node(rule, level=1)
        return g

    by_head: dict[str, list[NodeId]] = {}
    levels: dict[NodeId, int] = {}
    for v in sorted(g.nodes):
        node = g.nodes[v]
        levels[v] = node.level if node.level is not None else 1
        by_head.setdefault(node.rule.head.pred, []).append(v)

    existing_sigs = {
        (g.rule(v).rid, tuple(g.parents[v][p] for p in sorted(g.parents[v])))
        for v in g.nodes
    }

    new_nodes: list[tuple[Rule, tuple[NodeId, ...]]] = []
    for rule in program.rules:
        if program.is_extensional_rule(rule):
            continue
        pools = []
        for batom in rule.body:
            pools.append([u for u in by_head.get(batom.pred, []) if levels[u] < k])
        if any(not pool for pool in pools):
            continue
        combos = [()]
        for pool in pools:
            combos = [c + (u,) for c in combos for u in pool]
        for combo in combos:
            if max(levels[u] for u in combo) != k - 1:
                continue
            if (rule.rid, combo) in existing_sigs:
                continue
            new_nodes.append((rule, combo))

    for rule, combo in new_nodes:
        v = g.add_node(rule, level=k)
        for pos, u in enumerate(combo, start=1):
            g.add_edge(u, pos, v)
    return g


@dataclass
class ExpansionResult:
    graph: ExecutionGraph
    store: FactStore
    rounds: int
    snapshots: list[frozenset[Atom]]  # union instance after each round
    program: Program  # the (possibly normalized) program the graph is over


def expand_until_fixpoint(program: Program, base: Instance,
                          cap: int = 64) -> ExpansionResult:
    """Iterate expansion + materialization until the union instance stops
    growing: set-equality for Datalog, logical entailment otherwise.

    Mixed-body rules are normalized away first; internal alias facts are
    stripped from the union snapshots (note the alias indirection shifts
    those rules' derivations one round later than in the original program).
    """
    program = normalize_program(program)
    datalog = program.is_datalog
    g = ExecutionGraph()
    counter = NullCounter()
    store = FactStore(base=frozenset(base))
    prev_union = set(base)
    snapshots: list[frozenset[Atom]] = []
    for k in range(1, cap + 1):
        before = set(g.nodes)
        expand_full_eg(g, program, k)
        fresh = [v for v in g.topo_order() if v not in before]
        for v in fresh:
            store.node_facts[v] = node_facts(g, v, program, base, store, counter)
        union = strip_internal(store.union(), program)
        snapshots.append(frozenset(union))
        done = union == prev_union if datalog else entails(prev_union, union)
        if done:
            return ExpansionResult(g, store, k, snapshots, program)
        prev_union = union
    raise RoundCapExceeded(
        f"full-EG expansion did not reach a fixpoint within {cap} rounds",
        store.union(), cap)
