"""Reference chase implementations: restricted, Skolem, and equivalent.

The chase runs in breadth-first rounds with the semi-naive restriction:
in round k every trigger must use at least one fact first derived in round
k-1 (round 0 holds the base instance).  Triggers are enumerated against the
instance as of the end of the previous round, rules in program order and
homomorphisms in canonical order, which makes null ordinals reproducible.

Variant criteria:

* restricted  - a derived fact is added only if it does not already map
  homomorphically into the current instance (including facts added earlier
  in the same round); stops when a round applies nothing.
* skolem      - nulls are keyed by (rule, frontier binding), so re-derived
  facts collapse syntactically; stops when a round adds nothing.
* equivalent  - every trigger is applied; stops at the first round whose
  output is logically equivalent to the previous round's instance, and the
  previous round's instance is the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .logic import TermMapping, apply_atom, entails, find_homomorphisms
from .model import (Atom, NullCounter, Program, Rule, Term, Var, is_ground,
                    sort_facts)

Instance = set[Atom]


@dataclass
class ChaseConfig:
    variant: str = "restricted"  # restricted | skolem | equivalent
    round_cap: int = 64
    record_graph: bool = False

    def __post_init__(self):
        if self.variant not in ("restricted", "skolem", "equivalent"):
            raise ValueError(f"unknown chase variant {self.variant!r}")
        if self.round_cap < 1:
            raise ValueError("round_cap must be >= 1")


class RoundCapExceeded(RuntimeError):
    """Non-termination diagnostic carrying the partial instance."""

    def __init__(self, message: str, partial: Instance, rounds: int):
        super().__init__(message)
        self.partial = partial
        self.rounds = rounds


@dataclass(frozen=True)
class TriggerRecord:
    rule_id: str
    homomorphism: tuple[tuple[Term, Term], ...]
    extension: tuple[tuple[Term, Term], ...]
    fact: Atom
    round: int
    applied: bool


@dataclass
class ChaseGraph:
    """Provenance DAG: an edge (f1, r, f2) means f2 was first derived from f1
    (and possibly other body facts) by rule r."""
    nodes: set[Atom] = field(default_factory=set)
    edges: list[tuple[Atom, str, Atom]] = field(default_factory=list)

    def out_edges(self, fact: Atom) -> list[tuple[Atom, str, Atom]]:
        return [e for e in self.edges if e[0] == fact]


@dataclass
class ChaseResult:
    final: Instance
    rounds: int
    triggers_computed: int
    triggers_applied: int
    per_round: list[dict]
    variant: str
    base_size: int
    graph: Optional[ChaseGraph] = None
    steps: list[frozenset[Atom]] = field(default_factory=list)
    records: list[TriggerRecord] = field(default_factory=list)

    def metrics(self) -> dict:
        return {
            "variant": self.variant,
            "rounds": self.rounds,
            "triggers_computed": self.triggers_computed,
            "triggers_applied": self.triggers_applied,
            "facts_base": self.base_size,
            "facts_derived": len(self.final) - self.base_size,
        }


def trigger_count(result: ChaseResult) -> dict:
    return {
        "computed": result.triggers_computed,
        "applied": result.triggers_applied,
        "per_round": list(result.per_round),
    }


def check_base(program: Program, base: Instance):
    for f in base:
        if not is_ground(f):
            raise ValueError(f"base fact {f} is not ground")
        if f.pred in program.intensional:
            raise ValueError(f"base fact {f} uses intensional predicate")


def _skolem_null(cache: dict, counter: NullCounter, rule: Rule,
                 h: TermMapping, z: Var):
    frontier = tuple(sorted(((v.name, h[v]) for v in rule.frontier)))
    key = (rule.rid, z.name, frontier)
    if key not in cache:
        cache[key] = counter.fresh()
    return cache[key]


def chase(program: Program, base: Instance, cfg: Optional[ChaseConfig] = None,
          *, use_sne: bool = True) -> ChaseResult:
    """Run the configured chase variant to termination (or the round cap)."""
    cfg = cfg or ChaseConfig()
    check_base(program, base)

    counter = NullCounter()
    skolem_cache: dict = {}
    fact_round: dict[Atom, int] = {f: 0 for f in base}
    records: list[TriggerRecord] = []
    per_round: list[dict] = []
    graph_edges: list[tuple[Atom, str, Atom]] = []
    steps: list[frozenset[Atom]] = [frozenset(base)]

    delta_prev: set[Atom] = set(base)
    rounds = 0

    for k in range(1, cfg.round_cap + 1):
        rounds = k
        snapshot = sort_facts(fact_round)
        current = set(fact_round)
        round_computed = 0
        round_applied_records: list[int] = []
        round_new: list[Atom] = []
        round_edges: list[tuple[Atom, str, Atom]] = []

        for rule in program.rules:
            for h in find_homomorphisms(rule.body, snapshot):
                body_facts = [apply_atom(h, a) for a in rule.body]
                if use_sne and not any(f in delta_prev for f in body_facts):
                    continue
                round_computed += 1
                ext: TermMapping = dict(h)
                for z in sorted(rule.existentials, key=lambda v: v.name):
                    if cfg.variant == "skolem":
                        ext[z] = _skolem_null(skolem_cache, counter, rule, h, z)
                    else:
                        ext[z] = counter.fresh()
                fact = apply_atom(ext, rule.head)

                if cfg.variant == "restricted":
                    applied = next(find_homomorphisms([fact], current), None) is None
                else:
                    applied = fact not in current

                if applied:
                    current.add(fact)
                    fact_round[fact] = k
                    round_new.append(fact)
                    for bf in dict.fromkeys(body_facts):
                        round_edges.append((bf, rule.rid, fact))
                    round_applied_records.append(len(records))
                records.append(TriggerRecord(
                    rule.rid,
                    tuple(sorted(h.items(), key=lambda kv: str(kv[0]))),
                    tuple(sorted(ext.items(), key=lambda kv: str(kv[0]))),
                    fact, k, applied))

        terminated = False
        if cfg.variant == "equivalent":
            if round_new and entails(steps[-1], current):
                # the round produced nothing logically new: revert it
                for f in round_new:
                    del fact_round[f]
                for i in round_applied_records:
                    r = records[i]
                    records[i] = TriggerRecord(r.rule_id, r.homomorphism,
                                               r.extension, r.fact, r.round, False)
                round_new, round_edges = [], []
            if not round_new:
                terminated = True
        else:
            if not round_new:
                terminated = True

        graph_edges.extend(round_edges)
        applied_n = len(round_new)
        per_round.append({"round": k, "computed": round_computed, "applied": applied_n})
        if not terminated:
            steps.append(frozenset(fact_round))
            delta_prev = set(round_new)
        if terminated:
            final = set(fact_round)
            graph = None
            if cfg.record_graph:
                graph = ChaseGraph(nodes=set(final), edges=graph_edges)
            return ChaseResult(
                final=final, rounds=rounds,
                triggers_computed=sum(r["computed"] for r in per_round),
                triggers_applied=sum(r["applied"] for r in per_round),
                per_round=per_round, variant=cfg.variant, base_size=len(base),
                graph=graph, steps=steps, records=records)

    raise RoundCapExceeded(
        f"chase did not terminate within {cfg.round_cap} rounds",
        set(fact_round), cfg.round_cap)


def chase_graph(program: Program, base: Instance, *, round_cap: int = 64) -> ChaseGraph:
    """Provenance DAG of the equivalent chase."""
    result = chase(program, base,
                   ChaseConfig(variant="equivalent", round_cap=round_cap,
                               record_graph=True))
    assert result.graph is not None
    return result.graph
