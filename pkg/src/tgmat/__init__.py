"""Trigger-graph guided materialization for Datalog and existential rules."""

from .chase import (ChaseConfig, ChaseGraph, ChaseResult, RoundCapExceeded,
                    TriggerRecord, chase, chase_graph, trigger_count)
from .datalog_opt import (NodeExecResult, NodeRewriting, TgMatResult,
                          eg_rewriting, exec_node_under, min_datalog,
                          plain_node_exec, tg_mat)
from .egraph import (EGReport, ExecutionGraph, ExpansionResult, FactStore,
                     expand_full_eg, expand_until_fixpoint, is_tg_for,
                     materialize, validate_eg)
from .generate import FAMILIES, GeneratedKB, generate_corpus, generate_kb
from .linear import (RepresentativeSet, dominated, min_linear,
                     preserving_hom_exists, representative_facts,
                     tgraph_linear)
from .logic import (ConjunctiveQuery, TermMapping, answer_cq, apply_atom,
                    apply_atoms, apply_term, cq_contained, cq_equivalent,
                    entails, equivalent, find_homomorphisms, mgu,
                    unifier_classes)
from .model import (Atom, Const, Null, NullCounter, ParseError, Program,
                    Rule, Term, Var, atom, fact_key, is_ground,
                    normalize_program, parse_facts, parse_program,
                    print_facts, print_program, sort_facts, strip_internal)

__all__ = [name for name in dir() if not name.startswith("_")]
