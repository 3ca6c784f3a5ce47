"""Logical vocabulary: terms, atoms, rules, programs, and the file formats.

Rule files are UTF-8 text, one rule per line:

    A1(args), A2(args) -> H(args)

'#' starts a comment that runs to the end of the line.  Inside an atom,
uppercase-initial identifiers are variables and everything else is a
constant.  Predicate names are arbitrary identifiers; a predicate is
extensional iff it never occurs in a rule head.

Fact files are TSV, one fact per line:

    predicate<TAB>arg1<TAB>...<TAB>argN

All fact arguments are constants, whatever their spelling.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class Term:
    """Base class for constants, labeled nulls, and variables."""
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Null(Term):
    """A labeled null.  Ordinals are never reused within one run."""
    ordinal: int

    def __str__(self) -> str:
        return f"_:n{self.ordinal}"


class NullCounter:
    """Mints fresh nulls with run-unique ordinals."""

    def __init__(self, start: int = 1):
        self._next = start

    def fresh(self) -> Null:
        n = Null(self._next)
        self._next += 1
        return n


def term_key(t: Term):
    """Canonical sort key: constants by name, then nulls by ordinal, then variables."""
    if isinstance(t, Const):
        return (0, t.name, 0)
    if isinstance(t, Null):
        return (1, "", t.ordinal)
    return (2, t.name, 0)


# ---------------------------------------------------------------------------
# Atoms and facts
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"


def atom(pred: str, *args: Term) -> Atom:
    return Atom(pred, tuple(args))


def is_ground(a: Atom) -> bool:
    return not any(isinstance(t, Var) for t in a.args)


def fact_key(f: Atom):
    """Canonical fact order: (predicate, args) with nulls ordered by ordinal."""
    return (f.pred, tuple(term_key(t) for t in f.args))


def sort_facts(facts: Iterable[Atom]) -> list[Atom]:
    return sorted(facts, key=fact_key)


def atom_nulls(a: Atom) -> set[Null]:
    return {t for t in a.args if isinstance(t, Null)}


def instance_nulls(facts: Iterable[Atom]) -> set[Null]:
    out: set[Null] = set()
    for f in facts:
        out |= atom_nulls(f)
    return out


# ---------------------------------------------------------------------------
# Rules and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    rid: str
    body: tuple[Atom, ...]
    head: Atom
    frontier: frozenset[Var] = field(init=False)
    existentials: frozenset[Var] = field(init=False)

    def __post_init__(self):
        body_vars = {t for a in self.body for t in a.args if isinstance(t, Var)}
        head_vars = {t for t in self.head.args if isinstance(t, Var)}
        object.__setattr__(self, "frontier", frozenset(body_vars & head_vars))
        object.__setattr__(self, "existentials", frozenset(head_vars - body_vars))

    @property
    def is_datalog(self) -> bool:
        return not self.existentials

    @property
    def is_linear(self) -> bool:
        return len(self.body) == 1

    def __str__(self) -> str:
        return f"{', '.join(str(a) for a in self.body)} -> {self.head}"


@dataclass
class Program:
    rules: list[Rule]
    arity: dict[str, int]
    intensional: frozenset[str]
    internal: frozenset[str] = frozenset()

    @property
    def extensional(self) -> frozenset[str]:
        return frozenset(p for p in self.arity if p not in self.intensional)

    @property
    def is_datalog(self) -> bool:
        return all(r.is_datalog for r in self.rules)

    @property
    def is_linear(self) -> bool:
        return all(r.is_linear for r in self.rules)

    def is_extensional_pred(self, pred: str) -> bool:
        return pred not in self.intensional

    def is_extensional_rule(self, rule: Rule) -> bool:
        return all(self.is_extensional_pred(a.pred) for a in rule.body)

    def rule_by_id(self, rid: str) -> Rule:
        for r in self.rules:
            if r.rid == rid:
                return r
        raise KeyError(rid)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (self.rules == other.rules and self.arity == other.arity
                and self.intensional == other.intensional)


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


_IDENT = re.compile(r"[A-Za-z0-9_]+")
_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*")


def _parse_term(tok: str, line: int) -> Term:
    if not _IDENT.fullmatch(tok):
        raise ParseError(f"bad term {tok!r}", line)
    if tok[0].isupper():
        return Var(tok)
    return Const(tok)


def _parse_atom_list(text: str, line: int) -> list[Atom]:
    atoms: list[Atom] = []
    pos = 0
    while True:
        m = _ATOM.match(text, pos)
        if m is None:
            raise ParseError(f"expected atom at {text[pos:].strip()!r}", line)
        args_src = m.group(2).strip()
        args = tuple(_parse_term(tok.strip(), line)
                     for tok in args_src.split(",")) if args_src else ()
        atoms.append(Atom(m.group(1), args))
        pos = m.end()
        if pos == len(text):
            return atoms
        if text[pos] != ",":
            raise ParseError(f"expected ',' at {text[pos:].strip()!r}", line)
        pos += 1


def _register_arity(arity: dict[str, int], pred: str, n: int, line: Optional[int]):
    seen = arity.get(pred)
    if seen is None:
        arity[pred] = n
    elif seen != n:
        raise ParseError(f"arity conflict for {pred!r}: {seen} vs {n}", line)


def parse_program(text: str) -> Program:
    """Parse rule-file content.  Rule ids are positional: r1, r2, ..."""
    rules: list[Rule] = []
    arity: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("->") != 1:
            raise ParseError("expected exactly one '->'", line_no)
        lhs, rhs = line.split("->")
        if not lhs.strip():
            raise ParseError("rule with empty body", line_no)
        body = _parse_atom_list(lhs, line_no)
        head_atoms = _parse_atom_list(rhs, line_no)
        if len(head_atoms) != 1:
            raise ParseError("rule head must be a single atom", line_no)
        head = head_atoms[0]
        for a in body + [head]:
            _register_arity(arity, a.pred, len(a.args), line_no)
        rules.append(Rule(f"r{len(rules) + 1}", tuple(body), head))
    intensional = frozenset(r.head.pred for r in rules)
    return Program(rules, arity, intensional)


def print_program(p: Program) -> str:
    return "\n".join(str(r) for r in p.rules) + ("\n" if p.rules else "")


def parse_facts(text: str, program: Program) -> set[Atom]:
    """Parse fact-file content into a base instance (constants only)."""
    facts: set[Atom] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        pred, args = parts[0].strip(), [x.strip() for x in parts[1:]]
        if pred not in program.arity:
            raise ParseError(f"unknown predicate {pred!r}", line_no)
        if pred in program.intensional:
            raise ParseError(f"intensional predicate {pred!r} in fact file", line_no)
        if len(args) != program.arity[pred]:
            raise ParseError(
                f"arity mismatch for {pred!r}: expected {program.arity[pred]}, got {len(args)}",
                line_no)
        facts.add(Atom(pred, tuple(Const(a) for a in args)))
    return facts


def print_facts(facts: Iterable[Atom]) -> str:
    lines = []
    for f in sort_facts(facts):
        lines.append("\t".join([f.pred] + [str(a) for a in f.args]))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Normalization: make every rule body all-extensional or all-intensional
# ---------------------------------------------------------------------------

def _alias_name(pred: str, taken: set[str]) -> str:
    name = f"{pred}__i"
    while name in taken:
        name += "_"
    return name


def normalize_program(p: Program) -> Program:
    """Rewrite mixed bodies so every body is predicate-homogeneous.

    For each extensional predicate e occurring in a mixed body, an internal
    intensional alias e__i is introduced together with the copy rule
    e(X...) -> e__i(X...), and e is replaced by the alias in mixed bodies
    only.  Homogeneous programs are returned unchanged.
    """
    def is_mixed(rule: Rule) -> bool:
        kinds = {p.is_extensional_pred(a.pred) for a in rule.body}
        return len(kinds) == 2

    mixed = [r for r in p.rules if is_mixed(r)]
    if not mixed:
        return p

    taken = set(p.arity)
    alias: dict[str, str] = {}
    for r in mixed:
        for a in r.body:
            if p.is_extensional_pred(a.pred) and a.pred not in alias:
                alias[a.pred] = _alias_name(a.pred, taken)
                taken.add(alias[a.pred])

    new_rules: list[Rule] = []
    arity = dict(p.arity)
    for pred in sorted(alias):
        n = p.arity[pred]
        args = tuple(Var(f"X{i + 1}") for i in range(n))
        new_rules.append(Rule(f"r{len(new_rules) + 1}",
                              (Atom(pred, args),), Atom(alias[pred], args)))
        arity[alias[pred]] = n
    for r in p.rules:
        if is_mixed(r):
            body = tuple(Atom(alias[a.pred], a.args)
                         if p.is_extensional_pred(a.pred) else a for a in r.body)
        else:
            body = r.body
        new_rules.append(Rule(f"r{len(new_rules) + 1}", body, r.head))
    intensional = frozenset(r.head.pred for r in new_rules)
    return Program(new_rules, arity, intensional,
                   internal=p.internal | frozenset(alias.values()))


def strip_internal(facts: Iterable[Atom], program: Program) -> set[Atom]:
    return {f for f in facts if f.pred not in program.internal}
