"""Homomorphism search, unification, CQ evaluation and containment.

All operations are pure functions over immutable inputs.  Enumeration is
deterministic: source atoms are processed in the order given and candidate
facts in canonical fact order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .model import (Atom, Const, Null, Term, Var, atom_nulls, fact_key,
                    instance_nulls, sort_facts)

# A term mapping is a partial map from terms to terms.  Terms outside the
# domain are left unchanged by application.
TermMapping = dict[Term, Term]


def apply_term(m: TermMapping, t: Term) -> Term:
    return m.get(t, t)


def apply_atom(m: TermMapping, a: Atom) -> Atom:
    return Atom(a.pred, tuple(m.get(t, t) for t in a.args))


def apply_atoms(m: TermMapping, atoms: Iterable[Atom]) -> list[Atom]:
    return [apply_atom(m, a) for a in atoms]


def _may_bind(t: Term, image: Term) -> bool:
    # Homomorphism discipline: constants are rigid, nulls and variables may
    # map to any ground term.
    if isinstance(t, Const):
        return t == image
    return not isinstance(image, Var)


def _extend(binding: TermMapping, a: Atom, fact: Atom) -> Optional[TermMapping]:
    if a.pred != fact.pred or len(a.args) != len(fact.args):
        return None
    new = binding
    copied = False
    for t, img in zip(a.args, fact.args):
        bound = new.get(t)
        if bound is not None:
            if bound != img:
                return None
            continue
        if not _may_bind(t, img):
            return None
        if not copied:
            new = dict(new)
            copied = True
        new[t] = img
    return new


def search_homomorphisms(atoms: Sequence[Atom],
                         targets: Sequence[Iterable[Atom]],
                         fixed: Optional[TermMapping] = None) -> Iterator[TermMapping]:
    """Enumerate homomorphisms where the i-th atom must map into targets[i]."""
    assert len(atoms) == len(targets)
    candidates = [sort_facts(t) for t in targets]

    def rec(i: int, binding: TermMapping) -> Iterator[TermMapping]:
        if i == len(atoms):
            yield dict(binding)
            return
        for fact in candidates[i]:
            nxt = _extend(binding, atoms[i], fact)
            if nxt is not None:
                yield from rec(i + 1, nxt)

    start: TermMapping = dict(fixed) if fixed else {}
    for t, img in start.items():
        if isinstance(t, Const) and t != img:
            return iter(())
        if isinstance(img, Var):
            return iter(())
    return rec(0, start)


def find_homomorphisms(source: Iterable[Atom], target: Iterable[Atom],
                       fixed: Optional[TermMapping] = None) -> Iterator[TermMapping]:
    """All extensions of `fixed` to homomorphisms from `source` into `target`."""
    atoms = list(source)
    tgt = list(target)
    return search_homomorphisms(atoms, [tgt] * len(atoms), fixed)


def search_homomorphisms_counted(
        atoms: Sequence[Atom], targets: Sequence[Iterable[Atom]],
        fixed: Optional[TermMapping] = None
) -> tuple[list[TermMapping], list[int]]:
    """Like search_homomorphisms, but also reports how many partial bindings
    reach each atom depth (the intermediate join cardinalities)."""
    candidates = [sort_facts(t) for t in targets]
    partials = [0] * len(atoms)
    homs: list[TermMapping] = []

    def rec(i: int, binding: TermMapping):
        if i == len(atoms):
            homs.append(dict(binding))
            return
        for fact in candidates[i]:
            nxt = _extend(binding, atoms[i], fact)
            if nxt is not None:
                partials[i] += 1
                rec(i + 1, nxt)

    rec(0, dict(fixed) if fixed else {})
    return homs, partials


def entails(candidate: Iterable[Atom], goal: Iterable[Atom]) -> bool:
    """True iff a homomorphism exists from `goal` into `candidate`."""
    cand = set(candidate)
    goal = set(goal)
    if not instance_nulls(goal):
        return goal <= cand
    if goal <= cand:
        return True
    return next(find_homomorphisms(sort_facts(goal), cand), None) is not None


def equivalent(a: Iterable[Atom], b: Iterable[Atom]) -> bool:
    a, b = set(a), set(b)
    return entails(a, b) and entails(b, a)


# ---------------------------------------------------------------------------
# Most general unifier
# ---------------------------------------------------------------------------

def mgu(atoms: Sequence[Atom]) -> Optional[TermMapping]:
    """MGU of two or more atoms over variables and constants.

    Positionwise union-find; returns None when predicates differ or constants
    clash.  Class representative: the constant if present, else the
    lexicographically least variable.
    """
    atoms = list(atoms)
    if len(atoms) < 2:
        raise ValueError("mgu needs at least two atoms")
    first = atoms[0]
    for a in atoms[1:]:
        if a.pred != first.pred or len(a.args) != len(first.args):
            return None
    for a in atoms:
        if atom_nulls(a):
            raise ValueError("mgu inputs must be null-free")

    parent: dict[Term, Term] = {}

    def find(t: Term) -> Term:
        while parent.get(t, t) != t:
            parent[t] = parent.get(parent[t], parent[t])
            t = parent[t]
        return t

    def union(x: Term, y: Term) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return True
        if isinstance(rx, Const) and isinstance(ry, Const):
            return False
        # keep the constant as root, else the lexicographically least variable
        if isinstance(ry, Const) or (isinstance(rx, Var) and isinstance(ry, Var)
                                     and ry.name < rx.name):
            rx, ry = ry, rx
        parent[ry] = rx
        return True

    for pos in range(len(first.args)):
        for a in atoms[1:]:
            if not union(first.args[pos], a.args[pos]):
                return None

    out: TermMapping = {}
    for a in atoms:
        for t in a.args:
            out[t] = find(t)
    return out


def unifier_classes(m: TermMapping) -> set[frozenset[Term]]:
    """Group the domain of a unifier by image; handy for tests."""
    groups: dict[Term, set[Term]] = {}
    for t, img in m.items():
        groups.setdefault(img, set()).add(t)
        groups.setdefault(img, set()).add(img)
    return {frozenset(g) for g in groups.values()}


# ---------------------------------------------------------------------------
# Conjunctive queries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjunctiveQuery:
    """head is the ordered answer tuple; entries are variables (repetitions
    allowed) or constants.  Body atoms are null-free."""
    head: tuple[Term, ...]
    body: tuple[Atom, ...]

    def __post_init__(self):
        body_vars = {t for a in self.body for t in a.args if isinstance(t, Var)}
        for t in self.head:
            if isinstance(t, Null):
                raise ValueError("CQ heads cannot contain nulls")
            if isinstance(t, Var) and t not in body_vars:
                raise ValueError(f"head variable {t} does not occur in the body")
        for a in self.body:
            if atom_nulls(a):
                raise ValueError("CQ bodies must be null-free")

    def __str__(self) -> str:
        head = ", ".join(str(t) for t in self.head)
        body = ", ".join(str(a) for a in self.body)
        return f"Q({head}) <- {body}"


def answer_cq(q: ConjunctiveQuery, instance: Iterable[Atom]) -> set[tuple[Term, ...]]:
    """All answers of q on the instance, as tuples in head order.

    Answers that map head variables to nulls are retained; callers filter.
    """
    inst = set(instance)
    out: set[tuple[Term, ...]] = set()
    for h in find_homomorphisms(q.body, inst):
        out.add(tuple(h.get(t, t) for t in q.head))
    return out


def _fresh_const_names(n: int, taken: set[str]) -> list[str]:
    names, i = [], 0
    while len(names) < n:
        cand = f"fz{i}"
        i += 1
        if cand not in taken:
            names.append(cand)
    return names


def cq_contained(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    """Containment q1 <= q2 via q1's frozen canonical instance."""
    if len(q1.head) != len(q2.head):
        raise ValueError("containment needs equal head arity")
    q1_vars = sorted({t for a in q1.body for t in a.args if isinstance(t, Var)},
                     key=lambda v: v.name)
    taken = {t.name for q in (q1, q2) for a in q.body
             for t in a.args if isinstance(t, Const)}
    freeze: TermMapping = {
        v: Const(name) for v, name in zip(q1_vars, _fresh_const_names(len(q1_vars), taken))
    }
    canonical = {apply_atom(freeze, a) for a in q1.body}
    frozen_head = tuple(freeze.get(t, t) for t in q1.head)
    return frozen_head in answer_cq(q2, canonical)


def cq_equivalent(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    return cq_contained(q1, q2) and cq_contained(q2, q1)
