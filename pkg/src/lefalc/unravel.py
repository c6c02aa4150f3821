"""Acyclic-TBox elimination by substituting concept definitions into the ABox.

Substitution is purely syntactic: no lattice-law simplification is performed,
so the occurrence set seen by the saturation engine is exactly the expanded
text.  Definitions must be in concept-definition form (primitive name on the
left, at most one definition per name) and acyclic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax
from .syntax import (And, Assertion, Box, Concept, Describes, Dia,
                     KnowledgeBase, Member, Or, Prim, concept_size)


class TBoxError(ValueError):
    pass


class CyclicTBoxError(TBoxError):
    def __init__(self, cycle: list[str]):
        super().__init__("cyclic concept definitions: " + " -> ".join(cycle))
        self.cycle = cycle


class IllFormedTBoxError(TBoxError):
    pass


@dataclass
class DependencyReport:
    """Definition map and a topological order (dependencies first)."""
    definitions: dict[str, Concept]
    depends_on: dict[str, frozenset[str]]
    order: tuple[str, ...]


def _prims(c: Concept, out: set[str]) -> None:
    if isinstance(c, Prim):
        out.add(c.name)
    elif isinstance(c, (And, Or)):
        _prims(c.left, out)
        _prims(c.right, out)
    else:
        _prims(c.arg, out)


def check_acyclic(tbox) -> DependencyReport:
    """Validate definition form and acyclicity; report the dependency order."""
    definitions: dict[str, Concept] = {}
    for axiom in tbox:
        if not isinstance(axiom.left, Prim):
            raise IllFormedTBoxError(
                f"definition left side must be a concept name, got "
                f"{syntax.concept_text(axiom.left)!r}")
        name = axiom.left.name
        if name in definitions:
            raise IllFormedTBoxError(f"duplicate definition for {name!r}")
        definitions[name] = axiom.right

    depends_on = {}
    for name, body in definitions.items():
        used: set[str] = set()
        _prims(body, used)
        depends_on[name] = frozenset(used & definitions.keys())

    order: list[str] = []
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str, stack: list[str]) -> None:
        mark = state.get(name)
        if mark == 2:
            return
        if mark == 1:
            cycle = stack[stack.index(name):] + [name]
            raise CyclicTBoxError(cycle)
        state[name] = 1
        stack.append(name)
        for dep in sorted(depends_on[name]):
            visit(dep, stack)
        stack.pop()
        state[name] = 2
        order.append(name)

    for name in definitions:
        visit(name, [])
    return DependencyReport(definitions, depends_on, tuple(order))


def _substitute(c: Concept, table: dict[str, Concept]) -> Concept:
    if isinstance(c, Prim):
        return table.get(c.name, c)
    if isinstance(c, And):
        return And(_substitute(c.left, table), _substitute(c.right, table))
    if isinstance(c, Or):
        return Or(_substitute(c.left, table), _substitute(c.right, table))
    if isinstance(c, Box):
        return Box(c.role, _substitute(c.arg, table))
    if isinstance(c, Dia):
        return Dia(c.role, _substitute(c.arg, table))
    raise TypeError(f"not a concept: {c!r}")


def expanded_definitions(tbox) -> dict[str, Concept]:
    """Each defined name mapped to its fully unraveled body."""
    report = check_acyclic(tbox)
    table: dict[str, Concept] = {}
    for name in report.order:
        table[name] = _substitute(report.definitions[name], table)
    return table


def expand(kb: KnowledgeBase) -> KnowledgeBase:
    """Replace every defined name in the ABox by its unraveled definition.

    The result has an empty TBox; expansion is idempotent.
    """
    table = expanded_definitions(kb.tbox)
    if not table:
        return kb.replace(tbox=())
    abox = []
    seen = set()
    for a in kb.abox:
        term = a.term
        if isinstance(term, Member):
            term = Member(term.obj, _substitute(term.concept, table))
        elif isinstance(term, Describes):
            term = Describes(term.feat, _substitute(term.concept, table))
        new = Assertion(a.positive, a.bound, term)
        key = (new.positive, new.bound, new.term)
        if key not in seen:
            seen.add(key)
            abox.append(new)
    return kb.replace(abox=tuple(abox), tbox=())


@dataclass
class ExpandStats:
    definitions: int
    abox_nodes_before: int
    abox_nodes_after: int

    @property
    def blowup(self) -> float:
        if self.abox_nodes_before == 0:
            return 1.0
        return self.abox_nodes_after / self.abox_nodes_before


def expansion_stats(before: KnowledgeBase, after: KnowledgeBase) -> ExpandStats:
    def nodes(kb: KnowledgeBase) -> int:
        total = 0
        for a in kb.abox:
            if isinstance(a.term, Member):
                total += concept_size(a.term.concept)
            elif isinstance(a.term, Describes):
                total += concept_size(a.term.concept)
        return total

    return ExpandStats(len(before.tbox), nodes(before), nodes(after))
