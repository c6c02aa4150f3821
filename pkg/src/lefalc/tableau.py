"""Saturation engine: expansion rules, clash detection, completions.

Positive facts are kept as one lower bound per term (new derivations are
join-absorbed, so the stored bound is the running maximum); negative facts
are kept as bound sets and consulted only by the clash check.  A term with
no stored positive fact is implicitly bounded below by bottom, so a negative
fact with bound bottom clashes immediately (nothing can fail to be at least
bottom).

The occurrence set is frozen from the input ABox.  Tagged constants are
memoized per (role, base constant); the classifier identifications
"dia-tag of a_C is the classifier of <R>C" and "box-tag of x_C is the
classifier of [R]C" are applied when constants are created and recognized
symmetrically when rules match on tagged constants.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import syntax
from .heyting import Algebra
from .syntax import (And, Assertion, Box, BoxRel, Concept, Describes, Dia,
                     DiaRel, Inc, KnowledgeBase, Member, Or, concept_text)


class TableauError(ValueError):
    pass


class CapacityError(TableauError):
    """The safety cap was exceeded; this is an internal limit, not a verdict."""

    def __init__(self, cap: int):
        super().__init__(f"saturation exceeded the safety cap of {cap} facts")
        self.cap = cap


# -- constants ----------------------------------------------------------------

OBJ = "obj"
FEAT = "feat"

BLACKDIA = "bdia"   # left adjoint tag on objects, from box relations
DIATAG = "dia"      # tag on objects, from diamond relations
BOXTAG = "box"      # tag on features, from box relations
BLACKBOX = "bbox"   # right adjoint tag on features, from diamond relations


class Constant:
    __slots__ = ()


def _cached_hash(cls):
    orig = cls.__hash__

    def __hash__(self):
        h = getattr(self, "_h", None)
        if h is None:
            h = orig(self)
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True)
class Named(Constant):
    name: str
    side: str
    __slots__ = ("name", "side", "_h")


@_cached_hash
@dataclass(frozen=True)
class Classifier(Constant):
    concept: Concept
    side: str
    __slots__ = ("concept", "side", "_h")


@_cached_hash
@dataclass(frozen=True)
class Tagged(Constant):
    kind: str
    role: str
    base: Constant
    __slots__ = ("kind", "role", "base", "_h")


def constant_side(c: Constant) -> str:
    if isinstance(c, (Named, Classifier)):
        return c.side
    return OBJ if c.kind in (BLACKDIA, DIATAG) else FEAT


def tag(kind: str, role: str, base: Constant) -> Constant:
    """Create a tagged constant, collapsing the classifier identifications."""
    if kind == DIATAG and isinstance(base, Classifier) and base.side == OBJ:
        return Classifier(Dia(role, base.concept), OBJ)
    if kind == BOXTAG and isinstance(base, Classifier) and base.side == FEAT:
        return Classifier(Box(role, base.concept), FEAT)
    return Tagged(kind, role, base)


def as_boxtag(c: Constant) -> Optional[tuple[str, Constant]]:
    """Recognize a feature constant as a box tag, through the identification."""
    if isinstance(c, Tagged) and c.kind == BOXTAG:
        return c.role, c.base
    if isinstance(c, Classifier) and c.side == FEAT and isinstance(c.concept, Box):
        return c.concept.role, Classifier(c.concept.arg, FEAT)
    return None


def as_diatag(c: Constant) -> Optional[tuple[str, Constant]]:
    """Recognize an object constant as a diamond tag, through the identification."""
    if isinstance(c, Tagged) and c.kind == DIATAG:
        return c.role, c.base
    if isinstance(c, Classifier) and c.side == OBJ and isinstance(c.concept, Dia):
        return c.concept.role, Classifier(c.concept.arg, OBJ)
    return None


def constant_text(c: Constant) -> str:
    if isinstance(c, Named):
        return c.name
    if isinstance(c, Classifier):
        prefix = "a" if c.side == OBJ else "x"
        return f"{prefix}[{concept_text(c.concept)}]"
    return f"{c.kind}_{c.role}({constant_text(c.base)})"


# -- state ---------------------------------------------------------------------


@dataclass
class TraceStep:
    rule: str
    premises: tuple[tuple[object, int], ...]
    added: tuple[tuple[object, int], ...]
    note: str = ""


@dataclass
class ClashWitness:
    term: object
    pos_bound: int
    neg_bound: int

    def text(self, alg: Algebra) -> str:
        return (f"{term_text(self.term)} has derived lower bound "
                f"{alg.render(self.pos_bound)} against the negative bound "
                f"{alg.render(self.neg_bound)}")


def term_text(term) -> str:
    return syntax.term_text(term, render=constant_text)


class TableauState:
    """Mutable saturation state; single-owner, immutable once completed."""

    def __init__(self, kb: KnowledgeBase, cap: Optional[int] = None):
        if kb.tbox:
            raise TableauError("the TBox must be eliminated before saturation")
        self.kb = kb
        self.algebra: Algebra = kb.algebra
        self.occurrence: tuple[Concept, ...] = syntax.subconcepts(kb)
        self.occurrence_set = frozenset(self.occurrence)
        self.pos: dict[object, int] = {}
        self.neg: dict[object, list[int]] = {}
        self.constants: dict[Constant, int] = {}
        self.members: dict[Concept, dict[Constant, int]] = {}
        self.describes: dict[Concept, dict[Constant, int]] = {}
        self.and_nodes: dict[Concept, list[And]] = {}
        self.or_nodes: dict[Concept, list[Or]] = {}
        self.trace: list[TraceStep] = []
        self.pending: deque = deque()
        self.pending_set: set = set()
        self.clash: Optional[ClashWitness] = None
        input_count = len(kb.abox)
        self.cap = cap if cap is not None else \
            64 * max(1, input_count + len(self.occurrence)) ** 2
        self.rule_counts: dict[str, int] = {}
        for c in self.occurrence:
            if isinstance(c, And):
                self.and_nodes.setdefault(c.left, []).append(c)
                if c.right != c.left:
                    self.and_nodes.setdefault(c.right, []).append(c)
            elif isinstance(c, Or):
                self.or_nodes.setdefault(c.left, []).append(c)
                if c.right != c.left:
                    self.or_nodes.setdefault(c.right, []).append(c)

    # -- registry ------------------------------------------------------------

    def register(self, c: Constant) -> Constant:
        if c not in self.constants:
            self.constants[c] = len(self.constants)
        return c

    def register_term(self, term) -> None:
        if isinstance(term, Member):
            self.register(term.obj)
        elif isinstance(term, Describes):
            self.register(term.feat)
        elif isinstance(term, Inc):
            self.register(term.obj)
            self.register(term.feat)
        elif isinstance(term, BoxRel):
            self.register(term.obj)
            self.register(term.feat)
        elif isinstance(term, DiaRel):
            self.register(term.feat)
            self.register(term.obj)

    def objects(self) -> list[Constant]:
        return [c for c in self.constants if constant_side(c) == OBJ]

    def features(self) -> list[Constant]:
        return [c for c in self.constants if constant_side(c) == FEAT]

    # -- fact storage ----------------------------------------------------------

    def positive_bound(self, term) -> int:
        return self.pos.get(term, self.algebra.bot)

    def store(self, term, bound: int) -> bool:
        """Join-absorb a positive bound; returns True when the bound grew."""
        old = self.pos.get(term)
        new = bound if old is None else self.algebra.join(old, bound)
        if old is not None and new == old:
            return False
        if old is None and len(self.pos) >= self.cap:
            raise CapacityError(self.cap)
        self.pos[term] = new
        self.register_term(term)
        if isinstance(term, Member):
            self.members.setdefault(term.concept, {})[term.obj] = new
        elif isinstance(term, Describes):
            self.describes.setdefault(term.concept, {})[term.feat] = new
        if term not in self.pending_set:
            self.pending_set.add(term)
            self.pending.append(term)
        self.check_clash(term)
        return True

    def store_negative(self, term, bound: int) -> None:
        bounds = self.neg.setdefault(term, [])
        if bound not in bounds:
            bounds.append(bound)
        self.register_term(term)
        self.check_clash(term)

    def check_clash(self, term) -> None:
        if self.clash is not None:
            return
        bounds = self.neg.get(term)
        if not bounds:
            return
        pos = self.positive_bound(term)
        for nu in bounds:
            if self.algebra.le(nu, pos):
                self.clash = ClashWitness(term, pos, nu)
                return


def clash_check(state: TableauState, term) -> Optional[ClashWitness]:
    """Witness iff some negative bound on the term is below its positive bound."""
    pos = state.positive_bound(term)
    for nu in state.neg.get(term, ()):
        if state.algebra.le(nu, pos):
            return ClashWitness(term, pos, nu)
    return None


@dataclass
class Verdict:
    consistent: bool
    state: TableauState
    clash: Optional[ClashWitness] = None

    @property
    def trace(self) -> list[TraceStep]:
        return self.state.trace


def trace(verdict: Verdict) -> list[TraceStep]:
    """The ordered derivation listing of the run."""
    return verdict.trace


# -- initialization -------------------------------------------------------------


def _lift_term(kb: KnowledgeBase, term):
    """Rewrite a parsed term over names into a term over Named constants."""
    if isinstance(term, Member):
        return Member(Named(term.obj, OBJ), term.concept)
    if isinstance(term, Describes):
        return Describes(Named(term.feat, FEAT), term.concept)
    if isinstance(term, Inc):
        return Inc(Named(term.obj, OBJ), Named(term.feat, FEAT))
    if isinstance(term, BoxRel):
        return BoxRel(term.role, Named(term.obj, OBJ), Named(term.feat, FEAT))
    if isinstance(term, DiaRel):
        return DiaRel(term.role, Named(term.feat, FEAT), Named(term.obj, OBJ))
    raise TableauError(f"not an ABox term: {term!r}")


def initialize(kb: KnowledgeBase, cap: Optional[int] = None) -> TableauState:
    """Creation facts for every occurring concept, then the input assertions."""
    state = TableauState(kb, cap)
    alg = state.algebra
    top = alg.top
    for concept in state.occurrence:
        a_c = state.register(Classifier(concept, OBJ))
        x_c = state.register(Classifier(concept, FEAT))
        added = []
        for term in (Member(a_c, concept), Describes(x_c, concept)):
            state.store(term, top)
            added.append((term, top))
        state.trace.append(TraceStep("create", (), tuple(added)))
        state.rule_counts["create"] = state.rule_counts.get("create", 0) + 1
    for a in kb.abox:
        alg.check_element(a.bound)
        term = _lift_term(kb, a.term)
        if a.positive:
            state.store(term, a.bound)
            state.trace.append(TraceStep("input", (), ((term, a.bound),)))
        else:
            state.store_negative(term, a.bound)
            state.trace.append(TraceStep("input_neg", (), ((term, a.bound),)))
            # basic rules for negative assertions
            if isinstance(term, Member):
                x_c = state.register(Classifier(term.concept, FEAT))
                derived = Inc(term.obj, x_c)
                state.store_negative(derived, a.bound)
                state.trace.append(TraceStep(
                    "neg_a_C", ((term, a.bound),), ((derived, a.bound),)))
                state.rule_counts["neg_a_C"] = state.rule_counts.get("neg_a_C", 0) + 1
            elif isinstance(term, Describes):
                a_c = state.register(Classifier(term.concept, OBJ))
                derived = Inc(a_c, term.feat)
                state.store_negative(derived, a.bound)
                state.trace.append(TraceStep(
                    "neg_x_C", ((term, a.bound),), ((derived, a.bound),)))
                state.rule_counts["neg_x_C"] = state.rule_counts.get("neg_x_C", 0) + 1
    return state


# -- saturation -------------------------------------------------------------------


RULE_NAMES = (
    "create", "I", "and_A", "or_X", "box", "dia",
    "box_y", "bbox_y", "dia_b", "bdia_b",
    "and_A_inv", "or_X_inv", "adj_R_box", "adj_R_dia",
    "neg_a_C", "neg_x_C", "x_C", "a_C", "MV_join",
)

BDIA_NOTE = "conclusion read as a positive bound on the box relation"


def rule_revision_hash() -> str:
    blob = "|".join(RULE_NAMES).encode() + b"|frozen-occurrence|implicit-bot"
    return hashlib.sha256(blob).hexdigest()[:12]


def saturate(state: TableauState, seed: Optional[int] = None,
             disabled_rules: frozenset = frozenset()) -> Verdict:
    """Run the expansion rules to a fixpoint or to the first clash.

    The worklist is FIFO by default; a seed makes the processing order a
    deterministic shuffle instead (verdicts are order-independent, which the
    test suite exercises through exactly this hook).
    """
    alg = state.algebra
    rng = random.Random(seed) if seed is not None else None

    def fire(rule: str, premises, conclusions, note: str = "") -> None:
        if rule in disabled_rules or state.clash is not None:
            return
        added = []
        for term, bound in conclusions:
            state.store(term, bound)
            added.append((term, bound))
        state.trace.append(TraceStep(rule, tuple(premises), tuple(added), note))
        state.rule_counts[rule] = state.rule_counts.get(rule, 0) + 1

    if state.clash is not None:
        return Verdict(False, state, state.clash)

    while state.pending:
        if rng is None:
            term = state.pending.popleft()
        else:
            idx = rng.randrange(len(state.pending))
            state.pending.rotate(-idx)
            term = state.pending.popleft()
            state.pending.rotate(idx)
        state.pending_set.discard(term)
        alpha = state.pos[term]

        if isinstance(term, Member):
            b, concept = term.obj, term.concept
            for y, beta in list(state.describes.get(concept, {}).items()):
                fire("I", ((term, alpha), (Describes(y, concept), beta)),
                     ((Inc(b, y), alg.meet(alpha, beta)),))
            if isinstance(concept, And):
                fire("and_A", ((term, alpha),),
                     ((Member(b, concept.left), alpha),
                      (Member(b, concept.right), alpha)))
            if isinstance(concept, Box):
                for y, beta in list(state.describes.get(concept.arg, {}).items()):
                    fire("box", ((term, alpha), (Describes(y, concept.arg), beta)),
                         ((BoxRel(concept.role, b, y), alg.meet(alpha, beta)),))
            for role in state.kb.dia_roles:
                wrapped = Dia(role, concept)
                for y, beta in list(state.describes.get(wrapped, {}).items()):
                    fire("dia", ((Describes(y, wrapped), beta), (term, alpha)),
                         ((DiaRel(role, y, b), alg.meet(beta, alpha)),))
            for node in state.and_nodes.get(concept, ()):
                other = node.right if node.left == concept else node.left
                if node.left == concept and node.right == concept:
                    other = concept
                beta = state.members.get(other, {}).get(b)
                if beta is not None:
                    left_bound = alpha if node.left == concept else beta
                    right_bound = beta if node.left == concept else alpha
                    fire("and_A_inv",
                         ((Member(b, node.left), left_bound),
                          (Member(b, node.right), right_bound)),
                         ((Member(b, node), alg.meet(alpha, beta)),))

        elif isinstance(term, Describes):
            y, concept = term.feat, term.concept
            for b, beta in list(state.members.get(concept, {}).items()):
                fire("I", ((Member(b, concept), beta), (term, alpha)),
                     ((Inc(b, y), alg.meet(beta, alpha)),))
            if isinstance(concept, Or):
                fire("or_X", ((term, alpha),),
                     ((Describes(y, concept.left), alpha),
                      (Describes(y, concept.right), alpha)))
            if isinstance(concept, Dia):
                for b, beta in list(state.members.get(concept.arg, {}).items()):
                    fire("dia", ((term, alpha), (Member(b, concept.arg), beta)),
                         ((DiaRel(concept.role, y, b), alg.meet(alpha, beta)),))
            for role in state.kb.box_roles:
                wrapped = Box(role, concept)
                for b, beta in list(state.members.get(wrapped, {}).items()):
                    fire("box", ((Member(b, wrapped), beta), (term, alpha)),
                         ((BoxRel(role, b, y), alg.meet(beta, alpha)),))
            for node in state.or_nodes.get(concept, ()):
                other = node.right if node.left == concept else node.left
                if node.left == concept and node.right == concept:
                    other = concept
                beta = state.describes.get(other, {}).get(y)
                if beta is not None:
                    left_bound = alpha if node.left == concept else beta
                    right_bound = beta if node.left == concept else alpha
                    fire("or_X_inv",
                         ((Describes(y, node.left), left_bound),
                          (Describes(y, node.right), right_bound)),
                         ((Describes(y, node), alg.meet(alpha, beta)),))

        elif isinstance(term, Inc):
            b, y = term.obj, term.feat
            if isinstance(y, Classifier) and y.side == FEAT:
                fire("x_C", ((term, alpha),), ((Member(b, y.concept), alpha),))
            if isinstance(b, Classifier) and b.side == OBJ:
                fire("a_C", ((term, alpha),), ((Describes(y, b.concept), alpha),))
            boxtag = as_boxtag(y)
            if boxtag is not None:
                role, y0 = boxtag
                fire("box_y", ((term, alpha),),
                     ((BoxRel(role, b, y0), alpha),))
            if isinstance(y, Tagged) and y.kind == BLACKBOX:
                fire("bbox_y", ((term, alpha),),
                     ((DiaRel(y.role, y.base, b), alpha),))
            diatag = as_diatag(b)
            if diatag is not None:
                role, b0 = diatag
                fire("dia_b", ((term, alpha),),
                     ((DiaRel(role, y, b0), alpha),))
            if isinstance(b, Tagged) and b.kind == BLACKDIA:
                fire("bdia_b", ((term, alpha),),
                     ((BoxRel(b.role, b.base, y), alpha),), note=BDIA_NOTE)

        elif isinstance(term, BoxRel):
            role, b, y = term.role, term.obj, term.feat
            fb = state.register(tag(BLACKDIA, role, b))
            by = state.register(tag(BOXTAG, role, y))
            fire("adj_R_box", ((term, alpha),),
                 ((Inc(fb, y), alpha), (Inc(b, by), alpha)))

        elif isinstance(term, DiaRel):
            role, y, b = term.role, term.feat, term.obj
            db = state.register(tag(DIATAG, role, b))
            sy = state.register(tag(BLACKBOX, role, y))
            fire("adj_R_dia", ((term, alpha),),
                 ((Inc(db, y), alpha), (Inc(b, sy), alpha)))

        if state.clash is not None:
            return Verdict(False, state, state.clash)

    return Verdict(True, state)


def check_abox(kb: KnowledgeBase, cap: Optional[int] = None,
               seed: Optional[int] = None,
               disabled_rules: frozenset = frozenset()) -> Verdict:
    """Initialize and saturate in one call; the KB must have an empty TBox."""
    return saturate(initialize(kb, cap), seed=seed, disabled_rules=disabled_rules)
