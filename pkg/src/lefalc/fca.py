"""Many-valued formal contexts, Galois maps, concept lattices and model checking.

A context carries an incidence relation I over objects x features plus named
box relations (objects x features) and diamond relations (features x objects),
all valued in a finite Heyting algebra.  Fuzzy sets are stored as numpy arrays
of element codes over an ordered domain; equality is exact code equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .heyting import Algebra
from . import syntax


class FcaError(ValueError):
    pass


class ConceptCapError(FcaError):
    """Concept enumeration exceeded the configured cap."""

    def __init__(self, cap: int):
        super().__init__(f"concept enumeration exceeded the cap of {cap}")
        self.cap = cap


class FuzzySet:
    """A total map from a finite domain into the algebra, by element code."""

    __slots__ = ("domain", "codes")

    def __init__(self, domain: Iterable[str], codes):
        self.domain: tuple[str, ...] = tuple(domain)
        arr = np.asarray(codes, dtype=np.int64).reshape(len(self.domain))
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.codes = arr

    @classmethod
    def from_map(cls, domain: Iterable[str], mapping: Mapping[str, int],
                 default: int) -> "FuzzySet":
        domain = tuple(domain)
        return cls(domain, [mapping.get(w, default) for w in domain])

    @classmethod
    def singleton(cls, domain: Iterable[str], member: str, alpha: int,
                  bot: int) -> "FuzzySet":
        domain = tuple(domain)
        codes = np.full(len(domain), bot, dtype=np.int64)
        codes[domain.index(member)] = alpha
        return cls(domain, codes)

    def degree(self, member: str) -> int:
        return int(self.codes[self.domain.index(member)])

    def as_dict(self) -> dict[str, int]:
        return {w: int(v) for w, v in zip(self.domain, self.codes)}

    def issubset(self, other: "FuzzySet", alg: Algebra) -> bool:
        return bool(alg.vle(self.codes, other.codes).all())

    def __eq__(self, other) -> bool:
        return (isinstance(other, FuzzySet) and self.domain == other.domain
                and np.array_equal(self.codes, other.codes))

    def __hash__(self) -> int:
        return hash((self.domain, self.codes.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{w}:{v}" for w, v in zip(self.domain, self.codes))
        return f"FuzzySet({body})"


@dataclass(frozen=True, eq=False)
class FuzzyConcept:
    """A Galois-stable (extent, intent) pair."""

    extent: FuzzySet
    intent: FuzzySet

    def __eq__(self, other) -> bool:
        return (isinstance(other, FuzzyConcept)
                and self.extent == other.extent and self.intent == other.intent)

    def __hash__(self) -> int:
        return hash((self.extent, self.intent))


def r1(alg: Algebra, rel: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Forward Galois image: x |-> meet over a of f(a) -> rel(a, x)."""
    if rel.shape[0] != f.shape[0]:
        raise FcaError("sort mismatch: set domain does not match relation rows")
    return alg.meet_reduce(alg.vimp(f[:, None], rel), axis=0)


def r0(alg: Algebra, rel: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Backward Galois image: a |-> meet over x of u(x) -> rel(a, x)."""
    if rel.shape[1] != u.shape[0]:
        raise FcaError("sort mismatch: set domain does not match relation columns")
    return alg.meet_reduce(alg.vimp(u[None, :], rel), axis=1)


class Context:
    """An enriched many-valued formal context."""

    def __init__(self, algebra: Algebra, objects: Iterable[str],
                 features: Iterable[str], incidence,
                 box: Optional[Mapping[str, np.ndarray]] = None,
                 dia: Optional[Mapping[str, np.ndarray]] = None):
        self.algebra = algebra
        self.objects: tuple[str, ...] = tuple(objects)
        self.features: tuple[str, ...] = tuple(features)
        self.incidence = self._as_matrix(incidence, len(self.objects),
                                         len(self.features), "I")
        self.box: dict[str, np.ndarray] = {
            name: self._as_matrix(m, len(self.objects), len(self.features), name)
            for name, m in (box or {}).items()}
        self.dia: dict[str, np.ndarray] = {
            name: self._as_matrix(m, len(self.features), len(self.objects), name)
            for name, m in (dia or {}).items()}
        self._obj_index = {w: i for i, w in enumerate(self.objects)}
        self._feat_index = {w: i for i, w in enumerate(self.features)}

    @staticmethod
    def _as_matrix(m, rows: int, cols: int, name: str) -> np.ndarray:
        arr = np.asarray(m, dtype=np.int64)
        if arr.shape != (rows, cols):
            raise FcaError(f"relation {name} has shape {arr.shape}, "
                           f"expected {(rows, cols)}")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        return arr

    def obj_index(self, name: str) -> int:
        try:
            return self._obj_index[name]
        except KeyError:
            raise FcaError(f"unknown object {name!r}") from None

    def feat_index(self, name: str) -> int:
        try:
            return self._feat_index[name]
        except KeyError:
            raise FcaError(f"unknown feature {name!r}") from None

    def relation(self, name: str) -> np.ndarray:
        if name == "I":
            return self.incidence
        if name in self.box:
            return self.box[name]
        if name in self.dia:
            return self.dia[name]
        raise FcaError(f"unknown relation {name!r}")

    # -- Galois maps of the incidence relation ------------------------------

    def up(self, f) -> np.ndarray:
        return r1(self.algebra, self.incidence, _codes(f))

    def down(self, u) -> np.ndarray:
        return r0(self.algebra, self.incidence, _codes(u))

    def object_set(self, codes) -> FuzzySet:
        return FuzzySet(self.objects, codes)

    def feature_set(self, codes) -> FuzzySet:
        return FuzzySet(self.features, codes)

    def concept_from_extent(self, extent_codes) -> FuzzyConcept:
        intent = self.up(extent_codes)
        return FuzzyConcept(self.object_set(self.down(intent)),
                            self.feature_set(intent))

    def concept_from_intent(self, intent_codes) -> FuzzyConcept:
        extent = self.down(intent_codes)
        return FuzzyConcept(self.object_set(extent),
                            self.feature_set(self.up(extent)))


def _codes(s) -> np.ndarray:
    return s.codes if isinstance(s, FuzzySet) else np.asarray(s, dtype=np.int64)


def is_stable(s: FuzzySet, side: str, ctx: Context) -> bool:
    """True when the set is a fixpoint of the Galois round trip."""
    if side == "object":
        return bool(np.array_equal(ctx.down(ctx.up(s)), _codes(s)))
    if side == "feature":
        return bool(np.array_equal(ctx.up(ctx.down(s)), _codes(s)))
    raise FcaError(f"side must be 'object' or 'feature', got {side!r}")


def enumerate_concepts(ctx: Context, cap: int = 10000) -> list[FuzzyConcept]:
    """All fuzzy formal concepts, ordered by descending extent (lexicographic).

    Every stable extent is a pointwise meet of singleton closures
    {alpha/x}^down, so closing that seed family under pointwise meet yields
    exactly the extent lattice.
    """
    alg = ctx.algebra
    n_obj = len(ctx.objects)
    seeds = {tuple(np.full(n_obj, alg.top, dtype=np.int64))}
    for j in range(len(ctx.features)):
        col = ctx.incidence[:, j]
        for alpha in alg.elements:
            seeds.add(tuple(alg.vimp(np.int64(alpha), col)))
    extents = set(seeds)
    frontier = list(seeds)
    while frontier:
        if len(extents) > cap:
            raise ConceptCapError(cap)
        nxt = []
        for f in frontier:
            fa = np.asarray(f, dtype=np.int64)
            for g in list(extents):
                h = tuple(alg.vmeet(fa, np.asarray(g, dtype=np.int64)))
                if h not in extents:
                    extents.add(h)
                    nxt.append(h)
        frontier = nxt
    if len(extents) > cap:
        raise ConceptCapError(cap)
    ordered = sorted(extents, reverse=True)
    out = []
    for ext in ordered:
        codes = np.asarray(ext, dtype=np.int64)
        out.append(FuzzyConcept(ctx.object_set(codes),
                                ctx.feature_set(ctx.up(codes))))
    return out


def concept_le(alg: Algebra, c: FuzzyConcept, d: FuzzyConcept) -> bool:
    return c.extent.issubset(d.extent, alg)


def concept_meet(ctx: Context, c: FuzzyConcept, d: FuzzyConcept) -> FuzzyConcept:
    ext = ctx.algebra.vmeet(c.extent.codes, d.extent.codes)
    return FuzzyConcept(ctx.object_set(ext), ctx.feature_set(ctx.up(ext)))


def concept_join(ctx: Context, c: FuzzyConcept, d: FuzzyConcept) -> FuzzyConcept:
    intent = ctx.algebra.vmeet(c.intent.codes, d.intent.codes)
    return FuzzyConcept(ctx.object_set(ctx.down(intent)),
                        ctx.feature_set(intent))


def hasse_edges(alg: Algebra, concepts: list[FuzzyConcept]) -> list[tuple[int, int]]:
    """Cover pairs (lower index, upper index) of the concept order."""
    n = len(concepts)
    le = [[concept_le(alg, concepts[i], concepts[j]) for j in range(n)]
          for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j or not le[i][j] or le[j][i]:
                continue
            if not any(k != i and k != j and le[i][k] and le[k][j]
                       and not le[k][i] and not le[j][k] for k in range(n)):
                edges.append((i, j))
    return edges


def box_op(ctx: Context, role: str, c: FuzzyConcept) -> FuzzyConcept:
    """Complex-algebra box image: (R0[intent], up(R0[intent]))."""
    if role not in ctx.box:
        raise FcaError(f"unknown box relation {role!r}")
    ext = r0(ctx.algebra, ctx.box[role], c.intent.codes)
    return FuzzyConcept(ctx.object_set(ext), ctx.feature_set(ctx.up(ext)))


def dia_op(ctx: Context, role: str, c: FuzzyConcept) -> FuzzyConcept:
    """Complex-algebra diamond image: (down(R0[extent]), R0[extent])."""
    if role not in ctx.dia:
        raise FcaError(f"unknown diamond relation {role!r}")
    intent = r0(ctx.algebra, ctx.dia[role], c.extent.codes)
    return FuzzyConcept(ctx.object_set(ctx.down(intent)),
                        ctx.feature_set(intent))


@dataclass
class CompatibilityIssue:
    relation: str
    alpha: int
    individual: str
    family: str
    found: FuzzySet
    closure: FuzzySet


@dataclass
class CompatibilityReport:
    ok: bool
    issues: list[CompatibilityIssue] = field(default_factory=list)

    @property
    def first(self) -> Optional[CompatibilityIssue]:
        return self.issues[0] if self.issues else None


def check_compatibility(ctx: Context, first_only: bool = False) -> CompatibilityReport:
    """Check Galois stability of the four singleton-image families.

    For a box relation R these are R0[{a/x}] and R1[{a/a0}]; for a diamond
    relation, R0[{a/a0}] and R1[{a/x}].  Quantifies over every element of the
    algebra and every individual, exactly the finite condition.
    """
    alg = ctx.algebra
    issues: list[CompatibilityIssue] = []
    alphas = np.arange(len(alg), dtype=np.int64)

    def scan(rel_name: str, rel: np.ndarray, family: str,
             singleton_names: tuple[str, ...], set_domain: tuple[str, ...]) -> bool:
        # r0 takes singletons over columns to sets over rows; r1 is the dual
        if family == "r0":
            sets = alg.vimp(alphas[:, None, None], rel.T[None, :, :])
        else:
            sets = alg.vimp(alphas[:, None, None], rel[None, :, :])
        n_alpha, n_sing, set_len = sets.shape
        flat = sets.reshape(n_alpha * n_sing, set_len)
        if set_domain is ctx.objects:
            closed = _close_objects(ctx, flat)
        else:
            closed = _close_features(ctx, flat)
        bad = ~(closed == flat).all(axis=1)
        for idx in np.flatnonzero(bad):
            ai, si = divmod(int(idx), n_sing)
            issues.append(CompatibilityIssue(
                rel_name, int(alphas[ai]), singleton_names[si], family,
                FuzzySet(set_domain, flat[idx]), FuzzySet(set_domain, closed[idx])))
            if first_only:
                return True
        return bool(bad.any())

    for name, rel in ctx.box.items():
        # rel: objects x features; r0 maps feature singletons to object sets
        if scan(name, rel, "r0", ctx.features, ctx.objects) and first_only:
            return CompatibilityReport(False, issues)
        if scan(name, rel, "r1", ctx.objects, ctx.features) and first_only:
            return CompatibilityReport(False, issues)
    for name, rel in ctx.dia.items():
        # rel: features x objects; r0 maps object singletons to feature sets
        if scan(name, rel, "r0", ctx.objects, ctx.features) and first_only:
            return CompatibilityReport(False, issues)
        if scan(name, rel, "r1", ctx.features, ctx.objects) and first_only:
            return CompatibilityReport(False, issues)
    return CompatibilityReport(not issues, issues)


def _close_objects(ctx: Context, sets: np.ndarray) -> np.ndarray:
    """Round-trip closure for a batch of object-side sets (rows)."""
    alg = ctx.algebra
    rel = ctx.incidence
    ups = alg.meet_reduce(alg.vimp(sets[:, :, None], rel[None, :, :]), axis=1)
    return alg.meet_reduce(alg.vimp(ups[:, None, :], rel[None, :, :]), axis=2)


def _close_features(ctx: Context, sets: np.ndarray) -> np.ndarray:
    """Round-trip closure for a batch of feature-side sets (rows)."""
    alg = ctx.algebra
    rel = ctx.incidence
    downs = alg.meet_reduce(alg.vimp(sets[:, None, :], rel[None, :, :]), axis=2)
    return alg.meet_reduce(alg.vimp(downs[:, :, None], rel[None, :, :]), axis=1)


# -- interpretations and model checking -------------------------------------


@dataclass
class Interpretation:
    """A context plus denotations for primitive concepts and individuals.

    The stability of the primitive images is checkable (via
    :func:`check_interpretation`), not assumed, so published tables can be
    loaded verbatim and then audited.
    """

    context: Context
    primitives: dict[str, FuzzyConcept]
    individuals: dict[str, str]

    def element_of(self, name: str) -> str:
        try:
            return self.individuals[name]
        except KeyError:
            raise FcaError(f"individual {name!r} is not interpreted") from None


@dataclass
class InterpretationIssue:
    kind: str
    subject: str
    detail: str


def check_interpretation(interp: Interpretation) -> list[InterpretationIssue]:
    """Audit the Interpretation invariants: stable primitives, sorted individuals."""
    issues = []
    ctx = interp.context
    for name, concept in sorted(interp.primitives.items()):
        if not is_stable(concept.extent, "object", ctx) or \
                ctx.feature_set(ctx.up(concept.extent)) != concept.intent:
            issues.append(InterpretationIssue(
                "unstable-primitive", name,
                "extent/intent pair is not a Galois-stable concept"))
    for name, element in sorted(interp.individuals.items()):
        if element not in ctx._obj_index and element not in ctx._feat_index:
            issues.append(InterpretationIssue(
                "unbound-individual", name,
                f"maps to {element!r}, which is not in the context"))
    return issues


def eval_concept(interp: Interpretation, concept: syntax.Concept,
                 _memo: Optional[dict] = None) -> FuzzyConcept:
    """Evaluate a concept in the complex algebra of the interpretation."""
    if _memo is None:
        _memo = {}
    hit = _memo.get(concept)
    if hit is not None:
        return hit
    ctx = interp.context
    if isinstance(concept, syntax.Prim):
        try:
            out = interp.primitives[concept.name]
        except KeyError:
            raise FcaError(f"unbound primitive concept {concept.name!r}") from None
    elif isinstance(concept, syntax.And):
        out = concept_meet(ctx, eval_concept(interp, concept.left, _memo),
                           eval_concept(interp, concept.right, _memo))
    elif isinstance(concept, syntax.Or):
        out = concept_join(ctx, eval_concept(interp, concept.left, _memo),
                           eval_concept(interp, concept.right, _memo))
    elif isinstance(concept, syntax.Box):
        out = box_op(ctx, concept.role, eval_concept(interp, concept.arg, _memo))
    elif isinstance(concept, syntax.Dia):
        out = dia_op(ctx, concept.role, eval_concept(interp, concept.arg, _memo))
    else:
        raise FcaError(f"not a concept: {concept!r}")
    _memo[concept] = out
    return out


def membership_degree(interp: Interpretation, obj: str,
                      concept: syntax.Concept) -> int:
    """Degree to which the object belongs to the concept's extent."""
    c = eval_concept(interp, concept)
    return int(c.extent.codes[interp.context.obj_index(interp.element_of(obj))])


def description_degree(interp: Interpretation, feat: str,
                       concept: syntax.Concept) -> int:
    """Degree to which the feature describes the concept."""
    c = eval_concept(interp, concept)
    return int(c.intent.codes[interp.context.feat_index(interp.element_of(feat))])


def valuation(interp: Interpretation, term: syntax.ABoxTerm,
              _memo: Optional[dict] = None) -> int:
    """The algebra value of an ABox term in the interpretation."""
    ctx = interp.context
    if isinstance(term, syntax.Member):
        c = eval_concept(interp, term.concept, _memo)
        return int(c.extent.codes[ctx.obj_index(interp.element_of(term.obj))])
    if isinstance(term, syntax.Describes):
        c = eval_concept(interp, term.concept, _memo)
        return int(c.intent.codes[ctx.feat_index(interp.element_of(term.feat))])
    if isinstance(term, syntax.Inc):
        a = ctx.obj_index(interp.element_of(term.obj))
        x = ctx.feat_index(interp.element_of(term.feat))
        return int(ctx.incidence[a, x])
    if isinstance(term, syntax.BoxRel):
        a = ctx.obj_index(interp.element_of(term.obj))
        x = ctx.feat_index(interp.element_of(term.feat))
        return int(ctx.box[term.role][a, x])
    if isinstance(term, syntax.DiaRel):
        x = ctx.feat_index(interp.element_of(term.feat))
        a = ctx.obj_index(interp.element_of(term.obj))
        return int(ctx.dia[term.role][x, a])
    raise FcaError(f"not an ABox term: {term!r}")


def check_assertion(interp: Interpretation, assertion: syntax.Assertion,
                    _memo: Optional[dict] = None) -> bool:
    value = valuation(interp, assertion.term, _memo)
    holds = interp.context.algebra.le(assertion.bound, value)
    return holds if assertion.positive else not holds


@dataclass
class KbCheckFailure:
    kind: str   # "abox" or "tbox"
    text: str
    detail: str


@dataclass
class KbCheckReport:
    ok: bool
    failures: list[KbCheckFailure] = field(default_factory=list)
    checked: int = 0


def check_kb(interp: Interpretation, kb: "syntax.KnowledgeBase") -> KbCheckReport:
    """Check every ABox assertion and TBox axiom, reporting each failure."""
    memo: dict = {}
    failures = []
    checked = 0
    for assertion in kb.abox:
        checked += 1
        if not check_assertion(interp, assertion, memo):
            value = valuation(interp, assertion.term, memo)
            failures.append(KbCheckFailure(
                "abox", syntax.assertion_text(assertion, kb.algebra),
                f"term evaluates to {kb.algebra.render(value)}"))
    for axiom in kb.tbox:
        checked += 1
        left = eval_concept(interp, axiom.left, memo)
        right = eval_concept(interp, axiom.right, memo)
        if left != right:
            failures.append(KbCheckFailure(
                "tbox", syntax.axiom_text(axiom),
                "the two sides evaluate to different concepts"))
    return KbCheckReport(not failures, failures, checked)
