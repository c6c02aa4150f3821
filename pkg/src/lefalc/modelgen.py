"""Model extraction from clash-free completions, and its verification.

The extracted context takes every relation value from the stored positive
bound of the corresponding relational term (absent means bottom), adds the
reserved elements ``_atop`` and ``_xbot`` with all-bottom rows, and maps each
primitive concept D to the pair (down of the x_D singleton, up of the a_D
singleton).  Defined concept names from the original TBox are mapped to the
evaluation of their unraveled definitions, so the original knowledge base can
be model checked directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fca, syntax, unravel
from .fca import Context, FuzzyConcept, Interpretation
from .syntax import BoxRel, Concept, DiaRel, Inc, KnowledgeBase, Prim
from .tableau import (FEAT, OBJ, Classifier, Constant, Named, TableauState,
                      constant_side, constant_text, term_text)

RESERVED_TOP_OBJECT = "_atop"
RESERVED_BOT_FEATURE = "_xbot"


class ModelgenError(ValueError):
    pass


@dataclass
class ExtractedModel:
    interpretation: Interpretation
    name_of: dict[Constant, str]
    constant_of: dict[str, Constant]
    legend: dict[str, str]
    occurrence: tuple[Concept, ...]

    @property
    def context(self) -> Context:
        return self.interpretation.context


def model_size(model: ExtractedModel) -> int:
    """|A| + |X| + total relation entries; the finite-model-property measure."""
    ctx = model.context
    cells = ctx.incidence.size
    for rel in ctx.box.values():
        cells += rel.size
    for rel in ctx.dia.values():
        cells += rel.size
    return len(ctx.objects) + len(ctx.features) + cells


def _names_for(state: TableauState) -> dict[Constant, str]:
    names: dict[Constant, str] = {}
    counters = {OBJ: 0, FEAT: 0}
    for const in state.constants:
        if isinstance(const, Named):
            names[const] = const.name
        else:
            side = constant_side(const)
            counters[side] += 1
            prefix = "_a" if side == OBJ else "_x"
            names[const] = f"{prefix}{counters[side]}"
    return names


def extract_model(state: TableauState, original: KnowledgeBase) -> ExtractedModel:
    """Build the interpretation determined by a clash-free completion."""
    if state.clash is not None:
        raise ModelgenError("cannot extract a model from a clashed completion")
    kb = state.kb
    alg = state.algebra
    name_of = _names_for(state)
    objects = [c for c in state.constants if constant_side(c) == OBJ]
    features = [c for c in state.constants if constant_side(c) == FEAT]
    obj_names = [name_of[c] for c in objects] + [RESERVED_TOP_OBJECT]
    feat_names = [name_of[c] for c in features] + [RESERVED_BOT_FEATURE]

    n_obj, n_feat = len(obj_names), len(feat_names)
    incidence = np.full((n_obj, n_feat), alg.bot, dtype=np.int64)
    box = {r: np.full((n_obj, n_feat), alg.bot, dtype=np.int64)
           for r in kb.box_roles}
    dia = {r: np.full((n_feat, n_obj), alg.bot, dtype=np.int64)
           for r in kb.dia_roles}
    obj_at = {c: i for i, c in enumerate(objects)}
    feat_at = {c: i for i, c in enumerate(features)}
    for term, bound in state.pos.items():
        if isinstance(term, Inc):
            incidence[obj_at[term.obj], feat_at[term.feat]] = bound
        elif isinstance(term, BoxRel):
            box[term.role][obj_at[term.obj], feat_at[term.feat]] = bound
        elif isinstance(term, DiaRel):
            dia[term.role][feat_at[term.feat], obj_at[term.obj]] = bound

    ctx = Context(alg, obj_names, feat_names, incidence, box=box, dia=dia)

    defined = unravel.expanded_definitions(original.tbox)
    primitives: dict[str, FuzzyConcept] = {}
    occurring_prims = {c.name for c in state.occurrence if isinstance(c, Prim)}
    bottom_concept: Optional[FuzzyConcept] = None
    for name in original.concept_names:
        if name in defined:
            continue
        if name in occurring_prims:
            x_d = name_of[Classifier(Prim(name), FEAT)]
            a_d = name_of[Classifier(Prim(name), OBJ)]
            extent = ctx.down(fca.FuzzySet.singleton(
                feat_names, x_d, alg.top, alg.bot))
            intent = ctx.up(fca.FuzzySet.singleton(
                obj_names, a_d, alg.top, alg.bot))
            primitives[name] = FuzzyConcept(ctx.object_set(extent),
                                            ctx.feature_set(intent))
        else:
            # declared but not occurring: the bottom concept keeps the map total
            if bottom_concept is None:
                intent = np.full(n_feat, alg.top, dtype=np.int64)
                bottom_concept = FuzzyConcept(ctx.object_set(ctx.down(intent)),
                                              ctx.feature_set(intent))
            primitives[name] = bottom_concept

    individuals = {name_of[c]: name_of[c] for c in state.constants}
    for c in state.constants:
        if isinstance(c, Named):
            individuals[c.name] = name_of[c]

    interp = Interpretation(ctx, primitives, individuals)
    # defined names evaluate their unraveled bodies, making the original
    # TBox checkable against the model
    memo: dict = {}
    for name, body in defined.items():
        primitives[name] = fca.eval_concept(interp, body, memo)

    legend = {name_of[c]: constant_text(c) for c in state.constants}
    return ExtractedModel(interp, name_of, {v: k for k, v in name_of.items()},
                          legend, state.occurrence)


# -- verification ---------------------------------------------------------------


@dataclass
class SoundnessCheck:
    name: str
    ok: bool
    failures: list[str] = field(default_factory=list)


@dataclass
class SoundnessReport:
    checks: list[SoundnessCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> SoundnessCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_soundness(model: ExtractedModel, original: KnowledgeBase,
                     state: TableauState,
                     max_failures: int = 20) -> SoundnessReport:
    """The four checks that make the extraction a model of the input.

    (i) the original knowledge base holds; (ii) all relations are
    I-compatible; (iii) classifier singletons of primitives close onto each
    other; (iv) every occurring concept is classified by its constants: the
    evaluated extent/intent equals the stored incidence bound at x_C / a_C.
    The reserved elements are exercised by (i)-(iii) but quantified out of
    (iv), which speaks only about completion constants.
    """
    interp = model.interpretation
    ctx = model.context
    alg = ctx.algebra

    kb_report = fca.check_kb(interp, original)
    check_i = SoundnessCheck(
        "kb", kb_report.ok,
        [f"{f.kind}: {f.text}: {f.detail}" for f in kb_report.failures])

    compat = fca.check_compatibility(ctx)
    check_ii = SoundnessCheck(
        "compatibility", compat.ok,
        [f"{i.relation}: {i.family} singleton {i.alpha} at {i.individual} "
         f"is not Galois-stable" for i in compat.issues[:max_failures]])

    failures_iii: list[str] = []
    for concept in model.occurrence:
        if not isinstance(concept, Prim):
            continue
        x_d = model.name_of[Classifier(concept, FEAT)]
        a_d = model.name_of[Classifier(concept, OBJ)]
        x_sing = fca.FuzzySet.singleton(ctx.features, x_d, alg.top, alg.bot)
        a_sing = fca.FuzzySet.singleton(ctx.objects, a_d, alg.top, alg.bot)
        down_x = ctx.down(x_sing)
        up_a = ctx.up(a_sing)
        if not np.array_equal(ctx.up(down_x), up_a):
            failures_iii.append(f"{concept.name}: up(down(x_D)) != up(a_D)")
        if not np.array_equal(ctx.down(up_a), down_x):
            failures_iii.append(f"{concept.name}: down(up(a_D)) != down(x_D)")
    check_iii = SoundnessCheck("atomic-stability", not failures_iii,
                               failures_iii[:max_failures])

    failures_iv: list[str] = []
    memo: dict = {}
    obj_keep = [i for i, name in enumerate(ctx.objects)
                if name != RESERVED_TOP_OBJECT]
    feat_keep = [i for i, name in enumerate(ctx.features)
                 if name != RESERVED_BOT_FEATURE]
    for concept in model.occurrence:
        evaluated = fca.eval_concept(interp, concept, memo)
        x_c = ctx.feat_index(model.name_of[Classifier(concept, FEAT)])
        a_c = ctx.obj_index(model.name_of[Classifier(concept, OBJ)])
        extent_stored = ctx.incidence[obj_keep, x_c]
        intent_stored = ctx.incidence[a_c, feat_keep]
        ext = evaluated.extent.codes[obj_keep]
        intent = evaluated.intent.codes[feat_keep]
        if not np.array_equal(ext, extent_stored):
            bad = int(np.flatnonzero(ext != extent_stored)[0])
            name = ctx.objects[obj_keep[bad]]
            failures_iv.append(
                f"extent of {syntax.concept_text(concept)} at {name}: "
                f"evaluated {alg.render(int(ext[bad]))}, stored "
                f"{alg.render(int(extent_stored[bad]))}")
        if not np.array_equal(intent, intent_stored):
            bad = int(np.flatnonzero(intent != intent_stored)[0])
            name = ctx.features[feat_keep[bad]]
            failures_iv.append(
                f"intent of {syntax.concept_text(concept)} at {name}: "
                f"evaluated {alg.render(int(intent[bad]))}, stored "
                f"{alg.render(int(intent_stored[bad]))}")
        if len(failures_iv) >= max_failures:
            break
    check_iv = SoundnessCheck("classifying", not failures_iv, failures_iv)

    return SoundnessReport([check_i, check_ii, check_iii, check_iv])
