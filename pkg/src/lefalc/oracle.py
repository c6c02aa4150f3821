"""Brute-force ground truth: exhaustive model search at desk scale.

The search enumerates interpretation skeletons in a fixed canonical order
(domain sizes ascending, the incidence matrix lexicographic cell-major, then
relation matrices for the occurring roles in declaration order, then
primitive-concept assignments over stable extents, then individual maps) and
returns the first satisfying interpretation, or "none-within-bounds".

The satisfaction logic here is written directly from the defining clauses on
raw arrays and shares nothing with the engine's evaluation path, so agreement
between the two is evidence, not circularity.

Two exactness-preserving accelerations keep desk scale honest:

* the existence scan runs over orbit representatives of the incidence matrix
  under row/column permutations (a model transported along a permutation is
  still a model, and all relations, assignments and maps are enumerated per
  representative); once existence is known, the canonical-first witness is
  located by a full-order scan;
* relation candidates come from per-cell allowed-value sets implied by the
  box-membership / diamond-description assertions (their value clause is a
  big meet, so a positive bound constrains each cell independently), then
  pass I-compatibility and the remaining assertions.

Roles declared but never used by the ABox take the canonical compatible
defaults (the incidence matrix for box roles, its transpose for diamond
roles) instead of being enumerated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations, product
from math import prod
from typing import Optional

import numpy as np

from . import fca, unravel
from .heyting import Algebra
from .syntax import (And, Assertion, Box, BoxRel, Concept, Describes, Dia,
                     DiaRel, Inc, KnowledgeBase, Member, Or, Prim)

DEFAULT_BUDGET = 200_000_000


class OracleError(ValueError):
    pass


class BudgetExceededError(OracleError):
    def __init__(self, needed: int, budget: int):
        super().__init__(
            f"oracle search needs about {needed} candidate evaluations, "
            f"over the budget of {budget}")
        self.needed = needed
        self.budget = budget


@dataclass
class OracleStats:
    worlds: int
    elapsed: float


@dataclass
class OracleResult:
    status: str  # "model" or "none-within-bounds"
    interpretation: Optional[fca.Interpretation]
    stats: OracleStats

    @property
    def found(self) -> bool:
        return self.status == "model"


# -- independent semantic evaluation on raw arrays ---------------------------


def _up(alg: Algebra, inc: np.ndarray, f: np.ndarray) -> np.ndarray:
    """x |-> meet over a of f(a) -> I(a, x); leading axes broadcast."""
    return alg.meet_reduce(alg.vimp(f[..., :, None], inc), axis=-2)


def _down(alg: Algebra, inc: np.ndarray, u: np.ndarray) -> np.ndarray:
    """a |-> meet over x of u(x) -> I(a, x); leading axes broadcast."""
    return alg.meet_reduce(alg.vimp(u[..., None, :], inc), axis=-1)


def concept_arrays(alg, inc, box_rel, dia_rel, concept, prim_ext, memo=None):
    """(extent, intent) arrays for a concept, straight from the clauses.

    ``box_rel[r]`` is objects x features, ``dia_rel[r]`` features x objects;
    matrices and primitive extents may share leading batch axes.
    """
    if memo is None:
        memo = {}
    hit = memo.get(concept)
    if hit is not None:
        return hit
    if isinstance(concept, Prim):
        ext = prim_ext[concept.name]
        out = (ext, _up(alg, inc, ext))
    elif isinstance(concept, And):
        le, _ = concept_arrays(alg, inc, box_rel, dia_rel, concept.left,
                               prim_ext, memo)
        re_, _ = concept_arrays(alg, inc, box_rel, dia_rel, concept.right,
                                prim_ext, memo)
        ext = alg.vmeet(le, re_)
        out = (ext, _up(alg, inc, ext))
    elif isinstance(concept, Or):
        _, lu = concept_arrays(alg, inc, box_rel, dia_rel, concept.left,
                               prim_ext, memo)
        _, ru = concept_arrays(alg, inc, box_rel, dia_rel, concept.right,
                               prim_ext, memo)
        intent = alg.vmeet(lu, ru)
        out = (_down(alg, inc, intent), intent)
    elif isinstance(concept, Box):
        _, u = concept_arrays(alg, inc, box_rel, dia_rel, concept.arg,
                              prim_ext, memo)
        ext = _down(alg, box_rel[concept.role], u)
        out = (ext, _up(alg, inc, ext))
    elif isinstance(concept, Dia):
        f, _ = concept_arrays(alg, inc, box_rel, dia_rel, concept.arg,
                              prim_ext, memo)
        intent = alg.meet_reduce(
            alg.vimp(f[..., None, :], dia_rel[concept.role]), axis=-1)
        out = (_down(alg, inc, intent), intent)
    else:
        raise OracleError(f"not a concept: {concept!r}")
    memo[concept] = out
    return out


def term_value(alg, inc, box_rel, dia_rel, prim_ext, obj_map, feat_map, term,
               memo=None):
    """Term valuation; leading batch axes pass through."""
    if isinstance(term, Member):
        ext, _ = concept_arrays(alg, inc, box_rel, dia_rel, term.concept,
                                prim_ext, memo)
        return ext[..., obj_map[term.obj]]
    if isinstance(term, Describes):
        _, intent = concept_arrays(alg, inc, box_rel, dia_rel, term.concept,
                                   prim_ext, memo)
        return intent[..., feat_map[term.feat]]
    if isinstance(term, Inc):
        return inc[..., obj_map[term.obj], feat_map[term.feat]]
    if isinstance(term, BoxRel):
        return box_rel[term.role][..., obj_map[term.obj], feat_map[term.feat]]
    if isinstance(term, DiaRel):
        return dia_rel[term.role][..., feat_map[term.feat], obj_map[term.obj]]
    raise OracleError(f"not an ABox term: {term!r}")


# -- enumeration helpers -------------------------------------------------------


def _all_vectors(h: int, length: int) -> np.ndarray:
    """All base-h vectors of the given length, lexicographic, first cell most
    significant."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    count = h ** length
    idx = np.arange(count, dtype=np.int64)
    cols = [(idx // (h ** (length - 1 - k))) % h for k in range(length)]
    return np.stack(cols, axis=1)


def _pack(vectors: np.ndarray, h: int) -> np.ndarray:
    length = vectors.shape[-1]
    weights = h ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return vectors @ weights


def _canonical_mask(mats: np.ndarray, h: int) -> np.ndarray:
    """Mask of matrices lex-minimal in their row/column permutation orbit."""
    count, rows, cols = mats.shape
    weights = h ** np.arange(rows * cols - 1, -1, -1, dtype=np.int64)
    packed = mats.reshape(count, -1) @ weights
    best = packed.copy()
    for pr in permutations(range(rows)):
        for pc in permutations(range(cols)):
            view = mats[:, pr, :][:, :, pc].reshape(count, -1) @ weights
            np.minimum(best, view, out=best)
    return best == packed


def _mentions_roles(c: Concept) -> bool:
    if isinstance(c, Prim):
        return False
    if isinstance(c, (And, Or)):
        return _mentions_roles(c.left) or _mentions_roles(c.right)
    return True


def _assertion_mentions_roles(a: Assertion) -> bool:
    t = a.term
    if isinstance(t, (BoxRel, DiaRel)):
        return True
    if isinstance(t, (Member, Describes)):
        return _mentions_roles(t.concept)
    return False


def _roles_of(a: Assertion) -> frozenset:
    roles: set[str] = set()

    def walk(c: Concept):
        if isinstance(c, (And, Or)):
            walk(c.left)
            walk(c.right)
        elif isinstance(c, (Box, Dia)):
            roles.add(c.role)
            walk(c.arg)

    t = a.term
    if isinstance(t, (Member, Describes)):
        walk(t.concept)
    elif isinstance(t, BoxRel):
        roles.add(t.role)
    elif isinstance(t, DiaRel):
        roles.add(t.role)
    return frozenset(roles)


def _is_direct(a: Assertion) -> bool:
    """True when the assertion's value is a single row/cell formula of one
    relation matrix (no surrounding Galois closure, no nesting)."""
    t = a.term
    if isinstance(t, (BoxRel, DiaRel)):
        return True
    if isinstance(t, Member):
        return isinstance(t.concept, Box) and not _mentions_roles(t.concept.arg)
    if isinstance(t, Describes):
        return isinstance(t.concept, Dia) and not _mentions_roles(t.concept.arg)
    return False


def _signature(kb: KnowledgeBase):
    """Names, primitives and roles occurring in the (expanded) ABox."""
    objs: dict[str, None] = {}
    feats: dict[str, None] = {}
    prims: dict[str, None] = {}
    roles: set[str] = set()

    def walk(c: Concept):
        if isinstance(c, Prim):
            prims.setdefault(c.name)
        elif isinstance(c, (And, Or)):
            walk(c.left)
            walk(c.right)
        else:
            roles.add(c.role)
            walk(c.arg)

    for a in kb.abox:
        t = a.term
        if isinstance(t, Member):
            objs.setdefault(t.obj)
            walk(t.concept)
        elif isinstance(t, Describes):
            feats.setdefault(t.feat)
            walk(t.concept)
        else:
            objs.setdefault(t.obj)
            feats.setdefault(t.feat)
            if isinstance(t, (BoxRel, DiaRel)):
                roles.add(t.role)
    box_used = tuple(r for r in kb.box_roles if r in roles)
    dia_used = tuple(r for r in kb.dia_roles if r in roles)
    return tuple(objs), tuple(feats), tuple(prims), box_used, dia_used


# -- the search ------------------------------------------------------------------


def find_model(kb: KnowledgeBase, max_objects: int, max_features: int,
               budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exhaustive search for a model within the given domain bounds."""
    t0 = time.perf_counter()
    expanded = unravel.expand(kb)
    searcher = _Searcher(expanded, budget)
    for n_obj in range(1, max_objects + 1):
        for n_feat in range(1, max_features + 1):
            if searcher.search_size(n_obj, n_feat, existence_only=True):
                witness = searcher.search_size(n_obj, n_feat,
                                               existence_only=False)
                interp = searcher.build_interpretation(kb, witness)
                return OracleResult("model", interp, OracleStats(
                    searcher.worlds, time.perf_counter() - t0))
    return OracleResult("none-within-bounds", None,
                        OracleStats(searcher.worlds, time.perf_counter() - t0))


class _SizeLayout:
    """Enumeration frames shared by every incidence matrix of one size."""

    def __init__(self, searcher: "_Searcher", n_obj: int, n_feat: int):
        self.n_obj = n_obj
        self.n_feat = n_feat
        h = searcher.h
        self.searcher = searcher
        self.extents = _all_vectors(h, n_obj)
        self.intents = _all_vectors(h, n_feat)
        self.combos = _all_vectors(len(self.extents), len(searcher.prims))
        self.n_combo = len(self.combos)
        self.obj_maps = _all_vectors(n_obj, len(searcher.obj_names))
        self.feat_maps = _all_vectors(n_feat, len(searcher.feat_names))
        self._cands: dict[str, np.ndarray] = {}

    def role_cands(self, sort: str) -> np.ndarray:
        hit = self._cands.get(sort)
        if hit is None:
            h = self.searcher.h
            shape = (self.n_obj, self.n_feat) if sort == "box" else \
                (self.n_feat, self.n_obj)
            hit = _all_vectors(h, shape[0] * shape[1]).reshape(-1, *shape)
            self._cands[sort] = hit
        return hit


class _IncTables:
    """Per-incidence stability tables and stage-1 evaluation."""

    def __init__(self, searcher: "_Searcher", inc: np.ndarray,
                 layout: _SizeLayout):
        self.searcher = searcher
        self.alg = searcher.alg
        self.inc = inc
        self.layout = layout
        alg = self.alg
        ups = _up(alg, inc, layout.extents)
        self.ext_up = ups
        self.ext_stable = (_down(alg, inc, ups) == layout.extents).all(axis=1)
        downs = _down(alg, inc, layout.intents)
        self.int_stable = (_up(alg, inc, downs) == layout.intents).all(axis=1)
        self._memo: dict = {}
        self._compat_tables = None
        self._compat_full_cache: dict[str, object] = {}

    def ext_int(self, concept):
        """(extent, intent) arrays over all assignment combos, role-free only."""
        hit = self._memo.get(concept)
        if hit is not None:
            return hit
        alg = self.alg
        layout = self.layout
        if isinstance(concept, Prim):
            k = self.searcher.prims.index(concept.name)
            col = layout.combos[:, k]
            out = (layout.extents[col], self.ext_up[col])
        elif isinstance(concept, And):
            le, _ = self.ext_int(concept.left)
            re_, _ = self.ext_int(concept.right)
            ext = alg.vmeet(le, re_)
            out = (ext, _up(alg, self.inc, ext))
        elif isinstance(concept, Or):
            _, lu = self.ext_int(concept.left)
            _, ru = self.ext_int(concept.right)
            intent = alg.vmeet(lu, ru)
            out = (_down(alg, self.inc, intent), intent)
        else:
            raise OracleError("modal concept in the role-free stage")
        self._memo[concept] = out
        return out

    def stage1_valid(self, stage1) -> np.ndarray:
        alg = self.alg
        layout = self.layout
        searcher = self.searcher
        if layout.combos.shape[1]:
            combo_ok = self.ext_stable[layout.combos].all(axis=1)
        else:
            combo_ok = np.ones(1, dtype=bool)
        valid = np.ones((layout.n_combo, len(layout.obj_maps),
                         len(layout.feat_maps)), dtype=bool)
        valid &= combo_ok[:, None, None]
        for a in stage1:
            t = a.term
            if isinstance(t, Member):
                ext, _ = self.ext_int(t.concept)
                col = layout.obj_maps[:, searcher.obj_names.index(t.obj)]
                ok = alg.vle(a.bound, ext[:, col])
                valid &= (ok if a.positive else ~ok)[:, :, None]
            elif isinstance(t, Describes):
                _, intent = self.ext_int(t.concept)
                col = layout.feat_maps[:, searcher.feat_names.index(t.feat)]
                ok = alg.vle(a.bound, intent[:, col])
                valid &= (ok if a.positive else ~ok)[:, None, :]
            else:
                mo = layout.obj_maps[:, searcher.obj_names.index(t.obj)]
                mf = layout.feat_maps[:, searcher.feat_names.index(t.feat)]
                ok = alg.vle(a.bound, self.inc[mo[:, None], mf[None, :]])
                valid &= (ok if a.positive else ~ok)[None, :, :]
        return valid

    def compat_mask_for(self, sort: str, cand_mats: np.ndarray) -> np.ndarray:
        """I-compatibility: every alpha-shift of every row and column of the
        candidate must be Galois-stable on its side."""
        alg = self.alg
        h = self.searcher.h
        if self._compat_tables is None:
            ext_ok = np.zeros(h ** self.layout.n_obj, dtype=bool)
            ext_ok[_pack(self.layout.extents[self.ext_stable], h)] = True
            int_ok = np.zeros(h ** self.layout.n_feat, dtype=bool)
            int_ok[_pack(self.layout.intents[self.int_stable], h)] = True
            self._compat_tables = (ext_ok, int_ok)
        ext_ok, int_ok = self._compat_tables
        n = len(cand_mats)
        ok = np.ones(n, dtype=bool)
        for alpha in alg.elements:
            shifted = alg.vimp(np.int64(alpha), cand_mats)
            rows = _pack(shifted.reshape(n * shifted.shape[1],
                                         shifted.shape[2]), h) \
                .reshape(n, shifted.shape[1])
            cols = _pack(np.swapaxes(shifted, 1, 2).reshape(
                n * shifted.shape[2], shifted.shape[1]), h) \
                .reshape(n, shifted.shape[2])
            if sort == "box":
                ok &= int_ok[rows].all(axis=1) & ext_ok[cols].all(axis=1)
            else:
                ok &= ext_ok[rows].all(axis=1) & int_ok[cols].all(axis=1)
        return ok

    def compat_full(self, sort: str, cand_mats: np.ndarray) -> np.ndarray:
        """compat_mask_for over the full candidate space, cached per sort."""
        hit = self._compat_full_cache.get(sort)
        if hit is None:
            hit = self.compat_mask_for(sort, cand_mats)
            self._compat_full_cache[sort] = hit
        return hit


class _Searcher:
    def __init__(self, kb: KnowledgeBase, budget: int):
        self.kb = kb
        self.alg = kb.algebra
        self.h = len(self.alg)
        (self.obj_names, self.feat_names, self.prims,
         self.box_used, self.dia_used) = _signature(kb)
        self.roles = [(r, "box") for r in self.box_used] + \
                     [(r, "dia") for r in self.dia_used]
        self.budget = budget
        self.worlds = 0
        self.stage1 = [a for a in kb.abox if not _assertion_mentions_roles(a)]
        self.stage2 = [a for a in kb.abox if _assertion_mentions_roles(a)]
        self.stage2_direct = [a for a in self.stage2 if _is_direct(a)]
        self.stage2_complex = [a for a in self.stage2 if not _is_direct(a)]

    def charge(self, amount) -> None:
        self.worlds += int(amount)
        if self.worlds > self.budget:
            raise BudgetExceededError(self.worlds, self.budget)

    # .. per-size scan ........................................................

    def search_size(self, n_obj: int, n_feat: int, existence_only: bool):
        h = self.h
        cells = n_obj * n_feat
        mats = _all_vectors(h, cells).reshape(h ** cells, n_obj, n_feat)
        keep = np.flatnonzero(_canonical_mask(mats, h)) if existence_only \
            else np.arange(len(mats))
        layout = _SizeLayout(self, n_obj, n_feat)
        self.charge(len(keep) * layout.n_combo
                    * len(layout.obj_maps) * len(layout.feat_maps))
        for inc_idx in keep:
            hit = self._search_inc(mats[inc_idx], layout, existence_only)
            if hit is not None:
                return True if existence_only else (mats[inc_idx],) + hit
        return False if existence_only else None

    def _search_inc(self, inc, layout, existence_only):
        st = _IncTables(self, inc, layout)
        valid = st.stage1_valid(self.stage1)
        if not valid.any():
            return None
        if not self.roles:
            idx = np.argwhere(valid)[0]
            return (layout.combos[idx[0]], layout.obj_maps[idx[1]],
                    layout.feat_maps[idx[2]], ())
        return self._stage2(inc, layout, st, valid, existence_only)

    # .. stage 2: relation enumeration ........................................

    def _survivor_keys(self, layout, st, survivors):
        """Key matrix so that stage-2 satisfiability is constant per key."""
        if self.stage2_complex:
            return survivors  # no dedupe when the full evaluator is needed
        cols = []
        h = self.h
        for a in self.stage2:
            t = a.term
            if isinstance(t, BoxRel) or isinstance(t, DiaRel):
                cols.append(layout.obj_maps[survivors[:, 1],
                                            self.obj_names.index(t.obj)])
                cols.append(layout.feat_maps[survivors[:, 2],
                                             self.feat_names.index(t.feat)])
            elif isinstance(t, Member):
                _, intent = st.ext_int(t.concept.arg)
                cols.append(_pack(intent, h)[survivors[:, 0]])
                cols.append(layout.obj_maps[survivors[:, 1],
                                            self.obj_names.index(t.obj)])
            else:
                ext, _ = st.ext_int(t.concept.arg)
                cols.append(_pack(ext, h)[survivors[:, 0]])
                cols.append(layout.feat_maps[survivors[:, 2],
                                             self.feat_names.index(t.feat)])
        if not cols:
            return np.zeros((len(survivors), 1), dtype=np.int64)
        return np.stack(cols, axis=1)

    def _stage2(self, inc, layout, st, valid, existence_only):
        survivors = np.argwhere(valid)  # ascending (combo, mo, mf)
        keys = self._survivor_keys(layout, st, survivors)
        _, first_idx = np.unique(keys, axis=0, return_index=True)
        self.charge(len(first_idx))
        best = None
        for si in sorted(int(i) for i in first_idx):
            combo_i, mo_i, mf_i = (int(v) for v in survivors[si])
            hit_r = self._scan_roles(inc, layout, st, combo_i, mo_i, mf_i)
            if hit_r is None:
                continue
            if existence_only:
                return ((), (), (), ())
            cand = (hit_r, (combo_i, mo_i, mf_i))
            if best is None or cand < best:
                best = cand
        if best is None:
            return None
        rel_choice, (combo_i, mo_i, mf_i) = best
        h = self.h
        rels = []
        for (role, sort), packed in zip(self.roles, rel_choice):
            cands = layout.role_cands(sort)
            rels.append(cands[packed])
        return (layout.combos[combo_i], layout.obj_maps[mo_i],
                layout.feat_maps[mf_i], tuple(rels))

    def _scan_roles(self, inc, layout, st, combo_i, mo_i, mf_i):
        """Lex-first packed relation tuple satisfying compatibility and the
        role-involving assertions for one survivor, or None.

        Each role's full lex-ordered candidate space is scanned vectorized;
        positive direct assertions are up-set constraints per cell (residuals
        are monotone in the relation value), negatives and compatibility are
        boolean filters.  For the full enumeration the packed code of a
        candidate equals its index.
        """
        alg = self.alg
        obj_map = {name: int(layout.obj_maps[mo_i, k])
                   for k, name in enumerate(self.obj_names)}
        feat_map = {name: int(layout.feat_maps[mf_i, k])
                    for k, name in enumerate(self.feat_names)}

        per_role: list[tuple[np.ndarray, np.ndarray]] = []
        for role, sort in self.roles:
            cand = layout.role_cands(sort)
            mask = st.compat_full(sort, cand).copy()
            self.charge(len(cand) // 16 + 1)
            for a in self.stage2_direct:
                if _roles_of(a) != {role}:
                    continue
                spot = self._direct_spot(a, st, combo_i, obj_map, feat_map)
                vals = self._direct_values(spot, cand)
                ok = alg.vle(a.bound, vals)
                mask &= ok if a.positive else ~ok
                if not mask.any():
                    return None
            idx = np.flatnonzero(mask)
            per_role.append((cand, idx))

        if not self.stage2_complex:
            return tuple(int(p[1][0]) for p in per_role)

        self.charge(prod(len(p[1]) for p in per_role))
        prim_ext = {name: layout.extents[layout.combos[combo_i][k]]
                    for k, name in enumerate(self.prims)}
        for picks in product(*[p[1] for p in per_role]):
            box_rel = {}
            dia_rel = {}
            for (role, sort), pick in zip(self.roles, picks):
                (box_rel if sort == "box" else dia_rel)[role] = \
                    layout.role_cands(sort)[pick]
            memo: dict = {}
            ok = True
            for a in self.stage2_complex:
                v = int(term_value(alg, inc, box_rel, dia_rel, prim_ext,
                                   obj_map, feat_map, a.term, memo))
                if alg.le(a.bound, v) != a.positive:
                    ok = False
                    break
            if ok:
                return tuple(int(p) for p in picks)
        return None

    def _direct_spot(self, a: Assertion, st, combo_i, obj_map, feat_map):
        """Locate the row or cell a direct assertion talks about."""
        t = a.term
        if isinstance(t, BoxRel):
            return ("cell", (obj_map[t.obj], feat_map[t.feat]), None)
        if isinstance(t, DiaRel):
            return ("cell", (feat_map[t.feat], obj_map[t.obj]), None)
        if isinstance(t, Member):
            _, intent = st.ext_int(t.concept.arg)
            return ("row", obj_map[t.obj], intent[combo_i])
        ext, _ = st.ext_int(t.concept.arg)
        return ("row", feat_map[t.feat], ext[combo_i])

    def _direct_values(self, spot, cand_mats: np.ndarray) -> np.ndarray:
        alg = self.alg
        kind, where, vec = spot
        if kind == "cell":
            r, c = where
            return cand_mats[:, r, c]
        row = cand_mats[:, where, :]
        return alg.meet_reduce(alg.vimp(vec[None, :], row), axis=1)

    # .. witness assembly .....................................................

    def build_interpretation(self, original: KnowledgeBase, witness):
        inc, combo, obj_map_row, feat_map_row, rels = witness
        alg = self.alg
        n_obj, n_feat = inc.shape
        objects = tuple(f"o{i + 1}" for i in range(n_obj))
        features = tuple(f"f{i + 1}" for i in range(n_feat))
        box = {}
        dia = {}
        for (role, sort), mat in zip(self.roles, rels):
            (box if sort == "box" else dia)[role] = np.asarray(mat)
        for role in original.box_roles:
            box.setdefault(role, inc)
        for role in original.dia_roles:
            dia.setdefault(role, inc.T)
        ctx = fca.Context(alg, objects, features, inc, box=box, dia=dia)
        extents = _all_vectors(self.h, n_obj)
        primitives = {}
        for k, name in enumerate(self.prims):
            ext = extents[combo[k]]
            primitives[name] = fca.FuzzyConcept(
                ctx.object_set(ext), ctx.feature_set(ctx.up(ext)))
        defined = {ax.left.name for ax in original.tbox
                   if isinstance(ax.left, Prim)}
        bottom = None
        for name in original.concept_names:
            if name in primitives or name in defined:
                continue
            if bottom is None:
                intent = np.full(n_feat, alg.top, dtype=np.int64)
                bottom = fca.FuzzyConcept(ctx.object_set(ctx.down(intent)),
                                          ctx.feature_set(intent))
            primitives[name] = bottom
        individuals = {}
        for k, name in enumerate(self.obj_names):
            individuals[name] = objects[int(obj_map_row[k])]
        for k, name in enumerate(self.feat_names):
            individuals[name] = features[int(feat_map_row[k])]
        for name in original.objects:
            individuals.setdefault(name, objects[0])
        for name in original.features:
            individuals.setdefault(name, features[0])
        return fca.Interpretation(ctx, primitives, individuals)


# -- precomputed two-valued tiny-family search ---------------------------------


class TinyOracle:
    """Exhaustive (3,3)-bounded search over a fixed two-valued signature,
    precomputed once as satisfaction signatures.

    For the two-element algebra every term of the fixed signature evaluates
    to a single bit, so a whole interpretation collapses to one bit vector
    over the term list.  The constructor enumerates every interpretation
    skeleton within the bounds (per incidence orbit representative, which is
    exact because all relations, assignments and maps are enumerated per
    representative and permuting elements permutes nothing observable), and
    keeps the distinct bit vectors.  ``has_model`` is then a subset test.

    Equivalence with :func:`find_model` at the same bounds is a test-suite
    property, not an assumption.
    """

    def __init__(self, obj_names=("o1", "o2"), feat_names=("f1", "f2"),
                 prims=("D1", "D2"), box_role="R", max_obj=3, max_feat=3):
        if len(prims) > 2:
            raise OracleError("the tiny family uses at most two primitives")
        self.obj_names = tuple(obj_names)
        self.feat_names = tuple(feat_names)
        self.prims = tuple(prims)
        self.box_role = box_role
        self.max_obj = max_obj
        self.max_feat = max_feat
        d = [Prim(p) for p in self.prims]
        concepts = list(d)
        if len(d) == 2:
            concepts += [And(d[0], d[1]), Or(d[0], d[1])]
        concepts += [Box(box_role, p) for p in d]
        self.concepts = tuple(concepts)
        terms = []
        for o in self.obj_names:
            terms += [Member(o, c) for c in self.concepts]
        for f in self.feat_names:
            terms += [Describes(f, c) for c in self.concepts]
        for o in self.obj_names:
            terms += [Inc(o, f) for f in self.feat_names]
        for o in self.obj_names:
            terms += [BoxRel(box_role, o, f) for f in self.feat_names]
        self.terms = tuple(terms)
        if len(self.terms) > 63:
            raise OracleError("term list exceeds one signature word")
        self.term_bit = {t: i for i, t in enumerate(self.terms)}
        self.signatures = self._precompute()

    # bit packing: bit k of an extent code is element k

    def _precompute(self) -> np.ndarray:
        sigs = []
        for n_obj in range(1, self.max_obj + 1):
            for n_feat in range(1, self.max_feat + 1):
                sigs.append(self._size_signatures(n_obj, n_feat))
        return np.unique(np.concatenate(sigs))

    def _size_signatures(self, n_obj: int, n_feat: int) -> np.ndarray:
        cells = n_obj * n_feat
        mats = _all_vectors(2, cells).reshape(-1, n_obj, n_feat)
        reps = np.flatnonzero(_canonical_mask(mats, 2))
        full_ext = (1 << n_obj) - 1
        full_int = (1 << n_feat) - 1
        obj_maps = _all_vectors(n_obj, len(self.obj_names))
        feat_maps = _all_vectors(n_feat, len(self.feat_names))
        out = []
        rel_all = mats  # same enumeration for the box relation
        weights_feat = 1 << np.arange(n_feat, dtype=np.int64)
        rel_rows_all = rel_all @ weights_feat            # (NR, n_obj) ints
        for rep in reps:
            inc = mats[rep]
            row_int = inc @ weights_feat                  # feature mask per object
            col_int = inc.T @ (1 << np.arange(n_obj, dtype=np.int64))
            up = np.empty(1 << n_obj, dtype=np.int64)
            for e in range(1 << n_obj):
                u = full_int
                for a in range(n_obj):
                    if e >> a & 1:
                        u &= int(row_int[a])
                up[e] = u
            down = np.empty(1 << n_feat, dtype=np.int64)
            for u in range(1 << n_feat):
                f = full_ext
                for x in range(n_feat):
                    if u >> x & 1:
                        f &= int(col_int[x])
                down[u] = f
            ext_stable = down[up] == np.arange(1 << n_obj)
            int_stable = up[down] == np.arange(1 << n_feat)
            # compatible box relations: stable columns and stable rows
            rel_cols = rel_all.transpose(0, 2, 1) @ \
                (1 << np.arange(n_obj, dtype=np.int64))  # (NR, n_feat)
            ok = ext_stable[rel_cols].all(axis=1) & \
                int_stable[rel_rows_all].all(axis=1)
            surv = np.flatnonzero(ok)
            if len(surv) == 0:
                continue
            rows_s = rel_rows_all[surv]                   # (S, n_obj)
            # boxext[u] per surviving relation: objects whose row covers u
            boxext = np.empty((len(surv), 1 << n_feat), dtype=np.int64)
            for u in range(1 << n_feat):
                covers = (rows_s & u) == u                # (S, n_obj)
                boxext[:, u] = covers @ (1 << np.arange(n_obj,
                                                        dtype=np.int64))
            combos = _all_vectors(1 << n_obj, len(self.prims))
            combo_ok = ext_stable[combos].all(axis=1) if len(self.prims) \
                else np.ones(1, dtype=bool)
            combos = combos[combo_ok]
            ext_codes, int_codes = self._concept_tables(
                combos, up, down, boxext)
            sig = np.zeros((len(surv), len(combos), len(obj_maps),
                            len(feat_maps)), dtype=np.int64)
            for term, bit in self.term_bit.items():
                if isinstance(term, Member):
                    e = ext_codes[self.concepts.index(term.concept)]
                    el = obj_maps[:, self.obj_names.index(term.obj)]
                    bits = (e[:, :, None] >> el[None, None, :]) & 1
                    sig |= (bits[:, :, :, None] << bit)
                elif isinstance(term, Describes):
                    u = int_codes[self.concepts.index(term.concept)]
                    el = feat_maps[:, self.feat_names.index(term.feat)]
                    bits = (u[:, :, None] >> el[None, None, :]) & 1
                    sig |= (bits[:, :, None, :] << bit)
                elif isinstance(term, Inc):
                    mo = obj_maps[:, self.obj_names.index(term.obj)]
                    mf = feat_maps[:, self.feat_names.index(term.feat)]
                    bits = inc[mo[:, None], mf[None, :]]
                    sig |= (bits[None, None, :, :].astype(np.int64) << bit)
                else:  # BoxRel
                    mo = obj_maps[:, self.obj_names.index(term.obj)]
                    mf = feat_maps[:, self.feat_names.index(term.feat)]
                    bits = (rows_s[:, mo][:, :, None] >> mf[None, None, :]) & 1
                    sig |= (bits[:, None, :, :] << bit)
            out.append(np.unique(sig))
        return np.unique(np.concatenate(out)) if out else \
            np.zeros(0, dtype=np.int64)

    def _concept_tables(self, combos, up, down, boxext):
        """Extent and intent codes per concept over (relations, combos)."""
        n_surv = boxext.shape[0]
        n_combo = len(combos)
        ext_codes = []
        int_codes = []
        base = {}
        for k, p in enumerate(self.prims):
            base[p] = combos[:, k]
        for concept in self.concepts:
            if isinstance(concept, Prim):
                e = np.broadcast_to(base[concept.name], (n_surv, n_combo))
                u = np.broadcast_to(up[base[concept.name]], (n_surv, n_combo))
            elif isinstance(concept, And):
                e1, e2 = base[concept.left.name], base[concept.right.name]
                e = np.broadcast_to(e1 & e2, (n_surv, n_combo))
                u = np.broadcast_to(up[e1 & e2], (n_surv, n_combo))
            elif isinstance(concept, Or):
                u1, u2 = up[base[concept.left.name]], up[base[concept.right.name]]
                u = np.broadcast_to(u1 & u2, (n_surv, n_combo))
                e = np.broadcast_to(down[u1 & u2], (n_surv, n_combo))
            else:  # Box over a primitive
                u_arg = up[base[concept.arg.name]]          # (n_combo,)
                e = boxext[:, u_arg]                        # (n_surv, n_combo)
                u = up[e]
            ext_codes.append(np.ascontiguousarray(e))
            int_codes.append(np.ascontiguousarray(u))
        return ext_codes, int_codes

    def has_model(self, assertions) -> bool:
        """Bounded satisfiability of an ABox over the fixed signature."""
        need_one = 0
        need_zero = 0
        for a in assertions:
            if a.term not in self.term_bit:
                raise OracleError(f"term outside the tiny signature: {a.term!r}")
            bit = 1 << self.term_bit[a.term]
            if a.positive:
                if a.bound == 0:
                    continue  # trivially true
                need_one |= bit
            else:
                if a.bound == 0:
                    return False  # nothing fails to reach bottom
                need_zero |= bit
        hits = ((self.signatures & need_one) == need_one) & \
            ((self.signatures & need_zero) == 0)
        return bool(hits.any())


# -- cross checking -----------------------------------------------------------


@dataclass
class CrossCheckReport:
    agreement: bool
    hard_failure: bool
    detail: str


def cross_check(kb: KnowledgeBase, verdict, max_objects: int = 3,
                max_features: int = 3,
                budget: int = DEFAULT_BUDGET) -> CrossCheckReport:
    """Consistent verdicts are verified constructively; Inconsistent verdicts
    fail hard only if the bounded search finds a model."""
    from . import modelgen

    if verdict.consistent:
        model = modelgen.extract_model(verdict.state, kb)
        report = modelgen.verify_soundness(model, kb, verdict.state)
        if report.ok:
            return CrossCheckReport(True, False, "constructive check passed")
        detail = "; ".join(f"{c.name}: {c.failures[:1]}"
                           for c in report.checks if not c.ok)
        return CrossCheckReport(False, True,
                                f"extracted model fails verification: {detail}")
    result = find_model(kb, max_objects, max_features, budget)
    if result.found:
        return CrossCheckReport(
            False, True, "oracle found a model for an Inconsistent verdict")
    return CrossCheckReport(True, False, "no model within bounds")
