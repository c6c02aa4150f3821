"""Finite complete Heyting algebras with precomputed operation tables.

Elements are small integer codes (0..n-1) with a canonical textual rendering;
chains render elements as rationals k/(n-1).  All binary operations are O(1)
table lookups; vectorized variants operate on numpy arrays of codes so the
semantic layers can evaluate whole relations at once.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np


class AlgebraError(ValueError):
    """Invalid algebra description."""


class CyclicEdgesError(AlgebraError):
    """The cover edges contain a cycle."""


class NotALatticeError(AlgebraError):
    """The order has a pair without a greatest lower / least upper bound."""


class NotDistributiveError(AlgebraError):
    """Meet does not distribute over join."""


class Algebra:
    """A finite (completely) distributive Heyting algebra.

    Construct via :func:`make_chain`, :func:`make_lattice` or
    :func:`make_grid`; the constructor assumes the tables were already
    validated.
    """

    __slots__ = (
        "names", "leq_t", "meet_t", "join_t", "imp_t", "bot", "top",
        "is_linear", "description", "_index",
    )

    def __init__(self, names, leq_t, meet_t, join_t, imp_t, bot, top,
                 description):
        self.names: tuple[str, ...] = tuple(names)
        self.leq_t = _frozen(leq_t)
        self.meet_t = _frozen(meet_t)
        self.join_t = _frozen(join_t)
        self.imp_t = _frozen(imp_t)
        self.bot: int = int(bot)
        self.top: int = int(top)
        self.is_linear: bool = bool((self.leq_t | self.leq_t.T).all())
        # ("chain", n) or ("lattice", names, edges), kept for round-tripping
        self.description = description
        self._index = {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        kind = self.description[0]
        return f"Algebra({kind}, {len(self)} elements)"

    @property
    def elements(self) -> range:
        return range(len(self.names))

    # -- scalar operations -------------------------------------------------

    def check_element(self, a: int) -> int:
        if not 0 <= a < len(self.names):
            raise AlgebraError(f"foreign element code {a!r}")
        return a

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq_t[a, b])

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_t[a, b])

    def join(self, a: int, b: int) -> int:
        return int(self.join_t[a, b])

    def implies(self, a: int, b: int) -> int:
        return int(self.imp_t[a, b])

    def iff(self, a: int, b: int) -> int:
        """Biresiduum (a -> b) meet (b -> a)."""
        return self.meet(self.implies(a, b), self.implies(b, a))

    def meet_all(self, values: Iterable[int]) -> int:
        out = self.top
        for v in values:
            out = self.meet(out, self.check_element(v))
        return out

    def join_all(self, values: Iterable[int]) -> int:
        out = self.bot
        for v in values:
            out = self.join(out, self.check_element(v))
        return out

    # -- vectorized operations on arrays of codes --------------------------

    def vmeet(self, x, y):
        return self.meet_t[x, y]

    def vjoin(self, x, y):
        return self.join_t[x, y]

    def vimp(self, x, y):
        return self.imp_t[x, y]

    def vle(self, x, y):
        return self.leq_t[x, y]

    def meet_reduce(self, arr: np.ndarray, axis: int) -> np.ndarray:
        """Big meet along one axis; the empty meet is top."""
        arr = np.asarray(arr)
        if arr.shape[axis] == 0:
            shape = list(arr.shape)
            del shape[axis]
            return np.full(shape, self.top, dtype=self.meet_t.dtype)
        slices = np.moveaxis(arr, axis, 0)
        return reduce(self.vmeet, slices)

    def join_reduce(self, arr: np.ndarray, axis: int) -> np.ndarray:
        """Big join along one axis; the empty join is bottom."""
        arr = np.asarray(arr)
        if arr.shape[axis] == 0:
            shape = list(arr.shape)
            del shape[axis]
            return np.full(shape, self.bot, dtype=self.join_t.dtype)
        slices = np.moveaxis(arr, axis, 0)
        return reduce(self.vjoin, slices)

    # -- rendering ----------------------------------------------------------

    def render(self, a: int) -> str:
        return self.names[self.check_element(a)]

    def element(self, text: str) -> int:
        try:
            return self._index[text]
        except KeyError:
            raise AlgebraError(
                f"{text!r} is not an element of the algebra") from None

    def same_tables(self, other: "Algebra") -> bool:
        return (self.names == other.names
                and np.array_equal(self.leq_t, other.leq_t)
                and np.array_equal(self.meet_t, other.meet_t)
                and np.array_equal(self.join_t, other.join_t)
                and np.array_equal(self.imp_t, other.imp_t))


def _frozen(arr) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


def _chain_name(k: int, n: int) -> str:
    if k == 0:
        return "0"
    if k == n - 1:
        return "1"
    from math import gcd
    g = gcd(k, n - 1)
    return f"{k // g}/{(n - 1) // g}"


def make_chain(n: int) -> Algebra:
    """The n-element chain 0 < 1/(n-1) < ... < 1 with Goedel implication."""
    if n < 2:
        raise AlgebraError(f"a chain needs at least 2 elements, got {n}")
    idx = np.arange(n)
    leq = idx[:, None] <= idx[None, :]
    meet = np.minimum(idx[:, None], idx[None, :])
    join = np.maximum(idx[:, None], idx[None, :])
    # a -> b is 1 when a <= b and b otherwise
    imp = np.where(leq, n - 1, idx[None, :] * np.ones((n, 1), dtype=int))
    names = [_chain_name(k, n) for k in range(n)]
    return Algebra(names, leq, meet.astype(np.int64), join.astype(np.int64),
                   imp.astype(np.int64), 0, n - 1, ("chain", n))


def make_lattice(elements: Sequence[str], hasse_edges: Sequence[tuple[str, str]]) -> Algebra:
    """Build an algebra from element names and Hasse cover edges (low, high).

    The order is the reflexive-transitive closure of the edges; meet, join
    and implication tables are derived, and the result is rejected when the
    order is not a distributive lattice.
    """
    names = tuple(elements)
    n = len(names)
    if n == 0:
        raise AlgebraError("empty element set")
    if len(set(names)) != n:
        raise AlgebraError("duplicate element names")
    index = {name: i for i, name in enumerate(names)}

    leq = np.eye(n, dtype=bool)
    for low, high in hasse_edges:
        if low not in index or high not in index:
            missing = low if low not in index else high
            raise AlgebraError(f"edge uses undeclared element {missing!r}")
        leq[index[low], index[high]] = True
    # Warshall closure
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    if ((leq & leq.T) & ~np.eye(n, dtype=bool)).any():
        raise CyclicEdgesError("cover edges contain a cycle")

    meet = np.full((n, n), -1, dtype=np.int64)
    join = np.full((n, n), -1, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            lower = np.flatnonzero(leq[:, a] & leq[:, b])
            glb = [c for c in lower if leq[lower, c].all()]
            upper = np.flatnonzero(leq[a, :] & leq[b, :])
            lub = [c for c in upper if leq[c, upper].all()]
            if len(glb) != 1 or len(lub) != 1:
                raise NotALatticeError(
                    f"no unique meet/join for {names[a]!r}, {names[b]!r}")
            meet[a, b] = glb[0]
            join[a, b] = lub[0]

    bots = [a for a in range(n) if leq[a, :].all()]
    tops = [a for a in range(n) if leq[:, a].all()]
    if len(bots) != 1 or len(tops) != 1:
        raise NotALatticeError("order lacks a unique bottom or top")
    bot, top = bots[0], tops[0]

    lhs = meet[np.arange(n)[:, None, None], join[None, :, :]]
    rhs = join[meet[:, :, None], meet[:, None, :]]
    if not np.array_equal(lhs, rhs):
        a, b, c = np.argwhere(lhs != rhs)[0]
        raise NotDistributiveError(
            f"meet does not distribute over join at "
            f"({names[a]!r}, {names[b]!r}, {names[c]!r})")

    # a -> b = join of every c with a meet c <= b; distributivity makes this
    # the residual
    imp = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            cs = [c for c in range(n) if leq[meet[a, c], b]]
            out = bot
            for c in cs:
                out = join[out, c]
            imp[a, b] = out

    alg = Algebra(names, leq, meet, join, imp, bot, top,
                  ("lattice", names, tuple((str(l), str(h)) for l, h in hasse_edges)))
    _check_residuation(alg)
    return alg


def make_grid(rows: int, cols: int) -> Algebra:
    """Product of two chains, elements named by their coordinate pair."""
    if rows < 2 or cols < 2:
        raise AlgebraError("grid needs both chains of length >= 2")
    names = [f"{i}{j}" for i in range(rows) for j in range(cols)]
    edges = []
    for i in range(rows):
        for j in range(cols):
            if i + 1 < rows:
                edges.append((f"{i}{j}", f"{i + 1}{j}"))
            if j + 1 < cols:
                edges.append((f"{i}{j}", f"{i}{j + 1}"))
    return make_lattice(names, edges)


def _check_residuation(alg: Algebra) -> None:
    n = len(alg)
    a = np.arange(n)
    # a meet c <= b  iff  c <= a -> b, checked on the full cube
    lhs = alg.leq_t[alg.meet_t[a[:, None, None], a[None, None, :]],
                    a[None, :, None]]
    rhs = alg.leq_t[a[None, None, :], alg.imp_t[a[:, None, None], a[None, :, None]]]
    if not np.array_equal(lhs, rhs):
        raise AlgebraError("residuation law fails; order is not a Heyting algebra")
