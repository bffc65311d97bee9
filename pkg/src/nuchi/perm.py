"""Permutations, regular permutation groups and their subgroups.

Every group is held in its regular representation: a coset table of the
trivial subgroup whose points are the group elements, point 0 being the
identity.  A subgroup is then just the orbit of point 0 under its
generators, so its order is the orbit size and membership is a lookup.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import sympy

from . import _kernels as K
from . import words as W
from .errors import (
    NotAbelianError,
    NotNormalError,
    NotPGroupError,
    NotRegularError,
    OversizeError,
    RelatorViolation,
)
from .words import Word

DEFAULT_POINT_BUDGET = 2_000_000
_MAX_GENS = 64


def point_budget() -> int:
    """Element-enumeration budget, overridable with ``NUCHI_MAX_POINTS``."""
    return int(os.environ.get("NUCHI_MAX_POINTS", DEFAULT_POINT_BUDGET))


class Permutation:
    """A permutation of ``range(n)``; ``p * q`` applies ``p`` first."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int] | np.ndarray):
        a = np.asarray(images, dtype=np.int64)
        if a.ndim != 1 or not np.array_equal(np.sort(a), np.arange(a.size)):
            raise ValueError("not a permutation")
        a.setflags(write=False)
        self.images = a

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(np.arange(n))

    @property
    def degree(self) -> int:
        return self.images.size

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(other.images[self.images])

    def __invert__(self) -> Permutation:
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.degree)
        return Permutation(inv)

    inverse = __invert__

    def __pow__(self, k: int) -> Permutation:
        base = self if k >= 0 else ~self
        result = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.degree)))

    def order(self) -> int:
        seen = np.zeros(self.degree, bool)
        o = 1
        for x in range(self.degree):
            if seen[x]:
                continue
            n = 0
            y = x
            while not seen[y]:
                seen[y] = True
                y = self.images[y]
                n += 1
            o = math.lcm(o, n)
        return o

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"Permutation({self.images.tolist()})"


def evaluate_word(images: Sequence[Permutation], w: Word, degree: int | None = None) -> Permutation:
    """Image of ``w`` under ``generator k -> images[k]``."""
    n = degree if degree is not None else images[0].degree
    result = Permutation.identity(n)
    for a in w:
        g = images[abs(a) - 1]
        result = result * (g if a > 0 else ~g)
    return result


def evaluate_hom(
    source_gens: Sequence[Word],
    target_images: Sequence[Permutation],
    w: Word,
    relators: Iterable[Word] | None = None,
) -> Permutation:
    """Image of ``w`` under the assignment ``source_gens[i] -> target_images[i]``.

    ``source_gens`` are single-letter words naming the source generators.
    When ``relators`` is given every relator must map to the identity,
    otherwise :class:`RelatorViolation` is raised.
    """
    if len(source_gens) != len(target_images):
        raise ValueError("need one image per source generator")
    slot = {}
    for i, g in enumerate(source_gens):
        if len(g) != 1:
            raise ValueError("source generators must be single letters")
        slot[abs(g[0])] = (i, g[0] > 0)
    degree = target_images[0].degree if target_images else 1

    def image(word: Word) -> Permutation:
        out = Permutation.identity(degree)
        for a in word:
            i, positive = slot[abs(a)]
            g = target_images[i]
            out = out * (g if (a > 0) == positive else ~g)
        return out

    if relators is not None:
        for r in relators:
            if not image(r).is_identity():
                raise RelatorViolation(f"relator {r} has non-identity image")
    return image(w)


class RegularGroup:
    """A finite group acting regularly on its own elements.

    ``table[x, 2i]`` is ``x * g_i`` and ``table[x, 2i + 1]`` is ``x * g_i^-1``.
    Points are numbered breadth-first from the identity 0, and ``word(x)`` is
    the shortest representative (lowest generator first on ties).
    """

    base_point = 0
    is_regular = True

    def __init__(self, table: np.ndarray, names: Sequence[str] | None = None, label: str = ""):
        table = np.ascontiguousarray(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[1] % 2:
            raise ValueError("table must have one column per generator and inverse")
        new, parent, pletter, reached, pos = _renumber(table)
        if reached != table.shape[0]:
            raise NotRegularError("table is not transitive")
        if not K.is_regular_action(new):
            raise NotRegularError("point stabilisers are not trivial")
        self.table = new
        self.renumbering = pos
        self.parent = parent
        self.pletter = pletter
        self.ngens = table.shape[1] // 2
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(self.ngens))
        self.label = label
        self.wl, self.woff, self.wlen = K.build_words(parent, pletter)
        self._power_maps: dict[int, np.ndarray] = {}
        self._check_inverse_columns()

    def _check_inverse_columns(self):
        ar = np.arange(self.order, dtype=np.int32)
        for i in range(self.ngens):
            if not np.array_equal(self.table[self.table[:, 2 * i], 2 * i + 1], ar):
                raise NotRegularError(f"column {2 * i + 1} is not the inverse of {2 * i}")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    domain_size = order

    @property
    def generators(self) -> list[Permutation]:
        return [Permutation(self.table[:, 2 * i]) for i in range(self.ngens)]

    @property
    def _w(self):
        return self.table, self.wl, self.woff, self.wlen

    # -- element arithmetic on points ------------------------------------
    def element(self, w: Word) -> int:
        return int(K.trace(self.table, 0, W.to_columns(w)))

    def word(self, x: int) -> Word:
        o = self.woff[x]
        return W.from_columns(self.wl[o : o + self.wlen[x]].tolist())

    def mul(self, a: int, b: int) -> int:
        return int(K._mul(*self._w, a, b))

    def inv(self, a: int) -> int:
        return int(K._inv(*self._w, a))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        y = 0
        for _ in range(k):
            y = self.mul(y, a)
        return y

    def comm(self, a: int, *rest: int) -> int:
        for b in rest:
            a = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
        return a

    def conj(self, a: int, b: int) -> int:
        return self.mul(self.mul(self.inv(b), a), b)

    def generator_elements(self) -> np.ndarray:
        return self.table[0, 0::2].copy()

    # -- cached whole-group data ------------------------------------------
    @cached_property
    def _prime(self) -> int | None:
        fs = sympy.primefactors(self.order)
        return fs[0] if len(fs) == 1 else None

    @cached_property
    def element_orders(self) -> np.ndarray:
        _require_budget(self.order)
        p = self._prime
        if p is None:
            return K.orders(*self._w, np.arange(self.order, dtype=np.int32))
        # p-group: follow the p-th power map down to the identity
        P = self.power_map(p)
        cur = np.arange(self.order, dtype=np.int32)
        out = np.ones(self.order, np.int64)
        live = cur != 0
        while live.any():
            out[live] *= p
            cur = P[cur]
            live = cur != 0
        return out

    @cached_property
    def inverses(self) -> np.ndarray:
        return K.inv_many(*self._w, np.arange(self.order, dtype=np.int32))

    def power_map(self, m: int) -> np.ndarray:
        if m not in self._power_maps:
            _require_budget(self.order)
            p = self._prime
            if p is not None and m > p and m % p == 0:
                self._power_maps[m] = self.power_map(p)[self.power_map(m // p)]
            else:
                self._power_maps[m] = K.powers(*self._w, np.arange(self.order, dtype=np.int32), m)
        return self._power_maps[m]

    def whole(self) -> Subgroup:
        return generate(self, self.generator_elements())

    def trivial(self) -> Subgroup:
        return generate(self, [])

    def __repr__(self):
        return f"RegularGroup({self.label or 'unnamed'}, order={self.order}, ngens={self.ngens})"


def _renumber(table):
    return K.bfs_renumber(table)


def _require_budget(n: int):
    if n > point_budget():
        raise OversizeError(f"{n} points exceeds the enumeration budget {point_budget()}")


class Subgroup:
    """A subgroup of a regular group, stored as the orbit of the base point.

    ``parent_point[x]`` / ``parent_gen[x]`` form a Schreier tree over the
    orbit: ``x = parent_point[x] * gens[parent_gen[x]]``.
    """

    def __init__(self, ambient: RegularGroup, gens, orbit, parent_point, parent_gen):
        self.ambient = ambient
        self.gens = gens
        self.orbit = orbit
        self.parent_point = parent_point
        self.parent_gen = parent_gen

    @property
    def order(self) -> int:
        return int(self.orbit.size)

    @property
    def elements(self) -> np.ndarray:
        return self.orbit

    @property
    def generator_words(self) -> list[Word]:
        return [self.ambient.word(int(s)) for s in self.gens]

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.orbit.tolist())

    def __contains__(self, x: int) -> bool:
        return self.parent_gen[x] != K.NONMEMBER

    def contains_all(self, xs) -> bool:
        xs = np.asarray(xs, dtype=np.int64)
        return bool(np.all(self.parent_gen[xs] != K.NONMEMBER)) if xs.size else True

    def __le__(self, other: Subgroup) -> bool:
        return other.contains_all(self.gens)

    def same_as(self, other: Subgroup) -> bool:
        return self.order == other.order and self <= other

    def is_trivial(self) -> bool:
        return self.order == 1

    def schreier_word(self, x: int) -> Word:
        """A word for ``x`` in the ambient generators along the Schreier tree."""
        parts = []
        while self.parent_gen[x] >= 0:
            parts.append(self.ambient.word(int(self.gens[self.parent_gen[x]])))
            x = int(self.parent_point[x])
        return W.mul(*reversed(parts))

    def is_abelian(self) -> bool:
        g = self.ambient
        s = [int(x) for x in self.gens]
        return all(g.mul(a, b) == g.mul(b, a) for i, a in enumerate(s) for b in s[i + 1 :])

    def __repr__(self):
        return f"Subgroup(order={self.order}, ngens={self.gens.size})"


def generate(ambient: RegularGroup, elements, base: Subgroup | None = None) -> Subgroup:
    """Subgroup generated by ``base`` (if any) and the given element ids."""
    budget = point_budget()
    N = ambient.order
    if base is None:
        ppt = np.full(N, -1, np.int32)
        pgen = np.full(N, K.NONMEMBER, np.int8)  # generator index, at most _MAX_GENS
        orbit = np.empty(min(N, budget) if N else 1, np.int32)
        gens = np.empty(_MAX_GENS, np.int32)
        orbit[0] = 0
        pgen[0] = K.ROOT
        olen, ngens = 1, 0
    else:
        ppt = base.parent_point.copy()
        pgen = base.parent_gen.copy()
        orbit = np.empty(min(N, budget), np.int32)
        orbit[: base.order] = base.orbit
        gens = np.empty(_MAX_GENS, np.int32)
        gens[: base.gens.size] = base.gens
        olen, ngens = base.order, base.gens.size
    cands = np.asarray(elements, dtype=np.int32).reshape(-1)
    olen, ngens, st = K.extend(*ambient._w, ppt, pgen, orbit, olen, gens, ngens, cands, budget)
    if st != K.OK:
        raise OversizeError(f"subgroup orbit exceeds budget {budget}")
    return Subgroup(ambient, gens[:ngens].copy(), orbit[:olen].copy(), ppt, pgen)


def _close(ambient: RegularGroup, H: Subgroup, conjugators) -> Subgroup:
    conj = np.unique(np.asarray(conjugators, dtype=np.int32))
    conj_inv = ambient.inverses[conj] if ambient.order <= point_budget() else \
        K.inv_many(*ambient._w, conj)
    budget = point_budget()
    orbit = np.empty(min(ambient.order, budget), np.int32)
    orbit[: H.order] = H.orbit
    gens = np.empty(_MAX_GENS, np.int32)
    gens[: H.gens.size] = H.gens
    ppt, pgen = H.parent_point.copy(), H.parent_gen.copy()
    olen, ngens, st = K.normal_close(
        *ambient._w, ppt, pgen, orbit, H.order, gens, H.gens.size, conj, conj_inv, budget
    )
    if st != K.OK:
        raise OversizeError(f"normal closure exceeds budget {budget}")
    return Subgroup(ambient, gens[:ngens].copy(), orbit[:olen].copy(), ppt, pgen)


# ---------------------------------------------------------------------------
# subgroup constructions
# ---------------------------------------------------------------------------


def subgroup_from_words(ambient: RegularGroup, words: Iterable[Word]) -> Subgroup:
    if not ambient.is_regular:
        raise NotRegularError("subgroup_from_words needs a regular ambient")
    return generate(ambient, [ambient.element(w) for w in words])


def normal_closure(ambient: RegularGroup, seeds: Iterable[Word] | Subgroup) -> Subgroup:
    H = seeds if isinstance(seeds, Subgroup) else subgroup_from_words(ambient, seeds)
    return _close(ambient, H, ambient.generator_elements())


def is_normal(ambient: RegularGroup, H: Subgroup, within: Subgroup | None = None) -> bool:
    """Is ``H`` normalised by the ambient group (or by ``within``)?"""
    conj = ambient.generator_elements() if within is None else within.gens
    for c in conj:
        ci = ambient.inv(int(c))
        for s in H.gens:
            if ambient.mul(ambient.mul(ci, int(s)), int(c)) not in H:
                return False
    return True


def commutator_subgroup(
    ambient: RegularGroup, A: Subgroup, B: Subgroup, check_normal: bool = True
) -> Subgroup:
    """[A, B]: the closure of the generator commutators under A and B.

    With ``check_normal`` at least one of A, B must be normal in the ambient
    group.  The computation itself is valid without it, which the
    distinguished subgroups of nu and chi rely on.
    """
    if check_normal and not (is_normal(ambient, A) or is_normal(ambient, B)):
        raise NotNormalError("neither argument of the commutator is normal")
    g = ambient
    seeds = [g.comm(int(a), int(b)) for a in A.gens for b in B.gens]
    H = generate(g, seeds)
    return _close(g, H, np.concatenate([A.gens, B.gens]))


def iterated_commutator(ambient: RegularGroup, N: Subgroup, k: int, G: Subgroup | None = None) -> Subgroup:
    """[N, _k G] with G the whole ambient group unless given."""
    if k < 0:
        raise ValueError("k must be non-negative")
    G = ambient.whole() if G is None else G
    if k and not is_normal(ambient, N, G):
        raise NotNormalError("N must be normal")
    for _ in range(k):
        N = commutator_subgroup(ambient, N, G, check_normal=False)
    return N


def lower_central_series(ambient: RegularGroup, H: Subgroup | None = None) -> list[Subgroup]:
    """gamma_1 = H, gamma_{k+1} = [gamma_k, H], up to the first repeat."""
    H = ambient.whole() if H is None else H
    series = [H]
    while True:
        nxt = commutator_subgroup(ambient, series[-1], H, check_normal=False)
        if nxt.order == series[-1].order:
            return series
        series.append(nxt)


def lcs_term(series: list[Subgroup], k: int) -> Subgroup:
    """gamma_k from a series produced by :func:`lower_central_series`."""
    if k < 1:
        raise ValueError("gamma_k is defined for k >= 1")
    return series[min(k, len(series)) - 1]


def nilpotency_class(series: list[Subgroup]) -> int | None:
    return len(series) - 1 if series[-1].is_trivial() else None


def power_subgroup(ambient: RegularGroup, H: Subgroup, m: int) -> Subgroup:
    """Subgroup generated by the m-th powers of every element of H."""
    if m < 1:
        raise ValueError("m must be positive")
    _require_budget(H.order)
    pw = ambient.power_map(m)[H.orbit]
    return generate(ambient, np.unique(pw))


def _is_prime_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def omega_subgroup(ambient: RegularGroup, H: Subgroup, p: int, n: int) -> Subgroup:
    """Subgroup generated by the elements of H of order dividing p^n."""
    _require_budget(H.order)
    if not _is_prime_power(H.order, p):
        raise NotPGroupError(f"order {H.order} is not a power of {p}")
    o = ambient.element_orders[H.orbit]
    return generate(ambient, H.orbit[(p**n) % o == 0])


def omega_set_is_subgroup(ambient: RegularGroup, H: Subgroup, p: int, n: int) -> bool:
    o = ambient.element_orders[H.orbit]
    count = int(np.count_nonzero((p**n) % o == 0))
    return count == omega_subgroup(ambient, H, p, n).order


def element_order(ambient: RegularGroup, w: Word) -> int:
    x = ambient.element(w)
    return int(K.orders(*ambient._w, np.array([x], np.int32))[0])


def exponent(ambient: RegularGroup, H: Subgroup) -> int:
    _require_budget(H.order)
    return math.lcm(*np.unique(ambient.element_orders[H.orbit]).tolist())


def abelian_invariants(ambient: RegularGroup, H: Subgroup) -> tuple[int, ...]:
    """Invariants of an abelian group as prime powers, largest first.

    For each prime q, the number of elements of order dividing q^n is
    q^(sum_i min(e_i, n)); successive differences of the logarithms count
    the cyclic factors of order at least q^n.
    """
    if not H.is_abelian():
        raise NotAbelianError("abelian_invariants needs an abelian group")
    _require_budget(H.order)
    o = ambient.element_orders[H.orbit]
    out: list[int] = []
    for q in sympy.primefactors(H.order):
        ranks = []
        n = 1
        prev = 0
        while True:
            cnt = int(np.count_nonzero((q**n) % o == 0))
            lg = round(math.log(cnt, q))
            if q**lg != cnt:
                raise NotAbelianError("element counts are not prime powers")
            if lg == prev:
                break
            ranks.append(lg - prev)
            prev = lg
            n += 1
        # ranks[n-1] = number of factors of order >= q^n
        for n, r in enumerate(ranks, start=1):
            nxt = ranks[n] if n < len(ranks) else 0
            out += [q**n] * (r - nxt)
    return tuple(sorted(out, reverse=True))


def whole_is_abelian(G: RegularGroup) -> bool:
    g = [int(x) for x in G.generator_elements()]
    return all(G.mul(a, b) == G.mul(b, a) for i, a in enumerate(g) for b in g[i + 1 :])


def intersection(A: Subgroup, B: Subgroup) -> Subgroup:
    if A.ambient is not B.ambient:
        raise ValueError("subgroups of different groups")
    common = A.orbit[B.parent_gen[A.orbit] != K.NONMEMBER]
    return generate(A.ambient, common)


def product(ambient: RegularGroup, *subgroups: Subgroup) -> Subgroup:
    """Subgroup generated by the union; the product when the factors are normal."""
    return generate(ambient, np.concatenate([s.gens for s in subgroups] + [np.empty(0, np.int32)]))


# ---------------------------------------------------------------------------
# groups built from groups
# ---------------------------------------------------------------------------


class Quotient(RegularGroup):
    """``ambient / kernel``; ``projection[x]`` is the image of ambient point x."""

    projection: np.ndarray


def quotient_group(ambient: RegularGroup, K_: Subgroup) -> Quotient:
    if not is_normal(ambient, K_):
        raise NotNormalError("quotient by a non-normal subgroup")
    lab, reps = K.coset_labels(*ambient._w, K_.orbit)
    q = Quotient(K.quotient_table(ambient.table, lab, reps), ambient.names,
                 f"{ambient.label}/K")
    q.projection = q.renumbering[lab]
    return q


class Embedded(RegularGroup):
    """A subgroup realised as a group on its own elements.

    ``index[x]`` is the point of ambient element x (or -1).
    """

    index: np.ndarray
    elements_in_ambient: np.ndarray


def subgroup_as_group(H: Subgroup) -> Embedded:
    g = H.ambient
    idx = np.full(g.order, -1, np.int32)
    idx[H.orbit] = np.arange(H.order, dtype=np.int32)
    cols = []
    for s in H.gens:
        fwd = K.mul_many(*g._w, H.orbit, np.full(H.order, s, np.int32))
        bwd = K.mul_many(*g._w, H.orbit, np.full(H.order, g.inv(int(s)), np.int32))
        cols += [idx[fwd], idx[bwd]]
    table = np.stack(cols, axis=1) if cols else np.zeros((1, 0), np.int32)
    e = Embedded(table, [f"s{i + 1}" for i in range(H.gens.size)], "subgroup")
    # point k of e corresponds to orbit element old[k]
    old = np.empty(H.order, np.int32)
    old[e.renumbering] = np.arange(H.order, dtype=np.int32)
    e.elements_in_ambient = H.orbit[old]
    e.index = np.full(g.order, -1, np.int32)
    e.index[e.elements_in_ambient] = np.arange(H.order, dtype=np.int32)
    return e


def subquotient(H: Subgroup, K_: Subgroup) -> Quotient:
    """H / K for K normal in H, both subgroups of the same group."""
    e = subgroup_as_group(H)
    if not K_ <= H:
        raise ValueError("K is not contained in H")
    kk = generate(e, e.index[K_.gens])
    return quotient_group(e, kk)


class DirectProduct(RegularGroup):
    """Regular direct product; factor i's generators come after factor i-1's."""

    offsets: list[int]

    def embed(self, i: int, w: Word) -> Word:
        return W.shift(w, self.offsets[i])


def direct_product(factors: Sequence[RegularGroup]) -> DirectProduct:
    sizes = [f.order for f in factors]
    total = math.prod(sizes)
    _require_budget(total)
    idx = np.arange(total, dtype=np.int64)
    coords = []
    rem = idx
    for s in sizes:
        coords.append(rem % s)
        rem = rem // s
    strides = np.cumprod([1] + sizes[:-1])
    cols = []
    for i, f in enumerate(factors):
        for c in range(f.table.shape[1]):
            moved = idx + (f.table[coords[i], c].astype(np.int64) - coords[i]) * strides[i]
            cols.append(moved)
    table = np.stack(cols, axis=1).astype(np.int32) if cols else np.zeros((total, 0), np.int32)
    names = [f"{n}_{i + 1}" for i, f in enumerate(factors) for n in f.names]
    d = DirectProduct(table, names, " x ".join(f.label or "G" for f in factors))
    d.offsets = list(np.cumsum([0] + [f.ngens for f in factors[:-1]]).tolist())
    return d


# ---------------------------------------------------------------------------
# fingerprints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantFingerprint:
    order: int
    exponent: int
    nilpotency_class: int | None
    abelian_invariants: tuple[int, ...] | None

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "exponent": self.exponent,
            "nilpotency_class": (
                self.nilpotency_class if self.nilpotency_class is not None else "not nilpotent"
            ),
            "abelian_invariants": (
                list(self.abelian_invariants) if self.abelian_invariants is not None else None
            ),
        }


def fingerprint(group: RegularGroup, H: Subgroup | None = None) -> InvariantFingerprint:
    if H is not None:
        group = subgroup_as_group(H)
    whole = group.whole()
    series = lower_central_series(group, whole)
    inv = abelian_invariants(group, whole) if whole.is_abelian() else None
    return InvariantFingerprint(group.order, exponent(group, whole), nilpotency_class(series), inv)
