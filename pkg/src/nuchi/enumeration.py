"""Todd-Coxeter coset enumeration.

The enumerator is HLT (relator scanning from each live coset in order,
defining cosets to fill gaps), with coincidence processing, compaction of
dead cosets, and a lookahead pass (scanning without definitions) when the
table is full.  Relators are scanned shortest first.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import words as W
from .errors import ExceededError, NotClosedError, OversizeError
from .perm import RegularGroup, point_budget
from .presentation import Presentation
from .words import Word

log = logging.getLogger(__name__)

DEFAULT_MAX_COSETS = 4_000_000
_INITIAL_CAPACITY = 1 << 14


@dataclass(frozen=True)
class CosetTable:
    rows: np.ndarray
    coset_count: int
    status: str
    presentation: Presentation

    @property
    def closed(self) -> bool:
        return self.status == "closed"


def _relator_arrays(relators):
    rels = sorted((W.cyclic_reduce(r) for r in relators), key=len)
    rels = [r for r in rels if r]
    cols = [W.to_columns(r) for r in rels]
    rl = np.concatenate(cols) if cols else np.empty(0, np.int32)
    rlen = np.array([len(c) for c in cols], dtype=np.int64)
    rs = np.concatenate([[0], np.cumsum(rlen)[:-1]]).astype(np.int64) if cols else rlen
    return rl.astype(np.int32), rs, rlen


def _conjugate_index(rl, rs, rlen, ncols):
    """Cyclic conjugates grouped by first letter, over doubled relators."""
    rl2 = np.concatenate([np.concatenate([rl[s : s + L], rl[s : s + L]])
                          for s, L in zip(rs, rlen)]) if len(rs) else np.empty(0, np.int32)
    starts, lens, firsts = [], [], []
    off = 0
    for s, L in zip(rs, rlen):
        for k in range(L):
            starts.append(off + k)
            lens.append(L)
            firsts.append(rl[s + k])
        off += 2 * L
    order = np.argsort(np.asarray(firsts, np.int64), kind="stable")
    cstart = np.asarray(starts, np.int64)[order]
    clen = np.asarray(lens, np.int64)[order]
    counts = np.bincount(np.asarray(firsts, np.int64), minlength=ncols) if firsts else np.zeros(ncols, np.int64)
    xoff = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return rl2.astype(np.int32), xoff, cstart, clen


def _word_arrays(words):
    """Like :func:`_relator_arrays` but keeping each word as given (freely reduced)."""
    cols = [W.to_columns(W.free_reduce(w)) for w in words]
    cols = [c for c in cols if len(c)]
    rl = np.concatenate(cols).astype(np.int32) if cols else np.empty(0, np.int32)
    rlen = np.array([len(c) for c in cols], dtype=np.int64)
    rs = np.concatenate([[0], np.cumsum(rlen)[:-1]]).astype(np.int64) if cols else rlen
    return rl, rs, rlen


def _hlt(pres: Presentation, max_cosets: int, deduction_stack: int, subgroup=()):
    """Run HLT to completion; returns the compacted rows and relator arrays."""
    ncols = 2 * pres.generator_count
    rl, rs, rlen = _relator_arrays(pres.relators)
    cap = min(max_cosets, _INITIAL_CAPACITY)
    table = np.full((cap, ncols), -1, np.int32)
    p = np.arange(cap, dtype=np.int32)
    q = np.empty(cap, np.int32)
    conj = _conjugate_index(rl, rs, rlen, ncols)
    ds = np.zeros(2 * deduction_stack + 1, np.int32)
    c, n, dead = 0, 1, 0
    sl, ss, slen = _word_arrays(subgroup)
    for k in range(len(ss)):
        # subgroup generators fix coset 0; their scans need few definitions
        while True:
            n, _, st = K._scan(table, p, q, 0, sl, ss[k], slen[k], n, True, ds)
            if st == K.OK:
                break
            cap = min(max_cosets, 2 * cap)
            if cap <= table.shape[0]:
                raise ExceededError(f"{pres.label or 'presentation'}: subgroup words exceed {max_cosets} cosets")
            table = _grow(table, cap, -1)
            p = _grow(p, cap, 0)
            p[n:] = np.arange(n, cap, dtype=np.int32)
            q = np.empty(cap, np.int32)
    ds[0] = 0
    while True:
        c, n, dead, st = K.hlt(table, p, q, rl, rs, rlen, c, n, dead, 1 << 16, ds, *conj)
        if st == K.OK:
            break
        ds[0] = 0  # stacked cosets are renumbered by compaction
        n, c = K.compact(table, p, n, c)
        dead = 0
        if st == K.COMPACT or n < 0.75 * cap:
            continue
        if cap < max_cosets:
            cap = min(max_cosets, 2 * cap)
            table = _grow(table, cap, -1)
            p = np.arange(cap, dtype=np.int32)
            q = np.empty(cap, np.int32)
            log.debug("%s: table grown to %d", pres.label, cap)
            continue
        K.lookahead(table, p, q, rl, rs, rlen, n)
        n, c = K.compact(table, p, n, c)
        log.debug("%s: lookahead left %d of %d cosets", pres.label, n, cap)
        if n >= 0.95 * cap:
            raise ExceededError(
                f"{pres.label or 'presentation'}: coset enumeration exceeded {max_cosets} cosets"
            )
    n, _ = K.compact(table, p, n, 0)
    rows = table[:n].copy()
    if np.any(rows < 0):
        raise NotClosedError("enumeration ended with undefined entries")
    return rows, n, (rl, rs, rlen), (sl, ss, slen)


def todd_coxeter(
    pres: Presentation, max_cosets: int = DEFAULT_MAX_COSETS, deduction_stack: int = 0
) -> CosetTable:
    """Enumerate the cosets of the trivial subgroup of ``pres``.

    Raises :class:`ExceededError` when more than ``max_cosets`` cosets would
    be live at once.
    """
    rows, n, rel, _ = _hlt(pres, max_cosets, deduction_stack)
    # relators fix 0 and the action is regular => relators act trivially
    if K.base_point_failures(rows, *rel) or not K.is_regular_action(rows):
        raise NotClosedError("closed table violates a relator")
    return CosetTable(rows, n, "closed", pres)


def coset_enumeration(
    pres: Presentation, subgroup, max_cosets: int = DEFAULT_MAX_COSETS
) -> CosetTable:
    """Enumerate the cosets of the subgroup generated by the given words.

    Coset 0 is the subgroup itself; the row count is its index.
    """
    rows, n, rel, sub = _hlt(pres, max_cosets, 0, subgroup)
    if K.relator_failures(rows, *rel):
        raise NotClosedError("closed table violates a relator")
    for s, L in zip(sub[1], sub[2]):
        if K.trace(rows, 0, sub[0][s : s + L]) != 0:
            raise NotClosedError("a subgroup generator moves the base coset")
    return CosetTable(rows, n, "closed", pres)


def _grow(a, cap, fill):
    out = np.full((cap,) + a.shape[1:], fill, a.dtype)
    out[: a.shape[0]] = a
    return out


def regular_generators(t: CosetTable) -> RegularGroup:
    """The regular permutation group acting on the cosets of a closed table."""
    if not t.closed:
        raise NotClosedError("table is not closed")
    return RegularGroup(t.rows, t.presentation.names, t.presentation.label)


@dataclass(frozen=True)
class ElementTable:
    """Representative words for every point of a regular group."""

    group: RegularGroup
    word_length_bound: int

    def __len__(self):
        return self.group.order

    def __getitem__(self, x: int) -> Word:
        return self.group.word(x)

    @property
    def point_to_word(self) -> list[Word]:
        return [self.group.word(x) for x in range(self.group.order)]


def element_word_table(g: RegularGroup) -> ElementTable:
    if g.order > point_budget():
        raise OversizeError(f"{g.order} elements exceed the point budget")
    bound = int(g.wlen.max()) if g.order else 0
    return ElementTable(g, bound)


def enumerate_group(pres: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> RegularGroup:
    return regular_generators(todd_coxeter(pres, max_cosets))
