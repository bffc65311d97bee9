"""Compiled inner loops.

Everything here works on plain integer arrays:

* a coset table ``table`` of shape ``(N, 2n)``; column ``2i`` is generator ``i``
  and column ``2i + 1`` its inverse, so ``col ^ 1`` is the inverse column;
* a word store ``(wl, woff, wlen)`` holding, for each point ``x`` of a regular
  group, the columns of a word carrying the base point 0 to ``x``.

Elements of a regular group are identified with points; ``_mul(a, b)`` walks
the word of ``b`` starting from ``a``.
"""

import numpy as np
from numba import njit

NONMEMBER = -2
ROOT = -1

# status codes shared with the python drivers
OK = 0
FULL = 1
COMPACT = 2
OVERSIZE = 3


# ---------------------------------------------------------------------------
# Todd-Coxeter (HLT with lookahead), after the Handbook of CGT formulation
# ---------------------------------------------------------------------------


@njit(cache=True)
def _rep(p, k):
    r = k
    while p[r] != r:
        r = p[r]
    while p[k] != r:
        nxt = p[k]
        p[k] = r
        k = nxt
    return r


@njit(cache=True)
def _merge(p, q, qlen, k, l):
    a = _rep(p, k)
    b = _rep(p, l)
    if a != b:
        if a > b:
            a, b = b, a
        p[b] = a
        q[qlen] = b
        qlen += 1
    return qlen


@njit(cache=True)
def _coincidence(table, p, q, a, b):
    ncols = table.shape[1]
    qlen = _merge(p, q, 0, a, b)
    i = 0
    while i < qlen:
        g = q[i]
        i += 1
        for x in range(ncols):
            d = table[g, x]
            if d >= 0:
                xi = x ^ 1
                table[d, xi] = -1
                mu = _rep(p, g)
                nu = _rep(p, d)
                if table[mu, x] >= 0:
                    qlen = _merge(p, q, qlen, nu, table[mu, x])
                elif table[nu, xi] >= 0:
                    qlen = _merge(p, q, qlen, mu, table[nu, xi])
                else:
                    table[mu, x] = nu
                    table[nu, xi] = mu
    return qlen


@njit(cache=True)
def _define(table, p, f, x, n):
    table[n, :] = -1
    p[n] = n
    table[f, x] = n
    table[n, x ^ 1] = f


@njit(cache=True)
def _push(ds, c, x):
    k = ds[0]
    if 2 * k + 2 < ds.shape[0]:
        ds[1 + 2 * k] = c
        ds[2 + 2 * k] = x
        ds[0] = k + 1


@njit(cache=True)
def _scan(table, p, q, c, rl, start, length, n, fill, ds):
    """Scan relator at coset c.  Returns (n, killed, status).

    New definitions and deductions are pushed on the stack ``ds``
    (``ds[0]`` is its height; overflowing entries are dropped).
    """
    cap = table.shape[0]
    f = c
    b = c
    i = start
    j = start + length - 1
    while True:
        while i <= j and table[f, rl[i]] >= 0:
            f = table[f, rl[i]]
            i += 1
        if i > j:
            killed = 0
            if f != b:
                killed = _coincidence(table, p, q, f, b)
            return n, killed, OK
        while j >= i and table[b, rl[j] ^ 1] >= 0:
            b = table[b, rl[j] ^ 1]
            j -= 1
        if j < i:
            return n, _coincidence(table, p, q, f, b), OK
        if i == j:
            table[f, rl[i]] = b
            table[b, rl[i] ^ 1] = f
            _push(ds, f, rl[i])
            return n, 0, OK
        if not fill:
            return n, 0, OK
        if n >= cap:
            return n, 0, FULL
        _define(table, p, f, rl[i], n)
        _push(ds, f, rl[i])
        n += 1


@njit(cache=True)
def _deductions(table, p, q, ds, rl2, xoff, cstart, clen, n):
    """Scan, without defining, every relator conjugate through each stacked edge."""
    killed = 0
    while ds[0] > 0:
        k = ds[0] - 1
        ds[0] = k
        c = ds[1 + 2 * k]
        x = ds[2 + 2 * k]
        if p[c] != c:
            continue
        for e in range(xoff[x], xoff[x + 1]):
            _, kk, _ = _scan(table, p, q, c, rl2, cstart[e], clen[e], n, False, ds)
            killed += kk
            if p[c] != c:
                break
        if p[c] != c:
            continue
        d = table[c, x]
        if d < 0 or p[d] != d:
            continue
        xi = x ^ 1
        for e in range(xoff[xi], xoff[xi + 1]):
            _, kk, _ = _scan(table, p, q, d, rl2, cstart[e], clen[e], n, False, ds)
            killed += kk
            if p[d] != d:
                break
    return killed


@njit(cache=True)
def hlt(table, p, q, rl, rs, rlen, c, n, dead, compact_at, ds, rl2, xoff, cstart, clen):
    """Run HLT from coset ``c``; returns (c, n, dead, status).

    When the deduction stack ``ds`` is non-trivial, deductions are processed
    after each relator scan.
    """
    cap = table.shape[0]
    ncols = table.shape[1]
    nrel = rs.shape[0]
    while c < n:
        if p[c] == c:
            for r in range(nrel):
                n, killed, st = _scan(table, p, q, c, rl, rs[r], rlen[r], n, True, ds)
                dead += killed
                if st != OK:
                    return c, n, dead, st
                dead += _deductions(table, p, q, ds, rl2, xoff, cstart, clen, n)
                if p[c] != c:
                    break
            if p[c] == c:
                for x in range(ncols):
                    if table[c, x] < 0:
                        if n >= cap:
                            return c, n, dead, FULL
                        _define(table, p, c, x, n)
                        _push(ds, c, x)
                        n += 1
                dead += _deductions(table, p, q, ds, rl2, xoff, cstart, clen, n)
        c += 1
        if dead > compact_at and 4 * dead > 3 * n:
            return c, n, dead, COMPACT
    return c, n, dead, OK


@njit(cache=True)
def lookahead(table, p, q, rl, rs, rlen, n):
    dead = 0
    nrel = rs.shape[0]
    ds = np.zeros(1, np.int32)
    for d in range(n):
        if p[d] != d:
            continue
        for r in range(nrel):
            _, killed, _ = _scan(table, p, q, d, rl, rs[r], rlen[r], n, False, ds)
            dead += killed
            if p[d] != d:
                break
    return dead


@njit(cache=True)
def compact(table, p, n, c):
    """Renumber live cosets to 0..m-1 preserving order; returns (m, new c)."""
    ncols = table.shape[1]
    newidx = np.full(n, -1, np.int32)
    m = 0
    newc = -1
    for i in range(n):
        if i == c:
            newc = m
        if p[i] == i:
            newidx[i] = m
            m += 1
    if newc < 0:
        newc = m
    for i in range(n):
        if p[i] == i:
            ni = newidx[i]
            for x in range(ncols):
                t = table[i, x]
                if t >= 0:
                    table[ni, x] = newidx[_rep(p, t)]
                else:
                    table[ni, x] = -1
    for i in range(m):
        p[i] = i
    return m, newc


@njit(cache=True)
def relator_failures(table, rl, rs, rlen):
    """Count (coset, relator) pairs whose trace does not return."""
    bad = 0
    for c in range(table.shape[0]):
        for r in range(rs.shape[0]):
            y = c
            for i in range(rs[r], rs[r] + rlen[r]):
                y = table[y, rl[i]]
            if y != c:
                bad += 1
    return bad


@njit(cache=True)
def is_regular_action(table):
    """Is the transitive action given by ``table`` regular?

    For each generator g, the map 0.w -> g.w (w a spanning-tree word) must be
    a well-defined automorphism of the labelled graph.  These automorphisms
    generate a transitive group, so all point stabilisers coincide and the
    stabiliser of 0 is the kernel of the action.
    """
    N, ncols = table.shape
    order = np.empty(N, np.int32)
    parent = np.full(N, -1, np.int32)
    letter = np.full(N, -1, np.int32)
    seen = np.zeros(N, np.bool_)
    seen[0] = True
    order[0] = 0
    head = 0
    tail = 1
    while head < tail:
        y = order[head]
        head += 1
        for x in range(ncols):
            z = table[y, x]
            if not seen[z]:
                seen[z] = True
                order[tail] = z
                parent[z] = y
                letter[z] = x
                tail += 1
    if tail != N:
        return False
    lam = np.empty(N, np.int32)
    hit = np.zeros(N, np.bool_)
    for g in range(0, ncols, 2):
        lam[0] = table[0, g]
        for k in range(1, N):
            y = order[k]
            lam[y] = table[lam[parent[y]], letter[y]]
        hit[:] = False
        for y in range(N):
            if hit[lam[y]]:
                return False
            hit[lam[y]] = True
        for y in range(N):
            for x in range(ncols):
                if lam[table[y, x]] != table[lam[y], x]:
                    return False
    return True


@njit(cache=True)
def base_point_failures(table, rl, rs, rlen):
    """Number of relators whose trace from point 0 does not return."""
    bad = 0
    for r in range(rs.shape[0]):
        y = 0
        for i in range(rs[r], rs[r] + rlen[r]):
            y = table[y, rl[i]]
        if y != 0:
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# regular groups: BFS numbering, words, multiplication
# ---------------------------------------------------------------------------


@njit(cache=True)
def bfs_renumber(table):
    """Breadth-first renumbering from point 0.

    Returns (new_table, parent, pletter, reached, pos) with pos[old] = new.  Columns are tried in
    index order so words are shortest with lowest generator first.
    """
    N, ncols = table.shape
    pos = np.full(N, -1, np.int32)
    order = np.empty(N, np.int32)
    parent = np.full(N, -1, np.int32)
    pletter = np.full(N, -1, np.int32)
    pos[0] = 0
    order[0] = 0
    head = 0
    tail = 1
    while head < tail:
        y = order[head]
        head += 1
        for x in range(ncols):
            z = table[y, x]
            if pos[z] < 0:
                pos[z] = tail
                order[tail] = z
                parent[tail] = pos[y]
                pletter[tail] = x
                tail += 1
    new = np.empty((tail, ncols), np.int32)
    for k in range(tail):
        y = order[k]
        for x in range(ncols):
            new[k, x] = pos[table[y, x]]
    return new, parent[:tail], pletter[:tail], tail, pos


@njit(cache=True)
def build_words(parent, pletter):
    N = parent.shape[0]
    wlen = np.zeros(N, np.int32)
    for i in range(1, N):
        wlen[i] = wlen[parent[i]] + 1
    woff = np.zeros(N, np.int64)
    for i in range(1, N):
        woff[i] = woff[i - 1] + wlen[i - 1]
    total = woff[N - 1] + wlen[N - 1]
    wl = np.empty(total, np.int16)
    for i in range(1, N):
        a = woff[parent[i]]
        b = woff[i]
        for k in range(wlen[parent[i]]):
            wl[b + k] = wl[a + k]
        wl[b + wlen[i] - 1] = pletter[i]
    return wl, woff, wlen


@njit(cache=True)
def _mul(table, wl, woff, wlen, a, b):
    y = a
    o = woff[b]
    for i in range(wlen[b]):
        y = table[y, wl[o + i]]
    return y


@njit(cache=True)
def _inv(table, wl, woff, wlen, b):
    y = 0
    o = woff[b]
    for i in range(wlen[b] - 1, -1, -1):
        y = table[y, wl[o + i] ^ 1]
    return y


@njit(cache=True)
def trace(table, start, cols):
    y = start
    for i in range(cols.shape[0]):
        y = table[y, cols[i]]
    return y


@njit(cache=True)
def mul_many(table, wl, woff, wlen, a, b):
    out = np.empty(a.shape[0], np.int32)
    for i in range(a.shape[0]):
        out[i] = _mul(table, wl, woff, wlen, a[i], b[i])
    return out


@njit(cache=True)
def inv_many(table, wl, woff, wlen, b):
    out = np.empty(b.shape[0], np.int32)
    for i in range(b.shape[0]):
        out[i] = _inv(table, wl, woff, wlen, b[i])
    return out


@njit(cache=True)
def powers(table, wl, woff, wlen, elems, m):
    out = np.empty(elems.shape[0], np.int32)
    for i in range(elems.shape[0]):
        y = 0
        b = elems[i]
        k = m
        while k:
            if k & 1:
                y = _mul(table, wl, woff, wlen, y, b)
            k >>= 1
            if k:
                b = _mul(table, wl, woff, wlen, b, b)
        out[i] = y
    return out


@njit(cache=True)
def orders(table, wl, woff, wlen, elems):
    out = np.empty(elems.shape[0], np.int64)
    for i in range(elems.shape[0]):
        e = elems[i]
        y = e
        k = 1
        while y != 0:
            y = _mul(table, wl, woff, wlen, y, e)
            k += 1
        out[i] = k
    return out


@njit(cache=True)
def hom_images(parent, pletter, letter_img, table, wl, woff, wlen):
    """Image of every source point under a homomorphism into a regular group.

    ``letter_img[col]`` is the target element of source column ``col``;
    source points must be BFS-numbered (parent[i] < i).
    """
    N = parent.shape[0]
    img = np.empty(N, np.int32)
    img[0] = 0
    for i in range(1, N):
        img[i] = _mul(table, wl, woff, wlen, img[parent[i]], letter_img[pletter[i]])
    return img


@njit(cache=True)
def triple_failures(table, wl, woff, wlen, e, f, gconj, limit):
    """Triples (g1, g2, g3, form) where [e1, f2]^{x3} != [e(g1^g3), f(g2^g3)].

    ``e``/``f`` map G into the two copies inside a regular group, ``gconj``
    is the conjugation table of G and x3 is e(g3) (form 0) or f(g3) (form 1).
    """
    N = e.shape[0]
    ei = np.empty(N, np.int32)
    fi = np.empty(N, np.int32)
    for g in range(N):
        ei[g] = _inv(table, wl, woff, wlen, e[g])
        fi[g] = _inv(table, wl, woff, wlen, f[g])
    C = np.empty((N, N), np.int32)
    for a in range(N):
        for b in range(N):
            y = _mul(table, wl, woff, wlen, ei[a], fi[b])
            y = _mul(table, wl, woff, wlen, y, e[a])
            C[a, b] = _mul(table, wl, woff, wlen, y, f[b])
    out = np.empty((limit, 4), np.int64)
    k = 0
    for g3 in range(N):
        for g1 in range(N):
            h1 = gconj[g1, g3]
            for g2 in range(N):
                rhs = C[h1, gconj[g2, g3]]
                for form in range(2):
                    x = e[g3] if form == 0 else f[g3]
                    if _mul(table, wl, woff, wlen, C[g1, g2], x) != _mul(table, wl, woff, wlen, x, rhs):
                        if k < limit:
                            out[k, 0] = g1
                            out[k, 1] = g2
                            out[k, 2] = g3
                            out[k, 3] = form
                        k += 1
    return out[: min(k, limit)], k


# ---------------------------------------------------------------------------
# subgroups as base-point orbits
# ---------------------------------------------------------------------------


@njit(cache=True)
def _add_generator(table, wl, woff, wlen, ppt, pgen, orbit, olen, gens, ngens, s, budget):
    gens[ngens] = s
    j = ngens
    ngens += 1
    old = olen
    i = 0
    while i < olen:
        y = orbit[i]
        lo = j if i < old else 0
        for g in range(lo, ngens):
            z = _mul(table, wl, woff, wlen, y, gens[g])
            if pgen[z] == NONMEMBER:
                if olen >= budget:
                    return olen, ngens, OVERSIZE
                ppt[z] = y
                pgen[z] = g
                orbit[olen] = z
                olen += 1
        i += 1
    return olen, ngens, OK


@njit(cache=True)
def extend(table, wl, woff, wlen, ppt, pgen, orbit, olen, gens, ngens, cands, budget):
    """Add every candidate not yet in the orbit as a new generator."""
    for ci in range(cands.shape[0]):
        s = cands[ci]
        if pgen[s] != NONMEMBER:
            continue
        if ngens >= gens.shape[0]:
            return olen, ngens, OVERSIZE
        olen, ngens, st = _add_generator(
            table, wl, woff, wlen, ppt, pgen, orbit, olen, gens, ngens, s, budget
        )
        if st != OK:
            return olen, ngens, st
    return olen, ngens, OK


@njit(cache=True)
def normal_close(table, wl, woff, wlen, ppt, pgen, orbit, olen, gens, ngens,
                 conj, conj_inv, budget):
    """Close the orbit subgroup under conjugation by ``conj``."""
    t = 0
    while t < ngens:
        s = gens[t]
        t += 1
        for k in range(conj.shape[0]):
            z = _mul(table, wl, woff, wlen, conj_inv[k], s)
            z = _mul(table, wl, woff, wlen, z, conj[k])
            if pgen[z] == NONMEMBER:
                if ngens >= gens.shape[0]:
                    return olen, ngens, OVERSIZE
                olen, ngens, st = _add_generator(
                    table, wl, woff, wlen, ppt, pgen, orbit, olen, gens, ngens, z, budget
                )
                if st != OK:
                    return olen, ngens, st
    return olen, ngens, OK


@njit(cache=True)
def coset_labels(table, wl, woff, wlen, kelems):
    """Label each point by its coset yK; returns (labels, representatives)."""
    N = table.shape[0]
    lab = np.full(N, -1, np.int32)
    reps = np.empty(N // kelems.shape[0], np.int32)
    m = 0
    for y in range(N):
        if lab[y] < 0:
            reps[m] = y
            for i in range(kelems.shape[0]):
                lab[_mul(table, wl, woff, wlen, y, kelems[i])] = m
            m += 1
    return lab, reps[:m]


@njit(cache=True)
def quotient_table(table, lab, reps):
    m = reps.shape[0]
    ncols = table.shape[1]
    out = np.empty((m, ncols), np.int32)
    for i in range(m):
        for x in range(ncols):
            out[i, x] = lab[table[reps[i], x]]
    return out


@njit(cache=True)
def word_perm(table, cols):
    """The permutation of the rows of a coset table induced by a word."""
    n = table.shape[0]
    out = np.empty(n, np.int32)
    for c in range(n):
        y = c
        for i in range(cols.shape[0]):
            y = table[y, cols[i]]
        out[c] = y
    return out


@njit(cache=True)
def conjugation_holds(pu, px, pv):
    """Whether u x = x v as permutations (points move right: c -> c u -> c u x)."""
    for c in range(pu.shape[0]):
        if px[pu[c]] != pv[px[c]]:
            return False
    return True


@njit(cache=True)
def commutator_perm(px, py, qx, qy):
    """c -> c x^-1 y^-1 x y, given the permutations of x, y and their inverses qx, qy."""
    n = px.shape[0]
    out = np.empty(n, np.int32)
    for c in range(n):
        out[c] = py[px[qy[qx[c]]]]
    return out


@njit(cache=True)
def inverse_perm(p):
    out = np.empty_like(p)
    for c in range(p.shape[0]):
        out[p[c]] = c
    return out
