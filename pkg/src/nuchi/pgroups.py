"""Powerful and potent p-groups: predicates and executable lemma checks.

Every check returns a :class:`CheckReport` recording whether its hypothesis
held and whether its conclusion held.  A check whose hypothesis fails is
vacuous, whatever the conclusion.

Products of normal subgroups are formed as the subgroup generated by the
union of their generators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels as K
from . import perm as P
from . import words as W
from .errors import NotNormalError, NotPGroupError
from .perm import RegularGroup, Subgroup

if TYPE_CHECKING:
    from .constructions import NuResult

DEFAULT_SEED = 20240601


@dataclass
class CheckReport:
    check_id: str
    hypothesis_held: bool
    conclusion_held: bool
    witness: str | None = None
    details: dict = field(default_factory=dict)
    skipped: bool = False

    @property
    def vacuous(self) -> bool:
        return not self.hypothesis_held and not self.skipped

    @property
    def passed(self) -> bool:
        return self.hypothesis_held and self.conclusion_held

    @property
    def verdict(self) -> str:
        if self.skipped:
            return "skipped"
        if not self.hypothesis_held:
            return "vacuous"
        return "pass" if self.conclusion_held else "fail"

    def as_dict(self) -> dict:
        d = {"check_id": self.check_id, "verdict": self.verdict}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


# ---------------------------------------------------------------------------
# helpers with per-group caches
# ---------------------------------------------------------------------------


def _cache(G: RegularGroup) -> dict:
    return G.__dict__.setdefault("_pgroup_cache", {})


def _key(H: Subgroup) -> bytes:
    return H.gens.tobytes()


def whole(G: RegularGroup) -> Subgroup:
    c = _cache(G)
    if "whole" not in c:
        c["whole"] = G.whole()
    return c["whole"]


def lcs(G: RegularGroup, H: Subgroup | None = None) -> list[Subgroup]:
    """Lower central series of H (default: G), cached."""
    H = whole(G) if H is None else H
    c = _cache(G)
    k = ("lcs", _key(H))
    if k not in c:
        c[k] = P.lower_central_series(G, H)
    return c[k]


def gamma(G: RegularGroup, k: int, H: Subgroup | None = None) -> Subgroup:
    return P.lcs_term(lcs(G, H), k)


def nilpotency_class(G: RegularGroup, H: Subgroup | None = None) -> int:
    cl = P.nilpotency_class(lcs(G, H))
    if cl is None:
        raise NotPGroupError(f"{G.label}: lower central series does not reach 1")
    return cl


def power(G: RegularGroup, H: Subgroup, m: int) -> Subgroup:
    c = _cache(G)
    k = ("pow", m, _key(H))
    if k not in c:
        c[k] = P.power_subgroup(G, H, m)
    return c[k]


def omega(G: RegularGroup, H: Subgroup, p: int, n: int) -> Subgroup:
    c = _cache(G)
    k = ("omega", p, n, _key(H))
    if k not in c:
        c[k] = P.omega_subgroup(G, H, p, n)
    return c[k]


def bracket(G: RegularGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    c = _cache(G)
    k = ("comm", _key(A), _key(B))
    if k not in c:
        c[k] = P.commutator_subgroup(G, A, B, check_normal=False)
    return c[k]


def iterated(G: RegularGroup, N: Subgroup, k: int, M: Subgroup | None = None) -> Subgroup:
    """[N, _k M] with M the whole group unless given."""
    M = whole(G) if M is None else M
    for _ in range(k):
        N = bracket(G, N, M)
    return N


def center(G: RegularGroup) -> Subgroup:
    c = _cache(G)
    if "center" not in c:
        xs = np.arange(G.order, dtype=np.int32)
        keep = np.ones(G.order, bool)
        for g in G.generator_elements():
            gs = np.full(G.order, g, np.int32)
            keep &= K.mul_many(*G._w, xs, gs) == K.mul_many(*G._w, gs, xs)
        c["center"] = P.generate(G, xs[keep])
    return c["center"]


def require_p_group(G: RegularGroup, p: int | None = None) -> int:
    """The prime of a p-group G (checked against ``p`` when given)."""
    q = G._prime
    if G.order == 1:
        return p or 2
    if q is None or (p is not None and q != p):
        raise NotPGroupError(f"{G.label}: order {G.order} is not a power of {p or 'a prime'}")
    return q


def describe(G: RegularGroup, x: int) -> str:
    return W.format_word(G.word(int(x)), G.names) if x else "1"


def witness_outside(G: RegularGroup, A: Subgroup, B: Subgroup) -> str | None:
    """A generator of A outside B, or None when A <= B."""
    for s in A.gens:
        if int(s) not in B:
            return describe(G, s)
    return None


def _mod(p: int) -> int:
    return 4 if p == 2 else p


def _require_normal(G: RegularGroup, *subs: Subgroup):
    for N in subs:
        if not P.is_normal(G, N):
            raise NotNormalError(f"{G.label}: subgroup of order {N.order} is not normal")


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


def is_powerful(G: RegularGroup, p: int) -> bool:
    """G' <= G^p for odd p, G' <= G^4 for p = 2."""
    require_p_group(G, p)
    return gamma(G, 2) <= power(G, whole(G), _mod(p))


def is_potent(G: RegularGroup, p: int) -> bool:
    """gamma_{p-1}(G) <= G^p for odd p, G' <= G^4 for p = 2."""
    require_p_group(G, p)
    if p == 2:
        return is_powerful(G, 2)
    return gamma(G, p - 1) <= power(G, whole(G), p)


def is_powerfully_embedded(N: Subgroup, G: RegularGroup, p: int) -> bool:
    """[N, G] <= N^p (N^4 for p = 2); N must be normal."""
    _require_normal(G, N)
    return bracket(G, N, whole(G)) <= power(G, N, _mod(p))


def is_potently_embedded(N: Subgroup, G: RegularGroup, p: int) -> bool:
    """[N, _{p-2} G] <= N^p for odd p, and [N, G] <= N^4 for p = 2."""
    _require_normal(G, N)
    if p == 2:
        return is_powerfully_embedded(N, G, 2)
    return iterated(G, N, p - 2) <= power(G, N, p)


def embedding_witness(N: Subgroup, G: RegularGroup, p: int, potently: bool) -> str | None:
    k = p - 2 if potently and p > 2 else 1
    return witness_outside(G, iterated(G, N, k), power(G, N, _mod(p)))


# ---------------------------------------------------------------------------
# Hall collection and power structure
# ---------------------------------------------------------------------------


def hall_modulus(G: RegularGroup, L: Subgroup, p: int, k: int) -> Subgroup:
    """gamma_2(L)^{p^k} gamma_p(L)^{p^(k-1)} ... gamma_{p^k}(L)."""
    terms = [power(G, gamma(G, 2, L), p**k)]
    terms += [power(G, gamma(G, p**i, L), p ** (k - i)) for i in range(1, k + 1)]
    return P.product(G, *terms)


def _as_element(G: RegularGroup, x) -> int:
    return int(x) if isinstance(x, (int, np.integer)) else G.element(x)


def hall_collection_check(G: RegularGroup, x, y, k: int, p: int | None = None) -> CheckReport:
    """Both collection congruences for the pair (x, y) and exponent p^k.

    (xy)^{p^k} = x^{p^k} y^{p^k} modulo the Hall modulus of L = <x, y>, and
    [x, y]^{p^k} = [x^{p^k}, y] modulo the Hall modulus of M = <x, [x, y]>.
    """
    if k < 1:
        raise ValueError("k must be positive")
    p = require_p_group(G, p)
    x, y = _as_element(G, x), _as_element(G, y)
    q = p**k
    L = P.generate(G, [x, y])
    lhs = G.pow(G.mul(x, y), q)
    rhs = G.mul(G.pow(x, q), G.pow(y, q))
    first = G.mul(G.inv(rhs), lhs) in hall_modulus(G, L, p, k)
    c = G.comm(x, y)
    M = P.generate(G, [x, c])
    second = G.mul(G.inv(G.comm(G.pow(x, q), y)), G.pow(c, q)) in hall_modulus(G, M, p, k)
    witness = None
    if not (first and second):
        witness = f"x={describe(G, x)}, y={describe(G, y)}, k={k}"
    return CheckReport(
        "hall_collection", True, first and second, witness,
        {"product_form": first, "commutator_form": second},
    )


def hall_collection_sample(
    G: RegularGroup, pairs: int = 50, k: int = 1, seed: int = DEFAULT_SEED, p: int | None = None
) -> CheckReport:
    """Seeded random pairs; the report fails on the first failing pair."""
    rng = random.Random(seed)
    tried = 0
    for _ in range(pairs):
        x, y = rng.randrange(G.order), rng.randrange(G.order)
        rep = hall_collection_check(G, x, y, k, p)
        tried += 1
        if not rep.conclusion_held:
            rep.details["pairs_checked"] = tried
            return rep
    return CheckReport("hall_collection", True, True, None, {"pairs_checked": tried, "k": k})


def power_abelian_check(G: RegularGroup, p: int) -> CheckReport:
    """The three set-level power and omega conditions, for every n.

    The hypothesis recorded is "abelian, or potent with p odd", the cases in
    which the conditions are known to hold; other groups are measured only.
    """
    require_p_group(G, p)
    Gw = whole(G)
    orders = G.element_orders
    per_n = []
    ok = True
    witness = None
    n = 1
    while True:
        m = p**n
        Om = omega(G, Gw, p, n)
        c1 = int(np.count_nonzero(m % orders == 0)) == Om.order
        pw_set = np.unique(G.power_map(m))
        Pn = power(G, Gw, m)
        c2 = pw_set.size == Pn.order
        c3 = Pn.order * Om.order == G.order
        per_n.append((n, c1, c2, c3))
        if not (c1 and c2 and c3) and witness is None:
            failed = [i + 1 for i, c in enumerate((c1, c2, c3)) if not c]
            witness = f"n={n}: conditions {failed} fail"
        ok = ok and c1 and c2 and c3
        if Om.order == G.order:
            break
        n += 1
    hyp = Gw.is_abelian() or (p > 2 and is_potent(G, p))
    return CheckReport("power_abelian", hyp, ok, witness, {"per_n": per_n})


# ---------------------------------------------------------------------------
# structural lemmas
# ---------------------------------------------------------------------------


def lemma_normal(G: RegularGroup, N: Subgroup, M: Subgroup, p: int) -> CheckReport:
    """If N <= M [N, G] N^p then N <= M (N, M normal)."""
    _require_normal(G, N, M)
    hyp = N <= P.product(G, M, bracket(G, N, whole(G)), power(G, N, p))
    concl = N <= M
    return CheckReport("lemma_normal", hyp, concl, None if concl else witness_outside(G, N, M))


def lemma_power_commutator(G: RegularGroup, N: Subgroup, M: Subgroup, p: int) -> CheckReport:
    """[N^p, M] <= [N, M]^p [M, _p N] (N, M normal)."""
    _require_normal(G, N, M)
    left = bracket(G, power(G, N, p), M)
    right = P.product(G, power(G, bracket(G, N, M), p), iterated(G, M, p, N))
    concl = left <= right
    return CheckReport(
        "lemma_power_commutator", True, concl, None if concl else witness_outside(G, left, right)
    )


def lemma_potent_lcs(G: RegularGroup, p: int) -> CheckReport:
    """For potent G and every k up to the class:
    gamma_{k+1} <= gamma_k^4 (p = 2), gamma_{p-1+k} <= gamma_{k+1}^p (p odd)."""
    hyp = is_potent(G, p)
    cl = nilpotency_class(G)
    for k in range(1, max(cl, 1) + 1):
        if p == 2:
            a, b = gamma(G, k + 1), power(G, gamma(G, k), 4)
        else:
            a, b = gamma(G, p - 1 + k), power(G, gamma(G, k + 1), p)
        if not a <= b:
            return CheckReport("lemma_potent_lcs", hyp, False, f"k={k}: {witness_outside(G, a, b)}")
    return CheckReport("lemma_potent_lcs", hyp, True, None, {"class": cl})


def prop_tec(nu: NuResult, n: int, p: int) -> CheckReport:
    """For odd p, 1 < n < p and gamma_n(G) <= G^p:
    gamma_{n+1}(nu(G)) <= gamma_2(nu(G))^p."""
    G, V = nu.G, nu.nu
    hyp = p >= 3 and 1 < n < p and gamma(G, n) <= power(G, whole(G), p)
    a, b = gamma(V, n + 1), power(V, gamma(V, 2), p)
    concl = a <= b
    return CheckReport(f"prop_tec[n={n}]", hyp, concl, None if concl else witness_outside(V, a, b))


def lcs_nu_decomposition(nu: NuResult, n: int) -> CheckReport:
    """gamma_{n+1}(nu) = gamma_{n+1}(G) gamma_{n+1}(G^phi) [gamma_n(G), G^phi]."""
    V, Gs, Fs = nu.nu, nu.g_embed, nu.gphi_embed
    left = gamma(V, n + 1)
    right = P.product(
        V, gamma(V, n + 1, Gs), gamma(V, n + 1, Fs), bracket(V, gamma(V, n, Gs), Fs)
    )
    concl = left.same_as(right)
    witness = None
    if not concl:
        witness = witness_outside(V, left, right) or witness_outside(V, right, left)
    return CheckReport(f"lcs_nu_decomposition[n={n}]", True, concl, witness)


def omega_exponent_bound(Pg: RegularGroup, p: int, k: int, r: int, s: int) -> CheckReport:
    """If gamma_{k(p-1)}(P) <= gamma_r(P)^{p^s} with k(p-1) < r + s(p-1),
    then exp(Omega_i(P)) <= p^{i+k-1} for every i."""
    require_p_group(Pg, p)
    cid = f"omega_exponent_bound[k={k},r={r},s={s}]"
    hyp = k * (p - 1) < r + s * (p - 1) and gamma(Pg, k * (p - 1)) <= power(
        Pg, gamma(Pg, r), p**s
    )
    Pw = whole(Pg)
    i = 1
    while True:
        Om = omega(Pg, Pw, p, i)
        e = P.exponent(Pg, Om)
        if e > p ** (i + k - 1):
            return CheckReport(cid, hyp, False, f"i={i}: exp(Omega_i) = {e}")
        if Om.order == Pg.order:
            return CheckReport(cid, hyp, True, None, {"levels": i})
        i += 1


_DISPATCH = {
    "lemma_normal": lemma_normal,
    "lemma_power_commutator": lemma_power_commutator,
    "lemma_potent_lcs": lemma_potent_lcs,
    "prop_tec": prop_tec,
    "lcs_nu_decomposition": lcs_nu_decomposition,
    "omega_exponent_bound": omega_exponent_bound,
}


def structural_lemma_check(check_id: str, *args, **kwargs) -> CheckReport:
    try:
        fn = _DISPATCH[check_id]
    except KeyError:
        raise ValueError(f"unknown check {check_id!r}") from None
    return fn(*args, **kwargs)


def normal_family(G: RegularGroup, p: int) -> list[tuple[str, Subgroup]]:
    """Named characteristic subgroups of G, deduplicated, for lemma sweeps."""
    Gw = whole(G)
    cands = [("G", Gw), ("1", G.trivial()), ("Z", center(G))]
    cands += [(f"gamma{k}", gamma(G, k)) for k in range(2, nilpotency_class(G) + 1)]
    cands += [("G^p", power(G, Gw, p)), ("Omega1", omega(G, Gw, p, 1))]
    out: list[tuple[str, Subgroup]] = []
    for name, H in cands:
        if not any(H.same_as(K) for _, K in out):
            out.append((name, H))
    return out
