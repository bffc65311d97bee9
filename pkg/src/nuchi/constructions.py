"""The groups nu(G) and chi(G) and their distinguished subgroups.

Both groups live on two copies of the generators of G: generator ``i`` of G
is letter ``i + 1`` and its copy in G^phi is letter ``n + i + 1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import perm as P
from . import words as W
from .enumeration import (
    DEFAULT_MAX_COSETS,
    ElementTable,
    coset_enumeration,
    element_word_table,
    enumerate_group,
)
from .errors import CentralityError, CheckFailed, OrderMismatchError, OversizeError
from .perm import InvariantFingerprint, RegularGroup, Subgroup, point_budget
from .presentation import Presentation
from .words import Word

log = logging.getLogger(__name__)

MAX_TRIPLES = 1 << 20


@dataclass(frozen=True)
class GroupInput:
    presentation: Presentation
    expected_order: int | None = None
    prime: int | None = None
    name: str = ""


def realize_group(inp: GroupInput, max_cosets: int = DEFAULT_MAX_COSETS):
    G = enumerate_group(inp.presentation, max_cosets)
    G.label = inp.name or inp.presentation.label
    if inp.expected_order is not None and G.order != inp.expected_order:
        raise OrderMismatchError(
            f"{G.label}: presentation has order {G.order}, expected {inp.expected_order}"
        )
    if inp.prime is not None and not P._is_prime_power(G.order, inp.prime):
        raise OrderMismatchError(f"{G.label}: order {G.order} is not a power of {inp.prime}")
    return G, element_word_table(G)


def _phi(w: Word, n: int) -> Word:
    return W.shift(w, n)


def _doubled_names(G: RegularGroup) -> tuple[str, ...]:
    return G.names + tuple(f"{s}_phi" for s in G.names)


def _base_relators(G: RegularGroup, base: Presentation | None) -> list[Word]:
    n = G.ngens
    if base is None:
        # relators read off the table: one per defining edge closing a BFS cycle
        base_rels = []
        for x in range(G.order):
            for c in range(0, 2 * n, 2):
                y = int(G.table[x, c])
                base_rels.append(W.mul(G.word(x), W.from_columns([c]), W.inverse(G.word(y))))
        base_rels = [r for r in base_rels if r]
    else:
        base_rels = list(base.relators)
    return base_rels + [_phi(r, n) for r in base_rels]


def nu_triple_relators(G: RegularGroup, tbl: ElementTable, g1s, g2s, g3s):
    """Both defining relators of nu for every triple in g1s x g2s x g3s.

    Conjugates g^{g3} are computed in G and replaced by their table words.
    """
    n = G.ngens
    rels = []
    for g3 in g3s:
        w3 = tbl[g3]
        w3p = _phi(w3, n)
        for g1 in g1s:
            w1 = tbl[g1]
            c1 = tbl[G.conj(g1, g3)]
            for g2 in g2s:
                comm = W.commutator(w1, _phi(tbl[g2], n))
                rhs = W.inverse(W.commutator(c1, _phi(tbl[G.conj(g2, g3)], n)))
                rels.append(W.mul(W.conjugate(comm, w3), rhs))
                rels.append(W.mul(W.conjugate(comm, w3p), rhs))
    return rels


def nu_presentation(
    G: RegularGroup,
    tbl: ElementTable,
    base: Presentation | None = None,
    triples: str = "all",
    allow_large: bool = False,
) -> Presentation:
    """Presentation of nu(G).

    ``triples="all"`` instantiates the relations for every element triple;
    ``"generators"`` only for generators g1, g2 and conjugators g3 among the
    generators and their inverses.
    """
    N = G.order
    if triples == "all":
        if N**3 > MAX_TRIPLES and not allow_large:
            raise OversizeError(f"{N}^3 element triples exceed {MAX_TRIPLES}")
        els = range(N)
        rels = nu_triple_relators(G, tbl, els, els, els)
    elif triples == "generators":
        gens = [int(x) for x in G.generator_elements()]
        conj = sorted(set(gens) | {G.inv(x) for x in gens})
        rels = nu_triple_relators(G, tbl, gens, gens, conj)
    else:
        raise ValueError(f"unknown triples mode {triples!r}")
    return Presentation(
        2 * G.ngens,
        tuple(_base_relators(G, base) + rels),
        f"nu({G.label})",
        _doubled_names(G),
    )


def chi_presentation(G: RegularGroup, tbl: ElementTable, base: Presentation | None = None) -> Presentation:
    n = G.ngens
    rels = [W.commutator(tbl[g], _phi(tbl[g], n)) for g in range(G.order)]
    return Presentation(
        2 * n, tuple(_base_relators(G, base) + rels), f"chi({G.label})", _doubled_names(G)
    )


def _letter_images(target: RegularGroup, images: list[int]) -> np.ndarray:
    out = np.empty(2 * len(images), np.int32)
    for i, x in enumerate(images):
        out[2 * i] = x
        out[2 * i + 1] = target.inv(x)
    return out


def hom_images(source: RegularGroup, target: RegularGroup, gen_images: list[int]) -> np.ndarray:
    """Image in ``target`` of every element of ``source`` under the generator map."""
    li = _letter_images(target, gen_images)
    return K.hom_images(source.parent, source.pletter, li, *target._w)


@dataclass
class NuResult:
    G: RegularGroup
    nu: RegularGroup
    g_embed: Subgroup
    gphi_embed: Subgroup
    tensor: Subgroup
    delta: Subgroup
    mu: Subgroup
    schur_fingerprint: InvariantFingerprint
    rho_gen_images: list[P.Permutation]
    rho: np.ndarray
    triples: str
    generator_triples_sufficient: bool | None
    relator_count: int


@dataclass
class ChiResult:
    G: RegularGroup
    chi: RegularGroup
    g_embed: Subgroup
    gphi_embed: Subgroup
    L: Subgroup
    D: Subgroup
    W: Subgroup
    R: Subgroup
    t_order: int
    chi_derived: Subgroup


def conjugation_table(G: RegularGroup) -> np.ndarray:
    """``t[a, b] = a^b = b^-1 a b`` for all elements of G."""
    N = G.order
    a = np.tile(np.arange(N, dtype=np.int32), N)
    b = np.repeat(np.arange(N, dtype=np.int32), N)
    binv = G.inverses[b]
    t = K.mul_many(*G._w, K.mul_many(*G._w, binv, a), b)
    return t.reshape(N, N).T.copy()


def triple_failures(G: RegularGroup, nu: RegularGroup, limit: int = 64):
    """Element triples whose defining relations of nu fail in ``nu``.

    Every relation is evaluated with the element arithmetic of the regular
    representation.  Returns (sample of failing (g1, g2, g3, form), count).
    """
    n = G.ngens
    gens = [int(x) for x in nu.generator_elements()]
    e = hom_images(G, nu, gens[:n])
    f = hom_images(G, nu, gens[n:])
    return K.triple_failures(*nu._w, e, f, conjugation_table(G), limit)


def enumerate_nu(
    G: RegularGroup,
    tbl: ElementTable,
    base: Presentation | None,
    triples: str = "all",
    max_cosets: int = DEFAULT_MAX_COSETS,
    allow_large: bool = False,
):
    """Realise nu(G); returns (group, generator triples sufficient?, relator count).

    In ``"all"`` mode the group of the generator-triple presentation is
    enumerated first and the relations for every element triple are then
    evaluated in it.  The group defined by all triples is a quotient of this
    one, so when nothing fails the two are equal.  Relators for failing
    triples are added and the enumeration repeated until none fail.
    """
    if triples not in ("all", "generators"):
        raise ValueError(f"unknown triples mode {triples!r}")
    N = G.order
    if triples == "all" and N**3 > MAX_TRIPLES and not allow_large:
        raise OversizeError(f"{N}^3 element triples exceed {MAX_TRIPLES}")
    core = nu_presentation(G, tbl, base, "generators")
    nu = enumerate_group(core, max_cosets)
    if triples == "generators":
        return nu, None, len(core.relators)
    nrel = len(_base_relators(G, base)) + 2 * N**3
    failing, count = triple_failures(G, nu)
    sufficient = count == 0
    extra: list[Word] = []
    while count:
        log.info("%s: %d element-triple relations fail; re-enumerating", core.label, count)
        for g1, g2, g3, _ in failing:
            extra += nu_triple_relators(G, tbl, [int(g1)], [int(g2)], [int(g3)])
        pres = Presentation(core.generator_count, core.relators + tuple(extra), core.label, core.names)
        nu = enumerate_group(pres, max_cosets)
        failing, count = triple_failures(G, nu)
    return nu, sufficient, nrel


def predicted_nu_order(G: RegularGroup) -> int | None:
    """|G|^2 |G (x) G| for abelian G (a product of gcds of invariant
    factors); None otherwise.  Used only to refuse hopeless enumerations."""
    if not P.whole_is_abelian(G):
        return None
    inv = P.abelian_invariants(G, G.whole())
    return G.order**2 * math.prod(math.gcd(a, b) for a in inv for b in inv)


# work limit for measure_nu: element pairs x cosets x word length
MAX_COSET_WORK = 1 << 34


@dataclass
class NuMeasurement:
    """Orders of nu(G) and [G, G^phi] found by coset enumeration, for groups
    whose nu(G) is too large to realise point by point."""

    G: RegularGroup
    order: int
    tensor_order: int
    index_of_G: int
    index_of_tensor: int
    generator_triples_sufficient: bool
    relator_count: int


def _coset_triple_failures(G, tbl, rows, limit=64):
    """Element-triple relations that fail in the action on the cosets of G.

    Only generators are needed as conjugators: g -> x_g is a homomorphism, so
    a relation for conjugators s and t gives the one for st.
    """
    n = G.ngens
    gens = [int(x) for x in G.generator_elements()]
    left = [K.word_perm(rows, np.asarray(W.to_columns(tbl[g]), np.int32)) for g in range(G.order)]
    right = [K.word_perm(rows, np.asarray(W.to_columns(_phi(tbl[g], n)), np.int32)) for g in range(G.order)]
    left_inv = [K.inverse_perm(x) for x in left]
    right_inv = [K.inverse_perm(x) for x in right]
    cols = [np.ascontiguousarray(rows[:, c]) for c in range(rows.shape[1])]

    def perm(a, b):
        return K.commutator_perm(left[a], right[b], left_inv[a], right_inv[b])

    fails = []
    for a in range(G.order):
        for b in range(G.order):
            pu = perm(a, b)
            for i, s in enumerate(gens):
                a2, b2 = G.conj(a, s), G.conj(b, s)
                pv = pu if (a2, b2) == (a, b) else perm(a2, b2)
                for col in (2 * i, 2 * (n + i)):
                    if not K.conjugation_holds(pu, cols[col], pv):
                        fails.append((a, b, s))
                        if len(fails) >= limit:
                            return fails
    return fails


def measure_nu(
    inp: GroupInput, max_cosets: int = DEFAULT_MAX_COSETS, allow_large: bool = False, realized=None
) -> NuMeasurement:
    """|nu(G)| and |[G, G^phi]| without realising nu(G).

    The group K of the generator-triple presentation maps onto G x G, so the
    image of G in K is isomorphic to G and |K| = |G| [K : G].  A relator that
    acts trivially on the cosets of G lies in that image and maps to 1 in
    G x G, hence is trivial; the element-triple relations are checked this way
    and failing ones are added before enumerating again.
    """
    G, tbl = realized or realize_group(inp, max_cosets)
    if G.order**3 > MAX_TRIPLES and not allow_large:
        raise OversizeError(f"{G.order}^3 element triples exceed {MAX_TRIPLES}")
    n = G.ngens
    xs = [W.generator(i) for i in range(n)]
    core = nu_presentation(G, tbl, inp.presentation, "generators")
    rels = core.relators
    sufficient = None
    while True:
        pres = Presentation(core.generator_count, rels, core.label, core.names)
        table = coset_enumeration(pres, xs, min(max_cosets, point_budget()))
        m = table.coset_count
        if G.order**2 * m * max(tbl.word_length_bound, 1) * 4 > MAX_COSET_WORK:
            raise OversizeError(f"nu({G.label}): element-triple check over {m} cosets is beyond the budget")
        fails = _coset_triple_failures(G, tbl, table.rows)
        if sufficient is None:
            sufficient = not fails
        if not fails:
            break
        extra = []
        for a, b, s in fails:
            extra += nu_triple_relators(G, tbl, [a], [b], [s])
        rels = rels + tuple(extra)
    comms = [W.commutator(tbl[a], _phi(tbl[b], n)) for a in range(G.order) for b in range(G.order)]
    t = coset_enumeration(pres, comms, min(max_cosets, point_budget())).coset_count
    order = m * G.order
    return NuMeasurement(G, order, order // t, m, t, sufficient, len(_base_relators(G, inp.presentation)) + 2 * G.order**3)


def build_nu(
    inp: GroupInput,
    triples: str = "all",
    max_cosets: int = DEFAULT_MAX_COSETS,
    allow_large: bool = False,
    realized=None,
) -> NuResult:
    G, tbl = realized or realize_group(inp, max_cosets)
    n = G.ngens
    est = predicted_nu_order(G)
    if est is not None and est > min(max_cosets, point_budget()):
        raise OversizeError(f"nu({G.label}) has order {est}, beyond the budget")
    nu, sufficient, nrel = enumerate_nu(G, tbl, inp.presentation, triples, max_cosets, allow_large)
    nu.label = f"nu({G.label})"
    xs = [W.generator(i) for i in range(n)]
    g_embed = P.subgroup_from_words(nu, xs)
    gphi_embed = P.subgroup_from_words(nu, [_phi(x, n) for x in xs])
    tensor = P.normal_closure(nu, [W.commutator(x, _phi(y, n)) for x in xs for y in xs])
    delta = P.subgroup_from_words(nu, [W.commutator(tbl[g], _phi(tbl[g], n)) for g in range(G.order)])
    gen_images = [int(x) for x in G.generator_elements()] * 2
    rho = hom_images(nu, G, gen_images)
    mu = P.generate(nu, tensor.orbit[rho[tensor.orbit] == 0])
    for s in mu.gens:
        for g in nu.generator_elements():
            if nu.mul(int(s), int(g)) != nu.mul(int(g), int(s)):
                raise CentralityError(f"{nu.label}: mu is not central")
    schur = P.fingerprint(P.subquotient(mu, delta))
    return NuResult(
        G, nu, g_embed, gphi_embed, tensor, delta, mu, schur,
        G.generators * 2, rho, triples, sufficient, nrel,
    )


def build_chi(inp: GroupInput, max_cosets: int = DEFAULT_MAX_COSETS, realized=None) -> ChiResult:
    G, tbl = realized or realize_group(inp, max_cosets)
    n = G.ngens
    chi = enumerate_group(chi_presentation(G, tbl, inp.presentation), max_cosets)
    chi.label = f"chi({G.label})"
    xs = [W.generator(i) for i in range(n)]
    g_embed = P.subgroup_from_words(chi, xs)
    gphi_embed = P.subgroup_from_words(chi, [_phi(x, n) for x in xs])
    L = P.subgroup_from_words(chi, [W.mul(W.inverse(tbl[g]), _phi(tbl[g], n)) for g in range(G.order)])
    D = P.commutator_subgroup(chi, g_embed, gphi_embed, check_normal=False)
    Wg = P.intersection(L, D)
    GL = P.commutator_subgroup(chi, g_embed, L)
    R = P.commutator_subgroup(chi, GL, gphi_embed)
    G3 = P.direct_product([G, G, G])
    diag = []
    for g in range(G.order):
        w = tbl[g]
        diag.append(G3.element(W.mul(G3.embed(0, w), G3.embed(1, w))))
        diag.append(G3.element(W.mul(G3.embed(1, w), G3.embed(2, w))))
    T = P.generate(G3, diag)
    whole = chi.whole()
    derived = P.commutator_subgroup(chi, whole, whole)
    return ChiResult(G, chi, g_embed, gphi_embed, L, D, Wg, R, T.order, derived)


@dataclass
class CrossCheckReport:
    nu_over_delta: InvariantFingerprint
    chi_over_r: InvariantFingerprint
    w_over_r: InvariantFingerprint
    schur: InvariantFingerprint
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def cross_checks(nu: NuResult, chi: ChiResult, strict: bool = True) -> CrossCheckReport:
    a = P.fingerprint(P.quotient_group(nu.nu, nu.delta))
    b = P.fingerprint(P.quotient_group(chi.chi, chi.R))
    wr = P.fingerprint(P.subquotient(chi.W, chi.R))
    rep = CrossCheckReport(a, b, wr, nu.schur_fingerprint)
    rep.checks = {
        "nu_delta_order_eq_chi_r_order": nu.nu.order // nu.delta.order == chi.chi.order // chi.R.order,
        "nu_delta_fingerprint_eq_chi_r": a == b,
        "w_r_fingerprint_eq_mu_delta": wr == nu.schur_fingerprint,
    }
    if strict and not rep.ok:
        raise CheckFailed("nu/Delta and chi/R disagree", witness=(a, b, wr, nu.schur_fingerprint))
    return rep
