import math
import random

import pytest

from conftest import D4, Q8, S3, chi_of, group, nu_of, realized
from nuchi import perm as P
from nuchi import words as W
from nuchi.constructions import (
    GroupInput,
    build_chi,
    build_nu,
    cross_checks,
    enumerate_nu,
    measure_nu,
    nu_presentation,
    nu_triple_relators,
    realize_group,
)
from nuchi.corpus import corpus, lookup
from nuchi.enumeration import element_word_table, enumerate_group, todd_coxeter
from nuchi.errors import OrderMismatchError, OversizeError
from nuchi.presentation import Presentation, parse_presentation

TRIVIAL = "gens: a\nrel: a"
Z2 = "gens: a\nrel: a^2"
Z2xZ2 = "gens: a b\nrel: a^2\nrel: b^2\nrel: [a,b]"
Z3xZ3 = "gens: a b\nrel: a^3\nrel: b^3\nrel: [a,b]"


def inp(text, **kw):
    return GroupInput(parse_presentation(text), **kw)


# ---- oracles -------------------------------------------------------------------


def tensor_square_order(text):
    """|G (x) G| from the crossed-pairing presentation on the symbols g (x) h.

    Relations: gg' (x) h = (g^g' (x) h^g')(g' (x) h) and
    g (x) hh' = (g (x) h')(g^h' (x) h^h').  Independent of nu(G).
    """
    G = group(text)
    N = G.order

    def sym(g, h):
        return g * N + h + 1

    rels = []
    for g in range(N):
        for k in range(N):
            for h in range(N):
                rels.append((sym(G.mul(g, k), h), -sym(k, h), -sym(G.conj(g, k), G.conj(h, k))))
                rels.append((sym(g, G.mul(h, k)), -sym(G.conj(g, k), G.conj(h, k)), -sym(g, k)))
    return todd_coxeter(Presentation(N * N, tuple(rels))).coset_count


def abelian_tensor_order(invariants):
    return math.prod(math.gcd(a, b) for a in invariants for b in invariants)


def exterior_square(invariants):
    """Invariants of A ^ A for A = Z_{n1} x ... (the Schur multiplier of A)."""
    out = [math.gcd(a, b) for i, a in enumerate(invariants) for b in invariants[i + 1:]]
    return sorted((x for x in out if x > 1), reverse=True)


ABELIAN = {
    "Z2": (2,), "Z4": (4,), "Z8": (8,), "Z16": (16,), "Z2xZ2": (2, 2), "Z4xZ2": (4, 2),
    "Z2^3": (2, 2, 2), "Z8xZ2": (8, 2), "Z4xZ4": (4, 4), "Z4xZ2xZ2": (4, 2, 2),
    "Z3": (3,), "Z9": (9,), "Z3xZ3": (3, 3),
}


# ---- realize_group -------------------------------------------------------------


def test_realize_group_orders():
    assert realize_group(inp(Z2))[0].order == 2
    assert realize_group(inp("gens: a b c\nrel: a^2\nrel: b^2\nrel: c^2\nrel: [a,b]\nrel: [a,c]\nrel: [b,c]"))[0].order == 8
    assert realized("M27")[0].order == 27


def test_realize_group_order_mismatch():
    with pytest.raises(OrderMismatchError):
        realize_group(inp(Z2, expected_order=4))
    with pytest.raises(OrderMismatchError):
        realize_group(inp(S3, prime=2))


# ---- nu(G) ---------------------------------------------------------------------


def test_nu_of_trivial_group():
    r = build_nu(inp(TRIVIAL))
    assert r.nu.order == 1 and r.tensor.order == 1


def test_nu_of_z2():
    r = build_nu(inp(Z2))
    assert r.nu.order == 8 and r.tensor.order == 2
    assert r.mu.order == r.delta.order == r.tensor.order
    assert r.schur_fingerprint.order == 1


@pytest.mark.parametrize("name", sorted(ABELIAN))
def test_abelian_tensor_square(name):
    r = nu_of(name)
    inv = ABELIAN[name]
    assert r.tensor.order == abelian_tensor_order(inv)
    assert r.nu.order == r.G.order**2 * r.tensor.order
    schur = exterior_square(inv)
    assert r.schur_fingerprint.order == math.prod(schur)
    assert list(r.schur_fingerprint.abelian_invariants or []) == schur


def test_z2_cubed_nu_order():
    assert nu_of("Z2^3").nu.order == 2**15
    assert nu_of("Z2^3").tensor.order == 2**9


@pytest.mark.parametrize("text", [Z2xZ2, D4, Q8, S3])
def test_tensor_square_against_crossed_pairing(text):
    r = build_nu(inp(text))
    assert r.tensor.order == tensor_square_order(text)


def test_known_tensor_squares():
    # standard values: D4 (x) D4 has order 32, Q8 (x) Q8 order 64, S3 (x) S3 ~ Z6
    assert build_nu(inp(D4)).tensor.order == 32
    assert build_nu(inp(Q8)).tensor.order == 64
    assert build_nu(inp(S3)).tensor.order == 6


@pytest.mark.parametrize(
    "name, invariants",
    [("D4", [2]), ("Q8", []), ("M27", []), ("Heis27", [3, 3]), ("Z3xZ3", [3])],
)
def test_schur_multipliers(name, invariants):
    fp = nu_of(name).schur_fingerprint
    assert fp.order == math.prod(invariants)
    assert list(fp.abelian_invariants or []) == invariants


def test_schur_fingerprint_of_z3_squared():
    fp = build_nu(inp(Z3xZ3)).schur_fingerprint
    assert fp.as_dict() == {"order": 3, "exponent": 3, "nilpotency_class": 1, "abelian_invariants": [3]}


@pytest.mark.parametrize("text", [TRIVIAL, Z2, Z2xZ2, D4, Q8, S3])
def test_full_presentation_matches_staged_enumeration(text):
    G, tbl = realize_group(inp(text))
    base = parse_presentation(text)
    full = enumerate_group(nu_presentation(G, tbl, base, "all"))
    staged, _, _ = enumerate_nu(G, tbl, base, "all")
    assert full.order == staged.order
    assert P.fingerprint(full) == P.fingerprint(staged)


def test_relator_count_of_full_presentation():
    G, tbl = realize_group(inp(Z2))
    pres = nu_presentation(G, tbl, parse_presentation(Z2), "all")
    raw = 2 * G.order**3 + 2
    assert len(pres.relators) <= raw


def test_triple_guard():
    G, tbl = realize_group(inp("gens: a\nrel: a^128"))
    with pytest.raises(OversizeError):
        nu_presentation(G, tbl, None, "all")
    with pytest.raises(OversizeError):
        enumerate_nu(G, tbl, None, "all")


def test_generator_triples_suffice_up_to_order_16():
    for e in corpus():
        if e.input.expected_order <= 16 and "slow" not in e.tags:
            assert nu_of(e.name).generator_triples_sufficient, e.name


@pytest.mark.parametrize("name", ["D4", "Q8", "M27", "Heis27", "Z4xZ2"])
def test_random_triples_evaluate_to_identity(name):
    r = nu_of(name)
    G, tbl = realized(name)
    rng = random.Random(100)
    for _ in range(100):
        g1, g2, g3 = (rng.randrange(G.order) for _ in range(3))
        for rel in nu_triple_relators(G, tbl, [g1], [g2], [g3]):
            assert r.nu.element(rel) == 0


@pytest.mark.parametrize("name", ["D4", "Q8", "M27", "Heis27", "Z2^3"])
def test_nu_subgroup_invariants(name):
    r = nu_of(name)
    V = r.nu
    assert V.order == r.G.order**2 * r.tensor.order
    assert r.delta.element_set <= r.mu.element_set <= r.tensor.element_set
    assert P.is_normal(V, r.tensor)
    for s in r.mu.gens:
        for g in V.generator_elements():
            assert V.mul(int(s), int(g)) == V.mul(int(g), int(s))
    # rho maps the tensor square onto G'
    derived = P.commutator_subgroup(r.G, r.G.whole(), r.G.whole())
    assert len(set(r.rho[r.tensor.orbit].tolist())) == derived.order
    assert r.tensor.order // r.mu.order == derived.order
    assert r.g_embed.order == r.gphi_embed.order == r.G.order


# ---- chi(G) --------------------------------------------------------------------


def test_chi_of_trivial_and_z2():
    assert build_chi(inp(TRIVIAL)).chi.order == 1
    r = build_chi(inp(Z2))
    assert r.chi.order == 4 and r.W.order == 1
    assert P.abelian_invariants(r.chi, r.chi.whole()) == (2, 2)


def test_chi_of_z2_cubed():
    r = chi_of("Z2^3")
    X = r.chi
    assert P.nilpotency_class(P.lower_central_series(X)) == 3
    assert P.abelian_invariants(X, r.D) == (2, 2, 2, 2)
    DG = P.commutator_subgroup(X, r.D, X.whole())
    assert DG.order == 2
    assert X.order == r.t_order * r.W.order


@pytest.mark.parametrize("name", ["Z2^3", "D4", "Q8", "M27", "Heis27", "Z9xZ3", "Z4xZ4"])
def test_chi_subgroup_invariants(name):
    r = chi_of(name)
    X = r.chi
    n = r.G.order
    assert X.order == n**2 * r.D.order
    assert X.order == n * r.L.order
    assert X.order == r.t_order * r.W.order
    assert r.W.element_set == r.L.element_set & r.D.element_set
    assert P.whole_is_abelian(P.subgroup_as_group(r.W))
    for a in r.L.gens:
        for b in r.D.gens:
            assert X.mul(int(a), int(b)) == X.mul(int(b), int(a))
    assert r.R.element_set <= r.W.element_set


@pytest.mark.parametrize("name", ["Z2^3", "D4", "M27"])
def test_t_order_matches_closure_in_g_cubed(name):
    G, _ = realized(name)
    gens = [(g, g, 0) for g in range(G.order)] + [(0, g, g) for g in range(G.order)]

    def mul3(x, y):
        return tuple(G.mul(a, b) for a, b in zip(x, y))

    seen = {(0, 0, 0)}
    frontier = [(0, 0, 0)]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul3(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    assert chi_of(name).t_order == len(seen)


# ---- cross checks --------------------------------------------------------------


def test_cross_checks_on_trivial_group():
    rep = cross_checks(build_nu(inp(TRIVIAL)), build_chi(inp(TRIVIAL)))
    assert rep.ok and rep.nu_over_delta.order == 1


@pytest.mark.parametrize("name", ["Z2^3", "Z3xZ3", "D4", "Q8", "M27", "Heis27"])
def test_cross_checks(name):
    rep = cross_checks(nu_of(name), chi_of(name))
    assert rep.ok, rep.checks
    assert rep.w_over_r == nu_of(name).schur_fingerprint


# ---- order measurement by coset enumeration --------------------------------------


@pytest.mark.parametrize("text", [Z2, Z2xZ2, D4, Q8, S3])
def test_measure_nu_against_crossed_pairing(text):
    m = measure_nu(inp(text))
    want = tensor_square_order(text)
    assert m.tensor_order == want
    assert m.order == m.G.order**2 * want
    assert m.index_of_G == m.order // m.G.order


@pytest.mark.parametrize("name", ["Z4xZ2", "Z3xZ3", "Z4xZ2xZ2"])
def test_measure_nu_abelian(name):
    m = measure_nu(lookup(name).input, realized=realized(name))
    assert m.tensor_order == abelian_tensor_order(ABELIAN[name])
    assert m.generator_triples_sufficient


@pytest.mark.parametrize("name", ["M27", "Heis27"])
def test_measure_nu_matches_build(name):
    m = measure_nu(lookup(name).input, realized=realized(name))
    r = nu_of(name)
    assert (m.order, m.tensor_order) == (r.nu.order, r.tensor.order)


def test_measure_nu_triple_guard():
    with pytest.raises(OversizeError):
        measure_nu(inp("gens: a\nrel: a^128"))
