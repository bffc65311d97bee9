"""Theorem-level verification over the corpus.

For each corpus entry the pipeline realises G, builds nu(G) and chi(G),
runs the cross-checks and the lemma suite, then the theorem and corollary
checks.  Results are plain dicts ready for JSON; nothing in them depends on
timing or completion order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import perm as P
from . import pgroups as PG
from . import words as W
from .constructions import (
    ChiResult,
    NuMeasurement,
    NuResult,
    build_chi,
    build_nu,
    cross_checks,
    measure_nu,
    realize_group,
    triple_failures,
)
from .corpus import CorpusEntry, corpus, validate_tags
from .enumeration import DEFAULT_MAX_COSETS
from .errors import NuChiError, OrderMismatchError, OversizeError
from .pgroups import CheckReport, DEFAULT_SEED
from .tagexpr import matches, mentions

log = logging.getLogger(__name__)

SCHEMA = 1
NU_SKIP = "nu(G) over budget"
CHI_SKIP = "chi(G) over budget"
THEOREMS = ("A", "B", "C")

# claim -> check id prefixes that exercise it
COVERAGE = {
    "nu_presentation": ["nu.element_triples_hold", "nu.order_identity"],
    "tensor_square_identification": ["nu.abelian_tensor_oracle", "nu.order_identity"],
    "mu_delta_schur_sequence": ["nu.mu_central", "cross.w_r_mu_delta_fingerprint"],
    "rho_epimorphism": ["nu.rho_epimorphism"],
    "powerful_potent_definitions": ["pred.potent_iff_powerful", "tags.consistent"],
    "embedding_definitions": ["pred.potently_embedded_self"],
    "power_abelian_conditions": ["power_abelian"],
    "lemma_normal": ["lemma_normal"],
    "hall_collection": ["hall_collection"],
    "lemma_power_commutator": ["lemma_power_commutator"],
    "lemma_potent_lcs": ["lemma_potent_lcs"],
    "prop_tec": ["prop_tec"],
    "theorem_A": ["theorem_A"],
    "theorem_B": ["theorem_B"],
    "corollary_nu_potent": ["corollary_nu_potent"],
    "corollary_schur_exponent": ["corollary_schur_exponent"],
    "lcs_nu_decomposition": ["lcs_nu_decomposition"],
    "omega_exponent_bound": ["omega_exponent_bound"],
    "chi_order_identities": ["chi.order_identity", "chi.t_w_identity"],
    "nu_delta_chi_r_isomorphism": ["cross.nu_delta_chi_r_order", "cross.nu_delta_chi_r_fingerprint"],
    "theorem_C": ["theorem_C"],
    "p2_counterexample": ["p2_counterexample"],
    "corollary_chi_potent": ["corollary_chi_potent"],
}

# theorem or corollary id -> check id prefixes deciding its verdict
VERDICT_GROUPS = {
    "A": ("A", ["theorem_A"]),
    "B": ("B", ["theorem_B"]),
    "corollary_nu_potent": ("B", ["corollary_nu_potent"]),
    "corollary_schur_exponent": ("B", ["corollary_schur_exponent"]),
    "C": ("C", ["theorem_C"]),
    "corollary_chi_potent": ("C", ["corollary_chi_potent"]),
    "p2_counterexample": ("C", ["p2_counterexample"]),
}


@dataclass(frozen=True)
class Budget:
    max_cosets: int = DEFAULT_MAX_COSETS
    allow_large_triples: bool = False


@dataclass
class TheoremReport:
    group: str
    theorem: str
    checks: list[CheckReport]
    verdict: str = field(init=False)

    def __post_init__(self):
        self.verdict = theorem_verdict(self.checks)


def theorem_verdict(checks: list[CheckReport]) -> str:
    if any(c.verdict == "fail" for c in checks):
        return "fail"
    if any(c.verdict == "skipped" for c in checks):
        return "skipped(oversize)"
    if not checks or all(c.vacuous for c in checks):
        return "vacuous"
    return "pass"


def skipped(check_id: str, reason: str) -> CheckReport:
    return CheckReport(check_id, True, False, reason, skipped=True)


def combine(check_id: str, reports: list[CheckReport]) -> CheckReport:
    """One report for a sweep: hypothesis held somewhere, conclusion
    held wherever the hypothesis did."""
    live = [r for r in reports if r.hypothesis_held]
    bad = [r for r in live if not r.conclusion_held]
    witness = bad[0].witness if bad else None
    return CheckReport(check_id, bool(live), not bad, witness, {"instances": len(reports), "live": len(live)})


def _equal(check_id: str, got, want, hyp: bool = True) -> CheckReport:
    ok = got == want
    return CheckReport(check_id, hyp, ok, None if ok else f"got {got}, expected {want}")


def _plog(n: int, p: int) -> int:
    return round(math.log(n, p)) if n > 1 else 0


def abelian_tensor_order(invariants) -> int:
    """|A (x)_Z A| for A = Z_{n1} x ... x Z_{nr}: the product of gcd(ni, nj)."""
    return math.prod(math.gcd(a, b) for a in invariants for b in invariants)


# ---------------------------------------------------------------------------
# check groups
# ---------------------------------------------------------------------------


def construction_checks(
    G, nu: NuResult | None, chi: ChiResult | None, measured: NuMeasurement | None = None
) -> list[CheckReport]:
    out = []
    n2 = G.order**2
    if nu is not None:
        out.append(_equal("nu.order_identity", nu.nu.order, n2 * nu.tensor.order))
        _, count = triple_failures(G, nu.nu, 1)
        out.append(_equal("nu.element_triples_hold", count, 0))
        ab = P.whole_is_abelian(G)
        want = abelian_tensor_order(P.abelian_invariants(G, G.whole())) if ab else None
        out.append(CheckReport(
            "nu.abelian_tensor_oracle", ab, (nu.tensor.order == want) if ab else True,
            None if not ab or nu.tensor.order == want else f"|[G,G^phi]| = {nu.tensor.order}, oracle {want}",
        ))
        Gd = PG.gamma(G, 2)
        onto = np.unique(nu.rho).size == G.order
        derived = np.array_equal(np.unique(nu.rho[nu.tensor.orbit]), np.sort(Gd.orbit))
        ok = onto and derived and nu.tensor.order == Gd.order * nu.mu.order
        out.append(CheckReport("nu.rho_epimorphism", True, ok))
        central = all(
            nu.nu.mul(int(s), int(g)) == nu.nu.mul(int(g), int(s))
            for s in nu.mu.gens for g in nu.nu.generator_elements()
        )
        out.append(CheckReport("nu.mu_central", True, central and nu.delta <= nu.mu))
    elif measured is not None:
        # orders only, from coset enumeration
        out.append(_equal("nu.order_identity", measured.order, n2 * measured.tensor_order))
        out.append(CheckReport("nu.element_triples_hold", True, True))
        ab = P.whole_is_abelian(G)
        want = abelian_tensor_order(P.abelian_invariants(G, G.whole())) if ab else None
        ok = measured.tensor_order == want if ab else True
        out.append(CheckReport(
            "nu.abelian_tensor_oracle", ab, ok,
            None if ok else f"|[G,G^phi]| = {measured.tensor_order}, oracle {want}",
        ))
        out += [skipped(cid, NU_SKIP) for cid in ("nu.rho_epimorphism", "nu.mu_central")]
    else:
        for cid in ("nu.order_identity", "nu.element_triples_hold", "nu.abelian_tensor_oracle",
                    "nu.rho_epimorphism", "nu.mu_central"):
            out.append(skipped(cid, NU_SKIP))
    if chi is not None:
        out.append(_equal("chi.order_identity", chi.chi.order, n2 * chi.D.order))
        out.append(_equal("chi.t_w_identity", chi.chi.order, chi.t_order * chi.W.order))
    else:
        out += [skipped(c, CHI_SKIP) for c in ("chi.order_identity", "chi.t_w_identity")]
    if nu is not None and chi is not None:
        rep = cross_checks(nu, chi, strict=False)
        out.append(CheckReport("cross.nu_delta_chi_r_order", True, rep.checks["nu_delta_order_eq_chi_r_order"]))
        out.append(CheckReport(
            "cross.nu_delta_chi_r_fingerprint", True, rep.checks["nu_delta_fingerprint_eq_chi_r"],
            None if rep.checks["nu_delta_fingerprint_eq_chi_r"] else f"{rep.nu_over_delta} vs {rep.chi_over_r}",
        ))
        out.append(CheckReport(
            "cross.w_r_mu_delta_fingerprint", True, rep.checks["w_r_fingerprint_eq_mu_delta"],
            None if rep.checks["w_r_fingerprint_eq_mu_delta"] else f"{rep.w_over_r} vs {rep.schur}",
        ))
    else:
        for cid in ("cross.nu_delta_chi_r_order", "cross.nu_delta_chi_r_fingerprint",
                    "cross.w_r_mu_delta_fingerprint"):
            out.append(skipped(cid, "construction over budget"))
    return out


def predicate_checks(G, p: int, tags) -> list[CheckReport]:
    pw, pt = PG.is_powerful(G, p), PG.is_potent(G, p)
    return [
        CheckReport("tags.consistent", True, not validate_tags(G, p, tags)),
        CheckReport("pred.potent_iff_powerful", p in (2, 3), pw == pt),
        CheckReport("pred.potently_embedded_self", True, PG.is_potently_embedded(PG.whole(G), G, p) == pt),
    ]


def lemma_checks(G, p: int, nu: NuResult | None, chi: ChiResult | None, seed: int) -> list[CheckReport]:
    out = [PG.power_abelian_check(G, p)]
    out.append(_rename(PG.hall_collection_sample(G, 50, 1, seed, p), "hall_collection[k=1]"))
    out.append(_rename(PG.hall_collection_sample(G, 20, 2, seed + 1, p), "hall_collection[k=2]"))
    fam = [H for _, H in PG.normal_family(G, p)]
    out.append(combine("lemma_normal", [PG.lemma_normal(G, N, M, p) for N in fam for M in fam]))
    out.append(combine(
        "lemma_power_commutator", [PG.lemma_power_commutator(G, N, M, p) for N in fam for M in fam]
    ))
    out.append(PG.lemma_potent_lcs(G, p))
    grid = [PG.omega_exponent_bound(G, p, k, r, s) for k in (1, 2, 3) for r in range(1, 5) for s in (1, 2)]
    out.append(combine("omega_exponent_bound", grid))
    if nu is None:
        for cid in ("lemma_normal[nu]", "lemma_power_commutator[nu]", "lemma_potent_lcs[nu]",
                    "prop_tec", "lcs_nu_decomposition", "omega_exponent_bound[nu]"):
            out.append(skipped(cid, NU_SKIP))
    else:
        V = nu.nu
        vf = _dedup([PG.whole(V), PG.gamma(V, 2), nu.tensor, PG.gamma(V, 3), nu.mu, V.trivial()])
        out.append(combine("lemma_normal[nu]", [PG.lemma_normal(V, N, M, p) for N in vf for M in vf]))
        out.append(combine(
            "lemma_power_commutator[nu]", [PG.lemma_power_commutator(V, N, M, p) for N in vf for M in vf]
        ))
        out.append(_rename(PG.lemma_potent_lcs(V, p), "lemma_potent_lcs[nu]"))
        out += [PG.prop_tec(nu, n, p) for n in range(2, max(p, 3))]
        cl = PG.nilpotency_class(V)
        out += [PG.lcs_nu_decomposition(nu, n) for n in range(1, cl + 1)]
        out.append(combine(
            "omega_exponent_bound[nu]",
            [PG.omega_exponent_bound(V, p, 2, p, 1), PG.omega_exponent_bound(V, p, 1, 2, 1)],
        ))
    if chi is None:
        out.append(skipped("lemma_potent_lcs[chi]", CHI_SKIP))
    else:
        out.append(_rename(PG.lemma_potent_lcs(chi.chi, p), "lemma_potent_lcs[chi]"))
    return out


def _rename(r: CheckReport, cid: str) -> CheckReport:
    r.check_id = cid
    return r


def _dedup(subs):
    out = []
    for H in subs:
        if not any(H.same_as(K) for K in out):
            out.append(H)
    return out


def theorem_a_checks(G, p: int, nu: NuResult | None) -> list[CheckReport]:
    if nu is None:
        return [skipped("theorem_A.a", NU_SKIP), skipped("theorem_A.b", NU_SKIP)]
    hyp = PG.is_potent(G, p)
    V = nu.nu
    ok = PG.is_potently_embedded(nu.tensor, V, p)
    out = [CheckReport("theorem_A.a", hyp, ok, None if ok else PG.embedding_witness(nu.tensor, V, p, True))]
    for k in range(2, PG.nilpotency_class(V) + 1):
        Gk = PG.gamma(V, k)
        ok = PG.is_potently_embedded(Gk, V, p)
        out.append(CheckReport(f"theorem_A.b[k={k}]", hyp, ok, None if ok else PG.embedding_witness(Gk, V, p, True)))
    return out


def theorem_b_checks(G, p: int, nu: NuResult | None) -> list[CheckReport]:
    ids = ("theorem_B.a", "theorem_B.b", "corollary_nu_potent", "corollary_schur_exponent")
    if nu is None:
        return [skipped(c, NU_SKIP) for c in ids]
    V = nu.nu
    potent = PG.is_potent(G, p)
    eG = P.exponent(G, PG.whole(G))
    e = _plog(eG, p)
    eV = P.exponent(V, PG.whole(V))
    om = P.exponent(V, PG.omega(V, PG.whole(V), p, e)) if e else 1
    note = (
        f"exp(nu)={eV}, p^(e+1)={p ** (e + 1)}, equality {'holds' if eV == p ** (e + 1) else 'fails'}; "
        f"exp(Omega_e(nu))={om}"
    )
    out = [CheckReport("theorem_B.a", potent, p ** (e + 1) % eV == 0, note)]
    hyp_b = p >= 3 and PG.gamma(G, p - 2) <= PG.power(G, PG.whole(G), p)
    nu_potent = PG.is_potent(V, p)
    ok = nu_potent and eV == eG
    out.append(CheckReport("theorem_B.b", hyp_b, ok, None if ok else f"potent={nu_potent}, exp(nu)={eV}"))
    hyp = p >= 5 and PG.is_powerful(G, p)
    ok = nu_potent and eV == eG
    out.append(CheckReport("corollary_nu_potent", hyp, ok, None if ok else f"potent={nu_potent}, exp(nu)={eV}"))
    eM = nu.schur_fingerprint.exponent
    eMu = P.exponent(V, nu.mu)
    ok = (p * eG) % eM == 0 and (p * eG) % eMu == 0
    out.append(CheckReport("corollary_schur_exponent", potent, ok, f"exp(M)={eM}, exp(mu)={eMu}, p*exp(G)={p * eG}"))
    return out


def theorem_c_checks(G, p: int, chi: ChiResult | None) -> list[CheckReport]:
    ids = ("theorem_C.derived", "theorem_C.D", "corollary_chi_potent")
    if chi is None:
        return [skipped(c, CHI_SKIP) for c in ids]
    X = chi.chi
    hyp = p > 2 and PG.is_powerful(G, p)
    out = []
    for cid, N in (("theorem_C.derived", chi.chi_derived), ("theorem_C.D", chi.D)):
        ok = PG.is_powerfully_embedded(N, X, p)
        out.append(CheckReport(cid, hyp, ok, None if ok else PG.embedding_witness(N, X, p, False)))
    eG = P.exponent(G, PG.whole(G))
    eX = P.exponent(X, PG.whole(X))
    pot = PG.is_potent(X, p)
    ok = pot and eG % eX == 0
    out.append(CheckReport(
        "corollary_chi_potent", p >= 5 and PG.is_powerful(G, p), ok, None if ok else f"potent={pot}, exp(chi)={eX}"
    ))
    if p == 2 and P.whole_is_abelian(G) and P.abelian_invariants(G, G.whole()) == (2, 2, 2):
        out += p2_counterexample_checks(chi)
    return out


def p2_counterexample_checks(chi: ChiResult) -> list[CheckReport]:
    """D(G) ~ Z2^4 and [D(G), G] = <[a, b^phi, c]> ~ Z2 for G = Z2^3; D(G)
    is not powerfully embedded and chi(G) has class 3."""
    X, n = chi.chi, chi.G.ngens
    a, b, c = (W.generator(i) for i in range(3))
    phi = lambda w: W.shift(w, n)  # noqa: E731
    abc = W.commutator(a, phi(b), c)
    gens = [W.commutator(a, phi(b)), W.commutator(a, phi(c)), W.commutator(b, phi(c)), abc]
    D_claimed = P.subgroup_from_words(X, gens)
    DG = PG.bracket(X, chi.D, chi.g_embed)
    inv = P.abelian_invariants(X, chi.D) if chi.D.is_abelian() else None
    out = [
        _equal("p2_counterexample.D_invariants", inv, (2, 2, 2, 2)),
        CheckReport("p2_counterexample.D_generators", True, D_claimed.same_as(chi.D)),
        _equal("p2_counterexample.DG_order", DG.order, 2),
        CheckReport("p2_counterexample.DG_generator", True, DG.same_as(P.subgroup_from_words(X, [abc]))
                    and X.element(abc) != 0),
        _equal("p2_counterexample.chi_class", PG.nilpotency_class(X), 3),
    ]
    emb = PG.is_powerfully_embedded(chi.D, X, 2)
    out.append(CheckReport(
        "p2_counterexample.D_not_powerfully_embedded", True, not emb,
        PG.embedding_witness(chi.D, X, 2, False),
    ))
    return out


# ---------------------------------------------------------------------------
# per-entry pipeline
# ---------------------------------------------------------------------------


def _orders(G, nu: NuResult | None, chi: ChiResult | None, reasons: dict, measured=None) -> dict:
    d = {"G": G.order}
    if nu is not None:
        d.update(
            nu=nu.nu.order, tensor=nu.tensor.order, delta=nu.delta.order, mu=nu.mu.order,
            schur_invariants=list(nu.schur_fingerprint.abelian_invariants),
            generator_triples_sufficient=nu.generator_triples_sufficient,
        )
    elif measured is not None:
        d.update(
            nu=measured.order, tensor=measured.tensor_order, nu_mode="coset enumeration",
            generator_triples_sufficient=measured.generator_triples_sufficient,
        )
        d["nu_skip_reason"] = reasons["nu"]
    else:
        d["nu"] = "skipped(oversize)"
        d["nu_skip_reason"] = reasons["nu"]
    if chi is not None:
        d.update(chi=chi.chi.order, L=chi.L.order, D=chi.D.order, W=chi.W.order, R=chi.R.order, T=chi.t_order)
    else:
        d["chi"] = "skipped(oversize)"
        d["chi_skip_reason"] = reasons["chi"]
    return d


def run_entry(
    entry: CorpusEntry,
    theorems=THEOREMS,
    seed: int = DEFAULT_SEED,
    budget: Budget = Budget(),
) -> dict:
    """The report dict for one corpus entry."""
    name = entry.name
    rec = {"group": name, "construction_orders": {}, "checks": [], "verdicts": {}}
    try:
        realized = realize_group(entry.input, budget.max_cosets)
    except OrderMismatchError as ex:
        rec["checks"].append(CheckReport("realize.order", True, False, str(ex)).as_dict())
        rec["verdicts"] = {t: "fail" for t, (th, _) in VERDICT_GROUPS.items() if th in theorems}
        return rec
    except OversizeError as ex:
        rec["checks"].append(skipped("realize.order", str(ex)).as_dict())
        rec["verdicts"] = {t: "skipped(oversize)" for t, (th, _) in VERDICT_GROUPS.items() if th in theorems}
        return rec
    G = realized[0]
    p = entry.prime or PG.require_p_group(G)
    checks = [CheckReport("realize.order", True, True)]
    nu = chi = measured = None
    reasons = {"nu": NU_SKIP, "chi": CHI_SKIP}
    try:
        nu = build_nu(entry.input, max_cosets=budget.max_cosets,
                      allow_large=budget.allow_large_triples, realized=realized)
    except OversizeError as ex:
        reasons["nu"] = str(ex)
        log.info("%s: nu skipped: %s", name, ex)
        try:
            measured = measure_nu(entry.input, budget.max_cosets, budget.allow_large_triples, realized)
        except OversizeError as ex2:
            log.info("%s: nu orders not measured: %s", name, ex2)
    try:
        chi = build_chi(entry.input, max_cosets=budget.max_cosets, realized=realized)
    except OversizeError as ex:
        reasons["chi"] = str(ex)
        log.info("%s: chi skipped: %s", name, ex)
    rec["construction_orders"] = _orders(G, nu, chi, reasons, measured)
    checks += construction_checks(G, nu, chi, measured)
    checks += predicate_checks(G, p, entry.tags)
    checks += lemma_checks(G, p, nu, chi, seed)
    per_theorem = {}
    if "A" in theorems:
        per_theorem["A"] = theorem_a_checks(G, p, nu)
    if "B" in theorems:
        per_theorem["B"] = theorem_b_checks(G, p, nu)
    if "C" in theorems:
        per_theorem["C"] = theorem_c_checks(G, p, chi)
    for t in THEOREMS:
        checks += per_theorem.get(t, [])
    for vid, (th, prefixes) in VERDICT_GROUPS.items():
        if th not in per_theorem:
            continue
        sel = [c for c in per_theorem[th] if any(c.check_id.startswith(x) for x in prefixes)]
        if sel:
            rec["verdicts"][vid] = TheoremReport(name, vid, sel).verdict
    rec["checks"] = [c.as_dict() for c in checks]
    return rec


def _run_one(args):
    entry, theorems, seed, budget = args
    return run_entry(entry, theorems, seed, budget)


def run_all(
    filter_expr: str = "",
    theorems=THEOREMS,
    seed: int = DEFAULT_SEED,
    budget: Budget = Budget(),
    profile: str = "quick",
    entries: list[CorpusEntry] | None = None,
    jobs: int = 1,
) -> dict:
    """The aggregate report over every corpus entry selected by the filter.

    The quick profile leaves out ``slow`` entries unless the filter itself
    mentions the ``slow`` tag.
    """
    entries = corpus() if entries is None else entries
    chosen = [e for e in entries if select(e, filter_expr, profile)]
    tasks = [(e, tuple(theorems), seed, budget) for e in chosen]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    report = {"schema": SCHEMA, "seed": seed, "entries": results}
    report["coverage"] = coverage(results)
    return report


def select(entry: CorpusEntry, filter_expr: str, profile: str = "quick") -> bool:
    if profile not in ("quick", "full"):
        raise ValueError(f"unknown profile {profile!r}")
    if filter_expr.strip() and not matches(filter_expr, entry.tags):
        return False
    if profile == "quick" and "slow" in entry.tags:
        return mentions(filter_expr, "slow")
    return True


def coverage(entries: list[dict]) -> dict:
    ids = sorted({c["check_id"] for e in entries for c in e["checks"]})
    return {
        claim: [i for i in ids if any(i.startswith(pre) for pre in prefixes)]
        for claim, prefixes in COVERAGE.items()
    }


def exit_status(report: dict, strict: bool = False) -> int:
    verdicts = [c["verdict"] for e in report["entries"] for c in e["checks"]]
    verdicts += [v for e in report["entries"] for v in e["verdicts"].values()]
    if "fail" in verdicts:
        return 1
    if strict and any(v.startswith("skipped") for v in verdicts):
        return 3
    return 0


def render_text(report: dict) -> str:
    """Human summary derived from the JSON report."""
    lines = [f"schema {report['schema']}  seed {report['seed']}  entries {len(report['entries'])}"]
    for e in report["entries"]:
        co = e["construction_orders"]
        counts: dict[str, int] = {}
        for c in e["checks"]:
            counts[c["verdict"]] = counts.get(c["verdict"], 0) + 1
        verdicts = " ".join(f"{k}={v}" for k, v in e["verdicts"].items())
        lines.append(
            f"{e['group']:<10} |G|={co.get('G')} |nu|={co.get('nu')} |chi|={co.get('chi')}  "
            f"checks {dict(sorted(counts.items()))}  {verdicts}"
        )
        for c in e["checks"]:
            if c["verdict"] in ("fail", "skipped"):
                lines.append(f"    {c['verdict'].upper()} {c['check_id']}: {c.get('witness', '')}")
    return "\n".join(lines)


__all__ = [
    "Budget", "TheoremReport", "run_all", "run_entry", "render_text", "exit_status",
    "abelian_tensor_order", "theorem_verdict", "NuChiError",
]
