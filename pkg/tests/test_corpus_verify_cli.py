import json

import pytest

from conftest import realized
from nuchi import cli
from nuchi.corpus import corpus, lookup, parse_corpus, validate_entry, validate_tags
from nuchi.errors import CorpusError, PresentationParseError, TagExpressionError
from nuchi.pgroups import CheckReport
from nuchi.tagexpr import matches, mentions, parse
from nuchi.verify import (
    COVERAGE,
    SCHEMA,
    Budget,
    exit_status,
    render_text,
    run_all,
    run_entry,
    select,
    theorem_verdict,
)

TINY = """
group: T2
order: 2
prime: 2
tags: abelian powerful potent slow
gens: a
rel: a^2

group: T3
order: 3
prime: 3
tags: abelian powerful potent
gens: a
rel: a^3
"""


# ---- corpus --------------------------------------------------------------------


def test_corpus_has_required_entries():
    names = {e.name for e in corpus()}
    required = {
        "Z2", "Z4", "Z8", "Z16", "Z2xZ2", "Z4xZ2", "Z2^3", "Z8xZ2", "Z4xZ4", "Z4xZ2xZ2", "Z2^4",
        "D4", "Q8", "Z3", "Z9", "Z27", "Z3xZ3", "Z9xZ3", "Z3^3", "M27", "Heis27",
        "Z5", "Z5xZ5", "M125", "Heis125",
    }
    assert required <= names


def test_corpus_tags():
    assert {"abelian", "powerful", "p=2"} <= lookup("Z2^3").tags
    assert lookup("M27").tags == {"powerful", "potent", "p=3"}
    for name in ("Z5", "Z5xZ5", "M125", "Heis125"):
        assert "slow" in lookup(name).tags


def test_every_entry_realizes_to_its_order():
    for e in corpus():
        G, _ = realized(e.name)
        assert G.order == e.input.expected_order
        assert not validate_tags(G, e.prime, e.tags)


def test_mistagged_entry_rejected():
    text = "group: Bad\norder: 8\nprime: 2\ntags: powerful potent\ngens: a b\nrel: a^4\nrel: a^2 b^-2\nrel: b^-1 a b a"
    (entry,) = parse_corpus(text)
    with pytest.raises(CorpusError):
        validate_entry(entry)


def test_corpus_parse_errors():
    with pytest.raises(PresentationParseError):
        parse_corpus("group: X\ntags: shiny\ngens: a\nrel: a^2")
    with pytest.raises(PresentationParseError):
        parse_corpus("gens: a\nrel: a^2")
    with pytest.raises(CorpusError):
        parse_corpus(TINY + TINY)


# ---- tag expressions -----------------------------------------------------------


def test_tag_expressions():
    tags = {"p=2", "abelian", "slow"}
    assert matches("p=2 and abelian", tags)
    assert not matches("p=2 and not slow", tags)
    assert matches("p=3 or (abelian and slow)", tags)
    assert matches("", tags)
    assert mentions("not slow", "slow") and not mentions("slowly", "slow")


@pytest.mark.parametrize("expr", ["and", "p=2 and", "(p=2", "p=2)", "not"])
def test_bad_tag_expressions(expr):
    with pytest.raises(TagExpressionError):
        parse(expr)


def test_quick_profile_drops_slow_unless_asked():
    e = lookup("Z5")
    assert not select(e, "", "quick")
    assert select(e, "", "full")
    assert select(e, "slow", "quick")
    assert not select(e, "not slow", "full")


# ---- verdicts and reports --------------------------------------------------------


def test_theorem_verdict_rules():
    ok = CheckReport("a", True, True)
    bad = CheckReport("b", True, False)
    vac = CheckReport("c", False, False)
    skip = CheckReport("d", True, False, skipped=True)
    assert theorem_verdict([ok, vac]) == "pass"
    assert theorem_verdict([ok, bad, skip]) == "fail"
    assert theorem_verdict([ok, skip]) == "skipped(oversize)"
    assert theorem_verdict([vac]) == "vacuous"
    assert theorem_verdict([]) == "vacuous"


def test_empty_filter_result():
    rep = run_all("p=7")
    assert rep["entries"] == []
    assert exit_status(rep) == 0


def test_report_schema_fields():
    rep = run_all("p=3 and not powerful", entries=[lookup("Z3"), lookup("Heis27")])
    assert set(rep) == {"schema", "seed", "entries", "coverage"}
    assert rep["schema"] == SCHEMA
    (e,) = rep["entries"]
    assert e["group"] == "Heis27"
    assert set(e) == {"group", "construction_orders", "checks", "verdicts"}
    for c in e["checks"]:
        assert set(c) <= {"check_id", "verdict", "witness"}
        assert c["verdict"] in ("pass", "fail", "vacuous", "skipped")
    assert e["verdicts"]["A"] == "vacuous"
    assert e["verdicts"]["B"] == "vacuous"
    assert e["verdicts"]["C"] == "vacuous"
    assert exit_status(rep) == 0
    assert "Heis27" in render_text(rep)


def test_coverage_names_every_claim():
    rep = run_all("", entries=[lookup("Z2^3"), lookup("Z3xZ3")])
    assert set(rep["coverage"]) == set(COVERAGE)
    for claim, ids in rep["coverage"].items():
        assert ids, claim


def test_small_budget_gives_skips_not_failures():
    rec = run_entry(lookup("Z4xZ2"), budget=Budget(max_cosets=200))
    verdicts = {c["check_id"]: c["verdict"] for c in rec["checks"]}
    assert verdicts["nu.order_identity"] == "skipped"
    assert rec["verdicts"]["A"] == "skipped(oversize)"
    assert "fail" not in verdicts.values()
    rep = {"schema": 1, "seed": 0, "entries": [rec]}
    assert exit_status(rep) == 0 and exit_status(rep, strict=True) == 3


def test_failing_check_sets_exit_status():
    rep = {"entries": [{"checks": [{"check_id": "x", "verdict": "fail"}], "verdicts": {}}]}
    assert exit_status(rep) == 1


def test_order_mismatch_is_a_failure():
    (entry,) = parse_corpus("group: Z4bad\norder: 8\nprime: 2\ntags: abelian powerful potent\ngens: a\nrel: a^4")
    rec = run_entry(entry)
    assert rec["checks"][0]["verdict"] == "fail"
    assert set(rec["verdicts"].values()) == {"fail"}


# ---- CLI -----------------------------------------------------------------------


def test_cli_corpus_list(capsys):
    assert cli.main(["corpus", "list"]) == 0
    out = capsys.readouterr().out
    assert "M27" in out and "Heis125" in out


def test_cli_build_nu_json(capsys):
    assert cli.main(["build", "--group", "builtin:Z3xZ3", "--construction", "nu", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["order"] == 81 * 81
    assert out["subgroups"]["schur_multiplier"]["abelian_invariants"] == [3]


def test_cli_build_chi_text(capsys, tmp_path):
    f = tmp_path / "d4.txt"
    f.write_text("gens: a b\nrel: a^4\nrel: b^2\nrel: (a b)^2\n")
    assert cli.main(["build", "--group", str(f), "--construction", "chi"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("chi(d4): order")


def test_cli_build_generator_triples(capsys):
    assert cli.main(["build", "--group", "builtin:D4", "--construction", "nu", "--generator-triples", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["order"] == 64 * 32


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("gens: a\nrel: a^\n")
    assert cli.main(["build", "--group", str(bad), "--construction", "nu"]) == 2
    assert cli.main(["build", "--group", "builtin:NoSuch", "--construction", "nu"]) == 2
    assert cli.main(["verify", "--filter", "p=2 and"]) == 2
    assert cli.main(["verify", "--theorems", "D"]) == 2
    assert cli.main(["build", "--group", "builtin:Z2^4", "--construction", "nu"]) == 3
    with pytest.raises(SystemExit) as ei:
        cli.main(["frobnicate"])
    assert ei.value.code == 2


def test_cli_verify_custom_corpus(tmp_path, capsys):
    f = tmp_path / "tiny.txt"
    f.write_text(TINY)
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--corpus", str(f), "--json", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [e["group"] for e in rep["entries"]] == ["T3"]
    assert cli.main(["verify", "--corpus", str(f), "--filter", "slow", "--json", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [e["group"] for e in rep["entries"]] == ["T2"]
    assert rep["entries"][0]["verdicts"]["A"] == "pass"


def test_cli_verify_jobs_match_serial(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--filter", "p=2 and abelian and not slow", "--theorems", "A,B"]
    assert cli.main(args + ["--json", str(a)]) == 0
    assert cli.main(args + ["--json", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
