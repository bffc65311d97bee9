"""Command-line interface: ``nuchi build``, ``nuchi verify``, ``nuchi corpus list``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 a budget
was exceeded (``build`` always, ``verify`` with ``--strict``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import perm as P
from .constructions import GroupInput, build_chi, build_nu
from .corpus import corpus, lookup, parse_corpus
from .enumeration import DEFAULT_MAX_COSETS
from .errors import CorpusError, NuChiError, OversizeError, PresentationParseError, TagExpressionError
from .pgroups import DEFAULT_SEED
from .presentation import parse_presentation
from .tagexpr import parse as parse_filter
from .verify import THEOREMS, Budget, exit_status, render_text, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_OVERSIZE = 0, 1, 2, 3

# budgets of the full profile (the quick profile keeps the defaults)
FULL_MAX_COSETS = 1 << 25
FULL_MAX_POINTS = 12_000_000


def load_group(spec: str, corpus_path: str | None = None) -> GroupInput:
    """``builtin:NAME`` or a presentation file (optionally with a corpus header)."""
    if spec.startswith("builtin:"):
        try:
            return lookup(spec[len("builtin:"):], corpus(corpus_path) if corpus_path else None).input
        except KeyError:
            raise CorpusError(f"no corpus entry named {spec[len('builtin:'):]!r}") from None
    text = Path(spec).read_text()
    if any(line.strip().startswith("group:") for line in text.splitlines()):
        return parse_corpus(text)[0].input
    return GroupInput(parse_presentation(text, Path(spec).stem), name=Path(spec).stem)


def _fp(group, H) -> dict:
    return P.fingerprint(group, H).as_dict()


def cmd_build(args) -> int:
    inp = load_group(args.group, args.corpus)
    triples = "generators" if args.generator_triples else "all"
    if args.construction == "nu":
        r = build_nu(inp, triples, args.max_cosets, args.allow_large)
        V = r.nu
        out = {
            "group": r.G.label, "construction": "nu", "order": V.order, "G": r.G.order,
            "generator_triples_sufficient": r.generator_triples_sufficient,
            "subgroups": {
                "tensor": _fp(V, r.tensor), "delta": _fp(V, r.delta), "mu": _fp(V, r.mu),
                "schur_multiplier": r.schur_fingerprint.as_dict(),
            },
        }
    else:
        r = build_chi(inp, args.max_cosets)
        X = r.chi
        out = {
            "group": r.G.label, "construction": "chi", "order": X.order, "G": r.G.order,
            "subgroups": {
                "L": _fp(X, r.L), "D": _fp(X, r.D), "W": _fp(X, r.W), "R": _fp(X, r.R),
                "derived": _fp(X, r.chi_derived),
            },
            "T_order": r.t_order,
        }
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"{out['construction']}({out['group']}): order {out['order']} (|G| = {out['G']})")
        for name, fp in out["subgroups"].items():
            print(f"  {name:<16} order {fp['order']:<8} exponent {fp['exponent']:<5} "
                  f"class {fp['nilpotency_class']}  invariants {fp['abelian_invariants']}")
        if "T_order" in out:
            print(f"  T(G) order {out['T_order']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    theorems = tuple(t.strip() for t in args.theorems.split(",") if t.strip())
    bad = [t for t in theorems if t not in THEOREMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown theorems {bad}")
    parse_filter(args.filter)
    max_cosets = args.max_cosets
    if args.profile == "full":
        os.environ.setdefault("NUCHI_MAX_POINTS", str(FULL_MAX_POINTS))
        max_cosets = max_cosets or FULL_MAX_COSETS
    budget = Budget(max_cosets or DEFAULT_MAX_COSETS, allow_large_triples=args.profile == "full")
    entries = corpus(args.corpus) if args.corpus else None
    report = run_all(args.filter, theorems, args.seed, budget, args.profile, entries, args.jobs)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    print(render_text(report))
    return exit_status(report, args.strict)


def cmd_corpus(args) -> int:
    for e in corpus(args.corpus):
        tags = " ".join(sorted(e.tags))
        print(f"{e.name:<10} order {e.input.expected_order!s:<5} {tags}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nuchi", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="realise nu(G) or chi(G) and print subgroup fingerprints")
    b.add_argument("--group", required=True, help="presentation file or builtin:NAME")
    b.add_argument("--construction", choices=("nu", "chi"), required=True)
    b.add_argument("--generator-triples", action="store_true",
                   help="nu: only the generator-triple relations (no element-triple check)")
    b.add_argument("--max-cosets", type=int, default=DEFAULT_MAX_COSETS)
    b.add_argument("--allow-large", action="store_true",
                   help="nu: lift the guard on the number of element triples")
    b.add_argument("--corpus", help="corpus file for builtin: lookups")
    b.add_argument("--json", action="store_true", help="print JSON instead of text")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run the theorem checks over the corpus")
    v.add_argument("--theorems", default=",".join(THEOREMS))
    v.add_argument("--filter", default="", help="tag expression, e.g. 'p=2 and not slow'")
    v.add_argument("--profile", choices=("quick", "full"), default="quick")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--json", help="write the JSON report here")
    v.add_argument("--strict", action="store_true", help="exit 3 when anything was skipped")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--max-cosets", type=int, default=None)
    v.add_argument("--corpus", help="corpus file instead of the built-in one")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("corpus", help="corpus operations")
    csub = c.add_subparsers(dest="corpus_command", required=True)
    cl = csub.add_parser("list", help="list entries with their tags")
    cl.add_argument("--corpus", help="corpus file instead of the built-in one")
    cl.set_defaults(func=cmd_corpus)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (PresentationParseError, TagExpressionError, CorpusError, argparse.ArgumentTypeError,
            FileNotFoundError) as ex:
        print(f"nuchi: error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except OversizeError as ex:
        print(f"nuchi: over budget: {ex}", file=sys.stderr)
        return EXIT_OVERSIZE
    except NuChiError as ex:
        print(f"nuchi: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
