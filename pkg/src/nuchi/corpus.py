"""Built-in corpus of small p-groups.

Entries are stored in the presentation text format with a few header
lines::

    group: M27
    order: 27
    prime: 3
    tags: powerful potent
    gens: a b
    rel: a^9
    ...

A ``p=<prime>`` tag is added from the ``prime:`` line.  ``slow`` marks
entries left out of the quick profile.  Loading realises every entry and
checks the ``abelian``, ``powerful`` and ``potent`` tags against the group:
a tag is present exactly when its predicate holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from . import perm as P
from .constructions import GroupInput, realize_group
from .errors import CorpusError, PresentationParseError
from .presentation import parse_statements, presentation_from_statements

KNOWN_TAGS = {"abelian", "powerful", "potent", "slow"}

BUILTIN = """
# ---- p = 2 -------------------------------------------------------------
group: Z2
order: 2
prime: 2
tags: abelian powerful potent
gens: a
rel: a^2

group: Z4
order: 4
prime: 2
tags: abelian powerful potent
gens: a
rel: a^4

group: Z8
order: 8
prime: 2
tags: abelian powerful potent
gens: a
rel: a^8

group: Z16
order: 16
prime: 2
tags: abelian powerful potent
gens: a
rel: a^16

group: Z2xZ2
order: 4
prime: 2
tags: abelian powerful potent
gens: a b
rel: a^2
rel: b^2
rel: [a,b]

group: Z4xZ2
order: 8
prime: 2
tags: abelian powerful potent
gens: a b
rel: a^4
rel: b^2
rel: [a,b]

# p = 2 counterexample: elementary abelian of rank 3
group: Z2^3
order: 8
prime: 2
tags: abelian powerful potent
gens: a b c
rel: a^2
rel: b^2
rel: c^2
rel: [a,b]
rel: [a,c]
rel: [b,c]

group: Z8xZ2
order: 16
prime: 2
tags: abelian powerful potent
gens: a b
rel: a^8
rel: b^2
rel: [a,b]

group: Z4xZ4
order: 16
prime: 2
tags: abelian powerful potent
gens: a b
rel: a^4
rel: b^4
rel: [a,b]

group: Z4xZ2xZ2
order: 16
prime: 2
tags: abelian powerful potent
gens: a b c
rel: a^4
rel: b^2
rel: c^2
rel: [a,b]
rel: [a,c]
rel: [b,c]

# nu has order 2^24, beyond the default coset budget
group: Z2^4
order: 16
prime: 2
tags: abelian powerful potent slow
gens: a b c d
rel: a^2
rel: b^2
rel: c^2
rel: d^2
rel: [a,b]
rel: [a,c]
rel: [a,d]
rel: [b,c]
rel: [b,d]
rel: [c,d]

group: D4
order: 8
prime: 2
gens: a b
rel: a^4
rel: b^2
rel: (a b)^2

group: Q8
order: 8
prime: 2
gens: a b
rel: a^4
rel: a^2 b^-2
rel: b^-1 a b a

# ---- p = 3 -------------------------------------------------------------
group: Z3
order: 3
prime: 3
tags: abelian powerful potent
gens: a
rel: a^3

group: Z9
order: 9
prime: 3
tags: abelian powerful potent
gens: a
rel: a^9

group: Z27
order: 27
prime: 3
tags: abelian powerful potent
gens: a
rel: a^27

group: Z3xZ3
order: 9
prime: 3
tags: abelian powerful potent
gens: a b
rel: a^3
rel: b^3
rel: [a,b]

group: Z9xZ3
order: 27
prime: 3
tags: abelian powerful potent
gens: a b
rel: a^9
rel: b^3
rel: [a,b]

# nu has order 3^15, beyond the default coset budget
group: Z3^3
order: 27
prime: 3
tags: abelian powerful potent slow
gens: a b c
rel: a^3
rel: b^3
rel: c^3
rel: [a,b]
rel: [a,c]
rel: [b,c]

group: M27
order: 27
prime: 3
tags: powerful potent
gens: a b
rel: a^9
rel: b^3
rel: b^-1 a b a^-4

# extraspecial of order 27 and exponent 3
group: Heis27
order: 27
prime: 3
gens: a b
rel: a^3
rel: b^3
rel: [a,b]^3
rel: [a,b,a]
rel: [a,b,b]

# ---- p = 5 -------------------------------------------------------------
group: Z5
order: 5
prime: 5
tags: abelian powerful potent slow
gens: a
rel: a^5

group: Z5xZ5
order: 25
prime: 5
tags: abelian powerful potent slow
gens: a b
rel: a^5
rel: b^5
rel: [a,b]

group: M125
order: 125
prime: 5
tags: powerful potent slow
gens: a b
rel: a^25
rel: b^5
rel: b^-1 a b a^-6

# extraspecial of order 125 and exponent 5
group: Heis125
order: 125
prime: 5
tags: potent slow
gens: a b
rel: a^5
rel: b^5
rel: [a,b]^5
rel: [a,b,a]
rel: [a,b,b]
"""


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    input: GroupInput
    tags: frozenset[str]
    text: str = ""

    @property
    def prime(self) -> int:
        return self.input.prime


def parse_corpus(text: str) -> list[CorpusEntry]:
    entries: list[CorpusEntry] = []
    block: list = []
    header: dict = {}

    def flush():
        if not header:
            return
        name = header["group"]
        pres = presentation_from_statements(block, name)
        prime = int(header["prime"]) if "prime" in header else None
        order = int(header["order"]) if "order" in header else None
        tags = set(header.get("tags", "").split())
        unknown = tags - KNOWN_TAGS
        if unknown:
            raise PresentationParseError(f"unknown tags {sorted(unknown)}", header["_line"], 1)
        if prime:
            tags.add(f"p={prime}")
        entries.append(CorpusEntry(name, GroupInput(pres, order, prime, name), frozenset(tags)))

    for key, value, lineno, col in parse_statements(text):
        if key == "group":
            flush()
            block = []
            header = {"group": value.strip(), "_line": lineno}
        elif key in ("order", "prime", "tags"):
            if not header:
                raise PresentationParseError(f"{key} outside a group block", lineno, 1)
            header[key] = value.strip()
        else:
            if not header:
                raise PresentationParseError("statement outside a group block", lineno, 1)
            block.append((key, value, lineno, col))
    flush()
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise CorpusError("duplicate group names in corpus")
    return entries


def validate_tags(G, p: int, tags) -> list[str]:
    """Tags among abelian/powerful/potent that disagree with G (empty if none)."""
    from . import pgroups as PG

    truth = {
        "abelian": P.whole_is_abelian(G),
        "powerful": PG.is_powerful(G, p),
        "potent": PG.is_potent(G, p),
    }
    return sorted(t for t, held in truth.items() if held != (t in tags))


def validate_entry(entry: CorpusEntry) -> None:
    G, _ = realize_group(entry.input)
    p = entry.prime or G._prime
    bad = validate_tags(G, p, entry.tags)
    if bad:
        raise CorpusError(f"{entry.name}: tags {bad} disagree with the group")


@lru_cache(maxsize=None)
def _builtin() -> tuple[CorpusEntry, ...]:
    entries = parse_corpus(BUILTIN)
    for e in entries:
        validate_entry(e)
    return tuple(entries)


def corpus(path: str | Path | None = None, validate: bool = True) -> list[CorpusEntry]:
    """Corpus entries, from ``path`` or the built-in text."""
    if path is None:
        return list(_builtin())
    entries = parse_corpus(Path(path).read_text())
    if validate:
        for e in entries:
            validate_entry(e)
    return entries


def lookup(name: str, entries: list[CorpusEntry] | None = None) -> CorpusEntry:
    for e in entries or corpus():
        if e.name == name:
            return e
    raise KeyError(name)
