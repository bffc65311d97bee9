"""Finite presentations and their text format.

Format, one statement per line (``#`` starts a comment)::

    gens: a b c
    rel: a^2
    rel: [a,b]
    rel: b^-1 a b = a^4
    rel: (a b)^2

A word is a juxtaposition of factors, optionally separated by spaces or
``*``.  A factor is an atom followed by any number of ``^k`` exponents
(``k`` a possibly negative integer).  Atoms are generator names (matched
longest-first against the ``gens:`` line), ``1`` for the identity,
parenthesised words, and commutators ``[u,v,...]`` (left-normed, with
``[u,v] = u^-1 v^-1 u v``).  ``u = v`` stands for the relator ``u v^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import words as W
from .errors import PresentationParseError
from .words import Word


@dataclass(frozen=True)
class Presentation:
    generator_count: int
    relators: tuple[Word, ...]
    label: str = ""
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        seen = set()
        rels = []
        for r in self.relators:
            r = W.free_reduce(r)
            for a in r:
                if abs(a) > self.generator_count:
                    raise ValueError(f"letter {a} out of range in relator {r}")
            if r and r not in seen:
                seen.add(r)
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))
        if not self.names:
            object.__setattr__(
                self, "names", tuple(f"x{i + 1}" for i in range(self.generator_count))
            )

    def format(self) -> str:
        lines = [f"gens: {' '.join(self.names)}"]
        lines += [f"rel: {W.format_word(r, self.names)}" for r in self.relators]
        return "\n".join(lines) + "\n"


class _WordParser:
    def __init__(self, text: str, names: dict[str, int], line: int, col0: int):
        self.s = text
        self.i = 0
        self.names = sorted(names.items(), key=lambda kv: -len(kv[0]))
        self.line = line
        self.col0 = col0

    def error(self, msg: str):
        raise PresentationParseError(msg, self.line, self.col0 + self.i + 1)

    def skip(self):
        while self.i < len(self.s) and self.s[self.i] in " \t*":
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def relation(self) -> Word:
        lhs = self.word()
        if self.peek() == "=":
            self.i += 1
            rhs = self.word()
            lhs = W.mul(lhs, W.inverse(rhs))
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return lhs

    def word(self) -> Word:
        out: Word = ()
        while self.peek() and self.peek() not in ")],=":
            out = W.mul(out, self.factor())
        return out

    def factor(self) -> Word:
        w = self.atom()
        while self.peek() == "^":
            self.i += 1
            self.skip()
            j = self.i
            if self.i < len(self.s) and self.s[self.i] in "+-":
                self.i += 1
            while self.i < len(self.s) and self.s[self.i].isdigit():
                self.i += 1
            try:
                k = int(self.s[j : self.i])
            except ValueError:
                self.i = j
                self.error("expected an integer exponent")
            w = W.power(w, k)
        return w

    def atom(self) -> Word:
        c = self.peek()
        if c == "(":
            self.i += 1
            w = self.word()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return w
        if c == "[":
            self.i += 1
            parts = [self.word()]
            while self.peek() == ",":
                self.i += 1
                parts.append(self.word())
            if self.peek() != "]":
                self.error("expected ']'")
            if len(parts) < 2:
                self.error("commutator needs at least two entries")
            self.i += 1
            return W.commutator(*parts)
        if c == "1":
            self.i += 1
            return ()
        for name, k in self.names:
            if self.s.startswith(name, self.i):
                self.i += len(name)
                return (k,)
        self.error(f"unknown generator at {self.s[self.i:self.i + 8]!r}")


def parse_word(text: str, names: list[str] | tuple[str, ...]) -> Word:
    index = {n: k + 1 for k, n in enumerate(names)}
    return _WordParser(text, index, 1, 0).relation()


def parse_statements(text: str):
    """Yield (key, value, line number, value column) for each statement line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if ":" not in line:
            raise PresentationParseError("expected 'key: value'", lineno, 1)
        key, value = line.split(":", 1)
        col = len(key) + 1
        yield key.strip().lower(), value, lineno, col


def presentation_from_statements(stmts, label: str = "") -> Presentation:
    names: list[str] | None = None
    rels: list[Word] = []
    for key, value, lineno, col in stmts:
        if key == "gens":
            if names is not None:
                raise PresentationParseError("duplicate gens line", lineno, 1)
            names = value.split()
            for n in names:
                if not (n[0].isalpha() and all(ch.isalnum() or ch == "_" for ch in n)):
                    raise PresentationParseError(f"bad generator name {n!r}", lineno, col + 1)
            if len(set(names)) != len(names):
                raise PresentationParseError("repeated generator name", lineno, col + 1)
        elif key == "rel":
            if names is None:
                raise PresentationParseError("rel before gens", lineno, 1)
            index = {n: k + 1 for k, n in enumerate(names)}
            rels.append(_WordParser(value, index, lineno, col).relation())
        else:
            raise PresentationParseError(f"unknown key {key!r}", lineno, 1)
    if names is None:
        raise PresentationParseError("missing gens line", 1, 1)
    return Presentation(len(names), tuple(rels), label, tuple(names))


def parse_presentation(text: str, label: str = "") -> Presentation:
    return presentation_from_statements(parse_statements(text), label)
