"""Boolean filters over corpus tags: ``p=2 and not (slow or abelian)``."""

from __future__ import annotations

import re

from .errors import TagExpressionError

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokens(expr: str) -> list[str]:
    return _TOKEN.findall(expr)


def parse(expr: str):
    """Compile ``expr`` into a predicate over a set of tags.

    Grammar: or-expressions of and-expressions of optionally negated atoms
    or parenthesised expressions.  An empty expression matches everything.
    """
    toks = _tokens(expr)
    if not toks:
        return lambda tags: True
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        pos += 1
        return toks[pos - 1]

    def disj():
        terms = [conj()]
        while peek() == "or":
            take()
            terms.append(conj())
        return lambda t: any(f(t) for f in terms)

    def conj():
        terms = [unary()]
        while peek() == "and":
            take()
            terms.append(unary())
        return lambda t: all(f(t) for f in terms)

    def unary():
        tok = peek()
        if tok is None:
            raise TagExpressionError(f"unexpected end of filter {expr!r}")
        if tok == "not":
            take()
            inner = unary()
            return lambda t: not inner(t)
        if tok == "(":
            take()
            inner = disj()
            if peek() != ")":
                raise TagExpressionError(f"missing ')' in filter {expr!r}")
            take()
            return inner
        if tok in (")", "and", "or"):
            raise TagExpressionError(f"unexpected {tok!r} in filter {expr!r}")
        take()
        return lambda t: tok in t

    pred = disj()
    if pos != len(toks):
        raise TagExpressionError(f"trailing {toks[pos]!r} in filter {expr!r}")
    return pred


def matches(expr: str, tags) -> bool:
    return parse(expr)(frozenset(tags))


def mentions(expr: str, tag: str) -> bool:
    return tag in _tokens(expr)
