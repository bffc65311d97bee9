"""Free-group words.

A word is a tuple of nonzero ints: ``k`` stands for generator ``k - 1`` and
``-k`` for its inverse.  Column ``2(k-1)`` of a coset table holds generator
``k - 1`` and column ``2(k-1) + 1`` its inverse.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

Word = tuple[int, ...]

IDENTITY: Word = ()


def free_reduce(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i : j + 1])


def inverse(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def mul(*ws: Sequence[int]) -> Word:
    return free_reduce(a for w in ws for a in w)


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        w, k = inverse(w), -k
    return free_reduce(tuple(w) * k)


def commutator(x: Sequence[int], y: Sequence[int], *more: Sequence[int]) -> Word:
    """Left-normed commutator [x, y, ...] with [x, y] = x^-1 y^-1 x y."""
    c = mul(inverse(x), inverse(y), x, y)
    for z in more:
        c = commutator(c, z)
    return c


def conjugate(x: Sequence[int], y: Sequence[int]) -> Word:
    """x^y = y^-1 x y."""
    return mul(inverse(y), x, y)


def shift(w: Sequence[int], offset: int) -> Word:
    """Rename generator k to k + offset (used for the phi copy)."""
    return tuple(a + offset if a > 0 else a - offset for a in w)


def substitute(w: Sequence[int], images: Sequence[Word]) -> Word:
    """Replace generator k by ``images[k-1]``."""
    out: list[int] = []
    for a in w:
        out.extend(images[a - 1] if a > 0 else inverse(images[-a - 1]))
    return free_reduce(out)


def generator(k: int) -> Word:
    """Word of the 0-based generator ``k``."""
    return (k + 1,)


def to_columns(w: Sequence[int]) -> np.ndarray:
    return np.fromiter(
        (2 * (a - 1) if a > 0 else 2 * (-a - 1) + 1 for a in w), dtype=np.int32, count=len(w)
    )


def from_columns(cols: Iterable[int]) -> Word:
    return tuple((c // 2 + 1) if c % 2 == 0 else -(c // 2 + 1) for c in cols)


def format_word(w: Sequence[int], names: Sequence[str] | None = None) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        a = w[i]
        k = 1
        while i + k < len(w) and w[i + k] == a:
            k += 1
        name = names[abs(a) - 1] if names else f"x{abs(a)}"
        e = k if a > 0 else -k
        parts.append(name if e == 1 else f"{name}^{e}")
        i += k
    return " ".join(parts)
