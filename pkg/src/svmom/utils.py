"""Small exact combinatorial helpers."""
from __future__ import annotations

import math
from typing import Iterator, Sequence


def choose(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("choose() requires nonnegative arguments")
    return math.comb(n, k)


def multinomial(counts: Sequence[int]) -> int:
    if any(c < 0 for c in counts):
        raise ValueError("multinomial() requires nonnegative counts")
    out, total = 1, 0
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def double_factorial(n: int) -> int:
    """n!! with the conventions 0!! = (-1)!! = 1."""
    if n < -1:
        raise ValueError("double_factorial() requires n >= -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def compositions(total: int, parts: int) -> Iterator[tuple]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
