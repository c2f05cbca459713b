"""Moments of compound Poisson increments with normal jump sizes.

The increment over an interval of length ``h`` is ``z = J_1 + ... + J_N`` with
``N ~ Poisson(lambda h)`` and ``J_i ~ N(mu_j, sigma_j^2)``.  Its cumulants are
``kappa_r = lambda h E[J^r]``, and raw moments follow from the usual
moments-from-cumulants recursion.  Only :func:`normal_raw_moment` knows about
the jump distribution.
"""
from __future__ import annotations

from functools import lru_cache

from .poly import GPoly, SlotSignature
from .utils import choose, double_factorial

__all__ = [
    "JUMP_SIG",
    "CPP_SIG",
    "normal_raw_moment",
    "cpp_raw_moment",
    "cpp_central_moment",
]

JUMP_SIG = SlotSignature(["mu_j", "sigma_j"])
CPP_SIG = SlotSignature(["lambda", "h", "mu_j", "sigma_j"])


@lru_cache(maxsize=None)
def normal_raw_moment(m: int) -> GPoly:
    """E[J^m] for J ~ N(mu_j, sigma_j^2)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    terms = {(m - 2 * i, 2 * i): choose(m, 2 * i) * double_factorial(2 * i - 1)
             for i in range(m // 2 + 1)}
    return GPoly(JUMP_SIG, terms)


@lru_cache(maxsize=None)
def _cumulant(r: int) -> GPoly:
    return normal_raw_moment(r).extend_signature(CPP_SIG).shift(**{"lambda": 1, "h": 1})


@lru_cache(maxsize=None)
def cpp_raw_moment(m: int) -> GPoly:
    """E[z^m] over ``('lambda', 'h', 'mu_j', 'sigma_j')``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return GPoly.one(CPP_SIG)
    out = GPoly.zero(CPP_SIG)
    for r in range(1, m + 1):
        out += (_cumulant(r) * cpp_raw_moment(m - r)).scale(choose(m - 1, r - 1))
    return out


@lru_cache(maxsize=None)
def cpp_central_moment(m: int) -> GPoly:
    """E[(z - lambda h mu_j)^m]."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    mean = cpp_raw_moment(1)
    out = GPoly.zero(CPP_SIG)
    for i in range(m + 1):
        out += (cpp_raw_moment(i) * (-mean) ** (m - i)).scale(choose(m, i))
    return out
