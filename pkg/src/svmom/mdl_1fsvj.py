"""Heston model with compound Poisson jumps in the return.

The return splits as ``y_n = A_n + B_n`` where ``A_n`` is the Heston
diffusion return and ``B_n`` the jump increment over ``((n-1)h, nh]``.  The
``B_n`` are i.i.d. and independent of the diffusion, so every moment is a
binomial convolution of :mod:`svmom.mdl_1fsv` and :mod:`svmom.cpp_mom`
results.
"""
from __future__ import annotations

from functools import lru_cache

from . import mdl_1fsv
from .cpp_mom import cpp_central_moment, cpp_raw_moment
from .poly import GPoly
from .utils import choose

__all__ = ["SVJ_SIG", "moment_y", "cmom_y", "moment_yy", "cov_yy"]

SVJ_SIG = mdl_1fsv.FINAL_SIG.extended(["lambda", "mu_j", "sigma_j"])


def _lift(p: GPoly) -> GPoly:
    return p.extend_signature(SVJ_SIG)


@lru_cache(maxsize=None)
def _jump_raw(m: int) -> GPoly:
    return _lift(cpp_raw_moment(m))


@lru_cache(maxsize=None)
def _jump_central(m: int) -> GPoly:
    return _lift(cpp_central_moment(m))


@lru_cache(maxsize=None)
def moment_y(l: int) -> GPoly:
    """Raw moment ``E[y_n^l]``."""
    mdl_1fsv._check_order(l)
    out = GPoly.zero(SVJ_SIG)
    for i in range(l + 1):
        out += (_lift(mdl_1fsv.moment_y(i)) * _jump_raw(l - i)).scale(choose(l, i))
    return out


@lru_cache(maxsize=None)
def cmom_y(l: int) -> GPoly:
    """Central moment ``E[(y_n - E[y_n])^l]``."""
    mdl_1fsv._check_order(l)
    out = GPoly.zero(SVJ_SIG)
    for i in range(l + 1):
        out += (_lift(mdl_1fsv.cmom_y(i)) * _jump_central(l - i)).scale(choose(l, i))
    return out


@lru_cache(maxsize=None)
def moment_yy(l1: int, l2: int) -> GPoly:
    """Lag-1 cross moment ``E[y_n^l1 y_{n+1}^l2]``."""
    mdl_1fsv._check_order(l1, l2)
    out = GPoly.zero(SVJ_SIG)
    for i in range(l1 + 1):
        for j in range(l2 + 1):
            diffusion = _lift(mdl_1fsv.moment_yy(i, j))
            jumps = _jump_raw(l1 - i) * _jump_raw(l2 - j)
            out += (diffusion * jumps).scale(choose(l1, i) * choose(l2, j))
    return out


@lru_cache(maxsize=None)
def cov_yy(l1: int, l2: int) -> GPoly:
    """Lag-1 covariance ``cov(y_n^l1, y_{n+1}^l2)``."""
    mdl_1fsv._check_order(l1, l2)
    if l1 < 1 or l2 < 1:
        raise ValueError("covariance orders must be >= 1")
    return moment_yy(l1, l2) - moment_y(l1) * moment_y(l2)
