"""Moments, central moments and lag-1 covariances of Heston returns.

With ``tau = t - (n-1)h`` the return ``y_n = p(nh) - p((n-1)h)`` satisfies

    y_n = (mu - theta/2) h + ybar_n,
    ybar_n = sigma_v/(2k) e^{-knh} IE_n + (rho - sigma_v/(2k)) I_n
             + sqrt(1-rho^2) I*_n - beta_h vbar_{n-1},

with ``beta_h = (1 - e^{-kh})/(2k)``.  Everything is expanded into
combination moments ``E[X1^a X2^b X3^c X4^d]`` of the four random factors

    X1 = e^{-knh} IE_n,  X2 = I_n,  X3 = I*_n,  X4 = vbar_{n-1},

whose inner expectation given ``v_{n-1}`` comes from
:func:`svmom.ito_mom.cond_ieii_moment_vbar` and whose outer expectation uses
the stationary moments of the variance.

Results are over :data:`FINAL_SIG`::

    ('e^{-kh}', 'h', 'k^{-}', 'mu', 'theta', 'sigma_v', 'rho', 'sqrt(1-rho^2)')
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .ito_mom import VAR_SIG, central_moment_vbar, cond_ieii_moment_vbar
from .poly import GPoly, PolyError, SlotSignature
from .utils import choose

__all__ = [
    "FINAL_SIG",
    "WORK_SIG",
    "AssemblyError",
    "moment_y",
    "cmom_y",
    "moment_yy",
    "cov_yy",
    "ybar",
    "conditional",
    "expect",
]

FINAL_SIG = SlotSignature(
    ["e^{-kh}", "h", "k^{-}", "mu", "theta", "sigma_v", "rho", "sqrt(1-rho^2)"])
RANDOM_SLOTS = ("e^{-knh}IE_n", "I_n", "I*_n", "vbar_{n-1}")
WORK_SIG = SlotSignature(list(RANDOM_SLOTS) + list(FINAL_SIG.names))
NR = len(RANDOM_SLOTS)


class AssemblyError(PolyError):
    """Internal consistency failure while assembling a return moment."""


def _w(terms: dict) -> GPoly:
    """Build a WORK_SIG polynomial from ``{slot-name-tuple-key: coef}`` shorthand."""
    out = {}
    for spec, c in terms.items():
        key = [0] * len(WORK_SIG)
        for name, e in spec:
            key[WORK_SIG.index(name)] += e
        out[tuple(key)] = c
    return GPoly(WORK_SIG, out)


@lru_cache(maxsize=None)
def ybar() -> GPoly:
    """Centered return ``y_n - E[y_n]`` as a linear form in X1..X4."""
    half = Fraction(1, 2)
    X1, X2, X3, X4 = RANDOM_SLOTS
    return _w({
        ((X1, 1), ("sigma_v", 1), ("k^{-}", 1)): half,
        ((X2, 1), ("rho", 1)): 1,
        ((X2, 1), ("sigma_v", 1), ("k^{-}", 1)): -half,
        ((X3, 1), ("sqrt(1-rho^2)", 1)): 1,
        ((X4, 1), ("k^{-}", 1)): -half,
        ((X4, 1), ("e^{-kh}", 1), ("k^{-}", 1)): half,
    })


@lru_cache(maxsize=None)
def _mean() -> GPoly:
    """E[y_n] = (mu - theta/2) h."""
    return _w({(("mu", 1), ("h", 1)): 1, (("theta", 1), ("h", 1)): Fraction(-1, 2)})


@lru_cache(maxsize=None)
def _cond_work(a: int, b: int, c: int) -> GPoly:
    """``E[X1^a X2^b X3^c | v_{n-1}]`` over WORK_SIG, polynomial in X4.

    The ``e^{k(n-1)h}`` content of the conditional moment must be exactly
    ``a`` in every term, cancelling the ``e^{-ka(n-1)h}`` carried by X1^a.
    """
    cond = cond_ieii_moment_vbar(a, b, c)
    out = {}
    for (s, i, j, l, o, p, q), coef in cond.terms.items():
        if s != a:
            raise AssemblyError(f"e^{{k(n-1)h}} exponent {s} does not cancel for {(a, b, c)}")
        e_kh = a - i
        if e_kh < 0:
            raise AssemblyError(f"positive power of e^{{kh}} left in {(a, b, c)}")
        out[(0, 0, 0, l, e_kh, j, o, 0, p, q, 0, 0)] = coef
    return GPoly(WORK_SIG, out)


def conditional(p: GPoly) -> GPoly:
    """Integrate X1, X2, X3 out of ``p`` given ``vbar_{n-1}`` (= X4)."""
    groups: dict[tuple, dict] = {}
    for k, c in p.terms.items():
        groups.setdefault(k[:3], {})[(0, 0, 0) + k[3:]] = c
    out = GPoly.zero(WORK_SIG)
    for abc, rest in groups.items():
        cond = _cond_work(*abc)
        if cond:
            out += GPoly(WORK_SIG, rest) * cond
    return out


@lru_cache(maxsize=None)
def _vbar_moment(m: int) -> GPoly:
    return central_moment_vbar(m).extend_signature(FINAL_SIG)


def expect(p: GPoly) -> GPoly:
    """Unconditional expectation of a WORK_SIG polynomial, over FINAL_SIG."""
    q = conditional(p)
    groups: dict[int, dict] = {}
    for k, c in q.terms.items():
        groups.setdefault(k[3], {})[k[NR:]] = c
    out = GPoly.zero(FINAL_SIG)
    for d, rest in groups.items():
        m = _vbar_moment(d)
        if m:
            out += GPoly(FINAL_SIG, rest) * m
    return out


def _to_work(p: GPoly) -> GPoly:
    return p.extend_signature(WORK_SIG)


def _check_order(*orders):
    for l in orders:
        if not isinstance(l, int) or l < 0:
            raise ValueError(f"order must be a nonnegative integer, got {l!r}")


@lru_cache(maxsize=None)
def cmom_y(l: int) -> GPoly:
    """Central moment ``E[(y_n - E[y_n])^l]``."""
    _check_order(l)
    return expect(ybar() ** l)


@lru_cache(maxsize=None)
def moment_y(l: int) -> GPoly:
    """Raw moment ``E[y_n^l]``."""
    _check_order(l)
    mean = _mean().drop_slots(RANDOM_SLOTS)
    out = GPoly.zero(FINAL_SIG)
    for i in range(l + 1):
        out += (cmom_y(i) * mean ** (l - i)).scale(choose(l, i))
    return out


@lru_cache(maxsize=None)
def _y_power(l: int) -> GPoly:
    return (_mean() + ybar()) ** l


@lru_cache(maxsize=None)
def _next_given_vbar(l2: int) -> GPoly:
    """``E[y_{n+1}^l2 | v_n]`` with vbar_n re-expressed through interval n.

    Uses vbar_n = e^{-kh} vbar_{n-1} + sigma_v e^{-knh} IE_n.
    """
    g = conditional(_y_power(l2))
    X1, X4 = RANDOM_SLOTS[0], RANDOM_SLOTS[3]
    vbar_n = _w({((X4, 1), ("e^{-kh}", 1)): 1, ((X1, 1), ("sigma_v", 1)): 1})
    return g.substitute(X4, vbar_n)


@lru_cache(maxsize=None)
def moment_yy(l1: int, l2: int) -> GPoly:
    """Lag-1 cross moment ``E[y_n^l1 y_{n+1}^l2]``."""
    _check_order(l1, l2)
    if l2 == 0:
        return moment_y(l1)
    if l1 == 0:
        return moment_y(l2)
    return expect(_y_power(l1) * _next_given_vbar(l2))


@lru_cache(maxsize=None)
def cov_yy(l1: int, l2: int) -> GPoly:
    """Lag-1 covariance ``cov(y_n^l1, y_{n+1}^l2)``."""
    _check_order(l1, l2)
    if l1 < 1 or l2 < 1:
        raise ValueError("covariance orders must be >= 1")
    return moment_yy(l1, l2) - moment_y(l1) * moment_y(l2)
