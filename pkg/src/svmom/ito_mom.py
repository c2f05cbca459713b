"""Conditional moments of the Itô integrals driven by a square-root diffusion.

Over an observation interval starting at ``(n-1)h`` with local time
``tau = t - (n-1)h`` we work with

* ``IE = int e^{ks} sqrt(v) dw^v``,
* ``I  = int sqrt(v) dw^v``,
* ``I* = int sqrt(v) dw``,

and derive ``E[IE^m1 I^m2 I*^m3 | v_{n-1}]`` exactly by applying Itô's lemma
to the product and integrating the drift, which only involves moments of
strictly lower total order.  The variance path is expanded as

    v(s) = theta + e^{-k(s-(n-1)h)} vbar_{n-1} + sigma_v e^{-ks} IE_{n-1,s}

so every integrand is again a generalized polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .poly import GPoly, SlotSignature
from .utils import choose

__all__ = [
    "INT_SIG",
    "COND_SIG",
    "COND_SIG_VBAR",
    "VAR_SIG",
    "int_et",
    "int_e_poly",
    "cond_ieii_moment",
    "cond_ieii_moment_vbar",
    "moment_v",
    "central_moment_vbar",
    "c_coefficients",
]

E_START = "e^{k(n-1)h}"
E_TAU = "e^{k[t-(n-1)h]}"
TAU = "[t-(n-1)h]"

INT_SIG = SlotSignature([E_TAU, TAU, "k^{-}"])
COND_SIG = SlotSignature([E_START, E_TAU, TAU, "v_{n-1}", "k^{-}", "theta", "sigma_v"])
# same layout, but the fourth slot holds vbar_{n-1} = v_{n-1} - theta
COND_SIG_VBAR = SlotSignature([E_START, E_TAU, TAU, "vbar_{n-1}", "k^{-}", "theta", "sigma_v"])
VAR_SIG = SlotSignature(["theta", "sigma_v", "k^{-}"])


@lru_cache(maxsize=None)
def c_coefficients(n: int, m: int) -> tuple:
    """Coefficients c_{n,m,i}, i = 0..m, of the antiderivative of e^{nkt} t^m."""
    c = [Fraction(1, n)]
    for i in range(1, m + 1):
        c.append(-(m - i + 1) * c[-1] / n)
    return tuple(c)


@lru_cache(maxsize=None)
def int_et(i: int, j: int) -> GPoly:
    """Definite integral of ``e^{ik s} s^j`` over ``s in [0, tau]``.

    Returned over ``('e^{k[t-(n-1)h]}', '[t-(n-1)h]', 'k^{-}')``.
    """
    if j < 0:
        raise ValueError("j must be nonnegative")
    if i == 0:
        return GPoly(INT_SIG, {(0, j + 1, 0): Fraction(1, j + 1)})
    c = c_coefficients(i, j)
    terms = {(i, j - r, r + 1): c[r] for r in range(j + 1)}
    # antiderivative at the lower bound: only the tau^0 term survives
    terms[(0, 0, j + 1)] = terms.get((0, 0, j + 1), 0) - c[j]
    return GPoly(INT_SIG, terms)


def int_e_poly(m: int, p: GPoly) -> GPoly:
    """Integrate ``e^{mk s'} p(s')`` for local time ``s'`` from 0 to ``tau``.

    ``p`` must be over :data:`COND_SIG` or :data:`COND_SIG_VBAR`; the
    ``'e^{k(n-1)h}'`` slot is treated as a constant and left untouched.
    """
    out: dict[tuple, Fraction] = {}
    for (a, i, j, l, o, q, r), c in p.terms.items():
        for (i2, j2, o2), d in int_et(m + i, j).terms.items():
            key = (a, i2, j2, l, o + o2, q, r)
            out[key] = out.get(key, 0) + c * d
    return GPoly(p.signature, out)


def _term(p: GPoly, m: int, coef, e_start: int, vbar: int = 0, theta: int = 0,
          sigma: int = 0) -> GPoly:
    if not coef or not p:
        return GPoly.zero(COND_SIG_VBAR)
    return int_e_poly(m, p).shift(coef, **{E_START: e_start, "vbar_{n-1}": vbar,
                                           "theta": theta, "sigma_v": sigma})


@lru_cache(maxsize=None)
def cond_ieii_moment_vbar(m1: int, m2: int, m3: int) -> GPoly:
    """``E[IE^m1 I^m2 I*^m3 | v_{n-1}]`` over :data:`COND_SIG_VBAR`."""
    if min(m1, m2, m3) < 0:
        return GPoly.zero(COND_SIG_VBAR)
    if m1 == m2 == m3 == 0:
        return GPoly.one(COND_SIG_VBAR)
    if m3 % 2:
        # I* is conditionally centered Gaussian given the variance path
        return GPoly.zero(COND_SIG_VBAR)

    E = cond_ieii_moment_vbar
    out = GPoly.zero(COND_SIG_VBAR)

    a = Fraction(m1 * (m1 - 1), 2)
    if a:
        lower = E(m1 - 2, m2, m3)
        out += _term(lower, 1, a, 2, vbar=1)
        out += _term(lower, 2, a, 2, theta=1)
        out += _term(E(m1 - 1, m2, m3), 1, a, 1, sigma=1)

    b = Fraction(m2 * (m2 - 1), 2)
    if b:
        lower = E(m1, m2 - 2, m3)
        out += _term(lower, -1, b, 0, vbar=1)
        out += _term(lower, 0, b, 0, theta=1)
        out += _term(E(m1 + 1, m2 - 2, m3), -1, b, -1, sigma=1)

    c = m1 * m2
    if c:
        lower = E(m1 - 1, m2 - 1, m3)
        out += _term(lower, 0, c, 1, vbar=1)
        out += _term(lower, 1, c, 1, theta=1)
        out += _term(E(m1, m2 - 1, m3), 0, c, 0, sigma=1)

    d = Fraction(m3 * (m3 - 1), 2)
    if d:
        lower = E(m1, m2, m3 - 2)
        out += _term(lower, -1, d, 0, vbar=1)
        out += _term(lower, 0, d, 0, theta=1)
        out += _term(E(m1 + 1, m2, m3 - 2), -1, d, -1, sigma=1)

    return out


@lru_cache(maxsize=None)
def cond_ieii_moment(m1: int, m2: int, m3: int) -> GPoly:
    """``E[IE^m1 I^m2 I*^m3 | v_{n-1}]`` over :data:`COND_SIG` (powers of v_{n-1})."""
    if min(m1, m2, m3) < 0:
        raise ValueError("orders must be nonnegative")
    p = cond_ieii_moment_vbar(m1, m2, m3)
    v_minus_theta = GPoly(COND_SIG_VBAR, {(0, 0, 0, 1, 0, 0, 0): 1, (0, 0, 0, 0, 0, 1, 0): -1})
    p = p.substitute("vbar_{n-1}", v_minus_theta)
    return GPoly._raw(COND_SIG, dict(p.terms))


@lru_cache(maxsize=None)
def moment_v(m: int) -> GPoly:
    """Stationary raw moment ``E[v^m]`` over ``('theta', 'sigma_v', 'k^{-}')``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    out = GPoly.one(VAR_SIG)
    for j in range(m):
        out = out * GPoly(VAR_SIG, {(1, 0, 0): 1, (0, 2, 1): Fraction(j, 2)})
    return out


@lru_cache(maxsize=None)
def central_moment_vbar(m: int) -> GPoly:
    """Stationary central moment ``E[(v - theta)^m]``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    out = GPoly.zero(VAR_SIG)
    for i in range(m + 1):
        out += moment_v(i).shift(choose(m, i) * (-1) ** (m - i), theta=m - i)
    return out
