"""LaTeX rendering of moment polynomials."""
from __future__ import annotations

from fractions import Fraction

from .poly import GPoly

# slot name -> (TeX base, how the exponent attaches)
_TEX = {
    "mu": r"\mu",
    "theta": r"\theta",
    "sigma_v": r"\sigma_v",
    "rho": r"\rho",
    "lambda": r"\lambda",
    "mu_j": r"\mu_j",
    "sigma_j": r"\sigma_j",
    "h": "h",
    "v_{n-1}": "v_{n-1}",
    "vbar_{n-1}": r"\bar{v}_{n-1}",
    "[t-(n-1)h]": "[t-(n-1)h]",
}


def _power(base: str, e: int) -> str:
    if e == 1:
        return base
    if "_" in base:
        base = "{" + base + "}"
    return f"{base}^{{{e}}}"


def _factor(name: str, e: int) -> str:
    if name == "e^{-kh}":
        return "e^{-kh}" if e == 1 else f"e^{{-{e}kh}}"
    if name == "e^{k(n-1)h}":
        return "e^{k(n-1)h}" if e == 1 else f"e^{{{e}k(n-1)h}}"
    if name == "e^{k[t-(n-1)h]}":
        return "e^{k[t-(n-1)h]}" if e == 1 else f"e^{{{e}k[t-(n-1)h]}}"
    if name == "k^{-}":
        return f"k^{{-{e}}}"
    if name == "k^{+}":
        return _power("k", e)
    if name == "sqrt(1-rho^2)":
        if e == 1:
            return r"\sqrt{1-\rho^2}"
        return rf"\left(\sqrt{{1-\rho^2}}\right)^{{{e}}}"
    if name in _TEX:
        return _power(_TEX[name], e)
    return _power(r"\mathrm{" + name.replace("_", r"\_") + "}", e)


def _coef(c: Fraction, bare: bool) -> str:
    if c.denominator == 1:
        return "" if (bare and c == 1) else str(c.numerator)
    return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def render_latex(p: GPoly) -> str:
    """Math-mode fragment for ``p`` with terms in lexicographic key order."""
    if not p:
        return "0"
    names = p.signature.names
    out = []
    for i, (key, c) in enumerate(p.items()):
        factors = [_factor(n, e) for n, e in zip(names, key) if e]
        sign = "-" if c < 0 else "+"
        body = _coef(abs(c), bool(factors))
        if factors:
            body = (body + " " if body else "") + " ".join(factors)
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)
