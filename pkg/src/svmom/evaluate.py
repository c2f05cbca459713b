"""Numeric evaluation and exact partial differentiation of moment polynomials.

Slot names get their numeric meaning from a :class:`SlotRegistry`.  The
default registry understands every slot produced by this package, including
the interval-local slots of the conditional Itô moments; those read the
extra keywords ``tau``, ``v0`` and ``t0`` passed to :func:`eval_poly`.
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .poly import GPoly, PolyError, SlotSignature, UnknownSlot

__all__ = [
    "PARAM_NAMES",
    "HestonParams",
    "SvjParams",
    "SlotRegistry",
    "DEFAULT_REGISTRY",
    "SingularEvaluation",
    "UnknownParameter",
    "UnsupportedSignature",
    "ParamFileError",
    "eval_poly",
    "diff_poly",
    "load_params",
    "parse_params",
]

PARAM_NAMES = ("mu", "k", "theta", "sigma_v", "rho", "h", "lambda", "mu_j", "sigma_j")
HESTON_NAMES = PARAM_NAMES[:6]


class SingularEvaluation(ArithmeticError):
    pass


class UnknownParameter(ValueError):
    pass


class UnsupportedSignature(PolyError):
    pass


class ParamFileError(ValueError):
    pass


@dataclass(frozen=True)
class HestonParams:
    mu: float
    k: float
    theta: float
    sigma_v: float
    rho: float
    h: float = 1.0

    def feller(self) -> bool:
        return 2 * self.k * self.theta > self.sigma_v ** 2

    def validate(self):
        if not (self.k > 0 and self.theta > 0 and self.sigma_v > 0 and self.h > 0):
            raise ValueError("require k > 0, theta > 0, sigma_v > 0, h > 0")
        if not -1 < self.rho < 1:
            raise ValueError("require -1 < rho < 1")
        if not self.feller():
            raise ValueError(f"Feller condition 2k*theta > sigma_v^2 violated: {self}")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SvjParams(HestonParams):
    lam: float = 0.0
    mu_j: float = 0.0
    sigma_j: float = 0.0

    def validate(self):
        super().validate()
        if self.lam < 0 or self.sigma_j < 0:
            raise ValueError("require lambda >= 0 and sigma_j >= 0")

    def heston(self) -> HestonParams:
        return HestonParams(self.mu, self.k, self.theta, self.sigma_v, self.rho, self.h)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lam")
        return d


Rule = Callable[[Mapping[str, float]], float]


class SlotRegistry(dict):
    """Mapping slot name -> rule computing the base factor from named values."""

    def factor(self, name: str, values: Mapping[str, float]) -> float:
        try:
            rule = self[name]
        except KeyError:
            raise UnknownSlot(f"no evaluation rule for slot {name!r}") from None
        try:
            return rule(values)
        except KeyError as exc:
            raise UnknownParameter(f"slot {name!r} needs value {exc.args[0]!r}") from None


def _get(name):
    return lambda v: v[name]


DEFAULT_REGISTRY = SlotRegistry({
    "e^{-kh}": lambda v: math.exp(-v["k"] * v["h"]),
    "h": _get("h"),
    "k^{-}": lambda v: 1.0 / v["k"],
    "k^{+}": _get("k"),
    "mu": _get("mu"),
    "theta": _get("theta"),
    "sigma_v": _get("sigma_v"),
    "rho": _get("rho"),
    "sqrt(1-rho^2)": lambda v: math.sqrt(1.0 - v["rho"] ** 2),
    "lambda": _get("lambda"),
    "mu_j": _get("mu_j"),
    "sigma_j": _get("sigma_j"),
    # interval-local slots of conditional moments
    "e^{k(n-1)h}": lambda v: math.exp(v["k"] * v.get("t0", 0.0)),
    "e^{k[t-(n-1)h]}": lambda v: math.exp(v["k"] * v["tau"]),
    "[t-(n-1)h]": _get("tau"),
    "v_{n-1}": _get("v0"),
    "vbar_{n-1}": lambda v: v["v0"] - v["theta"],
})

FINAL_SLOTS = frozenset({"e^{-kh}", "h", "k^{-}", "k^{+}", "mu", "theta", "sigma_v", "rho",
                         "sqrt(1-rho^2)", "lambda", "mu_j", "sigma_j"})


def _values(params) -> dict:
    if params is None:
        return {}
    if isinstance(params, HestonParams):
        return params.as_dict()
    return dict(params)


def eval_poly(p: GPoly, params=None, registry: SlotRegistry | None = None, **extra) -> float:
    """Evaluate ``p`` in double precision.

    ``params`` is a :class:`HestonParams`/:class:`SvjParams` or a mapping
    keyed by the names in :data:`PARAM_NAMES`.
    """
    registry = registry or DEFAULT_REGISTRY
    values = _values(params)
    values.update(extra)
    if isinstance(params, HestonParams) and params.sigma_v > 0 and not params.feller():
        warnings.warn("Feller condition violated", RuntimeWarning, stacklevel=2)
    if not p:
        return 0.0
    names = p.signature.names
    used = [i for i in range(len(names)) if any(k[i] for k in p.terms)]
    factors = {}
    for i in used:
        name = names[i]
        lowest = min(k[i] for k in p.terms)
        if name == "k^{-}" and values.get("k") == 0:
            raise SingularEvaluation("k = 0 with a negative power of k")
        if name == "sqrt(1-rho^2)":
            rho = values.get("rho")
            if rho is not None and (abs(rho) > 1 or (abs(rho) == 1 and lowest < 0)):
                raise SingularEvaluation(f"sqrt(1-rho^2) undefined or singular at rho={rho}")
        f = registry.factor(name, values)
        if f == 0 and lowest < 0:
            raise SingularEvaluation(f"slot {name!r} is zero but has a negative exponent")
        factors[i] = f
    parts = []
    for key, c in p.terms.items():
        t = float(c)
        for i in used:
            e = key[i]
            if e:
                t *= factors[i] ** e
        parts.append(t)
    return math.fsum(parts)


# -- differentiation -----------------------------------------------------------

DIFF_PARAMS = PARAM_NAMES


def diff_poly(p: GPoly, param: str) -> GPoly:
    """Exact partial derivative of a final-signature polynomial.

    Powers of ``k`` are tracked through the ``'k^{-}'`` slot and, when a
    positive power appears (differentiating ``e^{-kh}`` w.r.t. ``h``), a
    ``'k^{+}'`` slot appended to the signature.
    """
    if param not in DIFF_PARAMS:
        raise UnknownParameter(f"cannot differentiate with respect to {param!r}")
    sig = p.signature
    foreign = [n for n in sig.names if n not in FINAL_SLOTS]
    if foreign:
        raise UnsupportedSignature(f"interval-local or unknown slots present: {foreign}")

    work = sig if "k^{+}" in sig else sig.extended(["k^{+}"])
    q = p.extend_signature(work) if work is not sig else p
    idx = {n: work.index(n) for n in work.names}
    out: dict[tuple, Fraction] = {}

    def emit(key, c):
        key = tuple(key)
        out[key] = out.get(key, 0) + c

    def bump(key, **delta):
        key = list(key)
        for n, d in delta.items():
            key[idx[n]] += d
        return key

    def k_power(key, delta):
        # multiply by k^delta, keeping at most one of k^{-}, k^{+} nonzero
        key = list(key)
        im = idx.get("k^{-}")
        ip = idx["k^{+}"]
        net = key[ip] - (key[im] if im is not None else 0) + delta
        if net >= 0:
            key[ip] = net
            if im is not None:
                key[im] = 0
        else:
            if im is None:
                raise UnsupportedSignature("negative power of k needs a 'k^{-}' slot")
            key[im] = -net
            key[ip] = 0
        return key

    def need(name):
        if name not in idx:
            raise UnsupportedSignature(f"derivative needs slot {name!r}")

    for key, c in q.terms.items():
        if param in ("mu", "theta", "sigma_v", "lambda", "mu_j", "sigma_j"):
            if param in idx and key[idx[param]]:
                e = key[idx[param]]
                emit(bump(key, **{param: -1}), c * e)
        elif param == "rho":
            if "rho" in idx and key[idx["rho"]]:
                e = key[idx["rho"]]
                emit(bump(key, rho=-1), c * e)
            if "sqrt(1-rho^2)" in idx and key[idx["sqrt(1-rho^2)"]]:
                need("rho")
                q_ = key[idx["sqrt(1-rho^2)"]]
                emit(bump(key, rho=1, **{"sqrt(1-rho^2)": -2}), -c * q_)
        elif param == "k":
            net = key[idx["k^{+}"]] - (key[idx["k^{-}"]] if "k^{-}" in idx else 0)
            if net:
                emit(k_power(key, -1), c * net)
            if "e^{-kh}" in idx and key[idx["e^{-kh}"]]:
                need("h")
                a = key[idx["e^{-kh}"]]
                emit(bump(key, h=1), -c * a)
        elif param == "h":
            if "h" in idx and key[idx["h"]]:
                emit(bump(key, h=-1), c * key[idx["h"]])
            if "e^{-kh}" in idx and key[idx["e^{-kh}"]]:
                a = key[idx["e^{-kh}"]]
                emit(k_power(key, 1), -c * a)

    result = GPoly(work, out)
    if work is not sig and not any(k[idx["k^{+}"]] for k in result.terms):
        result = result.drop_slots(["k^{+}"])
    return result


# -- parameter files -----------------------------------------------------------

def parse_params(text: str) -> dict:
    """Parse a JSON object or flat ``key=value`` lines into a parameter dict."""
    stripped = text.strip()
    if not stripped:
        raise ParamFileError("parameter file is empty")
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParamFileError(f"invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ParamFileError("JSON parameters must be an object")
    else:
        raw = {}
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParamFileError(f"line {lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key in raw:
                raise ParamFileError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = val
    unknown = sorted(set(raw) - set(PARAM_NAMES))
    if unknown:
        raise ParamFileError(f"unknown parameter(s): {', '.join(unknown)}")
    out = {}
    for key, val in raw.items():
        try:
            out[key] = float(val)
        except (TypeError, ValueError):
            raise ParamFileError(f"parameter {key!r} is not a number: {val!r}") from None
    missing = [n for n in HESTON_NAMES if n not in out]
    if missing:
        raise ParamFileError(f"missing parameter(s): {', '.join(missing)}")
    return out


def load_params(path: str | Path) -> SvjParams:
    d = parse_params(Path(path).read_text())
    return SvjParams(mu=d["mu"], k=d["k"], theta=d["theta"], sigma_v=d["sigma_v"],
                     rho=d["rho"], h=d["h"], lam=d.get("lambda", 0.0),
                     mu_j=d.get("mu_j", 0.0), sigma_j=d.get("sigma_j", 0.0))
