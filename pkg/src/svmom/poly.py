"""Sparse generalized polynomials with exact rational coefficients.

A :class:`GPoly` maps integer exponent vectors to :class:`fractions.Fraction`
coefficients.  The meaning of each exponent position is given by a
:class:`SlotSignature`, an ordered list of slot names such as ``'e^{-kh}'``,
``'h'`` or ``'k^{-}'``.  A slot name is only a label; numeric semantics are
attached elsewhere (see :mod:`svmom.evaluate`).

Example
-------
>>> sig = SlotSignature(["h", "mu", "theta"])
>>> p = GPoly(sig, {(1, 1, 0): 1, (1, 0, 1): Fraction(-1, 2)})
>>> print(p.render())
-1/2 * h^1 * theta^1 + 1 * h^1 * mu^1
"""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Slot",
    "SlotSignature",
    "GPoly",
    "PolyError",
    "SignatureMismatch",
    "NegativeExponentViolation",
    "UnknownSlot",
    "ParseError",
    "SchemaError",
    "SIGNED_SLOTS",
    "add",
    "sub",
    "mul",
    "scalar_mul",
    "pow_int",
    "extend_signature",
    "canonical_render",
    "to_json",
    "from_json",
]

# Slots that may legitimately carry negative exponents.  Used when a signature
# is built from bare names (e.g. when reading JSON).
SIGNED_SLOTS = frozenset({"e^{k[t-(n-1)h]}", "sqrt(1-rho^2)"})


class PolyError(ValueError):
    pass


class SignatureMismatch(PolyError):
    pass


class NegativeExponentViolation(PolyError):
    pass


class UnknownSlot(PolyError):
    pass


class ParseError(PolyError):
    pass


class SchemaError(PolyError):
    pass


class Slot:
    __slots__ = ("name", "allow_negative")

    def __init__(self, name: str, allow_negative: bool | None = None):
        self.name = name
        self.allow_negative = name in SIGNED_SLOTS if allow_negative is None else allow_negative

    def __repr__(self):
        return f"Slot({self.name!r}, allow_negative={self.allow_negative})"


class SlotSignature:
    """Ordered, named exponent positions of a :class:`GPoly`.

    Two signatures are equal iff their name sequences are identical; the
    negative-exponent policy is not part of the identity.
    """

    __slots__ = ("slots", "names", "_index", "_nonneg")

    def __init__(self, slots: Iterable[str | Slot | tuple]):
        built = []
        for s in slots:
            if isinstance(s, Slot):
                built.append(s)
            elif isinstance(s, str):
                built.append(Slot(s))
            else:
                built.append(Slot(*s))
        names = tuple(s.name for s in built)
        if len(set(names)) != len(names):
            raise PolyError(f"duplicate slot names in {names}")
        self.slots = tuple(built)
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self._nonneg = tuple(i for i, s in enumerate(built) if not s.allow_negative)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        if not isinstance(other, SlotSignature):
            return NotImplemented
        return self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"SlotSignature({self.names!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSlot(f"slot {name!r} not in {self.names}") from None

    def allows_negative(self, name: str) -> bool:
        return self.slots[self.index(name)].allow_negative

    def extended(self, extra: Iterable[str | Slot | tuple]) -> "SlotSignature":
        return SlotSignature(self.slots + SlotSignature(extra).slots)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be an exact rational, got {type(c).__name__}")


class GPoly:
    """Immutable sparse polynomial over a :class:`SlotSignature`.

    Zero coefficients are never stored.  Iteration yields keys in
    lexicographic order.
    """

    __slots__ = ("signature", "_terms")

    def __init__(self, signature: SlotSignature | Sequence[str],
                 terms: Mapping[Sequence[int], object] | None = None):
        if not isinstance(signature, SlotSignature):
            signature = SlotSignature(signature)
        self.signature = signature
        n = len(signature)
        nonneg = signature._nonneg
        clean: dict[tuple, Fraction] = {}
        for key, c in (terms or {}).items():
            key = tuple(int(e) for e in key)
            if len(key) != n:
                raise SchemaError(f"key {key} has length {len(key)}, signature has {n}")
            for i in nonneg:
                if key[i] < 0:
                    raise NegativeExponentViolation(
                        f"negative exponent in slot {signature.names[i]!r}: {key}")
            c = _as_fraction(c)
            if key in clean:
                c += clean[key]
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        self._terms = clean

    @classmethod
    def _raw(cls, signature: SlotSignature, terms: dict) -> "GPoly":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.signature = signature
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls, signature) -> "GPoly":
        return cls(signature)

    @classmethod
    def const(cls, signature, c=1) -> "GPoly":
        if not isinstance(signature, SlotSignature):
            signature = SlotSignature(signature)
        return cls(signature, {(0,) * len(signature): c})

    @classmethod
    def one(cls, signature) -> "GPoly":
        return cls.const(signature, 1)

    @classmethod
    def monomial(cls, signature, c=1, **exponents) -> "GPoly":
        """Single term built from slot-name keyword exponents.

        Slot names are not valid identifiers, so pass them via ``**{...}``.
        """
        if not isinstance(signature, SlotSignature):
            signature = SlotSignature(signature)
        key = [0] * len(signature)
        for name, e in exponents.items():
            key[signature.index(name)] = e
        return cls(signature, {tuple(key): c})

    # -- mapping-like access ---------------------------------------------
    @property
    def terms(self) -> Mapping[tuple, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def keyfor(self) -> tuple:
        return self.signature.names

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms))

    def __contains__(self, key):
        return tuple(key) in self._terms

    def __getitem__(self, key) -> Fraction:
        return self._terms.get(tuple(key), Fraction(0))

    def items(self):
        return sorted(self._terms.items())

    def keys(self):
        return sorted(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, GPoly):
            return self.signature == other.signature and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            if other == 0:
                return not self._terms
            zero = (0,) * len(self.signature)
            return len(self._terms) == 1 and self._terms.get(zero) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.signature, frozenset(self._terms.items())))

    def __repr__(self):
        body = ", ".join(f"{k}: {c!r}" for k, c in self.items())
        return f"GPoly(keyfor={self.signature.names}, {{{body}}})"

    def __str__(self):
        return self.render()

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "GPoly"):
        if self.signature != other.signature:
            raise SignatureMismatch(f"{self.signature.names} vs {other.signature.names}")

    def __add__(self, other):
        if isinstance(other, (int, Rational)):
            other = GPoly.const(self.signature, other)
        elif not isinstance(other, GPoly):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return GPoly._raw(self.signature, out)

    __radd__ = __add__

    def __neg__(self):
        return GPoly._raw(self.signature, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Rational)):
            other = GPoly.const(self.signature, other)
        elif not isinstance(other, GPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, GPoly):
            return NotImplemented
        self._check(other)
        out: dict[tuple, Fraction] = {}
        get = out.get
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = get(k, 0) + ca * cb
        return GPoly._raw(self.signature, {k: c for k, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / _as_fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = GPoly.one(self.signature)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "GPoly":
        c = _as_fraction(c)
        if not c:
            return GPoly._raw(self.signature, {})
        return GPoly._raw(self.signature, {k: v * c for k, v in self._terms.items()})

    # -- structural --------------------------------------------------------
    def extend_signature(self, target: SlotSignature | Sequence[str],
                         mapping: Mapping[str, str] | None = None) -> "GPoly":
        """Re-express the polynomial in a larger signature.

        ``mapping`` sends source slot names to target slot names and defaults
        to the identity on names.  Unmapped target slots get exponent 0.
        """
        if not isinstance(target, SlotSignature):
            target = SlotSignature(target)
        mapping = mapping or {}
        pos = []
        for name in self.signature.names:
            dest = mapping.get(name, name)
            if dest not in target:
                raise UnknownSlot(f"slot {name!r} has no image in {target.names}")
            pos.append(target.index(dest))
        if len(set(pos)) != len(pos):
            raise PolyError("slot mapping is not injective")
        n = len(target)
        out = {}
        for k, c in self._terms.items():
            key = [0] * n
            for p, e in zip(pos, k):
                key[p] = e
            out[tuple(key)] = c
        return GPoly(target, out)

    def shift(self, c=1, **delta) -> "GPoly":
        """Multiply by ``c`` times a monomial given as slot-name exponent offsets.

        Offsets may be negative as long as every resulting exponent respects
        the slot policy; this lets callers cancel factors without building an
        invalid intermediate monomial.
        """
        d = [0] * len(self.signature)
        for name, e in delta.items():
            d[self.signature.index(name)] = e
        c = _as_fraction(c)
        return GPoly(self.signature,
                     {tuple(a + b for a, b in zip(k, d)): v * c for k, v in self._terms.items()})

    def substitute(self, name: str, value: "GPoly") -> "GPoly":
        """Replace the factor ``name`` by the polynomial ``value``.

        ``value`` must live in the same signature; the substituted slot must
        hold nonnegative exponents only.
        """
        self._check(value)
        i = self.signature.index(name)
        powers = [GPoly.one(self.signature)]
        out = GPoly.zero(self.signature)
        grouped: dict[int, dict] = {}
        for k, c in self._terms.items():
            e = k[i]
            if e < 0:
                raise NegativeExponentViolation(f"cannot substitute negative power of {name!r}")
            grouped.setdefault(e, {})[k[:i] + (0,) + k[i + 1:]] = c
        for e in sorted(grouped):
            while len(powers) <= e:
                powers.append(powers[-1] * value)
            out = out + GPoly._raw(self.signature, grouped[e]) * powers[e]
        return out

    def drop_slots(self, names: Iterable[str]) -> "GPoly":
        """Remove slots whose exponent is zero in every term."""
        names = set(names)
        keep = [i for i, n in enumerate(self.signature.names) if n not in names]
        drop = [self.signature.index(n) for n in names]
        for k in self._terms:
            if any(k[i] for i in drop):
                raise PolyError(f"cannot drop slots {sorted(names)}: nonzero exponent in {k}")
        sig = SlotSignature([self.signature.slots[i] for i in keep])
        return GPoly._raw(sig, {tuple(k[i] for i in keep): c for k, c in self._terms.items()})

    # -- text & serialization ---------------------------------------------
    def render(self) -> str:
        if not self._terms:
            return "0"
        names = self.signature.names
        parts = []
        for key, c in self.items():
            factors = [str(c)]
            factors += [f"{n}^{e}" for n, e in zip(names, key) if e]
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def to_json(self) -> bytes:
        doc = {
            "keyfor": list(self.signature.names),
            "terms": [{"key": list(k), "num": c.numerator, "den": c.denominator}
                      for k, c in self.items()],
        }
        return json.dumps(doc, separators=(",", ":")).encode()

    @classmethod
    def from_json(cls, data: bytes | str,
                  signature: SlotSignature | None = None) -> "GPoly":
        try:
            doc = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ParseError(str(exc)) from exc
        if not isinstance(doc, dict) or "keyfor" not in doc or "terms" not in doc:
            raise SchemaError("expected an object with 'keyfor' and 'terms'")
        keyfor = doc["keyfor"]
        if not isinstance(keyfor, list) or not all(isinstance(n, str) for n in keyfor):
            raise SchemaError("'keyfor' must be a list of strings")
        if signature is None:
            signature = SlotSignature(keyfor)
        elif list(signature.names) != keyfor:
            raise SchemaError(f"keyfor {keyfor} does not match {signature.names}")
        terms = {}
        for t in doc["terms"]:
            try:
                key, num, den = t["key"], t["num"], t["den"]
            except (TypeError, KeyError) as exc:
                raise SchemaError(f"malformed term {t!r}") from exc
            if (not isinstance(key, list) or not all(type(e) is int for e in key)
                    or type(num) is not int or type(den) is not int or den <= 0):
                raise SchemaError(f"malformed term {t!r}")
            if len(key) != len(signature):
                raise SchemaError(f"key {key} does not match signature length {len(signature)}")
            if tuple(key) in terms:
                raise SchemaError(f"duplicate key {key}")
            terms[tuple(key)] = Fraction(num, den)
        try:
            return cls(signature, terms)
        except NegativeExponentViolation as exc:
            raise SchemaError(str(exc)) from exc


# functional aliases ---------------------------------------------------------

def add(a: GPoly, b: GPoly) -> GPoly:
    return a + b


def sub(a: GPoly, b: GPoly) -> GPoly:
    return a - b


def mul(a: GPoly, b: GPoly) -> GPoly:
    return a * b


def scalar_mul(a: GPoly, c) -> GPoly:
    return a.scale(c)


def pow_int(a: GPoly, n: int) -> GPoly:
    return a ** n


def extend_signature(a: GPoly, target, mapping=None) -> GPoly:
    return a.extend_signature(target, mapping)


def canonical_render(a: GPoly) -> str:
    return a.render()


def to_json(a: GPoly) -> bytes:
    return a.to_json()


def from_json(data, signature=None) -> GPoly:
    return GPoly.from_json(data, signature)
