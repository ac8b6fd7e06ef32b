"""Sorted variables and linear terms over Int/Real, possibly containing floor."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import SortError

Number = Union[int, Fraction]
_ZERO = Fraction(0)
_ONE = Fraction(1)
_SMALL = tuple(Fraction(i) for i in range(-16, 17))


class Sort(enum.Enum):
    INT = "Int"
    REAL = "Real"

    # members are singletons, so identity hashing agrees with equality and avoids Enum.__hash__
    __hash__ = object.__hash__

    def __str__(self) -> str:
        return self.value


class SortedVar(NamedTuple):
    # a tuple so that hashing and equality run in C; variables are dict keys everywhere
    name: str
    sort: Sort

    def __repr__(self) -> str:
        return f"{self.name}:{self.sort.value}"

    @property
    def term(self) -> "LinTerm":
        return LinTerm.var(self)


@dataclass(frozen=True)
class Floor:
    """The floor of a linear term. Appears only as a key inside a LinTerm."""

    arg: "LinTerm"

    def __repr__(self) -> str:
        return f"floor({self.arg!r})"


Key = Union[SortedVar, Floor]


def key_order(key: Key) -> tuple:
    if isinstance(key, SortedVar):
        return (0, key.name, key.sort.value)
    return (1, repr(key.arg))


def _frac(c: Number) -> Fraction:
    if type(c) is Fraction or isinstance(c, Fraction):
        return c
    if type(c) is int and -16 <= c <= 16:
        return _SMALL[c + 16]
    if isinstance(c, bool):
        raise TypeError("bool is not a number")
    return Fraction(c)


class LinTerm:
    """An immutable linear combination ``sum(c_k * key_k) + const``.

    Keys are sorted variables or floor nodes. Zero coefficients are dropped,
    so two terms denoting the same combination compare equal.
    """

    __slots__ = ("_coeffs", "const", "_hash", "_vars")

    def __init__(self, coeffs: Mapping[Key, Number] | None = None, const: Number = 0):
        items = {}
        if coeffs:
            for k, c in coeffs.items():
                c = _frac(c)
                if c:
                    items[k] = c
        self._coeffs: dict[Key, Fraction] = items
        self.const: Fraction = _frac(const)
        self._hash: int | None = None
        self._vars: frozenset | None = None

    @classmethod
    def _raw(cls, acc: dict, const: Fraction) -> "LinTerm":
        """Build from Fraction coefficients without re-checking them."""
        t = object.__new__(cls)
        t._coeffs = {k: c for k, c in acc.items() if c}
        t.const = const
        t._hash = None
        t._vars = None
        return t

    @classmethod
    def var(cls, v: SortedVar, coeff: Number = 1) -> "LinTerm":
        if coeff == 1:
            return cls._raw({v: _ONE}, _ZERO)
        return cls({v: coeff})

    @classmethod
    def constant(cls, c: Number) -> "LinTerm":
        return cls(None, c)

    @classmethod
    def floor(cls, arg: "LinTerm") -> "LinTerm":
        """floor(arg) with integer-valued summands pulled out of the floor."""
        whole: dict[Key, Fraction] = {}
        rest: dict[Key, Fraction] = {}
        for k, c in arg._coeffs.items():
            integral = c.denominator == 1 and (
                isinstance(k, Floor) or k.sort is Sort.INT)
            (whole if integral else rest)[k] = c
        base = math.floor(arg.const)
        if not rest:
            return cls(whole, base)
        inner = cls(rest, arg.const - base)
        return cls(whole, base) + cls({Floor(inner): 1})

    @classmethod
    def sum(cls, terms: Iterable["LinTerm"]) -> "LinTerm":
        acc: dict[Key, Fraction] = {}
        const = Fraction(0)
        for t in terms:
            for k, c in t._coeffs.items():
                acc[k] = acc.get(k, 0) + c
            const += t.const
        return cls._raw(acc, const)

    # -- inspection ---------------------------------------------------------

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: key_order(kv[0]))

    def keys(self):
        return self._coeffs.keys()

    def coeff(self, key: Key) -> Fraction:
        return self._coeffs.get(key, Fraction(0))

    def is_constant(self) -> bool:
        return not self._coeffs

    def is_zero(self) -> bool:
        return not self._coeffs and self.const == 0

    def has_floor(self) -> bool:
        return any(isinstance(k, Floor) for k in self._coeffs)

    def variables(self) -> frozenset[SortedVar]:
        """All variables, including those under floor."""
        if self._vars is None:
            out: set[SortedVar] = set()
            for k in self._coeffs:
                if isinstance(k, SortedVar):
                    out.add(k)
                else:
                    out |= k.arg.variables()
            self._vars = frozenset(out)
        return self._vars

    def floors(self) -> list[Floor]:
        return [k for k in self._coeffs if isinstance(k, Floor)]

    def is_int_valued(self) -> bool:
        """True when the term is integer for every sort-respecting assignment."""
        if self.const.denominator != 1:
            return False
        for k, c in self._coeffs.items():
            if c.denominator != 1:
                return False
            if isinstance(k, SortedVar) and k.sort is not Sort.INT:
                return False
        return True

    def denominator_lcm(self) -> int:
        m = self.const.denominator
        for c in self._coeffs.values():
            m = m * c.denominator // math.gcd(m, c.denominator)
        return m

    def content(self) -> int:
        """gcd of the (integral) coefficients, ignoring the constant."""
        g = 0
        for c in self._coeffs.values():
            g = math.gcd(g, c.numerator)
        return g

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LinTerm | Number") -> "LinTerm":
        if not isinstance(other, LinTerm):
            return LinTerm._raw(self._coeffs, self.const + _frac(other))
        acc = dict(self._coeffs)
        for k, c in other._coeffs.items():
            acc[k] = acc.get(k, 0) + c
        return LinTerm._raw(acc, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "LinTerm":
        return LinTerm._raw({k: -c for k, c in self._coeffs.items()}, -self.const)

    def __sub__(self, other: "LinTerm | Number") -> "LinTerm":
        if not isinstance(other, LinTerm):
            return LinTerm._raw(self._coeffs, self.const - _frac(other))
        acc = dict(self._coeffs)
        for k, c in other._coeffs.items():
            acc[k] = acc.get(k, 0) - c
        return LinTerm._raw(acc, self.const - other.const)

    def __rsub__(self, other: Number) -> "LinTerm":
        return (-self) + other

    def scale(self, c: Number) -> "LinTerm":
        c = _frac(c)
        if c == 1:
            return self
        if c == 0:
            return LinTerm()
        return LinTerm._raw({k: v * c for k, v in self._coeffs.items()}, self.const * c)

    def __mul__(self, c: Number) -> "LinTerm":
        if isinstance(c, LinTerm):
            if c.is_constant():
                return self.scale(c.const)
            if self.is_constant():
                return c.scale(self.const)
            raise SortError("nonlinear multiplication")
        return self.scale(c)

    __rmul__ = __mul__

    def without_const(self) -> "LinTerm":
        return LinTerm(self._coeffs, 0)

    def restrict(self, keys: Iterable[Key]) -> "LinTerm":
        """The part of the term over the given keys (constant dropped)."""
        ks = set(keys)
        return LinTerm({k: c for k, c in self._coeffs.items() if k in ks})

    # -- substitution / evaluation -----------------------------------------

    def substitute(self, mapping: Mapping[SortedVar, "LinTerm"]) -> "LinTerm":
        if not mapping:
            return self
        if not any(k in mapping or isinstance(k, Floor) for k in self._coeffs):
            return self
        acc: dict[Key, Fraction] = {}
        const = self.const
        for k, c in self._coeffs.items():
            if isinstance(k, SortedVar):
                rep = mapping.get(k)
                if rep is None:
                    acc[k] = acc.get(k, 0) + c
                    continue
            else:
                rep = LinTerm.floor(k.arg.substitute(mapping))
            for k2, c2 in rep._coeffs.items():
                acc[k2] = acc.get(k2, 0) + c * c2
            const += c * rep.const
        return LinTerm._raw(acc, const)

    def evaluate(self, asg: Mapping[SortedVar, Number]) -> Fraction:
        total = self.const
        for k, c in self._coeffs.items():
            if isinstance(k, SortedVar):
                try:
                    val = asg[k]
                except KeyError:
                    raise KeyError(f"no value for variable {k.name}") from None
                total += c * _frac(val)
            else:
                total += c * math.floor(k.arg.evaluate(asg))
        return total

    # -- dunder -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LinTerm):
            return self.const == other.const and self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return not self._coeffs and self.const == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._coeffs.items()), self.const))
        return self._hash

    def __repr__(self) -> str:
        parts = []
        for k, c in self.items():
            name = k.name if isinstance(k, SortedVar) else repr(k)
            parts.append(name if c == 1 else f"{c}*{name}")
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


def check_int_valued(v: SortedVar, t: LinTerm) -> None:
    if v.sort is Sort.INT and not t.is_int_valued():
        raise SortError(f"cannot substitute non-integer term {t!r} for Int variable {v.name}")


def check_assignment(asg: Mapping[SortedVar, Number], vars_: Iterable[SortedVar]) -> None:
    for v in vars_:
        if v.sort is Sort.INT and _frac(asg[v]).denominator != 1:
            raise SortError(f"Int variable {v.name} assigned non-integer {asg[v]}")
