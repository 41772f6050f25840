"""Exact coefficient fields: the rationals and prime fields F_p."""
from __future__ import annotations

from fractions import Fraction


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Mod:
    """An element of F_p.  Compares equal to ints with the same residue."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Mod):
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) / self

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pow__(self, e: int):
        return Mod(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return str(self.v)


class CoeffField:
    """A coefficient field: ``CoeffField()`` is Q, ``CoeffField(p)`` is F_p."""

    def __init__(self, p: int | None = None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = self(0)
        self.one = self(1)

    @property
    def kind(self) -> str:
        return "rationals" if self.p is None else "prime-field"

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def __call__(self, value) -> Fraction | Mod:
        if self.p is None:
            if isinstance(value, Mod):
                raise TypeError("cannot coerce F_p element into Q")
            return Fraction(value)
        if isinstance(value, Mod):
            if value.p != self.p:
                raise TypeError("mixing prime fields")
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            return Mod(value.numerator, self.p) / value.denominator
        return Mod(int(value), self.p)

    def __eq__(self, other):
        return isinstance(other, CoeffField) and other.p == self.p

    def __hash__(self):
        return hash(("CoeffField", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    def to_json(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    @classmethod
    def parse(cls, text: str) -> "CoeffField":
        t = text.strip().upper().replace(" ", "")
        if t in ("QQ", "Q", "RATIONALS"):
            return cls()
        for prefix in ("GF(", "F_", "FP(", "F("):
            if t.startswith(prefix):
                return cls(int(t[len(prefix):].rstrip(")")))
        raise ValueError(f"unknown coefficient field {text!r}")


QQ = CoeffField()


def GF(p: int) -> CoeffField:
    return CoeffField(p)


def format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)
