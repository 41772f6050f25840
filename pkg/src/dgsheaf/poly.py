"""Sparse commutative polynomials over an exact coefficient field."""
from __future__ import annotations

from .coeffs import CoeffField, format_coeff
from .parsing import parse_expression


def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def monomial_key(order, nvars: int):
    """Return a sort key on exponent tuples; larger key = larger monomial.

    ``order`` is ``"lex"``, ``"grevlex"`` or ``("block", k)``; the block order
    compares the first ``k`` variables by grevlex first and eliminates them.
    """
    if order == "lex":
        return tuple
    if order == "grevlex":
        return _grevlex_key
    if isinstance(order, tuple) and order[0] == "block":
        k = order[1]

        def key(e):
            return (_grevlex_key(e[:k]), _grevlex_key(e[k:]))

        return key
    raise ValueError(f"unknown monomial order {order!r}")


class PolyRing:
    """K[x_1, ..., x_n] with a fixed variable order and monomial order."""

    def __init__(self, field: CoeffField, variables, order="grevlex"):
        self.field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        self.order = order
        self.nvars = len(self.variables)
        self.key = monomial_key(order, self.nvars)
        self.index = {v: i for i, v in enumerate(self.variables)}

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.variables == other.variables
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.field, self.variables, str(self.order)))

    def __repr__(self):
        return f"{self.field!r}[{', '.join(self.variables)}]<{self.order}>"

    @property
    def zero_exp(self):
        return (0,) * self.nvars

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self, {self.zero_exp: c} if c != 0 else {})

    def var(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self):
        return [self.var(v) for v in self.variables]

    def monomial(self, exps, coeff=1) -> "Poly":
        c = self.field(coeff)
        return Poly(self, {tuple(exps): c} if c != 0 else {})

    def parse(self, text: str) -> "Poly":
        return parse_expression(text, self.var, self.const)

    def __call__(self, value) -> "Poly":
        if isinstance(value, Poly):
            if value.ring == self:
                return value
            return value.change_ring(self)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def with_order(self, order) -> "PolyRing":
        return PolyRing(self.field, self.variables, order)

    def format_monomial(self, e) -> str:
        parts = []
        for v, k in zip(self.variables, e):
            if k == 1:
                parts.append(v)
            elif k > 1:
                parts.append(f"{v}^{k}")
        return "*".join(parts)


class Poly:
    """An immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms", "_lt")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._lt = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.field(other)
            if c == 0:
                return self.ring.zero()
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()})
        other = self._lift(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.const(other)
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def leading_term(self):
        """(exponents, coefficient) of the largest term."""
        if self._lt is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            e = max(self.terms, key=self.ring.key)
            self._lt = (e, self.terms[e])
        return self._lt

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get(self.ring.zero_exp, self.ring.field.zero)

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self * (1 / self.leading_term()[1])

    def variables_used(self):
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ring.variables[i])
        return used

    def change_ring(self, ring: PolyRing) -> "Poly":
        """Re-index into ``ring`` (its variables must cover the ones in use)."""
        idx = []
        for i, v in enumerate(self.ring.variables):
            idx.append(ring.index.get(v))
        out = {}
        for e, c in self.terms.items():
            new = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise ValueError(f"variable {self.ring.variables[i]} missing from {ring}")
                    new[j] = k
            out[tuple(new)] = ring.field(c)
        return Poly(ring, out)

    def substitute(self, images: dict, target_ring: PolyRing | None = None) -> "Poly":
        """Evaluate with ``images[var]`` (Poly in ``target_ring``); other variables are kept."""
        target = target_ring or self.ring
        powers = {}
        result = target.zero()
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                v = self.ring.variables[i]
                img = images.get(v)
                if img is None:
                    img = target.var(v)
                key = (v, k)
                if key not in powers:
                    powers[key] = img ** k
                term = term * powers[key]
            result = result + term
        return result

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = self.ring.format_monomial(e)
            cs = format_coeff(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            pieces.append(("-" if neg else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self})"
