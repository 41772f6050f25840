"""Free strictly graded-commutative algebras over a field.

Variables carry nonpositive cohomological degrees.  Even variables are
polynomial, odd ones exterior.  A monomial is a tuple of ``(var, exponent)``
pairs sorted by the algebra's variable order; the coefficient absorbs the
Koszul sign of reordering, so every element has a unique normal form.
"""
from __future__ import annotations

from .coeffs import CoeffField, format_coeff
from .parsing import parse_expression


class FreeGCAlgebra:
    def __init__(self, field: CoeffField, degrees: dict):
        self.field = field
        self.degrees = dict(degrees)
        for v, d in self.degrees.items():
            if d > 0:
                raise ValueError(f"variable {v} has positive degree {d}")
        self.position = {v: i for i, v in enumerate(self.degrees)}
        self._order_cache = {}

    def __eq__(self, other):
        return isinstance(other, FreeGCAlgebra) and self.field == other.field and self.degrees == other.degrees

    def __hash__(self):
        return hash((self.field, tuple(self.degrees.items())))

    def __repr__(self):
        return f"FreeGCAlgebra({self.field!r}, {self.degrees})"

    def preserves_order_of(self, other: "FreeGCAlgebra") -> bool:
        """True if every variable of ``other`` is here, with the same degree and relative order."""
        key = id(other)
        cached = self._order_cache.get(key)
        if cached is not None and cached[0] is other:
            return cached[1]
        ok = True
        last = -1
        for v, d in other.degrees.items():
            if self.degrees.get(v) != d or self.position[v] < last:
                ok = False
                break
            last = self.position[v]
        self._order_cache[key] = (other, ok)
        return ok

    def is_odd(self, v) -> bool:
        return self.degrees[v] % 2 != 0

    def extended(self, degrees: dict) -> "FreeGCAlgebra":
        new = dict(self.degrees)
        for v, d in degrees.items():
            if v in new and new[v] != d:
                raise ValueError(f"variable {v} redeclared with another degree")
            new[v] = d
        return FreeGCAlgebra(self.field, new)

    # ------------------------------------------------------------ builders

    def zero(self) -> "GCElement":
        return GCElement(self, {})

    def one(self) -> "GCElement":
        return GCElement(self, {(): self.field.one})

    def const(self, c) -> "GCElement":
        c = self.field(c)
        return GCElement(self, {(): c} if c != 0 else {})

    def var(self, name) -> "GCElement":
        if name not in self.degrees:
            raise KeyError(name)
        return GCElement(self, {((name, 1),): self.field.one})

    def monomial(self, mono, coeff=1) -> "GCElement":
        return GCElement(self, {tuple(mono): self.field(coeff)})

    def parse(self, text: str) -> "GCElement":
        return parse_expression(text, self.var, self.const)

    def __call__(self, value) -> "GCElement":
        if isinstance(value, GCElement):
            if value.alg is self or value.alg == self:
                return GCElement(self, value.terms)
            return value.transfer(self)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    # ------------------------------------------------------------ monomials

    def mono_degree(self, mono) -> int:
        return sum(self.degrees[v] * k for v, k in mono)

    def mono_mul(self, m1, m2):
        """(sign, product monomial) or (0, None) when an odd square appears."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        pos = self.position
        sign = 1
        odd2 = [pos[v] for v, k in m2 if self.degrees[v] % 2]
        if odd2:
            for v, k in m1:
                if self.degrees[v] % 2:
                    pv = pos[v]
                    for q in odd2:
                        if q < pv:
                            sign = -sign
        merged = {}
        for v, k in m1:
            merged[v] = k
        for v, k in m2:
            if v in merged:
                if self.degrees[v] % 2:
                    return 0, None
                merged[v] += k
            else:
                merged[v] = k
        return sign, tuple(sorted(merged.items(), key=lambda t: pos[t[0]]))

    def split(self, mono):
        """Split into (degree-0 part, negative part) keeping the order."""
        zero = tuple((v, k) for v, k in mono if self.degrees[v] == 0)
        neg = tuple((v, k) for v, k in mono if self.degrees[v] != 0)
        return zero, neg

    def format_mono(self, mono) -> str:
        return "*".join(v if k == 1 else f"{v}^{k}" for v, k in mono)


class GCElement:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeGCAlgebra, terms: dict):
        self.alg = alg
        self.terms = terms

    def _lift(self, other):
        if isinstance(other, GCElement):
            if other.alg is not self.alg and other.alg != self.alg:
                raise ValueError("elements of different algebras")
            return other
        return self.alg.const(other)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return GCElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return GCElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, GCElement):
            c = self.alg.field(other)
            if c == 0:
                return self.alg.zero()
            return GCElement(self.alg, {m: a * c for m, a in self.terms.items()})
        other = self._lift(other)
        out = {}
        mm = self.alg.mono_mul
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = mm(m1, m2)
                if not sign:
                    continue
                v = c1 * c2 if sign > 0 else -(c1 * c2)
                s = out.get(m)
                s = v if s is None else s + v
                if s == 0:
                    del out[m]
                else:
                    out[m] = s
        return GCElement(self.alg, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, GCElement):
            return self.terms == other.terms
        try:
            return self.terms == self.alg.const(other).terms
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degrees(self) -> set:
        return {self.alg.mono_degree(m) for m in self.terms}

    def degree(self) -> int:
        """Cohomological degree of a homogeneous element (0 for zero)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError(f"{self} is not homogeneous")
        return ds.pop() if ds else 0

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def transfer(self, alg: FreeGCAlgebra) -> "GCElement":
        """Re-express in ``alg`` (which must contain all variables used)."""
        if alg.preserves_order_of(self.alg):
            return GCElement(alg, dict(self.terms))
        out = alg.zero()
        for m, c in self.terms.items():
            term = alg.const(c)
            for v, k in m:
                term = term * (alg.var(v) ** k)
            out = out + term
        return out

    def substitute(self, images: dict, target: FreeGCAlgebra | None = None) -> "GCElement":
        """Ring homomorphism defined by ``images[var]``; missing variables map to themselves."""
        target = target or self.alg
        cache = {}
        out = target.zero()
        for m, c in self.terms.items():
            term = target.const(c)
            for v, k in m:
                key = (v, k)
                if key not in cache:
                    img = images.get(v)
                    if img is None:
                        img = target.var(v)
                    elif img.alg is not target:
                        img = img.transfer(target) if img.alg != target else GCElement(target, img.terms)
                    cache[key] = img ** k
                term = term * cache[key]
                if not term:
                    break
            out = out + term
        return out

    def apply_derivation(self, dvals: dict, sign_degree: int = 1) -> "GCElement":
        """Apply the derivation of degree ``sign_degree`` with d(v) = dvals[v] (0 if absent)."""
        alg = self.alg
        out = alg.zero()
        for m, c in self.terms.items():
            prefix_deg = 0
            for i, (v, k) in enumerate(m):
                dv = dvals.get(v)
                if dv is not None and dv:
                    pre = alg.monomial(m[:i], c)
                    post = alg.monomial(m[i + 1:])
                    piece = dv if k == 1 else alg.monomial(((v, k - 1),), k) * dv
                    term = pre * piece * post
                    if sign_degree % 2 and prefix_deg % 2:
                        term = -term
                    out = out + term
                prefix_deg += alg.degrees[v] * k
        return out

    def partials(self) -> dict:
        """Kaehler differential: {v: coefficient c_v} with delta(self) = sum c_v * dv."""
        alg = self.alg
        out = {}
        for m, c in self.terms.items():
            for i, (v, k) in enumerate(m):
                rest = m[:i] + (((v, k - 1),) if k > 1 else ()) + m[i + 1:]
                suffix_deg = sum(alg.degrees[w] * kk for w, kk in m[i + 1:])
                coeff = c * k
                if (alg.degrees[v] * suffix_deg) % 2:
                    coeff = -coeff
                piece = alg.monomial(rest, coeff)
                out[v] = out[v] + piece if v in out else piece
        return {v: p for v, p in out.items() if p}

    def component(self, n: int) -> "GCElement":
        return GCElement(self.alg, {m: c for m, c in self.terms.items() if self.alg.mono_degree(m) == n})

    def sorted_terms(self):
        pos = self.alg.position
        return sorted(self.terms.items(), key=lambda t: (-sum(k for _, k in t[0]), [(pos[v], -k) for v, k in t[0]]))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            cs = format_coeff(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            mono = self.alg.format_mono(m)
            body = (mono if cs == "1" else f"{cs}*{mono}") if mono else cs
            pieces.append(("-" if neg else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"GCElement({self})"
