"""Stalks as complexes of finitely generated modules over a polynomial ring.

At a point x the stalk of a DG ring sheaf is K[V_x]/(R_x) with V_x the
variables supported at x.  Writing P = K[degree-0 variables], the degree-n
component is the free P-module on the negative monomials of degree n modulo
the P-span of {m * r}.  The differential kills P, so each d^n is P-linear
and all homological questions reduce to submodule computations over P.
"""
from __future__ import annotations

from functools import cached_property

from .gcalg import GCElement
from .groebner import SubmoduleBasis
from .poly import PolyRing
from .pseudofree import _negative_monomials


class FreeComplex:
    """Interface: a cochain complex of finitely presented P-modules (degrees <= 0)."""

    P: PolyRing

    def rank(self, n: int) -> int:
        raise NotImplementedError

    def d_columns(self, n: int) -> list:
        raise NotImplementedError

    def relations(self, n: int) -> list:
        raise NotImplementedError

    def relation_basis(self, n: int) -> SubmoduleBasis:
        cache = self.__dict__.setdefault("_relbasis", {})
        if n not in cache:
            cache[n] = SubmoduleBasis(self.P, self.rank(n), self.relations(n))
        return cache[n]


class StalkDGA(FreeComplex):
    def __init__(self, B, x):
        self.sheaf = B
        self.point = x
        self.field = B.field
        self.alg = B.algebra
        self.degrees = B.variables_at(x)
        self.zero_vars = [v for v, d in self.degrees.items() if d == 0]
        self.neg_vars = [v for v, d in self.degrees.items() if d < 0]
        self.P = PolyRing(self.field, self.zero_vars)
        self._zpos = {v: i for i, v in enumerate(self.zero_vars)}
        self.rels = [r for r in B.relations_at(x) if r]
        self.dvals = B.d_values_at(x)
        self._mons = {}
        self._index = {}
        self._rels = {}
        self._dcols = {}

    def __repr__(self):
        return f"StalkDGA({self.sheaf!r} at {self.point})"

    # ------------------------------------------------------------ bases

    def monomials(self, n: int):
        if n not in self._mons:
            mons = _negative_monomials(self.neg_vars, self.degrees, n) if n <= 0 else []
            self._mons[n] = mons
            self._index[n] = {m: i for i, m in enumerate(mons)}
        return self._mons[n]

    def rank(self, n: int) -> int:
        return len(self.monomials(n))

    def labels(self, n: int):
        return [self.alg.format_mono(m) or "1" for m in self.monomials(n)]

    def monomial_element(self, n: int, j: int) -> GCElement:
        return self.alg.monomial(self.monomials(n)[j])

    # ------------------------------------------------------------ conversion

    def to_vector(self, elem, n: int) -> dict:
        elem = self.alg(elem)
        self.monomials(n)
        index = self._index[n]
        out = {}
        nz = len(self.zero_vars)
        for mono, c in elem.terms.items():
            exps = [0] * nz
            neg = []
            for v, k in mono:
                i = self._zpos.get(v)
                if i is None:
                    neg.append((v, k))
                else:
                    exps[i] = k
            neg = tuple(neg)
            j = index.get(neg)
            if j is None:
                raise ValueError(f"term {self.alg.format_mono(mono)} is not a degree-{n} monomial at {self.point}")
            out[(j, tuple(exps))] = c
        return out

    def from_vector(self, vec: dict, n: int) -> GCElement:
        mons = self.monomials(n)
        pos = self.alg.position
        terms = {}
        for (j, exps), c in vec.items():
            zero = tuple((v, k) for v, k in zip(self.zero_vars, exps) if k)
            mono = tuple(sorted(zero + mons[j], key=lambda t: pos[t[0]]))
            terms[mono] = terms.get(mono, 0) + c
        return GCElement(self.alg, {m: c for m, c in terms.items() if c != 0})

    def poly_to_element(self, p) -> GCElement:
        return self.from_vector({(0, e): c for e, c in p.terms.items()}, 0)

    def element_to_poly(self, elem):
        return _vec_to_poly(self.P, self.to_vector(elem, 0))

    # ------------------------------------------------------------ structure

    def relations(self, n: int) -> list:
        if n not in self._rels:
            out = []
            seen = set()
            for r in self.rels:
                dr = r.degree()
                if dr < n:
                    continue
                for m in self.monomials(n - dr):
                    v = self.to_vector(self.alg.monomial(m) * r, n)
                    key = frozenset(v.items())
                    if v and key not in seen:
                        seen.add(key)
                        out.append(v)
            self._rels[n] = out
        return self._rels[n]

    def d_element(self, elem) -> GCElement:
        return self.alg(elem).apply_derivation(self.dvals)

    def d_columns(self, n: int) -> list:
        if n not in self._dcols:
            self._dcols[n] = [self.to_vector(self.d_element(self.alg.monomial(m)), n + 1)
                              for m in self.monomials(n)]
        return self._dcols[n]

    def apply_d(self, vec: dict, n: int) -> dict:
        from .groebner import add_vec, scale_vec
        cols = self.d_columns(n)
        parts = []
        for (j, exps), c in vec.items():
            parts.append(scale_vec(cols[j], self.P.monomial(exps, c)))
        return add_vec(*parts) if parts else {}

    # ------------------------------------------------------------ normal forms

    def components(self, elem) -> dict:
        elem = self.alg(elem)
        out = {}
        for m, c in elem.terms.items():
            n = self.alg.mono_degree(m)
            out.setdefault(n, {})[m] = c
        return {n: GCElement(self.alg, t) for n, t in out.items()}

    def is_zero(self, elem) -> bool:
        for n, comp in self.components(elem).items():
            if n > 0:
                return False
            if self.relation_basis(n).reduce(self.to_vector(comp, n)):
                return False
        return True

    def normal_form(self, elem) -> GCElement:
        out = self.alg.zero()
        for n, comp in self.components(elem).items():
            out = out + self.from_vector(self.relation_basis(n).reduce(self.to_vector(comp, n)), n)
        return out

    @cached_property
    def degree_zero_relations(self):
        """The ideal J of B^0 = P/J as a list of polynomials."""
        return [_vec_to_poly(self.P, v) for v in self.relations(0)]


def _vec_to_poly(P: PolyRing, vec: dict):
    from .poly import Poly
    return Poly(P, {e: c for (j, e), c in vec.items()})
