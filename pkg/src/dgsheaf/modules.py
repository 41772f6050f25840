"""Finitely presented modules over quotient polynomial rings and their comparison."""
from __future__ import annotations

from itertools import combinations_with_replacement

from . import linalg
from .groebner import SubmoduleBasis, scale_vec
from .poly import Poly, PolyRing


class NotFiniteDimensional(ValueError):
    """A presented module is infinite-dimensional over the coefficient field."""


class ModulePresentation:
    """The module P^ngens / span(relations), with P = ``ring``.

    Quotient-ring structure is carried by the relations themselves
    (include ``J * e_i`` for a ring P/J).
    """

    def __init__(self, ring: PolyRing, ngens: int, relations=()):
        self.ring = ring
        self.ngens = ngens
        self.relations = [dict(r) for r in relations if r]
        self._sb = None

    @classmethod
    def cyclic(cls, ring: PolyRing, ideal) -> "ModulePresentation":
        """P / ideal."""
        return cls(ring, 1, [{(0, e): a for e, a in p.terms.items()} for p in ideal])

    @classmethod
    def direct_sum(cls, *mods) -> "ModulePresentation":
        ring = mods[0].ring
        rels = []
        off = 0
        for m in mods:
            if m.ring != ring:
                raise ValueError("direct sum over different rings")
            rels.extend({(c + off, e): a for (c, e), a in r.items()} for r in m.relations)
            off += m.ngens
        return cls(ring, off, rels)

    @property
    def basis(self) -> SubmoduleBasis:
        if self._sb is None:
            self._sb = SubmoduleBasis(self.ring, self.ngens, self.relations)
        return self._sb

    def dimension(self):
        """K-dimension, or ``None`` when infinite."""
        if self.ngens == 0:
            return 0
        return self.basis.quotient_dimension()

    def is_zero(self) -> bool:
        return self.ngens == 0 or self.basis.is_whole()

    def reduced_relations(self):
        return list(self.basis.basis)

    def to_finite(self, variables=None) -> "FiniteModule":
        """K-vector space with the action matrices of ``variables`` (default: all)."""
        if self.ngens == 0:
            sm = []
        else:
            sm = self.basis.standard_monomials()
        if sm is None:
            raise NotFiniteDimensional(f"module over {self.ring} is infinite-dimensional")
        field = self.ring.field
        variables = list(self.ring.variables if variables is None else variables)
        index = {t: i for i, t in enumerate(sm)}
        actions = {}
        for v in variables:
            if v not in self.ring.index:
                actions[v] = [[field.zero] * len(sm) for _ in sm]
                continue
            x = self.ring.var(v)
            mat = [[field.zero] * len(sm) for _ in sm]
            for j, (c, e) in enumerate(sm):
                img = self.basis.reduce(scale_vec({(c, e): field.one}, x))
                for t, a in img.items():
                    mat[index[t]][j] = a
            actions[v] = mat
        return FiniteModule(field, len(sm), actions)

    def __repr__(self):
        return f"ModulePresentation({self.ring}, gens={self.ngens}, rels={len(self.relations)})"


class FiniteModule:
    """A finite-dimensional module given by commuting action matrices."""

    def __init__(self, field, dim: int, actions: dict):
        self.field = field
        self.dim = dim
        self.actions = actions

    def monomial_action(self, word):
        m = linalg.identity(self.dim, self.field)
        for v in word:
            m = linalg.matmul(self.actions[v], m, self.field)
        return m

    def invariants(self, variables=None):
        """Dimensions of annihilator layers plus ranks/char polys of monomial actions."""
        variables = sorted(self.actions if variables is None else variables)
        inv = {"dim": self.dim}
        if self.dim == 0:
            return inv
        layers = []
        for k in range(1, self.dim + 1):
            rows = []
            for word in combinations_with_replacement(variables, k):
                rows.extend(self.monomial_action(word))
            layers.append(self.dim - linalg.rank(rows, self.field) if rows else self.dim)
        inv["annihilator_layers"] = tuple(layers)
        words = {}
        for k in range(1, self.dim + 1):
            for word in combinations_with_replacement(variables, k):
                m = self.monomial_action(word)
                words[word] = (linalg.rank(m, self.field), tuple(linalg.charpoly(m, self.field)))
        inv["words"] = words
        return inv


def truncation(p: ModulePresentation, k: int) -> ModulePresentation:
    """M / m^k M for m the ideal of all variables of the ring."""
    ring = p.ring
    extra = []
    for exps in _monomials_of_degree(len(ring.variables), k):
        mono = ring.monomial(exps)
        extra.extend({(c, e): a for e, a in mono.terms.items()} for c in range(p.ngens))
    return ModulePresentation(ring, p.ngens, p.relations + extra)


def _monomials_of_degree(n: int, k: int):
    for combo in combinations_with_replacement(range(n), k):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        yield tuple(exps)


def module_iso_test(p1: ModulePresentation, p2: ModulePresentation, variables=None, depth: int = 3) -> bool:
    """Isomorphism test for presented modules, by invariants.

    Finite-dimensional modules are compared through K-dimensions, the
    dimensions of the layers ann(m^k) for the ideal m of ``variables``, and
    rank and characteristic polynomial of every monomial action of degree
    <= dim.  Infinite-dimensional modules are compared through the same
    invariants of their truncations M / m^k M for k <= ``depth``.
    ``variables`` defaults to the common variables, which lets modules
    presented over different polynomial rings be compared as modules over
    their shared subring.
    """
    if variables is None:
        variables = [v for v in p1.ring.variables if v in p2.ring.index]
    d1, d2 = p1.dimension(), p2.dimension()
    if (d1 is None) != (d2 is None):
        return False
    if d1 is None:
        return all(module_iso_test(truncation(p1, k), truncation(p2, k), variables)
                   for k in range(1, depth + 1))
    if d1 != d2:
        return False
    f1 = p1.to_finite(variables)
    f2 = p2.to_finite(variables)
    return f1.invariants(variables) == f2.invariants(variables)


def poly_vector(polys) -> dict:
    out = {}
    for c, p in enumerate(polys):
        if isinstance(p, Poly):
            for e, a in p.terms.items():
                out[(c, e)] = a
    return out
