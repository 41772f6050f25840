"""Buchberger's algorithm for ideals and for submodules of free modules.

Vectors in P^r are dicts ``{(component, exponents): coefficient}``; an ideal
is the rank-1 case.  Module orders are ``"top"`` (term over position) and
``"pot"`` (position over term, component 0 largest).  POT on an extended
module ``P^r (+) P^m`` eliminates the first ``r`` components, which is how
kernels and lifts are computed.
"""
from __future__ import annotations

from .poly import Poly, PolyRing


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vector_key(ring: PolyRing, order: str):
    mk = ring.key
    if order == "pot":
        return lambda t: (-t[0], mk(t[1]))
    if order == "top":
        return lambda t: (mk(t[1]), -t[0])
    raise ValueError(f"unknown module order {order!r}")


def _axpy(v: dict, q, shift, w: dict):
    """v -= q * x^shift * w, in place."""
    for (c, e), a in w.items():
        t = (c, tuple(x + s for x, s in zip(e, shift)))
        s = v.get(t)
        s = -q * a if s is None else s - q * a
        if s == 0:
            v.pop(t, None)
        else:
            v[t] = s


class _Reducer:
    def __init__(self, key):
        self.key = key
        self.by_comp: dict[int, list] = {}

    def add(self, vec):
        lt = max(vec, key=self.key)
        entry = (lt[1], vec[lt], vec)
        self.by_comp.setdefault(lt[0], []).append(entry)
        return lt

    def find(self, t):
        for e, lc, vec in self.by_comp.get(t[0], ()):
            if _divides(e, t[1]):
                return e, lc, vec
        return None

    def reduce(self, v: dict, full: bool = True) -> dict:
        v = dict(v)
        rem = {}
        key = self.key
        while v:
            t = max(v, key=key)
            c = v[t]
            hit = self.find(t)
            if hit is None:
                if not full:
                    rem.update(v)
                    return rem
                rem[t] = c
                del v[t]
                continue
            e, lc, vec = hit
            _axpy(v, c / lc, _sub(t[1], e), vec)
        return rem


def _monic(v: dict, key):
    lt = max(v, key=key)
    inv = 1 / v[lt]
    return {t: c * inv for t, c in v.items()}


def module_groebner(gens, ring: PolyRing, order: str = "top"):
    """Reduced Groebner basis (list of monic vectors) of the submodule spanned by ``gens``."""
    key = vector_key(ring, order)
    rank1 = all(t[0] == 0 for g in gens for t in g)
    red = _Reducer(key)
    basis: list[dict] = []
    lts: list = []
    pairs: set = set()

    def add(vec):
        vec = _monic(vec, key)
        n = len(basis)
        lt = red.add(vec)
        basis.append(vec)
        lts.append(lt)
        for i in range(n):
            if lts[i][0] == lt[0]:
                pairs.add((i, n))

    for g in gens:
        if g:
            r = red.reduce(g)
            if r:
                add(r)

    while pairs:
        i, j = min(pairs, key=lambda p: (key((lts[p[0]][0], _lcm(lts[p[0]][1], lts[p[1]][1]))), p))
        pairs.discard((i, j))
        ci, ei = lts[i]
        cj, ej = lts[j]
        lcm = _lcm(ei, ej)
        if rank1 and all(min(a, b) == 0 for a, b in zip(ei, ej)):
            continue
        skip = False
        for k in range(len(basis)):
            if k in (i, j) or lts[k][0] != ci:
                continue
            if _divides(lts[k][1], lcm):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik not in pairs and pjk not in pairs:
                    skip = True
                    break
        if skip:
            continue
        s: dict = {}
        _axpy(s, -1, _sub(lcm, ei), basis[i])
        _axpy(s, 1, _sub(lcm, ej), basis[j])
        r = red.reduce(s)
        if r:
            add(r)

    # minimalize and inter-reduce
    keep = []
    for i, (c, e) in enumerate(lts):
        dominated = False
        for j, (c2, e2) in enumerate(lts):
            if j != i and c2 == c and _divides(e2, e) and (e2 != e or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(basis[i])
    final = []
    for i, v in enumerate(keep):
        others = _Reducer(key)
        for j, w in enumerate(keep):
            if j != i:
                others.add(w)
        lt = max(v, key=key)
        tail = {t: c for t, c in v.items() if t != lt}
        tail = others.reduce(tail)
        tail[lt] = v[lt]
        final.append(_monic(tail, key))
    final.sort(key=lambda v: key(max(v, key=key)))
    return final


class SubmoduleBasis:
    """A reduced Groebner basis of a submodule of P^rank."""

    def __init__(self, ring: PolyRing, rank: int, gens, order: str = "top"):
        self.ring = ring
        self.rank = rank
        self.order = order
        self.key = vector_key(ring, order)
        self.basis = module_groebner(list(gens), ring, order)
        self._red = _Reducer(self.key)
        for b in self.basis:
            self._red.add(b)

    def reduce(self, v: dict) -> dict:
        return self._red.reduce(v)

    def contains(self, v: dict) -> bool:
        return not self._red.reduce(v, full=False)

    def leading_terms(self):
        return [max(b, key=self.key) for b in self.basis]

    def is_whole(self) -> bool:
        lts = self.leading_terms()
        zero = self.ring.zero_exp
        return all((c, zero) in lts for c in range(self.rank))

    def standard_monomials(self, limit: int = 100000):
        """Basis of P^rank / submodule over K, or ``None`` if infinite-dimensional."""
        lts = self.leading_terms()
        n = self.ring.nvars
        out = []
        for comp in range(self.rank):
            mine = [e for c, e in lts if c == comp]
            for i in range(n):
                if not any(e[i] > 0 and sum(e) == e[i] for e in mine):
                    if not any(not any(e) for e in mine):
                        return None
            if any(not any(e) for e in mine):
                continue
            seen = set()
            stack = [self.ring.zero_exp]
            while stack:
                e = stack.pop()
                if e in seen:
                    continue
                if any(_divides(m, e) for m in mine):
                    continue
                seen.add(e)
                if len(seen) > limit:
                    raise RuntimeError("standard monomial enumeration exceeded limit")
                for i in range(n):
                    f = list(e)
                    f[i] += 1
                    stack.append(tuple(f))
            out.extend((comp, e) for e in sorted(seen, key=self.ring.key))
        return out

    def quotient_dimension(self):
        sm = self.standard_monomials()
        return None if sm is None else len(sm)


# ---------------------------------------------------------------- conversions

def vec_from_polys(polys) -> dict:
    out = {}
    for c, p in enumerate(polys):
        for e, a in p.terms.items():
            out[(c, e)] = a
    return out


def vec_to_polys(vec: dict, ring: PolyRing, rank: int) -> list[Poly]:
    comps = [dict() for _ in range(rank)]
    for (c, e), a in vec.items():
        comps[c][e] = a
    return [Poly(ring, t) for t in comps]


def shift_vec(vec: dict, offset: int) -> dict:
    return {(c + offset, e): a for (c, e), a in vec.items()}


def scale_vec(vec: dict, p: Poly) -> dict:
    out: dict = {}
    for (c, e), a in vec.items():
        for e2, b in p.terms.items():
            t = (c, tuple(x + y for x, y in zip(e, e2)))
            s = out.get(t)
            s = a * b if s is None else s + a * b
            if s == 0:
                del out[t]
            else:
                out[t] = s
    return out


def add_vec(*vecs) -> dict:
    out: dict = {}
    for v in vecs:
        for t, a in v.items():
            s = out.get(t)
            s = a if s is None else s + a
            if s == 0:
                out.pop(t, None)
            else:
                out[t] = s
    return out


def neg_vec(v: dict) -> dict:
    return {t: -a for t, a in v.items()}


def unit_vec(ring: PolyRing, comp: int) -> dict:
    return {(comp, ring.zero_exp): ring.field.one}


def ideal_relations(ring: PolyRing, ideal, rank: int) -> list[dict]:
    """Generators of ideal * P^rank."""
    out = []
    for g in ideal:
        for c in range(rank):
            out.append({(c, e): a for e, a in g.terms.items()})
    return out


# ------------------------------------------------------------ kernels & lifts

def kernel(columns, ring: PolyRing, rank: int, relations=()) -> list[dict]:
    """Generators of {a in P^m : sum a_j columns_j lies in span(relations)}."""
    m = len(columns)
    if m == 0:
        return []
    gens = []
    for j, col in enumerate(columns):
        v = dict(col)
        v[(rank + j, ring.zero_exp)] = ring.field.one
        gens.append(v)
    gens.extend(dict(r) for r in relations if r)
    sb = SubmoduleBasis(ring, rank + m, gens, order="pot")
    out = []
    for b in sb.basis:
        if all(c >= rank for c, _ in b):
            out.append(shift_vec(b, -rank))
    return out


class Lifter:
    """Express vectors as P-combinations of ``columns`` modulo ``relations``."""

    def __init__(self, columns, ring: PolyRing, rank: int, relations=()):
        self.ring = ring
        self.rank = rank
        self.m = len(columns)
        gens = []
        for j, col in enumerate(columns):
            v = dict(col)
            v[(rank + j, ring.zero_exp)] = ring.field.one
            gens.append(v)
        gens.extend(dict(r) for r in relations if r)
        self.sb = SubmoduleBasis(ring, rank + self.m, gens, order="pot")

    def contains(self, v: dict) -> bool:
        if not v:
            return True
        r = self.sb.reduce(v)
        return not any(c < self.rank for c, _ in r)

    def lift(self, v: dict):
        """Coefficients ``a`` with v = sum a_j columns_j + relations, or None."""
        r = self.sb.reduce(v)
        if any(c < self.rank for c, _ in r):
            return None
        return neg_vec(shift_vec(r, -self.rank))


def lift(v, columns, ring, rank, relations=()):
    return Lifter(columns, ring, rank, relations).lift(v)


# --------------------------------------------------------- polynomial facade

class GroebnerBasis:
    """Reduced Groebner basis of an ideal of a ``PolyRing``."""

    def __init__(self, ring: PolyRing, generators: list[Poly]):
        self.ring = ring
        self.order = ring.order
        self.generators = generators
        self._sb = None

    @classmethod
    def _from_vectors(cls, ring, vecs):
        gb = cls(ring, [Poly(ring, {e: a for (_, e), a in v.items()}) for v in vecs])
        return gb

    def _submodule(self):
        if self._sb is None:
            self._sb = SubmoduleBasis(self.ring, 1, [vec_from_polys([g]) for g in self.generators])
        return self._sb

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self)

    def contains(self, f: Poly) -> bool:
        return normal_form(f, self).is_zero()

    def is_unit_ideal(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.generators)

    def __eq__(self, other):
        return isinstance(other, GroebnerBasis) and self.ring == other.ring and set(self.generators) == set(other.generators)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return "GroebnerBasis{" + ", ".join(str(g) for g in self.generators) + "}"


def buchberger(gens, order=None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = list(gens)
    if not gens:
        raise ValueError("buchberger needs at least one generator")
    ring = gens[0].ring
    for g in gens:
        if g.ring.variables != ring.variables or g.ring.field != ring.field:
            raise ValueError("generators must share a variable list")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        gens = [g.change_ring(ring) for g in gens]
    vecs = module_groebner([vec_from_polys([g]) for g in gens if g], ring, "top")
    gb = GroebnerBasis._from_vectors(ring, vecs)
    return gb


def normal_form(f: Poly, G: GroebnerBasis) -> Poly:
    """Remainder of ``f`` under multivariate division by the reduced basis ``G``."""
    if f.ring.variables != G.ring.variables or f.ring.field != G.ring.field:
        raise ValueError("variable-list mismatch between polynomial and basis")
    if f.ring.order != G.ring.order:
        f = f.change_ring(G.ring)
    if f.is_zero() or not G.generators:
        return f
    r = G._submodule().reduce(vec_from_polys([f]))
    return Poly(G.ring, {e: a for (_, e), a in r.items()})


def syzygy_kernel(M, G: GroebnerBasis | None = None, ring: PolyRing | None = None) -> list[list[Poly]]:
    """Generators of the kernel of the matrix ``M`` (rows of Polys) over P/(G).

    Returns column vectors as lists of Polys.  A zero kernel gives ``[]``.
    """
    rows = [list(r) for r in M]
    if not rows:
        raise ValueError("empty matrix")
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("dimension mismatch: ragged matrix")
    if ring is None:
        ring = G.ring if G is not None else rows[0][0].ring
    r = len(rows)
    columns = [vec_from_polys([ring(rows[i][j]) for i in range(r)]) for j in range(ncols)]
    rels = ideal_relations(ring, G.generators, r) if G is not None else []
    ker = kernel(columns, ring, r, rels)
    # drop generators that are zero modulo G
    out = []
    quot = SubmoduleBasis(ring, ncols, ideal_relations(ring, G.generators, ncols)) if G is not None and G.generators else None
    for k in ker:
        if quot is not None:
            k = quot.reduce(k)
        if k:
            out.append(vec_to_polys(k, ring, ncols))
    return out
