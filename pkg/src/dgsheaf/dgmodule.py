"""Pseudo-free DG modules over DG ring sheaves.

A module is free over the ring on basis elements e_k, each with an open
support and a degree, with D(e_k) = sum_j r_kj e_j.  The stalk at x is a
complex of P-modules with basis {m * e_k} where m runs over negative
monomials of the ring stalk, exactly as for the ring itself.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dgring import DGRingSheaf
from .gcalg import GCElement
from .groebner import add_vec, scale_vec
from .pseudofree import Generator
from .space import SpaceError
from .stalk import FreeComplex


class ModuleElement(dict):
    """A formal sum {(monomial, basis id): coefficient} printed as ring element times e."""

    def __init__(self, alg, terms):
        super().__init__(terms)
        self.alg = alg

    def __str__(self):
        if not self:
            return "0"
        groups = {}
        for (mono, e), c in self.items():
            groups.setdefault(e, {})[mono] = c
        parts = []
        for e, terms in groups.items():
            coeff = GCElement(self.alg, terms)
            s = str(coeff)
            parts.append(f"{e}" if s == "1" else f"({s})*{e}")
        return " + ".join(parts)


class DGModuleSheaf:
    def __init__(self, ring: DGRingSheaf, basis, differential=None, name: str | None = None):
        self.ring = ring
        self.space = ring.space
        self.field = ring.field
        self.name = name
        self.basis = [b if isinstance(b, Generator) else Generator(*b) for b in basis]
        ids = [b.id for b in self.basis]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate basis ids")
        self._by_id = {b.id: b for b in self.basis}
        self.differential = {}
        for eid, row in (differential or {}).items():
            if eid not in self._by_id:
                raise ValueError(f"differential for unknown basis element {eid!r}")
            e = self._by_id[eid]
            clean = {}
            for fid, val in row.items():
                f = self._by_id[fid]
                if not e.support.members <= f.support.members:
                    raise SpaceError(f"D({eid}) uses {fid}, which is not defined on the support of {eid}")
                if isinstance(val, dict):
                    vals = {p: ring.algebra(val.get(p, 0)) for p in e.support}
                else:
                    v = ring.algebra(val)
                    vals = {p: v for p in e.support}
                for p, v in vals.items():
                    ring.check_local(v, p, f"D({eid})")
                    if v and v.degree() != e.degree + 1 - f.degree:
                        raise ValueError(f"coefficient of {fid} in D({eid}) has the wrong degree")
                clean[fid] = vals
            self.differential[eid] = clean
        self._stalks = {}

    def basis_at(self, x):
        return [b for b in self.basis if x in b.support]

    def stalk(self, x) -> "StalkModule":
        if x not in self._stalks:
            self._stalks[x] = StalkModule(self, x)
        return self._stalks[x]

    def check_d_squared(self):
        """D(D(e)) = 0 for every basis element at every point; returns offending (id, point) pairs."""
        bad = []
        for x in self.space:
            st = self.stalk(x)
            for n in sorted({b.degree for b in self.basis_at(x)}):
                for j in range(st.rank(n)):
                    col = st.d_columns(n)[j]
                    dd = st.apply_d(col, n + 1)
                    if st.relation_basis(n + 2).reduce(dd):
                        bad.append((st.labels(n)[j], x))
        return bad

    def __repr__(self):
        return f"DGModuleSheaf({self.name or ''}: {[b.id for b in self.basis]})"


def base_change(M: DGModuleSheaf, B: DGRingSheaf, name=None) -> DGModuleSheaf:
    """B (x)_A M for a DG A-ring B (A = the ring of M, in the base chain of B)."""
    if M.ring not in B.chain():
        raise ValueError("the module's ring is not a base of B")
    diff = {eid: {fid: {p: B.algebra(v) for p, v in vals.items()} for fid, vals in row.items()}
            for eid, row in M.differential.items()}
    return DGModuleSheaf(B, M.basis, diff, name=name or f"{B.name or 'B'} (x) {M.name or 'M'}")


class StalkModule(FreeComplex):
    def __init__(self, M: DGModuleSheaf, x):
        self.module = M
        self.point = x
        self.ring = M.ring.stalk(x)
        self.alg = M.ring.algebra
        self.P = self.ring.P
        self.field = M.field
        self.basis_elems = M.basis_at(x)
        self._labels = {}
        self._index = {}
        self._dcols = {}
        self._rels = {}

    def labels_raw(self, n):
        if n not in self._labels:
            out = []
            for e in self.basis_elems:
                if e.degree >= n:
                    for m in self.ring.monomials(n - e.degree):
                        out.append((m, e.id))
            self._labels[n] = out
            self._index[n] = {t: i for i, t in enumerate(out)}
        return self._labels[n]

    def rank(self, n):
        return len(self.labels_raw(n))

    def labels(self, n):
        return [f"{self.alg.format_mono(m) or '1'}*{e}" for m, e in self.labels_raw(n)]

    def _vec_of(self, elem: GCElement, eid, n) -> dict:
        """elem * e_eid as a vector in degree n."""
        self.labels_raw(n)
        index = self._index[n]
        out = {}
        zpos = {v: i for i, v in enumerate(self.ring.zero_vars)}
        for mono, c in elem.terms.items():
            exps = [0] * len(zpos)
            neg = []
            for v, k in mono:
                if v in zpos:
                    exps[zpos[v]] = k
                else:
                    neg.append((v, k))
            key = (j := index.get((tuple(neg), eid)), tuple(exps))
            if j is None:
                raise ValueError("term outside the module component")
            out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v != 0}

    def to_vector(self, elem: ModuleElement, n) -> dict:
        parts = []
        for (mono, eid), c in elem.items():
            parts.append(self._vec_of(self.alg.monomial(mono, c), eid, n))
        return add_vec(*parts) if parts else {}

    def from_vector(self, vec: dict, n) -> ModuleElement:
        labs = self.labels_raw(n)
        pos = self.alg.position
        out = {}
        for (j, exps), c in vec.items():
            m, eid = labs[j]
            zero = tuple((v, k) for v, k in zip(self.ring.zero_vars, exps) if k)
            mono = tuple(sorted(zero + m, key=lambda t: pos[t[0]]))
            out[(mono, eid)] = out.get((mono, eid), 0) + c
        return ModuleElement(self.alg, {k: v for k, v in out.items() if v != 0})

    def d_columns(self, n):
        if n not in self._dcols:
            cols = []
            x = self.point
            diff = self.module.differential
            for m, eid in self.labels_raw(n):
                mono = self.alg.monomial(m)
                parts = []
                dm = self.ring.d_element(mono)
                if dm:
                    parts.append(self._vec_of(dm, eid, n + 1))
                sign = -1 if self.alg.mono_degree(m) % 2 else 1
                for fid, vals in diff.get(eid, {}).items():
                    r = vals[x]
                    if r:
                        parts.append(self._vec_of(mono * r * sign, fid, n + 1))
                cols.append(add_vec(*parts) if parts else {})
            self._dcols[n] = cols
        return self._dcols[n]

    def apply_d(self, vec, n):
        cols = self.d_columns(n)
        parts = [scale_vec(cols[j], self.P.monomial(e, c)) for (j, e), c in vec.items()]
        return add_vec(*parts) if parts else {}

    def relations(self, n):
        if n not in self._rels:
            out = []
            for e in self.basis_elems:
                if e.degree < n:
                    continue
                for r in self.ring.rels:
                    dr = r.degree()
                    if dr < n - e.degree:
                        continue
                    for m in self.ring.monomials(n - e.degree - dr):
                        v = self._vec_of(self.alg.monomial(m) * r, e.id, n)
                        if v:
                            out.append(v)
            self._rels[n] = out
        return self._rels[n]


@dataclass
class AcyclicityReport:
    ok: bool
    failures: list


def window_acyclic(M, window) -> AcyclicityReport:
    from .homology import cohomology_module, parse_window
    lo, hi = parse_window(window)
    bad = []
    for x in M.space:
        st = M.stalk(x)
        for n in range(lo, hi + 1):
            if not cohomology_module(st, n).is_zero():
                bad.append((x, n))
    return AcyclicityReport(not bad, bad)
