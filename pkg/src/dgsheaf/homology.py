"""Window-relative cohomology of DG ring sheaves and quasi-isomorphism tests."""
from __future__ import annotations

from dataclasses import dataclass, field

from .groebner import (GroebnerBasis, Lifter, SubmoduleBasis, add_vec, buchberger, kernel,
                       scale_vec, unit_vec)
from .modules import ModulePresentation
from .poly import Poly, PolyRing


class WindowError(ValueError):
    """A degree window is malformed or outside the certified range."""


def parse_window(window) -> tuple[int, int]:
    if isinstance(window, str):
        try:
            lo, hi = (int(s) for s in window.split(":"))
        except ValueError as exc:
            raise WindowError(f"bad window {window!r}; expected MIN:MAX") from exc
    else:
        lo, hi = window
    if lo > hi:
        raise WindowError(f"empty window [{lo}, {hi}]")
    return lo, hi


# ---------------------------------------------------------------- single complexes

def _cache(C, name):
    return C.__dict__.setdefault(name, {})


def cycles(C, n: int) -> list:
    """Generators of Z^n as vectors in P^{rank n} (the full preimage of the relations)."""
    cache = _cache(C, "_cycles")
    if n not in cache:
        if C.rank(n) == 0:
            cache[n] = []
        else:
            cache[n] = kernel(C.d_columns(n), C.P, C.rank(n + 1), C.relations(n + 1))
    return cache[n]


def boundary_gens(C, n: int) -> list:
    """Generators of B^n = d(C^{n-1}) + relations."""
    return [c for c in C.d_columns(n - 1) if c] + list(C.relations(n))


def boundary_basis(C, n: int) -> SubmoduleBasis:
    cache = _cache(C, "_bdbasis")
    if n not in cache:
        cache[n] = SubmoduleBasis(C.P, C.rank(n), boundary_gens(C, n))
    return cache[n]


@dataclass
class HModule:
    """H^n of one stalk: generators (cycle vectors) and a presentation over P."""

    degree: int
    generators: list
    presentation: ModulePresentation

    @property
    def dimension(self):
        return self.presentation.dimension()

    def is_zero(self) -> bool:
        return self.presentation.is_zero()


def cohomology_module(C, n: int) -> HModule:
    cache = _cache(C, "_hmods")
    if n in cache:
        return cache[n]
    if n > 0 or C.rank(n) == 0:
        res = HModule(n, [], ModulePresentation(C.P, 0, []))
        cache[n] = res
        return res
    bd = boundary_gens(C, n)
    bbasis = boundary_basis(C, n)
    kept = []
    for z in cycles(C, n):
        z = bbasis.reduce(z)
        if not z:
            continue
        if kept and SubmoduleBasis(C.P, C.rank(n), bd + kept).contains(z):
            continue
        kept.append(z)
    rels = kernel(kept, C.P, C.rank(n), bd) if kept else []
    res = HModule(n, kept, ModulePresentation(C.P, len(kept), rels))
    cache[n] = res
    return res


def is_cycle(C, vec: dict, n: int) -> bool:
    return not C.relation_basis(n + 1).reduce(C.apply_d(vec, n))


def is_boundary(C, vec: dict, n: int) -> bool:
    return not boundary_basis(C, n).reduce(vec)


# ---------------------------------------------------------------- reports

@dataclass
class HEntry:
    dimension: int | None     # K-dimension, None when infinite
    module: HModule
    representatives: list     # stalk elements (strings)

    @property
    def rank(self) -> int:
        """The K-dimension when finite, else the number of (pruned) generators."""
        return len(self.representatives) if self.dimension is None else self.dimension

    def to_json(self):
        pres = self.module.presentation
        ring = pres.ring
        rels = []
        for r in pres.reduced_relations() if pres.ngens else []:
            rels.append([_fmt_poly(ring, r, c) for c in range(pres.ngens)])
        return {
            "rank": self.rank,
            "dimension": "inf" if self.dimension is None else self.dimension,
            "presentation": {
                "ring": list(ring.variables),
                "generators": self.representatives,
                "relations": rels,
            },
        }


def _fmt_poly(ring: PolyRing, vec: dict, comp: int) -> str:
    return str(Poly(ring, {e: a for (c, e), a in vec.items() if c == comp}))


@dataclass
class CohomologyReport:
    window: tuple
    entries: dict                          # point -> degree -> HEntry
    restrictions: dict = field(default_factory=dict)   # (y, x) -> degree -> matrix of strings
    sheaf_name: str = ""

    def rank(self, x, n):
        return self.entries[x][n].rank

    def ranks(self, x) -> dict:
        return {n: e.rank for n, e in self.entries[x].items()}

    def module(self, x, n) -> ModulePresentation:
        return self.entries[x][n].module.presentation

    def to_json(self):
        per_point = {}
        for x, row in self.entries.items():
            per_point[str(x)] = {str(n): e.to_json() for n, e in sorted(row.items())}
        res = {}
        for (y, x), row in self.restrictions.items():
            res[f"{y}->{x}"] = {str(n): m for n, m in sorted(row.items())}
        return {"window": list(self.window), "per_point": per_point, "restrictions": res}

    def summary_lines(self):
        lines = []
        for x, row in self.entries.items():
            parts = []
            for n in sorted(row, reverse=True):
                e = row[n]
                parts.append(f"H^{n}={e.rank}" + ("" if e.dimension is not None else " (inf-dim)"))
            lines.append(f"  {x}: " + ", ".join(parts))
        return lines


def cohomology(B, window, restrictions: bool = True) -> CohomologyReport:
    """Stalkwise H^n(B) for n in the window, with restriction maps along <=."""
    lo, hi = parse_window(window)
    entries = {}
    for x in B.space:
        st = B.stalk(x)
        row = {}
        for n in range(lo, hi + 1):
            hm = cohomology_module(st, n)
            reps = [str(st.from_vector(z, n)) for z in hm.generators]
            row[n] = HEntry(hm.dimension, hm, reps)
        entries[x] = row
    report = CohomologyReport((lo, hi), entries, sheaf_name=getattr(B, "name", "") or "")
    if restrictions:
        for y in B.space:
            for x in B.space:
                if x != y and B.space.leq(x, y):
                    report.restrictions[(y, x)] = {n: restriction_matrix(B, y, x, n) for n in range(lo, hi + 1)}
    return report


def restriction_matrix(B, y, x, n):
    """Images of the H^n generators at y in terms of the H^n generators at x."""
    sy, sx = B.stalk(y), B.stalk(x)
    hy, hx = cohomology_module(sy, n), cohomology_module(sx, n)
    if not hy.generators:
        return []
    lifter = Lifter(hx.generators, sx.P, sx.rank(n), boundary_gens(sx, n))
    out = []
    for z in hy.generators:
        v = sx.to_vector(sy.from_vector(z, n), n)
        coeffs = lifter.lift(v)
        if coeffs is None:
            raise ArithmeticError(f"restriction of a cycle from {y} to {x} is not a cycle")
        out.append([_fmt_poly(sx.P, coeffs, c) for c in range(len(hx.generators))])
    return out


# ---------------------------------------------------------------- maps of stalks

class StalkMap:
    """A DG morphism at one point, with the target rewritten as a module over P_F.

    When phi^0 : P_F -> B^0 is surjective, B^0 = P_F / ker, and every target
    component becomes a finitely presented P_F-module, so all conditions on
    phi are submodule questions over the single ring P_F.
    """

    def __init__(self, phi, x, extra_zero_relations=()):
        self.phi = phi
        self.point = x
        self.F = phi.source.stalk(x)
        self.B = phi.target.stalk(x)
        self.images = phi.images_at(x)
        F, B = self.F, self.B
        field_ = F.field
        self.P = F.P
        bnames = [f"{v}@B" for v in B.zero_vars]
        fnames = [f"{u}@F" for u in F.zero_vars]
        self.Q = PolyRing(field_, bnames + fnames, order=("block", len(bnames)))
        Q = self.Q
        to_q = {v: Q.var(f"{v}@B") for v in B.zero_vars}
        gens = [p.substitute(to_q, Q) for p in B.degree_zero_relations]
        gens += [p.substitute(to_q, Q) for p in extra_zero_relations]
        for u in F.zero_vars:
            img = B.element_to_poly(self.images[u]).substitute(to_q, Q)
            gens.append(Q.var(f"{u}@F") - img)
        gens = [g for g in gens if g]
        self.G = buchberger(gens) if gens else GroebnerBasis(Q, [])
        back = {f"{u}@F": self.P.var(u) for u in F.zero_vars}
        self.rewrite = {}
        self.surjective0 = True
        self.missing0 = []
        for v in B.zero_vars:
            nf = self.G.normal_form(Q.var(f"{v}@B"))
            if any(Q.variables[i].endswith("@B") for i in _vars_used(nf)):
                self.surjective0 = False
                self.missing0.append(v)
            else:
                self.rewrite[v] = nf.substitute(back, self.P) if nf else self.P.zero()
        self.kernel0 = []
        for g in self.G:
            if not any(Q.variables[i].endswith("@B") for i in _vars_used(g)):
                self.kernel0.append(g.substitute(back, self.P))
        self._mono_cache = {}
        self._cache = {}

    # ------------------------------------------------------------ rewriting

    def _rewrite_monomial(self, exps):
        r = self._mono_cache.get(exps)
        if r is None:
            r = self.P.one()
            for v, k in zip(self.B.zero_vars, exps):
                if k:
                    r = r * self.rewrite[v] ** k
            self._mono_cache[exps] = r
        return r

    def b_vec(self, vec: dict) -> dict:
        """A vector over P_B rewritten over P_F."""
        if not self.surjective0:
            raise ValueError("phi^0 is not surjective; no P_F-module structure on the target")
        parts = {}
        for (j, e), c in vec.items():
            p = self._rewrite_monomial(e)
            for fe, a in p.terms.items():
                key = (j, fe)
                s = parts.get(key, 0) + a * c
                if s == 0:
                    parts.pop(key, None)
                else:
                    parts[key] = s
        return parts

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def b_rank(self, n):
        return self.B.rank(n)

    def b_relations(self, n) -> list:
        def build():
            out = [self.b_vec(r) for r in self.B.relations(n)]
            for k in self.kernel0:
                for j in range(self.B.rank(n)):
                    out.append({(j, e): a for e, a in k.terms.items()})
            return [v for v in out if v]
        return self._memo(("rels", n), build)

    def b_dcols(self, n) -> list:
        return self._memo(("dcols", n), lambda: [self.b_vec(c) for c in self.B.d_columns(n)])

    def b_boundaries(self, n) -> list:
        return [c for c in self.b_dcols(n - 1) if c] + self.b_relations(n)

    def b_cycles(self, n) -> list:
        def build():
            if self.B.rank(n) == 0:
                return []
            return kernel(self.b_dcols(n), self.P, self.B.rank(n + 1), self.b_relations(n + 1))
        return self._memo(("cycles", n), build)

    def phi_cols(self, n) -> list:
        def build():
            out = []
            for m in self.F.monomials(n):
                img = self.F.alg.monomial(m).substitute(self.images, self.B.alg)
                out.append(self.b_vec(self.B.to_vector(img, n)))
            return out
        return self._memo(("phi", n), build)

    def phi_apply(self, vec: dict, n) -> dict:
        cols = self.phi_cols(n)
        parts = [scale_vec(cols[j], self.P.monomial(e, c)) for (j, e), c in vec.items()]
        return add_vec(*parts) if parts else {}

    def to_target_element(self, vec: dict, n):
        """The target element sum p_j(phi(u)) * m_j for a vector over P_F in the target basis."""
        out = self.B.alg.zero()
        by_comp = {}
        for (j, e), c in vec.items():
            by_comp.setdefault(j, {})[e] = c
        for j, terms in by_comp.items():
            coeff = self.F.poly_to_element(Poly(self.P, terms)).substitute(self.images, self.B.alg)
            out = out + coeff * self.B.monomial_element(n, j)
        return out

    # ------------------------------------------------------------ conditions

    def surjective(self, n) -> bool:
        if n > 0:
            return True
        if n == 0:
            return self.surjective0
        lifter = Lifter(self.phi_cols(n), self.P, self.B.rank(n), self.b_relations(n))
        return all(lifter.contains(unit_vec(self.P, j)) for j in range(self.B.rank(n)))

    def missing_surjective(self, n) -> list:
        """Target basis indices j with m_j outside the image (degree n < 0)."""
        lifter = Lifter(self.phi_cols(n), self.P, self.B.rank(n), self.b_relations(n))
        return [j for j in range(self.B.rank(n)) if not lifter.contains(unit_vec(self.P, j))]

    def boundary_image_lifter(self, n) -> Lifter:
        cols = [self.phi_apply(c, n) for c in self.F.d_columns(n - 1)]
        return Lifter(cols, self.P, self.B.rank(n), self.b_relations(n))

    def missing_boundaries(self, n) -> list:
        """Indices j of target monomials m_j in degree n-1 with d(m_j) not in phi(B(F)) + relations."""
        if n > 0 or self.B.rank(n) == 0:
            return []
        lifter = self.boundary_image_lifter(n)
        return [j for j, c in enumerate(self.b_dcols(n - 1)) if c and not lifter.contains(c)]

    def boundaries_surjective(self, n) -> bool:
        return not self.missing_boundaries(n)

    def missing_cohomology(self, n) -> list:
        """Target cycles not in phi(Z(F)) + B(target)."""
        if n > 0 or self.B.rank(n) == 0:
            return []
        cols = [self.phi_apply(z, n) for z in cycles(self.F, n)] + self.b_boundaries(n)
        lifter = Lifter(cols, self.P, self.B.rank(n), self.b_relations(n))
        return [z for z in self.b_cycles(n) if not lifter.contains(z)]

    def cohomology_surjective(self, n) -> bool:
        return not self.missing_cohomology(n)

    def injectivity_failures(self, n) -> list:
        """Source cycles z with phi(z) a boundary but z not a boundary (as F-vectors)."""
        if n > 0 or self.F.rank(n) == 0:
            return []
        zs = cycles(self.F, n)
        if not zs:
            return []
        imgs = [self.phi_apply(z, n) for z in zs]
        coeffs = kernel(imgs, self.P, self.B.rank(n), self.b_boundaries(n))
        bb = boundary_basis(self.F, n)
        out = []
        for c in coeffs:
            parts = []
            for (i, e), a in c.items():
                parts.append(scale_vec(zs[i], self.P.monomial(e, a)))
            v = bb.reduce(add_vec(*parts)) if parts else {}
            if v:
                out.append(v)
        return out

    def cohomology_injective(self, n) -> bool:
        return not self.injectivity_failures(n)

    def lift_boundary(self, target_vec: dict, n):
        """Some b (vector over P_F, target degree n-1) with d(b) = target_vec, or None."""
        lifter = Lifter(self.b_dcols(n - 1), self.P, self.B.rank(n), self.b_relations(n))
        c = lifter.lift(target_vec)
        if c is None:
            return None
        return c

    def lift_image(self, target_vec: dict, n):
        """Some source vector v with phi(v) = target_vec modulo relations, or None."""
        lifter = Lifter(self.phi_cols(n), self.P, self.B.rank(n), self.b_relations(n))
        return lifter.lift(target_vec)


def _vars_used(p: Poly):
    used = set()
    for e in p.terms:
        for i, k in enumerate(e):
            if k:
                used.add(i)
    return used


# ---------------------------------------------------------------- quasi-isomorphisms

@dataclass
class QuasiIsoResult:
    ok: bool
    witness: tuple | None = None      # (point, degree, reason) of the first failure
    checked: list = field(default_factory=list)
    method: str = "direct"

    def __bool__(self):
        return self.ok


def is_quasi_iso(phi, window) -> QuasiIsoResult:
    """H(phi) bijective at every point and degree of the window.

    Uses the target-as-P_F-module rewriting when phi^0 is surjective at every
    point; otherwise factors phi through a surjective quasi-isomorphism and
    tests that instead.
    """
    lo, hi = parse_window(window)
    maps = {}
    for x in phi.source.space:
        m = StalkMap(phi, x)
        if not m.surjective0:
            from .resolution import factorize, FactorizationError
            try:
                fac = factorize(phi, (lo, hi), check_qiso=False)
            except FactorizationError as exc:
                return QuasiIsoResult(False, exc.witness or (x, 0, str(exc)), method="factorized")
            res = is_quasi_iso(fac.phi_plus, (lo, hi))
            res.method = "factorized"
            return res
        maps[x] = m
    checked = []
    for x, m in maps.items():
        for n in range(hi, lo - 1, -1):
            if not m.cohomology_surjective(n):
                return QuasiIsoResult(False, (x, n, "H not surjective"), checked)
            if not m.cohomology_injective(n):
                return QuasiIsoResult(False, (x, n, "H not injective"), checked)
            checked.append((x, n))
    return QuasiIsoResult(True, None, checked)


def linear_cohomology_dimension(C, n: int):
    """dim_K H^n by K-linear algebra on standard monomials, or None if a component is infinite.

    Independent of the syzygy computations used by ``cohomology_module``:
    only normal forms and ranks of K-matrices are involved.
    """
    from . import linalg

    def std(k):
        if k > 0 or C.rank(k) == 0:
            return []
        return C.relation_basis(k).standard_monomials()

    def dmatrix(k, src, tgt):
        index = {t: i for i, t in enumerate(tgt)}
        rows = [[C.P.field.zero] * len(src) for _ in tgt]
        for j, (c, e) in enumerate(src):
            img = C.relation_basis(k + 1).reduce(C.apply_d({(c, e): C.P.field.one}, k))
            for t, a in img.items():
                rows[index[t]][j] = a
        return rows

    here, below, above = std(n), std(n - 1), std(n + 1)
    if here is None or below is None or above is None:
        return None
    r_out = linalg.rank(dmatrix(n, here, above), C.P.field) if here and above else 0
    r_in = linalg.rank(dmatrix(n - 1, below, here), C.P.field) if here and below else 0
    return len(here) - r_out - r_in
