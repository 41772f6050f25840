"""Sheaves of commutative DG rings, their morphisms and basic constructions.

A DGRingSheaf is a pseudo-free graded ring over its base, a differential on
its own generators, and a finite list of homogeneous relations.  Everything
is flattened along the base chain when a stalk is formed, so a stalk is a
finitely presented DG algebra (see ``stalk``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .gcalg import GCElement
from .pseudofree import Generator, GeneratorSpec, PsfRing, Section
from .space import FiniteSpace, OpenSet, SpaceError


class StructureError(ValueError):
    """A DG ring or morphism fails its structural invariants."""


@dataclass
class CheckResult:
    ok: bool
    offending: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


class DGRingSheaf(PsfRing):
    """A commutative DG ring over ``base`` (``None`` means the constant sheaf).

    ``differential`` maps own generator ids to sections (or expressions) of
    degree n_i + 1 over U_i; missing ids have zero differential.
    ``relations`` is a list of sections, or (expression, open set) pairs, or
    bare expressions meaning "over the whole space".
    """

    def __init__(self, space: FiniteSpace, spec: GeneratorSpec, differential=None, relations=(),
                 base: "DGRingSheaf | None" = None, field=None, name: str | None = None):
        super().__init__(space, spec, base, field)
        self.name = name
        self._stalks = {}
        self._raw_d = {}
        self.relations = []
        for gid, val in (differential or {}).items():
            if gid not in spec:
                raise StructureError(f"differential given for unknown generator {gid!r}")
            self._raw_d[gid] = self._coerce_section(val, spec[gid].support, check=False)
        for rel in relations:
            if isinstance(rel, Section):
                sec = rel if rel.ring is self else Section(self, rel.open, {p: self.algebra(v) for p, v in rel.values.items()}, check=False)
            elif isinstance(rel, tuple):
                sec = self._coerce_section(rel[0], rel[1], check=False)
            else:
                sec = self._coerce_section(rel, space.whole(), check=False)
            if any(v for v in sec.values.values()):
                self.relations.append(sec)
        self.differential = dict(self._raw_d)
        self._validate_structure()

    def _coerce_section(self, val, U, check=True) -> Section:
        if not isinstance(U, OpenSet):
            U = self.space.open_set(U)
        if isinstance(val, Section):
            vals = {p: self.algebra(val.values[p]) for p in U}
        elif isinstance(val, dict):
            return self.section(U, val) if check else Section(self, U, _fill_values(self, U, val), check=False)
        else:
            v = self.algebra(val)
            vals = {p: v for p in U}
        return Section(self, U, vals, check=check)

    def _validate_structure(self):
        for g in self.spec:
            sec = self.differential.get(g.id)
            if sec is None:
                continue
            if sec.open != g.support:
                raise StructureError(f"d({g.id}) must be defined over the support of {g.id}")
            for p, v in sec.values.items():
                if v and not v.is_homogeneous():
                    raise StructureError(f"d({g.id}) is not homogeneous")
                if v and v.degree() != g.degree + 1:
                    raise StructureError(f"d({g.id}) has degree {v.degree()}, expected {g.degree + 1}")
                self.check_local(v, p, f"d({g.id})")
        for sec in self.relations:
            for p, v in sec.values.items():
                if not v.is_homogeneous():
                    raise StructureError(f"relation {v} is not homogeneous")
                self.check_local(v, p, "relation")
        for sec in list(self.differential.values()) + self.relations:
            sec.validate()

    def __repr__(self):
        label = self.name or "DGRingSheaf"
        gens = ", ".join(f"{g.id}:{g.degree}" for g in self.spec)
        return f"{label}[{gens}; rels={len(self.relations)}]"

    # ------------------------------------------------------------ stalk data

    def d_values_at(self, x) -> dict:
        """{var: d(var)} at ``x`` for every chain variable with nonzero differential there."""
        out = {}
        for r in self.chain():
            for gid, sec in r.differential.items():
                if x in sec.open and sec.values[x]:
                    out[gid] = self.algebra(sec.values[x]) if r is not self else sec.values[x]
        return out

    def relations_at(self, x) -> list:
        out = []
        for r in self.chain():
            for sec in r.relations:
                if x in sec.open:
                    v = sec.values[x]
                    out.append(self.algebra(v) if r is not self else v)
        return out

    def stalk(self, x):
        from .stalk import StalkDGA
        with self._lock:
            st = self._stalks.get(x)
        if st is None:
            st = StalkDGA(self, x)
            with self._lock:
                self._stalks.setdefault(x, st)
                st = self._stalks[x]
        return st

    def d(self, elem, x) -> GCElement:
        return self.algebra(elem).apply_derivation(self.d_values_at(x))

    def d_section(self, s: Section) -> Section:
        return Section(self, s.open, {p: self.d(v, p) for p, v in s.values.items()}, check=False)

    def equal_at(self, a, b, x) -> bool:
        diff = self.algebra(a) - self.algebra(b)
        if diff.is_zero():
            return True
        if not self.relations_at(x):
            return False
        return self.stalk(x).is_zero(diff)

    def own_ids(self):
        return self.spec.ids()


def _fill_values(ring, U, given):
    vals = {p: ring.algebra(v) for p, v in given.items()}
    for p in U:
        if p not in vals:
            ups = [q for q in vals if ring.space.leq(p, q)]
            if not ups:
                raise SpaceError(f"no value given over point {p}")
            vals[p] = vals[ups[0]]
    return {p: vals[p] for p in U}


def constant_sheaf(space: FiniteSpace, field) -> DGRingSheaf:
    """K_X: no generators, no relations."""
    return DGRingSheaf(space, GeneratorSpec(), field=field, name="K_X")


def polynomial_sheaf(space: FiniteSpace, field, variables, name="A") -> DGRingSheaf:
    """K_X[x_1..x_n] with every variable of degree 0 supported everywhere."""
    spec = GeneratorSpec((v, space.whole(), 0) for v in variables)
    return DGRingSheaf(space, spec, field=field, name=name)


def quotient(A: DGRingSheaf, relations, name=None) -> DGRingSheaf:
    """A/(relations) as a DG A-ring with no new generators."""
    return DGRingSheaf(A.space, GeneratorSpec(), relations=relations, base=A, name=name)


# ---------------------------------------------------------------- checks

def check_d_squared(B: DGRingSheaf) -> CheckResult:
    """d(d(t)) = 0 in every stalk for every generator of the chain."""
    bad = []
    for x in B.space:
        dv = B.d_values_at(x)
        for v, val in dv.items():
            dd = val.apply_derivation(dv)
            if dd and not B.equal_at(dd, 0, x):
                bad.append((v, x))
    return CheckResult(not bad, bad)


def check_relations_closed(B: DGRingSheaf) -> CheckResult:
    """d maps every relation into the relation ideal."""
    bad = []
    for x in B.space:
        for r in B.relations_at(x):
            dr = B.d(r, x)
            if dr and not B.equal_at(dr, 0, x):
                bad.append((str(r), x))
    return CheckResult(not bad, bad)


def validate_dg(B: DGRingSheaf) -> CheckResult:
    a = check_d_squared(B)
    b = check_relations_closed(B)
    return CheckResult(a.ok and b.ok, a.offending + b.offending)


def extend_derivation(R: PsfRing, values: dict, relations=()) -> DGRingSheaf:
    """The DG ring whose differential is the unique derivation with d(t_i) = values[i]."""
    return DGRingSheaf(R.space, R.spec, differential=values, relations=relations, base=R.base,
                       field=R.field)


# ---------------------------------------------------------------- morphisms

class SheafHom:
    """A DG ring morphism determined by images of generators.

    Source variables without an explicit image are sent to the variable of
    the same name in the target (the common base).
    """

    def __init__(self, source: DGRingSheaf, target: DGRingSheaf, images: dict | None = None,
                 check: bool = True, name: str | None = None):
        if source.space != target.space:
            raise SpaceError("morphism between sheaves on different spaces")
        self.source = source
        self.target = target
        self.name = name
        self.images = {}
        for gid, val in (images or {}).items():
            g = source.generator(gid)
            if isinstance(val, Section):
                vals = {p: target.algebra(val.values[p]) for p in g.support}
            elif isinstance(val, dict):
                vals = _fill_values(target, g.support, val)
            else:
                v = target.algebra(val)
                vals = {p: v for p in g.support}
            self.images[gid] = Section(target, g.support, vals, check=False)
        for g in source.all_generators():
            if g.id not in self.images and g.id not in target.algebra.degrees:
                raise StructureError(f"no image for generator {g.id!r}")
        self._validate_images()
        if check:
            res = self.check()
            if not res:
                raise StructureError(f"not a DG ring morphism: {res.offending[:3]}")

    def _validate_images(self):
        for gid, sec in self.images.items():
            g = self.source.generator(gid)
            for p, v in sec.values.items():
                if v and v.degree() != g.degree:
                    raise StructureError(f"image of {gid} has degree {v.degree()}, expected {g.degree}")
                self.target.check_local(v, p, f"image of {gid}")
            sec.validate()

    def image_at(self, var, x) -> GCElement:
        sec = self.images.get(var)
        if sec is None:
            return self.target.algebra.var(var)
        return sec.values[x]

    def images_at(self, x) -> dict:
        return {v: self.image_at(v, x) for v in self.source.variables_at(x)}

    def apply(self, elem, x) -> GCElement:
        elem = self.source.algebra(elem)
        return elem.substitute(self.images_at(x), self.target.algebra)

    def apply_section(self, s: Section) -> Section:
        return Section(self.target, s.open, {p: self.apply(v, p) for p, v in s.values.items()}, check=False)

    def check(self) -> CheckResult:
        bad = []
        for x in self.source.space:
            imgs = self.images_at(x)
            dsrc = self.source.d_values_at(x)
            for v in self.source.variables_at(x):
                lhs = self.target.d(imgs[v], x)
                rhs = dsrc[v].substitute(imgs, self.target.algebra) if v in dsrc else self.target.algebra.zero()
                if not self.target.equal_at(lhs, rhs, x):
                    bad.append(("differential", v, x))
            for r in self.source.relations_at(x):
                img = r.substitute(imgs, self.target.algebra)
                if not self.target.equal_at(img, 0, x):
                    bad.append(("relation", str(r), x))
        return CheckResult(not bad, bad)

    def __repr__(self):
        return f"SheafHom({self.source!r} -> {self.target!r})"


def identity(B: DGRingSheaf) -> SheafHom:
    return SheafHom(B, B, {}, check=False, name="id")


def structure_map(A: DGRingSheaf, B: DGRingSheaf) -> SheafHom:
    """The map A -> B of a DG A-ring (A must be in the base chain of B)."""
    if A not in B.chain():
        raise StructureError("A is not a base of B")
    return SheafHom(A, B, {}, check=False, name="structure")


def extend_hom(R: DGRingSheaf, images: dict, target: DGRingSheaf | None = None) -> SheafHom:
    """The unique morphism of DG A-rings with t_i -> images[i]."""
    if target is None:
        secs = [v for v in images.values() if isinstance(v, Section)]
        if not secs:
            raise StructureError("target ring needed when no image is a Section")
        target = secs[0].ring
    return SheafHom(R, target, images)


def compose(g: SheafHom, f: SheafHom) -> SheafHom:
    """g o f."""
    if f.target is not g.source:
        raise StructureError("composition of non-composable morphisms")
    images = {}
    for gen in f.source.all_generators():
        vals = {p: g.apply(f.image_at(gen.id, p), p) for p in gen.support}
        images[gen.id] = vals
    return SheafHom(f.source, g.target, images, check=False)


def homs_equal(f: SheafHom, g: SheafHom) -> CheckResult:
    """Generator-by-generator equality under normal forms in the target."""
    if f.source is not g.source or f.target is not g.target:
        raise StructureError("morphisms with different source or target")
    bad = []
    for gen in f.source.all_generators():
        for p in gen.support:
            if not f.target.equal_at(f.image_at(gen.id, p), g.image_at(gen.id, p), p):
                bad.append((gen.id, p))
    return CheckResult(not bad, bad)


# ---------------------------------------------------------------- constructions

@dataclass
class RingedSpace:
    space: FiniteSpace
    structure: DGRingSheaf

    def __post_init__(self):
        if self.structure.space != self.space:
            raise SpaceError("structure sheaf lives on another space")


def _fresh(name, taken):
    cand = name
    while cand in taken:
        cand = cand + "'"
    return cand


class TensorProduct(DGRingSheaf):
    """B tensor_A C with the own generators of both factors (C's renamed on clashes)."""

    def __init__(self, B: DGRingSheaf, C: DGRingSheaf, name=None):
        if B.base is not C.base:
            raise StructureError("tensor product needs a common base")
        if B.field != C.field:
            raise StructureError("tensor product of rings over different fields")
        taken = set(B.algebra.degrees)
        self.left_names = {g.id: g.id for g in B.spec}
        self.right_names = {}
        for g in C.spec:
            new = _fresh(g.id, taken)
            taken.add(new)
            self.right_names[g.id] = new
        space = B.space
        entries = [Generator(g.id, g.support, g.degree) for g in B.spec]
        entries += [Generator(self.right_names[g.id], g.support, g.degree) for g in C.spec]
        spec = GeneratorSpec(entries)
        super().__init__(space, spec, base=B.base, field=B.field,
                         name=name or f"({B.name or 'B'} (x) {C.name or 'C'})")
        self.left, self.right = B, C
        ren_c = {old: self.algebra.var(new) for old, new in self.right_names.items()}
        for gid, sec in B.differential.items():
            self.differential[gid] = Section(self, sec.open, {p: self.algebra(v) for p, v in sec.values.items()}, check=False)
        for gid, sec in C.differential.items():
            self.differential[self.right_names[gid]] = Section(
                self, sec.open, {p: v.substitute(ren_c, self.algebra) for p, v in sec.values.items()}, check=False)
        for sec in B.relations:
            self.relations.append(Section(self, sec.open, {p: self.algebra(v) for p, v in sec.values.items()}, check=False))
        for sec in C.relations:
            self.relations.append(Section(self, sec.open, {p: v.substitute(ren_c, self.algebra) for p, v in sec.values.items()}, check=False))
        self._validate_structure()

    def left_inclusion(self) -> SheafHom:
        return SheafHom(self.left, self, {}, check=False)

    def right_inclusion(self) -> SheafHom:
        return SheafHom(self.right, self, {old: self.algebra.var(new) for old, new in self.right_names.items()}, check=False)


def tensor_over_A(B: DGRingSheaf, C: DGRingSheaf, name=None) -> TensorProduct:
    return TensorProduct(B, C, name)


def tensor_homs(T_src: TensorProduct, T_tgt: TensorProduct, f: SheafHom, g: SheafHom) -> SheafHom:
    """f (x) g : B (x) C -> B' (x) C'."""
    if f.source is not T_src.left or g.source is not T_src.right:
        raise StructureError("factors do not match the source tensor product")
    if f.target is not T_tgt.left or g.target is not T_tgt.right:
        raise StructureError("factors do not match the target tensor product")
    ren = {old: T_tgt.algebra.var(new) for old, new in T_tgt.right_names.items()}
    images = {}
    for gen in T_src.left.spec:
        images[gen.id] = {p: T_tgt.algebra(f.image_at(gen.id, p)) for p in gen.support}
    for gen in T_src.right.spec:
        images[T_src.right_names[gen.id]] = {p: g.image_at(gen.id, p).substitute(ren, T_tgt.algebra)
                                             for p in gen.support}
    return SheafHom(T_src, T_tgt, images, check=False)


def multiplication(T: TensorProduct) -> SheafHom:
    """mu : B (x)_A B -> B."""
    if T.left is not T.right:
        raise StructureError("multiplication needs B (x) B")
    B = T.left
    images = {new: B.algebra.var(old) for old, new in T.right_names.items()}
    return SheafHom(T, B, images, check=False, name="mu")


def restrict(B: DGRingSheaf, members, _cache=None) -> DGRingSheaf:
    """B restricted to the subspace on ``members`` (supports intersected)."""
    cache = {} if _cache is None else _cache
    if id(B) in cache:
        return cache[id(B)]
    sub = B.space.subspace(members)
    keep = set(sub.points)
    base = restrict(B.base, members, cache) if B.base is not None else None
    entries = []
    for g in B.spec:
        mem = g.support.members & keep
        if mem:
            entries.append(Generator(g.id, OpenSet(sub, frozenset(mem)), g.degree))
    spec = GeneratorSpec(entries)
    dvals = {}
    for gid, sec in B.differential.items():
        if gid in spec:
            dvals[gid] = {p: sec.values[p] for p in spec[gid].support}
    rels = []
    for sec in B.relations:
        mem = sec.open.members & keep
        if mem:
            rels.append(({p: sec.values[p] for p in mem}, OpenSet(sub, frozenset(mem))))
    R = DGRingSheaf(sub, spec, base=base, field=B.field, name=B.name)
    for gid, vals in dvals.items():
        R.differential[gid] = Section(R, spec[gid].support, {p: R.algebra(v) for p, v in vals.items()}, check=False)
    for vals, U in rels:
        R.relations.append(Section(R, U, {p: R.algebra(v) for p, v in vals.items()}, check=False))
    R._validate_structure()
    cache[id(B)] = R
    return R


def restrict_to_open(B: DGRingSheaf, V: OpenSet) -> DGRingSheaf:
    if V.space != B.space:
        raise SpaceError("open set of another space")
    if not B.space.is_open(V.members):
        raise SpaceError(f"{sorted(V.members)} is not open")
    return restrict(B, V.members)


def restrict_hom(f: SheafHom, members) -> SheafHom:
    cache = {}
    S = restrict(f.source, members, cache)
    T = restrict(f.target, members, cache)
    images = {}
    for gid, sec in f.images.items():
        mem = sec.open.members & set(members)
        if mem and gid in S.algebra.degrees:
            images[gid] = {p: T.algebra(sec.values[p]) for p in mem}
    return SheafHom(S, T, images, check=False)


# ---------------------------------------------------------------- fiber products

def _monomials_up_to(nvars: int, D: int):
    for total in range(D + 1):
        for combo in combinations_with_replacement(range(nvars), total):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


class FiberProduct:
    """Stalkwise {(b0, b1) : phi0(b0) = phi1(b1)}, computed in bounded slices.

    A slice at (x, n, D) is a K-basis of the pairs whose entries are
    combinations of degree-n monomials with polynomial part of total degree
    <= D.  The product is a DG subring of B0 x B1; the projections are the
    coordinate maps on pairs.
    """

    def __init__(self, phi0: SheafHom, phi1: SheafHom):
        if phi0.target is not phi1.target:
            raise StructureError("fiber product needs a common target")
        self.phi0, self.phi1 = phi0, phi1
        self.target = phi0.target
        self.space = self.target.space
        self._slices = {}

    @staticmethod
    def _spanning(st, n, D):
        out = []
        for m in st.monomials(n):
            for e in _monomials_up_to(len(st.zero_vars), D):
                zero = tuple((v, k) for v, k in zip(st.zero_vars, e) if k)
                mono = tuple(sorted(zero + m, key=lambda t: st.alg.position[t[0]]))
                out.append(st.alg.monomial(mono))
        return out

    def slice(self, x, n: int, D: int) -> list:
        """A basis of pairs (b0, b1) in degree n with polynomial degree <= D."""
        key = (x, n, D)
        if key in self._slices:
            return self._slices[key]
        from . import linalg
        s0 = self.phi0.source.stalk(x)
        s1 = self.phi1.source.stalk(x)
        sb = self.target.stalk(x)
        m0 = self._spanning(s0, n, D)
        m1 = self._spanning(s1, n, D)
        images = [sb.normal_form(self.phi0.apply(m, x)) for m in m0]
        images += [-sb.normal_form(self.phi1.apply(m, x)) for m in m1]
        coords = sorted({t for im in images for t in im.terms}, key=repr)
        field = self.target.field
        rows = [[im.terms.get(t, field.zero) for im in images] for t in coords]
        null = linalg.nullspace(rows, len(images), field)
        pairs, seen_rows = [], []
        for vec in null:
            b0 = sum((m * c for m, c in zip(m0, vec[:len(m0)]) if c), s0.alg.zero())
            b1 = sum((m * c for m, c in zip(m1, vec[len(m0):]) if c), s1.alg.zero())
            b0, b1 = s0.normal_form(b0), s1.normal_form(b1)
            if not b0 and not b1:
                continue
            pairs.append((b0, b1))
        # drop pairs dependent modulo the relations of B0 and B1
        keys = sorted({("0", t) for b0, _ in pairs for t in b0.terms} | {("1", t) for _, b1 in pairs for t in b1.terms},
                      key=repr)
        basis = []
        for b0, b1 in pairs:
            row = [(b0 if side == "0" else b1).terms.get(t, field.zero) for side, t in keys]
            if linalg.rank(seen_rows + [row], field) > len(seen_rows):
                seen_rows.append(row)
                basis.append((b0, b1))
        self._slices[key] = basis
        return basis

    def dimension(self, x, n: int, D: int) -> int:
        return len(self.slice(x, n, D))

    def contains(self, b0, b1, x) -> bool:
        sb = self.target.stalk(x)
        return sb.is_zero(self.phi0.apply(b0, x) - self.phi1.apply(b1, x))

    @staticmethod
    def pr0(pair):
        return pair[0]

    @staticmethod
    def pr1(pair):
        return pair[1]


def fiber_product(phi0: SheafHom, phi1: SheafHom) -> FiberProduct:
    return FiberProduct(phi0, phi1)
