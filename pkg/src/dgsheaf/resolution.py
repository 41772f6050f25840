"""Truncated pseudo-semi-free resolutions, factorizations, Ore squares and homotopy witnesses."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dgring import (DGRingSheaf, SheafHom, TensorProduct, check_d_squared, compose, homs_equal,
                     multiplication, structure_map)
from .errors import CertificationError, PreconditionError
from .gcalg import GCElement
from .groebner import Lifter, shift_vec
from .homology import QuasiIsoResult, StalkMap, is_quasi_iso, parse_window
from .pseudofree import Generator, GeneratorSpec


# ---------------------------------------------------------------- building

class _Builder:
    """Accumulates generators of a pseudo-semi-free ring F over ``base`` with a map to ``target``."""

    def __init__(self, target: DGRingSheaf, base, name="F", extra_images=None):
        self.target = target
        self.base = base
        self.space = target.space
        self.name = name
        self.entries = []
        self.dvals = {}
        self.images = {}
        self.extra_images = dict(extra_images or {})
        self.taken = set(target.algebra.degrees) | (set(base.algebra.degrees) if base is not None else set())
        self.counter = 0
        self.log = []
        self.rebuild()

    def fresh(self, prefix):
        while True:
            self.counter += 1
            cand = f"{prefix}{self.counter}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand

    def rebuild(self):
        spec = GeneratorSpec(self.entries)
        self.F = DGRingSheaf(self.space, spec, differential={k: v for k, v in self.dvals.items() if v},
                             base=self.base, field=self.target.field, name=self.name)
        self.phi = SheafHom(self.F, self.target, {**self.extra_images, **self.images}, check=False)

    def add(self, prefix, degree, point, d_value, image, kind, stage):
        gid = self.fresh(prefix)
        U = self.space.minimal_open(point)
        self.entries.append(Generator(gid, U, degree))
        self.dvals[gid] = d_value if d_value is not None else 0
        self.images[gid] = image
        self.log.append({"id": gid, "degree": degree, "point": point, "kind": kind, "stage": stage})
        return gid

    def add_pair(self, degree, point, image, d_image, kind, stage):
        """Generators c (degree) and j = dc (degree + 1) with c -> image, j -> d(image)."""
        jid = self.fresh("j")
        cid = self.fresh("c")
        U = self.space.minimal_open(point)
        self.entries.append(Generator(jid, U, degree + 1))
        self.entries.append(Generator(cid, U, degree))
        self.dvals[jid] = 0
        self.dvals[cid] = jid
        self.images[jid] = d_image
        self.images[cid] = image
        self.log.append({"id": cid, "pair": jid, "degree": degree, "point": point, "kind": kind, "stage": stage})
        return cid, jid

    def materialize(self):
        self.rebuild()


def _order(rng, items):
    items = list(items)
    if rng is not None:
        rng.shuffle(items)
    return items


# ---------------------------------------------------------------- certificates

@dataclass
class Certificate:
    q: int
    entries: list = field(default_factory=list)   # dicts: point, degree, condition, status

    @property
    def ok(self) -> bool:
        return all(e["status"] == "pass" for e in self.entries)

    def failures(self):
        return [e for e in self.entries if e["status"] != "pass"]

    def __bool__(self):
        return self.ok

    def table(self):
        return [(e["point"], e["degree"], e["condition"], e["status"]) for e in self.entries]

    def to_json(self):
        return {"q": self.q, "ok": self.ok,
                "entries": [{k: (str(v) if k == "point" else v) for k, v in e.items()} for e in self.entries]}


@dataclass
class ResolutionStage:
    q: int
    target: DGRingSheaf
    ring: DGRingSheaf
    phi: SheafHom
    certificate: Certificate | None = None
    log: list = field(default_factory=list)

    @property
    def spec(self) -> GeneratorSpec:
        return self.ring.spec

    def generators_table(self):
        rows = []
        for g in self.ring.spec:
            sec = self.ring.differential.get(g.id)
            dval = str(next(iter(sec.values.values()))) if sec is not None and sec.values else "0"
            img = self.phi.images[g.id]
            ival = str(next(iter(img.values.values()))) if img.values else "0"
            rows.append({"id": g.id, "degree": g.degree, "support": sorted(map(str, g.support.members)),
                         "d": dval, "image": ival})
        return rows


def _clone(F: DGRingSheaf) -> DGRingSheaf:
    dvals = {gid: {p: v for p, v in sec.values.items()} for gid, sec in F.differential.items()}
    rels = [(dict(sec.values), sec.open) for sec in F.relations]
    G = DGRingSheaf(F.space, F.spec, base=F.base, field=F.field, name=F.name)
    from .pseudofree import Section
    for gid, vals in dvals.items():
        G.differential[gid] = Section(G, F.spec[gid].support, {p: G.algebra(v) for p, v in vals.items()}, check=False)
    for vals, U in rels:
        G.relations.append(Section(G, U, {p: G.algebra(v) for p, v in vals.items()}, check=False))
    return G


def certify(stage: ResolutionStage) -> Certificate:
    """Recompute conditions (i) and (ii) for ``stage`` from fresh stalk data.

    (i)  phi, B(phi), H(phi) surjective in degrees >= -q;
    (ii) H(phi) injective in degrees >= -q + 1.
    """
    q = stage.q
    F = _clone(stage.ring)
    phi = SheafHom(F, stage.target, {g: sec for g, sec in stage.phi.images.items()}, check=False)
    cert = Certificate(q)

    def rec(x, n, cond, ok):
        cert.entries.append({"point": x, "degree": n, "condition": cond, "status": "pass" if ok else "fail"})

    rec(None, 0, "pseudo-semi-free", not F.relations)
    dd = check_d_squared(F)
    rec(None, 0, "d^2 = 0", dd.ok)
    mor = phi.check()
    rec(None, 0, "phi is a DG morphism", mor.ok)
    for x in F.space:
        m = StalkMap(phi, x)
        for n in range(0, -q - 1, -1):
            if not m.surjective0:
                rec(x, n, "(i) phi surjective", False)
                break
            rec(x, n, "(i) phi surjective", m.surjective(n))
            rec(x, n, "(i) B(phi) surjective", m.boundaries_surjective(n))
            rec(x, n, "(i) H(phi) surjective", m.cohomology_surjective(n))
            if n >= -q + 1:
                rec(x, n, "(ii) H(phi) injective", m.cohomology_injective(n))
    return cert


# ---------------------------------------------------------------- resolve

def resolve(B: DGRingSheaf, q_max: int, seed: int = 0, name: str = "F", check: bool = True) -> ResolutionStage:
    """A pseudo-semi-free DG ring F over the base of B with phi : F -> B certified through q_max.

    Points are treated top-down; every adjoined generator is supported on the
    minimal open set of the point that needed it.  ``seed`` permutes the
    order in which candidate generators are considered (seed 0: input order).
    """
    if q_max < 0:
        raise PreconditionError("q_max must be >= 0")
    rng = random.Random(seed) if seed else None
    b = _Builder(B, B.base, name=name)
    points = B.space.top_down()

    def current(x):
        return StalkMap(b.phi, x)

    # stage 0: degree-0 ring generators, then coboundary pairs
    for x in points:
        while True:
            m = current(x)
            if m.missing0:
                v = _order(rng, m.missing0)[0]
                b.add("u", 0, x, None, B.algebra.var(v), "ring generator", 0)
                b.materialize()
                continue
            miss = m.missing_boundaries(0)
            if miss:
                j = _order(rng, miss)[0]
                mono = m.B.monomial_element(-1, j)
                b.add_pair(-1, x, mono, B.d(mono, x), "coboundary pair", 0)
                b.materialize()
                continue
            break
    for q in range(1, q_max + 1):
        n = -q + 1
        for x in points:
            while True:
                m = current(x)
                fails = m.injectivity_failures(n)
                if fails:
                    z = _order(rng, fails)[0]
                    bvec = m.lift_boundary(m.phi_apply(z, n), n)
                    if bvec is None:
                        raise CertificationError(f"cannot kill cycle at {x} in degree {n}")
                    image = m.to_target_element(bvec, n - 1)
                    b.add("s", -q, x, m.F.from_vector(z, n), image, "cycle killer", q)
                    b.materialize()
                    continue
                miss = m.missing_surjective(-q)
                if miss:
                    j = _order(rng, miss)[0]
                    mono = m.B.monomial_element(-q, j)
                    b.add_pair(-q, x, mono, B.d(mono, x), "surjectivity pair", q)
                    b.materialize()
                    continue
                miss = m.missing_boundaries(-q)
                if miss:
                    j = _order(rng, miss)[0]
                    mono = m.B.monomial_element(-q - 1, j)
                    b.add_pair(-q - 1, x, mono, B.d(mono, x), "coboundary pair", q)
                    b.materialize()
                    continue
                missh = m.missing_cohomology(-q)
                if missh:
                    z = _order(rng, missh)[0]
                    b.add("h", -q, x, None, m.to_target_element(z, -q), "cohomology generator", q)
                    b.materialize()
                    continue
                break
    stage = ResolutionStage(q_max, B, b.F, b.phi, log=b.log)
    if check:
        stage.certificate = certify(stage)
        if not stage.certificate.ok:
            raise CertificationError("resolution certificate failed", stage.certificate.failures())
    return stage


def delete_generator(stage: ResolutionStage, gid: str) -> ResolutionStage:
    """A mutant stage with generator ``gid`` removed (occurrences in differentials set to 0)."""
    F = stage.ring
    if gid not in F.spec:
        raise KeyError(gid)
    spec = F.spec.without(gid)
    G = DGRingSheaf(F.space, spec, base=F.base, field=F.field, name=F.name)
    from .pseudofree import Section
    for g, sec in F.differential.items():
        if g == gid:
            continue
        G.differential[g] = Section(G, sec.open, {p: _drop(v, gid, G) for p, v in sec.values.items()}, check=False)
    images = {g: sec for g, sec in stage.phi.images.items() if g != gid}
    phi = SheafHom(G, stage.target, images, check=False)
    return ResolutionStage(stage.q, stage.target, G, phi, log=[e for e in stage.log if e["id"] != gid])


def _drop(v: GCElement, gid, G):
    return GCElement(G.algebra, {m: c for m, c in v.terms.items() if all(w != gid for w, _ in m)})


# ---------------------------------------------------------------- factorization

class FactorizationError(PreconditionError):
    pass


@dataclass
class Factorization:
    Aplus: DGRingSheaf
    eta: SheafHom        # A -> A+
    eps: SheafHom        # A+ -> A, the retraction
    phi_plus: SheafHom   # A+ -> B
    pairs: list

    def retraction_ok(self) -> bool:
        """eps o eta = id on generators, exactly."""
        for g in self.eta.source.all_generators():
            for p in g.support:
                img = self.eps.apply(self.eta.image_at(g.id, p), p)
                if img != self.eta.source.algebra.var(g.id):
                    return False
        return True


def factorize(phi: SheafHom, window, check_qiso: bool = True) -> Factorization:
    """phi = phi_plus o eta with phi_plus surjective in the window and eta split acyclic.

    A+ = A (x) C where C is free on pairs (w, z = dw).  For each target
    generator needed for surjectivity we adjoin a pair with w -> b and
    z -> d(b); degree-0 targets outside phi(A^0) are first written as
    phi(a) + d(c) and the pair is attached to c.
    """
    lo, hi = parse_window(window)
    A, B = phi.source, phi.target
    b = _Builder(B, A, name="A+", extra_images=phi.images)
    pairs = []
    src_vars = set(A.algebra.degrees)
    points = B.space.top_down()
    for x in points:
        while True:
            m = StalkMap(b.phi, x)
            if not m.missing0:
                break
            st = m.B
            cob = [st.element_to_poly(st.from_vector(c, 0)) for c in st.d_columns(-1) if c]
            mm = StalkMap(b.phi, x, extra_zero_relations=cob)
            v = m.missing0[0]
            if v in mm.missing0:
                raise FactorizationError(f"H^0 of the map is not surjective at {x}: {v} is not hit",
                                         witness=(x, 0, "H not surjective"))
            a_poly = mm.rewrite[v]
            a_elem = mm.F.poly_to_element(a_poly).substitute(mm.images, st.alg)
            resid = st.to_vector(st.alg.var(v) - a_elem, 0)
            lifter = Lifter(st.d_columns(-1), st.P, 1, st.relations(0))
            cvec = lifter.lift(resid)
            if cvec is None:
                raise CertificationError(f"coboundary decomposition failed at {x}")
            c_elem = st.from_vector(cvec, -1)
            cid, jid = b.add_pair(-1, x, c_elem, B.d(c_elem, x), "degree-0 pair", 0)
            pairs.append((cid, jid))
            b.materialize()
    for g in B.all_generators():
        if g.id in src_vars or g.degree == 0 or g.degree < lo - 1:
            continue
        # one pair per maximal point of the support keeps supports minimal opens
        for x in g.support.maximal_points():
            v = B.algebra.var(g.id)
            cid, jid = b.add_pair(g.degree, x, v, B.d(v, x), "generator pair", 0)
            pairs.append((cid, jid))
    b.materialize()
    Aplus, phi_plus = b.F, b.phi
    eta = structure_map(A, Aplus)
    eps_images = {gid: Aplus.base.algebra.zero() for gid in Aplus.spec.ids()}
    eps = SheafHom(Aplus, A, eps_images, check=False)
    fac = Factorization(Aplus, eta, eps, phi_plus, pairs)
    if check_qiso:
        if not fac.retraction_ok():
            raise CertificationError("eps o eta != id")
        res = is_quasi_iso(phi_plus, (lo, hi))
        if not res.ok:
            raise FactorizationError(f"map is not a quasi-isomorphism: {res.witness}", witness=res.witness)
    return fac


# ---------------------------------------------------------------- Ore squares

@dataclass
class OreSquare:
    Bprime: DGRingSheaf
    psi0: SheafHom
    psi1: SheafHom
    resolution: ResolutionStage
    closes: bool
    mismatches: list = field(default_factory=list)


def _surjective_through(phi: SheafHom, lo: int) -> bool:
    for x in phi.source.space:
        m = StalkMap(phi, x)
        if not m.surjective0:
            return False
        for n in range(-1, lo - 1, -1):
            if not m.surjective(n):
                return False
    return True


def lift_through(phi1: SheafHom, g: SheafHom) -> SheafHom:
    """psi with phi1 o psi = g exactly, for pseudo-semi-free source of g and phi1 a surjective quasi-iso.

    Generators are handled in order; for t of degree n pick c0 with
    phi1(c0) = g(t), then correct by k in ker(phi1) with dk = psi(dt) - d(c0).
    """
    Fp = g.source
    B1 = phi1.source
    images = {}
    partial = {}
    for gen in Fp.spec:
        per_point = {}
        for x in gen.support.maximal_points():
            m = StalkMap(phi1, x)
            st1 = m.F
            n = gen.degree
            target = g.image_at(gen.id, x)
            tv = m.b_vec(m.B.to_vector(target, n))
            c0v = m.lift_image(tv, n)
            if c0v is None:
                raise PreconditionError(f"phi1 is not surjective at {x} in degree {n}", witness=(x, n))
            c0 = st1.from_vector(c0v, n)
            dsec = Fp.differential.get(gen.id)
            dt = dsec.values[x] if dsec is not None else Fp.algebra.zero()
            subst = {v: partial[v][x] if v in partial else B1.algebra.var(v) for v in dt.variables()}
            psi_dt = dt.substitute(subst, B1.algebra)
            e = psi_dt - B1.d(c0, x)
            if e:
                r_d = st1.rank(n + 1)
                cols = []
                for j in range(st1.rank(n)):
                    cols.append({**st1.d_columns(n)[j], **shift_vec(m.phi_cols(n)[j], r_d)})
                rels = list(st1.relations(n + 1)) + [shift_vec(r, r_d) for r in m.b_relations(n)]
                lifter = Lifter(cols, st1.P, r_d + m.B.rank(n), rels)
                kv = lifter.lift(st1.to_vector(e, n + 1))
                if kv is None:
                    raise PreconditionError(f"kernel of phi1 not acyclic at {x} in degree {n + 1}",
                                            witness=(x, n + 1))
                c0 = c0 + st1.from_vector(kv, n)
            per_point[x] = c0
        vals = {}
        for p in gen.support:
            ups = [x for x in per_point if Fp.space.leq(p, x)]
            vals[p] = per_point[ups[0]]
            for x in ups[1:]:
                if not B1.equal_at(per_point[x], vals[p], p):
                    raise PreconditionError(f"lifts of {gen.id} disagree at {p}")
        partial[gen.id] = vals
        images[gen.id] = vals
    return SheafHom(Fp, B1, images)


def ore_square(phi0: SheafHom, phi1: SheafHom, q_max: int, seed: int = 0, check_inputs: bool = True) -> OreSquare:
    """B' with psi0 : B' -> B0, psi1 : B' -> B1 and phi0 o psi0 = phi1 o psi1 exactly.

    B' is a resolution of B0 (psi0 its augmentation); psi1 is obtained by
    lifting phi0 o psi0 through phi1, which must be surjective in the degrees
    of the generators of B' (if only phi0 is, the roles are swapped).
    """
    if phi0.target is not phi1.target:
        raise PreconditionError("the two maps need a common target")
    lo_q = -q_max + 1
    if check_inputs:
        for nm, ph in (("phi0", phi0), ("phi1", phi1)):
            r = is_quasi_iso(ph, (min(lo_q, 0), 0))
            if not r.ok:
                raise PreconditionError(f"{nm} is not a quasi-isomorphism: {r.witness}", witness=r.witness)
    need = -q_max - 1
    if _surjective_through(phi1, need):
        swap = False
    elif _surjective_through(phi0, need):
        swap = True
        phi0, phi1 = phi1, phi0
    else:
        raise PreconditionError("ore_square needs one of the maps surjective in degrees >= -q_max-1")
    stage = resolve(phi0.source, q_max, seed=seed, name="B'")
    psi0 = stage.phi
    psi1 = lift_through(phi1, compose(phi0, psi0))
    left, right = compose(phi0, psi0), compose(phi1, psi1)
    eq = homs_equal(left, right)
    if swap:
        psi0, psi1 = psi1, psi0
    return OreSquare(stage.ring, psi0, psi1, stage, eq.ok, eq.offending)


# ---------------------------------------------------------------- homotopies

@dataclass
class HomotopyWitness:
    Bplus: DGRingSheaf
    eta: SheafHom     # B (x)_A B -> B+
    eps: SheafHom     # B+ -> B
    phi: SheafHom     # B+ -> C


@dataclass
class WitnessCheck:
    ok: bool
    diagnostics: list = field(default_factory=list)
    qiso: QuasiIsoResult | None = None

    def __bool__(self):
        return self.ok


def check_homotopy_witness(w: HomotopyWitness, phi0: SheafHom, phi1: SheafHom, window) -> WitnessCheck:
    """The two triangles of the cylinder diagram on generators, plus eps a quasi-iso."""
    diags = []
    B, C = phi0.source, phi0.target
    if phi1.source is not B or phi1.target is not C:
        raise PreconditionError("phi0 and phi1 must share source and target")
    T = w.eta.source
    if not isinstance(T, TensorProduct) or T.left is not B or T.right is not B:
        raise PreconditionError("eta must start at B (x)_A B")
    if w.eta.target is not w.Bplus or w.eps.source is not w.Bplus or w.phi.source is not w.Bplus:
        raise PreconditionError("eta, eps and phi must meet at B+")
    if w.eps.target is not B or w.phi.target is not C:
        raise PreconditionError("eps must end at B and phi at C")
    tri1 = homs_equal(compose(w.eps, w.eta), multiplication(T))
    if not tri1.ok:
        diags.append(("eps o eta != mu", tri1.offending))
    left = compose(w.phi, w.eta)
    bad = []
    for gen in T.all_generators():
        for p in gen.support:
            got = left.image_at(gen.id, p)
            if gen.id in T.right_names.values():
                orig = next(k for k, v in T.right_names.items() if v == gen.id)
                want = phi1.image_at(orig, p)
            else:
                want = phi0.image_at(gen.id, p)
            if not C.equal_at(got, C.algebra(want), p):
                bad.append((gen.id, p))
    if bad:
        diags.append(("phi o eta != phi0 (x) phi1", bad))
    q = is_quasi_iso(w.eps, window)
    if not q.ok:
        diags.append(("eps is not a quasi-isomorphism", q.witness))
    return WitnessCheck(not diags, diags, q)


def check_quasi_homotopy_witness(psi: SheafHom, w: HomotopyWitness, phi0: SheafHom, phi1: SheafHom,
                                 window) -> WitnessCheck:
    """phi0 o psi and phi1 o psi homotopic via ``w``, and psi a quasi-isomorphism."""
    q = is_quasi_iso(psi, window)
    res = check_homotopy_witness(w, compose(phi0, psi), compose(phi1, psi), window)
    if not q.ok:
        res.ok = False
        res.diagnostics.append(("psi is not a quasi-isomorphism", q.witness))
    return res
