"""Derived tensor products, derived intersections, and the cotangent complex."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .dgmodule import DGModuleSheaf
from .dgring import (DGRingSheaf, RingedSpace, SheafHom, TensorProduct, identity, quotient, restrict,
                     tensor_homs, tensor_over_A)
from .errors import PreconditionError
from .groebner import SubmoduleBasis, ideal_relations, kernel, scale_vec, add_vec, vec_from_polys
from .homology import CohomologyReport, WindowError, cohomology, cohomology_module, is_quasi_iso, parse_window
from .modules import ModulePresentation, module_iso_test
from .pseudofree import GeneratorSpec
from .poly import Poly, PolyRing
from .resolution import ResolutionStage, ore_square, resolve


def _check_window(window, q_max):
    lo, hi = parse_window(window)
    if lo < -q_max + 1:
        raise WindowError(f"window [{lo}, {hi}] needs q_max >= {1 - lo}, got {q_max}")
    return lo, hi


# ---------------------------------------------------------------- derived tensor

@dataclass
class DerivedTensor:
    ring: TensorProduct
    report: CohomologyReport
    xi: SheafHom                     # resolved product -> underived product
    xi_quasi_iso: bool
    xi_witness: tuple | None
    resolutions: tuple               # (stage for B, stage for C or None)


def derived_tensor(B: DGRingSheaf, C: DGRingSheaf, q_max: int, window, seed: int = 0,
                   one_sided: bool = False, name: str | None = None) -> DerivedTensor:
    """B (x)^L_A C through the window, computed as F_B (x)_A F_C (or F_B (x)_A C).

    The comparison map xi to the underived product B (x)_A C is tested for
    being a window quasi-isomorphism; it is one whenever B or C is K-flat.
    """
    lo, hi = _check_window(window, q_max)
    if B.base is not C.base:
        raise PreconditionError("the two rings are not over a common base")
    RB = resolve(B, q_max, seed=seed, name="FB")
    if one_sided:
        RC, right, g = None, C, identity(C)
    else:
        RC = resolve(C, q_max, seed=seed, name="FC")
        right, g = RC.ring, RC.phi
    T = tensor_over_A(RB.ring, right, name=name or f"{B.name or 'B'} (x)L {C.name or 'C'}")
    report = cohomology(T, (lo, hi))
    U = tensor_over_A(B, C)
    xi = tensor_homs(T, U, RB.phi, g)
    q = is_quasi_iso(xi, (lo, hi))
    return DerivedTensor(T, report, xi, q.ok, q.witness, (RB, RC))


# ---------------------------------------------------------------- intersections

@dataclass
class ClosedSubspaceDatum:
    """A closed subspace cut out by an ideal of degree-0 sections of the structure sheaf."""

    ideal: list                      # relations in any form accepted by DGRingSheaf
    name: str = "Y"


def _is_classical(O: DGRingSheaf) -> bool:
    for R in O.chain():
        for g in R.spec:
            if g.degree != 0:
                return False
        if any(sec for sec in R.differential.values() if any(v for v in sec.values.values())):
            return False
    return True


def closed_support(O: DGRingSheaf, ideal) -> frozenset:
    """Points where the ideal is proper; always an up-closed (closed) set."""
    Q = quotient(O, ideal)
    return frozenset(x for x in O.space if not Q.stalk(x).relation_basis(0).is_whole())


@dataclass
class DerivedIntersection:
    support: frozenset
    structure: DGRingSheaf           # the derived ring restricted to the support
    report: CohomologyReport
    ambient: DerivedTensor
    support_ok: bool                 # the ambient product vanishes off the support
    off_support: list = field(default_factory=list)


def derived_intersection(X: RingedSpace, Y1: ClosedSubspaceDatum, Y2: ClosedSubspaceDatum, q_max: int,
                         window, seed: int = 0) -> DerivedIntersection:
    O = X.structure
    if not _is_classical(O):
        raise PreconditionError("the structure sheaf must be concentrated in degree 0")
    A1 = quotient(O, Y1.ideal, name=Y1.name)
    A2 = quotient(O, Y2.ideal, name=Y2.name)
    lo, hi = parse_window(window)
    DT = derived_tensor(A1, A2, q_max, (lo, hi), seed=seed, name=f"{Y1.name} x^h {Y2.name}")
    supp = closed_support(O, Y1.ideal) & closed_support(O, Y2.ideal)
    off = []
    for x in X.space:
        if x in supp:
            continue
        for n in range(lo, hi + 1):
            if not cohomology_module(DT.ring.stalk(x), n).is_zero():
                off.append((x, n))
    if supp:
        OY = restrict(DT.ring, supp)
        report = cohomology(OY, (lo, hi))
    else:
        OY = None
        report = CohomologyReport((lo, hi), {}, sheaf_name=DT.ring.name or "")
    return DerivedIntersection(supp, OY, report, DT, not off, off)


# ---------------------------------------------------------------- Tor oracle

@dataclass
class TorOracle:
    method: str                      # "koszul" or "syzygies"
    modules: dict                    # degree n (= -k) -> ModulePresentation over the ring
    ring: PolyRing

    def ranks(self) -> dict:
        return {n: m.dimension() for n, m in self.modules.items()}


def is_regular_sequence(ring: PolyRing, seq, base_ideal=()) -> bool:
    """Each f_i is a non-zero-divisor modulo base_ideal + (f_1..f_{i-1})."""
    prior = list(base_ideal)
    for f in seq:
        rels = ideal_relations(ring, prior, 1)
        I = SubmoduleBasis(ring, 1, rels)
        for a in kernel([vec_from_polys([f])], ring, 1, rels):
            if not I.contains(a):
                return False
        prior.append(f)
    return True


def _koszul_maps(ring, f, kmax):
    """Koszul complex of f: {k: (basis of k-subsets, columns of d_k)}."""
    m = len(f)
    out = {0: ([()], [])}
    for k in range(1, min(kmax, m) + 1):
        basis = list(itertools.combinations(range(m), k))
        lower = {s: i for i, s in enumerate(out[k - 1][0])}
        cols = []
        for s in basis:
            col = {}
            for pos, i in enumerate(s):
                rest = s[:pos] + s[pos + 1:]
                term = scale_vec({(lower[rest], ring.zero_exp): ring.field.one}, f[i] * (-1 if pos % 2 else 1))
                col = add_vec(col, term)
            cols.append(col)
        out[k] = (basis, cols)
    return out


def koszul_tor_oracle(ring: PolyRing, f, g, window, base_ideal=()) -> TorOracle:
    """Tor^S_k(S/(f), S/(g)) for S = ring/base_ideal, placed in degree -k.

    Resolves S/(f) by the Koszul complex when f is regular in S and by
    iterated syzygies otherwise, then tensors with S/(g).  This uses only
    Groebner bases over ``ring`` and no DG machinery.
    """
    lo, hi = parse_window(window)
    kmax = -lo + 1
    f, g, J0 = list(f), list(g), list(base_ideal)
    ranks, cols = {0: 1}, {}
    if is_regular_sequence(ring, f, J0):
        method = "koszul"
        kos = _koszul_maps(ring, f, kmax)
        for k in range(1, kmax + 1):
            basis, c = kos.get(k, ([], []))
            ranks[k], cols[k] = len(basis), c
    else:
        method = "syzygies"
        cols[1] = [vec_from_polys([p]) for p in f]
        ranks[1] = len(f)
        for k in range(2, kmax + 1):
            cols[k] = kernel(cols[k - 1], ring, ranks[k - 2], ideal_relations(ring, J0, ranks[k - 2]))
            ranks[k] = len(cols[k])
    mod_ideal = J0 + g
    modules = {}
    for n in range(lo, hi + 1):
        k = -n
        if k < 0 or ranks.get(k, 0) == 0:
            modules[n] = ModulePresentation(ring, 0, [])
            continue
        rel_below = ideal_relations(ring, mod_ideal, ranks[k - 1]) if k >= 1 else []
        cyc = kernel(cols[k], ring, ranks[k - 1], rel_below) if k >= 1 else \
            [{(0, ring.zero_exp): ring.field.one}]
        bnd = list(cols.get(k + 1, [])) + ideal_relations(ring, mod_ideal, ranks[k])
        rels = kernel(cyc, ring, ranks[k], bnd) if cyc else []
        modules[n] = ModulePresentation(ring, len(cyc), rels)
    return TorOracle(method, modules, ring)


# ---------------------------------------------------------------- comparison

@dataclass
class ComparisonResult:
    ok: bool
    closes: bool
    psi_quasi_iso: tuple
    diagnostics: list


def one_point_affine_comparison(registered: SheafHom, q_max: int, seed: int = 0) -> ComparisonResult:
    """Compare the engine's resolution of B with a registered one G -> B via an Ore square."""
    if q_max < 1:
        raise PreconditionError("the comparison needs q_max >= 1")
    B = registered.target
    own = resolve(B, q_max + 1, seed=seed)
    sq = ore_square(own.phi, registered, q_max, seed=seed)
    window = (-q_max + 1, 0)
    r0 = is_quasi_iso(sq.psi0, window)
    r1 = is_quasi_iso(sq.psi1, window)
    diag = [f"mismatch at {m}" for m in sq.mismatches]
    if not r0.ok:
        diag.append(f"psi0 not a quasi-isomorphism: {r0.witness}")
    if not r1.ok:
        diag.append(f"psi1 not a quasi-isomorphism: {r1.witness}")
    return ComparisonResult(sq.closes and r0.ok and r1.ok, sq.closes, (r0.ok, r1.ok), diag)


# ---------------------------------------------------------------- cotangent complex

@dataclass
class CotangentComplex:
    module: DGModuleSheaf
    resolution: ResolutionStage
    report: CohomologyReport
    experimental: bool = True


def _flatten(O: DGRingSheaf) -> DGRingSheaf:
    """The same classical ring presented over the field: all chain variables become own generators."""
    if O.base is None:
        return O
    entries = [g for R in reversed(O.chain()) for g in R.spec]
    rels = [(sec.values, sec.open) for R in O.chain() for sec in R.relations]
    return DGRingSheaf(O.space, GeneratorSpec(entries), relations=rels, field=O.field, name=O.name)


def cotangent_complex(X: RingedSpace, q_max: int, window, seed: int = 0) -> CotangentComplex:
    """O (x)_F Omega_F for a resolution F -> O over the base of O (experimental).

    The basis is {dt} over the generators t of F, with
    D(dt_i) = sum_j phi(c_ij) dt_j where delta(d t_i) = sum_j c_ij dt_j.
    """
    lo, hi = _check_window(window, q_max)
    O = X.structure
    if not _is_classical(O):
        raise PreconditionError("the structure sheaf must be concentrated in degree 0")
    O = _flatten(O)
    stage = resolve(O, q_max, seed=seed)
    F, phi = stage.ring, stage.phi
    own = set(F.spec.ids())
    basis = [("d" + g.id, g.support, g.degree) for g in F.spec]
    diff = {}
    for g in F.spec:
        sec = F.differential.get(g.id)
        if sec is None:
            continue
        row = {}
        for x in g.support:
            for v, c in sec.values[x].partials().items():
                if v not in own:
                    continue
                img = phi.apply(c, x)
                if img:
                    row.setdefault("d" + v, {})[x] = O.algebra(img)
        if row:
            diff["d" + g.id] = row
    L = DGModuleSheaf(O, basis, diff, name="L")
    bad = L.check_d_squared()
    if bad:
        raise PreconditionError(f"cotangent differential does not square to zero at {bad[0]}")
    return CotangentComplex(L, stage, cohomology(L, (lo, hi)))


@dataclass
class OracleComparison:
    ok: bool
    matches: dict                    # (point, degree) -> bool
    oracle_ranks: dict               # point -> degree -> K-dimension (None if infinite)
    methods: dict                    # point -> "koszul" | "syzygies"


def intersection_oracle_check(X: RingedSpace, Y1: ClosedSubspaceDatum, Y2: ClosedSubspaceDatum,
                              di: DerivedIntersection, window) -> OracleComparison:
    """Compare the derived intersection with Koszul Tor of the stalk ideals at every support point."""
    lo, hi = parse_window(window)
    O = X.structure
    A1, A2 = quotient(O, Y1.ideal), quotient(O, Y2.ideal)
    matches, ranks, methods = {}, {}, {}
    for y in sorted(di.support, key=str):
        st = O.stalk(y)
        R = st.P
        f = [st.element_to_poly(sec.values[y].transfer(O.algebra)) for sec in A1.relations if y in sec.open]
        g = [st.element_to_poly(sec.values[y].transfer(O.algebra)) for sec in A2.relations if y in sec.open]
        orc = koszul_tor_oracle(R, f, g, (lo, hi), base_ideal=st.degree_zero_relations)
        methods[y] = orc.method
        ranks[y] = orc.ranks()
        for n in range(lo, hi + 1):
            matches[(y, n)] = module_iso_test(di.report.module(y, n), orc.modules[n], list(R.variables))
    return OracleComparison(all(matches.values()), matches, ranks, methods)
