"""Pseudo-free modules and pseudo-free graded-commutative rings on finite spaces.

A generator ``t_i`` lives on an open set ``U_i``; its stalk at ``x`` is a free
rank-one module when ``x`` is in ``U_i`` and zero otherwise.  The stalk of the
pseudo-free ring at ``x`` is the free graded-commutative algebra on the
generators supported at ``x`` (over the base stalk, if there is a base).
"""
from __future__ import annotations

from dataclasses import dataclass
from threading import Lock

from .coeffs import CoeffField
from .gcalg import FreeGCAlgebra, GCElement
from .space import FiniteSpace, OpenSet, SpaceError


@dataclass(frozen=True)
class Generator:
    id: str
    support: OpenSet
    degree: int


class GeneratorSpec:
    """The indexing data of a pseudo-free object: ids, open supports, degrees."""

    def __init__(self, entries=()):
        self.entries = tuple(Generator(*e) if not isinstance(e, Generator) else e for e in entries)
        seen = set()
        for g in self.entries:
            if g.id in seen:
                raise ValueError(f"duplicate generator id {g.id!r}")
            if g.degree > 0:
                raise ValueError(f"generator {g.id!r} has positive degree {g.degree}")
            seen.add(g.id)
        self._by_id = {g.id: g for g in self.entries}

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, gid):
        return gid in self._by_id

    def __getitem__(self, gid) -> Generator:
        return self._by_id[gid]

    def ids(self):
        return [g.id for g in self.entries]

    def degrees(self) -> dict:
        return {g.id: g.degree for g in self.entries}

    def extended(self, entries) -> "GeneratorSpec":
        return GeneratorSpec(self.entries + tuple(entries))

    def without(self, gid) -> "GeneratorSpec":
        return GeneratorSpec(g for g in self.entries if g.id != gid)

    def __repr__(self):
        return "GeneratorSpec([" + ", ".join(f"{g.id}:{g.degree}@{g.support!r}" for g in self.entries) + "])"


def graded_slice(spec: GeneratorSpec, n: int) -> set:
    return {g.id for g in spec if g.degree == n}


def local_index_set(spec: GeneratorSpec, x) -> dict:
    """{id: degree} for the generators whose support contains ``x``."""
    out = {}
    for g in spec:
        g.support.space.check_point(x)
        if x in g.support:
            out[g.id] = g.degree
    return out


class PsfModule:
    """The pseudo-free graded module with one pseudo-generator per spec entry."""

    def __init__(self, space: FiniteSpace, spec: GeneratorSpec):
        self.space = space
        self.spec = spec

    def stalk_basis(self, x, n: int) -> list:
        self.space.check_point(x)
        return [g.id for g in self.spec if g.degree == n and x in g.support]


def _negative_monomials(variables, degrees, n):
    """Monomials of total degree ``n`` (< 0) in negative-degree variables.

    Even variables may repeat, odd ones appear at most once.
    """
    variables = list(variables)
    out = []

    def rec(i, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == len(variables):
            return
        v = variables[i]
        d = degrees[v]
        rec(i + 1, remaining, acc)
        kmax = 1 if d % 2 else remaining // d
        for k in range(1, kmax + 1):
            if d * k < remaining:
                break
            rec(i + 1, remaining - d * k, acc + [(v, k)])

    if n == 0:
        return [()]
    rec(0, n, [])
    return out


def _weight_monomials(variables, w):
    """Exponent tuples of total weight ``w`` in the given degree-0 variables."""
    variables = list(variables)
    out = []

    def rec(i, remaining, acc):
        if i == len(variables) - 1:
            out.append(tuple(acc + [(variables[i], remaining)] if remaining else acc))
            return
        for k in range(remaining, -1, -1):
            rec(i + 1, remaining - k, acc + [(variables[i], k)] if k else acc)

    if not variables:
        return [()] if w == 0 else []
    rec(0, w, [])
    return out


class StalkRing:
    """Free strictly graded-commutative algebra on the local index set at a point."""

    def __init__(self, field: CoeffField, degrees: dict, base=None):
        self.field = field
        self.degrees = dict(degrees)
        self.base = base
        self.algebra = FreeGCAlgebra(field, self.degrees)
        self.zero_vars = [v for v, d in self.degrees.items() if d == 0]
        self.neg_vars = [v for v, d in self.degrees.items() if d < 0]

    def negative_part(self, n: int):
        """Monomials in the negative variables of degree exactly ``n``."""
        if n > 0:
            return []
        return _negative_monomials(self.neg_vars, self.degrees, n)

    def basis(self, n: int, weight: int):
        """Monomials of degree ``n`` whose degree-0 part has total exponent ``weight``."""
        if n > 0:
            return []
        out = []
        pos = self.algebra.position
        for z in _weight_monomials(self.zero_vars, weight):
            for m in self.negative_part(n):
                out.append(tuple(sorted(z + m, key=lambda t: pos[t[0]])))
        return out

    def hilbert(self, n: int, max_weight: int) -> list:
        """Counts of basis(n, w) for w = 0..max_weight (generating-function coefficients)."""
        return [len(self.basis(n, w)) for w in range(max_weight + 1)]

    def rank_over_degree_zero(self, n: int) -> int:
        """Rank of the degree-n component as a free module over K[degree-0 variables]."""
        return len(self.negative_part(n))


def hilbert_series_oracle(degrees: dict, n: int, max_weight: int) -> list:
    """Coefficients of s^n t^w in prod 1/(1 - t) * prod_even 1/(1 - s^d) * prod_odd (1 + s^d).

    Computed by truncated power-series multiplication, independently of the
    monomial enumeration used by StalkRing.
    """
    if n > 0:
        return [0] * (max_weight + 1)
    depth = -n
    # series[i][w] = coefficient of s^{-i} t^w
    series = [[0] * (max_weight + 1) for _ in range(depth + 1)]
    series[0][0] = 1
    for v, d in degrees.items():
        new = [[0] * (max_weight + 1) for _ in range(depth + 1)]
        if d == 0:
            for i in range(depth + 1):
                acc = 0
                for w in range(max_weight + 1):
                    acc += series[i][w]
                    new[i][w] = acc
        elif d % 2:
            for i in range(depth + 1):
                for w in range(max_weight + 1):
                    new[i][w] = series[i][w] + (series[i + d][w] if i + d >= 0 else 0)
        else:
            for i in range(depth + 1):
                for w in range(max_weight + 1):
                    new[i][w] = series[i][w] + (new[i + d][w] if i + d >= 0 else 0)
        series = new
    return series[depth]


class PsfRing:
    """The commutative pseudo-free graded ring on ``spec`` over ``base``.

    With ``base=None`` the base is the constant sheaf of the field.  Variables
    of the whole base chain and of ``spec`` live in one FreeGCAlgebra, so a
    stalk element is a GCElement using only variables supported at the point.
    """

    def __init__(self, space: FiniteSpace, spec: GeneratorSpec, base=None, field: CoeffField | None = None):
        if base is not None:
            if base.space != space:
                raise SpaceError("base ring lives on a different space")
            field = base.field
        if field is None:
            raise ValueError("a field is required when there is no base ring")
        self.space = space
        self.spec = spec
        self.base = base
        self.field = field
        for g in spec:
            if g.support.space != space:
                raise SpaceError(f"support of {g.id!r} lies in a different space")
        chain_degrees = dict(base.algebra.degrees) if base is not None else {}
        for g in spec:
            if g.id in chain_degrees:
                raise ValueError(f"generator {g.id!r} clashes with a base variable")
        self.algebra = FreeGCAlgebra(field, {**chain_degrees, **spec.degrees()})
        self._stalk_cache = {}
        self._lock = Lock()

    # ------------------------------------------------------------ variables

    def chain(self):
        """Rings from the bottom of the base chain up to ``self``."""
        out = []
        r = self
        while r is not None:
            out.append(r)
            r = r.base
        return out[::-1]

    def all_generators(self):
        return [g for r in self.chain() for g in r.spec]

    def generator(self, gid) -> Generator:
        for r in self.chain():
            if gid in r.spec:
                return r.spec[gid]
        raise KeyError(gid)

    def support_of(self, gid) -> OpenSet:
        return self.generator(gid).support

    def variables_at(self, x) -> dict:
        """{var: degree} for every chain variable supported at ``x``, in chain order."""
        self.space.check_point(x)
        return {g.id: g.degree for g in self.all_generators() if x in g.support}

    def base_variables(self) -> set:
        return set(self.base.algebra.degrees) if self.base is not None else set()

    def stalk_ring(self, x) -> StalkRing:
        with self._lock:
            if x not in self._stalk_cache:
                own = local_index_set(self.spec, x)
                base = self.base.stalk_ring(x) if self.base is not None else None
                self._stalk_cache[x] = StalkRing(self.field, own, base)
            return self._stalk_cache[x]

    def element(self, text_or_elem) -> GCElement:
        return self.algebra(text_or_elem)

    def check_local(self, elem: GCElement, x, what="element"):
        avail = self.variables_at(x)
        bad = sorted(elem.variables() - set(avail))
        if bad:
            raise SpaceError(f"{what} uses {bad} which are not defined at point {x}")

    def section(self, open_set: OpenSet, value) -> "Section":
        """A section over ``open_set``; ``value`` is one expression or a {point: expression} map."""
        if isinstance(value, dict):
            vals = {p: self.algebra(v) for p, v in value.items()}
            for p in open_set:
                if p not in vals:
                    ups = [q for q in vals if self.space.leq(p, q)]
                    if not ups:
                        raise SpaceError(f"no value given over point {p}")
                    vals[p] = vals[ups[0]]
        else:
            v = self.algebra(value)
            vals = {p: v for p in open_set}
        return Section(self, open_set, vals)

    def equal_at(self, a: GCElement, b: GCElement, x) -> bool:
        return (a - b).is_zero()


class Section:
    """A compatible family of stalk elements over an open set."""

    def __init__(self, ring: PsfRing, open_set: OpenSet, values: dict, check: bool = True):
        self.ring = ring
        self.open = open_set
        self.values = {p: values[p] for p in open_set}
        if check:
            self.validate()

    def validate(self):
        for p, v in self.values.items():
            self.ring.check_local(v, p, "section value")
        for x in self.open:
            for y in self.open:
                if x != y and self.ring.space.leq(x, y):
                    if not self.ring.equal_at(self.values[y], self.values[x], x):
                        raise SpaceError(f"section values at {y} and {x} are not compatible")

    def __getitem__(self, x) -> GCElement:
        return self.values[x]

    def restrict(self, V: OpenSet) -> "Section":
        if not V <= self.open:
            raise SpaceError("restriction to a larger open set")
        return Section(self.ring, V, {p: self.values[p] for p in V}, check=False)

    def degree(self):
        ds = set()
        for v in self.values.values():
            ds |= v.degrees()
        if len(ds) > 1:
            raise ValueError("section is not homogeneous")
        return ds.pop() if ds else None

    def is_uniform(self) -> bool:
        vals = list(self.values.values())
        return all(v == vals[0] for v in vals[1:])

    def __repr__(self):
        if self.values and self.is_uniform():
            return f"Section({next(iter(self.values.values()))} on {self.open!r})"
        return "Section({" + ", ".join(f"{p}: {v}" for p, v in self.values.items()) + "})"


def multiply(s: Section, t: Section) -> Section:
    if s.ring is not t.ring:
        raise ValueError("sections of different rings")
    members = s.open.members & t.open.members
    U = OpenSet(s.ring.space, members)
    return Section(s.ring, U, {p: s.values[p] * t.values[p] for p in U}, check=False)


@dataclass
class FlatnessReport:
    ok: bool
    degree: int
    ranks: dict        # point -> rank over the degree-0 polynomial ring
    series: dict       # point -> Hilbert coefficients by degree-0 weight
    counterexample: tuple | None = None


def flatness_check(R: PsfRing, n: int, max_weight: int = 4) -> FlatnessReport:
    """Stalkwise freeness of the degree-n component (free implies flat).

    The degree-n stalk at x is free over the base stalk on the monomial
    basis; this verifies that the enumerated basis has no repetitions and
    that its size agrees with the Hilbert-series count.
    """
    ranks, series = {}, {}
    for x in R.space:
        S = R.stalk_ring(x)
        mons = S.negative_part(n)
        if len(set(mons)) != len(mons):
            return FlatnessReport(False, n, ranks, series, (x, "repeated basis monomial"))
        counts = S.hilbert(n, max_weight)
        oracle = hilbert_series_oracle(S.degrees, n, max_weight)
        if counts != oracle:
            return FlatnessReport(False, n, ranks, series, (x, f"basis counts {counts} != {oracle}"))
        ranks[x] = len(mons)
        series[x] = counts
    return FlatnessReport(True, n, ranks, series)
