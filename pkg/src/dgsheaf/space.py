"""Finite T0 spaces as specialization posets.

``x <= y`` means x lies in every open set containing y.  Open sets are the
down-closed subsets; the stalk of a sheaf at ``y`` is its value on the
minimal open set ``{z : z <= y}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    points: tuple
    message: str


def validate(points, leq_pairs) -> list[Diagnostic]:
    """Check the poset axioms for ``leq_pairs``; an empty list means ok."""
    points = list(points)
    rel = set(map(tuple, leq_pairs))
    out = []
    known = set(points)
    if len(known) != len(points):
        out.append(Diagnostic("duplicate", (), "duplicate point identifiers"))
    for a, b in sorted(rel, key=str):
        for p in (a, b):
            if p not in known:
                out.append(Diagnostic("unknown-point", (p,), f"unknown point {p!r} in relation"))
    for p in points:
        if (p, p) not in rel:
            out.append(Diagnostic("reflexivity", (p,), f"reflexivity violated at {p}: missing ({p},{p})"))
    for a, b in sorted(rel, key=str):
        if a != b and (b, a) in rel and str(a) < str(b):
            out.append(Diagnostic("antisymmetry", (a, b), f"antisymmetry violated at ({a},{b})"))
    for (a, b), (c, d) in product(sorted(rel, key=str), repeat=2):
        if b == c and (a, d) not in rel:
            out.append(Diagnostic("transitivity", (a, b, d), f"transitivity violated: ({a},{b}) and ({b},{d}) but not ({a},{d})"))
    return out


class FiniteSpace:
    """A finite T0 space given by its points and the partial order ``leq``."""

    def __init__(self, points, leq_pairs=(), close=True):
        self.points = tuple(points)
        pairs = set(map(tuple, leq_pairs))
        if close:
            pairs |= {(p, p) for p in self.points}
            pairs = _transitive_closure(pairs)
        diags = validate(self.points, pairs)
        if diags:
            raise SpaceError("; ".join(d.message for d in diags))
        self._leq = frozenset(pairs)
        self._index = {p: i for i, p in enumerate(self.points)}
        self._down = {p: frozenset(q for q in self.points if (q, p) in self._leq) for p in self.points}

    @classmethod
    def discrete(cls, n_or_points) -> "FiniteSpace":
        pts = [f"p{i}" for i in range(n_or_points)] if isinstance(n_or_points, int) else list(n_or_points)
        return cls(pts)

    @classmethod
    def point(cls, name="pt") -> "FiniteSpace":
        return cls([name])

    @classmethod
    def sierpinski(cls, open_pt="o", closed_pt="c") -> "FiniteSpace":
        return cls([open_pt, closed_pt], [(open_pt, closed_pt)])

    def leq(self, x, y) -> bool:
        return (x, y) in self._leq

    def relation(self):
        return sorted(self._leq, key=lambda t: (self._index[t[0]], self._index[t[1]]))

    def check_point(self, x):
        if x not in self._index:
            raise SpaceError(f"unknown point {x!r}")

    def __contains__(self, x):
        return x in self._index

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, FiniteSpace) and self.points == other.points and self._leq == other._leq

    def __hash__(self):
        return hash((self.points, self._leq))

    def __repr__(self):
        strict = [(a, b) for a, b in self.relation() if a != b]
        return f"FiniteSpace({list(self.points)}, {strict})"

    # ------------------------------------------------------------- opens

    def open_set(self, members) -> "OpenSet":
        return OpenSet(self, frozenset(members))

    def whole(self) -> "OpenSet":
        return OpenSet(self, frozenset(self.points))

    def empty(self) -> "OpenSet":
        return OpenSet(self, frozenset())

    def minimal_open(self, x) -> "OpenSet":
        self.check_point(x)
        return OpenSet(self, self._down[x])

    def down(self, x) -> frozenset:
        return self._down[x]

    def up(self, x) -> frozenset:
        return frozenset(q for q in self.points if (x, q) in self._leq)

    def is_open(self, members) -> bool:
        members = set(members)
        return all(self._down[y] <= members for y in members)

    def is_closed(self, members) -> bool:
        members = set(members)
        return self.is_open(set(self.points) - members)

    def open_sets(self):
        """All open sets (exponential; intended for spaces of a handful of points)."""
        out = []
        pts = self.points
        for mask in range(1 << len(pts)):
            s = {pts[i] for i in range(len(pts)) if mask >> i & 1}
            if self.is_open(s):
                out.append(OpenSet(self, frozenset(s)))
        return out

    def top_down(self):
        """Points ordered so that y precedes x whenever x < y."""
        return sorted(self.points, key=lambda p: (-len(self._down[p]), self._index[p]))

    def subspace(self, members) -> "FiniteSpace":
        """The induced poset on ``members`` (open or closed subspaces alike)."""
        members = [p for p in self.points if p in set(members)]
        return FiniteSpace(members, [(a, b) for a, b in self._leq if a in members and b in members], close=False)

    def to_json(self):
        return {"points": list(self.points), "leq": [[a, b] for a, b in self.relation() if a != b]}


def _transitive_closure(pairs):
    pairs = set(pairs)
    changed = True
    while changed:
        changed = False
        new = {(a, d) for a, b in pairs for c, d in pairs if b == c} - pairs
        if new:
            pairs |= new
            changed = True
    return pairs


@dataclass(frozen=True)
class OpenSet:
    space: FiniteSpace = field(repr=False)
    members: frozenset

    def __post_init__(self):
        for y in self.members:
            self.space.check_point(y)
        if not self.space.is_open(self.members):
            raise SpaceError(f"{sorted(self.members)} is not down-closed")

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(p for p in self.space.points if p in self.members)

    def __len__(self):
        return len(self.members)

    def __le__(self, other: "OpenSet"):
        return self.members <= other.members

    def __repr__(self):
        return "{" + ", ".join(map(str, self)) + "}"

    def maximal_points(self):
        return [p for p in self if not any(q != p and self.space.leq(p, q) for q in self.members)]

    def restrict(self, space: FiniteSpace) -> "OpenSet":
        return OpenSet(space, frozenset(p for p in self.members if p in space))


def intersect(U: OpenSet, V: OpenSet) -> OpenSet:
    if U.space != V.space:
        raise SpaceError("open sets live in different spaces")
    return OpenSet(U.space, U.members & V.members)


def union(U: OpenSet, V: OpenSet) -> OpenSet:
    if U.space != V.space:
        raise SpaceError("open sets live in different spaces")
    return OpenSet(U.space, U.members | V.members)


def minimal_open(X: FiniteSpace, x) -> OpenSet:
    return X.minimal_open(x)
