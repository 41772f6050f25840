"""Derived self-intersections and transverse intersections in the affine plane.

Each intersection is computed twice: once by resolving both quotients and
tensoring, once by a Koszul/syzygy computation of Tor that never touches the
DG machinery.  The two must agree as modules, not just in dimension.
"""
from dgsheaf import QQ, FiniteSpace, RingedSpace, derived_intersection, intersection_oracle_check, polynomial_sheaf
from dgsheaf.derived import ClosedSubspaceDatum

X = FiniteSpace.point()
plane = RingedSpace(X, polynomial_sheaf(X, QQ, ["x", "y"], name="O"))

cases = {
    "two coordinate axes": (["x"], ["y"]),
    "origin with itself": (["x", "y"], ["x", "y"]),
    "parabola tangent to a line": (["y - x^2"], ["y"]),
    "disjoint parallel lines": (["x"], ["x - 1"]),
    "a line with itself": (["x"], ["x"]),
}

for label, (i1, i2) in cases.items():
    Y1, Y2 = ClosedSubspaceDatum(i1, "Y1"), ClosedSubspaceDatum(i2, "Y2")
    di = derived_intersection(plane, Y1, Y2, 4, "-3:0")
    check = intersection_oracle_check(plane, Y1, Y2, di, "-3:0")
    ranks = di.report.ranks("pt")
    dims = {n: e.dimension for n, e in di.report.entries["pt"].items()}
    print(f"{label:<28} ranks {[ranks[n] for n in (0, -1, -2, -3)]}  "
          f"dims {[dims[n] if dims[n] is not None else 'inf' for n in (0, -1, -2, -3)]}  "
          f"oracle {'agrees' if check.ok else 'DISAGREES'}")
