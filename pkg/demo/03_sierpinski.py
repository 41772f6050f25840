"""A structure sheaf on the two-point Sierpinski space.

The open point o sees the generic behaviour, the closed point c the special
one.  Here the relation x = 1 holds only near o, so the subspace x = 0 is
supported at c alone and the derived intersection lives there.
"""
from dgsheaf import QQ, FiniteSpace, RingedSpace, cohomology, derived_intersection, polynomial_sheaf, quotient
from dgsheaf.derived import ClosedSubspaceDatum, closed_support

S = FiniteSpace.sierpinski()
O = polynomial_sheaf(S, QQ, ["x"], name="O")
print("open sets:", [sorted(U.members) for U in S.open_sets()])

B = quotient(O, ["x^2", ("x", S.open_set(["o"]))], name="B")
rep = cohomology(B, "0:0")
print("H^0 of K[x]/(x^2), with x killed near o:")
for line in rep.summary_lines():
    print(line)
print("restriction c -> o in degree 0:", rep.restrictions[("c", "o")][0])

Y1 = ClosedSubspaceDatum(["x", ("1", S.open_set(["o"]))], "Y1")
Y2 = ClosedSubspaceDatum(["x"], "Y2")
print("\nsupport of Y1:", sorted(closed_support(O, Y1.ideal)))
di = derived_intersection(RingedSpace(S, O), Y1, Y2, 2, "-1:0")
print("derived intersection support:", sorted(di.support), "vanishes elsewhere:", di.support_ok)
for line in di.report.summary_lines():
    print(line)
