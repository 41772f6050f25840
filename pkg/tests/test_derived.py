"""Derived tensor products, derived intersections, the Tor oracle, DG modules and the cotangent complex."""
import pytest

from dgsheaf import (GF, QQ, DGModuleSheaf, FiniteSpace, PolyRing, PreconditionError, RingedSpace, SpaceError,
                     WindowError, base_change, cotangent_complex, derived_intersection,
                     derived_tensor, intersection_oracle_check, koszul_tor_oracle, one_point_affine_comparison,
                     polynomial_sheaf, quotient, window_acyclic)
from dgsheaf.derived import ClosedSubspaceDatum, closed_support, is_regular_sequence

from cases import INTERSECTION_FIXTURES, intersection_fixture, koszul_ring, plane, sierpinski

EXPECTED = {
    "transverse lines": {0: 1, -1: 0, -2: 0},
    "origin self-intersection": {0: 1, -1: 2, -2: 1},
    "tangential parabola and line": {0: 2, -1: 0, -2: 0},
    "comaximal ideals": {0: 0, -1: 0, -2: 0},
    "line self-intersection": {0: 1, -1: 1, -2: 0},
}


@pytest.mark.parametrize("name", sorted(INTERSECTION_FIXTURES))
def test_intersection_ranks_and_oracle(name):
    X, Y1, Y2 = intersection_fixture(name)
    di = derived_intersection(X, Y1, Y2, 3, "-2:0")
    assert di.report.ranks("pt") == EXPECTED[name]
    assert di.support_ok
    assert intersection_oracle_check(X, Y1, Y2, di, "-2:0").ok


def test_intersection_on_sierpinski_has_smaller_support():
    S = sierpinski()
    O = polynomial_sheaf(S, QQ, ["x"], name="O")
    Y1 = ClosedSubspaceDatum(["x", ("1", S.open_set(["o"]))], "Y1")
    Y2 = ClosedSubspaceDatum(["x"], "Y2")
    assert closed_support(O, Y1.ideal) == {"c"}
    di = derived_intersection(RingedSpace(S, O), Y1, Y2, 2, "-1:0")
    assert di.support == {"c"}
    assert di.support_ok
    assert di.report.ranks("c") == {0: 1, -1: 1}


def test_intersection_needs_classical_structure_sheaf():
    A, kos, target, phi = koszul_ring()
    X = RingedSpace(A.space, kos)
    with pytest.raises(PreconditionError):
        derived_intersection(X, ClosedSubspaceDatum(["x"]), ClosedSubspaceDatum(["x"]), 2, "-1:0")


def test_window_must_fit_q_max():
    X, Y1, Y2 = intersection_fixture("transverse lines")
    with pytest.raises(WindowError):
        derived_intersection(X, Y1, Y2, 1, "-2:0")


def test_one_sided_and_two_sided_tensor_agree():
    X = plane()
    A1 = quotient(X.structure, ["x"], name="A1")
    A2 = quotient(X.structure, ["x"], name="A2")
    two = derived_tensor(A1, A2, 3, "-2:0")
    one = derived_tensor(A1, A2, 3, "-2:0", one_sided=True)
    assert two.report.ranks("pt") == one.report.ranks("pt") == {0: 1, -1: 1, -2: 0}
    # the underived product x=0 (x) x=0 misses Tor_1, so xi is not a quasi-isomorphism
    assert not two.xi_quasi_iso


def test_tor_oracle_methods():
    R = PolyRing(QQ, ["x", "y"])
    x, y = R.gens()
    assert is_regular_sequence(R, [x, y])
    assert not is_regular_sequence(R, [x, x * y])
    regular = koszul_tor_oracle(R, [x], [y], (-2, 0))
    assert regular.method == "koszul" and regular.ranks() == {0: 1, -1: 0, -2: 0}
    general = koszul_tor_oracle(R, [x, x * y], [x], (-2, 0))
    assert general.method != "koszul"


def test_affine_comparison_closes():
    A, kos, target, phi = koszul_ring()
    res = one_point_affine_comparison(phi, 2)
    assert res.ok, res.diagnostics


@pytest.mark.parametrize("field", [QQ, GF(5)])
def test_cotangent_of_double_point(field):
    P = FiniteSpace.point()
    O = quotient(polynomial_sheaf(P, field, ["x"]), ["x^2"], name="O")
    cc = cotangent_complex(RingedSpace(P, O), 3, (-2, 0))
    assert cc.experimental
    assert cc.report.ranks("pt") == {0: 1, -1: 1, -2: 0}


def test_cotangent_of_smooth_line_is_free_in_degree_zero():
    P = FiniteSpace.point()
    cc = cotangent_complex(RingedSpace(P, polynomial_sheaf(P, QQ, ["x"], name="O")), 2, (-1, 0))
    assert cc.report.ranks("pt") == {0: 1, -1: 0}


def test_dg_module_koszul_and_base_change():
    A, kos, target, phi = koszul_ring()
    P = A.space
    # K[x] e0 <- K[x] e1 with D(e1) = x e0: the Koszul module, resolving K[x]/(x)
    M = DGModuleSheaf(A, [("e0", P.whole(), 0), ("e1", P.whole(), -1)], {"e1": {"e0": "x"}}, name="M")
    assert M.check_d_squared() == []
    assert not window_acyclic(M, "-1:0").ok
    cone = DGModuleSheaf(A, [("e0", P.whole(), 0), ("e1", P.whole(), -1)], {"e1": {"e0": "1"}})
    assert window_acyclic(cone, "-2:0").ok
    N = base_change(M, target)
    st_ = N.stalk("pt")
    assert st_.rank(-1) == 1
    with pytest.raises(ValueError):
        base_change(M, quotient(polynomial_sheaf(P, QQ, ["z"]), ["z"]))


def test_dg_module_rejects_bad_degree_and_support():
    S = sierpinski()
    A = polynomial_sheaf(S, QQ, ["x"])
    with pytest.raises(ValueError, match="degree"):
        DGModuleSheaf(A, [("e0", S.whole(), 0), ("e1", S.whole(), -2)], {"e1": {"e0": "x"}})
    with pytest.raises(SpaceError):
        DGModuleSheaf(A, [("e0", S.open_set(["o"]), 0), ("e1", S.whole(), -1)], {"e1": {"e0": "x"}})
