"""DG ring sheaves: structure checks, morphisms, tensor products, restriction, fiber products."""
import pytest

from dgsheaf import (GF, QQ, DGRingSheaf, FiniteSpace, GeneratorSpec, SheafHom, SpaceError, StructureError,
                     check_d_squared, compose, constant_sheaf, extend_derivation, extend_hom, fiber_product,
                     identity, polynomial_sheaf, quotient, restrict_to_open, structure_map, tensor_over_A)
from dgsheaf.dgring import homs_equal, multiplication, restrict_hom, validate_dg
from dgsheaf.pseudofree import PsfRing

from cases import koszul_ring, sierpinski


def test_degree_and_support_checks():
    P = FiniteSpace.point()
    A = polynomial_sheaf(P, QQ, ["x"])
    with pytest.raises(StructureError, match="degree"):
        DGRingSheaf(P, GeneratorSpec([("y", P.whole(), -1)]), {"y": "y"}, base=A)
    with pytest.raises(StructureError, match="unknown"):
        DGRingSheaf(P, GeneratorSpec(), {"q": "x"}, base=A)
    S = sierpinski()
    AS = polynomial_sheaf(S, QQ, ["x"])
    with pytest.raises(SpaceError):
        # u lives only on {o}; using it on the whole space is not local
        DGRingSheaf(S, GeneratorSpec([("u", S.open_set(["o"]), -1), ("w", S.whole(), -2)]), {"w": "u*x"},
                    base=AS)


def test_d_squared_failure_detected():
    P = FiniteSpace.point()
    A = polynomial_sheaf(P, QQ, ["x"])
    R = PsfRing(P, GeneratorSpec([("e", P.whole(), -1), ("f", P.whole(), -2)]), base=A)
    # d(f) = x*e and d(e) = x gives d(d(f)) = x^2 != 0
    B = extend_derivation(R, {"e": "x", "f": "x*e"})
    assert not check_d_squared(B)
    good = extend_derivation(R, {"e": "x", "f": "0"})
    assert validate_dg(good)


def test_relation_not_closed_under_d():
    P = FiniteSpace.point()
    A = polynomial_sheaf(P, QQ, ["x"])
    B = DGRingSheaf(P, GeneratorSpec([("e", P.whole(), -1)]), {"e": "x"}, relations=["x*e"], base=A)
    # d(x e) = x^2, which is not in the ideal (x e)
    assert not validate_dg(B)


def test_morphism_checks_differential_and_relations():
    A, kos, target, phi = koszul_ring()
    assert phi.check()
    with pytest.raises(StructureError):
        SheafHom(kos, A, {"y": 0})     # d(y) = x is not sent to d(0) = 0
    with pytest.raises(StructureError, match="degree"):
        SheafHom(kos, target, {"y": "x"})


def test_composition_and_identity_laws():
    A, kos, target, phi = koszul_ring()
    psi = structure_map(A, kos)
    assert homs_equal(compose(phi, identity(kos)), phi)
    assert homs_equal(compose(identity(target), phi), phi)
    c = compose(phi, psi)
    assert c.check()
    assert homs_equal(c, structure_map(A, target))
    with pytest.raises(StructureError):
        compose(psi, phi)


def test_extend_hom_is_determined_by_generators():
    A, kos, target, phi = koszul_ring()
    again = extend_hom(kos, {"y": 0}, target)
    assert homs_equal(again, phi)
    with pytest.raises(StructureError):
        extend_hom(kos, {"y": 0})


def test_tensor_product_and_multiplication():
    A, kos, target, phi = koszul_ring()
    T = tensor_over_A(kos, kos)
    assert sorted(T.own_ids()) == ["y", "y'"]
    assert T.left_inclusion().check() and T.right_inclusion().check()
    mu = multiplication(T)
    assert mu.check()
    # mu composed with either inclusion is the identity
    assert homs_equal(compose(mu, T.left_inclusion()), identity(kos))
    assert homs_equal(compose(mu, T.right_inclusion()), identity(kos))
    with pytest.raises(StructureError):
        tensor_over_A(kos, constant_sheaf(A.space, QQ))


def test_restriction_to_open_keeps_local_data():
    S = sierpinski()
    AS = polynomial_sheaf(S, QQ, ["x"])
    B = quotient(AS, ["x", ("1", S.open_set(["o"]))])
    Bo = restrict_to_open(B, S.open_set(["o"]))
    assert list(Bo.space) == ["o"]
    assert Bo.stalk("o").is_zero(Bo.algebra("1"))
    f = restrict_hom(structure_map(AS, B), ["o"])
    assert f.check()
    with pytest.raises(SpaceError):
        restrict_to_open(B, FiniteSpace.point().whole())


def test_fiber_product_slices():
    P = FiniteSpace.point()
    A = polynomial_sheaf(P, QQ, ["x"])
    B = quotient(A, ["x^2"])
    pi = structure_map(A, B)
    F = fiber_product(pi, pi)
    # pairs (a, b) with a = b mod x^2 and degree <= 2: spanned by (1,1), (x,x), (x^2,0), (0,x^2), (x^2,x^2)
    assert F.dimension("pt", 0, 2) == 4
    for b0, b1 in F.slice("pt", 0, 2):
        assert F.contains(b0, b1, "pt")
    ident = fiber_product(identity(A), identity(A))
    assert ident.dimension("pt", 0, 3) == 4
    assert all(F.pr0(p) == F.pr1(p) for p in ident.slice("pt", 0, 3))
    zero = quotient(A, ["1"])
    to_zero = structure_map(A, zero)
    assert fiber_product(to_zero, to_zero).dimension("pt", 0, 1) == 4
    with pytest.raises(StructureError):
        fiber_product(pi, identity(A))


def test_prime_field_coefficients():
    P = FiniteSpace.point()
    A = polynomial_sheaf(P, GF(5), ["x"])
    B = quotient(A, ["5*x + x^5 - x"])
    assert B.stalk("pt").is_zero(B.algebra("x^5 - x"))
    assert not B.stalk("pt").is_zero(B.algebra("x"))
