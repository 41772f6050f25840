"""Resolutions, certificates, factorizations, Ore squares and homotopy witnesses."""
import pytest

from dgsheaf import (QQ, GF, DGRingSheaf, FactorizationError, FiniteSpace, GeneratorSpec, HomotopyWitness,
                     PreconditionError, SheafHom, certify, check_homotopy_witness, check_quasi_homotopy_witness,
                     factorize, identity, is_quasi_iso, ore_square, polynomial_sheaf, quotient, resolve,
                     structure_map, tensor_over_A)
from dgsheaf.resolution import delete_generator, lift_through

from cases import koszul_ring, resolution_targets


@pytest.mark.parametrize("label,B", resolution_targets(QQ)[:5])
def test_resolutions_certify(label, B):
    stage = resolve(B, 2)
    assert stage.certificate.ok, stage.certificate.failures()
    assert certify(stage).ok
    assert all(row["degree"] <= 0 for row in stage.generators_table())


def test_resolution_over_prime_field_and_seed_determinism():
    _, B = resolution_targets(GF(3))[4]
    a = resolve(B, 2, seed=7)
    b = resolve(B, 2, seed=7)
    assert a.generators_table() == b.generators_table()
    assert a.certificate.ok


def test_deleting_a_needed_generator_breaks_the_certificate():
    _, B = resolution_targets(QQ)[2]      # (x, y) on a point
    stage = resolve(B, 2)
    for gid in stage.ring.spec.ids():
        assert not certify(delete_generator(stage, gid)).ok, gid


def test_factorize_a_quasi_iso():
    A, kos, target, phi = koszul_ring()
    fac = factorize(phi, "-2:0")
    assert fac.retraction_ok()
    assert is_quasi_iso(fac.phi_plus, "-2:0")
    assert fac.eta.check() and fac.eps.check() and fac.phi_plus.check()


def test_factorize_rejects_non_quasi_iso():
    A, kos, target, phi = koszul_ring()
    with pytest.raises(FactorizationError):
        factorize(structure_map(A, target), "-1:0")


def test_ore_square_commutes():
    A, kos, target, phi = koszul_ring()
    sq = ore_square(phi, identity(target), 2)
    assert sq.closes, sq.mismatches
    with pytest.raises(PreconditionError):
        ore_square(structure_map(A, target), identity(target), 2)


def test_lift_through_needs_surjectivity():
    A, kos, target, phi = koszul_ring()
    stage = resolve(target, 2)
    psi = lift_through(phi, stage.phi)
    assert psi.check()


def cylinder(field=QQ):
    """B = K[x]; B+ = K[x, x'][s; ds = x - x'] is a path object for B."""
    P = FiniteSpace.point()
    B = polynomial_sheaf(P, field, ["x"], name="B")
    T = tensor_over_A(B, B)
    Bplus = DGRingSheaf(P, GeneratorSpec([("s", P.whole(), -1)]), {"s": "x - x'"}, base=T, name="B+")
    eta = structure_map(T, Bplus)
    eps = SheafHom(Bplus, B, {"x": "x", "x'": "x", "s": 0})
    return B, T, Bplus, eta, eps


def test_homotopy_witness_accepted():
    B, T, Bplus, eta, eps = cylinder()
    C = quotient(B, ["x"], name="C")
    p = structure_map(B, C)
    phi = SheafHom(Bplus, C, {"x": 0, "x'": 0, "s": 0})
    res = check_homotopy_witness(HomotopyWitness(Bplus, eta, eps, phi), p, p, "-1:0")
    assert res.ok, res.diagnostics
    res = check_quasi_homotopy_witness(identity(B), HomotopyWitness(Bplus, eta, eps, phi), p, p, "-1:0")
    assert res.ok


def test_homotopy_witness_without_path_object_rejected():
    B, T, Bplus, eta, eps = cylinder()
    C = quotient(B, ["x"], name="C")
    p = structure_map(B, C)
    mu = SheafHom(T, B, {"x'": "x"})
    flat = HomotopyWitness(T, identity(T), mu, SheafHom(T, C, {"x": 0, "x'": 0}))
    res = check_homotopy_witness(flat, p, p, "-1:0")
    assert not res.ok
    assert res.diagnostics[0][0] == "eps is not a quasi-isomorphism"
