import numpy as np
import pytest

from opalg import (
    FiniteGroup,
    InvalidStateError,
    convolve,
    cyclic_group,
    delta,
    gns_from_group_function,
    group_algebra_action,
    involution,
    irreducible_characters,
    is_positive_definite,
    left_regular_representation,
    orthogonality_check,
    symmetric_group,
)
from opalg.linalg import best_invertible, intertwiner_space

Z2 = cyclic_group(2)
Z3 = cyclic_group(3)
S3 = symmetric_group(3)


def test_group_laws():
    for group in (Z2, Z3, S3, cyclic_group(12)):
        e = group.identity
        for g in range(group.order):
            assert group.mul(e, g) == g == group.mul(g, e)
            assert group.mul(g, group.inv(g)) == e


def test_bad_table_rejected():
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [0, 1]])      # no identity column structure
    with pytest.raises(ValueError):
        FiniteGroup([[1, 0], [1, 0]])


def test_delta_is_convolution_unit():
    rng = np.random.default_rng(51)
    f = rng.normal(size=6) + 1j * rng.normal(size=6)
    unit = delta(S3, S3.identity)
    assert np.max(np.abs(convolve(S3, unit, f) - f)) <= 1e-14
    assert np.max(np.abs(convolve(S3, f, unit) - f)) <= 1e-14


def test_dirac_convolution_composes_group_law():
    for a in range(S3.order):
        for b in range(S3.order):
            conv = convolve(S3, delta(S3, a), delta(S3, b))
            assert np.max(np.abs(conv - delta(S3, S3.mul(a, b)))) == 0.0


def test_convolution_on_z2_example():
    f1 = np.array([1.0, 1.0], dtype=complex)
    f2 = np.array([1.0, -1.0], dtype=complex)
    assert np.max(np.abs(convolve(Z2, f1, f2))) == 0.0


def test_function_length_mismatch_rejected():
    from opalg import ShapeMismatchError

    with pytest.raises(ShapeMismatchError):
        convolve(Z3, np.ones(2), np.ones(3))
    with pytest.raises(ShapeMismatchError):
        gns_from_group_function(Z2, np.ones(3))


def test_convolution_associative_random():
    rng = np.random.default_rng(52)
    for _ in range(10):
        f, g, h = (rng.normal(size=6) + 1j * rng.normal(size=6) for _ in range(3))
        lhs = convolve(S3, convolve(S3, f, g), h)
        rhs = convolve(S3, f, convolve(S3, g, h))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_involution_is_isometric_antilinear():
    rng = np.random.default_rng(53)
    f = rng.normal(size=3) + 1j * rng.normal(size=3)
    g = involution(Z3, involution(Z3, f))
    assert np.max(np.abs(f - g)) == 0.0


def test_positive_definite_examples():
    assert is_positive_definite(Z3, np.ones(3))
    assert is_positive_definite(Z3, delta(Z3, 0))
    omega = np.exp(2j * np.pi * np.arange(3) / 3)
    assert is_positive_definite(Z3, omega)
    # circulant oracle: eigenvalues of the kernel of omega^k are {3, 0, 0}
    from opalg.groups import pd_kernel
    lam = np.linalg.eigvalsh(pd_kernel(Z3, omega))
    assert np.allclose(sorted(lam.real), [0.0, 0.0, 3.0], atol=1e-12)
    # a Dirac mass off the identity is not positive-definite
    assert not is_positive_definite(Z2, delta(Z2, 1))


def test_gns_from_delta_is_regular_representation():
    rep = gns_from_group_function(Z2, delta(Z2, 0))
    assert rep.carrier_dim == 2
    assert np.max(np.abs(rep.reconstruction() - delta(Z2, 0))) <= 1e-12


def test_gns_one_dimensional_characters_of_z2():
    trivial = gns_from_group_function(Z2, np.ones(2))
    assert trivial.carrier_dim == 1
    assert trivial.matrices[1][0, 0] == pytest.approx(1.0, abs=1e-12)
    sign = gns_from_group_function(Z2, np.array([1.0, -1.0]))
    assert sign.carrier_dim == 1
    assert sign.matrices[1][0, 0] == pytest.approx(-1.0, abs=1e-12)


def test_gns_rejects_non_positive_definite():
    with pytest.raises(InvalidStateError):
        gns_from_group_function(Z2, delta(Z2, 1))


def test_gns_representation_is_unitary_homomorphism():
    rng = np.random.default_rng(54)
    # random positive-definite function from a vector form of the regular rep
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    reg = left_regular_representation(S3)
    psi = np.array([np.vdot(v, m @ v) for m in reg.matrices])
    assert is_positive_definite(S3, psi)
    rep = gns_from_group_function(S3, psi)
    d = rep.carrier_dim
    for g in range(S3.order):
        assert np.max(np.abs(rep.matrices[g] @ rep.matrices[g].conj().T - np.eye(d))) <= 1e-12
        for h in range(S3.order):
            prod = rep.matrices[g] @ rep.matrices[h]
            assert np.max(np.abs(prod - rep.matrices[S3.mul(g, h)])) <= 1e-12
    assert np.max(np.abs(rep.reconstruction() - psi)) <= 1e-9


def test_pd_bound_by_identity_value():
    rng = np.random.default_rng(55)
    reg = left_regular_representation(S3)
    for _ in range(20):
        v = rng.normal(size=6) + 1j * rng.normal(size=6)
        psi = np.array([np.vdot(v, m @ v) for m in reg.matrices])
        assert np.all(np.abs(psi) <= psi[S3.identity].real + 1e-12)


def test_group_algebra_action_examples():
    reg = left_regular_representation(Z2)
    assert np.array_equal(group_algebra_action(reg, delta(Z2, 0)), np.eye(2))
    sign = gns_from_group_function(Z2, np.array([1.0, -1.0]))
    uniform = np.ones(2)
    assert np.max(np.abs(group_algebra_action(sign, uniform))) <= 1e-14


def test_group_algebra_action_is_convolution_homomorphism():
    rng = np.random.default_rng(56)
    rep = left_regular_representation(Z3)
    for _ in range(10):
        f1 = rng.normal(size=3) + 1j * rng.normal(size=3)
        f2 = rng.normal(size=3) + 1j * rng.normal(size=3)
        lhs = group_algebra_action(rep, convolve(Z3, f1, f2))
        rhs = group_algebra_action(rep, f1) @ group_algebra_action(rep, f2)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_orthogonality_examples():
    report = orthogonality_check(Z2, np.ones(2), np.array([1.0, -1.0]))
    assert abs(report.inner_sum) == 0.0
    assert report.convolution_max == 0.0
    same = orthogonality_check(Z2, np.ones(2), np.ones(2))
    assert same.inner_sum == pytest.approx(2.0, abs=1e-14)
    omega = np.exp(2j * np.pi * np.arange(3) / 3)
    cross = orthogonality_check(Z3, np.ones(3), omega)
    assert abs(cross.inner_sum) <= 1e-12


def test_character_tables():
    for group, count in ((Z2, 2), (Z3, 3), (S3, 3)):
        chars = irreducible_characters(group)
        assert len(chars) == count
        for psi in chars:
            assert is_positive_definite(group, psi)
        for i in range(count):
            for j in range(i + 1, count):
                report = orthogonality_check(group, chars[i], chars[j])
                assert abs(report.inner_sum) <= 1e-12
                assert report.convolution_max <= 1e-12


def test_character_reconstruction():
    for group in (Z2, Z3, S3):
        for psi in irreducible_characters(group):
            rep = gns_from_group_function(group, psi)
            assert np.max(np.abs(rep.reconstruction() - psi)) <= 1e-9


def test_delta_gns_equivalent_to_left_regular():
    for group in (Z2, Z3, S3):
        from_delta = gns_from_group_function(group, delta(group, group.identity))
        direct = left_regular_representation(group)
        assert from_delta.carrier_dim == direct.carrier_dim
        space = intertwiner_space(from_delta.matrices, direct.matrices)
        gamma, ratio = best_invertible(space)
        assert gamma is not None
        gamma_inv = np.linalg.inv(gamma)
        worst = max(
            float(np.max(np.abs(gamma @ p @ gamma_inv - q)))
            for p, q in zip(from_delta.matrices, direct.matrices)
        )
        assert worst <= 1e-8
