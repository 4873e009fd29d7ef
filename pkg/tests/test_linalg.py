import numpy as np
import pytest

from adqec.channels import ad_qubit_kraus
from adqec.codes import build_family_code
from adqec.errors import NotPSD
from adqec.linalg import (dag, gram_schmidt, is_hermitian, is_psd, is_unitary,
                          ket, kron, largest_eigenvalue_psd,
                          principal_sqrt_psd, pseudo_inverse_sqrt_psd)
from adqec.recovery import standard_recovery


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_psd(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a @ dag(a)


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_basis_bookkeeping():
    lower = np.outer(ket(0, 2), ket(1, 2))  # |0><1|
    out = kron(lower, np.eye(2))
    expected = np.zeros((4, 4))
    expected[0, 2] = expected[1, 3] = 1.0
    assert np.array_equal(out, expected)


def test_kron_damping_operators_hand_expansion():
    # gamma = 0.36: sqrt(gamma) = 0.6, sqrt(1-gamma) = 0.8
    ch = ad_qubit_kraus(0.36)
    out = kron(ch.kraus[0], ch.kraus[1])
    assert out[0, 1] == pytest.approx(0.6, abs=1e-15)
    assert out[2, 3] == pytest.approx(0.48, abs=1e-15)
    assert np.count_nonzero(np.abs(out) > 1e-15) == 2


def test_kron_mixed_product_law():
    rng = np.random.default_rng(11)
    for dim_a, dim_b in [(2, 3), (4, 2), (3, 3)]:
        u, v = random_unitary(rng, dim_a), random_unitary(rng, dim_b)
        a = rng.normal(size=(dim_a, dim_a)) + 1j * rng.normal(size=(dim_a, dim_a))
        b = rng.normal(size=(dim_b, dim_b)) + 1j * rng.normal(size=(dim_b, dim_b))
        m = kron(a, b)
        lhs = kron(u, v) @ m @ dag(kron(u, v))
        rhs = kron(u @ a @ dag(u), v @ b @ dag(v))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_largest_eigenvalue_simple_cases():
    assert largest_eigenvalue_psd(np.diag([0.25, 1.0])) == pytest.approx(1.0)
    assert largest_eigenvalue_psd(np.zeros((3, 3))) == 0.0


def test_largest_eigenvalue_rejects_negative():
    with pytest.raises(NotPSD):
        largest_eigenvalue_psd(np.diag([1.0, -0.5]))
    with pytest.raises(NotPSD):
        largest_eigenvalue_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_normalized_recovery_operator_has_unit_top_eigenvalue():
    plan = standard_recovery(build_family_code(1, 1), 0.5)
    r1 = plan.recovery_ops[1]
    assert largest_eigenvalue_psd(dag(r1) @ r1, tol=1e-9) == pytest.approx(1.0, abs=1e-12)


def test_largest_eigenvalue_matches_power_iteration_and_eigh():
    rng = np.random.default_rng(3)
    for _ in range(25):
        dim = int(rng.integers(2, 65))
        m = random_psd(rng, dim)
        top = largest_eigenvalue_psd(m)
        assert top == pytest.approx(np.linalg.eigvalsh(m)[-1], rel=1e-10)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        for _ in range(400):
            v = m @ v
            v /= np.linalg.norm(v)
        power = float(np.real(np.vdot(v, m @ v)))
        assert abs(power - top) < 1e-9 * max(top, 1.0)


def test_principal_sqrt_simple_cases():
    assert np.allclose(principal_sqrt_psd(np.eye(4)), np.eye(4))
    assert np.allclose(principal_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_principal_sqrt_residual_deficit():
    plan = standard_recovery(build_family_code(1, 1), 0.3)
    r0 = plan.recovery_ops[0]
    deficit = np.eye(8) - dag(r0) @ r0
    root = principal_sqrt_psd(deficit)
    assert is_psd(root, tol=1e-9)
    assert np.max(np.abs(root @ root - deficit)) < 1e-10


def test_principal_sqrt_random_psd_corpus():
    rng = np.random.default_rng(7)
    for _ in range(100):
        dim = int(rng.integers(2, 65))
        m = random_psd(rng, dim)
        s = principal_sqrt_psd(m)
        assert np.max(np.abs(s @ s - m)) < 1e-9 * dim


def test_pseudo_inverse_sqrt_acts_on_support():
    m = np.diag([4.0, 0.0, 9.0])
    inv = pseudo_inverse_sqrt_psd(m)
    assert np.allclose(inv, np.diag([0.5, 0.0, 1.0 / 3.0]))


def test_predicates():
    rng = np.random.default_rng(5)
    u = random_unitary(rng, 6)
    assert is_unitary(u)
    assert not is_unitary(2 * u)
    h = random_psd(rng, 6)
    assert is_hermitian(h)
    assert is_psd(h)
    assert not is_psd(h - np.eye(6) * (np.linalg.eigvalsh(h)[0] + 1.0))


def test_gram_schmidt_discards_dependent_vectors():
    v = np.array([1.0, 1.0, 0.0], dtype=complex)
    basis = gram_schmidt([v, 2 * v, np.array([0.0, 0.0, 3.0])])
    assert basis.shape == (2, 3)
    assert np.allclose(np.conj(basis) @ basis.T, np.eye(2))
