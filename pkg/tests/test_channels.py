import math

import numpy as np
import pytest

from adqec.channels import (ad_code_channel, ad_qubit_kraus, ad_qudit_kraus,
                            apply_channel, tensor_channel, truncate_to_order)
from adqec.errors import DimensionCap, OutOfRange, ShapeMismatch
from adqec.linalg import dag


def test_qubit_kraus_endpoints():
    ch = ad_qubit_kraus(0.0)
    assert np.array_equal(ch.kraus[0], np.eye(2))
    assert np.array_equal(ch.kraus[1], np.zeros((2, 2)))
    ch = ad_qubit_kraus(1.0)
    assert np.array_equal(ch.kraus[0], np.diag([1.0, 0.0]))
    assert np.array_equal(ch.kraus[1], np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_qubit_kraus_values():
    ch = ad_qubit_kraus(0.2)
    assert np.allclose(ch.kraus[0], np.diag([1.0, math.sqrt(0.8)]))
    assert ch.kraus[1][0, 1] == pytest.approx(math.sqrt(0.2))


def test_qubit_kraus_range_check():
    for bad in (-0.1, 1.1):
        with pytest.raises(OutOfRange):
            ad_qubit_kraus(bad)


def test_qudit_reduces_to_qubit():
    for gamma in (0.0, 0.3, 1.0):
        q2 = ad_qudit_kraus(2, gamma)
        qb = ad_qubit_kraus(gamma)
        for a, b in zip(q2.kraus, qb.kraus):
            assert np.allclose(a, b)


def test_qutrit_single_damping_operator():
    gamma = 0.37
    a1 = ad_qudit_kraus(3, gamma).kraus[1]
    expected = math.sqrt(gamma) * np.array(
        [[0.0, 1.0, 0.0],
         [0.0, 0.0, math.sqrt(2.0) * math.sqrt(1.0 - gamma)],
         [0.0, 0.0, 0.0]])
    assert np.allclose(a1, expected, atol=1e-15)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("gamma", [0.0, 0.01, 0.1, 0.5, 0.9, 1.0])
def test_completeness_sweep(q, gamma):
    ch = ad_qudit_kraus(q, gamma)
    assert np.max(np.abs(ch.completeness_matrix() - np.eye(q))) < 1e-12


def test_tensor_channel_three_qubits():
    ch, grouping = tensor_channel(ad_qubit_kraus(0.2), 3)
    assert len(ch) == 8
    assert grouping.eta == [1, 3, 3, 1]
    assert ch.labels[0] == (0, 0, 0)
    # order-a group sizes are C(n, a)
    for a in grouping.orders:
        assert len(grouping.members[a]) == math.comb(3, a)


def test_tensor_channel_single_site_is_base():
    base = ad_qubit_kraus(0.3)
    ch, grouping = tensor_channel(base, 1)
    for a, b in zip(ch.kraus, base.kraus):
        assert np.array_equal(a, b)
    assert grouping.eta == [1, 1]


def test_tensor_channel_two_qutrits_group_sizes():
    # coefficients of (1 + x + x^2)^2 = 1 + 2x + 3x^2 + 2x^3 + x^4
    _, grouping = tensor_channel(ad_qudit_kraus(3, 0.1), 2)
    assert grouping.eta == [1, 2, 3, 2, 1]


def test_dimension_cap():
    with pytest.raises(DimensionCap):
        tensor_channel(ad_qubit_kraus(0.1), 13)
    ch, _ = tensor_channel(ad_qubit_kraus(0.1), 13, cap=2 ** 13)
    assert ch.dim_in == 2 ** 13


def test_apply_identity_channel():
    ch, _ = tensor_channel(ad_qubit_kraus(0.0), 2)
    rho = np.diag([0.5, 0.25, 0.25, 0.0]).astype(complex)
    assert np.allclose(apply_channel(ch, rho), rho)


def test_apply_damping_on_excited_state():
    gamma = 0.4
    ch = ad_qubit_kraus(gamma)
    out = apply_channel(ch, np.diag([0.0, 1.0]).astype(complex))
    assert np.allclose(out, np.diag([gamma, 1.0 - gamma]))


def test_apply_damping_on_plus_state():
    gamma = 0.4
    ch = ad_qubit_kraus(gamma)
    plus = np.full((2, 2), 0.5, dtype=complex)
    out = apply_channel(ch, plus)
    assert out[0, 1] == pytest.approx(math.sqrt(1.0 - gamma) / 2.0)
    assert out[1, 0] == pytest.approx(math.sqrt(1.0 - gamma) / 2.0)


def test_apply_shape_mismatch():
    ch = ad_qubit_kraus(0.1)
    with pytest.raises(ShapeMismatch):
        apply_channel(ch, np.eye(3))


def test_apply_preserves_positivity_on_random_states():
    rng = np.random.default_rng(2)
    ch, _ = tensor_channel(ad_qubit_kraus(0.23), 3)
    for _ in range(20):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = a @ dag(a)
        rho /= np.trace(rho)
        out = apply_channel(ch, rho)
        assert np.max(np.abs(out - dag(out))) < 1e-12
        assert np.linalg.eigvalsh(out)[0] > -1e-10
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)


def test_truncation_full_order_keeps_everything():
    ch, grouping = tensor_channel(ad_qubit_kraus(0.15), 3)
    kept, kept_grouping = truncate_to_order(ch, grouping, 3)
    assert len(kept) == len(ch)
    assert kept_grouping.eta == grouping.eta


def test_truncation_to_zeroth_order():
    ch, grouping = tensor_channel(ad_qubit_kraus(0.15), 3)
    kept, _ = truncate_to_order(ch, grouping, 0)
    assert len(kept) == 1
    assert kept.labels[0] == (0, 0, 0)


def test_truncation_is_trace_non_increasing():
    ch, grouping = tensor_channel(ad_qubit_kraus(0.15), 3)
    kept, kept_grouping = truncate_to_order(ch, grouping, 1)
    assert len(kept) == 4
    assert kept_grouping.eta == [1, 3]
    total = kept.completeness_matrix()
    assert np.linalg.eigvalsh(total)[-1] <= 1.0 + 1e-10


def test_ad_code_channel_wrapper():
    full, grouping = ad_code_channel(2, 3, 0.2)
    assert len(full) == 8 and grouping.eta == [1, 3, 3, 1]
    trunc, tg = ad_code_channel(2, 3, 0.2, t=1)
    assert len(trunc) == 4 and tg.eta == [1, 3]
    qutrit, qg = ad_code_channel(3, 2, 0.2, t=1)
    assert len(qutrit) == 3 and qg.eta == [1, 2]
