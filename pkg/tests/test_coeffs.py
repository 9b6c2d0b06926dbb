import numpy as np
import pytest
from hypothesis import given, strategies as st

from cascade_ec.coeffs import (cauchy_array, combination_coefficients, default_points, identity_residuals,
                               verify_cascade)
from cascade_ec.construct import layout_for
from cascade_ec.errors import DistinctnessViolated, InvalidSpec, NotApplicable
from cascade_ec.gf import carryless_mul


def slow_inv(x, w=8):
    return next(y for y in range(1, 1 << w) if carryless_mul(x, y, w) == 1)


def test_cauchy_entries_match_definition():
    a, b = default_points(6, 2)
    arr = cauchy_array(a, b)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            assert int(arr[i, j]) == slow_inv(ai ^ bj)


def test_distinct_points_required():
    with pytest.raises(DistinctnessViolated):
        cauchy_array([0, 1, 2], [2, 3])
    with pytest.raises(DistinctnessViolated):
        combination_coefficients([0, 0], [1, 2])


def test_single_global_rejected():
    with pytest.raises(InvalidSpec):
        combination_coefficients([0, 1], [2])


@pytest.mark.parametrize("k", [4, 6, 12, 16, 20, 24, 48, 72, 96])
@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_identity_residuals_vanish(k, r):
    a, b = default_points(k, r)
    assert identity_residuals(a, b) == [0] * k


@pytest.mark.parametrize("k,r", [(6, 2), (16, 3), (48, 4), (96, 5)])
def test_last_global_equals_weighted_sum(k, r):
    """Check G_r = sum gamma_i D_i + sum eta_j G_j column by column with slow arithmetic."""
    a, b = default_points(k, r)
    cc = combination_coefficients(a, b)
    assert all(c != 0 for c in cc.gamma + cc.eta)
    for i, ai in enumerate(a):
        col = [slow_inv(ai ^ bj) for bj in b]  # G_j's coefficient on D_i
        acc = cc.gamma[i]
        for j in range(r - 1):
            acc ^= carryless_mul(cc.eta[j], col[j], 8)
        assert acc == col[r - 1]


@given(st.integers(2, 40), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_weighted_sum_on_random_data(k, r, seed):
    from cascade_ec.gf import field
    gf = field(8)
    a, b = default_points(k, r)
    cc = combination_coefficients(a, b)
    alpha = cauchy_array(a, b)
    rng = np.random.default_rng(seed)
    data = [rng.integers(0, 256, 16, dtype=np.uint8) for _ in range(k)]
    parity = [gf.combine(alpha[:, j], data) for j in range(r)]
    rebuilt = gf.combine(list(cc.gamma) + list(cc.eta), data + parity[:r - 1])
    assert np.array_equal(rebuilt, parity[r - 1])


@pytest.mark.parametrize("scheme", ["cp-azure", "cp-uniform"])
def test_cascade_holds_for_cp_layouts(scheme):
    for k, r, p in [(6, 2, 2), (16, 3, 2), (20, 3, 5), (96, 5, 4), (10, 1, 2)]:
        assert verify_cascade(layout_for(scheme, k, r, p))


def test_cascade_not_applicable_for_plain_lrc():
    with pytest.raises(NotApplicable):
        verify_cascade(layout_for("azure", 6, 2, 2))
