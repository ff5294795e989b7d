import math

import numpy as np
import pytest

from conftest import CIRCULANT_MATRIX, CIRCULANT_MI_NATS
from privsig.prob import (
    FiniteSpace,
    JointPXZW,
    Pmf2,
    _mutual_information,
    entropy,
    marginal,
    mutual_information,
    nats_to_bits,
    validate_joint,
)


def mi_oracle(matrix) -> float:
    """Term-by-term mutual information in pure Python."""
    arr = [[float(v) for v in row] for row in matrix]
    rows = [sum(r) for r in arr]
    cols = [sum(r[j] for r in arr) for j in range(len(arr[0]))]
    total = 0.0
    for i, r in enumerate(arr):
        for j, v in enumerate(r):
            if v > 0.0:
                total += v * math.log(v / (rows[i] * cols[j]))
    return total


def test_finite_space_validation():
    FiniteSpace(3)
    FiniteSpace(2, ("a", "b"))
    with pytest.raises(ValueError):
        FiniteSpace(0)
    with pytest.raises(ValueError):
        FiniteSpace(2, ("a",))
    with pytest.raises(ValueError):
        FiniteSpace(2, ("a", "a"))
    with pytest.raises(ValueError):
        FiniteSpace(65)


def test_frozen_reference_value_matches_oracle():
    assert abs(mi_oracle(CIRCULANT_MATRIX) - CIRCULANT_MI_NATS) < 1e-14


def test_validate_joint_accepts_lifted_circulant():
    j = JointPXZW.from_xw_matrix(CIRCULANT_MATRIX)
    assert validate_joint(j) == []


def test_validate_joint_accepts_uniform():
    p = np.full((3, 3, 2), 1.0 / 18.0)
    s3, s2 = FiniteSpace(3), FiniteSpace(2)
    assert validate_joint(p, s3, s3, s2) == []


def test_validate_joint_flags_out_of_range_entry():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.5
    p[1, 1, 1] = -0.5
    s = FiniteSpace(2)
    problems = validate_joint(p, s, s, s)
    assert any("out of range" in msg for msg in problems)


def test_validate_joint_flags_normalization():
    p = np.full((2, 2, 2), 0.9 / 8.0)
    s = FiniteSpace(2)
    problems = validate_joint(p, s, s, s)
    assert any("normalization" in msg for msg in problems)


def test_validate_joint_flags_shape():
    s = FiniteSpace(2)
    problems = validate_joint(np.full((2, 2), 0.25), s, s, s)
    assert any("shape" in msg for msg in problems)


def test_joint_renormalizes_small_deviation_with_warning():
    p = np.full((2, 2, 2), 1.0 / 8.0)
    p[0, 0, 0] += 3e-10
    with pytest.warns(UserWarning, match="renormalizing"):
        j = JointPXZW.from_tensor(p)
    assert abs(float(j.p.sum()) - 1.0) < 1e-15


def test_joint_rejects_large_deviation():
    p = np.full((2, 2, 2), 1.0 / 8.0)
    p[0, 0, 0] += 1e-6
    with pytest.raises(ValueError, match="normalization"):
        JointPXZW.from_tensor(p)


def test_joint_requires_matching_measurement_axis():
    with pytest.raises(ValueError):
        JointPXZW.from_tensor(np.full((2, 3, 2), 1.0 / 12.0))


def test_marginal_of_circulant_state_axis():
    j = JointPXZW.from_xw_matrix(CIRCULANT_MATRIX)
    # direct-summation oracle: each row of the matrix sums to 0.2
    np.testing.assert_allclose(marginal(j, "x"), np.full(5, 0.2), atol=1e-15)
    np.testing.assert_allclose(marginal(j, "w"), np.full(5, 0.2), atol=1e-15)


def test_marginal_keep_all_axes_is_identity():
    j = JointPXZW.from_xw_matrix(CIRCULANT_MATRIX)
    np.testing.assert_array_equal(marginal(j, ("x", "z", "w")), j.p)


def test_marginal_of_point_mass():
    p = np.zeros((2, 2, 3))
    p[1, 1, 2] = 1.0
    j = JointPXZW.from_tensor(p)
    np.testing.assert_array_equal(marginal(j, "w"), [0.0, 0.0, 1.0])


def test_marginal_rejects_bad_axes():
    j = JointPXZW.from_xw_matrix(CIRCULANT_MATRIX)
    with pytest.raises(ValueError):
        marginal(j, ())
    with pytest.raises(ValueError):
        marginal(j, ["q"])
    with pytest.raises(ValueError):
        marginal(j, ["x", "x"])


def test_marginal_is_linear(rng):
    pa = rng.random((3, 3, 2))
    pa /= pa.sum()
    pb = rng.random((3, 3, 2))
    pb /= pb.sum()
    lam = 0.3
    mixed = JointPXZW.from_tensor(lam * pa + (1 - lam) * pb)
    ja, jb = JointPXZW.from_tensor(pa), JointPXZW.from_tensor(pb)
    for keep in ("x", "zw", ("x", "w")):
        np.testing.assert_allclose(
            marginal(mixed, keep),
            lam * marginal(ja, keep) + (1 - lam) * marginal(jb, keep),
            atol=1e-12,
        )


def test_mutual_information_of_product_is_zero():
    assert mutual_information(Pmf2.from_matrix(np.full((2, 2), 0.25))) == 0.0


def test_mutual_information_perfect_correlation():
    val = mutual_information(Pmf2.from_matrix(np.diag([0.5, 0.5])))
    assert abs(val - math.log(2.0)) < 1e-15


def test_mutual_information_circulant_matches_oracle():
    val = mutual_information(Pmf2.from_matrix(CIRCULANT_MATRIX))
    assert abs(val - mi_oracle(CIRCULANT_MATRIX)) < 1e-13
    assert abs(val - CIRCULANT_MI_NATS) < 1e-13


def test_mutual_information_symmetry_and_nonnegativity(rng):
    for _ in range(1000):
        shape = (int(rng.integers(2, 5)), int(rng.integers(2, 5)))
        p = rng.random(shape) ** 3
        p /= p.sum()
        there = mutual_information(Pmf2.from_matrix(p))
        back = mutual_information(Pmf2.from_matrix(p.T))
        assert there >= 0.0
        assert abs(there - back) < 1e-12


def test_mutual_information_of_own_marginal_product(rng):
    for _ in range(20):
        p = rng.random((4, 3))
        p /= p.sum()
        prod = np.outer(p.sum(axis=1), p.sum(axis=0))
        assert mutual_information(Pmf2.from_matrix(prod)) <= 1e-12


def test_mutual_information_rejects_inconsistent_joint():
    # positive mass under a zero row marginal needs a negative entry, which
    # Pmf2 never admits; the raw worker still guards against it
    bad = np.array([[0.5, -0.5], [0.5, 0.5]])
    with pytest.raises(ValueError, match="inconsistent"):
        _mutual_information(bad)


def test_pmf2_validation():
    with pytest.raises(ValueError):
        Pmf2.from_matrix(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        Pmf2(FiniteSpace(2), FiniteSpace(3), np.full((2, 2), 0.25))
    with pytest.raises(ValueError, match="negative"):
        Pmf2.from_matrix(np.array([[0.6, -0.1], [0.25, 0.25]]))


def test_entropy():
    assert entropy(np.array([1.0, 0.0])) == 0.0
    assert abs(entropy(np.full(4, 0.25)) - math.log(4.0)) < 1e-15


def test_nats_to_bits():
    assert abs(nats_to_bits(math.log(2.0)) - 1.0) < 1e-15
