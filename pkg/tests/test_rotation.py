import numpy as np
import pytest

from patchrot import projective
from patchrot.rotation import (
    PatchRotation,
    UnitQuaternion,
    geodesic_distance,
    hamilton,
    orthogonality_defect,
    patch_to_matrix,
    patch_to_quat,
    quat_exp_body,
    quat_to_matrix,
    quat_to_patch,
    random_unit_quaternions,
    skew,
)

R2 = np.sqrt(2.0) / 2.0
RX90 = np.array([[1.0, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])


def test_skew_examples():
    np.testing.assert_array_equal(skew([0, 0, 0]), np.zeros((3, 3)))
    np.testing.assert_array_equal(skew([1, 2, 3]), [[0, -3, 2], [3, 0, -1], [-2, 1, 0]])
    np.testing.assert_array_equal(skew([1, 0, 0]) @ [0, 1, 0], [0, 0, 1])


def test_skew_is_cross_product(rng):
    a, b = rng.standard_normal((2, 100, 3))
    np.testing.assert_allclose(np.einsum("nij,nj->ni", skew(a), b), np.cross(a, b), atol=1e-14)


@pytest.mark.parametrize(
    "q, expected",
    [
        ([1, 0, 0, 0], np.eye(3)),
        ([R2, R2, 0, 0], RX90),
        ([0, 0, 0, 1], np.diag([-1.0, -1.0, 1.0])),
    ],
)
def test_quat_to_matrix_examples(q, expected):
    np.testing.assert_allclose(quat_to_matrix(q), expected, atol=1e-15)


def test_quat_to_matrix_is_rotation(rng):
    q = random_unit_quaternions(rng, 1000)
    r = quat_to_matrix(q)
    assert np.max(orthogonality_defect(r)) <= 1e-12
    assert np.all(np.linalg.det(r) > 0)


def test_double_cover_exact(rng):
    q = random_unit_quaternions(rng, 1000)
    np.testing.assert_array_equal(quat_to_matrix(q), quat_to_matrix(-q))


@pytest.mark.parametrize(
    "i, x, expected",
    [
        (0, [0, 0, 0], [1, 0, 0, 0]),
        (0, [1, 0, 0], [R2, R2, 0, 0]),
        (2, [0, 0, 1], [0, 0, R2, R2]),
    ],
)
def test_patch_to_quat_examples(i, x, expected):
    np.testing.assert_allclose(patch_to_quat(i, x), expected, atol=1e-16)


def test_patch_to_quat_positive_in_patch_slot(rng):
    for i in range(4):
        q = patch_to_quat(i, rng.uniform(-5, 5, (200, 3)))
        assert np.all(q[:, i] > 0)
        np.testing.assert_allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-15)


def test_quat_to_patch_examples():
    i, x = quat_to_patch([1, 0, 0, 0])
    assert i == 0 and x.tolist() == [0, 0, 0]
    i, x = quat_to_patch([-1, 0, 0, 0])
    assert i == 0 and np.all(x == 0)
    q = np.array([0.1, 0.2, -0.9, 0.3])
    i, x = quat_to_patch(q / np.linalg.norm(q))
    assert i == 2
    np.testing.assert_allclose(x, [-1 / 9, -2 / 9, -1 / 3], rtol=1e-15)


def test_quat_to_patch_antipodal_and_bounded(rng):
    for q in random_unit_quaternions(rng, 500):
        i, x = quat_to_patch(q)
        j, y = quat_to_patch(-q)
        assert i == j
        np.testing.assert_array_equal(x, y)
        assert np.max(np.abs(x)) <= 1.0


@pytest.mark.parametrize(
    "i, x, expected",
    [
        (0, [0, 0, 0], np.eye(3)),
        (0, [1, 0, 0], RX90),
        (3, [0, 0, 0], np.diag([-1.0, -1.0, 1.0])),
    ],
)
def test_patch_to_matrix_examples(i, x, expected):
    np.testing.assert_allclose(patch_to_matrix(i, x), expected, atol=1e-15)


def test_patch_to_quat_round_trip_same_patch(rng):
    for i in range(4):
        x = rng.uniform(-2, 2, (250, 3))
        q = patch_to_quat(i, x)
        back = np.array([projective.to_patch(qk, i) for qk in q])
        np.testing.assert_allclose(back, x, rtol=0, atol=1e-13)


@pytest.mark.parametrize(
    "q, p, expected",
    [
        ([0, 1, 0, 0], [0, 1, 0, 0], [-1, 0, 0, 0]),
        ([0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]),
        ([0, 0, 1, 0], [0, 0, 0, 1], [0, 1, 0, 0]),
    ],
)
def test_hamilton_units(q, p, expected):
    np.testing.assert_array_equal(hamilton(q, p), expected)


def test_hamilton_identity(rng):
    p = rng.standard_normal(4)
    np.testing.assert_array_equal(hamilton([1, 0, 0, 0], p), p)


@pytest.mark.parametrize(
    "omega, t, expected",
    [
        ([0, 0, 0], 1.0, [1, 0, 0, 0]),
        ([0, 0, np.pi], 1.0, [0, 0, 0, 1]),
        ([np.pi, 0, 0], 0.5, [R2, R2, 0, 0]),
    ],
)
def test_quat_exp_body_examples(omega, t, expected):
    np.testing.assert_allclose(quat_exp_body(omega, t), expected, atol=1e-15)


def test_quat_exp_body_small_angle_series():
    q = quat_exp_body([1e-12, 0, 0], 1.0)
    np.testing.assert_allclose(q, [1, 5e-13, 0, 0], rtol=1e-12)
    assert np.all(np.isfinite(quat_exp_body([0, 0, 0], np.array([0.0, 1.0]))))


@pytest.mark.parametrize(
    "q1, q2, expected",
    [
        ([R2, 0, R2, 0], [R2, 0, R2, 0], 0.0),
        ([R2, 0, R2, 0], [-R2, 0, -R2, 0], 0.0),
        ([1, 0, 0, 0], [R2, R2, 0, 0], np.pi / 2),
        ([1, 0, 0, 0], [0, 1, 0, 0], np.pi),
    ],
)
def test_geodesic_distance_examples(q1, q2, expected):
    assert geodesic_distance(q1, q2) == pytest.approx(expected, abs=1e-15)


def test_geodesic_matches_arccos_form(rng):
    q1 = random_unit_quaternions(rng, 1000)
    q2 = random_unit_quaternions(rng, 1000)
    ref = 2 * np.arccos(np.minimum(1.0, np.abs(np.sum(q1 * q2, axis=1))))
    np.testing.assert_allclose(geodesic_distance(q1, q2), ref, atol=1e-7)


def test_geodesic_resolves_tiny_angles():
    q = quat_exp_body([0, 0, 1.0], 1e-11)
    assert geodesic_distance([1, 0, 0, 0], q) == pytest.approx(1e-11, rel=1e-6)


# ----------------------------------------------------------- properties


def test_homomorphism(rng):
    q = random_unit_quaternions(rng, 1000)
    p = random_unit_quaternions(rng, 1000)
    lhs = quat_to_matrix(hamilton(q, p))
    rhs = quat_to_matrix(q) @ quat_to_matrix(p)
    assert np.max(np.linalg.norm(lhs - rhs, axis=(1, 2))) < 1e-12


def test_chart_consistency(rng):
    checked = 0
    for q in random_unit_quaternions(rng, 3000):
        idx = np.flatnonzero(np.abs(q) >= 0.1)
        if idx.size < 2:
            continue
        i, j = idx[:2]
        ri = patch_to_matrix(i, projective.to_patch(q, i))
        rj = patch_to_matrix(j, projective.to_patch(q, j))
        assert np.linalg.norm(ri - rj) <= 1e-12
        checked += 1
        if checked == 1000:
            break
    assert checked == 1000


def test_rational_form_matches_normalized_path(rng):
    for i in range(4):
        x = rng.uniform(-2, 2, (250, 3))
        a = patch_to_matrix(np.full(250, i), x)
        b = quat_to_matrix(patch_to_quat(i, x))
        assert np.max(np.linalg.norm(a - b, axis=(1, 2))) <= 1e-13


def test_quat_patch_round_trip_geodesic(rng):
    q = random_unit_quaternions(rng, 1000)
    back = []
    for qk in q:
        i, x = quat_to_patch(qk)
        back.append(patch_to_quat(i, x))
    assert np.max(geodesic_distance(np.array(back), q)) < 1e-12


def test_patch_matrices_orthogonal_for_large_coordinates(rng):
    x = rng.uniform(-1e3, 1e3, (500, 3))
    r = patch_to_matrix(rng.integers(0, 4, 500), x)
    assert np.max(orthogonality_defect(r)) < 1e-12


# ----------------------------------------------------------- value types


def test_unit_quaternion_normalizes():
    q = UnitQuaternion([2.0, 0.0, 0.0, 0.0])
    assert q.s == 1.0
    np.testing.assert_array_equal(q.v, [0, 0, 0])
    assert np.linalg.norm(q.as_array()) == 1.0
    with pytest.raises(ValueError):
        UnitQuaternion([0.0, 0.0, 0.0, 0.0])


def test_unit_quaternion_compose_and_patch():
    a = UnitQuaternion([R2, R2, 0, 0])
    np.testing.assert_allclose((a * a).as_matrix(), np.diag([1.0, -1.0, -1.0]), atol=1e-15)
    p = (-a).to_patch()
    assert p.i == 0
    np.testing.assert_allclose(p.x, [1, 0, 0], rtol=1e-15)
    np.testing.assert_allclose(p.as_matrix(), a.as_matrix(), atol=1e-15)
    np.testing.assert_allclose(p.to_quat().q, a.q, atol=1e-16)


def test_patch_rotation_validates():
    with pytest.raises(projective.PatchDomainError):
        PatchRotation(4, [0, 0, 0])
    p = PatchRotation(1, [1, 2, 3])
    np.testing.assert_array_equal(p.homogeneous, [1, 1, 2, 3])
