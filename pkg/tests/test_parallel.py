import numpy as np
import pytest
from conftest import MODES, ellipsoid, sphere
from hypothesis import given, settings
from hypothesis import strategies as st

from relgeo4.commands import _closing_identity, identity_residuals, sample_mus
from relgeo4.errors import OffsetSingular
from relgeo4.frame import NormalizationMode, build_frame, curvature_functions, curvature_set
from relgeo4.parallel import (
    a_factored,
    a_of_mu,
    invariant_J,
    mu_from_ratio,
    offset_jet,
    peterson_check,
    recompute_star,
    shared_quantities_check,
    star_curvatures,
    star_radii,
    star_shape_operator,
    star_shape_operator_solve,
)

UNIT = curvature_set(1.0, 1.0, 1.0, np.ones(3))
SPHERE2 = curvature_set(0.5, 0.25, 0.125, np.full(3, 0.5))
DIAG = curvature_functions(np.diag([1.0, 2.0, 3.0]))


def test_offset_of_unit_sphere_is_half_sphere():
    spec = sphere(1.0)
    frame = spec.frame()
    xm = offset_jet(frame.x, frame.y, 0.5)
    np.testing.assert_allclose(np.linalg.norm(xm.value, axis=-1), 0.5, atol=1e-13)
    np.testing.assert_allclose(offset_jet(frame.x, frame.y, 0.0).value, frame.x.value)


def test_offset_constant_support():
    frame = sphere(1.0, NormalizationMode.custom("2")).frame()
    xm = offset_jet(frame.x, frame.y, 0.25)
    np.testing.assert_allclose(np.linalg.norm(xm.value, axis=-1), 0.5, atol=1e-13)


def test_a_of_mu_examples():
    assert a_of_mu(UNIT, 0.5) == pytest.approx(0.125)
    assert a_of_mu(DIAG, 0.0) == 1.0
    with pytest.raises(OffsetSingular):
        a_of_mu(UNIT, 1.0)


def test_focal_distance_reports_grid_point():
    spec = sphere(1.0)
    frame = spec.frame()
    with pytest.raises(OffsetSingular) as info:
        a_of_mu(frame.curvatures, 1.0, points=frame.points)
    assert info.value.point is not None and len(info.value.point) == 3


def test_star_shape_operator_examples():
    np.testing.assert_allclose(star_shape_operator(np.eye(3), 1.0, 0.5), 2 * np.eye(3), atol=1e-14)
    np.testing.assert_allclose(star_shape_operator(np.diag([1.0, 2.0, 3.0]), 6.0, 0.1),
                               np.diag([1 / 0.9, 2 / 0.8, 3 / 0.7]), atol=1e-14)
    b = np.array([[0.3, 0.1, -0.2], [0.05, 0.7, 0.4], [-0.1, 0.2, 1.1]])
    np.testing.assert_allclose(star_shape_operator(b, np.linalg.det(b), 1e-12), b, atol=1e-11)


matrices = st.lists(st.floats(-1.5, 1.5), min_size=9, max_size=9).map(lambda v: np.reshape(v, (3, 3)))


@settings(max_examples=200, deadline=None)
@given(matrices, st.floats(-0.4, 0.4))
def test_printed_star_formulas_match_linear_solve(b, mu):
    A = np.linalg.det(np.eye(3) - mu * b)
    if abs(A) < 1e-3:
        return
    want = star_shape_operator_solve(b, mu)
    got = star_shape_operator(b, np.linalg.det(b), mu)
    np.testing.assert_allclose(got, want, atol=1e-9 * max(1.0, np.abs(want).max()))
    s = star_curvatures(curvature_functions(b), mu)
    c = curvature_functions(got)
    np.testing.assert_allclose([s.H, s.H2, s.K], [c.H, c.H2, c.K], rtol=1e-8, atol=1e-8 * max(1.0, np.abs(want).max() ** 3))


def test_star_curvatures_unit_sphere():
    s = star_curvatures(UNIT, 0.5)
    assert (s.K, s.H2, s.H) == pytest.approx((8.0, 4.0, 2.0))
    np.testing.assert_allclose(s.radii, 0.5)


def test_star_curvatures_sphere_two():
    assert a_of_mu(SPHERE2, -1.0) == pytest.approx(3.375)
    assert star_curvatures(SPHERE2, -1.0).H == pytest.approx(1 / 3)


def test_zero_distance_is_identity():
    s = star_curvatures(DIAG, 0.0)
    assert (s.H, s.H2, s.K) == (DIAG.H, DIAG.H2, DIAG.K)
    np.testing.assert_array_equal(s.kappas, DIAG.kappas)


def test_invariant_J_examples():
    assert invariant_J(UNIT) == 0.0
    assert invariant_J(DIAG) == pytest.approx(13 / 324)


def test_mu_recovery_examples():
    assert mu_from_ratio(SPHERE2, star_curvatures(SPHERE2, 0.5)) == pytest.approx(0.5, abs=1e-15)
    assert mu_from_ratio(DIAG, DIAG) == 0.0


def test_vanishing_second_mean_curvature_ratio():
    c = curvature_functions(np.diag([2.0, 2.0, -1.0]))
    assert c.H2 == pytest.approx(0.0, abs=1e-15)
    for mu in (0.1, -0.2, 0.3):
        s = star_curvatures(c, mu)
        assert s.H2 / s.K == pytest.approx(-mu, abs=1e-8)


admissible = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)).filter(
    lambda k: min(abs(v) for v in k) > 0.05)


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_semigroup(kappas, m1, m2):
    c = curvature_functions(np.diag(kappas))
    if min(abs(a_of_mu(c, m, check=False)) for m in (m1, m1 + m2)) < 1e-3:
        return
    s1 = star_curvatures(c, m1)
    if abs(a_of_mu(s1, m2, check=False)) < 1e-3:
        return
    twice, once = star_curvatures(s1, m2), star_curvatures(c, m1 + m2)
    for f in ("H", "H2", "K"):
        a, b = getattr(twice, f), getattr(once, f)
        assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(-0.3, 0.3))
def test_factored_A_and_radii(kappas, mu):
    c = curvature_functions(np.diag(kappas))
    A = a_of_mu(c, mu, check=False)
    assert abs(a_factored(c, mu) - A) <= 1e-8 * max(1.0, abs(A))
    if abs(A) > 1e-3:
        want = np.sort(star_radii(c, mu))
        got = np.sort(star_curvatures(c, mu).radii)
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-8)


def test_identities_spot_values():
    s = star_curvatures(UNIT, 0.5)
    res = dict((label, (lhs, rhs)) for label, lhs, rhs in identity_residuals(UNIT, s, 0.5))
    assert res["A(1+mu^3K*)"] == pytest.approx((0.25, 0.25))
    assert res["A(1-3mu^2H2*)"] == pytest.approx((-0.25, -0.25))


@pytest.fixture(scope="module")
def ellipsoid_frame():
    return ellipsoid(grid=(7, 7, 7)).frame()


def test_pointwise_identities_on_ellipsoid(ellipsoid_frame):
    c = ellipsoid_frame.curvatures
    for mu in sample_mus(c, count=20, bound=0.2):
        s = star_curvatures(c, mu)
        for label, lhs, rhs in identity_residuals(c, s, mu):
            assert np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))) <= 1e-8, label


def test_closing_identity_on_ellipsoid(ellipsoid_frame):
    c = ellipsoid_frame.curvatures
    for mu in sample_mus(c, count=10):
        lhs, rhs, scale = _closing_identity(c, star_curvatures(c, mu))
        assert np.max(np.abs(lhs - rhs) / scale) <= 1e-6


def test_J_invariance_and_mu_recovery_on_ellipsoid(ellipsoid_frame):
    c = ellipsoid_frame.curvatures
    J = invariant_J(c)
    for mu in sample_mus(c, count=20, bound=0.2):
        s = star_curvatures(c, mu)
        assert np.max(np.abs(invariant_J(s) - J)) <= 1e-6
        assert np.max(np.abs(mu_from_ratio(c, s) - mu)) <= 1e-8


@pytest.mark.parametrize("mode", list(MODES))
def test_recompute_matches_closed_form(mode):
    spec = ellipsoid(mode=MODES[mode], grid=(4, 4, 4))
    frame = spec.frame(order=spec.parallel_order())
    for mu in (0.05, -0.15):
        closed = star_curvatures(frame.curvatures, mu)
        rebuilt = recompute_star(frame, mu).curvatures
        for f in ("H", "H2", "K"):
            np.testing.assert_allclose(getattr(rebuilt, f), getattr(closed, f), rtol=1e-6)


def test_recompute_unit_sphere_half():
    frame = sphere(1.0).frame()
    rebuilt = recompute_star(frame, 0.5).curvatures
    np.testing.assert_allclose([rebuilt.K, rebuilt.H2, rebuilt.H], [[8.0] * 125, [4.0] * 125, [2.0] * 125],
                               rtol=1e-6)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_constant_support_parallel_radius(c):
    frame = sphere(1.0, NormalizationMode.custom(repr(c))).frame()
    mu = 0.2
    star = recompute_star(frame, mu)
    radius = np.linalg.norm(star.x.value, axis=-1)
    np.testing.assert_allclose(radius, 1 - mu * c, atol=1e-6)


def test_shared_quantities_and_orientation_flip():
    frame = sphere(1.0).frame()
    mu = 1.5  # beyond the focal radius: A = (1 - mu)^3 < 0
    assert np.all(a_of_mu(frame.curvatures, mu) < 0)
    star = recompute_star(frame, mu)
    dev = shared_quantities_check(frame, star, mu)
    assert max(dev.values()) <= 1e-8
    np.testing.assert_allclose(star.q, frame.q, atol=1e-12)
    # without the sign(A) correction the reversed tangent frame flips the normal
    unflipped = build_frame(offset_jet(frame.x, frame.y, mu), y=frame.y, orientation=frame.orientation)
    np.testing.assert_allclose(unflipped.q, -frame.q, atol=1e-12)


def test_shared_quantities_vanish_at_tiny_mu():
    frame = ellipsoid(mode=MODES["custom"], grid=(3, 3, 3)).frame()
    dev = shared_quantities_check(frame, recompute_star(frame, 1e-12), 1e-12)
    assert max(dev.values()) <= 1e-9


@pytest.mark.parametrize("mode", list(MODES))
def test_peterson(mode):
    frame = ellipsoid(mode=MODES[mode], grid=(4, 4, 4)).frame()
    for mu in (0.1, -0.25, 0.3):
        assert peterson_check(frame.x, frame.y, mu).max() <= 1e-8
    assert peterson_check(sphere(1.0).frame().x, sphere(1.0).frame().y, 0.3).max() <= 1e-9
