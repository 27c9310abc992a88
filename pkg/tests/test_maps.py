import math

import numpy as np
import pytest

from altiter import geometry as geo
from altiter import maps as mp
from altiter.errors import DomainError, ParameterError

from catalog_matrix import all_catalog_maps

E1, E2 = geo.euclidean(1), geo.euclidean(2)
H = geo.hyperbolic_disk()


def test_scaling_half():
    assert np.array_equal(mp.apply(mp.EuclideanScaling(0.5, (0, 0)), E2, [1, 0]), [0.5, 0.0])


def test_quarter_rotation():
    out = mp.apply(mp.EuclideanRotation(math.pi / 2), E2, [1, 0])
    assert np.allclose(out, [0, 1], atol=1e-16)


def test_ball_projection_radial():
    out = mp.apply(mp.ProjectionOntoDomain(geo.Ball((0, 0), 1)), E2, [2, 0])
    assert np.array_equal(out, [1.0, 0.0])


def test_box_projection_clips():
    out = mp.apply(mp.ProjectionOntoDomain(geo.Box((-1, 0), (1, 2))), E2, [3, -1])
    assert np.array_equal(out, [1.0, 0.0])


def test_compose_applies_right_to_left():
    shift_scale = mp.Compose((mp.EuclideanScaling(0.5, (0.0,)), mp.ProjectionOntoDomain(geo.Box((2,), (3,)))))
    # project 10 -> 3, then halve -> 1.5 (the other order would give 2)
    assert mp.apply(shift_scale, E1, [10.0])[0] == 1.5


def test_average_is_geodesic_average_of_images():
    a = mp.Average(0.25, mp.EuclideanScaling(0.0, (4.0,)), mp.EuclideanScaling(0.0, (0.0,)))
    assert mp.apply(a, E1, [7.0])[0] == 1.0


def test_hyperbolic_rotation_fixes_center_and_preserves_distance():
    c = (0.3, -0.2)
    rot = mp.HyperbolicRotation(c, 0.8)
    assert geo.distance(H, mp.apply(rot, H, c), c) == 0.0
    x = np.array([-0.5, 0.4])
    assert geo.distance(H, mp.apply(rot, H, x), c) == pytest.approx(geo.distance(H, x, c), abs=1e-12)


def test_hyperbolic_rotation_about_origin_is_euclidean_rotation():
    rot = mp.HyperbolicRotation((0, 0), math.pi / 2)
    assert np.allclose(mp.apply(rot, H, [0.5, 0]), [0, 0.5], atol=1e-16)


def test_space_mismatch_is_a_parameter_error():
    with pytest.raises(ParameterError):
        mp.apply(mp.EuclideanRotation(1.0), H, [0.1, 0.1])
    with pytest.raises(ParameterError):
        mp.apply(mp.HyperbolicRotation((0, 0), 1.0), E2, [0.1, 0.1])
    with pytest.raises(ParameterError):
        mp.apply(mp.EuclideanScaling(0.5, (0, 0)), geo.euclidean(3), [0, 0, 0])
    with pytest.raises(ParameterError):
        mp.apply(mp.Compose((mp.EuclideanRotation(1.0), mp.HyperbolicRotation((0, 0), 1.0))), E2, [0, 0])


def test_point_outside_domain_is_a_domain_error():
    space = geo.euclidean(2, geo.Ball((0, 0), 1))
    with pytest.raises(DomainError):
        mp.apply(mp.EuclideanScaling(0.5, (0, 0)), space, [2, 0])


@pytest.mark.parametrize("bad", [
    lambda: mp.EuclideanScaling(1.5, (0,)),
    lambda: mp.EuclideanScaling(-0.1, (0,)),
    lambda: mp.Average(2.0, mp.EuclideanScaling(0.5, (0,)), mp.EuclideanScaling(0.5, (0,))),
    lambda: mp.EuclideanRotation(1.0, (0, 0, 0)),
    lambda: mp.HyperbolicRotation((1.0, 0.0), 1.0),
    lambda: mp.ProjectionOntoDomain(geo.WholeSpace()),
    lambda: mp.Compose(()),
])
def test_constructor_invariants(bad):
    with pytest.raises(ParameterError):
        bad()


# -- affine maps and the expansion counterexample --------------------------------

def test_affine_rejects_expansion_at_construction():
    with pytest.raises(ParameterError, match="spectral norm"):
        mp.EuclideanAffine(((2, 0), (0, 2)), (0, 0))


def test_forced_expansion_fails_the_check():
    T = mp.EuclideanAffine(((2, 0), (0, 2)), (0, 0), validate=False)
    rep = mp.check_nonexpansive(T, E2, 1000, seed=0, tol=1e-9)
    assert not rep.passed
    assert rep.max_ratio == pytest.approx(2.0, rel=1e-12)
    x, y = rep.violating_pair
    assert geo.distance(E2, T(E2, x), T(E2, y)) > geo.distance(E2, x, y)


def test_affine_orthogonal_matrix_accepted():
    T = mp.EuclideanAffine(((0.6, -0.8), (0.8, 0.6)), (1, 1))
    assert mp.spectral_norm(T.matrix) == pytest.approx(1.0, abs=1e-15)
    assert mp.check_nonexpansive(T, E2, 500).passed


# -- fixed points ----------------------------------------------------------------

def test_fixed_point_oracle_examples():
    w = mp.fixed_point_oracle(mp.EuclideanRotation(math.pi / 2, (0, 0)))
    assert w.source == "analytic" and np.array_equal(w.point, [0, 0])
    w = mp.fixed_point_oracle(mp.ProjectionOntoDomain(geo.Ball((1, 1), 2)))
    assert np.array_equal(w.point, [1, 1])
    w = mp.fixed_point_oracle(mp.ProjectionOntoDomain(geo.Box((0, 0), (2, 4))))
    assert np.array_equal(w.point, [1, 2])
    compose = mp.Compose((mp.EuclideanRotation(1.0), mp.EuclideanScaling(0.5, (0, 0))))
    assert mp.fixed_point_oracle(compose) is None
    assert mp.fixed_point_oracle(mp.EuclideanAffine(((0.5, 0), (0, 0.5)), (0, 0))) is None


@pytest.mark.parametrize("label,T,space", all_catalog_maps(), ids=lambda v: v if isinstance(v, str) else "")
def test_analytic_witnesses_are_fixed(label, T, space):
    w = mp.fixed_point_oracle(T)
    if w is None:
        pytest.skip("no analytic witness")
    assert geo.distance(space, mp.apply(T, space, w.point), w.point) <= 1e-10


def test_certified_witness():
    T = mp.Compose((mp.EuclideanRotation(1.0), mp.EuclideanScaling(0.5, (0, 0))))
    w = mp.certify_fixed_point(T, E2, [0, 0])
    assert w.source == "certified-numerically" and w.residual == 0.0
    with pytest.raises(ParameterError):
        mp.certify_fixed_point(T, E2, [1, 0])


# -- nonexpansiveness --------------------------------------------------------------

@pytest.mark.parametrize("label,T,space", all_catalog_maps(), ids=lambda v: v if isinstance(v, str) else "")
def test_catalog_maps_are_nonexpansive(label, T, space):
    rep = mp.check_nonexpansive(T, space, 2000, seed=5, tol=1e-9)
    assert rep.passed, rep
    assert rep.pairs_checked + rep.pairs_skipped == 2000


@pytest.mark.parametrize("angle", [0.3, math.pi / 2, 2.5])
def test_rotation_ratio_is_one(angle):
    rep = mp.check_nonexpansive(mp.EuclideanRotation(angle, (0.2, 0.1)), E2, 1000, seed=1)
    assert rep.passed and rep.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_scaling_ratio_is_factor():
    rep = mp.check_nonexpansive(mp.EuclideanScaling(0.5, (0, 0)), E2, 1000, seed=1)
    assert rep.passed and rep.max_ratio == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("T,space", [
    (mp.EuclideanRotation(1.1, (0.5, 0.5)), E2),
    (mp.HyperbolicRotation((0.4, 0.1), -0.9), H),
    (mp.HyperbolicRotation((-0.7, -0.2), 2.0), H),
])
def test_isometries_preserve_distances(T, space):
    assert mp.check_isometry(T, space, 2000, seed=2) <= 1e-9


@pytest.mark.parametrize("target", [geo.Ball((0.5, -0.5), 1.5), geo.Box((-1, -2), (0.5, 1))])
def test_projection_is_idempotent(target):
    P = mp.ProjectionOntoDomain(target)
    for x in geo.sample_points(E2, 500, np.random.default_rng(4), extent=5.0):
        once = mp.apply(P, E2, x)
        assert np.max(np.abs(mp.apply(P, E2, once) - once)) <= 1e-12


def test_check_is_deterministic_given_seed():
    T = mp.Average(0.5, mp.HyperbolicRotation((0.1, 0), 1.0), mp.HyperbolicRotation((0, 0.3), -1.0))
    a = mp.check_nonexpansive(T, H, 300, seed=9)
    b = mp.check_nonexpansive(T, H, 300, seed=9)
    assert a == b


def test_sample_count_must_be_positive():
    with pytest.raises(ParameterError):
        mp.check_nonexpansive(mp.EuclideanScaling(0.5, (0, 0)), E2, 0)


def test_coincident_pairs_are_skipped():
    space = geo.euclidean(1, geo.Box((0.0,), (0.0,)))
    rep = mp.check_nonexpansive(mp.EuclideanScaling(0.5, (0.0,)), space, 10)
    assert rep.passed and rep.pairs_skipped == 10 and rep.pairs_checked == 0
