import math

import mpmath
import numpy as np
import pytest

from opshape.directional import (
    OpsSummary,
    angular_distances,
    chisq_statistic,
    chisq_upper_tail,
    confidence_interval,
    coplanarity_test,
    delta_se,
    extrinsic_mean,
    mean_vector,
    normal_cdf,
    normal_quantile,
    resultant_length,
    sample_covariance,
    total_variance,
    z_statistic,
)
from opshape.errors import EmptySample, FocalMean, InvalidLevel
from opshape.geometry import DirectionSample
from opshape.rng import SplitMix64
from opshape.synth import tangent_gaussian_sample

mpmath.mp.dps = 50


def sample_of(*rows):
    return DirectionSample.from_vectors(np.array(rows, dtype=np.float64))


def random_sphere_sample(n, seed, q=1, d=3):
    gen = SplitMix64(seed)
    raw = gen.normals(n * q * d).reshape(n, q, d)
    units = raw / np.linalg.norm(raw, axis=2, keepdims=True)
    return DirectionSample(units, tuple(str(i) for i in range(n)))


def phi_reference(z):
    return float(0.5 * mpmath.erfc(-z / mpmath.sqrt(2)))


THREE_ROWS = sample_of([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
# hand values for THREE_ROWS: mean (2/3, 1/3, 0), resultant sqrt(5)/3
R_THREE = math.sqrt(5.0) / 3.0
TS_THREE = 2.0 * (1.0 - R_THREE)
SE_THREE = 2.0 * math.sqrt(2.0) / (3.0 * math.sqrt(15.0))


# ---------- first moments -------------------------------------------------------

def test_mean_vector_basic():
    np.testing.assert_array_equal(
        mean_vector(sample_of([0.0, 0.0, 1.0], [0.0, 0.0, 1.0])), [[0.0, 0.0, 1.0]]
    )
    np.testing.assert_allclose(
        mean_vector(sample_of([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])),
        [[0.5, 0.5, 0.0]],
        atol=0,
    )


def test_resultant_length_basic():
    assert resultant_length(np.array([0.0, 0.0, 1.0])) == pytest.approx(1.0)
    r = resultant_length(np.array([[0.5, 0.5, 0.0]]))
    assert r[0] == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-15)


def test_extrinsic_mean_normalizes_and_rejects_focal():
    np.testing.assert_allclose(
        extrinsic_mean(np.array([[0.0, 0.0, 0.5]])), [[0.0, 0.0, 1.0]], atol=0
    )
    np.testing.assert_allclose(
        extrinsic_mean(np.array([[0.5, 0.5, 0.0]])),
        [[math.sqrt(2) / 2, math.sqrt(2) / 2, 0.0]],
        atol=1e-16,
    )
    with pytest.raises(FocalMean):
        extrinsic_mean(np.zeros((1, 3)))


# ---------- dispersion index ----------------------------------------------------

def test_total_variance_constant_sample_is_exact_zero():
    ts = total_variance(sample_of([0.0, 1.0, 0.0], [0.0, 1.0, 0.0]))
    assert ts == 0.0


def test_total_variance_hand_value():
    assert total_variance(THREE_ROWS) == pytest.approx(TS_THREE, abs=1e-15)
    assert TS_THREE == pytest.approx(0.50929, abs=5e-6)


def test_total_variance_bounds_random():
    for seed in range(5):
        s = random_sphere_sample(20, seed, q=2)
        ts = total_variance(s)
        assert 0.0 <= ts <= 2.0 * s.q


def test_sample_covariance_hand_value():
    cov = sample_covariance(THREE_ROWS)
    expect = np.array(
        [[2 / 9, -2 / 9, 0.0], [-2 / 9, 2 / 9, 0.0], [0.0, 0.0, 0.0]]
    )
    np.testing.assert_allclose(cov, expect, atol=1e-16)


def test_sample_covariance_constant_is_zero():
    cov = sample_covariance(sample_of([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(cov, np.zeros((3, 3)))


def test_trace_identity_random_samples():
    # per block: trace of the covariance equals 1 - resultant^2
    for seed in range(30):
        s = random_sphere_sample(12, 1000 + seed, q=2)
        cov = sample_covariance(s)
        r = resultant_length(mean_vector(s))
        d = s.dim
        for f in range(s.q):
            block = cov[f * d : (f + 1) * d, f * d : (f + 1) * d]
            assert np.trace(block) == pytest.approx(1.0 - r[f] ** 2, abs=1e-12)


# ---------- delta-method standard error ------------------------------------------

def test_delta_se_hand_value():
    assert delta_se(THREE_ROWS) == pytest.approx(SE_THREE, abs=1e-15)
    assert SE_THREE == pytest.approx(0.24343, abs=5e-6)


def test_delta_se_constant_sample_is_exact_zero():
    assert delta_se(sample_of([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])) == 0.0


def test_delta_se_two_point_samples_exactly_zero():
    # ubar is orthogonal to u1 - u2 for unit vectors, so the quadratic
    # form collapses no matter the pair
    gen = SplitMix64(55)
    for _ in range(20):
        raw = gen.normals(6).reshape(2, 3)
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        if np.linalg.norm(raw.sum(axis=0)) < 1e-6:
            continue
        assert delta_se(DirectionSample.from_vectors(raw)) == 0.0


def test_delta_se_focal_propagates():
    with pytest.raises(FocalMean):
        delta_se(sample_of([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]))


# ---------- interval and test engines --------------------------------------------

def test_confidence_interval_degenerate_and_validation():
    assert confidence_interval(0.3, 0.0, 0.05) == (0.3, 0.3)
    lo, hi = confidence_interval(0.2, 0.1, 0.05)
    assert lo < 0.2 < hi
    assert lo == pytest.approx(0.2 - 1.959964 * 0.1, abs=1e-6)
    with pytest.raises(InvalidLevel):
        confidence_interval(0.2, 0.1, 0.0)
    with pytest.raises(InvalidLevel):
        confidence_interval(0.2, 0.1, 1.0)


def test_confidence_interval_lower_not_clamped():
    lo, hi = confidence_interval(0.01, 0.1, 0.05)
    assert lo < 0.0


def test_z_statistic_basic_points():
    z, p, degenerate = z_statistic(0.0, 1.0)
    assert (z, p, degenerate) == (0.0, 0.5, False)
    z, p, _ = z_statistic(1.959964, 1.0)
    assert p == pytest.approx(0.025, abs=1e-6)


def test_z_statistic_derived_value():
    z, p, _ = z_statistic(0.1871, 0.0812)
    assert z == pytest.approx(0.1871 / 0.0812, abs=1e-12)
    assert p == pytest.approx(1.0 - phi_reference(z), abs=1e-12)
    assert p == pytest.approx(0.0106, abs=5e-4)


def test_z_statistic_degenerate_conventions():
    assert z_statistic(0.0, 0.0) == (0.0, 1.0, True)
    z, p, degenerate = z_statistic(0.3, 0.0)
    assert math.isinf(z) and p == 0.0 and degenerate


def test_chisq_statistic_closed_form_df2():
    t, p = chisq_statistic(0.1871, 41, 2)
    assert t == 41 * 0.1871
    assert p == math.exp(-t / 2.0)
    assert chisq_statistic(0.0, 10, 2)[1] == 1.0
    t_half = 2.0 * math.log(2.0)
    assert chisq_statistic(t_half / 7, 7, 2)[1] == pytest.approx(0.5, abs=1e-12)


def test_chisq_engines_agree_generic_vs_closed_form():
    for t in np.linspace(0.0, 100.0, 401):
        generic = chisq_upper_tail(float(t), 2)
        closed = math.exp(-t / 2.0)
        assert generic == pytest.approx(closed, rel=1e-10, abs=1e-300)


def test_chisq_upper_tail_other_df():
    # df=4 reference: P(T > t) = exp(-t/2) (1 + t/2)
    for t in (0.5, 3.0, 10.0):
        expect = math.exp(-t / 2.0) * (1.0 + t / 2.0)
        assert chisq_upper_tail(t, 4) == pytest.approx(expect, rel=1e-12)


def test_normal_cdf_matches_high_precision_reference():
    for z in np.linspace(-8.0, 8.0, 33):
        assert normal_cdf(float(z)) == pytest.approx(
            phi_reference(float(z)), abs=1e-10
        )


def test_normal_quantile_matches_reference():
    for p in (0.025, 0.5, 0.7, 0.975, 0.999):
        expect = float(mpmath.sqrt(2) * mpmath.erfinv(2 * p - 1))
        assert normal_quantile(p) == pytest.approx(expect, abs=1e-12)
    with pytest.raises(InvalidLevel):
        normal_quantile(0.0)
    with pytest.raises(InvalidLevel):
        normal_quantile(1.5)


# ---------- angles ---------------------------------------------------------------

def test_angular_distances_cardinal_cases():
    s = sample_of([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(angular_distances(s), np.zeros((3, 1)), atol=0)

    mixed = sample_of([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    ang = angular_distances(mixed)
    mu = extrinsic_mean(mean_vector(mixed))[0]
    assert ang[0, 0] == pytest.approx(math.acos(np.dot([0, 0, 1], mu)), abs=1e-15)
    assert ang[2, 0] == pytest.approx(math.acos(np.dot([1, 0, 0], mu)), abs=1e-15)


def test_angular_distances_orthogonal_and_antipodal():
    # three clustered rows pin the mean near +z; probe rows sit at right
    # angle and antipode
    rows = [[0.0, 0.0, 1.0]] * 8 + [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]
    s = sample_of(*rows)
    mu = extrinsic_mean(mean_vector(s))[0]
    ang = angular_distances(s)
    assert ang[8, 0] == pytest.approx(math.acos(mu @ np.array([1.0, 0, 0])), abs=1e-12)
    assert ang[9, 0] == pytest.approx(math.pi - ang[0, 0], abs=1e-12)


# ---------- assembled summary ----------------------------------------------------

def test_coplanarity_test_assembles_consistent_summary():
    s = random_sphere_sample(40, 77)
    out = coplanarity_test(s, alpha=0.05)
    assert isinstance(out, OpsSummary)
    assert out.n == 40 and out.q == 1
    assert out.t_stat == 40 * out.total_variance
    assert out.ci[0] <= out.total_variance <= out.ci[1]
    assert 0.0 <= out.p_normal <= 1.0 and 0.0 <= out.p_chisq <= 1.0
    assert out.df == 2
    assert out.reject_ci == (out.ci[0] > 1e-12)
    assert out.reject_chisq == (out.p_chisq < 0.05)


def test_coplanarity_test_constant_sample_degenerate_not_fatal():
    s = sample_of([0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0])
    out = coplanarity_test(s, alpha=0.05)
    assert out.degenerate
    assert out.total_variance == 0.0 and out.se == 0.0
    assert out.p_normal == 1.0
    assert not out.reject_ci and not out.reject_chisq


def test_coplanarity_test_two_point_degenerate_flag():
    s = sample_of([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    out = coplanarity_test(s, alpha=0.05)
    assert out.degenerate and out.se == 0.0
    assert out.total_variance > 0.0
    assert out.p_normal == 0.0


def test_coplanarity_test_needs_two_scenes():
    with pytest.raises(EmptySample):
        coplanarity_test(sample_of([1.0, 0.0, 0.0]), alpha=0.05)


def test_rotation_equivariance():
    s = random_sphere_sample(25, 99)
    gen = SplitMix64(123)
    raw = gen.normals(9).reshape(3, 3)
    rot, _ = np.linalg.qr(raw)
    if np.linalg.det(rot) < 0:
        rot[:, 0] = -rot[:, 0]
    rotated = DirectionSample((s.units @ rot.T), s.scene_ids)

    a = coplanarity_test(s, alpha=0.05)
    b = coplanarity_test(rotated, alpha=0.05)
    assert b.resultant[0] == pytest.approx(a.resultant[0], abs=1e-12)
    assert b.total_variance == pytest.approx(a.total_variance, abs=1e-12)
    assert b.se == pytest.approx(a.se, abs=1e-12)
    assert b.t_stat == pytest.approx(a.t_stat, abs=1e-10)
    assert b.p_chisq == pytest.approx(a.p_chisq, abs=1e-12)
    assert b.ci[0] == pytest.approx(a.ci[0], abs=1e-12)
    np.testing.assert_allclose(
        b.extrinsic_mean[0], a.extrinsic_mean[0] @ rot.T, atol=1e-12
    )


def test_duplication_doubles_t_statistic():
    s = random_sphere_sample(15, 7)
    doubled = DirectionSample(
        np.concatenate([s.units, s.units]),
        s.scene_ids + tuple(f"copy-{i}" for i in s.scene_ids),
    )
    a = coplanarity_test(s, 0.05)
    b = coplanarity_test(doubled, 0.05)
    assert b.total_variance == pytest.approx(a.total_variance, abs=1e-15)
    assert b.t_stat == pytest.approx(2.0 * a.t_stat, abs=1e-12)


def test_multi_block_total_variance_sums_blocks():
    gen = SplitMix64(31)
    raw = gen.normals(10 * 2 * 3).reshape(10, 2, 3)
    units = raw / np.linalg.norm(raw, axis=2, keepdims=True)
    s = DirectionSample(units, tuple(str(i) for i in range(10)))
    blocks = [
        DirectionSample(units[:, [f], :], s.scene_ids) for f in range(2)
    ]
    assert total_variance(s) == pytest.approx(
        sum(total_variance(b) for b in blocks), abs=1e-15
    )
    out = coplanarity_test(s, 0.05)
    assert out.df == 4  # (d - 1) * q


def test_small_dispersion_summary_against_tangent_oracle():
    units = tangent_gaussian_sample([0.0, 0.0, 1.0], 0.08, 400, 17)
    s = DirectionSample.from_vectors(units)
    out = coplanarity_test(s, 0.05)
    # tS approximates the mean squared tangent radius at this scale
    tangent_sq = np.sum(units[:, :2] ** 2, axis=1)
    assert out.total_variance == pytest.approx(float(np.mean(tangent_sq)), rel=0.02)
