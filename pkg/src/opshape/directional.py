"""Extrinsic moments and dispersion inference for samples of unit vectors.

The dispersion index of a registered sample is twice the summed defect of
the per-block mean resultant lengths, tS = 2 * sum_f (1 - ||u_bar_f||).
It vanishes exactly when each block is constant, which for camera scenes
means the landmarks are consistent with a single planar configuration.
Inference uses the delta-method standard error of tS together with a
chi-square calibration of n * tS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from .errors import EmptySample, FocalMean, InvalidLevel
from .geometry import DirectionSample, _freeze

# dispersion at or below this is exact concentration (fp zero)
ZERO_TOL = 1e-12
# block mean shorter than this has no usable extrinsic mean
FOCAL_TOL = 1e-10
# raw delta SE at rounding-noise scale collapses to exactly 0.0
SE_CLAMP_RTOL = 1e-12


def normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    return float(special.ndtr(z))


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise InvalidLevel(f"quantile level must be in (0, 1), got {p}")
    return float(special.ndtri(p))


def chisq_upper_tail(t: float, df: int) -> float:
    """P(chi2_df > t) via the regularized upper incomplete gamma."""
    if t < 0.0:
        raise ValueError("statistic must be nonnegative")
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return float(special.gammaincc(df / 2.0, t / 2.0))


def mean_vector(sample: DirectionSample) -> np.ndarray:
    """Per-block Euclidean mean, shape (q, d)."""
    return sample.units.mean(axis=0)


def resultant_length(mean: np.ndarray) -> np.ndarray:
    """Per-block mean resultant length, shape (q,). Values in [0, 1] up to fp."""
    m = np.atleast_2d(np.asarray(mean, dtype=np.float64))
    return np.linalg.norm(m, axis=1)


def extrinsic_mean(mean: np.ndarray) -> np.ndarray:
    """Per-block mean direction u_bar / ||u_bar||, shape (q, d).

    Raises:
        FocalMean: some block mean is numerically zero, so every direction
            is equally close and no representative exists.
    """
    m = np.atleast_2d(np.asarray(mean, dtype=np.float64))
    r = np.linalg.norm(m, axis=1)
    if np.any(r < FOCAL_TOL):
        raise FocalMean(f"block mean has norm below {FOCAL_TOL}; extrinsic mean undefined")
    return m / r[:, None]


def total_variance(sample: DirectionSample) -> float:
    """Dispersion index tS = 2 * sum over blocks of (1 - resultant length).

    Clamped at 0 from below: rounding can push a constant sample's resultant
    a few ulp past 1.
    """
    r = resultant_length(mean_vector(sample))
    return max(float(2.0 * np.sum(1.0 - r)), 0.0)


def sample_covariance(sample: DirectionSample) -> np.ndarray:
    """Covariance (1/n normalization) of the stacked block vectors, (q*d, q*d)."""
    n = sample.n
    flat = sample.units.reshape(n, -1)
    dev = flat - flat.mean(axis=0)
    return dev.T @ dev / n


def _delta_se_raw(mean: np.ndarray, flat: np.ndarray) -> float:
    r = np.linalg.norm(mean, axis=1)
    if np.any(r < FOCAL_TOL):
        raise FocalMean("focal block mean; delta-method gradient undefined")
    grad = (-2.0 * mean / r[:, None]).ravel()
    # g' S_n g as a mean of squared projections: cannot go negative under
    # rounding, unlike the assembled-matrix form whose cancellation noise
    # blows up when the resultant is small
    proj = (flat - mean.ravel()) @ grad
    n = flat.shape[0]
    quad = float(proj @ proj) / n
    return math.sqrt(quad / n)


def delta_se(sample: DirectionSample) -> float:
    """Delta-method standard error of the dispersion index.

    se = sqrt(g' S_n g / n) with g the stacked per-block gradients
    -2 u_bar_f / ||u_bar_f||; for one block this is
    (2 / sqrt(n)) * sqrt(u_bar' S_n u_bar) / ||u_bar||. A raw value at
    rounding-noise scale is returned as exactly 0.0: two-point samples
    cancel the projected variance identically, and constant samples must
    not manufacture a positive error from summation noise.
    """
    mean = mean_vector(sample)
    se = _delta_se_raw(mean, sample.units.reshape(sample.n, -1))
    ts = max(float(2.0 * np.sum(1.0 - np.linalg.norm(mean, axis=1))), 0.0)
    if se <= SE_CLAMP_RTOL * (1.0 + ts):
        return 0.0
    return se


def confidence_interval(ts: float, se: float, alpha: float) -> Tuple[float, float]:
    """Symmetric normal interval ts -+ z_{1-alpha/2} * se; lower end not clamped."""
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"alpha must be in (0, 1), got {alpha}")
    if se < 0.0:
        raise ValueError("standard error must be nonnegative")
    z = normal_quantile(1.0 - alpha / 2.0)
    half = z * se
    return (ts - half, ts + half)


def z_statistic(ts: float, se: float) -> Tuple[float, float, bool]:
    """One-sided normal test of zero dispersion.

    Returns:
        (z, p_upper, degenerate). With se == 0 the statistic is undefined;
        by convention p = 1 when ts is (fp-)zero and p = 0 otherwise, and
        the degenerate flag is set.
    """
    if se < 0.0:
        raise ValueError("standard error must be nonnegative")
    if se == 0.0:
        if ts <= ZERO_TOL:
            return (0.0, 1.0, True)
        return (math.inf, 0.0, True)
    z = ts / se
    return (z, float(special.ndtr(-z)), False)


def chisq_statistic(ts: float, n: int, df: int) -> Tuple[float, float]:
    """Large-sample calibration T = n * ts against chi-square with df dof.

    For df = 2 the upper tail is exp(-T/2) exactly; other df use the
    regularized incomplete gamma.
    """
    if ts < 0.0:
        raise ValueError("dispersion must be nonnegative")
    if n < 1:
        raise EmptySample("need n >= 1")
    t = n * ts
    if df == 2:
        return (t, math.exp(-t / 2.0))
    return (t, chisq_upper_tail(t, df))


def angular_distances(sample: DirectionSample) -> np.ndarray:
    """Angles (n, q) between each vector and its block's extrinsic mean."""
    mu = extrinsic_mean(mean_vector(sample))
    cosines = np.einsum("nqd,qd->nq", sample.units, mu)
    return np.arccos(np.clip(cosines, -1.0, 1.0))


@dataclass(frozen=True)
class OpsSummary:
    """Full inference summary for one registered sample.

    ci is the two-sided (1 - alpha) interval for the population dispersion;
    the primary planarity decision is reject_ci (lower endpoint strictly
    positive, beyond the fp zero floor), with the chi-square decision
    reported side by side. degenerate marks the se = 0 convention.
    """

    n: int
    q: int
    dim: int
    alpha: float
    df: int
    mean_vector: np.ndarray
    resultant: np.ndarray
    extrinsic_mean: np.ndarray
    total_variance: float
    covariance: np.ndarray
    se: float
    z: float
    t_stat: float
    p_normal: float
    p_chisq: float
    ci: Tuple[float, float]
    degenerate: bool
    reject_ci: bool
    reject_chisq: bool

    def __post_init__(self):
        object.__setattr__(self, "mean_vector", _freeze(self.mean_vector))
        object.__setattr__(self, "resultant", _freeze(self.resultant))
        object.__setattr__(self, "extrinsic_mean", _freeze(self.extrinsic_mean))
        object.__setattr__(self, "covariance", _freeze(self.covariance))

    @property
    def reject(self) -> bool:
        return self.reject_ci


def coplanarity_test(
    sample: DirectionSample, alpha: float = 0.05, df: Optional[int] = None
) -> OpsSummary:
    """Test zero dispersion (all scenes register identically) at level alpha.

    Args:
        sample: registered directions, n >= 2.
        alpha: two-sided CI level and chi-square level, in (0, 1).
        df: chi-square degrees of freedom; defaults to (d - 1) * q.

    Raises:
        EmptySample, InvalidLevel, FocalMean.
    """
    if sample.n < 2:
        raise EmptySample("need at least two scenes to test dispersion")
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"alpha must be in (0, 1), got {alpha}")
    if df is None:
        df = (sample.dim - 1) * sample.q
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")

    mean = mean_vector(sample)
    resultant = resultant_length(mean)
    mu = extrinsic_mean(mean)  # FocalMean propagates
    ts = max(float(2.0 * np.sum(1.0 - resultant)), 0.0)
    cov = sample_covariance(sample)
    se = _delta_se_raw(mean, sample.units.reshape(sample.n, -1))
    if se <= SE_CLAMP_RTOL * (1.0 + ts):
        se = 0.0
    z, p_normal, degenerate = z_statistic(ts, se)
    t_stat, p_chisq = chisq_statistic(ts, sample.n, df)
    ci = confidence_interval(ts, se, alpha)

    return OpsSummary(
        n=sample.n,
        q=sample.q,
        dim=sample.dim,
        alpha=alpha,
        df=df,
        mean_vector=mean,
        resultant=resultant,
        extrinsic_mean=mu,
        total_variance=ts,
        covariance=cov,
        se=se,
        z=z,
        t_stat=t_stat,
        p_normal=p_normal,
        p_chisq=p_chisq,
        ci=(float(ci[0]), float(ci[1])),
        degenerate=degenerate,
        reject_ci=bool(ci[0] > ZERO_TOL),
        reject_chisq=bool(p_chisq < alpha),
    )
