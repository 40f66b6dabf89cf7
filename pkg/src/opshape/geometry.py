"""Oriented projective frames and spherical registration of landmark scenes.

A scene of k planar landmarks is lifted to homogeneous representatives
x~ = (x, 1). An ordered choice of m+2 landmarks in general position is an
oriented frame; the frame fixes a sign-adjusted linear chart H that sends
each remaining landmark to a unit vector in R^(m+1). A scene with k
landmarks therefore registers as q = k - m - 2 unit vectors, and samples of
scenes become samples on a product of spheres.

Conventions: points and homogeneous representatives are plain float64
ndarrays; frame representatives enter matrices as columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateFrame, DegeneratePoint, EmptySample, InvalidLandmark

# |det U| below DET_RTOL * prod(column norms) counts as affinely dependent
DET_RTOL = 1e-10
# |lambda_j| below SCALAR_RTOL * max|lambda| counts as a vanished frame scalar
SCALAR_RTOL = 1e-10
# ||H x~|| below POINT_RTOL * ||H||_F * ||x~|| counts as the singular locus
POINT_RTOL = 1e-12
# unit-norm slack accepted by DirectionSample
UNIT_ATOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class LandmarkScene:
    """One scene: k labelled planar landmarks, row j-1 holds landmark j."""

    scene_id: str
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidLandmark("points must be a nonempty (k, m) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidLandmark(f"scene {self.scene_id!r} has non-finite coordinates")
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "scene_id", str(self.scene_id))

    @property
    def k(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]

    def point(self, label: int) -> np.ndarray:
        if not 1 <= label <= self.k:
            raise InvalidLandmark(f"label {label} outside 1..{self.k}")
        return self.points[label - 1]


@dataclass(frozen=True)
class FrameSpec:
    """Which labels form the ordered frame and which register on spheres."""

    frame_labels: Tuple[int, ...] = (1, 2, 4, 3)
    remaining_labels: Tuple[int, ...] = (5,)

    def __post_init__(self):
        frame = tuple(int(x) for x in self.frame_labels)
        rest = tuple(int(x) for x in self.remaining_labels)
        if len(frame) < 3:
            raise InvalidLandmark("a frame needs at least m+2 = 3 labels")
        if len(rest) < 1:
            raise InvalidLandmark("at least one remaining label is required")
        labels = frame + rest
        if any(x < 1 for x in labels):
            raise InvalidLandmark("labels must be positive integers")
        if len(set(labels)) != len(labels):
            raise InvalidLandmark("frame and remaining labels must be distinct")
        object.__setattr__(self, "frame_labels", frame)
        object.__setattr__(self, "remaining_labels", rest)

    @property
    def m(self) -> int:
        return len(self.frame_labels) - 2

    @property
    def q(self) -> int:
        return len(self.remaining_labels)


@dataclass(frozen=True)
class OrientedFrameChart:
    """Sign-adjusted linear chart of one oriented frame.

    matrix is (m+1, m+1) with positive determinant; frame_scalars are the
    positive barycentric-style weights of the unit point in the sign-adjusted
    frame basis. det_sign_flipped records a global sign flip applied to keep
    det positive; when it is False the chart sends the j-th sign-adjusted
    frame representative to a positive multiple of e_j and the unit point to
    a positive multiple of the all-ones vector (negative multiples when True).
    """

    matrix: np.ndarray
    frame_scalars: np.ndarray
    det_sign_flipped: bool

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(self.matrix))
        object.__setattr__(self, "frame_scalars", _freeze(self.frame_scalars))


@dataclass(frozen=True)
class DirectionSample:
    """n scenes registered as unit vectors, one per sphere block.

    units has shape (n, q, d); scene_ids are the per-row labels. Arrays are
    locked after construction so samples are safe to share across threads.
    """

    units: np.ndarray
    scene_ids: Tuple[str, ...]

    def __post_init__(self):
        u = np.asarray(self.units, dtype=np.float64)
        if u.ndim == 2:
            u = u[:, None, :]
        if u.ndim != 3:
            raise ValueError("units must have shape (n, q, d)")
        if u.shape[0] == 0:
            raise EmptySample("sample contains no scenes")
        if u.shape[1] < 1 or u.shape[2] < 2:
            raise ValueError("each block must hold vectors in R^d, d >= 2")
        norms = np.linalg.norm(u, axis=2)
        if not np.all(np.abs(norms - 1.0) <= UNIT_ATOL):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValueError(f"vectors must be unit norm within {UNIT_ATOL} (off by {worst:.3e})")
        ids = tuple(str(s) for s in self.scene_ids)
        if len(ids) != u.shape[0]:
            raise ValueError("scene_ids length must equal the number of rows")
        if len(set(ids)) != len(ids):
            raise ValueError("scene_ids must be distinct")
        object.__setattr__(self, "units", _freeze(u))
        object.__setattr__(self, "scene_ids", ids)

    @classmethod
    def from_vectors(cls, vectors, scene_ids=None) -> "DirectionSample":
        arr = np.asarray(vectors, dtype=np.float64)
        if scene_ids is None:
            n = arr.shape[0]
            scene_ids = tuple(str(i) for i in range(n))
        return cls(arr, tuple(scene_ids))

    @property
    def n(self) -> int:
        return self.units.shape[0]

    @property
    def q(self) -> int:
        return self.units.shape[1]

    @property
    def dim(self) -> int:
        return self.units.shape[2]

    def without(self, index: int) -> "DirectionSample":
        """Copy of the sample with row `index` deleted."""
        if not 0 <= index < self.n:
            raise IndexError(f"row {index} outside 0..{self.n - 1}")
        keep = [i for i in range(self.n) if i != index]
        return DirectionSample(self.units[keep], tuple(self.scene_ids[i] for i in keep))

    def subset(self, ids: Sequence[str]) -> "DirectionSample":
        """Rows whose scene id is in `ids`, preserving sample order."""
        wanted = set(str(s) for s in ids)
        keep = [i for i, s in enumerate(self.scene_ids) if s in wanted]
        if not keep:
            raise EmptySample("subset selects no scenes")
        return DirectionSample(self.units[keep], tuple(self.scene_ids[i] for i in keep))


def lift(point) -> np.ndarray:
    """Homogeneous representative (x_1, ..., x_m, 1) of an affine point."""
    p = np.asarray(point, dtype=np.float64).ravel()
    if p.size < 1 or not np.all(np.isfinite(p)):
        raise InvalidLandmark("point must be a finite nonempty vector")
    return np.concatenate([p, [1.0]])


def frame_scalars(frame_points) -> Tuple[np.ndarray, np.ndarray]:
    """Positive frame scalars and the sign-adjusted frame matrix.

    Args:
        frame_points: sequence of m+2 homogeneous representatives in R^(m+1);
            the first m+1 span the frame, the last is the unit point.

    Returns:
        (lam, adjusted): lam is the (m+1,) vector of positive scalars with
        adjusted @ lam == unit point, adjusted the (m+1, m+1) matrix whose
        column j is the j-th representative times the sign of its solved
        scalar.

    Raises:
        DegenerateFrame: frame matrix numerically singular or some scalar
            vanishes relative to the largest.
    """
    reps = np.asarray(frame_points, dtype=np.float64)
    if reps.ndim != 2 or reps.shape[0] != reps.shape[1] + 1:
        raise DegenerateFrame("need m+2 representatives in R^(m+1)")
    d = reps.shape[1]
    basis = reps[:d].T  # columns are representatives
    unit = reps[d]
    col_norms = np.linalg.norm(basis, axis=0)
    if np.any(col_norms == 0.0):
        raise DegenerateFrame("zero frame representative")
    det = np.linalg.det(basis)
    if abs(det) < DET_RTOL * float(np.prod(col_norms)):
        raise DegenerateFrame(f"frame matrix is numerically singular (det={det:.3e})")
    lam = np.linalg.solve(basis, unit)
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0 or np.any(np.abs(lam) < SCALAR_RTOL * scale):
        raise DegenerateFrame("a frame scalar vanishes; unit point lies on a frame hyperplane")
    signs = np.sign(lam)
    adjusted = basis * signs[None, :]
    return np.abs(lam), adjusted


def oriented_frame_homography(frame_points) -> OrientedFrameChart:
    """Chart matrix H of an oriented frame, normalized to det(H) > 0.

    H = D^-1 (U')^-1 with U' the sign-adjusted frame matrix and D the
    diagonal of frame scalars; when det comes out negative, H is negated
    globally and the flip recorded.
    """
    lam, adjusted = frame_scalars(frame_points)
    h = np.diag(1.0 / lam) @ np.linalg.inv(adjusted)
    flipped = False
    if np.linalg.det(h) <= 0.0:
        h = -h
        flipped = True
    return OrientedFrameChart(matrix=h, frame_scalars=lam, det_sign_flipped=flipped)


def oriented_coordinate(chart: OrientedFrameChart, point) -> np.ndarray:
    """Unit-sphere coordinate H x~ / ||H x~|| of a homogeneous representative."""
    x = np.asarray(point, dtype=np.float64).ravel()
    y = chart.matrix @ x
    norm = float(np.linalg.norm(y))
    floor = POINT_RTOL * float(np.linalg.norm(chart.matrix)) * float(np.linalg.norm(x))
    if norm <= floor:
        raise DegeneratePoint("point maps to zero under the frame chart")
    return y / norm


def canonical_axis(vector) -> np.ndarray:
    """Axial representative: flip sign so the first nonzero component is positive."""
    v = np.asarray(vector, dtype=np.float64).ravel()
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return v.copy()
    for x in v:
        if abs(x) > 1e-12 * scale:
            return -v if x < 0.0 else v.copy()
    return v.copy()


def axial_coordinate(chart: OrientedFrameChart, point) -> np.ndarray:
    """Sphere coordinate with the sign canonicalized (projective, unoriented)."""
    return canonical_axis(oriented_coordinate(chart, point))


def representatives_to_directions(reps, frame_indices, remaining_indices) -> np.ndarray:
    """Register homogeneous representatives through the frame they select.

    Args:
        reps: (k, m+1) array of homogeneous representatives.
        frame_indices: ordered row indices of the m+2 frame representatives.
        remaining_indices: row indices to register (q of them).

    Returns:
        (q, m+1) array of unit vectors.
    """
    reps = np.asarray(reps, dtype=np.float64)
    chart = oriented_frame_homography(reps[list(frame_indices)])
    return np.stack([oriented_coordinate(chart, reps[i]) for i in remaining_indices])


def chart_for_scene(scene: LandmarkScene, spec: FrameSpec) -> OrientedFrameChart:
    """Oriented chart of the scene's frame landmarks under `spec`."""
    if spec.m != scene.m:
        raise InvalidLandmark(
            f"frame of {len(spec.frame_labels)} labels needs m={spec.m} coordinates, scene has m={scene.m}"
        )
    for label in spec.frame_labels + spec.remaining_labels:
        if label > scene.k:
            raise InvalidLandmark(f"scene {scene.scene_id!r} has no landmark {label}")
    reps = np.stack([lift(scene.point(j)) for j in spec.frame_labels])
    return oriented_frame_homography(reps)


def scene_to_directions(scene: LandmarkScene, spec: FrameSpec) -> np.ndarray:
    """Unit vectors (q, m+1) registering the scene's remaining landmarks."""
    chart = chart_for_scene(scene, spec)
    return np.stack(
        [oriented_coordinate(chart, lift(scene.point(j))) for j in spec.remaining_labels]
    )
