"""Synthetic planar scenes, pinhole views, and sphere samples for oracles.

Coplanar scenes photographed by cameras on one side of the scene plane
register identically in every view (the registration is invariant under the
induced plane-to-image maps), so generated view sets provide an exact
zero-dispersion oracle. Out-of-plane perturbations of the non-frame
landmarks produce controlled departures. All draws run through the
counter-based generator, so every artifact regenerates from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import BehindCamera, GenerationFailed
from .geometry import LandmarkScene, _freeze
from .rng import SplitMix64

# rejection margins for general position, in scene units
_MIN_TRIPLE_AREA = 0.05  # twice the triangle area
_MIN_PAIR_DIST = 0.1
_MAX_TRIES = 1000
_MIN_DEPTH = 1e-6


@dataclass(frozen=True)
class Scene3D:
    """k labelled 3D landmarks, possibly exactly coplanar."""

    points: np.ndarray
    coplanar: bool
    plane_normal: np.ndarray
    plane_offset: float
    out_of_plane_offsets: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        normal = np.asarray(self.plane_normal, dtype=np.float64)
        offs = np.asarray(self.out_of_plane_offsets, dtype=np.float64)
        if abs(float(np.linalg.norm(normal)) - 1.0) > 1e-12:
            raise ValueError("plane normal must be a unit vector")
        if self.coplanar:
            resid = np.abs(pts @ normal - self.plane_offset)
            if np.any(resid > 1e-12):
                raise ValueError("coplanar scene violates its plane equation")
            if np.any(offs != 0.0):
                raise ValueError("coplanar scene cannot carry nonzero offsets")
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "plane_normal", _freeze(normal))
        object.__setattr__(self, "out_of_plane_offsets", _freeze(offs))

    @property
    def k(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class PinholeCamera:
    """Pinhole camera: x_cam = rotation @ (x_world - center), image = focal * (x/z, y/z)."""

    center: np.ndarray
    rotation: np.ndarray
    focal: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        r = np.asarray(self.rotation, dtype=np.float64)
        if r.shape != (3, 3) or not np.allclose(r @ r.T, np.eye(3), atol=1e-10):
            raise ValueError("rotation must be a 3x3 orthogonal matrix")
        if np.linalg.det(r) < 0.0:
            raise ValueError("rotation must preserve orientation (det +1)")
        if not self.focal > 0.0:
            raise ValueError("focal length must be positive")
        object.__setattr__(self, "center", _freeze(c))
        object.__setattr__(self, "rotation", _freeze(r))


def project(camera: PinholeCamera, scene: Scene3D, scene_id: str = "view") -> LandmarkScene:
    """Project every landmark; labels keep their order.

    Raises:
        BehindCamera: some landmark has camera depth below 1e-6.
    """
    cam_coords = (scene.points - camera.center) @ camera.rotation.T
    depths = cam_coords[:, 2]
    if np.any(depths < _MIN_DEPTH):
        bad = int(np.argmin(depths))
        raise BehindCamera(f"landmark {bad + 1} has depth {depths[bad]:.3e}")
    image = camera.focal * cam_coords[:, :2] / depths[:, None]
    return LandmarkScene(scene_id=scene_id, points=image)


def _general_position_ok(pts: np.ndarray) -> bool:
    k = pts.shape[0]
    for i in range(k):
        for j in range(i + 1, k):
            d = pts[j] - pts[i]
            if math.hypot(d[0], d[1]) < _MIN_PAIR_DIST:
                return False
            for l in range(j + 1, k):
                e = pts[l] - pts[i]
                if abs(d[0] * e[1] - d[1] * e[0]) < _MIN_TRIPLE_AREA:
                    return False
    return True


def random_coplanar_scene(k: int, seed: int) -> Scene3D:
    """k landmarks drawn in the z = 0 plane, all triples in general position.

    Raises:
        GenerationFailed: rejection sampling exhausted its budget.
    """
    if k < 5:
        raise ValueError("need k >= 5 so at least one landmark remains after the frame")
    gen = SplitMix64(seed)
    for _ in range(_MAX_TRIES):
        flat = 2.0 * gen.uniforms(2 * k).reshape(k, 2) - 1.0
        if _general_position_ok(flat):
            pts = np.concatenate([flat, np.zeros((k, 1))], axis=1)
            return Scene3D(
                points=pts,
                coplanar=True,
                plane_normal=np.array([0.0, 0.0, 1.0]),
                plane_offset=0.0,
                out_of_plane_offsets=np.zeros(k),
            )
    raise GenerationFailed(f"no general-position scene after {_MAX_TRIES} tries")


def _look_at_rotation(center: np.ndarray, target: np.ndarray, roll: float) -> np.ndarray:
    z = target - center
    z = z / np.linalg.norm(z)
    up = np.array([0.0, 0.0, 1.0])
    x = np.cross(up, z)
    if np.linalg.norm(x) < 1e-8:
        x = np.cross(np.array([0.0, 1.0, 0.0]), z)
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    c, s = math.cos(roll), math.sin(roll)
    xr = c * x + s * y
    yr = -s * x + c * y
    return np.stack([xr, yr, z])


def random_cameras(
    n: int, seed: int, scene: Optional[Scene3D] = None
) -> List[PinholeCamera]:
    """n cameras on a shell above the z = 0 plane, looking near the origin.

    Centers stay on one side of the scene plane so all views share an
    orientation. When a scene is given, cameras that put any landmark at
    depth below 1e-6 are rejected and redrawn.

    Raises:
        GenerationFailed: rejection sampling exhausted its budget.
    """
    if n < 1:
        raise ValueError("need at least one camera")
    gen = SplitMix64(seed)
    cams: List[PinholeCamera] = []
    tries = 0
    while len(cams) < n:
        tries += 1
        if tries > _MAX_TRIES * n:
            raise GenerationFailed("could not place cameras with positive depth")
        draws = gen.uniforms(7)
        uz = 0.35 + 0.6 * draws[0]
        phi = 2.0 * math.pi * draws[1]
        radius = 3.5 + 1.5 * draws[2]
        rho = math.sqrt(max(1.0 - uz * uz, 0.0))
        center = radius * np.array([rho * math.cos(phi), rho * math.sin(phi), uz])
        target = np.array([0.3 * (draws[3] - 0.5), 0.3 * (draws[4] - 0.5), 0.0])
        roll = 2.0 * math.pi * draws[5]
        focal = 0.8 + 0.7 * draws[6]
        rotation = _look_at_rotation(center, target, roll)
        cam = PinholeCamera(center=center, rotation=rotation, focal=focal)
        if scene is not None:
            depths = ((scene.points - center) @ rotation.T)[:, 2]
            if np.any(depths < _MIN_DEPTH):
                continue
        cams.append(cam)
    return cams


def perturb_out_of_plane(
    scene: Scene3D,
    delta: float,
    seed: int,
    frame_labels: Sequence[int] = (1, 2, 4, 3),
) -> Scene3D:
    """Move each non-frame landmark off the plane by a signed distance delta.

    Frame landmarks stay exactly planar so the registration frame itself
    never degenerates; signs are drawn from the seed.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return scene
    frame = set(int(x) for x in frame_labels)
    gen = SplitMix64(seed)
    offsets = np.zeros(scene.k)
    for label in range(1, scene.k + 1):
        if label in frame:
            continue
        offsets[label - 1] = delta if gen.uniform() < 0.5 else -delta
    pts = np.array(scene.points) + offsets[:, None] * scene.plane_normal[None, :]
    return Scene3D(
        points=pts,
        coplanar=False,
        plane_normal=scene.plane_normal,
        plane_offset=scene.plane_offset,
        out_of_plane_offsets=offsets,
    )


def synthesize_views(
    k: int,
    cameras: int,
    seed: int,
    delta: float = 0.0,
    noise: float = 0.0,
    frame_labels: Sequence[int] = (1, 2, 4, 3),
) -> List[LandmarkScene]:
    """One shared 3D scene photographed by `cameras` views, ids "1".."n".

    delta moves non-frame landmarks off-plane before projection; noise adds
    image-plane Gaussian jitter after projection (default off). Seeds for
    the scene, cameras, signs, and noise derive from the master seed.
    """
    master = SplitMix64(seed)
    scene_seed = master.next_u64()
    cam_seed = master.next_u64()
    perturb_seed = master.next_u64()
    noise_seed = master.next_u64()

    scene = random_coplanar_scene(k, scene_seed)
    if delta > 0.0:
        scene = perturb_out_of_plane(scene, delta, perturb_seed, frame_labels)
    cams = random_cameras(cameras, cam_seed, scene=scene)
    views = [project(cam, scene, scene_id=str(i + 1)) for i, cam in enumerate(cams)]
    if noise > 0.0:
        ngen = SplitMix64(noise_seed)
        noisy = []
        for view in views:
            jitter = noise * ngen.normals(2 * k).reshape(k, 2)
            noisy.append(LandmarkScene(view.scene_id, view.points + jitter))
        views = noisy
    return views


def _tangent_basis(direction: np.ndarray) -> np.ndarray:
    """(d-1, d) orthonormal rows spanning the tangent space at `direction`."""
    d = direction.size
    rows = []
    for i in range(d):
        v = np.zeros(d)
        v[i] = 1.0
        v = v - (v @ direction) * direction
        for b in rows:
            v = v - (v @ b) * b
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            rows.append(v / norm)
        if len(rows) == d - 1:
            break
    return np.stack(rows)


def tangent_gaussian_sample(direction, sigma: float, n: int, seed: int) -> np.ndarray:
    """n unit vectors: normalize(direction + tangent noise), noise ~ N(0, sigma^2).

    Returns an (n, d) array. sigma = 0 repeats the direction exactly.
    """
    mu = np.asarray(direction, dtype=np.float64).ravel()
    norm = float(np.linalg.norm(mu))
    if norm <= 1e-12:
        raise ValueError("direction must be nonzero")
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if n < 1:
        raise ValueError("need n >= 1 draws")
    mu = mu / norm
    d = mu.size
    basis = _tangent_basis(mu)
    gen = SplitMix64(seed)
    coeffs = sigma * gen.normals(n * (d - 1)).reshape(n, d - 1)
    raw = mu[None, :] + coeffs @ basis
    return raw / np.linalg.norm(raw, axis=1)[:, None]
