"""Core 3D primitives: points, diameter-bounded regions, scenes and tours.

Regions come in three shapes. ``Sphere`` and ``Shell`` are exact solids
(a ball, and the solid between two concentric spheres). ``Sampled`` is a
non-convex region represented by a boundary point cloud with outward
normals; containment and closest-point queries on it are approximate at
the sampling resolution, which is why sampled shapes carry a larger touch
tolerance than exact ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ContractError, InvalidRegionError

# Relative slack used by shape invariants (farthest-pair vs d_max, etc.).
EPS_TOL = 1e-9

# Touch tolerances: exact solids get a hair above float noise, sampled
# boundaries get a fraction of their minimum diameter (discretization).
EXACT_TOUCH_FRACTION = 1e-6
SAMPLED_TOUCH_FRACTION = 0.05


@dataclass(frozen=True)
class Point3:
    """A position in meters. Coordinates must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ContractError(f"non-finite coordinate in Point3: {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a) -> "Point3":
        return Point3(float(a[0]), float(a[1]), float(a[2]))

    def distance_to(self, other: "Point3") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class Sphere:
    """Solid ball given by its diameter."""

    diameter: float


@dataclass(frozen=True)
class Shell:
    """Solid between two concentric spheres (a hollow ball)."""

    inner_diameter: float
    outer_diameter: float


@dataclass(frozen=True, eq=False)
class Sampled:
    """Boundary point cloud with outward unit normals.

    ``points`` and ``normals`` are (n, 3) float arrays; they are frozen
    read-only on construction. The region is assumed star-shaped about
    its center, so containment can use a nearest-direction radial test.
    """

    points: np.ndarray
    normals: np.ndarray
    d_min: float
    d_max: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        nms = np.asarray(self.normals, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nms)
        pts.flags.writeable = False
        nms.flags.writeable = False


Shape = Union[Sphere, Shell, Sampled]


@dataclass(frozen=True, eq=False)
class Region:
    """A diameter-bounded detection region around a center point."""

    center: Point3
    shape: Shape

    def __post_init__(self):
        _validate_region(self)

    @property
    def d_min(self) -> float:
        s = self.shape
        if isinstance(s, Sphere):
            return s.diameter
        if isinstance(s, Shell):
            return s.inner_diameter
        return s.d_min

    @property
    def d_max(self) -> float:
        s = self.shape
        if isinstance(s, Sphere):
            return s.diameter
        if isinstance(s, Shell):
            return s.outer_diameter
        return s.d_max


def _validate_region(region: Region) -> None:
    s = region.shape
    if isinstance(s, Sphere):
        if not (math.isfinite(s.diameter) and s.diameter > 0):
            raise InvalidRegionError(f"sphere diameter must be positive, got {s.diameter}")
        return
    if isinstance(s, Shell):
        if not (0 < s.inner_diameter <= s.outer_diameter) or not math.isfinite(s.outer_diameter):
            raise InvalidRegionError(
                f"shell needs 0 < inner <= outer, got ({s.inner_diameter}, {s.outer_diameter})"
            )
        return
    if isinstance(s, Sampled):
        pts = s.points
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
            raise InvalidRegionError("sampled region has no boundary points")
        if pts.shape[0] < 8:
            raise InvalidRegionError(f"sampled region needs >= 8 boundary points, got {pts.shape[0]}")
        if s.normals.shape != pts.shape:
            raise InvalidRegionError("boundary normals must pair 1:1 with boundary points")
        if not np.all(np.isfinite(pts)):
            raise InvalidRegionError("sampled boundary contains non-finite points")
        if not (0 < s.d_min <= s.d_max) or not math.isfinite(s.d_max):
            raise InvalidRegionError(f"need 0 < d_min <= d_max, got ({s.d_min}, {s.d_max})")
        c = region.center.as_array()
        radii = np.linalg.norm(pts - c, axis=1)
        if np.any(radii > s.d_max / 2.0 * (1.0 + EPS_TOL) + EPS_TOL):
            raise InvalidRegionError("boundary point farther than d_max/2 from center")
        far = farthest_pair_distance(pts)
        if far > s.d_max * (1.0 + EPS_TOL) + EPS_TOL:
            raise InvalidRegionError(
                f"farthest boundary pair {far:.6g} exceeds d_max {s.d_max:.6g}"
            )
        return
    raise InvalidRegionError(f"unknown shape {type(s).__name__}")


def farthest_pair_distance(points: np.ndarray) -> float:
    """Max pairwise Euclidean distance, chunked to bound memory."""
    n = points.shape[0]
    best = 0.0
    step = 512
    for i in range(0, n, step):
        block = points[i : i + step]
        d2 = np.sum((block[:, None, :] - points[None, :, :]) ** 2, axis=2)
        best = max(best, float(np.sqrt(d2.max())))
    return best


def touch_tolerance(region: Region, d_min_global: float | None = None) -> float:
    """Containment slack for a region.

    Exact shapes use a tiny fraction of the scene-wide minimum diameter
    (falling back to the region's own d_min); sampled boundaries get a
    fraction of their d_min to absorb discretization.
    """
    if isinstance(region.shape, Sampled):
        return SAMPLED_TOUCH_FRACTION * region.d_min
    base = d_min_global if d_min_global is not None else region.d_min
    return EXACT_TOUCH_FRACTION * base


def region_contains(region: Region, p: Point3, tol: float | None = None) -> bool:
    """True if ``p`` lies in the region solid within tolerance."""
    if tol is None:
        tol = touch_tolerance(region)
    c = region.center.as_array()
    v = p.as_array() - c
    r = float(np.linalg.norm(v))
    s = region.shape
    if isinstance(s, Sphere):
        return r <= s.diameter / 2.0 + tol
    if isinstance(s, Shell):
        return s.inner_diameter / 2.0 - tol <= r <= s.outer_diameter / 2.0 + tol
    radii = np.linalg.norm(s.points - c, axis=1)
    inner = float(radii.min())
    if r <= inner + tol:
        return True
    if r > float(radii.max()) + tol:
        return False
    # Star-shaped radial test against the nearest-direction boundary sample.
    u = v / r
    dirs = (s.points - c) / radii[:, None]
    idx = int(np.argmax(dirs @ u))
    return r <= radii[idx] + tol


def closest_point_on_region(region: Region, p: Point3) -> Point3:
    """Point of the region minimizing distance to ``p``.

    Spheres and shells are solids: a point already inside is returned
    unchanged, otherwise ``p`` is projected radially onto the nearest
    bounding sphere. Sampled regions answer with their nearest boundary
    sample (ties broken by lowest index).
    """
    c = region.center.as_array()
    s = region.shape
    if isinstance(s, Sampled):
        if s.points.shape[0] == 0:
            raise InvalidRegionError("sampled region has no boundary points")
        d2 = np.sum((s.points - p.as_array()) ** 2, axis=1)
        return Point3.from_array(s.points[int(np.argmin(d2))])
    v = p.as_array() - c
    r = float(np.linalg.norm(v))
    if isinstance(s, Sphere):
        rad = s.diameter / 2.0
        if r <= rad:
            return p
        return Point3.from_array(c + v * (rad / r))
    r_in = s.inner_diameter / 2.0
    r_out = s.outer_diameter / 2.0
    if r_in <= r <= r_out:
        return p
    if r > r_out:
        return Point3.from_array(c + v * (r_out / r))
    if r == 0.0:
        # Center of the hole: any inner-sphere point is closest; fix +x.
        return Point3.from_array(c + np.array([r_in, 0.0, 0.0]))
    return Point3.from_array(c + v * (r_in / r))


def _ball_intervals(region: Region) -> tuple[float, float]:
    """(inner_radius, outer_radius) of the solid for exact shapes."""
    s = region.shape
    if isinstance(s, Sphere):
        return 0.0, s.diameter / 2.0
    if isinstance(s, Shell):
        return s.inner_diameter / 2.0, s.outer_diameter / 2.0
    raise TypeError("exact shape expected")


def regions_intersect(a: Region, b: Region) -> bool:
    """True if the two region solids overlap.

    Sphere/shell pairs are decided analytically. Any pair involving a
    sampled boundary is decided by testing boundary samples of one
    region for containment in the other, both ways.
    """
    sa, sb = a.shape, b.shape
    if not isinstance(sa, Sampled) and not isinstance(sb, Sampled):
        dist = a.center.distance_to(b.center)
        in_a, out_a = _ball_intervals(a)
        in_b, out_b = _ball_intervals(b)
        if dist > out_a + out_b:
            return False
        # One solid entirely inside the other's hole.
        if dist + out_a < in_b or dist + out_b < in_a:
            return False
        return True
    for first, second in ((a, b), (b, a)):
        if not isinstance(first.shape, Sampled):
            continue
        tol = touch_tolerance(second)
        pts = first.shape.points
        if isinstance(second.shape, (Sphere, Shell)):
            dists = np.linalg.norm(pts - second.center.as_array(), axis=1)
            r_in, r_out = _ball_intervals(second)
            if np.any((dists >= r_in - tol) & (dists <= r_out + tol)):
                return True
            continue
        for i in range(pts.shape[0]):
            if region_contains(second, Point3.from_array(pts[i]), tol=tol):
                return True
    return False


def max_diameter_segment(region: Region) -> tuple[Point3, Point3]:
    """Endpoints of a farthest pair of the region.

    Spheres and shells return the antipodal pair along world +x (a fixed
    deterministic choice). Sampled regions scan all boundary pairs.
    """
    c = region.center.as_array()
    s = region.shape
    if isinstance(s, (Sphere, Shell)):
        rad = region.d_max / 2.0
        off = np.array([rad, 0.0, 0.0])
        return Point3.from_array(c - off), Point3.from_array(c + off)
    pts = s.points
    n = pts.shape[0]
    best = (-1.0, 0, 0)
    step = 512
    for i in range(0, n, step):
        block = pts[i : i + step]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        k = int(np.argmax(d2))
        bi, bj = divmod(k, n)
        val = float(d2[bi, bj])
        if val > best[0]:
            best = (val, i + bi, bj)
    i, j = best[1], best[2]
    if i > j:
        i, j = j, i
    return Point3.from_array(pts[i]), Point3.from_array(pts[j])


@dataclass(frozen=True)
class SceneObject:
    id: str
    region: Region


@dataclass(frozen=True, eq=False)
class Scene:
    """A set of objects with global diameter bounds inside a cube."""

    objects: tuple[SceneObject, ...]
    d_min_global: float
    d_max_global: float
    cube_edge: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if not (0 < self.d_min_global <= self.d_max_global):
            raise ContractError(
                f"need 0 < d_min_global <= d_max_global, got ({self.d_min_global}, {self.d_max_global})"
            )
        seen = set()
        for obj in self.objects:
            if obj.id in seen:
                raise ContractError(f"duplicate object id {obj.id!r}")
            seen.add(obj.id)
            r = obj.region
            if r.d_min < self.d_min_global * (1.0 - EPS_TOL) or r.d_max > self.d_max_global * (
                1.0 + EPS_TOL
            ):
                raise ContractError(
                    f"object {obj.id!r} diameters [{r.d_min}, {r.d_max}] outside global "
                    f"bounds [{self.d_min_global}, {self.d_max_global}]"
                )

    def __len__(self) -> int:
        return len(self.objects)

    def get(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)


@dataclass(frozen=True)
class Visit:
    object_id: str
    waypoint_index: int


@dataclass(frozen=True, eq=False)
class Tour:
    """Ordered waypoints with per-object visit annotations."""

    waypoints: tuple[Point3, ...]
    closed: bool = False
    visits: tuple[Visit, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "visits", tuple(self.visits))
        n = len(self.waypoints)
        for v in self.visits:
            if not (0 <= v.waypoint_index < n):
                raise ContractError(f"visit index {v.waypoint_index} out of range")

    @property
    def length(self) -> float:
        return tour_length(self)


def tour_length(tour: Tour) -> float:
    """Sum of consecutive edge lengths, plus the closing edge if closed."""
    pts = tour.waypoints
    if len(pts) <= 1:
        return 0.0
    arr = np.array([[p.x, p.y, p.z] for p in pts], dtype=float)
    total = float(np.sum(np.linalg.norm(np.diff(arr, axis=0), axis=1)))
    if tour.closed:
        total += float(np.linalg.norm(arr[-1] - arr[0]))
    return total


def waypoints_array(tour: Tour) -> np.ndarray:
    """(n, 3) array view of the tour's waypoints."""
    return np.array([[p.x, p.y, p.z] for p in tour.waypoints], dtype=float)
