"""Random-scene generation, the method-comparison harness, and file formats.

Scenes are seeded and fully reproducible: fixed seeds give byte-identical
serializations. The harness times each (config, seed, method) cell with a
monotonic clock, audits trajectory coverage before recording a row, and
aggregates mean/std per method and scene size.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractError
from .geom import Point3, Region, Sampled, Scene, SceneObject, Shell, Sphere, Tour, Visit, tour_length
from .planner import (
    SimulationOracle,
    alpha_fat_baseline,
    center_visit,
    missed_objects,
    plan_nondisjoint,
    plan_online,
)
from .tsp import TspConfig

METHODS = ("center-visit", "alpha-fat", "online")
REJECTION_LIMIT = 10_000


@dataclass(frozen=True)
class SceneConfig:
    n_objects: int
    d_min: float
    d_max: float
    cube_edge: float = 100.0
    disjoint: bool = True
    overlap_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_objects < 0:
            raise ContractError("n_objects must be >= 0")
        if not (0 < self.d_min <= self.d_max < self.cube_edge):
            raise ContractError(
                f"need 0 < d_min <= d_max < cube_edge, got "
                f"({self.d_min}, {self.d_max}, {self.cube_edge})"
            )
        if not (0.0 <= self.overlap_rate <= 1.0):
            raise ContractError("overlap_rate must be in [0, 1]")


def generate_scene(config: SceneConfig) -> Scene:
    """Draw a seeded random scene of spheres with realized diameters.

    Centers are uniform in the cube; per-object ground-truth diameters are
    uniform in [d_min, d_max]. Disjoint scenes rejection-sample centers so
    the outer d_max balls stay pairwise disjoint; a capacity error names
    the achieved count if packing stalls. Non-disjoint scenes place an
    ``overlap_rate`` fraction of centers within d_min of a prior center.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_objects
    diameters = rng.uniform(config.d_min, config.d_max, size=n)
    centers: list[np.ndarray] = []
    if config.disjoint:
        rejections = 0
        while len(centers) < n:
            c = rng.uniform(0.0, config.cube_edge, size=3)
            if all(np.linalg.norm(c - e) > config.d_max for e in centers):
                centers.append(c)
                rejections = 0
            else:
                rejections += 1
                if rejections >= REJECTION_LIMIT:
                    raise CapacityError(
                        f"placed only {len(centers)} of {n} disjoint objects in a "
                        f"{config.cube_edge} m cube after {REJECTION_LIMIT} consecutive rejections",
                        placed=len(centers),
                    )
        objects = tuple(
            SceneObject(
                id=f"obj-{i:03d}",
                region=Region(center=Point3.from_array(centers[i]), shape=Sphere(float(diameters[i]))),
            )
            for i in range(n)
        )
        return Scene(
            objects=objects,
            d_min_global=config.d_min,
            d_max_global=config.d_max,
            cube_edge=config.cube_edge,
        )

    n_overlap = int(math.floor(config.overlap_rate * n)) if n > 1 else 0
    for _ in range(n - n_overlap):
        centers.append(rng.uniform(0.0, config.cube_edge, size=3))
    for _ in range(n_overlap):
        # overlapping placement: within d_min of a previously placed center
        while True:
            base = centers[int(rng.integers(0, len(centers)))]
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            r = config.d_min * float(rng.uniform(0.25, 1.0))
            c = base + u * r
            if np.all((c >= 0.0) & (c <= config.cube_edge)):
                break
        centers.append(c)
    objects = tuple(
        SceneObject(
            id=f"obj-{i:03d}",
            region=Region(center=Point3.from_array(centers[i]), shape=Sphere(float(diameters[i]))),
        )
        for i in range(n)
    )
    return Scene(
        objects=objects,
        d_min_global=config.d_min,
        d_max_global=config.d_max,
        cube_edge=config.cube_edge,
    )


# ------------------------------------------------------------------ JSON formats


def _shape_to_json(region: Region) -> dict:
    s = region.shape
    if isinstance(s, Sphere):
        return {"kind": "sphere", "diameter_m": float(s.diameter)}
    if isinstance(s, Shell):
        return {
            "kind": "shell",
            "inner_diameter_m": float(s.inner_diameter),
            "outer_diameter_m": float(s.outer_diameter),
        }
    assert isinstance(s, Sampled)
    return {
        "kind": "sampled",
        "points_m": [[float(v) for v in row] for row in s.points],
        "normals": [[float(v) for v in row] for row in s.normals],
        "d_min_m": float(s.d_min),
        "d_max_m": float(s.d_max),
    }


def _shape_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "sphere":
        return Sphere(diameter=float(obj["diameter_m"]))
    if kind == "shell":
        return Shell(
            inner_diameter=float(obj["inner_diameter_m"]),
            outer_diameter=float(obj["outer_diameter_m"]),
        )
    if kind == "sampled":
        return Sampled(
            points=np.array(obj["points_m"], dtype=float),
            normals=np.array(obj["normals"], dtype=float),
            d_min=float(obj["d_min_m"]),
            d_max=float(obj["d_max_m"]),
        )
    raise ContractError(f"unknown shape kind {kind!r}")


def scene_to_json(scene: Scene) -> str:
    doc = {
        "cube_edge_m": float(scene.cube_edge),
        "d_min_m": float(scene.d_min_global),
        "d_max_m": float(scene.d_max_global),
        "objects": [
            {
                "id": obj.id,
                "center_m": [obj.region.center.x, obj.region.center.y, obj.region.center.z],
                "shape": _shape_to_json(obj.region),
            }
            for obj in scene.objects
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def scene_from_json(text: str) -> Scene:
    doc = json.loads(text)
    objects = tuple(
        SceneObject(
            id=o["id"],
            region=Region(center=Point3(*o["center_m"]), shape=_shape_from_json(o["shape"])),
        )
        for o in doc["objects"]
    )
    return Scene(
        objects=objects,
        d_min_global=float(doc["d_min_m"]),
        d_max_global=float(doc["d_max_m"]),
        cube_edge=float(doc["cube_edge_m"]),
    )


def tour_to_json(tour: Tour) -> str:
    doc = {
        "length_m": tour_length(tour),
        "waypoints_m": [[p.x, p.y, p.z] for p in tour.waypoints],
        "visits": [
            {"object_id": v.object_id, "waypoint_index": v.waypoint_index} for v in tour.visits
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def tour_from_json(text: str) -> Tour:
    doc = json.loads(text)
    return Tour(
        waypoints=tuple(Point3(*w) for w in doc["waypoints_m"]),
        closed=False,
        visits=tuple(
            Visit(object_id=v["object_id"], waypoint_index=int(v["waypoint_index"]))
            for v in doc["visits"]
        ),
    )


# ------------------------------------------------------------------ comparison harness


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    n_objects: int
    seed: int
    length_m: float
    runtime_s: float
    valid: bool


@dataclass(frozen=True)
class Aggregate:
    method: str
    n_objects: int
    mean_length_m: float
    std_length_m: float
    mean_runtime_s: float


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    aggregates: tuple[Aggregate, ...]

    @property
    def has_invalid_rows(self) -> bool:
        return any(not r.valid for r in self.rows)

    def mean_length(self, method: str, n_objects: int) -> float:
        for agg in self.aggregates:
            if agg.method == method and agg.n_objects == n_objects:
                return agg.mean_length_m
        raise KeyError((method, n_objects))

    def mean_runtime(self, method: str, n_objects: int) -> float:
        for agg in self.aggregates:
            if agg.method == method and agg.n_objects == n_objects:
                return agg.mean_runtime_s
        raise KeyError((method, n_objects))


def _run_cell(
    config: SceneConfig,
    seed: int,
    method: str,
    start: Point3,
    samples_per_region: int,
    tsp: TspConfig,
) -> ComparisonRow:
    scene_cfg = SceneConfig(
        n_objects=config.n_objects,
        d_min=config.d_min,
        d_max=config.d_max,
        cube_edge=config.cube_edge,
        disjoint=config.disjoint,
        overlap_rate=config.overlap_rate,
        seed=seed,
    )
    scene = generate_scene(scene_cfg)
    t0 = time.monotonic()
    if method == "center-visit":
        tour = center_visit(start, scene, tsp) if config.disjoint else plan_nondisjoint(start, scene, tsp)
    elif method == "alpha-fat":
        tour = alpha_fat_baseline(start, scene, samples_per_region=samples_per_region, tsp=tsp)
    elif method == "online":
        centers = [(obj.id, obj.region.center) for obj in scene.objects]
        oracle = SimulationOracle(
            centers,
            scene.d_min_global,
            scene.d_max_global,
            diameters={obj.id: obj.region.d_max for obj in scene.objects},
        )
        tour, _ = plan_online(
            start, centers, scene.d_min_global, scene.d_max_global, oracle, tsp
        )
    else:
        raise ContractError(f"unknown method {method!r}; choose from {METHODS}")
    runtime = time.monotonic() - t0
    valid = missed_objects(tour, scene) == []
    return ComparisonRow(
        method=method,
        n_objects=config.n_objects,
        seed=seed,
        length_m=tour_length(tour),
        runtime_s=runtime,
        valid=valid,
    )


def run_comparison(
    configs: list[SceneConfig],
    methods: list[str],
    seeds: int,
    start: Point3 | None = None,
    samples_per_region: int = 108,
    tsp: TspConfig | None = None,
    max_threads: int | None = None,
) -> ComparisonReport:
    """Plan every (config, seed, method) cell and aggregate lengths/runtimes.

    Scene seeds are ``config.seed + k`` for k in range(seeds). Coverage is
    audited before a row is recorded; failures mark the row invalid. Set
    ``max_threads`` (or the TSPN_THREADS environment variable) above 1 to
    fan cells out across a thread pool.
    """
    for m in methods:
        if m not in METHODS:
            raise ContractError(f"unknown method {m!r}; choose from {METHODS}")
    if seeds < 1:
        raise ContractError("seeds must be >= 1")
    if start is None:
        start = Point3(0.0, 0.0, 0.0)
    if tsp is None:
        tsp = TspConfig()
    if max_threads is None:
        max_threads = int(os.environ.get("TSPN_THREADS", "1"))

    cells = [
        (config, config.seed + k, method)
        for config in configs
        for k in range(seeds)
        for method in methods
    ]
    if max_threads > 1:
        with ThreadPoolExecutor(max_workers=max_threads) as pool:
            rows = list(
                pool.map(
                    lambda c: _run_cell(c[0], c[1], c[2], start, samples_per_region, tsp), cells
                )
            )
    else:
        rows = [_run_cell(c, s, m, start, samples_per_region, tsp) for c, s, m in cells]

    groups: dict[tuple[str, int], list[ComparisonRow]] = {}
    for row in rows:
        groups.setdefault((row.method, row.n_objects), []).append(row)
    aggregates = []
    for (method, n), grp in sorted(groups.items()):
        lengths = np.array([r.length_m for r in grp])
        runtimes = np.array([r.runtime_s for r in grp])
        std = float(np.std(lengths, ddof=1)) if len(grp) >= 2 else 0.0
        aggregates.append(
            Aggregate(
                method=method,
                n_objects=n,
                mean_length_m=float(np.mean(lengths)),
                std_length_m=std,
                mean_runtime_s=float(np.mean(runtimes)),
            )
        )
    return ComparisonReport(rows=tuple(rows), aggregates=tuple(aggregates))


ROWS_CSV_HEADER = ["method", "n_objects", "seed", "length_m", "runtime_s"]
AGG_CSV_HEADER = ["method", "n_objects", "mean_length_m", "std_length_m", "mean_runtime_s"]


def report_rows_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROWS_CSV_HEADER)
    for r in report.rows:
        writer.writerow([r.method, r.n_objects, r.seed, repr(r.length_m), repr(r.runtime_s)])
    return buf.getvalue()


def report_aggregates_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGG_CSV_HEADER)
    for a in report.aggregates:
        writer.writerow(
            [
                a.method,
                a.n_objects,
                repr(a.mean_length_m),
                repr(a.std_length_m),
                repr(a.mean_runtime_s),
            ]
        )
    return buf.getvalue()
