"""Tour planning over diameter-bounded 3D detection regions."""

from .errors import (
    CapacityError,
    ContractError,
    DegenerateDetectionError,
    InsufficientCoverageError,
    InvalidRegionError,
    SizeLimitError,
    TspnError,
)
from .geom import (
    Point3,
    Region,
    Sampled,
    Scene,
    SceneObject,
    Shell,
    Sphere,
    Tour,
    Visit,
    closest_point_on_region,
    max_diameter_segment,
    region_contains,
    regions_intersect,
    tour_length,
    touch_tolerance,
)
from .tsp import TspConfig, exact_tour, heuristic_tour, solve_tour
from .planner import (
    BoundReport,
    DetectionOutcome,
    DetourPlan,
    MisResult,
    SimulationOracle,
    alpha_fat_baseline,
    build_detour,
    center_visit,
    maximal_independent_set,
    missed_objects,
    plan_nondisjoint,
    plan_nondisjoint_detailed,
    plan_online,
    validate_bounds,
)
from .viewscore import (
    DIAMETER_PROFILES,
    GrayImage,
    ObjectMask,
    OrientationHistogram,
    ViewSample,
    build_region_from_scores,
    edge_orientation_histogram,
    region_from_profile,
    viewing_score,
)
from .bench import (
    ComparisonReport,
    SceneConfig,
    generate_scene,
    run_comparison,
    scene_from_json,
    scene_to_json,
    tour_from_json,
    tour_to_json,
)

__all__ = [
    "CapacityError",
    "ContractError",
    "DegenerateDetectionError",
    "InsufficientCoverageError",
    "InvalidRegionError",
    "SizeLimitError",
    "TspnError",
    "Point3",
    "Region",
    "Sampled",
    "Scene",
    "SceneObject",
    "Shell",
    "Sphere",
    "Tour",
    "Visit",
    "closest_point_on_region",
    "max_diameter_segment",
    "region_contains",
    "regions_intersect",
    "tour_length",
    "touch_tolerance",
    "TspConfig",
    "exact_tour",
    "heuristic_tour",
    "solve_tour",
    "BoundReport",
    "DetectionOutcome",
    "DetourPlan",
    "MisResult",
    "SimulationOracle",
    "alpha_fat_baseline",
    "build_detour",
    "center_visit",
    "maximal_independent_set",
    "missed_objects",
    "plan_nondisjoint",
    "plan_nondisjoint_detailed",
    "plan_online",
    "validate_bounds",
    "DIAMETER_PROFILES",
    "GrayImage",
    "ObjectMask",
    "OrientationHistogram",
    "ViewSample",
    "build_region_from_scores",
    "edge_orientation_histogram",
    "region_from_profile",
    "viewing_score",
    "ComparisonReport",
    "SceneConfig",
    "generate_scene",
    "run_comparison",
    "scene_from_json",
    "scene_to_json",
    "tour_from_json",
    "tour_to_json",
]
