"""Command-line interface.

Subcommands cover scene generation, planning, the baseline, the online
planner, independent-set extraction, detour construction, viewing scores,
score-driven region construction, bound validation and the comparison
harness. All randomized commands take a required --seed and are
reproducible; exit status is 0 on success, 1 on contract errors and 2 on
I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import (
    SceneConfig,
    generate_scene,
    report_aggregates_csv,
    report_rows_csv,
    run_comparison,
    scene_from_json,
    scene_to_json,
    tour_from_json,
    tour_to_json,
)
from .errors import TspnError
from .geom import Point3, Sampled, Shell, Sphere
from .planner import (
    SimulationOracle,
    alpha_fat_baseline,
    build_detour,
    maximal_independent_set,
    plan_nondisjoint_detailed,
    plan_online,
    validate_bounds,
)
from .tsp import TspConfig
from .viewscore import (
    DIAMETER_PROFILES,
    build_region_from_scores,
    read_mask_pgm,
    read_pgm,
    read_score_csv,
    region_from_profile,
    viewing_score,
)


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems with exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}")


def _parse_point(text: str) -> Point3:
    parts = text.split(",")
    if len(parts) != 3:
        raise TspnError(f"expected x,y,z coordinates, got {text!r}")
    return Point3(float(parts[0]), float(parts[1]), float(parts[2]))


def _read_scene(path):
    with open(path) as f:
        return scene_from_json(f.read())


def _write(path, text: str) -> None:
    with open(path, "w") as f:
        f.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tspn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-scene", help="generate a seeded random scene")
    p.add_argument("--n", type=int, required=True, help="number of objects")
    p.add_argument("--cube-edge", type=float, default=100.0, help="cube edge length (m)")
    p.add_argument("--dmin", type=float, required=True, help="global minimum diameter (m)")
    p.add_argument("--dmax", type=float, required=True, help="global maximum diameter (m)")
    p.add_argument("--disjoint", action="store_true", help="reject overlapping outer balls")
    p.add_argument("--overlap-rate", type=float, default=0.0,
                   help="fraction of centers placed within dmin of a prior center")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--out", required=True, help="output scene JSON path")

    p = sub.add_parser("plan", help="plan a tour touching every region")
    p.add_argument("--scene", required=True, help="scene JSON path")
    p.add_argument("--start", default="0,0,0", help="start position x,y,z (m)")
    p.add_argument("--solver", choices=["exact", "heuristic"], default="heuristic")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--out", required=True, help="output trajectory JSON path")

    p = sub.add_parser("baseline", help="surface-representative baseline tour")
    p.add_argument("--scene", required=True)
    p.add_argument("--start", default="0,0,0")
    p.add_argument("--samples", type=int, default=108, help="boundary samples per region")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("online", help="online hollow-ball planning with a detection oracle")
    p.add_argument("--scene", required=True)
    p.add_argument("--start", default="0,0,0")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--outcomes", help="optional detection-outcomes JSON path")

    p = sub.add_parser("mis", help="greedy maximal independent set of a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("detour", help="perimeter-and-spike detour around one region")
    p.add_argument("--scene", required=True)
    p.add_argument("--object", required=True, help="object id owning the detour")
    p.add_argument("--perimeter-step", type=float, help="perimeter sampling step (m)")
    p.add_argument("--spike-spacing", type=float, help="arc spacing between spikes (m)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("score", help="viewing score of an image/mask pair")
    p.add_argument("--image", required=True, help="grayscale PGM (P5)")
    p.add_argument("--mask", required=True, help="object mask PGM (nonzero = object)")
    p.add_argument("--edge-fraction", type=float, default=0.1)

    p = sub.add_parser("region", help="build a detection region from scored views")
    p.add_argument("--center", required=True, help="object center x,y,z (m)")
    p.add_argument("--scores", help="view-score CSV (azimuth_rad,elevation_rad,distance_m,score)")
    p.add_argument("--threshold", type=float, default=0.3)
    p.add_argument("--profile", choices=sorted(DIAMETER_PROFILES),
                   help="class defaults used when no score table is supplied")
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="evaluate analytic bounds for a planned tour")
    p.add_argument("--scene", required=True)
    p.add_argument("--traj", required=True)
    p.add_argument("--out", help="optional report JSON path (stdout otherwise)")

    p = sub.add_parser("compare", help="run the method-comparison harness")
    p.add_argument("--profile", choices=sorted(DIAMETER_PROFILES),
                   help="bind dmin/dmax from a class profile")
    p.add_argument("--dmin", type=float)
    p.add_argument("--dmax", type=float)
    p.add_argument("--n", type=int, required=True, help="objects per scene")
    p.add_argument("--cube-edge", type=float, default=100.0)
    p.add_argument("--seeds", type=int, default=10, help="number of seeded repetitions")
    p.add_argument("--seed", type=int, required=True, help="base seed")
    p.add_argument("--methods", default="center-visit,alpha-fat",
                   help="comma-separated method ids")
    p.add_argument("--samples", type=int, default=108)
    p.add_argument("--overlap-rate", type=float, default=0.0)
    p.add_argument("--nondisjoint", action="store_true")
    p.add_argument("--out", required=True, help="per-run rows CSV path")
    p.add_argument("--aggregate-out", help="optional aggregate CSV path")
    return parser


def _region_to_json(obj_id: str, region) -> dict:
    s = region.shape
    if isinstance(s, Sphere):
        shape = {"kind": "sphere", "diameter_m": float(s.diameter)}
    elif isinstance(s, Shell):
        shape = {
            "kind": "shell",
            "inner_diameter_m": float(s.inner_diameter),
            "outer_diameter_m": float(s.outer_diameter),
        }
    else:
        assert isinstance(s, Sampled)
        shape = {
            "kind": "sampled",
            "points_m": [[float(v) for v in row] for row in s.points],
            "normals": [[float(v) for v in row] for row in s.normals],
            "d_min_m": float(s.d_min),
            "d_max_m": float(s.d_max),
        }
    return {
        "id": obj_id,
        "center_m": [region.center.x, region.center.y, region.center.z],
        "shape": shape,
    }


def _cmd_gen_scene(args) -> int:
    cfg = SceneConfig(
        n_objects=args.n,
        d_min=args.dmin,
        d_max=args.dmax,
        cube_edge=args.cube_edge,
        disjoint=args.disjoint,
        overlap_rate=args.overlap_rate,
        seed=args.seed,
    )
    _write(args.out, scene_to_json(generate_scene(cfg)))
    return 0


def _cmd_plan(args) -> int:
    scene = _read_scene(args.scene)
    cfg = TspConfig(solver=args.solver, seed=args.seed)
    detail = plan_nondisjoint_detailed(_parse_point(args.start), scene, cfg)
    _write(args.out, tour_to_json(detail.tour))
    return 0


def _cmd_baseline(args) -> int:
    scene = _read_scene(args.scene)
    cfg = TspConfig(seed=args.seed)
    tour = alpha_fat_baseline(
        _parse_point(args.start), scene, samples_per_region=args.samples, tsp=cfg
    )
    _write(args.out, tour_to_json(tour))
    return 0


def _cmd_online(args) -> int:
    scene = _read_scene(args.scene)
    centers = [(obj.id, obj.region.center) for obj in scene.objects]
    rng = np.random.default_rng(args.seed)
    diameters = {}
    for obj in scene.objects:
        if isinstance(obj.region.shape, Sphere):
            diameters[obj.id] = float(obj.region.shape.diameter)
        else:
            diameters[obj.id] = float(rng.uniform(obj.region.d_min, obj.region.d_max))
    oracle = SimulationOracle(
        centers, scene.d_min_global, scene.d_max_global, diameters=diameters
    )
    tour, outcomes = plan_online(
        _parse_point(args.start),
        centers,
        scene.d_min_global,
        scene.d_max_global,
        oracle,
        TspConfig(seed=args.seed),
    )
    _write(args.out, tour_to_json(tour))
    if args.outcomes:
        doc = [
            {
                "object_id": o.object_id,
                "realized_diameter_m": o.realized_diameter,
                "detected_at_m": [o.detected_at.x, o.detected_at.y, o.detected_at.z],
            }
            for o in outcomes
        ]
        _write(args.outcomes, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_mis(args) -> int:
    scene = _read_scene(args.scene)
    res = maximal_independent_set(scene)
    doc = {"kept": list(res.kept), "assignment": dict(sorted(res.assignment.items()))}
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_detour(args) -> int:
    scene = _read_scene(args.scene)
    obj = scene.get(args.object)
    plan = build_detour(
        obj.region,
        scene.d_min_global,
        perimeter_step=args.perimeter_step,
        spike_spacing=args.spike_spacing,
        owner_id=obj.id,
    )
    doc = {
        "owner_id": plan.owner_id,
        "axis_m": [[p.x, p.y, p.z] for p in plan.axis],
        "length_m": plan.length,
        "perimeters_m": [[[q.x, q.y, q.z] for q in ring] for ring in plan.perimeters],
        "spikes_m": [
            {
                "c_in_m": [s.c_in.x, s.c_in.y, s.c_in.z],
                "c_out_m": [s.c_out.x, s.c_out.y, s.c_out.z],
            }
            for s in plan.spikes
        ],
        "stitched_m": [[p.x, p.y, p.z] for p in plan.stitched],
    }
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_score(args) -> int:
    image = read_pgm(args.image)
    mask = read_mask_pgm(args.mask)
    print(viewing_score(image, mask, edge_fraction=args.edge_fraction))
    return 0


def _cmd_region(args) -> int:
    center = _parse_point(args.center)
    if args.scores:
        samples = read_score_csv(args.scores)
        region = build_region_from_scores(center, samples, threshold=args.threshold)
    elif args.profile:
        region = region_from_profile(center, args.profile)
    else:
        raise TspnError("provide --scores or --profile")
    _write(args.out, json.dumps(_region_to_json("region-0", region), indent=2) + "\n")
    return 0


def _cmd_validate(args) -> int:
    scene = _read_scene(args.scene)
    with open(args.traj) as f:
        tour = tour_from_json(f.read())
    report = validate_bounds(scene, tour)
    doc = {
        "n_objects": report.n_objects,
        "tour_length_m": report.tour_length,
        "count_bound": report.count_bound,
        "count_bound_applicable": report.count_bound_applicable,
        "count_bound_holds": report.count_bound_holds,
        "online_lower_bound_m": report.online_lower_bound,
        "online_lower_bound_holds": report.online_lower_bound_holds,
        "length_over_lower_bound": report.length_over_lower_bound,
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_compare(args) -> int:
    d_min, d_max = args.dmin, args.dmax
    if args.profile:
        prof = DIAMETER_PROFILES[args.profile]
        d_min = prof.d_min if d_min is None else d_min
        d_max = prof.d_max if d_max is None else d_max
    if d_min is None or d_max is None:
        raise TspnError("provide --profile or both --dmin and --dmax")
    cfg = SceneConfig(
        n_objects=args.n,
        d_min=d_min,
        d_max=d_max,
        cube_edge=args.cube_edge,
        disjoint=not args.nondisjoint,
        overlap_rate=args.overlap_rate,
        seed=args.seed,
    )
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    report = run_comparison(
        [cfg], methods, seeds=args.seeds, samples_per_region=args.samples
    )
    _write(args.out, report_rows_csv(report))
    if args.aggregate_out:
        _write(args.aggregate_out, report_aggregates_csv(report))
    if report.has_invalid_rows:
        print("warning: some rows failed the coverage audit", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "gen-scene": _cmd_gen_scene,
    "plan": _cmd_plan,
    "baseline": _cmd_baseline,
    "online": _cmd_online,
    "mis": _cmd_mis,
    "detour": _cmd_detour,
    "score": _cmd_score,
    "region": _cmd_region,
    "validate": _cmd_validate,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        # argparse --help exits 0; usage errors carry a message string
        if exc.code in (0, None):
            return 0
        if isinstance(exc.code, int):
            return exc.code
        print(exc.code, file=sys.stderr)
        return 1
    except TspnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
