"""Command line interface: ``python3 -m geotomo <command> ...``.

Exit codes: 0 the command ran, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bodies import BodySpec, ConvexBody, half_ellipse_profile, load_body_spec, make_body
from .characterize import VerifyConfig, verify_theorem
from .errors import GeotomoError
from .geometry import AffineLine, Hyperplane, hyperplane_basis, random_rotation, reflect_point, unit
from .shadow import is_segment_free, planarity, reflection_iteration, shadow_boundary, supporting_line, write_trace_csv
from .tomography import DirectionGrid, classify_point

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    body_path: str | None = None
    point: np.ndarray | None = None
    hyperplane: Hyperplane | None = None
    grid: int = 400
    tol: float = 1e-2
    resolution: int = 256
    seed: int = 0
    out_path: str | None = None
    threads: int | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not 0.0 < self.tol <= 0.1:
            raise InputError("--tol must lie in (0, 0.1]")
        if self.grid < 16:
            raise InputError("--grid must be at least 16")
        if self.resolution < 16:
            raise InputError("--resolution must be at least 16")


# ------------------------------------------------------------------ parsing


def parse_vector(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad vector {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InputError(f"bad vector {text!r}")
    return np.array(vals)


def parse_hyperplane(text: str) -> Hyperplane:
    """``NX,NY,NZ:OFFSET`` (the offset defaults to 0)."""
    normal, _, offset = text.partition(":")
    n = parse_vector(normal)
    if np.linalg.norm(n) == 0:
        raise InputError("hyperplane normal must be nonzero")
    try:
        d = float(offset) if offset else 0.0
    except ValueError as exc:
        raise InputError(f"bad hyperplane offset {offset!r}") from exc
    scale = float(np.linalg.norm(n))
    return Hyperplane(n / scale, d / scale)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent if str(path.parent) else ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(cfg: RunConfig, payload: dict) -> None:
    text = dumps(payload)
    if cfg.out_path:
        write_atomic(cfg.out_path, text)
    else:
        sys.stdout.write(text)


def load_body(cfg: RunConfig) -> ConvexBody:
    if not cfg.body_path:
        raise InputError("--body is required")
    if not os.path.isfile(cfg.body_path):
        raise InputError(f"body file not found: {cfg.body_path}")
    return make_body(load_body_spec(cfg.body_path), cfg.resolution)


def _grid(cfg: RunConfig) -> DirectionGrid:
    grid = DirectionGrid.hemisphere(cfg.grid)
    if cfg.seed:
        grid = grid.rotated(random_rotation(np.random.default_rng(cfg.seed), 3))
    return grid


def _params(cfg: RunConfig) -> dict:
    return {"grid": cfg.grid, "tol": cfg.tol, "resolution": cfg.resolution, "seed": cfg.seed}


# ----------------------------------------------------------------- commands


def cmd_classify(cfg: RunConfig) -> int:
    body = load_body(cfg)
    if cfg.point is None:
        raise InputError("--point is required")
    report = classify_point(body, cfg.point, _grid(cfg), cfg.tol, cfg.threads)
    payload = report.to_dict()
    payload["parameters"].update(_params(cfg))
    payload["point"] = cfg.point
    emit(cfg, payload)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    body = load_body(cfg)
    if cfg.point is None or cfg.hyperplane is None:
        raise InputError("--point and --H are required")
    vc = VerifyConfig(tol=cfg.tol, grid=cfg.grid, threads=cfg.threads)
    report = verify_theorem(body, cfg.point, cfg.hyperplane, vc)
    payload = report.to_dict()
    payload["parameters"].update(_params(cfg))
    emit(cfg, payload)
    trace_dir = cfg.extra.get("traces")
    if trace_dir:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
        for name, trace in sorted(report.traces.items()):
            write_trace_csv(trace, Path(trace_dir) / f"trace_{name}.csv")
    return EXIT_OK


def cmd_shadow(cfg: RunConfig) -> int:
    body = load_body(cfg)
    u = cfg.extra.get("dir")
    if u is None:
        raise InputError("--dir is required")
    if np.linalg.norm(u) == 0:
        raise InputError("--dir must be nonzero")
    sb = shadow_boundary(body, unit(u), cfg.extra.get("angles", 256))
    rep = planarity(sb)
    payload = {
        "direction": sb.direction,
        "segment_free": is_segment_free(sb, cfg.extra.get("delta_seg", 0.02)),
        "max_contact_extent": float(sb.contact_extents.max()),
        "planarity": {
            "max_deviation": rep.max_deviation,
            "rms_deviation": rep.rms_deviation,
            "plane_normal": rep.plane.normal,
            "plane_offset": rep.plane.offset,
            "normal_dot_u": rep.normal_dot_u,
        },
        "parameters": {"angles": len(sb.points), "resolution": cfg.resolution},
    }
    emit(cfg, payload)
    csv_path = cfg.extra.get("csv")
    if csv_path:
        rows = ["angle,x,y,z,contact_extent"]
        rows += [
            f"{a:.17g},{x:.17g},{y:.17g},{z:.17g},{e:.17g}"
            for a, (x, y, z), e in zip(sb.angles, sb.points, sb.contact_extents)
        ]
        write_atomic(csv_path, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_iterate(cfg: RunConfig) -> int:
    body = load_body(cfg)
    p = cfg.extra.get("p") if cfg.extra.get("p") is not None else cfg.point
    H = cfg.hyperplane
    if p is None or H is None:
        raise InputError("--p and --H are required")
    q = cfg.extra.get("q")
    if q is None:
        q = reflect_point(p, H)
    g = cfg.extra.get("line_dir")
    g = hyperplane_basis(H.normal)[0] if g is None else unit(g)
    side = cfg.extra.get("side", 1.0)
    gamma0 = supporting_line(body, g, side * np.cross(H.normal, g))
    trace = reflection_iteration(body, p, q, gamma0, H, tol=cfg.extra.get("iter_tol", 1e-6),
                                 max_iter=cfg.extra.get("max_iter", 200))
    if cfg.out_path:
        write_trace_csv(trace, cfg.out_path + ".tmp")
        os.replace(cfg.out_path + ".tmp", cfg.out_path)
    summary = {
        "converged": trace.converged,
        "steps": len(trace.steps),
        "rate_estimate": trace.rate_estimate,
        "limit_even": None if trace.limit_even is None else {"point": trace.limit_even.point,
                                                              "direction": trace.limit_even.direction},
        "limit_odd": None if trace.limit_odd is None else {"point": trace.limit_odd.point,
                                                            "direction": trace.limit_odd.direction},
    }
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    x = cfg.extra
    kind = x.get("kind")
    fields: dict = {"kind": kind}
    if kind == "ellipsoid":
        fields["semiaxes"] = x.get("semiaxes")
        if x.get("center") is not None:
            fields["center"] = x["center"]
        if x.get("rotate_seed"):
            dim = len(fields["semiaxes"]) if fields["semiaxes"] is not None else 3
            fields["rotation"] = random_rotation(np.random.default_rng(x["rotate_seed"]), dim)
    elif kind == "revolution":
        if x.get("profile"):
            try:
                fields["profile"] = json.loads(x["profile"])
            except json.JSONDecodeError as exc:
                raise InputError(f"bad --profile JSON: {exc}") from exc
        else:
            r, h = x.get("semiaxes") if x.get("semiaxes") is not None else (1.0, 1.5)
            fields["profile"] = half_ellipse_profile(float(r), float(h))
        if x.get("axis") is not None:
            fields["axis"] = x["axis"]
    elif kind == "disc_hull":
        fields["radii"] = x.get("radii") if x.get("radii") is not None else (1.0, 1.0)
    elif kind == "polytope":
        if not x.get("vertices"):
            raise InputError("--vertices is required for polytopes")
        try:
            fields["vertices"] = json.loads(x["vertices"])
        except json.JSONDecodeError as exc:
            raise InputError(f"bad --vertices JSON: {exc}") from exc
    spec = BodySpec.from_dict(_jsonable(fields))
    make_body(spec, cfg.resolution)  # fail early on degenerate input
    text = json.dumps(spec.to_dict(), indent=2) + "\n"
    if cfg.out_path:
        write_atomic(cfg.out_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "verify": cmd_verify,
    "shadow": cmd_shadow,
    "iterate": cmd_iterate,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", help="body definition (JSON)")
    common.add_argument("--point", help="point X,Y,Z")
    common.add_argument("--H", dest="H", help="hyperplane NX,NY,NZ:OFFSET")
    common.add_argument("--grid", type=int, default=400, help="number of plane normals")
    common.add_argument("--tol", type=float, default=1e-2, help="relative symmetry tolerance")
    common.add_argument("--resolution", type=int, default=256, help="mesh resolution")
    common.add_argument("--seed", type=int, default=0, help="seed for the grid rotation (0 = none)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (GEOTOMO_THREADS overrides)")

    parser = argparse.ArgumentParser(prog="geotomo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="classify an interior point")
    v = sub.add_parser("verify", parents=[common], help="run the verification pipeline")
    v.add_argument("--traces", help="directory for iteration trace CSV files")
    s = sub.add_parser("shadow", parents=[common], help="shadow boundary and its planarity")
    s.add_argument("--dir", required=True, help="light direction X,Y,Z")
    s.add_argument("--angles", type=int, default=256)
    s.add_argument("--delta-seg", type=float, default=0.02)
    s.add_argument("--csv", help="write silhouette points to this CSV file")
    it = sub.add_parser("iterate", parents=[common], help="alternating reflection iteration (CSV trace)")
    it.add_argument("--p", help="anchor point X,Y,Z (defaults to --point)")
    it.add_argument("--q", help="second anchor (defaults to the mirror of p in H)")
    it.add_argument("--line-dir", help="direction of the starting line (parallel to H)")
    it.add_argument("--side", type=float, choices=[1.0, -1.0], default=1.0)
    it.add_argument("--iter-tol", type=float, default=1e-6)
    it.add_argument("--max-iter", type=int, default=200)
    g = sub.add_parser("gen", parents=[common], help="write a body definition")
    g.add_argument("--kind", required=True, choices=["ellipsoid", "revolution", "disc_hull", "polytope"])
    g.add_argument("--semiaxes", help="ellipsoid semiaxes, or R,HALF_HEIGHT for a revolution profile")
    g.add_argument("--center")
    g.add_argument("--axis")
    g.add_argument("--radii")
    g.add_argument("--profile", help="JSON list of [r, z] pairs")
    g.add_argument("--vertices", help="JSON list of vertices")
    g.add_argument("--rotate-seed", type=int, default=0, help="random orientation for ellipsoids")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        body_path=args.body,
        point=parse_vector(args.point) if args.point else None,
        hyperplane=parse_hyperplane(args.H) if args.H else None,
        grid=args.grid,
        tol=args.tol,
        resolution=args.resolution,
        seed=args.seed,
        out_path=args.out,
        threads=args.threads,
    )
    vectors = ("dir", "p", "q", "line_dir", "semiaxes", "center", "axis", "radii")
    for key, val in vars(args).items():
        if key in {"body", "point", "H", "grid", "tol", "resolution", "seed", "out", "threads", "command"}:
            continue
        if key in vectors and isinstance(val, str):
            val = parse_vector(val)
        cfg.extra[key] = val
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except (InputError, GeotomoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - any occurrence is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
