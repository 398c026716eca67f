"""Larman / revolution point classification and symmetry hyperplanes.

"Every hyperplane through p" is discretized by a Fibonacci grid of normals
on the upper hemisphere.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bodies import ConvexBody, diametral_chord, section, support_values, _fibonacci_sphere
from .geometry import Hyperplane, reflect_point, unit
from .symmetry import best_axis, best_axis_parallel_to, best_axis_through_point

DEFAULT_GRID = 400
DEFAULT_TOL = 1e-2
PARALLEL_SKIP = 1e-6

REVOLUTION = "revolution"
LARMAN_NOT_REVOLUTION = "larman_not_revolution"
NOT_LARMAN = "not_larman"


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    normals: np.ndarray

    @property
    def count(self) -> int:
        return len(self.normals)

    @classmethod
    def hemisphere(cls, count: int = DEFAULT_GRID) -> "DirectionGrid":
        """Fibonacci lattice on the hemisphere z > 0 (no antipodal pairs)."""
        if count < 1:
            raise ValueError("grid count must be positive")
        i = np.arange(count) + 0.5
        z = i / count
        r = np.sqrt(1.0 - z * z)
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        return cls(np.column_stack([r * np.cos(phi), r * np.sin(phi), z]))

    def rotated(self, R) -> "DirectionGrid":
        return DirectionGrid(self.normals @ np.asarray(R, dtype=float).T)


@dataclass
class PlaneRecord:
    normal: list
    axis_found: bool
    axis_through_p: bool
    axis_parallel_H: bool | None
    residual: float
    residual_through_p: float | None = None
    skipped: bool = False


@dataclass
class ClassificationReport:
    verdict: str
    per_plane: list[PlaneRecord]
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "parameters": self.parameters,
            "per_plane": [asdict(r) for r in self.per_plane],
        }


def resolve_threads(threads: int | None = None) -> int:
    env = os.environ.get("GEOTOMO_THREADS")
    if env:
        return max(1, int(env))
    return max(1, int(threads or 1))


def _map(fn, items, threads: int | None):
    n = resolve_threads(threads)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _classify_plane(body: ConvexBody, p: np.ndarray, normal: np.ndarray, tol: float) -> PlaneRecord:
    sec = section(body, Hyperplane.through(normal, p))
    p2 = sec.frame.to_local(p)
    best = best_axis(sec, tol)
    through = best_axis_through_point(sec, p2, tol)
    has_through = through.residual <= tol
    return PlaneRecord(
        normal=[float(v) for v in normal],
        axis_found=bool(best.residual <= tol or has_through),
        axis_through_p=bool(has_through),
        axis_parallel_H=None,
        residual=float(min(best.residual, through.residual)),
        residual_through_p=float(through.residual),
    )


def verdict_from(records: list[PlaneRecord]) -> str:
    live = [r for r in records if not r.skipped]
    if all(r.axis_through_p for r in live):
        return REVOLUTION
    if all(r.axis_found for r in live):
        return LARMAN_NOT_REVOLUTION
    return NOT_LARMAN


def classify_point(
    body: ConvexBody,
    p,
    grid: DirectionGrid | None = None,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> ClassificationReport:
    """Decide whether ``p`` is a revolution point, a Larman point only, or neither."""
    grid = grid or DirectionGrid.hemisphere()
    p = body.require_interior(p)
    records = _map(lambda nu: _classify_plane(body, p, nu, tol), list(grid.normals), threads)
    return ClassificationReport(
        verdict_from(records),
        records,
        {"grid": grid.count, "tol": tol, "resolution": body.resolution},
    )


def _h_parallel_plane(body, p, normal, H: Hyperplane) -> PlaneRecord:
    line_dir = np.cross(normal, H.normal)
    if np.linalg.norm(line_dir) < PARALLEL_SKIP:
        return PlaneRecord([float(v) for v in normal], False, False, None, float("nan"), skipped=True)
    sec = section(body, Hyperplane.through(normal, p))
    d2 = sec.frame.direction_to_local(unit(line_dir))
    axis = best_axis_parallel_to(sec, d2)
    return PlaneRecord([float(v) for v in normal], False, False, None, float(axis.residual))


def h_parallel_test(
    body: ConvexBody,
    p,
    H: Hyperplane,
    grid: DirectionGrid | None = None,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> tuple[bool, list[PlaneRecord]]:
    """Does every grid section through ``p`` have a mirror axis parallel to ``H``?

    Planes parallel to ``H`` are skipped (their records carry ``skipped=True``).
    """
    grid = grid or DirectionGrid.hemisphere()
    p = body.require_interior(p)
    records = _map(lambda nu: _h_parallel_plane(body, p, nu, H), list(grid.normals), threads)
    for r in records:
        if not r.skipped:
            ok = r.residual <= tol
            r.axis_parallel_H = bool(ok)
            r.axis_found = bool(ok)
    holds = all(r.axis_parallel_H for r in records if not r.skipped)
    return holds, records


def reflection_map(body: ConvexBody, plane: Hyperplane) -> ConvexBody:
    """Mirror image of the body (and of its analytic backend) across ``plane``."""
    n = plane.normal
    A = np.eye(body.dim) - 2.0 * np.outer(n, n)
    return body.transformed(A, 2.0 * plane.offset * n)


def _probe_sphere(dim: int, count: int = 4096) -> np.ndarray:
    if dim == 3:
        return _fibonacci_sphere(count)
    if dim == 2:
        t = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    rng = np.random.default_rng(2024)
    d = rng.normal(size=(count, dim))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def body_hausdorff(a: ConvexBody, b: ConvexBody, count: int = 4096) -> float:
    """Hausdorff distance of two convex bodies via sampled support functions."""
    U = _probe_sphere(a.dim, count)
    return float(np.abs(support_values(a, U) - support_values(b, U)).max())


def symmetry_hyperplane(body: ConvexBody, H: Hyperplane, tol: float = DEFAULT_TOL) -> Hyperplane | None:
    """Hyperplane of symmetry parallel to ``H`` through the midpoint of the
    diametral chord perpendicular to ``H``, if the body really is symmetric
    about it."""
    chord = diametral_chord(body, H.normal)
    candidate = Hyperplane(H.normal, float(H.normal @ chord.midpoint))
    if body_hausdorff(body, reflection_map(body, candidate)) <= tol * body.diam:
        return candidate
    return None


def mirror_point(p, plane: Hyperplane) -> np.ndarray:
    return reflect_point(np.asarray(p, dtype=float), plane)
