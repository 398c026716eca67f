"""Mirror and central symmetry of planar convex sections.

Residuals are Hausdorff distances between a polygon and its image,
divided by the polygon's diameter. Searches are screened with the support
function sampled on a fixed grid of ``N_DIRS`` directions (a lower bound of
the Hausdorff distance between convex sets) and every reported residual is
recomputed exactly with :func:`polygon_hausdorff`.

A line is parametrized by its direction angle ``theta`` and offset ``t``:
``{x : <n, x> = t}`` with ``n = (-sin theta, cos theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .bodies import PlanarSection
from .errors import DegenerateInputError
from .geometry import (
    AffineLine,
    distance_to_convex_polygon,
    polygon_area_centroid,
    polygon_hausdorff,
    unit,
)

N_DIRS = 720
_PHI = 2.0 * np.pi * np.arange(N_DIRS) / N_DIRS
_U = np.column_stack([np.cos(_PHI), np.sin(_PHI)])
# reflection across the line at angle pi*j/N_DIRS maps direction k to (j - k) mod N_DIRS
_SCAN_INDEX = (np.arange(N_DIRS)[:, None] - np.arange(N_DIRS)[None, :]) % N_DIRS
_SCAN_ANGLES = np.pi * np.arange(N_DIRS) / N_DIRS
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
# screened minima within this (relative) margin of tol are worth refining
SCREEN_SLACK = 0.01


@dataclass(frozen=True, eq=False)
class SymmetryAxis:
    line: AffineLine
    residual: float

    @property
    def angle(self) -> float:
        d = self.line.direction
        return float(np.arctan2(d[1], d[0]) % np.pi)


@dataclass(frozen=True, eq=False)
class CentralSymmetry:
    center: np.ndarray
    residual: float


def _line_from(theta: float, t: float) -> AffineLine:
    d = np.array([np.cos(theta), np.sin(theta)])
    n = np.array([-d[1], d[0]])
    return AffineLine(t * n, d)


def _line_params(line: AffineLine) -> tuple[float, float]:
    d = line.direction
    theta = float(np.arctan2(d[1], d[0]))
    n = np.array([-np.sin(theta), np.cos(theta)])
    return theta, float(n @ line.point)


def reflect_polygon(poly: np.ndarray, theta: float, t: float) -> np.ndarray:
    d = np.array([np.cos(theta), np.sin(theta)])
    n = np.array([-d[1], d[0]])
    s = poly @ n - t
    return poly - 2.0 * s[:, None] * n


def _support(poly: np.ndarray) -> np.ndarray:
    return (poly @ _U.T).max(axis=0)


def _golden(f, a: float, b: float, iters: int = 50, tol: float = 0.0) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if abs(b - a) <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


class _Evaluator:
    """Residual machinery for one polygon."""

    def __init__(self, section: PlanarSection):
        poly = np.asarray(section.polygon, dtype=float)
        if poly.ndim != 2 or len(poly) < 3:
            raise DegenerateInputError("section polygon needs at least 3 vertices")
        self.poly = poly
        self.diam = float(section.diam)
        self.h = _support(poly)
        self.centroid = polygon_area_centroid(poly)

    def exact(self, theta: float, t: float) -> float:
        return polygon_hausdorff(self.poly, reflect_polygon(self.poly, theta, t)) / self.diam

    def screen(self, theta: float, t: float) -> float:
        return float(np.abs(self.h - _support(reflect_polygon(self.poly, theta, t))).max()) / self.diam

    def offset_through(self, theta: float, point) -> float:
        return float(np.array([-np.sin(theta), np.cos(theta)]) @ point)

    def scan(self, center) -> np.ndarray:
        """Screened residuals of the lines through ``center`` at ``_SCAN_ANGLES``."""
        hc = self.h - _U @ np.asarray(center, dtype=float)
        return np.abs(hc[None, :] - hc[_SCAN_INDEX]).max(axis=1) / self.diam

    def best_offset(self, theta: float, iters: int = 80) -> tuple[float, float]:
        """Offset minimizing the screened residual at a fixed angle."""
        h0 = _support(reflect_polygon(self.poly, theta, 0.0))
        n = np.array([-np.sin(theta), np.cos(theta)])
        g = self.h - h0
        c = 2.0 * (_U @ n)
        proj = self.poly @ n
        lo, hi = float(proj.min()), float(proj.max())

        def f(t):
            return float(np.abs(g - c * t).max())

        t, val = _golden(f, lo, hi, iters=iters, tol=1e-13 * self.diam)
        return t, val / self.diam

    def refine(self, theta: float, t: float, rounds: int = 2, iters: int = 25, fixed_point=None) -> tuple[float, float]:
        """Coordinate descent over (angle, offset) with golden-section line searches.

        With ``fixed_point`` the line is kept through that point (angle-only search).
        """
        width = np.pi / N_DIRS
        for _ in range(rounds):
            if fixed_point is not None:
                theta, _ = _golden(
                    lambda a: self.screen(a, self.offset_through(a, fixed_point)),
                    theta - width,
                    theta + width,
                    iters,
                )
                t = self.offset_through(theta, fixed_point)
            else:
                tt = t
                theta, _ = _golden(lambda a: self.screen(a, tt), theta - width, theta + width, iters)
                t, _ = self.best_offset(theta)
            width /= 8.0
        return theta, t


def _local_minima(values: np.ndarray, limit: int) -> np.ndarray:
    prev, nxt = np.roll(values, 1), np.roll(values, -1)
    idx = np.flatnonzero((values <= prev) & (values <= nxt))
    return idx[np.argsort(values[idx], kind="stable")][:limit]


def candidate_axes(section: PlanarSection) -> list[AffineLine]:
    """Lines through the area centroid that may be mirror axes.

    A mirror axis of a convex polygon passes through its centroid and meets
    the boundary at vertices or at midpoints of edges perpendicular to it,
    so the rays to vertices and edge midpoints cover every axis. Principal
    axes of the vertex covariance and the bisectors of equal-length edge
    pairs are added; angles closer than 1e-6 rad are merged.
    """
    poly = np.asarray(section.polygon, dtype=float)
    if poly.ndim != 2 or len(poly) < 3:
        raise DegenerateInputError("section polygon needs at least 3 vertices")
    c = polygon_area_centroid(poly)
    mids = 0.5 * (poly + np.roll(poly, -1, axis=0))
    rays = np.vstack([poly, mids]) - c
    rays = rays[np.linalg.norm(rays, axis=1) > 1e-12 * section.diam]
    angles = list(np.arctan2(rays[:, 1], rays[:, 0]))
    cov = np.cov((poly - poly.mean(axis=0)).T)
    _, vecs = np.linalg.eigh(cov)
    angles += [float(np.arctan2(v[1], v[0])) for v in vecs.T]
    edges = np.roll(poly, -1, axis=0) - poly
    lengths = np.linalg.norm(edges, axis=1)
    alpha = np.arctan2(edges[:, 1], edges[:, 0])
    tol = 1e-6 * section.diam
    i, j = np.nonzero(np.triu(np.abs(lengths[:, None] - lengths[None, :]) <= tol, k=1))
    angles += list(0.5 * (alpha[i] + alpha[j] + np.pi))
    ang = np.sort(np.mod(angles, np.pi))
    keep = [ang[0]]
    for a in ang[1:]:
        if a - keep[-1] > 1e-6:
            keep.append(a)
    if len(keep) > 1 and keep[0] + np.pi - keep[-1] <= 1e-6:
        keep.pop()
    return [AffineLine(c, [np.cos(a), np.sin(a)]) for a in keep]


def symmetry_axes(section: PlanarSection, tol: float) -> list[SymmetryAxis]:
    """All mirror axes with relative residual at most ``tol``, best first."""
    if not (0.0 < tol <= 0.1):
        raise DegenerateInputError("tol must lie in (0, 0.1]")
    ev = _Evaluator(section)
    starts = [_line_params(line) for line in candidate_axes(section)]
    scan = ev.scan(ev.centroid)
    for j in _local_minima(scan, 8):
        th = float(_SCAN_ANGLES[j])
        starts.append((th, ev.offset_through(th, ev.centroid)))
    found: list[tuple[float, float, float]] = []
    for theta, t in starts:
        if ev.screen(theta, t) > tol + SCREEN_SLACK:
            continue
        r = ev.exact(theta, t)
        if r > tol:
            theta, t = ev.refine(theta, t)
            r = ev.exact(theta, t)
        if r <= tol:
            found.append((r, theta, t))
    return _merge_axes(found, ev.diam)


def _canonical(theta: float, t: float) -> tuple[float, float]:
    # (theta + pi, -t) is the same line
    k = np.floor(theta / np.pi)
    return theta - k * np.pi, t if int(k) % 2 == 0 else -t


def _merge_axes(found, diam: float) -> list[SymmetryAxis]:
    found = sorted(
        ((r,) + _canonical(theta, t) for r, theta, t in found), key=lambda x: (x[0], x[1], x[2])
    )
    kept: list[tuple[float, float, float]] = []
    for r, theta, t in found:
        dup = False
        for _, th2, t2 in kept:
            dth = abs(theta - th2)
            if dth < 1e-4 and abs(t - t2) < 1e-4 * diam:
                dup = True
            elif np.pi - dth < 1e-4 and abs(t + t2) < 1e-4 * diam:
                dup = True
            if dup:
                break
        if not dup:
            kept.append((r, theta, t))
    return [SymmetryAxis(_line_from(theta, t), r) for r, theta, t in kept]


def best_axis(section: PlanarSection, tol: float = 1e-2) -> SymmetryAxis:
    """The mirror axis of smallest residual found (accepted or not).

    Fast path for callers that only need existence: screened local minima of
    the centroid scan are checked exactly, and refined only when none is
    already within ``tol``.
    """
    ev = _Evaluator(section)
    scan = ev.scan(ev.centroid)
    best: tuple[float, float, float] | None = None
    minima = _local_minima(scan, 4)
    for j in minima:
        th = float(_SCAN_ANGLES[j])
        t = ev.offset_through(th, ev.centroid)
        r = ev.exact(th, t)
        if best is None or r < best[0]:
            best = (r, th, t)
        if r <= tol:
            return SymmetryAxis(_line_from(th, t), r)
    for j in minima:
        if scan[j] > tol + SCREEN_SLACK:
            continue
        th = float(_SCAN_ANGLES[j])
        th, t = ev.refine(th, ev.offset_through(th, ev.centroid))
        r = ev.exact(th, t)
        if r < best[0]:
            best = (r, th, t)
        if r <= tol:
            break
    r, th, t = best
    return SymmetryAxis(_line_from(th, t), r)


def axis_parallel_to(section: PlanarSection, direction2d, tol: float) -> SymmetryAxis | None:
    """Best axis with the given direction (offset-only search); None if above ``tol``."""
    axis = best_axis_parallel_to(section, direction2d)
    return axis if axis.residual <= tol else None


def best_axis_parallel_to(section: PlanarSection, direction2d) -> SymmetryAxis:
    d = unit(np.asarray(direction2d, dtype=float).reshape(2))
    ev = _Evaluator(section)
    theta = float(np.arctan2(d[1], d[0]))
    t, _ = ev.best_offset(theta)
    return SymmetryAxis(_line_from(theta, t), ev.exact(theta, t))


def _inside(poly: np.ndarray, point: np.ndarray) -> bool:
    return bool(distance_to_convex_polygon(point[None, :], poly)[0] == 0.0)


def axis_through_point(section: PlanarSection, point2d, tol: float) -> SymmetryAxis | None:
    """Best axis constrained through ``point2d``; None if above ``tol``."""
    axis = best_axis_through_point(section, point2d, tol)
    return axis if axis.residual <= tol else None


def best_axis_through_point(section: PlanarSection, point2d, tol: float = 1e-2) -> SymmetryAxis:
    p = np.asarray(point2d, dtype=float).reshape(2)
    ev = _Evaluator(section)
    if not _inside(ev.poly, p):
        raise DegenerateInputError("point lies outside the section")
    scan = ev.scan(p)
    minima = _local_minima(scan, 4)
    best = None
    for j in minima:
        th = float(_SCAN_ANGLES[j])
        r = ev.exact(th, ev.offset_through(th, p))
        if best is None or r < best[0]:
            best = (r, th)
        if r <= tol:
            return SymmetryAxis(_line_from(th, ev.offset_through(th, p)), r)
    for j in minima:
        if scan[j] > tol + SCREEN_SLACK:
            continue
        th, _ = ev.refine(float(_SCAN_ANGLES[j]), 0.0, fixed_point=p)
        r = ev.exact(th, ev.offset_through(th, p))
        if r < best[0]:
            best = (r, th)
        if r <= tol:
            break
    r, th = best
    return SymmetryAxis(_line_from(th, ev.offset_through(th, p)), r)


def central_symmetry(section: PlanarSection, tol: float) -> CentralSymmetry | None:
    """Center of point symmetry if the relative residual is at most ``tol``."""
    cs = best_central_symmetry(section)
    return cs if cs.residual <= tol else None


def best_central_symmetry(section: PlanarSection) -> CentralSymmetry:
    ev = _Evaluator(section)
    half = N_DIRS // 2
    # support of 2c - P at u is 2<c,u> + h(-u); minimize the sampled sup-gap (an LP)
    g = ev.h[:half] - ev.h[half:]
    A = 2.0 * _U[:half]
    ones = np.ones((half, 1))
    A_ub = np.vstack([np.hstack([A, -ones]), np.hstack([-A, -ones])])
    b_ub = np.concatenate([g, -g])
    res = linprog([0.0, 0.0, 1.0], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 2 + [(0, None)], method="highs")
    c = res.x[:2] if res.success else ev.centroid
    r = polygon_hausdorff(ev.poly, 2.0 * c - ev.poly) / ev.diam
    r0 = polygon_hausdorff(ev.poly, 2.0 * ev.centroid - ev.poly) / ev.diam
    if r0 < r:
        c, r = ev.centroid, r0
    return CentralSymmetry(np.asarray(c, dtype=float), float(r))
