"""Shadow boundaries, their planarity, the alternating reflection iteration
and detection of boundary segments parallel to a hyperplane. All of it is
for bodies in R^3, where the parallel subspace is a line direction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, section
from .errors import DegenerateInputError, IterationAborted
from .geometry import AffineLine, Hyperplane, as_point, hyperplane_basis, reflect_point, reflect_point_in_line, unit
from .symmetry import SymmetryAxis, best_axis_parallel_to

DEFAULT_DELTA_SEG = 0.02
DEFAULT_ITER_TOL = 1e-6
DEFAULT_MAX_ITER = 200
PARALLEL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ShadowBoundary:
    direction: np.ndarray
    points: np.ndarray
    contact_extents: np.ndarray
    angles: np.ndarray
    diam: float


@dataclass(frozen=True)
class PlanarityReport:
    plane: Hyperplane
    max_deviation: float
    rms_deviation: float
    # |<normal, u>|: 1 when the plane is perpendicular to u, 0 when it contains u
    normal_dot_u: float

    @property
    def angle_normal_to_u(self) -> float:
        """Angle between the fitted normal and the line spanned by u."""
        return float(np.arccos(np.clip(self.normal_dot_u, -1.0, 1.0)))

    @property
    def angle_u_to_plane(self) -> float:
        """Angle between u and the fitted plane (0 when the plane contains u)."""
        return float(np.arcsin(np.clip(self.normal_dot_u, -1.0, 1.0)))


@dataclass
class IterationStep:
    index: int
    line: AffineLine
    plane: Hyperplane
    axis: SymmetryAxis | None
    contact: np.ndarray
    residual: float


@dataclass
class IterationTrace:
    steps: list[IterationStep] = field(default_factory=list)
    limit_even: AffineLine | None = None
    limit_odd: AffineLine | None = None
    converged: bool = False
    rate_estimate: float = float("nan")
    gaps: list[float] = field(default_factory=list)

    def lines(self, parity: int) -> list[AffineLine]:
        return [s.line for s in self.steps if s.index % 2 == parity]


def _silhouette_directions(u: np.ndarray, angles: int) -> tuple[np.ndarray, np.ndarray]:
    e1, e2 = hyperplane_basis(u)
    t = 2.0 * np.pi * np.arange(angles) / angles
    return t, np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)


def shadow_boundary(body: ConvexBody, u, angles: int = 256) -> ShadowBoundary:
    """Silhouette of ``body`` for light along ``u``, one point per direction w orthogonal to u."""
    if body.dim != 3:
        raise DegenerateInputError("shadow boundaries are implemented for R^3")
    u = as_point(u, 3)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise DegenerateInputError("u must be a unit vector")
    if angles < 64:
        raise DegenerateInputError("at least 64 angles are required")
    t, W = _silhouette_directions(u, angles)
    if body.analytic is not None:
        q = body.analytic
        MW = W @ q.matrix
        s = np.sqrt(np.einsum("ij,ij->i", W, MW))
        pts = q.center + MW / s[:, None]
        return ShadowBoundary(u, pts, np.zeros(angles), t, body.diam)
    V = body.hull_vertices
    e1, e2 = hyperplane_basis(u)
    proj = np.column_stack([V @ e1, V @ e2])
    along = V @ u
    eps = 1e-12 * max(1.0, body.diam)
    pts = np.empty((angles, 3))
    ext = np.empty(angles)
    vals = V @ W.T
    top = vals.max(axis=0)
    for k in range(angles):
        cand = np.flatnonzero(vals[:, k] >= top[k] - eps)
        # 2D support vertex of the projection, lexicographic tie-break
        c2 = proj[cand]
        first = cand[np.lexsort(c2.T[::-1])[0]]
        pre = cand[np.linalg.norm(proj[cand] - proj[first], axis=1) <= eps]
        a = along[pre]
        ext[k] = float(a.max() - a.min())
        pts[k] = V[pre[np.argmin(a)]]
    ext[ext <= eps] = 0.0
    return ShadowBoundary(u, pts, ext, t, body.diam)


def is_segment_free(sb: ShadowBoundary, delta_seg: float = DEFAULT_DELTA_SEG) -> bool:
    return bool(np.all(sb.contact_extents <= delta_seg * sb.diam))


def planarity(sb: ShadowBoundary) -> PlanarityReport:
    """Total-least-squares plane through the silhouette points."""
    pts = np.asarray(sb.points, dtype=float)
    if len(pts) < 4:
        raise DegenerateInputError("planarity needs at least 4 points")
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c, full_matrices=False)
    n = vt[-1]
    if n @ sb.direction < 0:
        n = -n
    dev = np.abs((pts - c) @ n) / sb.diam
    return PlanarityReport(
        Hyperplane(n, float(n @ c)),
        float(dev.max()),
        float(np.sqrt(np.mean(dev**2))),
        float(abs(n @ sb.direction)),
    )


def line_gap(a: AffineLine, b: AffineLine) -> float:
    """Distance between two parallel lines."""
    d = b.point - a.point
    return float(np.linalg.norm(d - (d @ a.direction) * a.direction))


def is_supporting_line(body: ConvexBody, line: AffineLine, tol: float = 1e-6) -> bool:
    """True when ``line`` touches the body without entering its interior."""
    g = line.direction
    e1, e2 = hyperplane_basis(g)
    x = line.point

    def gap(theta):
        w = np.cos(theta) * e1 + np.sin(theta) * e2
        from .bodies import support_values

        return float(x @ w - support_values(body, w)[0])

    thetas = 2.0 * np.pi * np.arange(720) / 720
    vals = np.array([gap(t) for t in thetas])
    k = int(np.argmax(vals))
    lo, hi = thetas[k] - 2 * np.pi / 720, thetas[k] + 2 * np.pi / 720
    from .symmetry import _golden

    _, best = _golden(lambda t: -gap(t), lo, hi, iters=60)
    return abs(-best) <= tol * body.diam


def reflection_iteration(
    body: ConvexBody,
    p,
    q,
    gamma0: AffineLine,
    H: Hyperplane,
    tol: float = DEFAULT_ITER_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    axis_tol: float | None = None,
) -> IterationTrace:
    """Alternating reflections of a supporting line parallel to ``H``.

    Step s spans the plane through the current line and p (s even) or q
    (s odd), finds the section's mirror axis parallel to the line and
    reflects the line across it; the image is snapped onto the section's
    supporting line on the reflected side. ``H`` is the symmetry plane
    exchanging p and q.
    """
    axis_tol = tol if axis_tol is None else axis_tol
    p = body.require_interior(p)
    q = body.require_interior(q)
    if np.linalg.norm(reflect_point(p, H) - q) > 1e-6 * body.diam:
        raise DegenerateInputError("q is not the mirror image of p in H")
    g = gamma0.direction
    if abs(g @ H.normal) > 1e-9:
        raise DegenerateInputError("starting line is not parallel to H")
    trace = IterationTrace()
    x = gamma0.point.copy()
    even_gaps: list[float] = []
    for s in range(max_iter):
        anchor = p if s % 2 == 0 else q
        line = AffineLine(x, g)
        nrm = np.cross(g, anchor - x)
        if np.linalg.norm(nrm) < 1e-12 * body.diam:
            raise IterationAborted(f"step {s}: line passes through the anchor point", trace)
        plane = Hyperplane.through(unit(nrm), anchor)
        sec = section(body, plane)
        g2 = sec.frame.direction_to_local(g)
        axis = best_axis_parallel_to(sec, g2)
        if axis.residual > axis_tol:
            trace.steps.append(IterationStep(s, line, plane, None, x.copy(), axis.residual))
            raise IterationAborted(
                f"step {s}: no axis parallel to H (residual {axis.residual:.3g})", trace
            )
        x2 = reflect_point_in_line(sec.frame.to_local(x), axis.line)
        m2 = np.array([-g2[1], g2[0]])
        side = np.sign((x2 - axis.line.point) @ m2) or 1.0
        _, touch2 = sec.support(side * m2)
        # move along the line direction only to reach the supporting line
        x_next = sec.frame.to_world(touch2 + ((x2 - touch2) @ g2) * g2)
        trace.steps.append(IterationStep(s, line, plane, axis, x.copy(), axis.residual))
        x = x_next
        if s >= 2 and s % 2 == 0:
            even_gaps.append(line_gap(trace.steps[s - 2].line, line))
            if even_gaps[-1] < tol * body.diam and s >= 3:
                trace.converged = True
                break
        if s >= 3 and s % 2 == 1:
            gap_odd = line_gap(trace.steps[s - 2].line, line)
            trace.gaps.append(gap_odd)
    trace.gaps = even_gaps
    evens, odds = trace.lines(0), trace.lines(1)
    trace.limit_even = evens[-1] if evens else None
    trace.limit_odd = odds[-1] if odds else None
    positive = [v for v in even_gaps if v > 0]
    if len(positive) >= 2:
        trace.rate_estimate = float(positive[-1] / positive[-2])
    return trace


def alternation_holds(trace: IterationTrace, p, H: Hyperplane, burn_in: int = 5) -> bool:
    """Even-step lines stay on one side of the limit plane, odd-step lines on the other.

    The limit plane is orthogonal to H, parallel to the lines and passes through p.
    """
    g = trace.steps[0].line.direction
    n = unit(np.cross(g, H.normal))
    sides = {0: set(), 1: set()}
    for st in trace.steps[burn_in:]:
        sides[st.index % 2].add(float(np.sign(n @ (st.line.point - np.asarray(p)))))
    return len(sides[0]) <= 1 and len(sides[1]) <= 1 and (not sides[0] or not sides[1] or sides[0] != sides[1])


def supporting_line(body: ConvexBody, direction, outward) -> AffineLine:
    """Supporting line of ``body`` parallel to ``direction`` with outer normal ``outward``."""
    from .bodies import support

    g = unit(direction)
    w = unit(np.asarray(outward, dtype=float) - (np.asarray(outward, dtype=float) @ g) * g)
    _, pt = support(body, w)
    return AffineLine(pt, g)


def write_trace_csv(trace: IterationTrace, path) -> None:
    limits = {0: trace.limit_even, 1: trace.limit_odd}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "px", "py", "pz", "dx", "dy", "dz", "residual", "gap_to_limit"])
        for st in trace.steps:
            lim = limits[st.index % 2]
            gap = line_gap(lim, st.line) if lim is not None else float("nan")
            w.writerow(
                [st.index, *(f"{v:.17g}" for v in st.line.point), *(f"{v:.17g}" for v in st.line.direction),
                 f"{st.residual:.6e}", f"{gap:.6e}"]
            )


def boundary_segment_directions(body: ConvexBody, H: Hyperplane, delta_seg: float = DEFAULT_DELTA_SEG) -> list[np.ndarray]:
    """Directions (up to sign) of boundary edges parallel to ``H`` of length >= delta_seg * diam."""
    V = body.vertices
    E = body.true_edges
    d = V[E[:, 1]] - V[E[:, 0]]
    length = np.linalg.norm(d, axis=1)
    keep = length >= delta_seg * body.diam
    dirs = d[keep] / length[keep, None]
    dirs = dirs[np.abs(dirs @ H.normal) < PARALLEL_TOL]
    out: list[np.ndarray] = []
    for v in dirs:
        nz = np.flatnonzero(np.abs(v) > 1e-9)
        if v[nz[0]] < 0:
            v = -v
        v = v + 0.0
        if all(np.arccos(min(1.0, abs(float(v @ w)))) >= 1e-4 for w in out):
            out.append(v)
    out.sort(key=lambda v: tuple(-v))
    return out


def supporting_contact_areas(body: ConvexBody, H: Hyperplane) -> tuple[float, float]:
    """Areas of the contact faces of the two supporting planes parallel to ``H``."""
    hull = body.hull
    eq = hull.equations
    areas = []
    for sgn in (1.0, -1.0):
        n = sgn * H.normal
        sel = np.all(np.abs(eq[:, :3] - n) < 1e-9, axis=1)
        total = 0.0
        for tri in hull.simplices[sel]:
            a, b, c = body.vertices[tri]
            total += 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))
        areas.append(total)
    return areas[0], areas[1]
