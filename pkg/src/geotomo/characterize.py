"""Characterizations: round sections, bodies of revolution, quadric fitting,
the projection/section reduction checks and the full verification pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, PlanarSection, project, section, support_values
from .errors import DegenerateInputError, GeotomoError
from .geometry import AffineLine, Hyperplane, hyperplane_basis, polygon_area_centroid, reflect_point, unit
from .shadow import (
    alternation_holds,
    boundary_segment_directions,
    is_segment_free,
    planarity,
    reflection_iteration,
    shadow_boundary,
    supporting_contact_areas,
    supporting_line,
)
from .symmetry import _inside, best_central_symmetry
from .tomography import (
    LARMAN_NOT_REVOLUTION,
    DirectionGrid,
    body_hausdorff,
    classify_point,
    h_parallel_test,
    symmetry_hyperplane,
)

ELLIPSOID = "ellipsoid"
NOT_ELLIPSOID = "not_ellipsoid"
INDETERMINATE = "indeterminate"

CONCLUSION_OK = "ellipsoid_of_revolution_axis_perp_H"
HYPOTHESIS_VIOLATED = "hypothesis_violated"
INCONCLUSIVE = "inconclusive"

PASSED, FAILED, SKIPPED = "passed", "failed", "skipped"

AXIS_ANGLE_TOL = 1e-3
ANALYTIC_FIT_TOL = 1e-6
MESH_FIT_TOL = 1e-3


# ---------------------------------------------------------------- sphere test


def _cone_angles(poly: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Angle between x - z and the normal cone of the polygon at each vertex x."""
    nxt = np.roll(poly, -1, axis=0)
    e = nxt - poly
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    n_in, n_out = np.roll(normals, 1, axis=0), normals  # edges ending / starting at vertex i
    r = poly - z
    r /= np.linalg.norm(r, axis=1, keepdims=True)

    def cross(a, b):
        return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]

    inside = (cross(n_in, r) >= -1e-15) & (cross(r, n_out) >= -1e-15)
    a_in = np.arccos(np.clip(np.einsum("ij,ij->i", n_in, r), -1.0, 1.0))
    a_out = np.arccos(np.clip(np.einsum("ij,ij->i", n_out, r), -1.0, 1.0))
    return np.where(inside, 0.0, np.minimum(a_in, a_out))


def _midpoint_angles(poly: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Angle between each edge normal and the radius to the edge midpoint."""
    nxt = np.roll(poly, -1, axis=0)
    e = nxt - poly
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    r = 0.5 * (poly + nxt) - z
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    return np.arccos(np.clip(np.einsum("ij,ij->i", normals, r), -1.0, 1.0))


@dataclass(frozen=True)
class RoundnessReport:
    max_angle: float
    radial_spread: float
    angle_ok: bool
    radial_ok: bool


def roundness(sec: PlanarSection, z, tol: float) -> RoundnessReport:
    """Both forms of the round-section test about ``z``.

    Angle form: at every vertex the radius x - z lies in the normal cone,
    and every edge is orthogonal to the radius through its midpoint (both
    hold exactly for polygons inscribed in a circle about z). Radial form:
    the vertex distances to z agree, spread measured relative to their mean.
    The two agree to first order for nearly round sections.
    """
    z = np.asarray(z, dtype=float)
    if not _inside(sec.polygon, z):
        raise DegenerateInputError("centre point must lie strictly inside the section")
    ang = max(float(_cone_angles(sec.polygon, z).max()), float(_midpoint_angles(sec.polygon, z).max()))
    radii = np.linalg.norm(sec.polygon - z, axis=1)
    spread = float((radii.max() - radii.min()) / radii.mean())
    return RoundnessReport(ang, spread, ang <= tol, spread <= tol)


def sphere_characterization(sec: PlanarSection, z, tol: float) -> bool:
    """True when every supporting line is orthogonal to the radius from ``z`` (within ``tol`` rad)."""
    return roundness(sec, z, tol).angle_ok


# ------------------------------------------------------- body of revolution


def _slice_offsets(body: ConvexBody, normal: np.ndarray, count: int, margin: float = 0.05) -> np.ndarray:
    hi = float(support_values(body, normal)[0])
    lo = -float(support_values(body, -normal)[0])
    pad = margin * (hi - lo)
    return np.linspace(lo + pad, hi - pad, count)


@dataclass
class RevolutionReport:
    axis: AffineLine | None
    centers: np.ndarray
    max_angle: float
    collinearity: float
    axis_angle: float


def revolution_report(body: ConvexBody, H: Hyperplane, tol: float = 1e-2, slices: int = 32) -> RevolutionReport:
    n = H.normal
    centers, worst = [], 0.0
    for off in _slice_offsets(body, n, slices):
        sec = section(body, Hyperplane(n, off))
        c2 = polygon_area_centroid(sec.polygon)
        worst = max(worst, roundness(sec, c2, tol).max_angle)
        centers.append(sec.frame.to_world(c2))
    C = np.array(centers)
    mean = C.mean(axis=0)
    _, _, vt = np.linalg.svd(C - mean)
    d = vt[0] if vt[0] @ n >= 0 else -vt[0]
    off_line = (C - mean) - np.outer((C - mean) @ d, d)
    collinearity = float(np.linalg.norm(off_line, axis=1).max() / body.diam)
    angle = float(np.arccos(min(1.0, abs(float(d @ n)))))
    ok = worst <= tol and collinearity <= tol and angle <= AXIS_ANGLE_TOL
    axis = AffineLine(mean, d) if ok else None
    return RevolutionReport(axis, C, worst, collinearity, angle)


def detect_revolution(body: ConvexBody, H: Hyperplane, tol: float = 1e-2, slices: int = 32) -> AffineLine | None:
    """Axis of revolution perpendicular to ``H`` if every slice parallel to ``H`` is round
    and the slice centres line up; otherwise None."""
    return revolution_report(body, H, tol, slices).axis


# ------------------------------------------------------------ quadric fitting


@dataclass
class QuadricFit:
    coefficients: np.ndarray
    residual_rms: float
    classification: str
    semiaxes: np.ndarray | None = None
    center: np.ndarray | None = None
    axes: np.ndarray | None = None  # rows are unit axes, matching semiaxes


def _design(Y: np.ndarray) -> tuple[np.ndarray, list[tuple[int, int]]]:
    n = Y.shape[1]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    quad = [Y[:, i] * Y[:, j] * (1.0 if i == j else np.sqrt(2.0)) for i, j in pairs]
    return np.column_stack(quad + [Y[:, i] for i in range(n)] + [np.ones(len(Y))]), pairs


def fit_quadric(points, residual_tol: float = ANALYTIC_FIT_TOL) -> QuadricFit:
    """Algebraic least-squares quadric through ``points``.

    Points are centred and scaled before fitting and the coefficient vector
    is constrained to unit norm with the rotation-invariant weighting
    (cross terms carry sqrt 2), so the fit is equivariant under similarities.
    ``residual_rms`` is the rms first-order (Sampson) distance to the fitted
    surface; the fit is an ellipsoid when the quadratic part is definite and
    the residual is at most ``residual_tol`` times the fitted diameter.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or len(X) < 20:
        raise DegenerateInputError("fit_quadric needs at least 20 points")
    n = X.shape[1]
    mean = X.mean(axis=0)
    scale = float(np.sqrt(np.mean(np.sum((X - mean) ** 2, axis=1))))
    if scale == 0.0:
        return QuadricFit(np.zeros(1), float("nan"), INDETERMINATE)
    Y = (X - mean) / scale
    D, pairs = _design(Y)
    _, sv, vt = np.linalg.svd(D, full_matrices=False)
    coef = vt[-1]
    # a second vanishing singular value means the quadric is not determined
    if sv[-2] <= 1e-9 * sv[0]:
        return QuadricFit(coef, float("nan"), INDETERMINATE)
    A = np.zeros((n, n))
    for k, (i, j) in enumerate(pairs):
        if i == j:
            A[i, i] = coef[k]
        else:
            A[i, j] = A[j, i] = coef[k] / np.sqrt(2.0)
    b = coef[len(pairs) : len(pairs) + n]
    c = coef[-1]
    if np.trace(A) < 0:
        A, b, c, coef = -A, -b, -c, -coef
    vals = D @ coef
    grads = 2.0 * Y @ A + b
    sampson = np.abs(vals) / np.maximum(np.linalg.norm(grads, axis=1), 1e-300)
    rms = float(np.sqrt(np.mean(sampson**2)) * scale)
    w, R = np.linalg.eigh(A)
    if w.min() <= 0:
        return QuadricFit(coef, rms, NOT_ELLIPSOID)
    y0 = -0.5 * np.linalg.solve(A, b)
    k = float(y0 @ A @ y0 - c)
    if k <= 0:
        return QuadricFit(coef, rms, NOT_ELLIPSOID)
    semi = np.sqrt(k / w) * scale
    order = np.argsort(-semi)
    cls = ELLIPSOID if rms <= residual_tol * 2.0 * semi.max() else NOT_ELLIPSOID
    return QuadricFit(coef, rms, cls, semi[order], mean + scale * y0, R[:, order].T)


def boundary_points(body: ConvexBody, count: int = 2000) -> np.ndarray:
    """Boundary samples: exact points for analytic bodies, hull vertices otherwise."""
    if body.analytic is not None:
        q = body.analytic
        L = np.linalg.cholesky(q.matrix)
        if body.dim == 2:
            t = 2.0 * np.pi * np.arange(count) / count
            s = np.column_stack([np.cos(t), np.sin(t)])
        elif body.dim == 3:
            from .bodies import _fibonacci_sphere

            s = _fibonacci_sphere(count)
        else:
            rng = np.random.default_rng(7)
            s = rng.normal(size=(count, body.dim))
            s /= np.linalg.norm(s, axis=1, keepdims=True)
        return q.center + s @ L.T
    return body.hull_vertices


def section_boundary_points(sec: PlanarSection, count: int = 512) -> np.ndarray:
    if sec.ellipse is not None:
        c, B, rho = sec.ellipse
        L = np.linalg.cholesky(np.linalg.inv(B) * rho)
        t = 2.0 * np.pi * np.arange(count) / count
        return c + np.column_stack([np.cos(t), np.sin(t)]) @ L.T
    return sec.polygon


# ---------------------------------------------------------- reduction checks


@dataclass
class ReductionItem:
    kind: str  # "projection" or "section"
    normal: list
    classification: str
    residual: float
    passed: bool


@dataclass
class ReductionReport:
    items: list[ReductionItem] = field(default_factory=list)

    @property
    def projections_pass(self) -> bool:
        return all(i.passed for i in self.items if i.kind == "projection")

    @property
    def sections_pass(self) -> bool:
        return all(i.passed for i in self.items if i.kind == "section")

    @property
    def all_pass(self) -> bool:
        return all(i.passed for i in self.items)


def _safe_fit(points, tol: float) -> QuadricFit:
    if len(points) < 20:
        return QuadricFit(np.zeros(1), float("nan"), INDETERMINATE)
    return fit_quadric(points, tol)


def _orthogonal_normals(H: Hyperplane, count: int) -> np.ndarray:
    basis = hyperplane_basis(H.normal)
    if len(basis) == 2:
        t = np.pi * np.arange(count) / count
        return np.outer(np.cos(t), basis[0]) + np.outer(np.sin(t), basis[1])
    return DirectionGrid.hemisphere(count).normals @ basis


def projection_section_ellipsoid_checks(
    body: ConvexBody, H: Hyperplane, tol: float = ANALYTIC_FIT_TOL, count: int = 16
) -> ReductionReport:
    """Quadric fits of projections onto hyperplanes orthogonal to ``H`` and of sections parallel to ``H``.

    Sections are planar and therefore only taken for bodies in R^3.
    """
    if body.dim not in (3, 4):
        raise DegenerateInputError("reduction checks need a body in R^3 or R^4")
    report = ReductionReport()
    for w in _orthogonal_normals(H, count):
        proj = project(body, Hyperplane(w, 0.0))
        fit = _safe_fit(boundary_points(proj), tol)
        report.items.append(
            ReductionItem("projection", [float(v) for v in w], fit.classification, fit.residual_rms,
                          fit.classification == ELLIPSOID)
        )
    if body.dim == 3:
        for off in _slice_offsets(body, H.normal, count):
            sec = section(body, Hyperplane(H.normal, off))
            fit = _safe_fit(section_boundary_points(sec), tol)
            report.items.append(
                ReductionItem("section", [float(off)], fit.classification, fit.residual_rms,
                              fit.classification == ELLIPSOID)
            )
    return report


# ------------------------------------------------------------ full pipeline


@dataclass
class VerifyConfig:
    tol: float = 1e-2
    grid: int = 400
    shadow_directions: int = 8
    iteration_directions: int = 4
    central_grid: int = 64
    slices: int = 32
    delta_seg: float = 0.02
    threads: int | None = None


@dataclass
class StageRecord:
    name: str
    status: str
    metrics: dict = field(default_factory=dict)


@dataclass
class TheoremReport:
    stages: list[StageRecord]
    conclusion: str
    axis: AffineLine | None
    parameters: dict
    traces: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "stages": [{"name": s.name, "status": s.status, "metrics": s.metrics} for s in self.stages],
            "conclusion": self.conclusion,
            "axis": None
            if self.axis is None
            else {"point": [float(v) for v in self.axis.point], "direction": [float(v) for v in self.axis.direction]},
            "parameters": self.parameters,
        }


STAGE_NAMES = (
    "symmetry_plane",
    "point_off_symmetry_plane",
    "no_boundary_segments",
    "planar_shadow_boundaries",
    "body_of_revolution",
    "ellipsoid",
)


def _horizontal_directions(H: Hyperplane, count: int) -> np.ndarray:
    e1, e2 = hyperplane_basis(H.normal)
    t = np.pi * np.arange(count) / count
    return np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)


def _stage_hypotheses(body, p, H, cfg) -> tuple[bool, dict]:
    grid = DirectionGrid.hemisphere(cfg.grid)
    cls = classify_point(body, p, grid, cfg.tol, cfg.threads)
    holds, recs = h_parallel_test(body, p, H, grid, cfg.tol, cfg.threads)
    worst = max((r.residual for r in recs if not r.skipped), default=0.0)
    ok = cls.verdict == LARMAN_NOT_REVOLUTION and holds
    return ok, {"classification": cls.verdict, "h_parallel": holds, "h_parallel_worst_residual": worst}


def _stage_shadows(body, p, q, Hs: Hyperplane, H: Hyperplane, cfg, traces: dict) -> tuple[bool, dict]:
    analytic = body.analytic is not None
    plan_tol = 1e-6 if analytic else 1e-3
    worst_dev, worst_normal, free = 0.0, 0.0, True
    for u in _horizontal_directions(H, cfg.shadow_directions):
        sb = shadow_boundary(body, u)
        free &= is_segment_free(sb, cfg.delta_seg)
        rep = planarity(sb)
        worst_dev = max(worst_dev, rep.max_deviation)
        worst_normal = max(worst_normal, rep.angle_normal_to_u)
    converged, alternating, runs, rates = True, True, 0, []
    iter_tol = 1e-6 if analytic else cfg.tol
    for k, g in enumerate(_horizontal_directions(H, cfg.iteration_directions)):
        m = unit(np.cross(H.normal, g))
        for side in (1.0, -1.0):
            gamma0 = supporting_line(body, g, side * m)
            trace = reflection_iteration(body, p, q, gamma0, Hs, tol=iter_tol, axis_tol=iter_tol)
            traces[f"dir{k}_{'pos' if side > 0 else 'neg'}"] = trace
            runs += 1
            converged &= trace.converged
            alternating &= alternation_holds(trace, p, Hs)
            rates.append(trace.rate_estimate)
    ok = bool(free and worst_dev <= plan_tol and converged and alternating)
    return ok, {
        "segment_free": bool(free),
        "max_planarity_deviation": worst_dev,
        "max_normal_angle_to_u": worst_normal,
        "iterations_run": runs,
        "all_converged": bool(converged),
        "alternation": bool(alternating),
        "max_rate": float(np.nanmax(rates)) if rates else float("nan"),
    }


def _stage_ellipsoid(body, p, H, cfg) -> tuple[bool, dict, AffineLine | None]:
    worst = 0.0
    for nu in DirectionGrid.hemisphere(cfg.central_grid).normals:
        sec = section(body, Hyperplane.through(nu, p))
        worst = max(worst, best_central_symmetry(sec).residual)
    analytic = body.analytic is not None
    fit = fit_quadric(boundary_points(body), ANALYTIC_FIT_TOL if analytic else MESH_FIT_TOL)
    metrics = {"central_symmetry_worst": worst, "fit": fit.classification, "fit_residual": fit.residual_rms}
    if fit.classification != ELLIPSOID:
        return False, metrics, None
    s = fit.semiaxes
    eq_tol = 1e-3 if analytic else 1e-2
    gaps = [abs(s[0] - s[1]) / s[0], abs(s[1] - s[2]) / s[1]]
    metrics["semiaxes"] = [float(v) for v in s]
    if gaps[0] <= eq_tol and gaps[1] > eq_tol:
        distinct = fit.axes[2]
    elif gaps[1] <= eq_tol and gaps[0] > eq_tol:
        distinct = fit.axes[0]
    else:
        metrics["revolution"] = False
        return False, metrics, None
    if distinct @ H.normal < 0:
        distinct = -distinct
    angle = float(np.arccos(min(1.0, abs(float(distinct @ H.normal)))))
    metrics["revolution"] = True
    metrics["axis_angle_to_normal"] = angle
    ok = worst <= cfg.tol and angle <= AXIS_ANGLE_TOL
    return ok, metrics, AffineLine(fit.center, distinct)


def verify_theorem(body: ConvexBody, p, H: Hyperplane, config: VerifyConfig | None = None) -> TheoremReport:
    """Run the verification pipeline; stage failures are recorded, never raised."""
    cfg = config or VerifyConfig()
    p = body.require_interior(p)
    params = {
        "tol": cfg.tol,
        "grid": cfg.grid,
        "resolution": body.resolution,
        "shadow_directions": cfg.shadow_directions,
        "iteration_directions": cfg.iteration_directions,
        "central_grid": cfg.central_grid,
        "slices": cfg.slices,
        "delta_seg": cfg.delta_seg,
        "H": {"normal": [float(v) for v in H.normal], "offset": float(H.offset)},
        "point": [float(v) for v in p],
    }
    stages: list[StageRecord] = []
    traces: dict = {}

    def run(name, fn):
        try:
            out = fn()
        except (GeotomoError, ValueError, np.linalg.LinAlgError) as exc:
            stages.append(StageRecord(name, FAILED, {"error": str(exc)}))
            return None
        stages.append(StageRecord(name, PASSED if out[0] else FAILED, out[1]))
        return out

    def finish(conclusion, axis=None):
        done = {s.name for s in stages}
        for name in STAGE_NAMES:
            if name not in done:
                stages.append(StageRecord(name, SKIPPED, {}))
        return TheoremReport(stages, conclusion, axis, params, traces)

    gate = run("hypotheses", lambda: _stage_hypotheses(body, p, H, cfg))
    if gate is None or not gate[0]:
        return finish(HYPOTHESIS_VIOLATED)

    found: dict = {}

    def stage1():
        Hs = symmetry_hyperplane(body, H, cfg.tol)
        found["Hs"] = Hs
        if Hs is None:
            return False, {"found": False}
        return True, {"found": True, "offset": float(Hs.offset)}

    s1 = run(STAGE_NAMES[0], stage1)
    if s1 is None or not s1[0]:
        return finish(INCONCLUSIVE)
    Hs = found["Hs"]
    dist = abs(float(Hs.signed_distance(p)))
    off = dist > cfg.tol * body.diam
    stages.append(StageRecord(STAGE_NAMES[1], PASSED if off else FAILED, {"distance": dist}))
    if not off:
        return finish(HYPOTHESIS_VIOLATED)
    q = reflect_point(p, Hs)

    def stage3():
        dirs = boundary_segment_directions(body, H, cfg.delta_seg)
        a1, a2 = supporting_contact_areas(body, H)
        return not dirs, {
            "segment_directions": [[float(v) for v in d] for d in dirs],
            "contact_area_upper": a1 / body.diam**2,
            "contact_area_lower": a2 / body.diam**2,
        }

    run(STAGE_NAMES[2], stage3)
    run(STAGE_NAMES[3], lambda: _stage_shadows(body, p, q, Hs, H, cfg, traces))

    def stage5():
        rep = revolution_report(body, H, cfg.tol, cfg.slices)
        return rep.axis is not None, {
            "max_angle": rep.max_angle,
            "collinearity": rep.collinearity,
            "axis_angle_to_normal": rep.axis_angle,
        }

    run(STAGE_NAMES[4], stage5)
    result: dict = {}

    def stage6():
        ok, metrics, axis = _stage_ellipsoid(body, p, H, cfg)
        result["axis"] = axis
        return ok, metrics

    run(STAGE_NAMES[5], stage6)
    if all(s.status == PASSED for s in stages):
        return finish(CONCLUSION_OK, result.get("axis"))
    return finish(INCONCLUSIVE)
