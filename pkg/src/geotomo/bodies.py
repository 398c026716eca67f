"""Convex bodies: representation, generators and the basic queries
(support, section, projection, diametral chord, boundary membership).

A :class:`ConvexBody` is a V-polytope. Ellipsoids additionally carry an
analytic quadric; when present it is used for support, sections, chords and
boundary distances, so those answers are exact rather than mesh-limited.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull

from .errors import DegenerateInputError, EmptySectionError, SpecError
from .geometry import (
    Frame2D,
    Hyperplane,
    Segment,
    as_point,
    build_frame,
    ensure_ccw,
    hyperplane_basis,
    unit,
)

DEFAULT_RESOLUTION = 256
DEFAULT_RESOLUTION_4D = 64
BODY_KINDS = ("ellipsoid", "revolution", "polytope", "disc_hull")


@dataclass(frozen=True, eq=False)
class Quadric:
    """Solid ellipsoid ``{x : (x - center)^T matrix^{-1} (x - center) <= 1}``.

    Its support function is ``<center, u> + sqrt(u^T matrix u)``.
    """

    matrix: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        M = 0.5 * (M + M.T)
        if np.linalg.eigvalsh(M).min() <= 0:
            raise SpecError("quadric matrix must be positive definite")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(-1))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    @cached_property
    def principal(self) -> tuple[np.ndarray, np.ndarray]:
        """(semiaxes, rotation) with columns of rotation the principal axes."""
        w, R = np.linalg.eigh(self.matrix)
        return np.sqrt(w), R

    def level(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.center
        return np.einsum("...i,ij,...j->...", d, self.inverse, d)

    def support(self, u) -> tuple[float, np.ndarray]:
        Mu = self.matrix @ u
        s = float(np.sqrt(u @ Mu))
        return float(self.center @ u) + s, self.center + Mu / s

    def boundary_distance(self, x) -> float:
        """Unsigned distance from ``x`` to the ellipsoid surface."""
        e, R = self.principal
        y = (np.asarray(x, dtype=float) - self.center) @ R
        return float(np.linalg.norm(y - _closest_on_ellipsoid(y, e)))

    def transformed(self, A: np.ndarray, b: np.ndarray) -> "Quadric":
        """Image under ``x -> A x + b``."""
        return Quadric(A @ self.matrix @ A.T, A @ self.center + b)


def _closest_on_ellipsoid(y: np.ndarray, e: np.ndarray) -> np.ndarray:
    # closest points satisfy x_i = e_i^2 y_i / (e_i^2 + t)
    e2 = e**2
    emin2 = e2.min()

    def F(t):
        return float(np.sum((e * y / (e2 + t)) ** 2) - 1.0)

    if np.all(np.abs(y) < 1e-300):
        x = np.zeros_like(y)
        x[np.argmin(e)] = e.min()
        return x
    lo = -emin2 + 1e-14 * max(1.0, emin2)
    if F(lo) > 0:
        hi = max(1.0, float(np.max(np.abs(e * y)))) * float(e.max()) + 1.0
        while F(hi) > 0:
            hi *= 2.0
        t = brentq(F, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
        return e2 * y / (e2 + t)
    # degenerate interior case: components along the shortest axes vanish
    small = np.isclose(e2, emin2, rtol=1e-12, atol=0.0)
    x = np.empty_like(y)
    x[~small] = e2[~small] * y[~small] / (e2[~small] - emin2)
    rest = 1.0 - np.sum((x[~small] / e[~small]) ** 2)
    ys = y[small]
    r = float(np.sqrt(max(rest, 0.0)) * np.sqrt(emin2))
    nys = np.linalg.norm(ys)
    if nys > 0:
        x[small] = r * ys / nys
    else:
        x[small] = 0.0
        x[np.flatnonzero(small)[0]] = r
    return x


@dataclass
class BodySpec:
    """Parameters of one of the generator families.

    Unused fields are ignored for a given ``kind``; ``validate`` checks the
    ones that matter.
    """

    kind: str
    semiaxes: tuple | None = None
    center: tuple | None = None
    rotation: list | None = None
    profile: list | None = None
    axis: tuple | None = None
    vertices: list | None = None
    radii: tuple | None = None

    def validate(self) -> None:
        if self.kind not in BODY_KINDS:
            raise SpecError(f"unknown body kind {self.kind!r}")
        if self.kind == "ellipsoid":
            if self.semiaxes is None or len(self.semiaxes) not in (2, 3, 4):
                raise SpecError("ellipsoid needs 2 to 4 semiaxes")
            if min(self.semiaxes) <= 0:
                raise SpecError("ellipsoid semiaxes must be positive")
            dim = len(self.semiaxes)
            if self.center is not None and len(self.center) != dim:
                raise SpecError("center dimension does not match semiaxes")
            if self.rotation is not None:
                R = np.asarray(self.rotation, dtype=float)
                if R.shape != (dim, dim) or not np.allclose(R @ R.T, np.eye(dim), atol=1e-9):
                    raise SpecError("rotation rows must be orthonormal")
        elif self.kind == "revolution":
            prof = np.asarray(self.profile if self.profile is not None else [], dtype=float)
            if prof.ndim != 2 or prof.shape[1] != 2 or len(prof) < 2:
                raise SpecError("revolution profile must be a list of (r, z) pairs")
            if np.any(prof[:, 0] < 0):
                raise SpecError("profile radii must be nonnegative")
            _check_profile_convex(prof)
            if self.axis is not None and (len(self.axis) != 3 or np.linalg.norm(self.axis) == 0):
                raise SpecError("axis must be a nonzero 3-vector")
        elif self.kind == "polytope":
            V = np.asarray(self.vertices if self.vertices is not None else [], dtype=float)
            if V.ndim != 2 or len(V) < V.shape[1] + 1 or V.shape[1] not in (2, 3, 4):
                raise SpecError("polytope needs at least dim+1 vertices in R^2..R^4")
            if np.linalg.matrix_rank(V[1:] - V[0], tol=1e-12 * max(1.0, np.abs(V).max())) < V.shape[1]:
                raise SpecError("polytope vertices are not full-dimensional")
        elif self.kind == "disc_hull":
            if self.radii is None or len(self.radii) != 2 or min(self.radii) <= 0:
                raise SpecError("disc_hull needs two positive radii")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        keys = {
            "ellipsoid": ("semiaxes", "center", "rotation"),
            "revolution": ("profile", "axis"),
            "polytope": ("vertices",),
            "disc_hull": ("radii",),
        }[self.kind]
        for k in keys:
            val = getattr(self, k)
            if val is not None:
                out[k] = np.asarray(val, dtype=float).tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BodySpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise SpecError("body definition must be an object with a 'kind' field")
        allowed = {"kind", "semiaxes", "center", "rotation", "profile", "axis", "vertices", "radii"}
        extra = set(data) - allowed
        if extra:
            raise SpecError(f"unknown body fields: {sorted(extra)}")
        spec = cls(**data)
        spec.validate()
        return spec


def _check_profile_convex(prof: np.ndarray) -> None:
    # the lathed body is convex iff the profile and its mirror image bound a convex region
    mirrored = prof * np.array([-1.0, 1.0])
    pts = np.unique(np.vstack([prof, mirrored]), axis=0)
    scale = max(1.0, float(np.abs(pts).max()))
    try:
        hull = ConvexHull(pts)
    except Exception as exc:  # qhull raises for flat input
        raise SpecError("revolution profile spans no area") from exc
    eq = hull.equations
    margin = (pts @ eq[:, :2].T + eq[:, 2]).max(axis=1)
    if np.any(margin < -1e-9 * scale):
        raise SpecError("revolution profile is not convex")


def load_body_spec(path) -> BodySpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"malformed body file: {exc}") from exc
    return BodySpec.from_dict(data)


def dump_body_spec(spec: BodySpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")


class ConvexBody:
    """Convex polytope given by vertices, optionally backed by an exact quadric."""

    def __init__(self, vertices, analytic: Quadric | None = None, resolution: int = DEFAULT_RESOLUTION):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] not in (2, 3, 4) or len(V) < V.shape[1] + 1:
            raise DegenerateInputError("body needs at least dim+1 vertices in R^2..R^4")
        V.setflags(write=False)
        self.vertices = V
        self.analytic = analytic
        self.resolution = int(resolution)
        if analytic is not None and analytic.center.shape[0] != V.shape[1]:
            raise DegenerateInputError("analytic backend dimension mismatch")

    def __repr__(self) -> str:
        kind = "ellipsoid" if self.analytic is not None else "polytope"
        return f"ConvexBody({kind}, dim={self.dim}, n_vertices={len(self.vertices)})"

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def hull(self) -> ConvexHull:
        return ConvexHull(self.vertices)

    @cached_property
    def hull_vertices(self) -> np.ndarray:
        return self.vertices[self.hull.vertices]

    @cached_property
    def centroid(self) -> np.ndarray:
        if self.analytic is not None:
            return self.analytic.center.copy()
        return self.vertices.mean(axis=0)

    @cached_property
    def diam(self) -> float:
        if self.analytic is not None:
            return 2.0 * float(self.analytic.principal[0].max())
        return _point_set_diameter(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique vertex-index pairs of the triangulated hull."""
        simp = self.hull.simplices
        k = simp.shape[1]
        pairs = np.vstack([simp[:, [i, j]] for i in range(k) for j in range(i + 1, k)])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)

    @cached_property
    def true_edges(self) -> np.ndarray:
        """Hull edges that are not diagonals of a merged (coplanar) facet. 3D only."""
        if self.dim != 3:
            raise DegenerateInputError("true_edges is implemented for R^3 bodies")
        simp = self.hull.simplices
        eq = self.hull.equations
        scale = max(1.0, self.diam)
        owner: dict[tuple[int, int], list[int]] = {}
        for f, tri in enumerate(simp):
            for i, j in ((0, 1), (1, 2), (0, 2)):
                a, b = sorted((int(tri[i]), int(tri[j])))
                owner.setdefault((a, b), []).append(f)
        keep = []
        for (a, b), fs in owner.items():
            if len(fs) == 2:
                e1, e2 = eq[fs[0]], eq[fs[1]]
                if np.allclose(e1[:3], e2[:3], atol=1e-9) and abs(e1[3] - e2[3]) < 1e-9 * scale:
                    continue
            keep.append((a, b))
        return np.array(sorted(keep), dtype=int)

    def transformed(self, A, b=None) -> "ConvexBody":
        """Image of the body under the affine map ``x -> A x + b``."""
        A = np.asarray(A, dtype=float)
        b = np.zeros(self.dim) if b is None else np.asarray(b, dtype=float)
        analytic = self.analytic.transformed(A, b) if self.analytic is not None else None
        return ConvexBody(self.vertices @ A.T + b, analytic=analytic, resolution=self.resolution)

    def translated(self, t) -> "ConvexBody":
        return self.transformed(np.eye(self.dim), np.asarray(t, dtype=float))

    def signed_distance(self, x) -> float:
        """Negative inside, positive outside; magnitude is the distance to the boundary.

        Polytopes use facet margins, which are exact inside and a lower
        bound outside.
        """
        x = as_point(x, self.dim)
        if self.analytic is not None:
            d = self.analytic.boundary_distance(x)
            return -d if self.analytic.level(x) <= 1.0 else d
        eq = self.hull.equations
        return float((eq[:, :-1] @ x + eq[:, -1]).max())

    def require_interior(self, x, margin: float = 1e-6) -> np.ndarray:
        from .errors import NotInteriorError

        x = as_point(x, self.dim)
        if self.signed_distance(x) >= -margin * self.diam:
            raise NotInteriorError("point not interior")
        return x


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _probe_directions(dim: int, n: int = 400) -> np.ndarray:
    if dim == 2:
        t = np.pi * np.arange(n) / n
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        return _fibonacci_sphere(n)
    rng = np.random.default_rng(12345)
    d = rng.normal(size=(n, dim))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _point_set_diameter(V: np.ndarray) -> float:
    if len(V) <= 3000:
        best = 0.0
        for start in range(0, len(V), 500):
            blk = V[start : start + 500]
            d2 = ((blk[:, None, :] - V[None, :, :]) ** 2).sum(axis=-1)
            best = max(best, float(d2.max()))
        return float(np.sqrt(best))
    # width in direction a-b bounds |a-b| from above; iterate to a local maximum
    D = _probe_directions(V.shape[1])
    proj = V @ D.T
    widths = proj.max(axis=0) - proj.min(axis=0)
    best = 0.0
    for k in np.argsort(widths)[-8:]:
        u = D[k]
        for _ in range(50):
            s = V @ u
            a, b = V[np.argmax(s)], V[np.argmin(s)]
            new_u = unit(a - b)
            best = max(best, float(np.linalg.norm(a - b)))
            if np.allclose(new_u, u, atol=1e-15):
                break
            u = new_u
    return best


def _sphere_samples(dim: int, resolution: int) -> np.ndarray:
    if dim == 2:
        t = 2.0 * np.pi * np.arange(resolution) / resolution
        return np.column_stack([np.cos(t), np.sin(t)])
    rings = max(resolution // 2, 2)
    phi = 2.0 * np.pi * np.arange(resolution) / resolution
    if dim == 3:
        theta = np.pi * np.arange(1, rings) / rings
        T, P = np.meshgrid(theta, phi, indexing="ij")
        pts = np.column_stack(
            [(np.sin(T) * np.cos(P)).ravel(), (np.sin(T) * np.sin(P)).ravel(), np.cos(T).ravel()]
        )
        return np.vstack([[0.0, 0.0, 1.0], pts, [0.0, 0.0, -1.0]])
    psi = np.pi * np.arange(0, rings + 1) / rings
    A, B, P = np.meshgrid(psi, psi, phi, indexing="ij")
    pts = np.column_stack(
        [
            np.cos(A).ravel(),
            (np.sin(A) * np.cos(B)).ravel(),
            (np.sin(A) * np.sin(B) * np.cos(P)).ravel(),
            (np.sin(A) * np.sin(B) * np.sin(P)).ravel(),
        ]
    )
    return np.unique(np.round(pts, 14), axis=0)


def ellipsoid_body(semiaxes, center=None, rotation=None, resolution: int | None = None) -> ConvexBody:
    a = np.asarray(semiaxes, dtype=float)
    dim = a.shape[0]
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    R = np.eye(dim) if rotation is None else np.asarray(rotation, dtype=float)
    if resolution is None:
        resolution = DEFAULT_RESOLUTION_4D if dim == 4 else DEFAULT_RESOLUTION
    A = R @ np.diag(a)
    V = _sphere_samples(dim, resolution) @ A.T + c
    return ConvexBody(V, analytic=Quadric(A @ A.T, c), resolution=resolution)


def revolution_body(profile, axis=None, resolution: int = DEFAULT_RESOLUTION) -> ConvexBody:
    prof = np.asarray(profile, dtype=float)
    a = unit([0.0, 0.0, 1.0] if axis is None else axis)
    e1, e2 = hyperplane_basis(a)
    phi = 2.0 * np.pi * np.arange(resolution) / resolution
    ring = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)
    pts = []
    for r, z in prof:
        if r <= 1e-15:
            pts.append((z * a)[None, :])
        else:
            pts.append(r * ring + z * a)
    return ConvexBody(np.vstack(pts), resolution=resolution)


def disc_hull_body(r1: float, r2: float, resolution: int = DEFAULT_RESOLUTION) -> ConvexBody:
    t = 2.0 * np.pi * np.arange(resolution) / resolution
    c, s = np.cos(t), np.sin(t)
    z = np.zeros_like(t)
    d1 = np.column_stack([r1 * c, r1 * s, z])
    d2 = np.column_stack([z, r2 * c, r2 * s])
    V = np.unique(np.round(np.vstack([d1, d2]), 15), axis=0)
    return ConvexBody(V, resolution=resolution)


def half_ellipse_profile(radius: float, half_height: float, samples: int = 129) -> list:
    """(r, z) profile whose lathe is the ellipsoid of revolution with these axes."""
    t = np.pi * np.arange(samples) / (samples - 1)
    r = radius * np.sin(t)
    r[0] = r[-1] = 0.0
    return np.column_stack([r, half_height * np.cos(t)]).tolist()


def make_body(spec: BodySpec, resolution: int = DEFAULT_RESOLUTION) -> ConvexBody:
    if resolution < 16:
        raise SpecError("resolution must be at least 16")
    spec.validate()
    if spec.kind == "ellipsoid":
        return ellipsoid_body(spec.semiaxes, spec.center, spec.rotation, resolution)
    if spec.kind == "revolution":
        return revolution_body(spec.profile, spec.axis, resolution)
    if spec.kind == "disc_hull":
        return disc_hull_body(spec.radii[0], spec.radii[1], resolution)
    return ConvexBody(np.asarray(spec.vertices, dtype=float), resolution=resolution)


def support(body: ConvexBody, u) -> tuple[float, np.ndarray]:
    """Support value and a maximizing point.

    Polytope ties resolve to the lexicographically smallest maximizer.
    """
    u = as_point(u, body.dim)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise DegenerateInputError("support direction must be a unit vector")
    if body.analytic is not None:
        return body.analytic.support(u)
    V = body.vertices
    vals = V @ u
    top = vals.max()
    scale = max(1.0, float(np.abs(V).max()))
    cand = V[vals >= top - 1e-12 * scale]
    idx = np.lexsort(cand.T[::-1])[0]
    return float(top), cand[idx].copy()


def support_values(body: ConvexBody, U) -> np.ndarray:
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if body.analytic is not None:
        q = body.analytic
        return U @ q.center + np.sqrt(np.einsum("ij,jk,ik->i", U, q.matrix, U))
    return (body.hull_vertices @ U.T).max(axis=0)


@dataclass(frozen=True, eq=False)
class PlanarSection:
    """Convex polygon (counterclockwise, frame coordinates) cut from a body by a plane."""

    frame: Frame2D
    polygon: np.ndarray
    source_plane: Hyperplane
    diam: float = field(default=0.0)
    # exact ellipse (center, form B, level rho): (y - c)^T B (y - c) <= rho
    ellipse: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        from .geometry import polygon_diameter

        poly = np.asarray(self.polygon, dtype=float)
        object.__setattr__(self, "polygon", poly)
        if not self.diam:
            object.__setattr__(self, "diam", polygon_diameter(poly))

    @classmethod
    def from_polygon(cls, polygon) -> "PlanarSection":
        """Wrap a bare 2D polygon (the plane z = 0 of R^3 with the canonical frame)."""
        poly = ensure_ccw(np.asarray(polygon, dtype=float))
        plane = Hyperplane(np.array([0.0, 0.0, 1.0]), 0.0)
        return cls(build_frame(plane, np.zeros(3)), poly, plane)

    def to_world(self) -> np.ndarray:
        return self.frame.to_world(self.polygon)

    def support(self, w2) -> tuple[float, np.ndarray]:
        """Support value and point in frame coordinates (exact for analytic sections)."""
        w2 = np.asarray(w2, dtype=float)
        if self.ellipse is not None:
            c, B, rho = self.ellipse
            Bw = np.linalg.solve(B, w2)
            s = np.sqrt(rho * (w2 @ Bw))
            return float(c @ w2 + s), c + rho * Bw / s
        vals = self.polygon @ w2
        k = int(np.argmax(vals))
        return float(vals[k]), self.polygon[k].copy()


def _require_crossing(body: ConvexBody, plane: Hyperplane) -> None:
    hi = support_values(body, plane.normal)[0]
    lo = -support_values(body, -plane.normal)[0]
    margin = 1e-9 * body.diam
    if not (lo + margin < plane.offset < hi - margin):
        raise EmptySectionError("plane does not cut the interior of the body")


def section(body: ConvexBody, plane: Hyperplane) -> PlanarSection:
    if body.dim != 3:
        raise DegenerateInputError("section is implemented for bodies in R^3")
    _require_crossing(body, plane)
    anchor = plane.project(body.centroid)
    frame = build_frame(plane, anchor)
    if body.analytic is not None:
        ell = _ellipse_section(body.analytic, frame, body.resolution)
        if ell is None:
            raise EmptySectionError("plane does not cut the interior of the body")
        poly, params = ell
        return PlanarSection(frame, poly, plane, ellipse=params)
    V = body.vertices
    s = V @ plane.normal - plane.offset
    E = body.edges
    sa, sb = s[E[:, 0]], s[E[:, 1]]
    cross = sa * sb < 0
    ea, eb = E[cross, 0], E[cross, 1]
    t = (sa[cross] / (sa[cross] - sb[cross]))[:, None]
    pts = V[ea] + t * (V[eb] - V[ea])
    on = np.abs(s) <= 1e-14 * max(1.0, body.diam)
    pts = np.vstack([pts, V[on]])
    local = frame.to_local(pts)
    if len(local) < 3:
        raise EmptySectionError("plane does not cut the interior of the body")
    try:
        hull = ConvexHull(local)
    except Exception as exc:
        raise EmptySectionError("degenerate section") from exc
    return PlanarSection(frame, ensure_ccw(local[hull.vertices]), plane)


def _ellipse_section(q: Quadric, frame: Frame2D, samples: int):
    A = q.inverse
    F = frame.basis.T
    d = frame.origin - q.center
    B = F.T @ A @ F
    b = F.T @ A @ d
    y0 = -np.linalg.solve(B, b)
    rho = 1.0 - d @ A @ d + b @ np.linalg.solve(B, b)
    if rho <= 0:
        return None
    lam, Q = np.linalg.eigh(B)
    samples = max(4 * ((samples + 3) // 4), 16)
    t = 2.0 * np.pi * np.arange(samples) / samples
    circ = np.column_stack([np.cos(t), np.sin(t)]) * np.sqrt(rho / lam)
    return ensure_ccw(y0 + circ @ Q.T), (y0, B, float(rho))


def project(body: ConvexBody, target: Hyperplane) -> ConvexBody:
    """Orthogonal projection onto ``target`` (shifted through the origin), in its frame."""
    if target.dim != body.dim:
        raise DegenerateInputError("dimension mismatch")
    B = hyperplane_basis(target.normal)
    pts = body.vertices @ B.T
    hull = ConvexHull(pts)
    analytic = None
    if body.analytic is not None:
        q = body.analytic
        analytic = Quadric(B @ q.matrix @ B.T, B @ q.center)
    return ConvexBody(pts[hull.vertices], analytic=analytic, resolution=body.resolution)


def chord_length_field(body: ConvexBody, direction, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Chord extents of lines ``B^T y + t d`` for rows ``y`` of ``ys``.

    Returns (tmin, tmax, score) where score is the concave length function
    with a penalty outside the projection.
    """
    d = np.asarray(direction, dtype=float)
    B = hyperplane_basis(d)
    eq = body.hull.equations
    a, off = eq[:, :-1], eq[:, -1]
    ad = a @ d
    base = ys @ (a @ B.T).T + off  # (m, facets)
    pos, neg = ad > 1e-12, ad < -1e-12
    par = ~(pos | neg)
    tmax = (-base[:, pos] / ad[pos]).min(axis=1)
    tmin = (-base[:, neg] / ad[neg]).max(axis=1)
    score = tmax - tmin
    if np.any(par):
        viol = np.maximum(base[:, par].max(axis=1), 0.0)
        score = score - 1e3 * viol
    return tmin, tmax, score


def diametral_chord(body: ConvexBody, direction) -> Segment:
    """A longest chord parallel to ``direction``, oriented along it."""
    d = as_point(direction, body.dim)
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise DegenerateInputError("direction must be a unit vector")
    # canonical sign so that d and -d give the identical chord
    nz = d[np.flatnonzero(np.abs(d) > 1e-15)[0]]
    flip = nz < 0
    dc = -d if flip else d
    if body.analytic is not None:
        q = body.analytic
        half = 1.0 / np.sqrt(dc @ q.inverse @ dc)
        a, b = q.center - half * dc, q.center + half * dc
    else:
        a, b = _polytope_diametral_chord(body, dc)
    return Segment(b, a) if flip else Segment(a, b)


def _polytope_diametral_chord(body: ConvexBody, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    B = hyperplane_basis(d)
    proj = body.hull_vertices @ B.T
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    n = 25
    axes = [np.linspace(lo[i], hi[i], n) for i in range(len(lo))]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    _, _, score = chord_length_field(body, d, grid)
    best = grid[np.argmax(score)]
    best_score = score.max()
    step = (hi - lo) / (n - 1)
    # pattern search on the concave chord-length function
    for _ in range(40):
        offs = np.stack(np.meshgrid(*[np.linspace(-1, 1, 5)] * len(lo), indexing="ij"), axis=-1)
        cand = best + offs.reshape(-1, len(lo)) * step
        _, _, sc = chord_length_field(body, d, cand)
        k = int(np.argmax(sc))
        if sc[k] > best_score:
            best, best_score = cand[k], sc[k]
        else:
            step = step / 2.0
        if step.max() < 1e-12 * body.diam:
            break
    yc = (body.centroid @ B.T)[None, :]
    _, _, sc = chord_length_field(body, d, yc)
    if sc[0] >= best_score - 1e-9 * body.diam:
        best = yc[0]
    tmin, tmax, _ = chord_length_field(body, d, best[None, :])
    base = best @ B
    return base + tmin[0] * d, base + tmax[0] * d


def boundary_contains_point(body: ConvexBody, x, tol: float) -> bool:
    return abs(body.signed_distance(x)) <= tol * body.diam
