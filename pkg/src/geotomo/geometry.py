"""Low-level affine geometry: hyperplanes, lines, frames, reflections and
convex polygon metrics.

Points are plain ``numpy`` float arrays. The small value types below are
frozen dataclasses; they normalize their direction vectors on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError

UNIT_TOL = 1e-12


def as_point(x, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise DegenerateInputError(f"expected a point in R^{dim}, got {arr.shape[0]} coordinates")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError("non-finite coordinates")
    return arr


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise DegenerateInputError("cannot normalize a zero vector")
    return v / n


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The set ``{x : <normal, x> = offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(-1)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise DegenerateInputError("hyperplane normal is zero")
        # rescale the offset together with the normal so the set is unchanged
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @classmethod
    def through(cls, normal, point) -> "Hyperplane":
        n = unit(normal)
        return cls(n, float(n @ np.asarray(point, dtype=float)))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def signed_distance(self, x) -> np.ndarray | float:
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = self.signed_distance(x)
        return x - np.multiply.outer(d, self.normal)

    def flipped(self) -> "Hyperplane":
        return Hyperplane(-self.normal, -self.offset)


@dataclass(frozen=True, eq=False)
class AffineLine:
    """Line ``point + t * direction``; also used for 2D lines in section frames."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float).reshape(-1))
        object.__setattr__(self, "direction", unit(np.asarray(self.direction, dtype=float).reshape(-1)))

    @classmethod
    def through_points(cls, a, b) -> "AffineLine":
        a = np.asarray(a, dtype=float)
        return cls(a, np.asarray(b, dtype=float) - a)

    def at(self, t) -> np.ndarray:
        return self.point + np.multiply.outer(t, self.direction)

    def closest_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.point + ((x - self.point) @ self.direction) * self.direction

    def distance(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.closest_point(x)))

    def normalized(self) -> "AffineLine":
        """Same line with ``point`` moved to the foot of the origin."""
        return AffineLine(self.closest_point(np.zeros_like(self.point)), self.direction)


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(-1))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).reshape(-1))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True, eq=False)
class Frame2D:
    """Orthonormal 2D coordinates embedded in a plane of R^3."""

    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", np.vstack([self.u, self.v]))

    def to_local(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.origin) @ self.basis.T

    def to_world(self, xy) -> np.ndarray:
        return self.origin + np.asarray(xy, dtype=float) @ self.basis

    def direction_to_local(self, d) -> np.ndarray:
        return np.asarray(d, dtype=float) @ self.basis.T


def reflect_point(x, h: Hyperplane) -> np.ndarray:
    """Mirror image of ``x`` (or of each row of ``x``) across ``h``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != h.dim:
        raise DegenerateInputError("point and hyperplane dimensions differ")
    d = x @ h.normal - h.offset
    return x - 2.0 * np.multiply.outer(d, h.normal)


def reflect_point_in_line(x, line: AffineLine) -> np.ndarray:
    """Mirror image of 2D point(s) ``x`` across a 2D line."""
    x = np.asarray(x, dtype=float)
    rel = x - line.point
    along = np.multiply.outer(rel @ line.direction, line.direction)
    return line.point + 2.0 * along - rel


def hyperplane_basis(normal) -> np.ndarray:
    """Rows form an orthonormal basis of ``normal``'s orthogonal complement.

    The first row is the normalized projection of the first standard basis
    vector not parallel to ``normal``. In R^3 the second row is
    ``normal x first`` so that (u, v, normal) is right-handed.
    """
    n = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise DegenerateInputError("hyperplane normal is not a unit vector")
    dim = n.shape[0]
    rows: list[np.ndarray] = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        w = e
        # two Gram-Schmidt passes: one loses orthogonality when e is nearly parallel to n
        for _ in range(2):
            w = w - (w @ n) * n
            for r in rows:
                w = w - (w @ r) * r
        norm = np.linalg.norm(w)
        if norm < 1e-6:
            continue
        rows.append(w / norm)
        if dim == 3:
            rows.append(np.cross(n, rows[0]))
        if len(rows) == dim - 1:
            break
    return np.vstack(rows)


def build_frame(h: Hyperplane, origin) -> Frame2D:
    """Deterministic orthonormal frame of the plane ``h`` (ambient R^3) at ``origin``."""
    origin = as_point(origin, 3)
    if h.dim != 3:
        raise DegenerateInputError("build_frame requires a plane in R^3")
    if abs(h.signed_distance(origin)) > 1e-9 * max(1.0, np.linalg.norm(origin)):
        raise DegenerateInputError("frame origin does not lie on the plane")
    u, v = hyperplane_basis(h.normal)
    return Frame2D(origin, u, v)


def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def cross2(a, b) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def polygon_signed_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    q = np.roll(p, -1, axis=0)
    return 0.5 * float(np.sum(cross2(p, q)))


def polygon_area_centroid(poly) -> np.ndarray:
    """Area centroid of a simple polygon."""
    p = np.asarray(poly, dtype=float)
    # shift for conditioning
    base = p.mean(axis=0)
    p = p - base
    q = np.roll(p, -1, axis=0)
    c = cross2(p, q)
    a = c.sum()
    if abs(a) < 1e-300:
        return base + p.mean(axis=0)
    cx = ((p[:, 0] + q[:, 0]) * c).sum() / (3.0 * a)
    cy = ((p[:, 1] + q[:, 1]) * c).sum() / (3.0 * a)
    return base + np.array([cx, cy])


def polygon_diameter(poly) -> float:
    """Diameter of a convex polygon by rotating calipers (edge / opposite vertex pairs)."""
    p = _clean_ccw(poly)
    if len(p) < 3:
        d = p[:, None, :] - p[None, :, :]
        return float(np.sqrt((d**2).sum(axis=-1).max()))
    ang, _ = _normal_angles(p)
    j = _support_index(ang, ang + np.pi)
    i = np.arange(len(p))
    d1 = np.linalg.norm(p[i] - p[j], axis=1)
    d2 = np.linalg.norm(p[(i + 1) % len(p)] - p[j], axis=1)
    return float(max(d1.max(), d2.max()))


def ensure_ccw(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    return p[::-1].copy() if polygon_signed_area(p) < 0 else p


def distance_to_convex_polygon(points, poly) -> np.ndarray:
    """Euclidean distance from each point to a convex polygon (0 inside)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    P = ensure_ccw(poly)
    a = P
    e = np.roll(P, -1, axis=0) - P
    rel = pts[:, None, :] - a[None, :, :]
    elen2 = np.einsum("ij,ij->i", e, e)
    scale = np.sqrt(elen2.max()) if elen2.size else 1.0
    side = cross2(e[None, :, :], rel)
    inside = np.all(side >= -1e-14 * scale * scale, axis=1)
    t = np.clip(np.einsum("mkj,kj->mk", rel, e) / np.where(elen2 > 0, elen2, 1.0), 0.0, 1.0)
    diff = rel - t[..., None] * e[None, :, :]
    dist = np.sqrt(np.einsum("mkj,mkj->mk", diff, diff).min(axis=1))
    dist[inside] = 0.0
    return dist


def polygon_hausdorff_bruteforce(P, Q) -> float:
    """Hausdorff distance from vertex-to-polygon distances, O(m k).

    Distance to a convex set is a convex function, so each one-sided
    distance is attained at a vertex.
    """
    return float(max(distance_to_convex_polygon(P, Q).max(), distance_to_convex_polygon(Q, P).max()))


def _clean_ccw(poly) -> np.ndarray:
    p = ensure_ccw(poly)
    e = np.roll(p, -1, axis=0) - p
    keep = np.linalg.norm(e, axis=1) > 1e-15 * max(1.0, float(np.abs(p).max()))
    return p[keep]


def _normal_angles(p: np.ndarray) -> tuple[np.ndarray, float]:
    # outward normal of edge i (p[i] -> p[i+1]) of a CCW polygon, unwrapped to increase
    e = np.roll(p, -1, axis=0) - p
    ang = np.unwrap(np.arctan2(-e[:, 0], e[:, 1]))
    return ang, float(ang[0])


def _support_index(ang: np.ndarray, phi) -> np.ndarray:
    """Index of the vertex supporting direction angle ``phi``.

    Vertex i is the maximizer for normal angles in [ang[i-1], ang[i]].
    """
    a0 = ang[0]
    shifted = a0 + np.mod(np.asarray(phi) - a0, 2.0 * np.pi)
    return np.searchsorted(ang, shifted, side="right") % len(ang)


def polygon_hausdorff(P, Q) -> float:
    """Symmetric Hausdorff distance between two convex polygons (as filled sets).

    Equals the sup-norm of the difference of support functions. Between
    consecutive edge normals of either polygon the difference is
    ``<v - w, u>`` for fixed support vertices, whose maximum over the arc is
    found in closed form.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.ndim != 2 or Q.ndim != 2 or len(P) < 3 or len(Q) < 3:
        raise DegenerateInputError("polygon_hausdorff needs polygons with at least 3 vertices")
    P, Q = _clean_ccw(P), _clean_ccw(Q)
    aP, _ = _normal_angles(P)
    aQ, _ = _normal_angles(Q)
    breaks = np.sort(np.mod(np.concatenate([aP, aQ]), 2.0 * np.pi))
    lo = breaks
    hi = np.append(breaks[1:], breaks[0] + 2.0 * np.pi)
    mid = 0.5 * (lo + hi)
    diff = P[_support_index(aP, mid)] - Q[_support_index(aQ, mid)]
    ulo = np.column_stack([np.cos(lo), np.sin(lo)])
    uhi = np.column_stack([np.cos(hi), np.sin(hi)])
    best = max(np.abs(np.einsum("ij,ij->i", diff, ulo)).max(), np.abs(np.einsum("ij,ij->i", diff, uhi)).max())
    psi = np.arctan2(diff[:, 1], diff[:, 0])
    span = hi - lo
    inside = (np.mod(psi - lo, 2.0 * np.pi) <= span) | (np.mod(psi + np.pi - lo, 2.0 * np.pi) <= span)
    if np.any(inside):
        best = max(best, np.linalg.norm(diff[inside], axis=1).max())
    return float(best)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation in R^3."""
    k = unit(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def random_rotation(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
