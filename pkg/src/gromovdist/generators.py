"""Example curves: regular polygons, comet and Dragon's tooth shapes, torus
knots, and a local curl that drives distortion up."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PolygonalCurve, check_embedded, triangle_move_valid

MAX_ARC_STEP = 0.01  # radians per arc sample
COMET_RADIUS_FACTOR = 2.0
KINDS = ("ngon", "comet", "dragons_tooth", "torus_knot", "twist")


class ConstructionError(ValueError):
    """Requested geometry cannot be built as an embedded polygon."""


@dataclass
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator {self.kind!r}; expected one of {KINDS}")

    def build(self, base: PolygonalCurve | None = None) -> PolygonalCurve:
        p = dict(self.params)
        if self.kind == "ngon":
            return make_ngon(**p)
        if self.kind == "comet":
            return make_comet(**p)
        if self.kind == "dragons_tooth":
            return make_dragons_tooth(**p)
        if self.kind == "torus_knot":
            return make_torus_knot(**p)
        if base is None:
            base = make_ngon(4, math.sqrt(0.5))
        return apply_twist(base, **p)


def _arc_steps(span: float, samples: int | None) -> int:
    if samples is None:
        return max(1, int(math.ceil(abs(span) / MAX_ARC_STEP)))
    if samples < 1:
        raise ValueError("arc_samples must be positive")
    return int(samples)


def _check_phi(phi: float):
    if not 0.0 < phi < math.pi:
        raise ValueError(f"corner angle must lie in (0, pi), got {phi}")


def make_ngon(n: int, radius: float = 1.0) -> PolygonalCurve:
    """Regular planar n-gon with vertices on a circle of the given radius."""
    if n < 3:
        raise ValueError("an n-gon needs n >= 3")
    if not radius > 0:
        raise ValueError("radius must be positive")
    a = 2.0 * math.pi * np.arange(n) / n
    v = np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros(n)])
    return PolygonalCurve(v, closed=True, name=f"ngon{n}")


def make_comet(phi: float, segment_len: float = 1.0, arc_radius: float | None = None,
               arc_samples: int | None = None) -> PolygonalCurve:
    """Two straight segments meeting at exterior angle ``phi``, closed by a
    circular arc over the far ends.

    The corner sits at the origin with the segments opening upward.  The
    default radius is ``COMET_RADIUS_FACTOR * segment_len * tan(theta)``,
    theta being the half opening angle; any radius above
    ``segment_len * tan(theta)`` leaves a slight outward kink at the two
    junctions, which keeps the symmetric corner pairs on top.
    """
    _check_phi(phi)
    theta = 0.5 * (math.pi - phi)
    ell = float(segment_len)
    reach = ell * math.sin(theta)
    if arc_radius is None:
        arc_radius = COMET_RADIUS_FACTOR * ell * math.tan(theta)
    rho = float(arc_radius)
    if not rho > reach:
        raise ConstructionError("arc radius too small to span the segment ends")
    beta = -math.acos(reach / rho)
    yc = ell * math.cos(theta) - rho * math.sin(beta)
    span = math.pi - 2.0 * beta
    n = _arc_steps(span, arc_samples)
    ang = beta + span * np.arange(n + 1) / n
    arc = np.column_stack([rho * np.cos(ang), yc + rho * np.sin(ang), np.zeros(n + 1)])
    arc[0] = [reach, ell * math.cos(theta), 0.0]
    arc[-1] = [-reach, ell * math.cos(theta), 0.0]
    v = np.vstack([[[0.0, 0.0, 0.0]], arc])
    return PolygonalCurve(v, closed=True, name=f"comet_phi{phi:.6g}")


def make_dragons_tooth(phi: float, r: float = 1.0, R: float = 10.0,
                       arc_samples: int | None = None, return_parts: bool = False):
    """Corner of exterior angle ``phi`` whose sides are outward-bending arcs
    of radius R, capped by an arc of radius r tangent to both.

    The side arcs are sampled so the first chord on each side leaves the
    corner at exactly half the opening angle, which makes the polygon's
    corner angle ``phi`` exactly.  With ``return_parts`` the parameter
    ranges of the three arcs come back too, keyed right, cap and left.
    """
    _check_phi(phi)
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    theta = 0.5 * (math.pi - phi)
    th = theta
    steps = None
    for _ in range(50):
        cx, cy = R * math.cos(th), -R * math.sin(th)
        h = math.sqrt((R + r) ** 2 - (R * math.cos(th)) ** 2) - R * math.sin(th)
        start = math.pi - th  # corner seen from the right center
        end = math.atan2(h - cy, -cx)  # toward the cap center
        span = start - end
        if not span > 0:
            raise ConstructionError("side arcs do not reach the cap; increase phi or R/r")
        steps = _arc_steps(span, arc_samples)
        new = theta - 0.5 * span / steps
        if abs(new - th) < 1e-15:
            break
        th = new
    if not th > 0:
        raise ConstructionError("opening too narrow for the requested sampling")
    cap_start = math.atan2(cy - h, cx)
    cap_span = math.pi - 2.0 * cap_start
    side_ang = start - span * np.arange(steps + 1) / steps
    right = np.column_stack([cx + R * np.cos(side_ang), cy + R * np.sin(side_ang)])
    right[0] = [0.0, 0.0]
    nc = _arc_steps(cap_span, arc_samples)
    cap_ang = cap_start + cap_span * np.arange(1, nc) / nc
    cap = np.column_stack([r * np.cos(cap_ang), h + r * np.sin(cap_ang)])
    left = right[::-1].copy()
    left[:, 0] *= -1.0
    pts = np.vstack([right, cap, left[:-1]])
    v = np.column_stack([pts, np.zeros(len(pts))])
    curve = PolygonalCurve(v, closed=True, name=f"dragons_tooth_phi{phi:.6g}")
    if not check_embedded(curve).ok:
        raise ConstructionError("Dragon's tooth approximant is not embedded")
    if not return_parts:
        return curve
    s = curve.vertex_params
    parts = {"right": (0.0, float(s[steps])), "cap": (float(s[steps]), float(s[steps + nc])),
             "left": (float(s[steps + nc]), curve.length)}
    return curve, parts


def make_torus_knot(p: int, q: int, n_vertices: int = 128, tube_radii=(2.0, 1.0)) -> PolygonalCurve:
    """(p, q) torus knot sampled at uniform steps of the standard parametrization."""
    if math.gcd(int(p), int(q)) != 1:
        raise ValueError(f"p and q must be coprime, got ({p}, {q})")
    R, r = (float(x) for x in tube_radii)
    if not 0 < r < R:
        raise ValueError("need 0 < r < R for the tube radii")
    if n_vertices < 3:
        raise ConstructionError("too few vertices")
    t = 2.0 * math.pi * np.arange(n_vertices) / n_vertices
    rad = R + r * np.cos(q * t)
    v = np.column_stack([rad * np.cos(p * t), rad * np.sin(p * t), r * np.sin(q * t)])
    curve = PolygonalCurve(v, closed=True, name=f"torus_{p}_{q}")
    chk = check_embedded(curve)
    if not chk.ok:
        raise ConstructionError(f"{n_vertices} vertices do not embed the ({p},{q}) torus knot: edges {chk.pair}")
    return curve


def _frame(e: np.ndarray, angle: float):
    helper = np.array([0.0, 0.0, 1.0]) if abs(e[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    a = np.cross(e, helper)
    a /= np.linalg.norm(a)
    b = np.cross(e, a)
    n1 = math.cos(angle) * a + math.sin(angle) * b
    n2 = np.cross(e, n1)
    return n1, n2


def _twist_points(M, e, n1, n2, eps, scale):
    w, dip, H, G, zc = 0.1 * scale, 0.05 * scale, 0.15 * scale, 0.15 * scale, 0.075 * scale

    def at(x, y, z):
        return M + x * e + y * n1 + z * n2

    return [at(-w, 0, -dip), at(0, 0, 0), at(w, 0, -dip), at(w, H, zc), at(0, H, G),
            at(0, 0, eps), at(0, -H, G), at(2 * w, 0, 0)]


def reduces_to(curve: PolygonalCurve, base_count: int, added: list[int]) -> bool:
    """Greedy check that the vertices in ``added`` can all be removed by
    valid triangle moves, leaving a curve isotopic to the one without them."""
    verts = [np.array(x) for x in curve.vertices]
    tags = [k in added for k in range(len(verts))]
    progress = True
    while any(tags) and progress:
        progress = False
        for k in range(len(verts)):
            if not tags[k]:
                continue
            rest = verts[:k] + verts[k + 1:]
            if len(rest) < 3:
                return False
            reduced = PolygonalCurve(np.array(rest), closed=True)
            i = (k - 1) % len(rest)
            if triangle_move_valid(reduced, i, verts[k]).valid:
                verts, tags = rest, tags[:k] + tags[k + 1:]
                progress = True
                break
    return not any(tags) and len(verts) == base_count


def twist_loop_length(eps: float, scale: float) -> float:
    """Arc length of the curl between the two closest points."""
    M, e = np.zeros(3), np.array([1.0, 0, 0])
    n1, n2 = np.array([0, 1.0, 0]), np.array([0, 0, 1.0])
    pts = _twist_points(M, e, n1, n2, eps, scale)
    return float(sum(np.linalg.norm(pts[k + 1] - pts[k]) for k in range(1, 5)))


def apply_twist(curve: PolygonalCurve, edge: int = 0, eps_twist: float = 0.01,
                scale: float | None = None, orientations: int = 12) -> PolygonalCurve:
    """Insert a small curl into edge ``edge`` so two points of the curve come
    within ``eps_twist`` of each other while the arc between them stays
    about ``0.64 * scale`` long (scale defaults to the edge length).

    The curl is a Reidemeister-I loop; the result is checked to reduce back
    to the input by triangle moves, and a ConstructionError is raised when
    no orientation of the curl clears the rest of the curve.
    """
    if not curve.closed:
        raise ValueError("twists are added to closed curves")
    m = curve.n_edges
    if not 0 <= edge < m:
        raise IndexError(f"edge {edge} out of range")
    ell = float(curve.edge_lengths[edge])
    scale = ell if scale is None else float(scale)
    if not 0 < eps_twist < 0.05 * scale:
        raise ValueError("eps_twist must be positive and small against the curl size")
    if 0.3 * scale > 0.5 * ell:
        raise ConstructionError("edge too short for a curl of this size")
    P = curve.vertices[edge]
    e = curve.directions[edge]
    M = P + (0.5 * ell - 0.05 * scale) * e
    for k in range(orientations):
        n1, n2 = _frame(e, 2.0 * math.pi * k / orientations)
        pts = _twist_points(M, e, n1, n2, eps_twist, scale)
        verts = np.vstack([curve.vertices[: edge + 1], pts, curve.vertices[edge + 1:]])
        out = PolygonalCurve(verts, closed=True, name=(curve.name or "curve") + "_twist")
        if not check_embedded(out).ok:
            continue
        added = list(range(edge + 1, edge + 1 + len(pts)))
        if reduces_to(out, len(curve.vertices), added):
            return out
    raise ConstructionError("no curl placement clears the other strands")
