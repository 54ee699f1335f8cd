"""Polygonal space curves, arclength parametrization and segment predicates."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from ._kernels import closest_nonadjacent


class ChordPair(NamedTuple):
    """Two arclength parameters naming a chord of a curve."""

    s: float
    t: float


class EmbeddingCheck(NamedTuple):
    ok: bool
    pair: tuple[int, int] | None = None
    distance: float = math.inf


class TriangleCheck(NamedTuple):
    valid: bool
    degenerate: bool = False
    blocking_edge: int | None = None


class PolygonalCurve:
    """Immutable polygon in R^3, open or closed.

    The arclength table is computed once.  Parameters on closed curves are
    taken modulo the total length.
    """

    __slots__ = ("vertices", "closed", "name", "edge_vectors", "edge_lengths",
                 "directions", "starts", "length")

    def __init__(self, vertices, closed: bool = True, name: str | None = None):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            raise ValueError(f"vertices must have shape (n, 3), got {v.shape}")
        if v.shape[1] == 2:
            v = np.column_stack([v, np.zeros(len(v))])
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        need = 3 if closed else 2
        if len(v) < need:
            kind = "closed" if closed else "open"
            raise ValueError(f"a {kind} curve needs at least {need} vertices")
        ends = np.roll(v, -1, axis=0) if closed else v[1:]
        edges = ends - (v if closed else v[:-1])
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths <= 0.0):
            k = int(np.argmin(lengths))
            raise ValueError(f"edge {k} has zero length")
        starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
        for arr in (v, edges, lengths, starts):
            arr.setflags(write=False)
        dirs = edges / lengths[:, None]
        dirs.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "closed", bool(closed))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "edge_vectors", edges)
        object.__setattr__(self, "edge_lengths", lengths)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "length", float(lengths.sum()))

    def __setattr__(self, key, value):
        raise AttributeError("PolygonalCurve is immutable")

    def __repr__(self):
        kind = "closed" if self.closed else "open"
        label = f" {self.name!r}" if self.name else ""
        return f"<PolygonalCurve{label} {kind}, {len(self.vertices)} vertices, L={self.length:.6g}>"

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, PolygonalCurve):
            return NotImplemented
        return (self.closed == other.closed
                and self.vertices.shape == other.vertices.shape
                and bool(np.array_equal(self.vertices, other.vertices)))

    __hash__ = None

    @property
    def n_edges(self) -> int:
        return len(self.edge_lengths)

    @property
    def vertex_params(self) -> np.ndarray:
        """Arclength parameter of every vertex (open curves include L)."""
        if self.closed:
            return self.starts.copy()
        return np.append(self.starts, self.length)

    def edge_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        # exact copies of the next vertex, so shared endpoints compare equal
        m = self.n_edges
        return self.vertices[:m], np.roll(self.vertices, -1, axis=0)[:m] if self.closed else self.vertices[1:]

    def canonical(self, s):
        """Map parameter(s) into [0, L) (closed) or validate [0, L] (open)."""
        s = np.asarray(s, dtype=float)
        L = self.length
        if self.closed:
            out = np.mod(s, L)
            return np.where(out >= L, 0.0, out)
        tol = 1e-12 * L
        if np.any(s < -tol) or np.any(s > L + tol):
            raise ValueError(f"parameter outside [0, {L}] on an open curve")
        return np.clip(s, 0.0, L)

    def locate(self, s):
        """Return (edge index, offset along edge) for canonical parameters."""
        s = self.canonical(s)
        idx = np.searchsorted(self.starts, s, side="right") - 1
        idx = np.clip(idx, 0, self.n_edges - 1)
        return idx, s - self.starts[idx]

    def points_at(self, s) -> np.ndarray:
        idx, u = self.locate(s)
        return self.vertices[idx] + u[..., None] * self.directions[idx]

    def with_vertices(self, vertices, name: str | None = None) -> PolygonalCurve:
        return PolygonalCurve(vertices, closed=self.closed, name=name or self.name)

    def scaled(self, factor: float) -> PolygonalCurve:
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return self.with_vertices(self.vertices * factor)

    def rolled(self, shift: int) -> PolygonalCurve:
        """Closed curve with the vertex list cyclically shifted by `shift`."""
        if not self.closed:
            raise ValueError("only closed curves can be rolled")
        return self.with_vertices(np.roll(self.vertices, -shift, axis=0))

    def exterior_angle_at(self, k: int) -> float:
        """Turning angle at vertex k (0 at the ends of an open curve)."""
        m = self.n_edges
        if not self.closed and (k == 0 or k == len(self.vertices) - 1):
            return 0.0
        a = self.directions[(k - 1) % m]
        b = self.directions[k % m]
        return _angle_between(a, b)


def _angle_between(a: np.ndarray, b: np.ndarray) -> float:
    # atan2 form stays accurate for nearly parallel vectors
    cross = np.linalg.norm(np.cross(a, b))
    return float(math.atan2(cross, float(np.dot(a, b))))


def as_curve(curve, closed: bool | None = None) -> PolygonalCurve:
    if isinstance(curve, PolygonalCurve):
        return curve
    return PolygonalCurve(curve, closed=True if closed is None else closed)


def point_at(curve: PolygonalCurve, s: float) -> np.ndarray:
    """Point at arclength ``s``; closed curves wrap, open curves raise."""
    return curve.points_at(float(s))


def arc_distance(curve: PolygonalCurve, pair) -> float:
    """Intrinsic distance between gamma(s) and gamma(t) along the curve."""
    s, t = (float(x) for x in curve.canonical(np.asarray(pair, dtype=float)))
    d = abs(t - s)
    if curve.closed:
        d = min(d, curve.length - d)
    return d


def chord_distance(curve: PolygonalCurve, pair) -> float:
    p = curve.points_at(np.asarray(pair, dtype=float))
    return float(np.linalg.norm(p[0] - p[1]))


def arc_distances(curve: PolygonalCurve, s, t) -> np.ndarray:
    d = np.abs(curve.canonical(t) - curve.canonical(s))
    if curve.closed:
        d = np.minimum(d, curve.length - d)
    return d


# ---------------------------------------------------------------------------
# segment predicates


def segment_distances(p0, p1, q0, q1, return_params: bool = False):
    """Minimum distance between segments [p0,p1] and [q0,q1], broadcast over rows.

    Clamped-parameter minimization of the squared distance; the parallel case
    is settled by fixing one parameter at an endpoint.
    """
    p0, p1, q0, q1 = (np.asarray(x, dtype=float) for x in (p0, p1, q0, q1))
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    f = np.einsum("...i,...i->...", d2, r)
    c = np.einsum("...i,...i->...", d1, r)
    b = np.einsum("...i,...i->...", d1, d2)
    denom = a * e - b * b
    parallel = denom <= 1e-14 * a * e
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(parallel, 0.0, np.clip((b * f - c * e) / denom, 0.0, 1.0))
        t = (b * s + f) / e
        t_lo = t < 0.0
        t_hi = t > 1.0
        s = np.where(t_lo, np.clip(-c / a, 0.0, 1.0), s)
        s = np.where(t_hi, np.clip((b - c) / a, 0.0, 1.0), s)
        t = np.clip(t, 0.0, 1.0)
    diff = p0 + s[..., None] * d1 - (q0 + t[..., None] * d2)
    dist = np.sqrt(np.einsum("...i,...i->...", diff, diff))
    if return_params:
        return dist, s, t
    return dist


def point_segment_distance(x, a, b):
    x, a, b = (np.asarray(v, dtype=float) for v in (x, a, b))
    d = b - a
    t = np.clip(np.einsum("...i,...i->...", x - a, d) / np.einsum("...i,...i->...", d, d), 0.0, 1.0)
    return np.linalg.norm(x - (a + t[..., None] * d), axis=-1)


def adjacent_pairs(m: int, closed: bool) -> set[tuple[int, int]]:
    pairs = {(i, i + 1) for i in range(m - 1)}
    if closed and m > 2:
        pairs.add((0, m - 1))
    return pairs


def default_embed_tol(curve: PolygonalCurve) -> float:
    return 1e-9 * curve.length


def check_embedded(curve: PolygonalCurve, eps: float | None = None) -> EmbeddingCheck:
    """Exhaustive segment-pair scan.

    Non-adjacent edges must stay ``eps`` apart; adjacent edges may meet only
    at the shared vertex (a fold-back puts an endpoint on the other edge).
    """
    if eps is None:
        eps = default_embed_tol(curve)
    p0, p1 = curve.edge_endpoints()
    m = curve.n_edges
    adj = adjacent_pairs(m, curve.closed)
    worst = EmbeddingCheck(True)
    # adjacent edges
    for i, j in sorted(adj):
        shared_i = p1[i] if j == i + 1 else p0[i]
        far_i = p0[i] if j == i + 1 else p1[i]
        far_j = p1[j] if j == i + 1 else p0[j]
        d = min(float(point_segment_distance(far_i, shared_i, far_j)),
                float(point_segment_distance(far_j, shared_i, far_i)))
        if d < eps:
            return EmbeddingCheck(False, (i, j), d)
    best_d, bi, bj = closest_nonadjacent(np.ascontiguousarray(p0), np.ascontiguousarray(p1), curve.closed, eps)
    if bi < 0:
        return worst
    return EmbeddingCheck(bool(best_d >= eps), (int(bi), int(bj)), float(best_d))


def triangle_segment_hits(tri, q0, q1, tol: float) -> np.ndarray:
    """True where segment [q0,q1] passes within ``tol`` of the filled triangle."""
    tri = np.asarray(tri, dtype=float)
    q0 = np.atleast_2d(np.asarray(q0, dtype=float))
    q1 = np.atleast_2d(np.asarray(q1, dtype=float))
    a, b, c = tri
    n = np.cross(b - a, c - a)
    area2 = np.linalg.norm(n)
    scale = max(np.linalg.norm(b - a), np.linalg.norm(c - a), np.linalg.norm(c - b))
    hits = np.zeros(len(q0), dtype=bool)
    if area2 > 1e-12 * scale * scale:
        n_hat = n / area2
        d0 = (q0 - a) @ n_hat
        d1 = (q1 - a) @ n_hat
        crosses = (d0 * d1 <= 0.0) & (d0 != d1)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(crosses, d0 / (d0 - d1), 0.0)
        x = q0 + lam[:, None] * (q1 - q0)
        hits |= crosses & _inside_triangle(x, a, b, c, n, tol)
        # endpoints hovering over the face
        for d, q in ((d0, q0), (d1, q1)):
            proj = q - d[:, None] * n_hat
            hits |= (np.abs(d) <= tol) & _inside_triangle(proj, a, b, c, n, tol)
    for u, v in ((a, b), (b, c), (c, a)):
        hits |= segment_distances(u, v, q0, q1) <= tol
    return hits


def _inside_triangle(x, a, b, c, n, tol):
    inside = np.ones(len(x), dtype=bool)
    for u, v in ((a, b), (b, c), (c, a)):
        edge = v - u
        side = np.cross(edge, x - u) @ n
        # signed distance to the edge line, allowing tol slack
        inside &= side >= -tol * np.linalg.norm(edge) * np.linalg.norm(n)
    return inside


def touching_segment_hits(apex, far, tri, tol: float) -> bool:
    """Segment [apex, far] sharing vertex ``apex`` with the triangle: does it
    meet the triangle anywhere other than the apex?"""
    apex = np.asarray(apex, dtype=float)
    far = np.asarray(far, dtype=float)
    tri = np.asarray(tri, dtype=float)
    others = [p for p in tri if not np.array_equal(p, apex)]
    if len(others) != 2:
        return False
    b, c = others
    # the part of the segment away from the apex must clear the triangle
    seg = far - apex
    seg_len = np.linalg.norm(seg)
    if seg_len == 0.0:
        return False
    n = np.cross(b - apex, c - apex)
    nn = np.linalg.norm(n)
    if nn > 0 and abs(np.dot(seg, n)) / (seg_len * nn) > 1e-9:
        # leaves the triangle's plane at the apex, so cannot meet it again
        return False
    # coplanar: overlap iff the direction points into the wedge at the apex
    u = (b - apex) / np.linalg.norm(b - apex)
    w = (c - apex) / np.linalg.norm(c - apex)
    d = seg / seg_len
    if nn == 0.0:
        return bool(np.dot(d, u) > 1 - 1e-12 or np.dot(d, w) > 1 - 1e-12)
    cu = np.dot(np.cross(u, d), n)
    cw = np.dot(np.cross(d, w), n)
    return bool(cu >= -1e-12 * nn and cw >= -1e-12 * nn)


def _sweep_clear(p0, p1, tri, skip, tol) -> int | None:
    """Index of the first edge (not in ``skip``) meeting the filled triangle,
    or None.  Edges sharing a triangle corner may touch it only there."""
    m = len(p0)
    rest = np.array([k for k in range(m) if k not in skip], dtype=int)
    if len(rest) == 0:
        return None
    corner = np.zeros(len(rest), dtype=bool)
    for c in tri:
        corner |= np.all(p0[rest] == c, axis=1) | np.all(p1[rest] == c, axis=1)
    free = rest[~corner]
    if len(free):
        hits = triangle_segment_hits(tri, p0[free], p1[free], tol)
        if np.any(hits):
            return int(free[np.argmax(hits)])
    for k in rest[corner]:
        q0, q1 = p0[k], p1[k]
        at0 = any(np.array_equal(q0, c) for c in tri)
        at1 = any(np.array_equal(q1, c) for c in tri)
        if at0 and at1:
            return int(k)
        apex, far = (q0, q1) if at0 else (q1, q0)
        if touching_segment_hits(apex, far, tri, tol):
            return int(k)
    return None


def triangle_move_valid(curve: PolygonalCurve, i: int, v, tol: float | None = None) -> TriangleCheck:
    """Can edge ``i`` be replaced by the two edges through ``v``?

    Valid when no other edge meets the triangle spanned by the edge and v,
    which makes the replacement an isotopy.
    """
    if tol is None:
        tol = default_embed_tol(curve)
    m = curve.n_edges
    if not 0 <= i < m:
        raise IndexError(f"edge index {i} out of range")
    v = np.asarray(v, dtype=float)
    p0, p1 = curve.edge_endpoints()
    a, b = p0[i], p1[i]
    area2 = np.linalg.norm(np.cross(v - a, b - a))
    scale = max(np.linalg.norm(v - a), np.linalg.norm(b - a), np.linalg.norm(v - b))
    if area2 <= 1e-12 * scale * scale:
        # collinear: valid only if the replacement edges stay on the old edge
        t = np.dot(v - a, b - a) / np.dot(b - a, b - a)
        on_edge = 0.0 < t < 1.0
        return TriangleCheck(bool(on_edge), degenerate=True)
    k = _sweep_clear(p0, p1, np.array([a, v, b]), {i}, tol)
    return TriangleCheck(k is None, blocking_edge=k)


def vertex_move_valid(curve: PolygonalCurve, k: int, v, tol: float | None = None) -> TriangleCheck:
    """Can vertex ``k`` slide straight to ``v``?

    The two incident edges sweep the triangles (prev, old, new) and
    (next, old, new); the slide is an isotopy when no other edge meets them.
    """
    if tol is None:
        tol = default_embed_tol(curve)
    n = len(curve.vertices)
    if not curve.closed and (k == 0 or k == n - 1):
        raise ValueError("end vertices of an open curve are fixed")
    v = np.asarray(v, dtype=float)
    old = curve.vertices[k]
    if np.array_equal(v, old):
        return TriangleCheck(True, degenerate=True)
    p0, p1 = curve.edge_endpoints()
    m = curve.n_edges
    e_in, e_out = (k - 1) % m, k % m
    degenerate = False
    for nb in (curve.vertices[(k - 1) % n], curve.vertices[(k + 1) % n]):
        tri = np.array([nb, old, v])
        if np.linalg.norm(v - nb) <= tol:
            return TriangleCheck(False, degenerate=True)
        area2 = np.linalg.norm(np.cross(old - nb, v - nb))
        degenerate |= area2 <= 1e-12 * max(np.linalg.norm(old - nb), np.linalg.norm(v - nb)) ** 2
        hit = _sweep_clear(p0, p1, tri, {e_in, e_out}, tol)
        if hit is not None:
            return TriangleCheck(False, degenerate, hit)
    return TriangleCheck(True, degenerate)


# ---------------------------------------------------------------------------
# curve file format


def write_curve(curve: PolygonalCurve, path, comment: str | None = None) -> None:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    if curve.name:
        lines.append(f"# name: {curve.name}")
    lines.append("closed" if curve.closed else "open")
    for x, y, z in curve.vertices:
        lines.append(f"{x:.17g} {y:.17g} {z:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_curve(text: str, name: str | None = None) -> PolygonalCurve:
    closed = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("name:") and name is None:
                name = line[1:].strip()[5:].strip() or None
            continue
        if closed is None:
            if line not in ("closed", "open"):
                raise ValueError(f"line {lineno}: expected 'closed' or 'open', got {line!r}")
            closed = line == "closed"
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected three coordinates")
        rows.append([float(p) for p in parts])
    if closed is None:
        raise ValueError("missing 'closed'/'open' header")
    return PolygonalCurve(rows, closed=closed, name=name)


def read_curve(path) -> PolygonalCurve:
    return parse_curve(Path(path).read_text())


def polyline_length(points: Iterable) -> float:
    pts = np.asarray(list(points), dtype=float)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def sub_polyline(curve: PolygonalCurve, lo: float, hi: float, name: str | None = None) -> PolygonalCurve:
    """Open curve tracing ``curve`` over parameters [lo, hi].

    On a closed curve ``hi`` may exceed L (or lo be negative) to wrap past
    the start point; the span must stay below L.
    """
    if not hi > lo:
        raise ValueError("need lo < hi")
    L = curve.length
    if curve.closed:
        if hi - lo >= L:
            raise ValueError("sub-arc must be shorter than the curve")
        base = math.floor(lo / L) * L
        params = curve.vertex_params
        inner = np.concatenate([params + base, params + base + L])
    else:
        lo, hi = float(curve.canonical(lo)), float(curve.canonical(hi))
        inner = curve.vertex_params
    inner = inner[(inner > lo) & (inner < hi)]
    pts = curve.points_at(np.concatenate([[lo], inner, [hi]]))
    # drop interior samples that coincide with an end (vertex exactly at lo or hi)
    keep = np.ones(len(pts), bool)
    gap = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep[1:][gap <= 1e-14 * L] = False
    if not keep[-1]:
        keep[-1] = True
        keep[-2] = False
    return PolygonalCurve(pts[keep], closed=False, name=name)
