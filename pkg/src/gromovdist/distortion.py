"""Distortion quotient, distortion, D(s), the distortion shadow, k-drcs and
distortion thickness for polygonal curves."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .geometry import ChordPair, PolygonalCurve, check_embedded

TOL_ARGMAX = 1e-4
SHADOW_WINDOW = 3
DEFAULT_DENSITY = 64.0
_N_GRID = 8
_REL_TOL = 1e-10


class NotEmbeddedError(ValueError):
    """The curve touches itself, so the distortion quotient is unbounded."""


class DRC(NamedTuple):
    pair: ChordPair
    value: float


@dataclass(frozen=True)
class ThicknessQuery:
    b: float

    def __post_init__(self):
        if not self.b > 1.0:
            raise ValueError(f"thickness threshold must exceed 1, got {self.b}")


@dataclass
class Shadow:
    """Samples of D(s), the maximizing partner t, and the upper envelope."""

    s: np.ndarray
    D: np.ndarray
    partner: np.ndarray
    envelope: np.ndarray
    source: np.ndarray  # index of the sample realizing each envelope value

    def __len__(self):
        return len(self.s)


@dataclass
class DistortionReport:
    delta: float
    argmax_pairs: list[ChordPair]
    shadow: Shadow | None = None
    drcs: list[DRC] = field(default_factory=list)
    thickness: float = math.inf
    b: float | None = None
    sample_density: float = DEFAULT_DENSITY

    def to_dict(self) -> dict:
        out = {
            "delta": self.delta,
            "argmax_pairs": [[p.s, p.t] for p in self.argmax_pairs],
            "thickness": self.thickness if math.isfinite(self.thickness) else "inf",
            "b": self.b,
            "sample_density": self.sample_density,
            "shadow": [],
            "drcs": [[d.pair.s, d.pair.t, d.value] for d in self.drcs],
        }
        if self.shadow is not None:
            out["shadow"] = [[float(a), float(v)] for a, v in zip(self.shadow.s, self.shadow.envelope)]
        return out

    def to_json(self, **extra) -> str:
        doc = self.to_dict()
        doc.update(extra)
        return json.dumps(doc, indent=2)

    def write_shadow_csv(self, path) -> None:
        if self.shadow is None:
            raise ValueError("report has no shadow samples")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "value"])
            for a, v in zip(self.shadow.s, self.shadow.envelope):
                w.writerow([repr(float(a)), repr(float(v))])


# ---------------------------------------------------------------------------


def _arrays(curve: PolygonalCurve):
    P = np.ascontiguousarray(curve.vertices[: curve.n_edges])
    E = np.ascontiguousarray(curve.directions)
    return P, E, np.ascontiguousarray(curve.edge_lengths), np.ascontiguousarray(curve.starts)


def _tiny2(curve: PolygonalCurve) -> float:
    return (1e-13 * curve.length) ** 2


def _cumulative_angles(curve: PolygonalCurve) -> np.ndarray:
    m = curve.n_edges
    d = curve.directions
    prev = np.roll(d, 1, axis=0)
    cross = np.linalg.norm(np.cross(prev, d), axis=1)
    ang = np.arctan2(cross, np.einsum("ij,ij->i", prev, d))
    if not curve.closed:
        ang[0] = 0.0
    return np.concatenate([[0.0], np.cumsum(ang)]) if m else np.zeros(1)


def _require_embedded(curve: PolygonalCurve) -> None:
    chk = check_embedded(curve)
    if not chk.ok:
        raise NotEmbeddedError(f"curve is not embedded: edges {chk.pair} at distance {chk.distance:.3g}")


def dq(curve: PolygonalCurve, pair) -> float:
    """Arc distance over chord distance for one pair of parameters."""
    s, t = (float(x) for x in curve.canonical(np.asarray(pair, dtype=float)))
    pts = curve.points_at(np.array([s, t]))
    chord = float(np.linalg.norm(pts[0] - pts[1]))
    if s == t or chord == 0.0:
        raise ValueError(f"distortion quotient undefined for coincident points ({s}, {t})")
    arc = abs(t - s)
    if curve.closed:
        arc = min(arc, curve.length - arc)
    return arc / chord


def dq_values(curve: PolygonalCurve, s, t) -> np.ndarray:
    """Vectorized dq; coincident pairs get the diagonal limit 1."""
    s = curve.canonical(s)
    t = curve.canonical(t)
    chord = np.linalg.norm(curve.points_at(s) - curve.points_at(t), axis=-1)
    arc = np.abs(t - s)
    if curve.closed:
        arc = np.minimum(arc, curve.length - arc)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = arc / chord
    return np.where(chord > 0, out, 1.0)


def cell_maxima(curve: PolygonalCurve, keep_rel: float = TOL_ARGMAX):
    """Per-cell maxima for every edge-pair cell that might reach the top.

    Returns (delta, I, J, values, u, v) for the refined cells.  Cells are
    refined in order of decreasing upper bound and the scan stops once the
    bound drops below ``delta * (1 - keep_rel)``.
    """
    P, E, Lens, S = _arrays(curve)
    L = curve.length
    closed = curve.closed
    lower = K.vertex_pair_max(np.ascontiguousarray(curve.vertices), curve.vertex_params, L, closed)
    cum = _cumulative_angles(curve)
    I, J, UB, _ = K.cell_bounds(P, E, Lens, S, L, closed, cum, lower * (1.0 - keep_rel))
    order = np.lexsort((J, I, -UB))
    I, J, UB = I[order], J[order], UB[order]
    vals, us, vs, done = K.refine_cells(P, E, Lens, S, L, closed, I, J, UB, 1.0, keep_rel,
                                        _tiny2(curve), _N_GRID, _REL_TOL)
    vals, us, vs = vals[:done], us[:done], vs[:done]
    delta = max(1.0, float(vals.max())) if done else 1.0
    return delta, I[:done], J[:done], vals, us, vs


def max_distortion(curve: PolygonalCurve, tol_argmax: float = TOL_ARGMAX, check: bool = True):
    """(delta, argmax pairs) without shadow sampling."""
    if check:
        _require_embedded(curve)
    delta, I, J, vals, us, vs = cell_maxima(curve, tol_argmax)
    keep = vals >= delta * (1.0 - tol_argmax)
    S = curve.starts
    pairs, seen = [], set()
    grid = 1e-9 * curve.length
    for i, j, u, v in zip(I[keep], J[keep], us[keep], vs[keep]):
        p = ChordPair(float(S[i] + u), float(S[j] + v))
        key = (round(p.s / grid), round(p.t / grid))
        if key not in seen:  # a vertex pair is the corner of several cells
            seen.add(key)
            pairs.append(p)
    if not pairs:
        # straight: every pair realizes 1
        pairs = [ChordPair(0.0, curve.length if not curve.closed else curve.length / 2)]
    return delta, pairs


def profile(curve: PolygonalCurve, s) -> tuple[np.ndarray, np.ndarray]:
    """D(s) and a maximizing partner t for each parameter in ``s``."""
    P, E, Lens, S = _arrays(curve)
    svals = np.ascontiguousarray(curve.canonical(np.atleast_1d(np.asarray(s, dtype=float))))
    return K.profile(P, E, Lens, S, curve.length, curve.closed, svals, _tiny2(curve))


def D_of_s(curve: PolygonalCurve, s: float) -> float:
    """max_t dq(s, t); the diagonal contributes its limit 1."""
    D, _ = profile(curve, [s])
    return float(D[0])


def sample_params(curve: PolygonalCurve, density: float) -> np.ndarray:
    if not density > 0:
        raise ValueError("sample density must be positive")
    n = max(16, int(math.ceil(density * curve.length)))
    if curve.closed:
        return np.arange(n) * (curve.length / n)
    return np.linspace(0.0, curve.length, n + 1)


def _window_max(values: np.ndarray, half: int, wrap: bool):
    n = len(values)
    idx = np.arange(n)
    best = values.copy()
    src = idx.copy()
    for off in range(-half, half + 1):
        if off == 0:
            continue
        j = idx + off
        if wrap:
            j %= n
        else:
            j = np.clip(j, 0, n - 1)
        better = values[j] > best
        best = np.where(better, values[j], best)
        src = np.where(better, j, src)
    return best, src


def shadow(curve: PolygonalCurve, density: float = DEFAULT_DENSITY, window: int = SHADOW_WINDOW,
           check: bool = True) -> Shadow:
    """Upper envelope of sampled D(s): running maximum over +-window samples."""
    if check:
        _require_embedded(curve)
    s = sample_params(curve, density)
    D, T = profile(curve, s)
    env, src = _window_max(D, window, curve.closed)
    return Shadow(s, D, T, env, src)


def find_drcs(curve: PolygonalCurve, k: float, tol: float = 1e-6, density: float = DEFAULT_DENSITY,
              sh: Shadow | None = None) -> list[DRC]:
    """Sampled k-distortion-realizing chords.

    The upper-envelope quotient at (s, t) is approximated by the largest dq
    in the sampling window around s; a sample s is reported, paired with the
    partner realizing that window maximum, exactly when shadow(s) >= k - tol.
    """
    if not k > 1.0:
        raise ValueError("k must exceed 1")
    if sh is None:
        sh = shadow(curve, density)
    hit = np.nonzero(sh.envelope >= k - tol)[0]
    return [DRC(ChordPair(float(sh.s[a]), float(sh.partner[sh.source[a]])), float(sh.envelope[a]))
            for a in hit]


def _adjacent_corner_angles(curve: PolygonalCurve) -> np.ndarray:
    d = curve.directions
    if curve.closed:
        a, b = np.roll(d, 1, axis=0), d
    else:
        a, b = d[:-1], d[1:]
    cross = np.linalg.norm(np.cross(a, b), axis=1)
    return np.arctan2(cross, np.einsum("ij,ij->i", a, b))


def thickness(curve: PolygonalCurve, q, check: bool = True) -> float:
    """b-distortion thickness: smallest chord among pairs with dq >= b.

    Returns +inf when no pair qualifies.  A corner whose two-edge maximum
    sec(phi/2) reaches b gives qualifying pairs arbitrarily close together,
    hence 0.
    """
    b = q.b if isinstance(q, ThicknessQuery) else ThicknessQuery(float(q)).b
    if check:
        _require_embedded(curve)
    if curve.n_edges >= 2:
        angles = _adjacent_corner_angles(curve)
        with np.errstate(divide="ignore"):
            corner = 1.0 / np.cos(0.5 * angles)
        if np.any(corner >= b):
            return 0.0
    P, E, Lens, S = _arrays(curve)
    L = curve.length
    closed = curve.closed
    cum = _cumulative_angles(curve)
    I, J, UB, SEG = K.cell_bounds(P, E, Lens, S, L, closed, cum, b)
    nonadj = SEG > 0.0
    I, J, SEG = I[nonadj], J[nonadj], SEG[nonadj]
    order = np.lexsort((J, I, SEG))
    return float(K.thickness_cells(P, E, Lens, S, L, closed, I[order], J[order], SEG[order], b,
                                   _tiny2(curve), _N_GRID, _REL_TOL, np.inf))


def normalize_thickness(curve: PolygonalCurve, b, target: float = 1.0) -> PolygonalCurve:
    """Rescale so the b-thickness equals ``target``; dq is scale invariant."""
    tau = thickness(curve, b)
    if not math.isfinite(tau) or tau <= 0.0:
        raise ValueError(f"cannot normalize: thickness is {tau}")
    return curve.scaled(target / tau)


def distortion(curve: PolygonalCurve, density: float = DEFAULT_DENSITY, b: float | None = None,
               tol_argmax: float = TOL_ARGMAX) -> DistortionReport:
    """Full report: delta, maximizing pairs, sampled shadow, drcs, thickness.

    Without ``b`` the thickness is taken at the curve's own level
    delta * (1 - tol_argmax).
    """
    _require_embedded(curve)
    delta, pairs = max_distortion(curve, tol_argmax, check=False)
    sh = shadow(curve, density, check=False)
    drcs = find_drcs(curve, delta, tol=tol_argmax * delta, sh=sh) if delta > 1.0 else []
    b_used = b if b is not None else delta * (1.0 - tol_argmax)
    tau = thickness(curve, b_used, check=False) if b_used > 1.0 else math.inf
    return DistortionReport(delta, pairs, sh, drcs, tau, b_used if b_used > 1.0 else None, density)


def max_between(curve: PolygonalCurve, iv_a, iv_b) -> tuple[float, ChordPair]:
    """Largest dq over s in [a0, a1] and t in [b0, b1] (parameters in [0, L]).

    Each edge pair meeting the two ranges is maximized over the clipped box.
    """
    (a0, a1), (b0, b1) = (sorted(map(float, iv)) for iv in (iv_a, iv_b))
    P, E, Lens, S = _arrays(curve)
    L = curve.length
    best, pair = 1.0, None
    for i in range(curve.n_edges):
        u0, u1 = max(a0 - S[i], 0.0), min(a1 - S[i], Lens[i])
        if u1 < u0:
            continue
        for j in range(curve.n_edges):
            v0, v1 = max(b0 - S[j], 0.0), min(b1 - S[j], Lens[j])
            if v1 < v0 or i == j:
                continue
            val, u, v = K.cell_max(P, E, S, i, j, u0, u1, v0, v1, L, curve.closed, _tiny2(curve),
                                   _N_GRID, _REL_TOL)
            if val > best:
                best, pair = float(val), ChordPair(float(S[i] + u), float(S[j] + v))
    return best, pair
