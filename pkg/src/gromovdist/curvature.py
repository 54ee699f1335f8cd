"""Total curvature, the curvature measure of a polygon, the sec(kappa/2)
distortion bound, atom decomposition, and subdivision scales of atomless
measures."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .geometry import PolygonalCurve, sub_polyline

TWO_THIRDS = 2.0 / 3.0


class Interval(NamedTuple):
    """Open parameter interval (lo, hi). On closed curves hi may exceed L to wrap."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _check_interval(iv: Interval, period: float | None, domain: tuple[float, float]):
    if not iv.hi > iv.lo:
        raise ValueError(f"empty interval {iv}")
    if period is None:
        lo, hi = domain
        tol = 1e-12 * max(1.0, abs(hi - lo))
        if iv.lo < lo - tol or iv.hi > hi + tol:
            raise ValueError(f"interval {iv} outside parameter range {domain}")
    elif iv.width > period:
        raise ValueError(f"interval {iv} longer than the period {period}")


@dataclass
class CurvatureMeasure:
    """Atoms (position, mass) plus piecewise-constant density (lo, hi, rate).

    ``period`` is the curve length for closed curves (positions taken mod
    period) and None for measures on a line segment ``domain``.
    """

    atoms: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    density: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    domain: tuple[float, float] = (0.0, 1.0)
    period: float | None = None

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms, dtype=float).reshape(-1, 2)
        self.density = np.asarray(self.density, dtype=float).reshape(-1, 3)
        if np.any(self.atoms[:, 1] < 0) or np.any(self.density[:, 2] < 0):
            raise ValueError("measure masses must be non-negative")
        if np.any(self.atoms[:, 1] >= math.pi):
            raise ValueError("atom masses must be below pi (a corner's exterior angle)")
        if len(self.atoms) > 1 and np.any(np.diff(self.atoms[:, 0]) <= 0):
            raise ValueError("atom positions must be strictly increasing")
        if np.any(self.density[:, 1] <= self.density[:, 0]):
            raise ValueError("density pieces need lo < hi")

    @property
    def atom_mass(self) -> float:
        return math.fsum(self.atoms[:, 1])

    @property
    def density_mass(self) -> float:
        d = self.density
        return math.fsum((d[:, 1] - d[:, 0]) * d[:, 2])

    @property
    def total(self) -> float:
        d = self.density
        return math.fsum(np.concatenate([self.atoms[:, 1], (d[:, 1] - d[:, 0]) * d[:, 2]]))

    @property
    def has_atoms(self) -> bool:
        return bool(np.any(self.atoms[:, 1] > 0))

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "density": self.density.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict, domain=(0.0, 1.0), period=None) -> CurvatureMeasure:
        return cls(np.array(doc.get("atoms", []), float), np.array(doc.get("density", []), float),
                   tuple(domain), period)


def exterior_angles(curve: PolygonalCurve) -> list[tuple[int, float]]:
    """(vertex index, turning angle in [0, pi)) at every interior vertex;
    every vertex of a closed curve."""
    n = len(curve.vertices)
    idx = range(n) if curve.closed else range(1, n - 1)
    return [(k, curve.exterior_angle_at(k)) for k in idx]


def total_curvature(curve: PolygonalCurve) -> float:
    return math.fsum(a for _, a in exterior_angles(curve))


def curvature_measure(curve: PolygonalCurve) -> CurvatureMeasure:
    """Atoms at the vertices with their exterior angles; no density."""
    params = curve.vertex_params
    atoms = [(params[k], a) for k, a in exterior_angles(curve) if a > 0.0]
    return CurvatureMeasure(np.array(atoms, float).reshape(-1, 2), np.zeros((0, 3)),
                            (0.0, curve.length), curve.length if curve.closed else None)


def _shifts(lo: float, hi: float, period: float | None):
    if period is None:
        return [0.0]
    k0 = math.floor(lo / period) - 1
    k1 = math.floor(hi / period) + 1
    return [k * period for k in range(k0, k1 + 1)]


def interval_curvature(m: CurvatureMeasure, iv: Interval, closed_ends: bool = False) -> float:
    """Measure of the open interval (lo, hi); ``closed_ends`` counts endpoint atoms."""
    iv = Interval(float(iv[0]), float(iv[1]))
    _check_interval(iv, m.period, m.domain)
    pos, mass = m.atoms[:, 0], m.atoms[:, 1]
    parts = []
    for sh in _shifts(iv.lo, iv.hi, m.period):
        p = pos + sh
        sel = (p >= iv.lo) & (p <= iv.hi) if closed_ends else (p > iv.lo) & (p < iv.hi)
        parts.extend(mass[sel])
        for lo, hi, rate in m.density:
            ov = min(hi + sh, iv.hi) - max(lo + sh, iv.lo)
            if ov > 0:
                parts.append(ov * rate)
    return math.fsum(parts)


class DSBound(NamedTuple):
    bound: float
    max_dq: float
    ok: bool | None  # None when the arc carries more than pi of curvature
    kappa: float


def _unpruned(m: int) -> np.ndarray:
    # angle prefix sums that never let the curvature bound fire
    return np.arange(m + 1, dtype=float) * 4.0


def arc_max_dq(arc: PolygonalCurve) -> float:
    """Exact maximum of dq over all pairs of an open polyline, with no
    curvature-based pruning (so it can test the curvature bound)."""
    if arc.closed:
        raise ValueError("expects an open arc")
    P = np.ascontiguousarray(arc.vertices[:-1])
    E = np.ascontiguousarray(arc.directions)
    Lens = np.ascontiguousarray(arc.edge_lengths)
    S = np.ascontiguousarray(arc.starts)
    L = arc.length
    I, J, UB, _ = K.cell_bounds(P, E, Lens, S, L, False, _unpruned(arc.n_edges), 1.0)
    order = np.lexsort((J, I, -UB))
    vals, _, _, done = K.refine_cells(P, E, Lens, S, L, False, I[order], J[order], UB[order], 1.0, 0.0,
                                      (1e-13 * L) ** 2, 8, 1e-12)
    return max(1.0, float(vals[:done].max())) if done else 1.0


def ds_bound_check(curve: PolygonalCurve, iv: Interval, tol: float = 1e-9) -> DSBound:
    """Compare sup dq over pairs inside the arc with sec(kappa/2).

    kappa includes atoms at the interval ends.  Arc distance is measured
    along the sub-arc itself.  ``tol`` is relative to the bound.
    """
    iv = Interval(float(iv[0]), float(iv[1]))
    m = curvature_measure(curve)
    kappa = interval_curvature(m, iv, closed_ends=True)
    arc = sub_polyline(curve, iv.lo, iv.hi)
    top = arc_max_dq(arc)
    if kappa > math.pi:
        return DSBound(math.inf, top, None, kappa)
    bound = 1.0 / math.cos(0.5 * kappa) if kappa < math.pi else math.inf
    return DSBound(bound, top, bool(top <= bound * (1.0 + tol)), kappa)


def decompose(m: CurvatureMeasure, top: int) -> tuple[CurvatureMeasure, CurvatureMeasure]:
    """Split the ``top`` heaviest atoms (ties: lower position first) from the rest."""
    if top < 0:
        raise ValueError("top must be non-negative")
    order = np.lexsort((m.atoms[:, 0], -m.atoms[:, 1]))
    chosen = np.sort(order[:top])
    mask = np.zeros(len(m.atoms), bool)
    mask[chosen] = True
    major = CurvatureMeasure(m.atoms[mask], np.zeros((0, 3)), m.domain, m.period)
    rest = CurvatureMeasure(m.atoms[~mask], m.density.copy(), m.domain, m.period)
    return major, rest


def _cumulative(density: np.ndarray, a: float, b: float):
    """Breakpoints and cumulative mass of a piecewise-constant density on [a, b]."""
    pts = [a, b]
    for lo, hi, _ in density:
        pts.extend([min(max(lo, a), b), min(max(hi, a), b)])
    x = np.unique(np.array(pts))
    mid = 0.5 * (x[:-1] + x[1:])
    rate = np.zeros(len(mid))
    for lo, hi, r in density:
        rate += np.where((mid > lo) & (mid < hi), r, 0.0)
    F = np.concatenate([[0.0], np.cumsum(rate * np.diff(x))])
    return x, F


def max_window_mass(x: np.ndarray, F: np.ndarray, width: float) -> float:
    """Largest mass of a window of the given width inside [x[0], x[-1]].

    The window mass is piecewise linear in its left end, so its maximum sits
    where one of the two ends meets a breakpoint.
    """
    a, b = x[0], x[-1]
    if width >= b - a:
        return float(F[-1])
    starts = np.concatenate([x, x - width])
    starts = starts[(starts >= a) & (starts <= b - width)]
    mass = np.interp(starts + width, x, F) - np.interp(starts, x, F)
    return float(mass.max())


def subdivision_scale(m: CurvatureMeasure, iv: Interval | None = None, require_atomless: bool = True,
                      fraction: float = TWO_THIRDS, rtol: float = 1e-9) -> float:
    """Supremum of W such that every subinterval shorter than W carries at
    most ``fraction`` of the mass of (a, b)."""
    a, b = (m.domain if iv is None else (float(iv[0]), float(iv[1])))
    if not b > a:
        raise ValueError("empty interval")
    inside = m.atoms[(m.atoms[:, 0] > a) & (m.atoms[:, 0] < b) & (m.atoms[:, 1] > 0)]
    if require_atomless and len(inside):
        raise ValueError(f"measure has {len(inside)} atom(s) inside ({a}, {b}); an atomless measure is required")
    x, F = _cumulative(m.density, a, b)
    total = F[-1]
    if total <= 0:
        return b - a
    cap = fraction * total
    # the mass of windows of width < W is sup over w < W, i.e. M(W) by continuity
    lo, hi = 0.0, b - a
    if max_window_mass(x, F, hi) <= cap:
        return hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if max_window_mass(x, F, mid) <= cap * (1 + 1e-15):
            lo = mid
        else:
            hi = mid
    return lo


def random_arc(rng: np.random.Generator, n_edges: int, max_curvature: float = math.pi) -> PolygonalCurve:
    """Open space polygon whose turning angles add up to at most ``max_curvature``."""
    if n_edges < 1:
        raise ValueError("need at least one edge")
    total = rng.uniform(0.0, max_curvature) * (1.0 - 1e-9)
    turns = rng.dirichlet(np.ones(max(n_edges - 1, 1)))[: n_edges - 1] * total
    lengths = rng.uniform(0.2, 1.0, n_edges)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    pts = [np.zeros(3), lengths[0] * d]
    for k in range(n_edges - 1):
        axis = np.cross(d, rng.normal(size=3))
        axis /= np.linalg.norm(axis)
        a = turns[k]
        # rotate d by angle a about an axis perpendicular to it
        d = math.cos(a) * d + math.sin(a) * np.cross(axis, d)
        d /= np.linalg.norm(d)
        pts.append(pts[-1] + lengths[k + 1] * d)
    return PolygonalCurve(np.array(pts), closed=False, name="random_arc")


def random_measure(rng: np.random.Generator, pieces: int | None = None, atoms: int = 0) -> CurvatureMeasure:
    """Piecewise-constant density on (0, 1) with uneven rates, plus optional atoms."""
    if pieces is None:
        pieces = int(rng.integers(1, 12))
    cuts = np.sort(rng.uniform(0.0, 1.0, pieces - 1))
    x = np.concatenate([[0.0], cuts, [1.0]])
    rates = rng.exponential(1.0, pieces) * (rng.random(pieces) < 0.8)
    rates[rng.integers(pieces)] += rng.exponential(5.0)
    dens = np.column_stack([x[:-1], x[1:], rates])
    dens = dens[dens[:, 1] > dens[:, 0]]
    at = np.column_stack([np.sort(rng.uniform(0.05, 0.95, atoms)), rng.uniform(0.1, 1.0, atoms)])
    return CurvatureMeasure(at, dens, (0.0, 1.0), None)
