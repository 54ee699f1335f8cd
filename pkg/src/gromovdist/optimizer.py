"""Length-decreasing moves, the constraint set U_C, a simulated annealer over
it, and the saturation diagnostic."""
from __future__ import annotations

import configparser
import csv
import math
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple

import numpy as np

from .curvature import Interval, curvature_measure, interval_curvature, total_curvature
from .distortion import (TOL_ARGMAX, NotEmbeddedError, dq_values, max_distortion, shadow,
                         thickness)
from .geometry import (ChordPair, PolygonalCurve, check_embedded, segment_distances, sub_polyline,
                       vertex_move_valid, triangle_move_valid)

MOVES = ("inscribe", "corner", "perturb")


class NoOpMove(ValueError):
    """The requested move would not change the curve."""


class MoveRejected(ValueError):
    """The move would pass the curve through itself."""


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# constraint set


class UCResult(NamedTuple):
    ok: bool
    delta: float
    tau: float
    reason: str = ""

    def __bool__(self):
        return self.ok


def in_UC(curve: PolygonalCurve, C: float, b: float, tau_min: float = 1.0, tol: float = 1e-9) -> UCResult:
    """delta < C and tau_b >= tau_min (relative slack ``tol`` on tau).

    Only closed curves qualify; non-embedded curves fail with a reason.
    """
    if not curve.closed:
        return UCResult(False, math.nan, math.nan, "open curve")
    chk = check_embedded(curve)
    if not chk.ok:
        return UCResult(False, math.inf, 0.0, f"not embedded at edges {chk.pair}")
    delta, _ = max_distortion(curve, check=False)
    tau = thickness(curve, b, check=False)
    if not delta < C:
        return UCResult(False, delta, tau, f"distortion {delta:.6g} >= C={C}")
    if not tau >= tau_min * (1.0 - tol):
        return UCResult(False, delta, tau, f"thickness {tau:.6g} < {tau_min}")
    return UCResult(True, delta, tau)


# ---------------------------------------------------------------------------
# moves


def _with_split_points(curve: PolygonalCurve, iv: Interval):
    """Insert vertices at the interval ends; returns (curve, first, last)
    where first..last (cyclic) are the indices strictly between them."""
    L = curve.length
    if not iv.hi > iv.lo or (curve.closed and iv.width >= L):
        raise ValueError(f"bad interval {iv}")
    verts = curve.vertices
    params = curve.vertex_params
    n = len(verts)
    ends = []
    for s in (iv.lo, iv.hi):
        sc = float(curve.canonical(s))
        hit = np.nonzero(np.isclose(params, sc, rtol=0, atol=1e-12 * L))[0]
        if curve.closed:
            hit = hit if len(hit) else np.nonzero(np.isclose(params, sc - L, rtol=0, atol=1e-12 * L))[0]
        ends.append((sc, int(hit[0]) if len(hit) else None))
    new_verts, new_params = list(verts), list(params[:n])
    for sc, hit in ends:
        if hit is None:
            k = int(np.searchsorted(new_params, sc))
            new_verts.insert(k, curve.points_at(sc))
            new_params.insert(k, sc)
    out = PolygonalCurve(np.array(new_verts), closed=curve.closed, name=curve.name)
    p = out.vertex_params
    lo_idx = int(np.argmin(np.abs(p - float(curve.canonical(iv.lo)))))
    hi_idx = int(np.argmin(np.abs(p - float(curve.canonical(iv.hi)))))
    return out, lo_idx, hi_idx


def _chain(lo_idx: int, hi_idx: int, n: int, closed: bool) -> list[int]:
    if closed:
        span = (hi_idx - lo_idx) % n
        return [(lo_idx + d) % n for d in range(span + 1)]
    return list(range(lo_idx, hi_idx + 1))


def _deviation(pts: np.ndarray, s: np.ndarray) -> float:
    """Largest gap between the polyline pts (params s) and the straight
    segment between its ends, under the proportional correspondence."""
    a, b = pts[0], pts[-1]
    lam = (s - s[0]) / (s[-1] - s[0])
    return float(np.max(np.linalg.norm(pts - (a + lam[:, None] * (b - a)), axis=1)))


def _removal_clear(verts: list, k: int, closed: bool, tol: float) -> bool:
    rest = verts[:k] + verts[k + 1:]
    reduced = PolygonalCurve(np.array(rest), closed=closed)
    return triangle_move_valid(reduced, (k - 1) % len(rest), verts[k], tol).valid


def inscribe_arc(curve: PolygonalCurve, iv, eps_prime: float) -> PolygonalCurve:
    """Replace the arc over ``iv`` by an inscribed polygon within ``eps_prime``.

    Interior vertices are dropped greedily while the proportional
    correspondence keeps every point within eps_prime.  When no vertex can
    go, the sharpest interior corner is cut at distance h along both edges.
    The arc ends stay fixed.  Raises NoOpMove on a straight arc and
    MoveRejected if a vertex removal would sweep through another edge.
    """
    iv = Interval(float(iv[0]), float(iv[1]))
    if not eps_prime > 0:
        raise ValueError("eps_prime must be positive")
    m = curvature_measure(curve)
    if interval_curvature(m, iv) <= 1e-12:
        raise NoOpMove("arc is a single straight segment")
    work, lo_idx, hi_idx = _with_split_points(curve, iv)
    n = len(work.vertices)
    chain = _chain(lo_idx, hi_idx, n, work.closed)
    s = work.vertex_params
    L = work.length
    sc = np.array([s[k] for k in chain], float)
    if work.closed:
        sc = sc[0] + np.mod(sc - sc[0], L)
    pts = work.vertices[chain]
    keep = [0]
    a = 0
    while a < len(chain) - 1:
        c = a + 1
        while c + 1 < len(chain) and _deviation(pts[a:c + 2], sc[a:c + 2]) < eps_prime:
            c += 1
        keep.append(c)
        a = c
    drop = [chain[q] for q in range(len(chain)) if q not in keep]
    before = curve.length
    tol = 1e-9 * L
    if drop:
        verts = [np.array(x) for x in work.vertices]
        for q in sorted(drop, key=lambda k: [chain.index(k)]):
            idx = next(i for i, x in enumerate(verts) if np.array_equal(x, work.vertices[q]))
            if not _removal_clear(verts, idx, work.closed, tol):
                raise MoveRejected(f"removing vertex {q} would cross another strand")
            verts.pop(idx)
        out = PolygonalCurve(np.array(verts), closed=curve.closed, name=curve.name)
        if out.length < before * (1 - 1e-14):
            return out
    return _cut_sharpest(work, chain[1:-1], eps_prime, before)


def _cut_sharpest(work: PolygonalCurve, inner: list[int], eps_prime: float, before: float) -> PolygonalCurve:
    if not inner:
        raise NoOpMove("no interior vertex to cut")
    angles = [work.exterior_angle_at(k) for k in inner]
    k = inner[int(np.argmax(angles))]
    phi = max(angles)
    if phi <= 1e-12:
        raise NoOpMove("arc is straight")
    n = len(work.vertices)
    v = work.vertices[k]
    prev, nxt = work.vertices[(k - 1) % n], work.vertices[(k + 1) % n]
    h = min(0.5 * eps_prime / math.sin(0.5 * phi),
            0.45 * np.linalg.norm(v - prev), 0.45 * np.linalg.norm(nxt - v))
    p = v + h * (prev - v) / np.linalg.norm(prev - v)
    q = v + h * (nxt - v) / np.linalg.norm(nxt - v)
    # sweeping the corner off: triangle (p, v, q) must be clear
    verts = list(work.vertices)
    verts[k:k + 1] = [p, v, q]
    staged = PolygonalCurve(np.array(verts), closed=work.closed)
    if not _removal_clear([np.array(x) for x in staged.vertices], k + 1, work.closed, 1e-9 * work.length):
        raise MoveRejected("corner cut would cross another strand")
    del verts[k + 1]
    out = PolygonalCurve(np.array(verts), closed=work.closed, name=work.name)
    if not out.length < before:
        raise NoOpMove("cut did not shorten the curve")
    return out


def shorten_corner(curve: PolygonalCurve, k: int, eps_cut: float, toward: int = 1) -> PolygonalCurve:
    """Slide corner vertex k a fraction ``eps_cut`` of the way along one of
    its edges (``toward`` = +1 for the outgoing edge, -1 for the incoming).

    The other edge then reaches the new point directly, so the polygon gets
    shorter and the corner's exterior angle drops.
    """
    n = len(curve.vertices)
    if not curve.closed and (k <= 0 or k >= n - 1):
        raise ValueError("corner must be an interior vertex")
    if not 0.0 <= eps_cut < 1.0:
        raise ValueError("eps_cut must lie in [0, 1); 1 collapses the corner onto its neighbour")
    phi = curve.exterior_angle_at(k)
    if phi <= 1e-12:
        raise NoOpMove("vertex is not a corner")
    if eps_cut == 0.0:
        return curve
    v = curve.vertices[k]
    far = curve.vertices[(k + toward) % n]
    new = v + eps_cut * (far - v)
    chk = vertex_move_valid(curve, k, new)
    if not chk.valid:
        raise MoveRejected(f"corner slide blocked by edge {chk.blocking_edge}")
    verts = curve.vertices.copy()
    verts[k] = new
    return curve.with_vertices(verts)


def perturb_vertex(curve: PolygonalCurve, k: int, step) -> PolygonalCurve:
    """Move vertex k by ``step`` if the slide is an isotopy."""
    verts = curve.vertices.copy()
    new = verts[k] + np.asarray(step, float)
    chk = vertex_move_valid(curve, k, new)
    if not chk.valid:
        raise MoveRejected(f"vertex slide blocked by edge {chk.blocking_edge}")
    verts[k] = new
    return curve.with_vertices(verts)


# ---------------------------------------------------------------------------
# certificate for the inscribed-arc move


class Certificate(NamedTuple):
    ok: bool
    length_decreased: bool
    max_increase_inside: float
    max_increase_outside: float
    offending: ChordPair | None = None


def correspondence(before: PolygonalCurve, after: PolygonalCurve) -> np.ndarray:
    """Parameter on ``before`` of every vertex of ``after`` (unwrapped so
    the sequence increases).  Each vertex must lie on ``before``."""
    p0, p1 = before.edge_endpoints()
    out = np.empty(len(after.vertices))
    seg = p1 - p0
    for a, x in enumerate(after.vertices):
        t = np.clip(np.einsum("ij,ij->i", x - p0, seg) / np.einsum("ij,ij->i", seg, seg), 0.0, 1.0)
        d = np.linalg.norm(p0 + t[:, None] * seg - x, axis=1)
        e = int(np.argmin(d))
        if d[e] > 1e-9 * before.length:
            raise ValueError(f"vertex {a} of the new curve is off the old one")
        out[a] = before.starts[e] + t[e] * before.edge_lengths[e]
    if before.closed:
        out = out[0] + np.mod(out - out[0], before.length)
    return out


def _map_params(sa: np.ndarray, knots_after: np.ndarray, knots_before: np.ndarray, closed: bool,
                La: float, Lb: float) -> np.ndarray:
    if closed:
        ka = np.append(knots_after, La)
        kb = np.append(knots_before, knots_before[0] + Lb)
        return np.mod(np.interp(np.mod(sa, La), ka, kb), Lb)
    return np.interp(sa, knots_after, knots_before)


def prop1_certificate(before: PolygonalCurve, after: PolygonalCurve, iv, eps: float,
                      samples: int = 400, tol: float = 1e-10) -> Certificate:
    """Check a replacement of the arc over ``iv``: the curve got shorter, no
    sampled pair involving the arc gained eps or more in dq, and no other
    sampled pair gained at all (beyond a relative ``tol``)."""
    iv = Interval(float(iv[0]), float(iv[1]))
    knots_b = correspondence(before, after)
    knots_a = after.vertex_params
    sa = np.unique(np.concatenate([np.linspace(0.0, after.length, samples, endpoint=not after.closed), knots_a]))
    sb = _map_params(sa, knots_a, knots_b, after.closed, after.length, before.length)
    if before.closed:
        rel = np.mod(sb - iv.lo, before.length)
        inside = rel < iv.width
    else:
        inside = (sb > iv.lo) & (sb < iv.hi)
    S, T = np.meshgrid(np.arange(len(sa)), np.arange(len(sa)), indexing="ij")
    upper = S < T
    S, T = S[upper], T[upper]
    da = dq_values(after, sa[S], sa[T])
    db = dq_values(before, sb[S], sb[T])
    gain = da - db
    near = inside[S] | inside[T]
    gin = float(gain[near].max()) if np.any(near) else 0.0
    gout = float(gain[~near].max()) if np.any(~near) else 0.0
    shorter = after.length < before.length or (after == before)
    ok_in = gin < eps
    ok_out = gout <= tol * max(1.0, float(np.max(db)))
    bad = None
    if not (ok_in and ok_out):
        cand = np.where(near, gain - eps, gain)
        w = int(np.argmax(cand))
        bad = ChordPair(float(sb[S[w]]), float(sb[T[w]]))
    return Certificate(bool(shorter and ok_in and ok_out), bool(shorter), gin, gout, bad)


def prop1_epsilon_prime(curve: PolygonalCurve, iv, window, eps: float, delta: float | None = None) -> float:
    """An eps_prime that keeps every dq gain from inscribing over ``iv`` below eps.

    ``window`` is an arc containing ``iv`` whose total curvature kappa
    satisfies sec(kappa/2) <= 1 + eps/2; pairs inside it stay below that
    value before and after.  A pair with one point on the arc and the
    other outside the window has chord at least c, the gap between the two
    pieces, and its dq can rise by at most delta*2e'/(c - 2e'), which stays
    under eps when 2e'(delta + eps) < eps*c.
    """
    iv = Interval(float(iv[0]), float(iv[1]))
    window = Interval(float(window[0]), float(window[1]))
    kappa = interval_curvature(curvature_measure(curve), window, closed_ends=True)
    if kappa >= math.pi or 1.0 / math.cos(0.5 * kappa) > 1.0 + 0.5 * eps:
        raise ValueError("window carries too much curvature for this eps")
    if delta is None:
        delta, _ = max_distortion(curve)
    arc = sub_polyline(curve, iv.lo, iv.hi)
    L = curve.length
    if curve.closed:
        if window.width >= L:
            return math.inf
        rest = sub_polyline(curve, window.hi, window.lo + L)
    else:
        pieces = [(0.0, window.lo), (window.hi, L)]
        pieces = [p for p in pieces if p[1] - p[0] > 1e-12 * L]
        if not pieces:
            return math.inf
        rest = None
    a0, a1 = arc.edge_endpoints()
    gaps = []
    for piece in ([rest] if curve.closed else [sub_polyline(curve, lo, hi) for lo, hi in pieces]):
        b0, b1 = piece.edge_endpoints()
        A0 = np.repeat(a0, len(b0), axis=0)
        A1 = np.repeat(a1, len(b0), axis=0)
        B0 = np.tile(b0, (len(a0), 1))
        B1 = np.tile(b1, (len(a0), 1))
        gaps.append(float(segment_distances(A0, A1, B0, B1).min()))
    c = min(gaps)
    return 0.99 * eps * c / (2.0 * (delta + eps))


# ---------------------------------------------------------------------------
# annealing


@dataclass
class AnnealConfig:
    objective: str = "length"
    C: float = 2.0
    b: float = 1.5
    tau_min: float = 1.0
    seed: int = 0
    t0: float = 0.05
    cooling: float = 0.999
    steps: int = 1000
    weight_inscribe: float = 1.0
    weight_corner: float = 1.0
    weight_perturb: float = 2.0
    perturb_scale: float = 0.05  # relative to the mean edge length
    corner_cut: float = 0.2
    inscribe_eps: float = 0.05  # relative to the mean edge length
    inscribe_span: int = 3
    min_vertices: int = 8
    eps_prop: float | None = None  # dq-gain budget for inscribe moves; None: (C - delta) / 2
    tol_constraint: float = 1e-9

    def __post_init__(self):
        self.validate()

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.weight_inscribe, self.weight_corner, self.weight_perturb], float)

    def validate(self):
        if self.objective not in ("length", "distortion"):
            raise ConfigError(f"objective must be 'length' or 'distortion', got {self.objective!r}")
        if not self.C > 1:
            raise ConfigError("C must exceed 1")
        if not self.b > 1:
            raise ConfigError("b must exceed 1")
        if not self.tau_min > 0:
            raise ConfigError("tau_min must be positive")
        if not 0 < self.cooling < 1:
            raise ConfigError("cooling factor must lie in (0, 1)")
        if self.t0 <= 0 or self.steps < 0:
            raise ConfigError("need t0 > 0 and steps >= 0")
        w = self.weights
        if np.any(w < 0) or not w.sum() > 0:
            raise ConfigError("move weights must be non-negative with a positive sum")
        if self.eps_prop is not None and not self.eps_prop > 0:
            raise ConfigError("eps_prop must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_mapping(cls, values: dict) -> AnnealConfig:
        known = {f.name.lower(): f for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            name = key.strip().lower().replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            key = known[name].name
            typ = known[name].type
            try:
                if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
                    kw[key] = None
                elif "int" in str(typ):
                    kw[key] = int(raw)
                elif "float" in str(typ):
                    kw[key] = float(raw)
                else:
                    kw[key] = str(raw).strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> AnnealConfig:
        """Read ``key = value`` lines, optionally under an [anneal] section."""
        text = open(path).read()
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text if text.lstrip().startswith("[") else "[anneal]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        section = "anneal" if parser.has_section("anneal") else parser.sections()[0]
        return cls.from_mapping(dict(parser.items(section)))

    def to_dict(self) -> dict:
        return asdict(self)


CERT_SAMPLES = 96  # per-step certificate resolution for inscribe moves
TRACE_COLUMNS = ("step", "temp", "length", "delta", "tau", "move", "accepted", "feasible")


@dataclass
class AnnealTrace:
    records: list = field(default_factory=list)

    def append(self, **rec):
        self.records.append(tuple(rec[c] for c in TRACE_COLUMNS))

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        i = TRACE_COLUMNS.index(name)
        return np.array([r[i] for r in self.records])

    @property
    def accepted_count(self) -> int:
        return int(sum(1 for r in self.records if r[6]))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_COLUMNS)
            for r in self.records:
                w.writerow([r[0], repr(r[1]), repr(r[2]), repr(r[3]), repr(r[4]), r[5], int(r[6]), int(r[7])])


class _State(NamedTuple):
    curve: PolygonalCurve
    delta: float
    tau: float

    def objective(self, kind: str) -> float:
        return self.curve.length if kind == "length" else self.delta


def _evaluate(curve: PolygonalCurve, cfg: AnnealConfig) -> _State | None:
    """Normalize to tau_b = tau_min and test U_C; None if infeasible."""
    if not check_embedded(curve).ok:
        return None
    tau = thickness(curve, cfg.b, check=False)
    if not (math.isfinite(tau) and tau > 0):
        return None
    curve = curve.scaled(cfg.tau_min / tau)
    delta, _ = max_distortion(curve, check=False)
    if not delta < cfg.C:
        return None
    tau = thickness(curve, cfg.b, check=False)
    if not tau >= cfg.tau_min * (1 - cfg.tol_constraint):
        return None
    return _State(curve, delta, tau)


def _propose(state: _State, kind: str, rng: np.random.Generator, cfg: AnnealConfig):
    """Candidate curve plus the replaced interval (inscribe moves only)."""
    curve = state.curve
    n = len(curve.vertices)
    mean_edge = curve.length / curve.n_edges
    if kind == "inscribe":
        k = int(rng.integers(n))
        span = int(rng.integers(2, cfg.inscribe_span + 1))
        s = curve.vertex_params
        lo = s[(k - 1) % n] if k > 0 else s[n - 1] - curve.length
        hi = s[(k + span - 1) % n] + (curve.length if k + span - 1 >= n else 0.0)
        eps_p = cfg.inscribe_eps * mean_edge
        if n <= cfg.min_vertices:
            # keep the vertex count from collapsing: only corner cuts here
            work, lo_idx, hi_idx = _with_split_points(curve, Interval(lo, hi))
            chain = _chain(lo_idx, hi_idx, len(work.vertices), True)
            return _cut_sharpest(work, chain[1:-1], eps_p, curve.length), Interval(lo, hi)
        return inscribe_arc(curve, Interval(lo, hi), eps_p), Interval(lo, hi)
    if kind == "corner":
        k = int(rng.integers(n))
        cut = float(rng.uniform(0.0, cfg.corner_cut))
        toward = 1 if rng.random() < 0.5 else -1
        return shorten_corner(curve, k, cut, toward), None
    k = int(rng.integers(n))
    step = rng.normal(0.0, cfg.perturb_scale * mean_edge, size=3)
    return perturb_vertex(curve, k, step), None


def anneal(seed_curve: PolygonalCurve, cfg: AnnealConfig, progress=None):
    """Metropolis search over U_C.  Returns (best curve, trace).

    Every proposal is built from isotopy moves, then rescaled so tau_b =
    tau_min, and rejected outright if it leaves U_C.  Only the objective
    enters the acceptance test.  Deterministic for a fixed config.
    """
    if not seed_curve.closed:
        raise ConfigError("annealing works on closed curves")
    state = _evaluate(seed_curve, cfg)
    if state is None:
        raise ConfigError("seed curve is not in U_C after thickness normalization")
    rng = np.random.default_rng(cfg.seed)
    w = cfg.weights / cfg.weights.sum()
    best = state
    trace = AnnealTrace()
    temp = cfg.t0
    cur_obj = state.objective(cfg.objective)
    for step in range(cfg.steps):
        kind = MOVES[int(rng.choice(len(MOVES), p=w))]
        try:
            cand, iv = _propose(state, kind, rng, cfg)
            if iv is not None:
                budget = cfg.eps_prop if cfg.eps_prop is not None else 0.5 * (cfg.C - state.delta)
                if not prop1_certificate(state.curve, cand, iv, budget, samples=CERT_SAMPLES).ok:
                    raise MoveRejected("replacement arc raises dq beyond the budget")
            new = _evaluate(cand, cfg)
        except (NoOpMove, MoveRejected, NotEmbeddedError, ValueError):
            new = None
        accepted = False
        if new is not None:
            diff = new.objective(cfg.objective) - cur_obj
            u = rng.random()
            if diff <= 0 or u < math.exp(-diff / temp):
                state, cur_obj, accepted = new, new.objective(cfg.objective), True
                if cur_obj < best.objective(cfg.objective):
                    best = state
        shown = new if new is not None else state
        trace.append(step=step, temp=temp, length=shown.curve.length, delta=shown.delta, tau=shown.tau,
                     move=kind, accepted=accepted, feasible=new is not None)
        temp *= cfg.cooling
        if progress is not None:
            progress(step, state)
    return best.curve, trace


# ---------------------------------------------------------------------------
# saturation diagnostic


class WindowStatus(NamedTuple):
    lo: float
    hi: float
    curvature: float
    peak_shadow: float
    straight: bool
    saturated: bool


class SaturationReport(NamedTuple):
    fraction: float
    delta: float
    threshold: float
    windows: list

    def to_dict(self) -> dict:
        return {"fraction": self.fraction, "delta": self.delta, "threshold": self.threshold,
                "windows": [w._asdict() for w in self.windows]}


def saturation_report(curve: PolygonalCurve, kappa_min: float = 1e-6, eta: float = 1e-2,
                      window: float | None = None, density: float | None = None) -> SaturationReport:
    """Fraction of parameter windows that are straight or touch a
    near-maximal chord: a window counts when its curvature is below
    ``kappa_min`` or some sample in it has shadow >= delta - eta."""
    L = curve.length
    if window is None:
        window = L / 64
    if not 0 < window <= L:
        raise ValueError("window must lie in (0, L]")
    nwin = max(1, int(round(L / window)))
    width = L / nwin
    if density is None:
        density = max(64.0 / L, 8.0 / width)
    delta, _ = max_distortion(curve)
    sh = shadow(curve, density, check=False)
    m = curvature_measure(curve)
    thr = delta - eta
    out = []
    for w in range(nwin):
        lo, hi = w * width, (w + 1) * width
        kap = interval_curvature(m, Interval(lo, hi))
        sel = (sh.s >= lo) & (sh.s < hi)
        peak = float(sh.envelope[sel].max()) if np.any(sel) else float(sh.envelope[np.argmin(np.abs(sh.s - lo))])
        straight = kap < kappa_min
        out.append(WindowStatus(lo, hi, kap, peak, bool(straight), bool(straight or peak >= thr)))
    frac = sum(w.saturated for w in out) / len(out)
    return SaturationReport(frac, delta, thr, out)
