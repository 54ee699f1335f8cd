from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from gromovdist.curvature import Interval, total_curvature
from gromovdist.distortion import max_distortion, normalize_thickness
from gromovdist.generators import make_comet, make_ngon, make_torus_knot
from gromovdist.geometry import PolygonalCurve, check_embedded
from gromovdist.optimizer import (TRACE_COLUMNS, AnnealConfig, ConfigError, MoveRejected, NoOpMove, anneal,
                                  correspondence, in_UC, inscribe_arc, perturb_vertex, prop1_certificate,
                                  prop1_epsilon_prime, saturation_report, shorten_corner)

from oracles import grid_max_dq

B_CIRCLE = math.pi / 2 - 1e-3


def semicircle(n_edges=64, radius=1.0):
    a = np.linspace(0, math.pi, n_edges + 1)
    return PolygonalCurve(np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros_like(a)]), closed=False)


def corner(phi, arm=1.0):
    theta = 0.5 * (math.pi - phi)
    return PolygonalCurve([[-arm * math.sin(theta), arm * math.cos(theta), 0], [0, 0, 0],
                           [arm * math.sin(theta), arm * math.cos(theta), 0]], closed=False)


def distance_to_polyline(x, curve):
    p0, p1 = curve.edge_endpoints()
    seg = p1 - p0
    t = np.clip(np.einsum("ij,ij->i", x - p0, seg) / np.einsum("ij,ij->i", seg, seg), 0, 1)
    return float(np.min(np.linalg.norm(p0 + t[:, None] * seg - x, axis=1)))


# ---------------------------------------------------------------- U_C

def test_in_UC_examples():
    circ = normalize_thickness(make_ngon(1024), B_CIRCLE)
    res = in_UC(circ, 2.0, B_CIRCLE)
    assert res.ok and res.tau == pytest.approx(1.0, rel=1e-12) and res.delta < 2
    assert not in_UC(circ, 1.5, B_CIRCLE)
    straight = PolygonalCurve([[0, 0, 0], [3, 0, 0]], closed=False)
    res = in_UC(straight, 2.0, 2.0)
    assert not res.ok and "open" in res.reason


def test_in_UC_non_embedded_reports_reason():
    eight = PolygonalCurve([[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]])
    res = in_UC(eight, 10.0, 1.2)
    assert not res.ok and "embedded" in res.reason


def test_in_UC_thin_curve_fails_thickness():
    circ = normalize_thickness(make_ngon(256), 1.5, target=0.5)
    res = in_UC(circ, 2.0, 1.5)
    assert not res.ok and "thickness" in res.reason


# ---------------------------------------------------------------- inscribe_arc

def test_inscribe_semicircle():
    arc = semicircle(64)
    out = inscribe_arc(arc, Interval(0, arc.length), 0.1)
    assert out.length < arc.length
    assert len(out.vertices) < len(arc.vertices)
    assert total_curvature(out) <= total_curvature(arc) + 1e-12
    assert np.array_equal(out.vertices[0], arc.vertices[0]) and np.array_equal(out.vertices[-1], arc.vertices[-1])
    # every removed vertex stays within 0.1 of the replacement; new vertices lie on the old arc
    assert max(distance_to_polyline(v, out) for v in arc.vertices) < 0.1
    assert max(distance_to_polyline(v, arc) for v in out.vertices) < 1e-12


def test_inscribe_straight_is_noop():
    line = PolygonalCurve([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], closed=False)
    with pytest.raises(NoOpMove):
        inscribe_arc(line, Interval(0.5, 2.5), 0.1)


def test_inscribe_blocked_by_strand():
    # the edge E-F pierces the triangle spanned by the corner at B
    V = [[0, 0, 0], [1, 1, 0], [2, 0, 0], [2, -1, 0], [1, 0.5, -1], [1, 0.5, 1], [0, -1, 1]]
    c = PolygonalCurve(V)
    assert check_embedded(c).ok
    s = c.vertex_params
    with pytest.raises(MoveRejected):
        inscribe_arc(c, Interval(s[0] + 1e-3, s[2] - 1e-3), 5.0)


def test_inscribe_closed_wraps_and_keeps_embedding():
    tre = make_torus_knot(2, 3, 120)
    L = tre.length
    out = inscribe_arc(tre, Interval(L - 0.8, L + 0.8), 0.02)
    assert out.closed and check_embedded(out).ok
    assert out.length < tre.length
    assert total_curvature(out) <= total_curvature(tre) + 1e-12


# ---------------------------------------------------------------- shorten_corner

def test_shorten_corner_symmetric_example():
    phi = 2 * math.pi / 3
    c = corner(phi)
    out = shorten_corner(c, 1, 0.1)
    assert out.length < c.length
    a, v, b = out.vertices
    u1, u2 = (v - a) / np.linalg.norm(v - a), (b - v) / np.linalg.norm(b - v)
    phi_hat = math.acos(float(np.dot(u1, u2)))
    assert phi_hat < phi
    assert 1 / math.cos(phi_hat / 2) < 2.0
    best, _, _ = grid_max_dq(out.vertices, False, samples_per_edge=4000)
    assert best == pytest.approx(1 / math.cos(phi_hat / 2), rel=1e-3)
    assert max_distortion(out)[0] < max_distortion(c)[0]


def test_shorten_corner_edge_cases():
    c = corner(2.0)
    assert shorten_corner(c, 1, 0.0) == c
    with pytest.raises(ValueError):
        shorten_corner(c, 1, 1.0)
    with pytest.raises(ValueError):
        shorten_corner(c, 0, 0.3)
    straight = PolygonalCurve([[0, 0, 0], [1, 0, 0], [2, 0, 0]], closed=False)
    with pytest.raises(NoOpMove):
        shorten_corner(straight, 1, 0.3)


def test_shorten_corner_blocked():
    # vertical strand at (1.5, 0.5) inside the triangle swept by sliding vertex 1 toward vertex 2
    c = PolygonalCurve([[0, 0, 0], [2, 0, 0], [2, 2, 0], [1.5, 0.5, 0.5], [1.5, 0.5, -0.5], [0, 2, 0]])
    assert check_embedded(c).ok
    with pytest.raises(MoveRejected):
        shorten_corner(c, 1, 0.9, toward=1)
    assert shorten_corner(c, 1, 0.1, toward=1).length < c.length


def test_perturb_vertex_blocked_and_free():
    c = PolygonalCurve([[0, 0, 0], [2, 0, 0], [2, 2, 0], [1, 1, 0.5], [1, 1, -0.5], [0, 2, 0]])
    assert perturb_vertex(c, 0, [0.1, 0.1, 0.0]).vertices[0] == pytest.approx([0.1, 0.1, 0.0])
    with pytest.raises(MoveRejected):
        perturb_vertex(c, 0, [1.8, 1.2, 0.0])


# ---------------------------------------------------------------- certificate

def test_certificate_identity():
    tre = make_torus_knot(2, 3, 48)
    cert = prop1_certificate(tre, tre, Interval(1.0, 2.0), 1e-3, samples=150)
    assert cert.ok and cert.max_increase_inside == 0.0 and cert.max_increase_outside == 0.0


def test_certificate_on_comet_arc():
    com = make_comet(2.0)
    L = com.length
    iv = Interval(0.5 * L - 0.15, 0.5 * L + 0.15)
    window = Interval(iv.lo - 0.1, iv.hi + 0.1)
    eps = 0.05
    ep = prop1_epsilon_prime(com, iv, window, eps)
    out = inscribe_arc(com, iv, ep)
    cert = prop1_certificate(com, out, iv, eps)
    assert cert.ok, cert


def test_certificate_flags_arc_pulled_onto_strand():
    # semicircle closed by a thin rectangle: the chord lands next to the bottom edge
    a = np.linspace(0, math.pi, 33)
    top = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    V = np.vstack([top, [[-1, -0.05, 0], [1, -0.05, 0]]])
    c = PolygonalCurve(V)
    s = c.vertex_params
    iv = Interval(1e-6, s[32] - 1e-6)
    out = inscribe_arc(c, iv, 2.0)
    cert = prop1_certificate(c, out, iv, 0.1)
    assert not cert.ok and cert.length_decreased
    assert cert.max_increase_inside > 10
    assert cert.offending is not None


def test_correspondence_requires_vertices_on_curve():
    sq = make_ngon(4)
    moved = sq.with_vertices(sq.vertices + [0, 0, 0.1])
    with pytest.raises(ValueError):
        correspondence(sq, moved)


def test_epsilon_prime_window_too_curved():
    c = make_ngon(8)
    with pytest.raises(ValueError):
        prop1_epsilon_prime(c, Interval(0.1, 0.5), Interval(0.0, 2.0), 0.01)


# ---------------------------------------------------------------- anneal

def test_config_validation():
    with pytest.raises(ConfigError):
        AnnealConfig(C=1.0)
    with pytest.raises(ConfigError):
        AnnealConfig(b=0.9)
    with pytest.raises(ConfigError):
        AnnealConfig(cooling=1.0)
    with pytest.raises(ConfigError):
        AnnealConfig(weight_inscribe=0, weight_corner=0, weight_perturb=0)
    with pytest.raises(ConfigError):
        AnnealConfig(objective="energy")
    with pytest.raises(ConfigError):
        AnnealConfig.from_mapping({"colour": "red"})


def test_config_file(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("[anneal]\nobjective = distortion\nC = 3\nseed = 7\nsteps = 5\n")
    cfg = AnnealConfig.from_file(p)
    assert (cfg.objective, cfg.C, cfg.seed, cfg.steps) == ("distortion", 3.0, 7, 5)
    q = tmp_path / "flat.cfg"
    q.write_text("C = 2.5\nb = 1.4\n")
    cfg = AnnealConfig.from_file(q)
    assert (cfg.C, cfg.b) == (2.5, 1.4)
    assert AnnealConfig.from_mapping(cfg.to_dict()) == cfg


def test_anneal_circle_length():
    cfg = AnnealConfig(objective="length", C=2.0, b=1.5, steps=150, seed=3)
    seed = normalize_thickness(make_ngon(64), 1.5)
    best, trace = anneal(seed, cfg)
    assert best.length <= seed.length * (1 + 1e-12)
    assert max_distortion(best)[0] < 2
    acc = trace.column("accepted").astype(bool)
    assert np.all(trace.column("delta")[acc] < 2)
    lengths = np.concatenate([[seed.length], trace.column("length")[acc]])
    running = np.minimum.accumulate(lengths)
    assert best.length == pytest.approx(running[-1], rel=1e-12)


def test_anneal_trefoil_distortion_best_so_far():
    seed = make_torus_knot(2, 3, 24)
    cfg = AnnealConfig(objective="distortion", C=10.0, b=2.0, steps=100, seed=5)
    d0 = max_distortion(seed)[0]
    best, trace = anneal(seed, cfg)
    assert max_distortion(best)[0] <= d0 * (1 + 1e-12)
    assert len(trace) == 100


def test_anneal_deterministic_and_csv(tmp_path):
    seed = make_torus_knot(2, 3, 24)
    cfg = AnnealConfig(objective="length", C=10.0, b=2.0, steps=60, seed=11)
    b1, t1 = anneal(seed, cfg)
    b2, t2 = anneal(seed, cfg)
    assert b1 == b2 and t1.records == t2.records
    t1.write_csv(tmp_path / "t.csv")
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert tuple(rows[0]) == TRACE_COLUMNS and len(rows) == 61


def test_anneal_inscribe_budget():
    seed = make_torus_knot(2, 3, 40)
    tight = AnnealConfig(C=10.0, b=2.0, steps=40, seed=1, weight_corner=0, weight_perturb=0, eps_prop=1e-9)
    # replacements that raise any sampled dq near the arc are refused
    n_tight = anneal(seed, tight)[1].accepted_count
    loose = AnnealConfig(C=10.0, b=2.0, steps=40, seed=1, weight_corner=0, weight_perturb=0)
    assert anneal(seed, loose)[1].accepted_count > n_tight
    with pytest.raises(ConfigError):
        AnnealConfig(eps_prop=0.0)


def test_anneal_rejects_infeasible_seed():
    with pytest.raises(ConfigError):
        anneal(make_ngon(64), AnnealConfig(C=1.5, b=1.2, steps=1))
    with pytest.raises(ConfigError):
        anneal(PolygonalCurve([[0, 0, 0], [1, 0, 0], [1, 1, 0]], closed=False), AnnealConfig(steps=1))


# ---------------------------------------------------------------- saturation

def test_saturation_ngon():
    rep = saturation_report(make_ngon(512), eta=1e-2)
    assert rep.fraction == 1.0 and len(rep.windows) == 64


def test_saturation_straight_segment():
    rep = saturation_report(PolygonalCurve([[0, 0, 0], [2, 0, 0]], closed=False))
    assert rep.fraction == 1.0


def test_saturation_comet_unsaturated_on_closure():
    com = make_comet(2 * math.pi / 3)
    rep = saturation_report(com, eta=1e-2)
    assert rep.fraction < 1.0
    bad = [w for w in rep.windows if not w.saturated]
    assert bad and all(1.0 <= w.lo and w.hi <= com.length - 1.0 for w in bad)
    doc = rep.to_dict()
    assert doc["fraction"] == rep.fraction and len(doc["windows"]) == len(rep.windows)


def test_saturation_window_validation():
    with pytest.raises(ValueError):
        saturation_report(make_ngon(16), window=-1.0)
