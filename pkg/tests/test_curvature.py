from __future__ import annotations

import json
import math

import numpy as np
import pytest

from gromovdist.curvature import (CurvatureMeasure, Interval, arc_max_dq, curvature_measure, decompose,
                                  ds_bound_check, exterior_angles, interval_curvature, random_arc,
                                  random_measure, subdivision_scale, total_curvature)
from gromovdist.generators import make_comet, make_ngon, make_torus_knot
from gromovdist.geometry import PolygonalCurve

from oracles import grid_max_dq, window_mass_scan

SQUARE = PolygonalCurve([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])
STRAIGHT = PolygonalCurve([[0, 0, 0], [1, 0, 0], [3, 0, 0]], closed=False)


def corner(phi, arm=1.0):
    theta = 0.5 * (math.pi - phi)
    return PolygonalCurve([[-arm * math.sin(theta), arm * math.cos(theta), 0], [0, 0, 0],
                           [arm * math.sin(theta), arm * math.cos(theta), 0]], closed=False)


def test_exterior_angles_examples():
    assert [a for _, a in exterior_angles(SQUARE)] == pytest.approx([math.pi / 2] * 4)
    assert exterior_angles(STRAIGHT) == [(1, pytest.approx(0.0, abs=1e-15))]
    n = 11
    angs = exterior_angles(make_ngon(n))
    assert len(angs) == n and all(a == pytest.approx(2 * math.pi / n) for _, a in angs)


def test_total_curvature_examples():
    rng = np.random.default_rng(0)
    for n in (3, 5, 17):
        assert total_curvature(make_ngon(n, float(rng.uniform(0.5, 3)))) == pytest.approx(2 * math.pi)
    assert total_curvature(STRAIGHT) == pytest.approx(0.0, abs=1e-15)
    tre = make_torus_knot(2, 3, 96)
    direct = sum(math.acos(np.clip(np.dot(a, b), -1, 1))
                 for a, b in zip(np.roll(tre.directions, 1, axis=0), tre.directions))
    assert total_curvature(tre) == pytest.approx(direct, rel=1e-12)
    assert total_curvature(tre) >= 4 * math.pi


def test_milnor_monotone_under_vertex_deletion():
    rng = np.random.default_rng(1)
    for _ in range(30):
        V = rng.normal(size=(10, 3))
        fine = PolygonalCurve(V)
        keep = np.sort(rng.choice(10, size=int(rng.integers(3, 10)), replace=False))
        assert total_curvature(PolygonalCurve(V[keep])) <= total_curvature(fine) + 1e-12
        openfine = PolygonalCurve(V, closed=False)
        keep = np.unique(np.concatenate([[0, 9], keep]))
        assert total_curvature(PolygonalCurve(V[keep], closed=False)) <= total_curvature(openfine) + 1e-12


def test_curvature_measure_examples():
    m = curvature_measure(SQUARE)
    assert m.atoms[:, 0] == pytest.approx([0, 1, 2, 3])
    assert m.atoms[:, 1] == pytest.approx([math.pi / 2] * 4)
    assert not curvature_measure(STRAIGHT).has_atoms
    phi = 2.0
    com = curvature_measure(make_comet(phi))
    assert com.atoms[0, 1] == pytest.approx(phi)
    assert np.all(com.atoms[1:, 1] < com.atoms[0, 1])
    assert np.median(com.atoms[1:, 1]) < 0.02


def test_measure_invariants_enforced():
    with pytest.raises(ValueError):
        CurvatureMeasure(np.array([[0.5, -0.1]]))
    with pytest.raises(ValueError):
        CurvatureMeasure(np.array([[0.5, 0.1], [0.2, 0.1]]))
    with pytest.raises(ValueError):
        CurvatureMeasure(np.array([[0.5, math.pi]]))


def test_measure_json_round_trip():
    m = random_measure(np.random.default_rng(3), atoms=2)
    doc = json.loads(m.to_json())
    assert set(doc) == {"atoms", "density"}
    back = CurvatureMeasure.from_dict(doc)
    assert np.array_equal(back.atoms, m.atoms) and np.array_equal(back.density, m.density)


def test_interval_curvature_examples():
    m = curvature_measure(SQUARE)
    assert interval_curvature(m, Interval(0.5, 1.5)) == pytest.approx(math.pi / 2)
    assert interval_curvature(m, Interval(1.0, 1.5)) == 0.0
    assert interval_curvature(m, Interval(1.0, 1.5), closed_ends=True) == pytest.approx(math.pi / 2)
    assert interval_curvature(m, Interval(3.5, 4.5)) == pytest.approx(math.pi / 2)
    assert interval_curvature(m, Interval(2.5, 4.5)) == pytest.approx(math.pi)


def test_total_equals_full_interval_plus_endpoints():
    rng = np.random.default_rng(4)
    c = PolygonalCurve(rng.normal(size=(8, 3)), closed=False)
    m = curvature_measure(c)
    assert interval_curvature(m, Interval(0, c.length), closed_ends=True) == pytest.approx(total_curvature(c))
    closed = PolygonalCurve(rng.normal(size=(8, 3)))
    m = curvature_measure(closed)
    # a full period starting just off a vertex sees every atom once
    assert interval_curvature(m, Interval(1e-9, closed.length + 1e-9)) == pytest.approx(total_curvature(closed))


def test_ds_bound_examples():
    c = corner(1.0)
    res = ds_bound_check(c, Interval(0, c.length))
    assert res.bound == pytest.approx(1.139494, abs=1e-6)
    assert res.max_dq == pytest.approx(1 / math.cos(0.5), rel=1e-9)
    assert res.ok
    res = ds_bound_check(STRAIGHT, Interval(0, STRAIGHT.length))
    assert (res.bound, res.max_dq, res.ok) == (1.0, 1.0, True)


def test_ds_bound_not_applicable_above_pi():
    c = make_ngon(6)
    res = ds_bound_check(c, Interval(0.1, 0.1 + 0.75 * c.length))
    assert res.ok is None and res.kappa > math.pi


def test_arc_max_dq_matches_grid_oracle():
    rng = np.random.default_rng(5)
    for _ in range(8):
        arc = random_arc(rng, int(rng.integers(2, 6)))
        grid, _, _ = grid_max_dq(arc.vertices, False, samples_per_edge=1000)
        got = arc_max_dq(arc)
        assert got >= grid * (1 - 1e-12)
        assert got == pytest.approx(grid, rel=1e-4)


def test_ds_check_on_sub_arcs_of_closed_curves():
    rng = np.random.default_rng(6)
    tre = make_torus_knot(2, 3, 60)
    for _ in range(20):
        lo = float(rng.uniform(0, tre.length))
        res = ds_bound_check(tre, Interval(lo, lo + float(rng.uniform(0.2, 3.0))))
        assert res.ok is not False


def test_random_arc_curvature_budget():
    rng = np.random.default_rng(7)
    for _ in range(50):
        arc = random_arc(rng, int(rng.integers(1, 9)))
        assert total_curvature(arc) <= math.pi


def test_decompose_examples():
    m = curvature_measure(SQUARE)
    major, rest = decompose(m, 2)
    assert major.atoms[:, 0] == pytest.approx([0, 1])
    assert len(rest.atoms) == 2
    major, rest = decompose(m, 0)
    assert len(major.atoms) == 0 and len(rest.atoms) == 4
    com = curvature_measure(make_comet(2.0))
    major, rest = decompose(com, 1)
    assert major.atoms[0, 1] == pytest.approx(2.0) and major.atoms[0, 0] == 0.0
    with pytest.raises(ValueError):
        decompose(m, -1)


def test_decompose_conserves_mass():
    rng = np.random.default_rng(8)
    for _ in range(20):
        c = PolygonalCurve(rng.normal(size=(12, 3)))
        m = curvature_measure(c)
        major, rest = decompose(m, int(rng.integers(0, 13)))
        parts = np.concatenate([major.atoms, rest.atoms])
        parts = parts[np.argsort(parts[:, 0])]
        assert np.array_equal(parts, m.atoms)
        assert math.fsum(parts[:, 1]) == m.total


def test_subdivision_scale_uniform():
    m = CurvatureMeasure(density=np.array([[0.0, 1.0, 1.0]]))
    assert subdivision_scale(m) == pytest.approx(2 / 3, rel=1e-8)


def test_subdivision_scale_concentrated():
    dens = np.array([[0.0, 0.4, 0.1 / 0.9], [0.4, 0.5, 9.0], [0.5, 1.0, 0.1 / 0.9]])
    m = CurvatureMeasure(density=dens)
    W = subdivision_scale(m)
    total = m.total
    assert window_mass_scan(dens, W * (1 - 1e-9)) <= 2 / 3 * total * (1 + 1e-12)
    assert window_mass_scan(dens, W * (1 + 1e-6)) > 2 / 3 * total
    assert W < 0.1


def test_subdivision_scale_rejects_atoms():
    m = CurvatureMeasure(np.array([[0.5, 0.3]]), np.array([[0.0, 1.0, 1.0]]))
    with pytest.raises(ValueError):
        subdivision_scale(m)
    assert subdivision_scale(m, require_atomless=False) > 0


def test_subdivision_scale_sub_interval():
    m = CurvatureMeasure(density=np.array([[0.0, 0.5, 2.0], [0.5, 1.0, 0.0]]))
    W = subdivision_scale(m, Interval(0.0, 0.5))
    assert W == pytest.approx(1 / 3, rel=1e-8)
