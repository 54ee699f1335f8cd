"""Gromov distortion, distortion shadows and thickness of polygonal space
curves, with length-decreasing isotopy moves and an annealer over the
bounded-distortion, fixed-thickness constraint set."""
from __future__ import annotations

from .curvature import (CurvatureMeasure, Interval, curvature_measure, decompose, ds_bound_check,
                        exterior_angles, interval_curvature, subdivision_scale, total_curvature)
from .distortion import (DistortionReport, NotEmbeddedError, ThicknessQuery, D_of_s, dq,
                         find_drcs, max_distortion, normalize_thickness, shadow, thickness)
from .distortion import distortion as distortion_report
from .generators import (ConstructionError, GeneratorSpec, apply_twist, make_comet, make_dragons_tooth,
                         make_ngon, make_torus_knot)
from .geometry import (ChordPair, PolygonalCurve, arc_distance, check_embedded, chord_distance, point_at,
                       read_curve, triangle_move_valid, write_curve)
from .optimizer import (AnnealConfig, AnnealTrace, MoveRejected, NoOpMove, anneal, in_UC, inscribe_arc,
                        prop1_certificate, saturation_report, shorten_corner)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig", "AnnealTrace", "ChordPair", "ConstructionError", "CurvatureMeasure", "D_of_s",
    "DistortionReport", "GeneratorSpec", "Interval", "MoveRejected", "NoOpMove", "NotEmbeddedError",
    "PolygonalCurve", "ThicknessQuery", "anneal", "apply_twist", "arc_distance", "check_embedded",
    "chord_distance", "curvature_measure", "decompose", "distortion_report", "dq", "ds_bound_check",
    "exterior_angles", "find_drcs", "in_UC", "inscribe_arc", "interval_curvature", "make_comet",
    "make_dragons_tooth", "make_ngon", "make_torus_knot", "max_distortion", "normalize_thickness",
    "point_at", "prop1_certificate", "read_curve", "saturation_report", "shadow", "shorten_corner",
    "subdivision_scale", "thickness", "total_curvature", "triangle_move_valid", "write_curve",
]
