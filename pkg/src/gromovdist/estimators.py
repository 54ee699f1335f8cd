"""scikit-learn style wrappers: a per-curve analyzer, a feature transformer
over collections of curves, and an annealing estimator."""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import distortion as dist
from .curvature import total_curvature
from .geometry import PolygonalCurve, check_embedded
from .optimizer import AnnealConfig, anneal, in_UC

FEATURES = ("delta", "length", "total_curvature", "thickness", "n_edges")


def check_curve(curve, closed: bool | None = None, require_embedded: bool = True) -> PolygonalCurve:
    """Coerce a PolygonalCurve or an (n, 2|3) vertex array; validate embedding."""
    if not isinstance(curve, PolygonalCurve):
        arr = np.asarray(curve, dtype=float)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise ValueError(f"expected an (n, 3) vertex array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vertex array contains NaN or inf")
        curve = PolygonalCurve(arr, closed=True if closed is None else closed)
    if require_embedded:
        chk = check_embedded(curve)
        if not chk.ok:
            raise dist.NotEmbeddedError(f"curve is not embedded: edges {chk.pair}")
    return curve


def _as_curve_list(X, closed):
    if isinstance(X, (PolygonalCurve, np.ndarray)) and not (isinstance(X, np.ndarray) and X.ndim == 3):
        X = [X]
    return [check_curve(c, closed) for c in X]


class DistortionAnalyzer(BaseEstimator):
    """Fit on one curve; exposes delta_, argmax_pairs_, shadow_, drcs_,
    thickness_ and the full report_."""

    def __init__(self, density: float = dist.DEFAULT_DENSITY, b: float | None = None,
                 tol_argmax: float = dist.TOL_ARGMAX, closed: bool | None = None):
        self.density = density
        self.b = b
        self.tol_argmax = tol_argmax
        self.closed = closed

    def fit(self, X, y=None):
        curve = check_curve(X, self.closed)
        rep = dist.distortion(curve, self.density, self.b, self.tol_argmax)
        self.curve_ = curve
        self.report_ = rep
        self.delta_ = rep.delta
        self.argmax_pairs_ = rep.argmax_pairs
        self.shadow_ = rep.shadow
        self.drcs_ = rep.drcs
        self.thickness_ = rep.thickness
        return self

    def D(self, s):
        check_is_fitted(self, "report_")
        return dist.profile(self.curve_, s)[0]

    def in_UC(self, C: float, tau_min: float = 1.0):
        check_is_fitted(self, "report_")
        b = self.b if self.b is not None else self.report_.b
        return in_UC(self.curve_, C, b, tau_min)


class DistortionFeatures(TransformerMixin, BaseEstimator):
    """Map a list of curves to rows of (delta, length, total curvature,
    thickness at b, edge count)."""

    def __init__(self, b: float = 1.5, closed: bool | None = None, features=FEATURES):
        self.b = b
        self.closed = closed
        self.features = features

    def fit(self, X, y=None):
        bad = [f for f in self.features if f not in FEATURES]
        if bad:
            raise ValueError(f"unknown features {bad}; choose from {FEATURES}")
        if not self.b > 1:
            raise ValueError("b must exceed 1")
        self.n_features_out_ = len(self.features)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for c in _as_curve_list(X, self.closed):
            vals = {
                "delta": lambda: dist.max_distortion(c, check=False)[0],
                "length": lambda: c.length,
                "total_curvature": lambda: total_curvature(c),
                "thickness": lambda: dist.thickness(c, self.b, check=False),
                "n_edges": lambda: float(c.n_edges),
            }
            rows.append([vals[f]() for f in self.features])
        return np.array(rows, dtype=float).reshape(-1, len(self.features))

    def get_feature_names_out(self, input_features=None):
        return np.array(self.features, dtype=object)


class CurveAnnealer(BaseEstimator):
    """Estimator front end to the annealer; parameters mirror AnnealConfig."""

    def __init__(self, objective="length", C=2.0, b=1.5, tau_min=1.0, seed=0, t0=0.05,
                 cooling=0.999, steps=1000, weight_inscribe=1.0, weight_corner=1.0,
                 weight_perturb=2.0):
        self.objective = objective
        self.C = C
        self.b = b
        self.tau_min = tau_min
        self.seed = seed
        self.t0 = t0
        self.cooling = cooling
        self.steps = steps
        self.weight_inscribe = weight_inscribe
        self.weight_corner = weight_corner
        self.weight_perturb = weight_perturb

    def config(self) -> AnnealConfig:
        return AnnealConfig(**self.get_params())

    def fit(self, X, y=None):
        curve = check_curve(X, closed=True)
        best, trace = anneal(curve, self.config())
        self.best_curve_ = best
        self.trace_ = trace
        lengths = trace.column("length") if len(trace) else np.array([math.nan])
        self.best_length_ = best.length
        self.n_accepted_ = trace.accepted_count
        self.final_length_ = float(lengths[-1])
        return self

    def transform(self, X=None):
        check_is_fitted(self, "best_curve_")
        return self.best_curve_.vertices.copy()
