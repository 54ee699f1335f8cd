from __future__ import annotations

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gromovdist.distortion import NotEmbeddedError
from gromovdist.estimators import FEATURES, CurveAnnealer, DistortionAnalyzer, DistortionFeatures
from gromovdist.generators import make_comet, make_ngon, make_torus_knot


def test_analyzer_fit_attributes():
    an = DistortionAnalyzer(density=16).fit(make_comet(2 * math.pi / 3))
    assert an.delta_ == pytest.approx(2.0, abs=1e-6)
    assert an.argmax_pairs_ and an.drcs_
    assert an.D(0.3) == pytest.approx(2.0, rel=1e-6)
    assert not an.in_UC(C=1.9)


def test_analyzer_accepts_arrays_and_rejects_crossings():
    an = DistortionAnalyzer(b=1.5).fit(make_ngon(32).vertices)
    assert an.delta_ > 1.57 and math.isfinite(an.thickness_)
    with pytest.raises(NotEmbeddedError):
        DistortionAnalyzer().fit(np.array([[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]], float))
    with pytest.raises(ValueError):
        DistortionAnalyzer().fit(np.zeros((4, 4)))


def test_analyzer_not_fitted():
    with pytest.raises(NotFittedError):
        DistortionAnalyzer().D(0.0)


def test_features_transform():
    curves = [make_ngon(16), make_comet(2.0), make_torus_knot(2, 3, 48)]
    X = DistortionFeatures(b=1.4).fit_transform(curves)
    assert X.shape == (3, len(FEATURES))
    assert X[0, 0] == pytest.approx(8 * math.tan(math.pi / 16), rel=1e-9)
    assert X[1, 0] == pytest.approx(1 / math.cos(1.0), rel=1e-6)
    assert X[2, 4] == 48
    names = DistortionFeatures(features=("delta", "length")).fit([]).get_feature_names_out()
    assert list(names) == ["delta", "length"]
    with pytest.raises(ValueError):
        DistortionFeatures(features=("colour",)).fit([])


def test_clone_and_params():
    est = DistortionFeatures(b=1.7)
    assert clone(est).get_params()["b"] == 1.7
    ann = CurveAnnealer(C=5.0, steps=3)
    assert clone(ann).config().C == 5.0


def test_annealer_fit():
    ann = CurveAnnealer(objective="length", C=10.0, b=2.0, steps=30, seed=2).fit(make_torus_knot(2, 3, 24))
    assert ann.best_curve_.closed and ann.transform().shape[1] == 3
    again = CurveAnnealer(objective="length", C=10.0, b=2.0, steps=30, seed=2).fit(make_torus_knot(2, 3, 24))
    assert np.array_equal(again.transform(), ann.transform())
