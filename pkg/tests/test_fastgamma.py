"""Batched Christoffel pipeline against the jet route.

The two implementations share no evaluation code beyond the expression
trees, so agreement at round-off level checks both.
"""

import numpy as np
import pytest

from geoweb import fastgamma
from geoweb.connection import gamma_evaluator
from geoweb.errors import DegenerateWebPoint
from geoweb.web import WebChart

from conftest import CORPUS_SOURCES, make_web, sample_points


@pytest.mark.parametrize("name", sorted(CORPUS_SOURCES))
def test_matches_jet_route(name):
    web = make_web(name)
    slow = gamma_evaluator(web)
    fast = fastgamma.batched_gamma_evaluator(web)
    pts = sample_points(web, 6, seed=101)
    batched = fast(pts)
    for b, point in enumerate(pts):
        assert np.allclose(batched[b], slow(point), rtol=1e-12, atol=1e-12)


def test_single_point_shape():
    web = make_web("xy4")
    fast = fastgamma.batched_gamma_evaluator(web)
    g = fast(np.array([0.0, 0.0]))
    assert g.shape == (2, 2, 2)
    assert g[0, 0, 1] == pytest.approx(-1.0, abs=1e-12)


def test_batched_values_order_zero():
    web = make_web("mixed3")
    pts = sample_points(web, 10, seed=5)
    vals = fastgamma.batched_values(web.functions[4], pts)
    expect = [web.eval_function(5, p, 0).value for p in pts]
    assert np.allclose(vals, expect, rtol=1e-15)


def test_degenerate_batch_row_reported():
    web = WebChart.from_strings(
        2, ["x1", "x2", "-(x1+x2+x1*x2)", "x1+2*x2"])
    fast = fastgamma.batched_gamma_evaluator(web)
    pts = np.array([[0.1, 0.1], [0.0, -1.0]])
    with pytest.raises(DegenerateWebPoint):
        fast(pts)


def test_coincident_invariants_in_batch():
    web = WebChart.from_strings(
        2, ["x1", "x2", "-(x1+x2)", "x1+x2+x1*x1"])
    fast = fastgamma.batched_gamma_evaluator(web)
    with pytest.raises(DegenerateWebPoint):
        fast(np.array([[0.0, 0.0]]))
