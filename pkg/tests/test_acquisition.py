import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mpbo.acquisition import ei_array, expected_improvement, norm_cdf, norm_pdf, sample_next
from mpbo.gp import KernelParams, ParamBox, SampleBuffer, gp_fit
from mpbo.rng import make_stream

finite = st.floats(-50, 50, allow_nan=False)
sigmas = st.floats(0.0, 20.0, allow_nan=False)


def fit(points, rewards, box, **kernel):
    buf = SampleBuffer()
    for x, r in zip(points, rewards):
        buf.append(x, r)
    return gp_fit(buf, KernelParams.isotropic(box.dim, **kernel), box)


class TestExpectedImprovement:
    def test_no_uncertainty_no_gap(self):
        assert expected_improvement(0.7, 0.0, 0.7) == 0.0

    def test_certain_improvement_is_the_gap(self):
        assert expected_improvement(1.0, 1e-12, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert expected_improvement(1.0, 0.0, 0.0) == 1.0

    def test_standard_normal_against_monte_carlo(self):
        y = np.random.default_rng(0).standard_normal(1_000_000)
        mc = float(np.maximum(y, 0.0).mean())
        assert expected_improvement(0.0, 1.0, 0.0) == pytest.approx(mc, abs=1e-3)
        assert expected_improvement(0.0, 1.0, 0.0) == pytest.approx(0.398942, abs=1e-6)

    def test_negative_std_rejected(self):
        with pytest.raises(ValueError):
            expected_improvement(0.0, -1.0, 0.0)

    def test_array_matches_scalar(self):
        mu = np.array([-1.0, 0.0, 0.5, 2.0])
        sd = np.array([0.0, 1.0, 0.3, 0.0])
        got = ei_array(mu, sd, 0.2)
        for m, s, g in zip(mu, sd, got):
            assert g == expected_improvement(m, s, 0.2)

    def test_normal_functions_accuracy(self):
        # reference values to 16 digits
        assert abs(float(norm_cdf(1.96)) - 0.9750021048517795) < 1e-10
        assert abs(float(norm_cdf(-5.0)) - 2.866515718791939e-07) < 1e-10
        assert abs(float(norm_cdf(-12.0)) - 1.776482112077679e-33) < 1e-10
        assert abs(float(norm_pdf(0.0)) - 0.3989422804014327) < 1e-10

    @given(finite, sigmas, finite, st.floats(0.0, 5.0))
    def test_monotone_in_mean(self, mu, sd, best, delta):
        assert expected_improvement(mu + delta, sd, best) >= expected_improvement(mu, sd, best) - 1e-12

    @given(finite, sigmas, finite, st.floats(0.0, 5.0))
    def test_monotone_in_std(self, mu, sd, best, delta):
        assert expected_improvement(mu, sd + delta, best) >= expected_improvement(mu, sd, best) - 1e-12

    @given(finite, sigmas, finite)
    def test_lower_bounds(self, mu, sd, best):
        ei = expected_improvement(mu, sd, best)
        assert ei >= 0.0
        assert ei >= max(mu - best, 0.0) - 1e-12


class TestSampleNext:
    def test_single_observation_proposes_elsewhere(self):
        box = ParamBox.uniform(4)
        m = fit([box.nominal], [1.0], box)
        prop = sample_next(m, box, make_stream(0, "t"))
        assert prop.expected_improvement > 0.0
        assert np.linalg.norm(prop.point - box.nominal) > 1e-3

    def test_identical_inputs_identical_proposals(self):
        box = ParamBox.uniform(4)
        rng = np.random.default_rng(4)
        X, y = rng.uniform(0.5, 1.5, (5, 4)), rng.normal(size=5)
        a = sample_next(fit(X, y, box), box, make_stream(11, "t"))
        b = sample_next(fit(X, y, box), box, make_stream(11, "t"))
        assert np.array_equal(a.point, b.point)
        assert a.expected_improvement == b.expected_improvement

    def test_quadratic_matches_dense_grid(self):
        box = ParamBox((0.0,), (1.0,))
        xs = np.array([[0.05], [0.3], [0.5], [0.75], [0.95]])
        ys = -(xs[:, 0] - 0.62) ** 2
        m = fit(xs, ys, box)
        grid = np.linspace(0.0, 1.0, 10_001)[:, None]
        mean, var = m.predict(grid)
        ei = [expected_improvement(mu, math.sqrt(v), ys.max()) for mu, v in zip(mean, var)]
        target = grid[int(np.argmax(ei)), 0]
        prop = sample_next(m, box, make_stream(0, "quad"))
        assert abs(prop.point[0] - target) <= 0.05

    def test_requires_training_data_and_matching_box(self):
        box = ParamBox.uniform(2)
        with pytest.raises(ValueError):
            sample_next(fit([], [], box), box, make_stream(0))
        m = fit([[1.0, 1.0]], [0.0], box)
        with pytest.raises(ValueError):
            sample_next(m, ParamBox.uniform(2, 0.0, 2.0), make_stream(0))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 6).flatmap(
        lambda n: st.tuples(arrays(float, (n, 3), elements=st.floats(-1.0, 3.0)),
                            arrays(float, n, elements=st.floats(-10, 10)))),
        st.integers(0, 2 ** 32))
    def test_proposal_inside_box(self, data, seed):
        box = ParamBox((-1.0, 0.0, 2.0), (3.0, 0.5, 2.5))
        X, y = data
        X = box.from_unit((X + 1.0) / 4.0)
        prop = sample_next(fit(X, y, box), box, make_stream(seed))
        assert box.contains(prop.point)
        assert prop.expected_improvement >= 0.0
