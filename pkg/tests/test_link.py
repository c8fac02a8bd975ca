import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wsncov.errors import DomainError
from wsncov.link import LinkModel, RadioParams, link_probability, range_from_budget, sample_link
from wsncov.numerics import make_stream
from wsncov.sensing import ShadowFadingSensing, detection_probability


def test_budget_worked_example():
    model = range_from_budget(RadioParams(P_t=0, P_rth=-70, PL_ref=40, d_0=1, n=2, sigma=4))
    assert model.R_0 == pytest.approx(31.622776601683793, rel=1e-14)
    assert (model.n, model.sigma) == (2, 4)


def test_budget_zero_margin():
    assert range_from_budget(RadioParams(10, -30, 40, 2.5, 3)).R_0 == pytest.approx(2.5)


def test_budget_cubic_exponent():
    assert range_from_budget(RadioParams(0, -70, 40, 1, 3)).R_0 == pytest.approx(10.0, rel=1e-14)


class TestLinkProbability:
    @given(st.floats(0.01, 30), st.floats(1, 6))
    def test_half_at_range(self, sigma, n):
        assert link_probability(LinkModel(100, n, sigma), 100) == 0.5

    def test_fig6_curve_d_point(self):
        # Q(30 log10 1.2 / 4), mpmath
        assert link_probability(LinkModel(100, 3, 4), 120) == pytest.approx(
            0.27630309622743861, abs=1e-12)

    def test_fig6_curve_c_point(self):
        assert link_probability(LinkModel(100, 2, 8), 50) == pytest.approx(
            0.77414732410547741, abs=1e-12)

    def test_no_link_beyond_range_without_shadowing(self):
        m = LinkModel(100, 2, 0)
        assert link_probability(m, 150) == 0.0
        assert link_probability(m, 100) == 1.0

    def test_zero_distance(self):
        assert link_probability(LinkModel(100, 2, 8), 0.0) == 1.0

    def test_negative_distance(self):
        with pytest.raises(DomainError):
            link_probability(LinkModel(100, 2, 8), -5)

    def test_strictly_decreasing(self):
        p = link_probability(LinkModel(100, 3, 8), np.linspace(1, 1000, 5000))
        assert np.all(np.diff(p) < 0)

    @given(st.floats(0.5, 12), st.floats(1, 5), st.floats(0.05, 20))
    def test_depends_on_ratio_only(self, sigma, n, t):
        a = link_probability(LinkModel(1.0, n, sigma), t)
        b = link_probability(LinkModel(1.0, 2 * n, 2 * sigma), t)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)

    @given(st.floats(0.01, 100), st.floats(0.5, 12), st.floats(1, 5))
    def test_log_symmetry(self, t, sigma, n):
        m = LinkModel(7.0, n, sigma)
        assert abs(link_probability(m, 7.0 * t) + link_probability(m, 7.0 / t) - 1) <= 1e-12

    @given(st.floats(0.1, 11), st.floats(0.01, 1), st.floats(1.001, 10))
    def test_shadowing_crossing(self, sigma, dsigma, t):
        assume(20 * math.log10(t) / sigma <= 7)
        lo, hi = LinkModel(1, 2, sigma), LinkModel(1, 2, sigma + dsigma)
        assert link_probability(hi, t) > link_probability(lo, t)
        assert link_probability(hi, 1 / t) < link_probability(lo, 1 / t)

    def test_shares_kernel_with_sensing(self):
        d = np.linspace(0, 500, 997)
        for n, sigma in [(2, 4), (3, 8), (2.7, 0.0)]:
            np.testing.assert_array_equal(
                link_probability(LinkModel(60, n, sigma), d),
                detection_probability(ShadowFadingSensing(60, n, sigma), d))


class TestSampling:
    def test_disk_deterministic(self):
        s = make_stream(0, 0)
        assert sample_link(LinkModel(100, 2, 0), 90, s) is True
        assert s.position == 0

    def test_rate_at_range(self):
        hits = sample_link(LinkModel(100, 2, 8), np.full(10**5, 100.0), make_stream(4, 4))
        assert abs(hits.mean() - 0.5) <= 0.005

    def test_rate_curve_d(self):
        hits = sample_link(LinkModel(100, 3, 4), np.full(10**5, 120.0), make_stream(5, 5))
        assert abs(hits.mean() - 0.2763) <= 0.0043

    def test_json_schema(self):
        m = LinkModel(100, 3, 4)
        assert m.to_dict() == {"R_0": 100, "n": 3, "sigma": 4}
        assert LinkModel.from_dict(m.to_dict()) == m

    @pytest.mark.parametrize("args", [(0, 2, 4), (100, 0, 4), (100, 2, -1), (math.inf, 2, 1)])
    def test_invariants(self, args):
        with pytest.raises(DomainError):
            LinkModel(*args)
