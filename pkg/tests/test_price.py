import math

import numpy as np
import pytest

from pwlcorr import (
    CorrelatorSpec,
    DomainError,
    PwlMixture,
    batch_score,
    build_gcurve,
    correlator_f,
    dg_dR,
    g_l1_closed,
    g_l2_closed,
    g_of_R,
    l1_quartic_identity,
)
from pwlcorr.sampling import RngStream, mix_pair

MIXTURES = [
    PwlMixture.single(0.0),
    PwlMixture.single(0.5),
    PwlMixture.single(1.0),
    PwlMixture([0.3, 0.7], [0.2, 1.3]),
]


def slope_oracle(rho, w, alpha):
    """Direct transcription of the slope formula, vectorised over rho."""
    rho = np.asarray(rho)[..., None]
    plus = np.sum(w * np.exp(-alpha ** 2 / (4 * (1 + rho))), axis=-1) / np.sqrt(np.pi * (1 + rho[..., 0]))
    minus = np.sum(w * np.exp(-alpha ** 2 / (4 * (1 - rho))), axis=-1) / np.sqrt(np.pi * (1 - rho[..., 0]))
    return plus + minus


class TestSlope:
    def test_l1_at_zero(self):
        assert dg_dR(0.0, PwlMixture.single(0.0)) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-15)
        assert dg_dR(0.0, PwlMixture.single(0.0)) == pytest.approx(1.1283791671, abs=1e-10)

    def test_even_in_r(self):
        m = PwlMixture.single(0.5)
        assert dg_dR(0.3, m) == pytest.approx(dg_dR(-0.3, m), rel=1e-15)

    def test_endpoint_asymptotics(self):
        r = 1 - 1e-6
        d = dg_dR(r, PwlMixture.single(0.0))
        lead = 1 / math.sqrt(math.pi * (1 - r))
        # the ratio to the divergent term is 1 + sqrt((1-r)/(1+r)) exactly for alpha = 0
        assert d / lead == pytest.approx(1 + math.sqrt((1 - r) / (1 + r)), rel=1e-6)
        assert d / lead - 1 < 1e-3

    @pytest.mark.parametrize("m", MIXTURES)
    def test_matches_oracle(self, m):
        rs = np.linspace(-0.99, 0.99, 37)
        ours = [dg_dR(r, m) for r in rs]
        np.testing.assert_allclose(ours, slope_oracle(rs, m.w, m.alpha), rtol=1e-13)

    @pytest.mark.parametrize("m", MIXTURES)
    def test_positive(self, m):
        assert all(dg_dR(r, m) > 0 for r in np.linspace(-0.999, 0.999, 101))

    @pytest.mark.parametrize("r", [1.0, -1.0, 1.5])
    def test_domain(self, r):
        with pytest.raises(DomainError):
            dg_dR(r, PwlMixture.single(0.0))


class TestG:
    def test_zero(self):
        for m in MIXTURES:
            assert g_of_R(0.0, m) == 0.0

    def test_l1_closed_form(self):
        assert abs(g_of_R(0.8, PwlMixture.single(0.0)) - g_l1_closed(0.8)) < 1e-8

    def test_trapezoid_oracle(self):
        # brute-force trapezoid on the raw slope; the integrand is smooth on [0, 0.5]
        m = PwlMixture.single(0.5)
        rho = np.linspace(0.0, 0.5, 1_000_001)
        vals = slope_oracle(rho, m.w, m.alpha)
        trap = np.sum((vals[1:] + vals[:-1]) * 0.5 * np.diff(rho))
        assert abs(g_of_R(0.5, m) - trap) < 1e-6

    @pytest.mark.parametrize("m", MIXTURES)
    def test_finite_difference_consistency(self, m):
        h = 1e-4
        for r in np.linspace(-0.9, 0.9, 19):
            fd = (g_of_R(r + h, m) - g_of_R(r - h, m)) / (2 * h)
            assert abs(fd - dg_dR(r, m)) < 1e-5

    @pytest.mark.parametrize("m", MIXTURES)
    def test_odd(self, m):
        for r in (0.1, 0.37, 0.8, 0.99):
            assert abs(g_of_R(-r, m) + g_of_R(r, m)) < 1e-9

    @pytest.mark.parametrize("m", MIXTURES)
    def test_monotone(self, m):
        vals = [g_of_R(r, m) for r in np.linspace(-0.98, 0.98, 50)]
        assert np.all(np.diff(vals) > 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            g_of_R(1.0, PwlMixture.single(0.0))

    def test_empirical_limit(self):
        m = PwlMixture.uniform_ramp(4096, 16.0)
        for r in np.linspace(-0.5, 0.5, 11):
            assert abs(8.0 * g_of_R(r, m) - r) < 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.5, 0.725, 1.0])
    def test_monte_carlo_agreement(self, alpha):
        # sample mean of the correlator against the integral, 1e6 pairs, 4 standard errors
        spec = CorrelatorSpec.from_mixture([1.0], [alpha])
        x, y = mix_pair(RngStream(11).generator(), 0.6, "gaussian", 1_000_000)
        f = correlator_f(x, y, spec)
        se = f.std() / math.sqrt(f.size)
        assert abs(f.mean() - g_of_R(0.6, spec.as_mixture())) < 4 * se


class TestClosedForms:
    def test_l1_values(self):
        assert g_l1_closed(0) == 0
        assert g_l1_closed(1) == pytest.approx(2 * math.sqrt(2) / math.sqrt(math.pi), rel=1e-15)
        assert g_l1_closed(1) == pytest.approx(1.5957691216, abs=1e-10)
        assert g_l1_closed(0.8) == pytest.approx(1.0092, abs=1e-4)

    def test_l1_domain(self):
        with pytest.raises(DomainError):
            g_l1_closed(1.01)

    def test_l2(self):
        assert g_l2_closed(0, 1) == 0
        assert g_l2_closed(0.5, 2) == 0.5
        assert g_l2_closed(0.2, 3) + g_l2_closed(0.3, 3) == pytest.approx(g_l2_closed(0.5, 3))
        with pytest.raises(Exception):
            g_l2_closed(0.5, 0)

    @pytest.mark.parametrize("r", [0, 0.3, -0.3, 0.8, -0.8, 1, -1])
    def test_quartic_identity(self, r):
        assert abs(l1_quartic_identity(g_l1_closed(r)) - r * r) < 1e-12

    def test_quartic_domain(self):
        with pytest.raises(DomainError):
            l1_quartic_identity(2.0)


class TestGCurve:
    def test_l1_grid(self):
        grid = np.linspace(-0.9, 0.9, 19)
        curve = build_gcurve(PwlMixture.single(0.0), grid)
        np.testing.assert_allclose(curve.g_values, [g_l1_closed(r) for r in grid], atol=1e-8)

    @pytest.mark.parametrize("m", MIXTURES)
    def test_invariants(self, m):
        curve = build_gcurve(m)
        assert curve.r_grid.size == 199
        assert np.all(np.diff(curve.g_values) > 0)
        np.testing.assert_allclose(curve.g_values, -curve.g_values[::-1], atol=1e-9)
        assert abs(curve.g_values[99]) < 1e-12

    def test_incremental_matches_direct(self):
        m = PwlMixture([0.3, 0.7], [0.2, 1.3])
        grid = np.array([-0.95, -0.4, -0.05, 0.1, 0.6, 0.97])
        curve = build_gcurve(m, grid)
        np.testing.assert_allclose(curve.g_values, [g_of_R(r, m) for r in grid], atol=1e-9)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_flat_slope_near_zero(self, alpha):
        m = PwlMixture.single(alpha)
        curve = build_gcurve(m, np.array([-0.05, 0.05]))
        secant = (curve.g_values[1] - curve.g_values[0]) / 0.1
        assert secant == pytest.approx(dg_dR(0.0, m), rel=0.01)

    @pytest.mark.parametrize("grid", [[0.5, 0.1], [-1.0, 0.0], [0.0, 1.0], []])
    def test_bad_grid(self, grid):
        with pytest.raises(DomainError):
            build_gcurve(PwlMixture.single(0.0), np.array(grid))
