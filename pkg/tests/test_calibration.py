import json
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from pwlcorr import (
    CorrelatorSpec,
    ModelFormatError,
    ModelVersionError,
    NumericError,
    PwlMixture,
    RngStream,
    SpecMismatchError,
    build_table,
    estimate_r,
    fit_inverse,
    g_l1_closed,
    g_of_R,
    invert,
    load_model,
    save_model,
    standardize,
)
from pwlcorr.calibration import CalibrationTable
from pwlcorr.sampling import sample_block

L1 = CorrelatorSpec.linear_rectifier()
EMP = CorrelatorSpec.empirical()


def l1_exact_table(grid=np.linspace(-0.95, 0.95, 41)):
    y = np.array([g_l1_closed(r) for r in grid])
    return CalibrationTable(grid, y, np.zeros_like(y), 4096, 1, L1)


class TestBuildTable:
    def test_empirical_unbiased(self):
        t = build_table(EMP, np.linspace(-0.9, 0.9, 7), n=1024, trials=200, rng=RngStream(1))
        assert np.all(np.abs(t.raw_scores - t.r_grid) < 3 * t.stderr)

    @pytest.mark.slow
    def test_linear_rectifier_matches_closed_form(self):
        t = build_table(L1, np.linspace(-0.9, 0.9, 19), n=4096, trials=100, rng=RngStream(2))
        expected = np.array([g_l1_closed(r) for r in t.r_grid])
        assert np.all(np.abs(t.raw_scores - expected) < 3 * t.stderr)

    @pytest.mark.slow
    def test_mp_matches_price_curve(self):
        spec = CorrelatorSpec.mp(2.0)
        t = build_table(spec, np.linspace(-0.9, 0.9, 19), n=4096, trials=100, rng=RngStream(3))
        expected = np.array([g_of_R(r, spec.as_mixture()) for r in t.r_grid])
        assert np.all(np.abs(t.raw_scores - expected) < 3 * t.stderr)
        # compressed mid-range relative to the linear rectifier
        mid = np.argmin(np.abs(t.r_grid))
        slope = (t.mean_scores[mid + 1] - t.mean_scores[mid - 1]) / (
            t.r_grid[mid + 1] - t.r_grid[mid - 1]
        )
        assert slope < 2 / math.sqrt(math.pi)

    def test_monotone_after_cleanup(self):
        t = build_table(CorrelatorSpec.huber(0.5), np.linspace(-0.9, 0.9, 37), n=16, trials=3,
                        rng=RngStream(4))
        assert np.all(np.diff(t.mean_scores) >= 0)

    def test_deterministic_and_executor_independent(self):
        kw = dict(r_grid=np.linspace(-0.5, 0.5, 5), n=64, trials=10)
        a = build_table(L1, rng=RngStream(5), **kw)
        b = build_table(L1, rng=RngStream(5), **kw)
        with ThreadPoolExecutor(3) as ex:
            c = build_table(L1, rng=RngStream(5), executor=ex, **kw)
        np.testing.assert_array_equal(a.mean_scores, b.mean_scores)
        np.testing.assert_array_equal(a.mean_scores, c.mean_scores)

    @pytest.mark.parametrize(
        "kw",
        [dict(r_grid=[0.995]), dict(n=8), dict(trials=0)],
    )
    def test_preconditions(self, kw):
        with pytest.raises(ValueError):
            build_table(L1, **kw)


class TestFit:
    def test_empirical_identity(self):
        t = build_table(EMP, n=4096, trials=50, rng=RngStream(6))
        m = fit_inverse(t)
        y = np.linspace(*m.domain, 101)
        assert np.max(np.abs(P.polyval(y, m.coefficients) - y)) < 0.01

    def test_l1_quartic(self):
        m = fit_inverse(l1_exact_table(), 4)
        rs = np.linspace(-0.95, 0.95, 191)
        err = [abs(P.polyval(g_l1_closed(r), m.coefficients) - r) for r in rs]
        assert max(err) < 0.01
        assert m.degree == 4 and m.residual < 0.01

    def test_mp_quintic(self):
        spec = CorrelatorSpec.mp(1.45)
        grid = np.linspace(-0.95, 0.95, 41)
        y = np.array([g_of_R(r, spec.as_mixture()) for r in grid])
        m = fit_inverse(CalibrationTable(grid, y, np.zeros_like(y), 4096, 1, spec))
        assert m.degree == 5
        assert m.residual < 0.02

    def test_rank_deficient(self):
        grid = np.linspace(-0.5, 0.5, 8)
        t = CalibrationTable(grid, np.zeros(8), np.zeros(8), 16, 1, L1)
        with pytest.raises(NumericError):
            fit_inverse(t, 3)

    def test_too_few_points(self):
        t = l1_exact_table(np.linspace(-0.5, 0.5, 4))
        with pytest.raises(ValueError):
            fit_inverse(t, 4)


class TestInvert:
    def test_zero(self):
        m = fit_inverse(l1_exact_table())
        assert abs(invert(m, 0.0)) <= m.residual

    def test_l1_point(self):
        m = fit_inverse(l1_exact_table())
        assert invert(m, g_l1_closed(0.8)) == pytest.approx(0.8, abs=0.01)

    def test_clamping(self):
        m = fit_inverse(l1_exact_table())
        lo, hi = m.domain
        assert invert(m, hi + 10) == invert(m, hi)
        assert invert(m, lo - 10) == invert(m, lo)
        assert -1.0 <= invert(m, lo) and invert(m, hi) <= 1.0

    def test_domain_reaches_unit_correlation(self):
        m = fit_inverse(l1_exact_table())
        assert m.domain[1] > g_l1_closed(0.95)
        assert invert(m, m.domain[1]) == pytest.approx(1.0, abs=1e-9)

    def test_vectorised(self):
        m = fit_inverse(l1_exact_table())
        ys = np.array([-0.3, 0.0, 0.7])
        np.testing.assert_array_equal(invert(m, ys), [invert(m, v) for v in ys])


class TestEstimate:
    def test_identical_inputs(self, model_for):
        x = standardize(np.random.default_rng(7).normal(size=4096))
        assert estimate_r(x, x, L1, model_for(L1)) == pytest.approx(1.0, abs=0.02)

    def test_unbiased_gaussian(self, model_for):
        xs, ys = sample_block(256, 0.5, "gaussian", RngStream(8), 1000)
        est = estimate_r(xs, ys, L1, model_for(L1))
        assert abs(est.mean() - 0.5) < 3 * est.std(ddof=1) / math.sqrt(est.size)

    def test_uniform_with_wht(self, model_for):
        xs, ys = sample_block(1024, 0.8, "uniform", RngStream(9), 500)
        est = estimate_r(xs, ys, L1, model_for(L1), use_wht=True)
        assert abs(est.mean() - 0.8) < max(0.01, 3 * est.std(ddof=1) / math.sqrt(est.size))

    def test_spec_mismatch(self, model_for):
        with pytest.raises(SpecMismatchError):
            estimate_r(np.ones(4), np.ones(4), CorrelatorSpec.mp(0.0), model_for(L1))

    def test_length_mismatch(self, model_for):
        with pytest.raises(ValueError):
            estimate_r(np.ones(4), np.ones(5), L1, model_for(L1))


class TestPersistence:
    def test_round_trip(self, tmp_path):
        m = fit_inverse(l1_exact_table())
        m.coefficients[1] += 1e-17  # keep a value with a long repr
        p = tmp_path / "m.cal"
        save_model(m, p)
        back = load_model(p)
        assert back.coefficients.tobytes() == m.coefficients.tobytes()
        assert back.domain == m.domain and back.spec == m.spec and back.degree == m.degree
        assert back.residual == m.residual and back.meta == m.meta

    def test_mixture_spec_round_trip(self, tmp_path):
        spec = CorrelatorSpec.from_mixture([0.25, 0.75], [0.1, 1.0 / 3.0])
        grid = np.linspace(-0.9, 0.9, 9)
        y = np.array([g_of_R(r, spec.as_mixture()) for r in grid])
        m = fit_inverse(CalibrationTable(grid, y, np.zeros(9), 16, 1, spec))
        save_model(m, tmp_path / "mix.cal")
        assert load_model(tmp_path / "mix.cal").spec == spec

    def test_truncated(self, tmp_path):
        p = tmp_path / "m.cal"
        save_model(fit_inverse(l1_exact_table()), p)
        p.write_text(p.read_text()[:40])
        with pytest.raises(ModelFormatError):
            load_model(p)

    def test_version_mismatch(self, tmp_path):
        p = tmp_path / "m.cal"
        save_model(fit_inverse(l1_exact_table()), p)
        d = json.loads(p.read_text())
        d["version"] = 99
        p.write_text(json.dumps(d))
        with pytest.raises(ModelVersionError):
            load_model(p)

    @pytest.mark.parametrize(
        "patch", [{"degree": 7}, {"spec": "bogus"}, {"coefficients": "x"}, {"format": "other"}]
    )
    def test_malformed_fields(self, tmp_path, patch):
        p = tmp_path / "m.cal"
        save_model(fit_inverse(l1_exact_table()), p)
        d = json.loads(p.read_text())
        d.update(patch)
        p.write_text(json.dumps(d))
        with pytest.raises(ModelFormatError):
            load_model(p)
