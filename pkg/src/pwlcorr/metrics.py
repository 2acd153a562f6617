"""Cramér-Rao reference, error-standard-deviation sweeps and SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .calibration import CalibrationModel, _check_binding, invert, score_block
from .errors import DegenerateInputError, DomainError, ParameterError
from .pwl import CorrelatorSpec
from .sampling import Family, RngStream, mix_pair, parse_family, sample_block

DEFAULT_SWEEP_GRID = np.round(np.linspace(-0.9, 0.9, 19), 12)
DEFAULT_N_VALUES = tuple(2 ** k for k in range(4, 13))
BOOTSTRAP_RESAMPLES = 200


def fisher_info(r: float) -> float:
    """Per-pair Fisher information about the correlation of a standard bivariate normal."""
    if not (-1.0 < r < 1.0):
        raise DomainError(f"|r| must be < 1, got {r}")
    return (1.0 + r * r) / (1.0 - r * r) ** 2


def crb_sigma(r, n: int):
    """Lower bound on the standard deviation of an unbiased estimate from ``n`` pairs."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    ra = np.asarray(r, dtype=float)
    if np.any(np.abs(ra) >= 1.0):
        raise DomainError("|r| must be < 1")
    out = np.sqrt((1.0 - ra * ra) ** 2 / (n * (1.0 + ra * ra)))
    return float(out) if np.ndim(out) == 0 else out


def snr_db(sigma_bar: float) -> float:
    if not sigma_bar > 0:
        raise ParameterError(f"sigma_bar must be > 0, got {sigma_bar}")
    return 20.0 * math.log10(1.0 / sigma_bar)


def bootstrap_std_se(errors, resamples: int = BOOTSTRAP_RESAMPLES, rng: Optional[RngStream] = None):
    """Bootstrap standard error of the sample standard deviation."""
    e = np.asarray(errors, dtype=float)
    gen = (rng or RngStream(0)).generator()
    idx = gen.integers(0, e.size, size=(resamples, e.size))
    return float(np.std(e[idx], axis=1, ddof=1).std(ddof=1))


@dataclass
class SweepResult:
    r_grid: np.ndarray
    n_values: np.ndarray
    sigma: np.ndarray          # shape (len(n_values), len(r_grid))
    sigma_se: np.ndarray       # bootstrap SE of each sigma
    bias: np.ndarray           # mean(R_hat - R)
    crb_sigma: np.ndarray
    snr_db: np.ndarray         # one per N
    spec: CorrelatorSpec
    family: Family
    trials: int
    seed: int = 0
    use_wht: bool = False
    meta: dict = field(default_factory=lambda: {"sigma_bar_weighting": "uniform over r_grid"})

    def rows(self):
        out = []
        for i, n in enumerate(self.n_values):
            for j, r in enumerate(self.r_grid):
                out.append((
                    str(self.spec), self.family.value, float(r), int(n),
                    float(self.sigma[i, j]), float(self.crb_sigma[i, j]),
                    float(self.snr_db[i]), int(self.trials), int(self.seed),
                ))
        return out

    HEADER = ("spec", "family", "R", "N", "sigma", "crb", "snr_db", "trials", "seed")


def error_std_sweep(
    spec: CorrelatorSpec,
    model: CalibrationModel,
    family=Family.GAUSSIAN,
    r_grid=None,
    n: int = 256,
    trials: int = 1000,
    rng: Optional[RngStream] = None,
    use_wht: bool = False,
    executor=None,
) -> SweepResult:
    """Standard deviation of ``R_hat - R`` at each grid correlation for one N."""
    _check_binding(model, spec)
    grid = DEFAULT_SWEEP_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    if trials < 2:
        raise DegenerateInputError("error_std_sweep needs at least 2 trials")
    if np.any(np.abs(grid) >= 1.0):
        raise DomainError("sweep grid must lie inside (-1, 1)")
    rng = RngStream(0) if rng is None else rng
    family = parse_family(family)

    def cell(j):
        r = float(grid[j])
        xs, ys = sample_block(n, r, family, rng.substream(j), trials)
        err = invert(model, score_block(xs, ys, spec, use_wht)) - r
        se = bootstrap_std_se(err, rng=rng.substream(j, trials))
        return err.std(ddof=1), se, err.mean()

    mapper = map if executor is None else executor.map
    cells = np.array(list(mapper(cell, range(grid.size))))
    sigma = cells[:, 0]
    return SweepResult(
        r_grid=grid.copy(),
        n_values=np.array([n]),
        sigma=sigma[None, :],
        sigma_se=cells[None, :, 1],
        bias=cells[None, :, 2],
        crb_sigma=crb_sigma(grid, n)[None, :],
        snr_db=np.array([snr_db(sigma.mean())]),
        spec=spec,
        family=family,
        trials=int(trials),
        seed=rng.seed,
        use_wht=use_wht,
    )


def snr_sweep(
    spec: CorrelatorSpec,
    model: CalibrationModel,
    family=Family.GAUSSIAN,
    n_values: Sequence[int] = DEFAULT_N_VALUES,
    trials: int = 400,
    rng: Optional[RngStream] = None,
    r_grid=None,
    use_wht: bool = False,
    executor=None,
) -> SweepResult:
    """Error sweeps over several N; SNR uses the uniform mean of sigma over the grid."""
    rng = RngStream(0) if rng is None else rng
    rows = [
        error_std_sweep(spec, model, family, r_grid, int(n), trials, rng.substream(k),
                        use_wht, executor)
        for k, n in enumerate(n_values)
    ]
    return SweepResult(
        r_grid=rows[0].r_grid,
        n_values=np.array([int(n) for n in n_values]),
        sigma=np.vstack([s.sigma for s in rows]),
        sigma_se=np.vstack([s.sigma_se for s in rows]),
        bias=np.vstack([s.bias for s in rows]),
        crb_sigma=np.vstack([s.crb_sigma for s in rows]),
        snr_db=np.concatenate([s.snr_db for s in rows]),
        spec=spec,
        family=rows[0].family,
        trials=int(trials),
        seed=rng.seed,
        use_wht=use_wht,
    )


def empirical_product_variance(r: float, family=Family.GAUSSIAN, pairs: int = 10 ** 6,
                               rng: Optional[RngStream] = None) -> float:
    """Monte-Carlo variance of the single-pair product ``x*y``."""
    rng = RngStream(0) if rng is None else rng
    x, y = mix_pair(rng.generator(), r, family, pairs)
    return float(np.var(x * y, ddof=1))
