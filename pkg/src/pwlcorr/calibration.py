"""Monte-Carlo calibration of the inverse correlator map.

A :class:`CalibrationTable` records the mean correlator score on a grid of
known correlations; :func:`fit_inverse` regresses R on score with a low
degree polynomial, and :func:`estimate_r` applies it to new data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import isotonic_regression

from .errors import (
    DegenerateInputError,
    DomainError,
    ModelFormatError,
    ModelVersionError,
    NumericError,
    SpecMismatchError,
)
from .pwl import CorrelatorSpec, batch_score, default_degree, format_spec, parse_spec
from .sampling import Family, RngStream, parse_family, sample_block
from .wht import transform_pairs

MODEL_FORMAT = "pwlcorr-calibration"
MODEL_VERSION = 1

DEFAULT_GRID = np.linspace(-0.95, 0.95, 41)
DEFAULT_N = 4096
DEFAULT_TRIALS = 200


@dataclass
class CalibrationTable:
    r_grid: np.ndarray
    mean_scores: np.ndarray
    stderr: np.ndarray
    n_per_trial: int
    trials: int
    spec: CorrelatorSpec
    used_wht: bool = False
    family: Family = Family.GAUSSIAN
    raw_scores: Optional[np.ndarray] = None

    def rows(self):
        return [
            (float(r), float(m), float(s))
            for r, m, s in zip(self.r_grid, self.mean_scores, self.stderr)
        ]


@dataclass
class CalibrationModel:
    coefficients: np.ndarray
    domain: tuple
    spec: CorrelatorSpec
    residual: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, y):
        return invert(self, y)


def score_block(xs, ys, spec: CorrelatorSpec, use_wht: bool = False):
    """Per-row correlator score of ``(trials, n)`` arrays, optionally after a WHT."""
    norm = None
    if use_wht:
        xs, ys, n = transform_pairs(xs, ys)
        norm = n
    return np.atleast_1d(batch_score(xs, ys, spec, norm_len=norm))


def build_table(
    spec: CorrelatorSpec,
    r_grid=None,
    n: int = DEFAULT_N,
    trials: int = DEFAULT_TRIALS,
    rng: Optional[RngStream] = None,
    use_wht: bool = False,
    family=Family.GAUSSIAN,
    executor=None,
) -> CalibrationTable:
    """Average ``trials`` batch scores at every grid correlation.

    Grid point ``i`` uses ``rng.substream(i)``; passing an executor with a
    ``map`` method evaluates grid points concurrently without changing output.
    """
    grid = DEFAULT_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("r_grid must be a non-empty 1-D array")
    if np.any(np.abs(grid) > 0.99):
        raise DomainError("calibration grid must lie inside [-0.99, 0.99]")
    if n < 16:
        raise DegenerateInputError(f"n must be >= 16, got {n}")
    if trials < 1:
        raise DegenerateInputError(f"trials must be >= 1, got {trials}")
    rng = RngStream(0) if rng is None else rng
    family = parse_family(family)

    def cell(i):
        xs, ys = sample_block(n, float(grid[i]), family, rng.substream(i), trials)
        return score_block(xs, ys, spec, use_wht)

    mapper = map if executor is None else executor.map
    scores = np.array(list(mapper(cell, range(grid.size))))
    raw = scores.mean(axis=1)
    se = scores.std(axis=1, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros_like(raw)
    # Monte-Carlo noise can produce small inversions; project onto monotone sequences.
    order = np.argsort(grid, kind="stable")
    clean = np.empty_like(raw)
    clean[order] = isotonic_regression(raw[order], increasing=True).x
    return CalibrationTable(
        grid.copy(), clean, se, int(n), int(trials), spec, bool(use_wht), family, raw
    )


def fit_inverse(table: CalibrationTable, degree: Optional[int] = None) -> CalibrationModel:
    """Least-squares polynomial ``R ~ P(score)`` with ascending coefficients."""
    degree = default_degree(table.spec) if degree is None else int(degree)
    if degree < 1:
        raise DegenerateInputError("degree must be >= 1")
    y = np.asarray(table.mean_scores, dtype=float)
    r = np.asarray(table.r_grid, dtype=float)
    if y.size < degree + 2:
        raise DegenerateInputError(f"need at least {degree + 2} table points for degree {degree}")
    coef, (_, rank, _, _) = P.polyfit(y, r, degree, full=True)
    if rank < degree + 1:
        raise NumericError(f"rank-deficient calibration fit (rank {rank} < {degree + 1})")
    resid = float(np.max(np.abs(P.polyval(y, coef) - r)))
    domain = (_edge(coef, y.min(), -1.0, y.max() - y.min()), _edge(coef, y.max(), 1.0, y.max() - y.min()))
    meta = {
        "n_per_trial": table.n_per_trial,
        "trials": table.trials,
        "family": table.family.value,
        "used_wht": table.used_wht,
        "grid": [float(table.r_grid.min()), float(table.r_grid.max()), int(table.r_grid.size)],
    }
    return CalibrationModel(coef, domain, table.spec, resid, meta)


def _edge(coef, y_end, target, span):
    """Extend the score domain past the last table point to where P reaches +-1.

    The table stops short of |R| = 1, so clamping at its last score would cap
    estimates near the grid edge.  The extension is kept only if P is monotone
    increasing all the way to the crossing and the crossing is within half the
    fitted span; otherwise the last table score is used.
    """
    sign = 1.0 if target > 0 else -1.0
    roots = P.polyroots(P.polysub(coef, [target]))
    real = roots[np.abs(roots.imag) < 1e-9].real
    ahead = np.sort(sign * (real - y_end))
    ahead = ahead[ahead > 0]
    if ahead.size == 0 or ahead[0] > 0.5 * span:
        return float(y_end)
    stop = y_end + sign * ahead[0]
    probe = np.linspace(y_end, stop, 64)
    if np.any(P.polyval(probe, P.polyder(coef)) <= 0):
        return float(y_end)
    return float(stop)


def calibrate(spec: CorrelatorSpec, degree=None, **kwargs) -> CalibrationModel:
    """Build a table with ``kwargs`` and fit it in one step."""
    return fit_inverse(build_table(spec, **kwargs), degree)


def invert(model: CalibrationModel, y):
    """Evaluate the inverse map with clamping on both the score and the result."""
    lo, hi = model.domain
    ya = np.clip(np.asarray(y, dtype=float), lo, hi)
    out = np.clip(P.polyval(ya, model.coefficients), -1.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _check_binding(model: CalibrationModel, spec: CorrelatorSpec):
    if model.spec != spec:
        raise SpecMismatchError(
            f"model calibrated for {format_spec(model.spec)!r} cannot estimate with {format_spec(spec)!r}"
        )


def estimate_r(xs, ys, spec: CorrelatorSpec, model: CalibrationModel, use_wht: bool = False):
    """Correlation estimate(s); 2-D input yields one estimate per row."""
    _check_binding(model, spec)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise DegenerateInputError(f"length mismatch: {xs.shape} vs {ys.shape}")
    if xs.ndim == 0 or xs.shape[-1] == 0:
        raise DegenerateInputError("estimate_r needs at least one sample pair")
    s = score_block(xs, ys, spec, use_wht)
    out = invert(model, s)
    return float(out[0]) if xs.ndim == 1 else out


def model_to_dict(model: CalibrationModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "spec": format_spec(model.spec),
        "degree": model.degree,
        "coefficients": [float(c) for c in model.coefficients],
        "domain": [float(model.domain[0]), float(model.domain[1])],
        "residual": float(model.residual),
        "meta": model.meta,
    }


def model_from_dict(d: dict) -> CalibrationModel:
    if not isinstance(d, dict) or d.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a calibration model file")
    if d.get("version") != MODEL_VERSION:
        raise ModelVersionError(
            f"unsupported model version {d.get('version')!r}, expected {MODEL_VERSION}"
        )
    try:
        coef = np.array([float(c) for c in d["coefficients"]])
        degree = int(d["degree"])
        lo, hi = (float(v) for v in d["domain"])
        spec = parse_spec(d["spec"])
        residual = float(d.get("residual", "nan"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    if degree != coef.size - 1:
        raise ModelFormatError(f"degree {degree} does not match {coef.size} coefficients")
    if not lo <= hi:
        raise ModelFormatError("model domain is reversed")
    return CalibrationModel(coef, (lo, hi), spec, residual, dict(d.get("meta") or {}))


def save_model(model: CalibrationModel, path) -> None:
    # json writes floats with repr(), which round-trips doubles exactly
    text = json.dumps(model_to_dict(model), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def load_model(path) -> CalibrationModel:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"cannot parse model file {path}: {exc}") from None
    return model_from_dict(d)
