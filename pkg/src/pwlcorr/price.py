"""Expected correlator output g(R) under jointly Gaussian inputs.

The slope of g follows from Price's theorem and is available in closed form
for any piecewise-linear mixture; g itself is a one-dimensional integral of
that slope.  Both endpoint singularities ``1/sqrt(1 -+ rho)`` are removed by
the substitutions ``s = sqrt(1 + rho)`` and ``t = sqrt(1 - rho)``, after which

    g(R) = 2/sqrt(pi) * ( int_1^sqrt(1+R) K(s) ds + int_sqrt(1-R)^1 K(t) dt )

with the smooth kernel ``K(u) = sum_l w_l exp(-alpha_l^2 / (4 u^2))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError, ParameterError
from .pwl import PwlMixture

QUAD_ABS_TOL = 1e-9
_SQRT_PI = math.sqrt(math.pi)


def _check_open(r):
    if not (-1.0 < r < 1.0):
        raise DomainError(f"R must lie in the open interval (-1, 1), got {r}")


def _kernel(u, m: PwlMixture):
    u = np.asarray(u, dtype=float)
    a2 = m.alpha ** 2
    if not np.any(a2):
        return np.ones_like(u)
    with np.errstate(divide="ignore", over="ignore"):
        e = np.exp(-a2 / (4.0 * u[..., None] ** 2))
    return (e * m.w).sum(axis=-1)


def dg_dR(r: float, m: PwlMixture) -> float:
    """Slope of the expected correlator output at correlation ``r``."""
    _check_open(r)
    w, a2 = m.w, m.alpha ** 2
    plus = np.sum(w * np.exp(-a2 / (4.0 * (1.0 + r)))) / math.sqrt(math.pi * (1.0 + r))
    minus = np.sum(w * np.exp(-a2 / (4.0 * (1.0 - r)))) / math.sqrt(math.pi * (1.0 - r))
    return float(plus + minus)


def _quad(m, lo, hi, epsabs):
    if lo == hi:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            lambda u: float(_kernel(u, m)), lo, hi, epsabs=epsabs, epsrel=0.0,
            limit=200, full_output=True,
        )[:3]
    if err > epsabs or (len(info) and info.get("ier", 0)):
        raise NumericError(
            f"quadrature on [{lo}, {hi}] reached error {err:.3g} > {epsabs:.3g}", achieved=err
        )
    return val


def _g_between(r0, r1, m, epsabs):
    # each half carries half of the error budget
    s = _quad(m, math.sqrt(1.0 + r0), math.sqrt(1.0 + r1), 0.5 * epsabs)
    t = _quad(m, math.sqrt(1.0 - r1), math.sqrt(1.0 - r0), 0.5 * epsabs)
    return 2.0 / _SQRT_PI * (s + t)


def g_of_R(r: float, m: PwlMixture, epsabs: float = QUAD_ABS_TOL) -> float:
    """Expected correlator output at correlation ``r`` for mixture ``m``."""
    _check_open(r)
    if r == 0.0:
        return 0.0
    return _g_between(0.0, r, m, epsabs / _SQRT_PI)


def g_l1_closed(r):
    """Closed form for the linear rectifier correlator ``|x+y| - |x-y|``."""
    ra = np.asarray(r, dtype=float)
    if not np.all(np.abs(ra) <= 1.0):
        raise DomainError(f"R must lie in [-1, 1], got {r}")
    out = 2.0 / _SQRT_PI * (np.sqrt(1.0 + ra) - np.sqrt(1.0 - ra))
    return float(out) if out.ndim == 0 else out


def g_l2_closed(r: float, c: float) -> float:
    """Expected output ``2R/c`` of the product correlator scaled by ``2/c``."""
    if not c > 0:
        raise ParameterError(f"c must be > 0, got {c}")
    return 2.0 * r / c


def l1_quartic_identity(y: float) -> float:
    """Squared correlation recovered from a linear rectifier output ``y``."""
    ymax = g_l1_closed(1.0)
    # allow one ulp of slack so y = g_l1_closed(+-1) is accepted
    if abs(y) > ymax * (1.0 + 4 * np.finfo(float).eps):
        raise DomainError(f"|y| must be <= {ymax}, got {y}")
    y2 = y * y
    return math.pi / 4.0 * y2 - math.pi ** 2 / 64.0 * y2 * y2


@dataclass(frozen=True)
class GCurve:
    r_grid: np.ndarray
    g_values: np.ndarray
    mixture: PwlMixture

    def __call__(self, r):
        return np.interp(r, self.r_grid, self.g_values)

    def rows(self):
        return [(float(r), float(g)) for r, g in zip(self.r_grid, self.g_values)]


def default_grid(points: int = 199, edge: float = 0.99) -> np.ndarray:
    return np.linspace(-edge, edge, points)


def build_gcurve(m: PwlMixture, r_grid=None, epsabs: float = QUAD_ABS_TOL) -> GCurve:
    """Tabulate g on a sorted grid, integrating only between neighbouring points.

    The walk starts at 0 and moves outward in both directions, so each
    grid value costs one short quadrature and errors accumulate at most
    linearly in the number of steps.
    """
    grid = default_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("r_grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("r_grid must be strictly increasing")
    if grid[0] <= -1.0 or grid[-1] >= 1.0:
        raise DomainError("r_grid must lie strictly inside (-1, 1)")

    per_step = epsabs / (_SQRT_PI * max(1, grid.size))
    g = np.empty_like(grid)
    pos = np.flatnonzero(grid >= 0)
    neg = np.flatnonzero(grid < 0)[::-1]
    for idx in (pos, neg):
        prev_r, acc = 0.0, 0.0
        for i in idx:
            acc += _g_between(prev_r, grid[i], m, per_step) if grid[i] != prev_r else 0.0
            g[i] = acc
            prev_r = grid[i]
    return GCurve(grid, g, m)
