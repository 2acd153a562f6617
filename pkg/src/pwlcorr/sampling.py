"""Correlated sample pairs with deterministic, counter-based seeding.

Two independent standardized sources ``s1, s2`` are mixed as
``x = s1, y = r*s1 + sqrt(1 - r^2)*s2`` which gives population correlation
exactly ``r`` for any source family with zero mean and unit variance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateInputError, DomainError, ParameterError

_SQRT3 = math.sqrt(3.0)
GAMMA_SHAPE = 2.0


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    GAMMA = "gamma"
    MIXED = "mixed"


def parse_family(value) -> Family:
    if isinstance(value, Family):
        return value
    try:
        return Family(str(value).strip().lower())
    except ValueError:
        raise ParameterError(f"unknown family {value!r}") from None


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_index, *path)``.

    Streams are built on the counter-based Philox generator; two streams with
    different keys are statistically independent and can be consumed in any
    order or concurrently.
    """

    seed: int
    stream_index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ParameterError("seed must be an unsigned 64-bit integer")
        if int(self.stream_index) < 0:
            raise ParameterError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_index), *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, *index: int) -> "RngStream":
        """Child stream for one Monte-Carlo cell."""
        return RngStream(self.seed, self.stream_index, self.path + tuple(int(i) for i in index))


@dataclass
class SampleBatch:
    xs: np.ndarray
    ys: np.ndarray
    family: Family
    true_r: float
    seed: int
    stream_index: int = 0
    # set by the WHT front-end when zero padding was applied
    original_len: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise DegenerateInputError("xs and ys must be 1-D vectors of equal length")
        self.family = parse_family(self.family)

    def __len__(self):
        return self.xs.size

    @property
    def norm_len(self) -> int:
        return self.original_len if self.original_len is not None else self.xs.size


def draw_sources(gen: np.random.Generator, family: Family, size) -> np.ndarray:
    """Zero-mean, unit-variance iid draws from ``family``."""
    family = parse_family(family)
    if family is Family.GAUSSIAN:
        return gen.standard_normal(size)
    if family is Family.UNIFORM:
        return gen.uniform(-_SQRT3, _SQRT3, size)
    if family is Family.GAMMA:
        return (gen.gamma(GAMMA_SHAPE, 1.0, size) - GAMMA_SHAPE) / math.sqrt(GAMMA_SHAPE)
    raise ParameterError(f"draw_sources has no single-source rule for {family.value}")


def mix_pair(gen: np.random.Generator, r: float, family: Family, size):
    """Draw ``(x, y)`` arrays of shape ``size`` with population correlation ``r``."""
    if not (-1.0 <= r <= 1.0):
        raise DomainError(f"|r| must be <= 1, got {r}")
    family = parse_family(family)
    if family is Family.MIXED:
        s1 = draw_sources(gen, Family.UNIFORM, size)
        s2 = (draw_sources(gen, Family.GAUSSIAN, size) + draw_sources(gen, Family.GAMMA, size))
        s2 /= math.sqrt(2.0)
    else:
        s1 = draw_sources(gen, family, size)
        s2 = draw_sources(gen, family, size)
    q = math.sqrt(max(0.0, 1.0 - r * r))
    return s1, r * s1 + q * s2


def _check_n(n):
    if int(n) < 1:
        raise DegenerateInputError(f"n must be >= 1, got {n}")
    return int(n)


def sample_bivariate_gaussian(n: int, r: float, rng: RngStream) -> SampleBatch:
    n = _check_n(n)
    xs, ys = mix_pair(rng.generator(), r, Family.GAUSSIAN, n)
    return SampleBatch(xs, ys, Family.GAUSSIAN, float(r), rng.seed, rng.stream_index)


def sample_nongaussian(n: int, r: float, family, rng: RngStream) -> SampleBatch:
    """Sample pairs from any supported family (Gaussian included)."""
    n = _check_n(n)
    family = parse_family(family)
    xs, ys = mix_pair(rng.generator(), r, family, n)
    return SampleBatch(xs, ys, family, float(r), rng.seed, rng.stream_index)


def sample_pairs(n: int, r: float, family, rng: RngStream) -> SampleBatch:
    family = parse_family(family)
    if family is Family.GAUSSIAN:
        return sample_bivariate_gaussian(n, r, rng)
    return sample_nongaussian(n, r, family, rng)


def sample_block(n: int, r: float, family, rng: RngStream, trials: int):
    """Stack ``trials`` independent batches into ``(trials, n)`` arrays.

    Trial ``t`` draws from ``rng.substream(t)`` so the block is identical no
    matter how trials are later split across workers.
    """
    n = _check_n(n)
    xs = np.empty((trials, n))
    ys = np.empty((trials, n))
    for t in range(trials):
        xs[t], ys[t] = mix_pair(rng.substream(t).generator(), r, family, n)
    return xs, ys


def standardize(v) -> np.ndarray:
    """Subtract the sample mean and divide by the population (1/N) standard deviation."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DegenerateInputError("standardize needs a 1-D vector of length >= 2")
    c = v - v.mean()
    sd = math.sqrt(np.mean(c * c))
    if sd == 0.0 or not math.isfinite(sd):
        raise DegenerateInputError("cannot standardize a constant vector")
    return c / sd
