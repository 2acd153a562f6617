"""Piecewise-linear generating functions and the correlator family built on them.

Every nonlinear correlator here has the form ``f(x, y) = h(x + y) - h(x - y)``
with an even function ``h``.  The functions accept scalars or numpy arrays
and broadcast like ufuncs; scalar input returns a Python float.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, ParameterError

_WEIGHT_SUM_TOL = 1e-12


def _out(value, like):
    if np.ndim(like) == 0 and np.ndim(value) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class PwlMixture:
    """Weights and offsets of ``h(x) = 1/2 sum_l w_l (|x - a_l| + |x + a_l|)``."""

    weights: tuple
    offsets: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(self.weights, dtype=float)))
        a = tuple(float(v) for v in np.atleast_1d(np.asarray(self.offsets, dtype=float)))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "offsets", a)
        self.validate()

    def validate(self):
        w = np.asarray(self.weights)
        a = np.asarray(self.offsets)
        if len(w) == 0 or len(w) != len(a):
            raise ParameterError(
                f"weights and offsets must be non-empty and equal length, got {len(w)} and {len(a)}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(a))):
            raise ParameterError("mixture parameters must be finite")
        if np.any(w < 0):
            raise ParameterError("mixture weights must be non-negative")
        if abs(w.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ParameterError(f"mixture weights must sum to 1, got {w.sum()!r}")
        if np.any(a < 0):
            raise ParameterError("mixture offsets must be non-negative")

    def __len__(self):
        return len(self.weights)

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights)

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.offsets)

    @classmethod
    def single(cls, alpha: float = 0.0) -> "PwlMixture":
        return cls((1.0,), (alpha,))

    @classmethod
    def uniform_ramp(cls, n_terms: int, c: float) -> "PwlMixture":
        """Equal weights with offsets ``c*l/L``; approaches a scaled product correlator."""
        if n_terms < 1 or c <= 0:
            raise ParameterError("uniform_ramp needs n_terms >= 1 and c > 0")
        w = np.full(n_terms, 1.0 / n_terms)
        # renormalise so the float sum is as close to 1 as rounding allows
        w[-1] = 1.0 - w[:-1].sum()
        a = c * np.arange(1, n_terms + 1) / n_terms
        return cls(tuple(w), tuple(a))


class Kind(str, enum.Enum):
    EMPIRICAL = "empirical"
    LINEAR_RECTIFIER = "l1"
    MP = "mp"
    HUBER = "huber"
    LSE = "lse"
    MIXTURE = "mix"


_KIND_ALIASES = {
    "empirical": Kind.EMPIRICAL,
    "emp": Kind.EMPIRICAL,
    "l2": Kind.EMPIRICAL,
    "l1": Kind.LINEAR_RECTIFIER,
    "lr": Kind.LINEAR_RECTIFIER,
    "linear-rectifier": Kind.LINEAR_RECTIFIER,
    "mp": Kind.MP,
    "huber": Kind.HUBER,
    "lse": Kind.LSE,
    "mix": Kind.MIXTURE,
    "mixture": Kind.MIXTURE,
}


@dataclass(frozen=True)
class CorrelatorSpec:
    """Tagged choice of correlator family plus exactly the parameters it needs."""

    kind: Kind
    gamma: Optional[float] = None
    delta: Optional[float] = None
    a: Optional[float] = None
    mixture: Optional[PwlMixture] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for name in ("gamma", "delta", "a"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, float(v))
        self.validate()

    def validate(self):
        required = {
            Kind.EMPIRICAL: (),
            Kind.LINEAR_RECTIFIER: (),
            Kind.MP: ("gamma",),
            Kind.HUBER: ("delta",),
            Kind.LSE: ("a",),
            Kind.MIXTURE: ("mixture",),
        }[self.kind]
        for name in ("gamma", "delta", "a", "mixture"):
            present = getattr(self, name) is not None
            if present != (name in required):
                state = "requires" if name in required else "does not take"
                raise ParameterError(f"{self.kind.value} correlator {state} parameter {name!r}")
        if self.gamma is not None and not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if self.delta is not None and not (self.delta > 0 and math.isfinite(self.delta)):
            raise ParameterError(f"delta must be > 0, got {self.delta}")
        if self.a is not None and not (self.a > 0 and math.isfinite(self.a)):
            raise ParameterError(f"a must be > 0, got {self.a}")
        if self.mixture is not None:
            if not isinstance(self.mixture, PwlMixture):
                raise ParameterError("mixture must be a PwlMixture")

    # constructors
    @classmethod
    def empirical(cls):
        return cls(Kind.EMPIRICAL)

    @classmethod
    def linear_rectifier(cls):
        return cls(Kind.LINEAR_RECTIFIER)

    @classmethod
    def mp(cls, gamma):
        return cls(Kind.MP, gamma=gamma)

    @classmethod
    def huber(cls, delta):
        return cls(Kind.HUBER, delta=delta)

    @classmethod
    def lse(cls, a):
        return cls(Kind.LSE, a=a)

    @classmethod
    def from_mixture(cls, weights, offsets):
        return cls(Kind.MIXTURE, mixture=PwlMixture(weights, offsets))

    def h(self, x):
        """The generating function for this spec (not defined for Empirical)."""
        if self.kind is Kind.LINEAR_RECTIFIER:
            return _out(np.abs(np.asarray(x, dtype=float)), x)
        if self.kind is Kind.MP:
            return mp_h(x, self.gamma)
        if self.kind is Kind.HUBER:
            return huber_h(x, self.delta)
        if self.kind is Kind.LSE:
            return lse_h(x, self.a)
        if self.kind is Kind.MIXTURE:
            return pwl_h(x, self.mixture)
        raise ParameterError("the empirical correlator has no generating function")

    def as_mixture(self) -> Optional[PwlMixture]:
        """Equivalent piecewise-linear mixture, or None when none exists."""
        if self.kind is Kind.LINEAR_RECTIFIER:
            return PwlMixture.single(0.0)
        if self.kind is Kind.MP:
            return PwlMixture.single(0.5 * self.gamma)
        if self.kind is Kind.MIXTURE:
            return self.mixture
        return None

    def descriptor(self) -> str:
        return format_spec(self)

    def __str__(self):
        return format_spec(self)


def _fmt(v: float) -> str:
    return repr(float(v))


def format_spec(spec: CorrelatorSpec) -> str:
    """Compact string form, e.g. ``mp:gamma=1.45`` or ``mix:w=0.5,0.5;alpha=0.0,2.0``."""
    k = spec.kind
    if k in (Kind.EMPIRICAL, Kind.LINEAR_RECTIFIER):
        return k.value
    if k is Kind.MP:
        return f"mp:gamma={_fmt(spec.gamma)}"
    if k is Kind.HUBER:
        return f"huber:delta={_fmt(spec.delta)}"
    if k is Kind.LSE:
        return f"lse:a={_fmt(spec.a)}"
    w = ",".join(_fmt(v) for v in spec.mixture.weights)
    a = ",".join(_fmt(v) for v in spec.mixture.offsets)
    return f"mix:w={w};alpha={a}"


def parse_spec(text: str) -> CorrelatorSpec:
    """Inverse of :func:`format_spec`; also accepts a few kind aliases."""
    text = text.strip()
    head, _, rest = text.partition(":")
    kind = _KIND_ALIASES.get(head.strip().lower())
    if kind is None:
        raise ParameterError(f"unknown correlator kind {head!r}")
    params = {}
    if rest:
        sep = ";" if kind is Kind.MIXTURE else ","
        for item in rest.split(sep):
            if not item.strip():
                continue
            key, eq, value = item.partition("=")
            if not eq:
                raise ParameterError(f"malformed parameter {item!r} in {text!r}")
            params[key.strip().lower()] = value.strip()
    try:
        if kind is Kind.MIXTURE:
            w = [float(v) for v in params.pop("w").split(",")]
            a = [float(v) for v in params.pop("alpha").split(",")]
            spec = CorrelatorSpec.from_mixture(w, a)
        else:
            names = {Kind.MP: "gamma", Kind.HUBER: "delta", Kind.LSE: "a"}
            kwargs = {}
            if kind in names:
                kwargs[names[kind]] = float(params.pop(names[kind]))
            spec = CorrelatorSpec(kind, **kwargs)
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc.args[0]!r} in {text!r}") from None
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad number in {text!r}: {exc}") from None
    if params:
        raise ParameterError(f"unexpected parameters {sorted(params)} in {text!r}")
    return spec


def pwl_h(x, m: PwlMixture):
    """Evaluate the piecewise-linear mixture ``h`` at ``x``."""
    if not isinstance(m, PwlMixture):
        raise ParameterError("pwl_h needs a PwlMixture")
    xa = np.asarray(x, dtype=float)
    w, a = m.w, m.alpha
    # |x - a| + |x + a| == 2 * max(|x|, a) for a >= 0, without the rounding
    ax = np.abs(xa)
    if len(w) == 1:
        out = w[0] * np.maximum(ax, a[0])
    else:
        out = (np.maximum(ax[..., None], a) * w).sum(axis=-1)
    return _out(out, x)


def huber_h(x, delta: float):
    """Huber function: quadratic inside ``|x| < delta``, linear outside."""
    if not delta > 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.where(ax < delta, 0.5 * ax * ax / delta, ax - 0.5 * delta)
    return _out(out, x)


def lse_h(x, a: float):
    """Smooth absolute value ``log(exp(a x) + exp(-a x)) / a`` in overflow-safe form."""
    if not a > 0:
        raise ParameterError(f"a must be > 0, got {a}")
    ax = np.abs(np.asarray(x, dtype=float))
    out = ax + np.log1p(np.exp(-2.0 * a * ax)) / a
    return _out(out, x)


def mp_h(x, gamma: float):
    """Margin-propagation output z solving ``(x - z)+ + (-x - z)+ = gamma``."""
    if not gamma >= 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.where(ax >= 0.5 * gamma, ax - gamma, -0.5 * gamma)
    return _out(out, x)


def correlator_f(x, y, spec: CorrelatorSpec):
    """Per-sample correlator score; ``x*y`` for Empirical, else ``h(x+y) - h(x-y)``."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if spec.kind is Kind.EMPIRICAL:
        out = xa * ya
    elif spec.kind is Kind.LINEAR_RECTIFIER:
        out = np.abs(xa + ya) - np.abs(xa - ya)
    else:
        out = spec.h(xa + ya) - spec.h(xa - ya)
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(out)
    return out


def batch_score(xs, ys, spec: CorrelatorSpec, norm_len: Optional[int] = None):
    """Mean correlator score over the last axis.

    2-D input scores each row independently.  ``norm_len`` overrides the
    divisor; zero-padded transformed batches pass their original length.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise DegenerateInputError(f"length mismatch: {xs.shape} vs {ys.shape}")
    if xs.ndim == 0 or xs.shape[-1] == 0:
        raise DegenerateInputError("batch_score needs at least one sample pair")
    total = correlator_f(xs, ys, spec).sum(axis=-1)
    n = xs.shape[-1] if norm_len is None else int(norm_len)
    if n < 1:
        raise DegenerateInputError("norm_len must be >= 1")
    out = total / n
    return float(out) if np.ndim(out) == 0 else out


DEFAULT_SPECS: Sequence[CorrelatorSpec] = (
    CorrelatorSpec.empirical(),
    CorrelatorSpec.linear_rectifier(),
    CorrelatorSpec.mp(1.45),
    CorrelatorSpec.huber(1.4),
    CorrelatorSpec.lse(1.0),
)


def default_degree(spec: CorrelatorSpec) -> int:
    """Calibration polynomial degree: quintic for MP, quartic otherwise."""
    return 5 if spec.kind is Kind.MP else 4
