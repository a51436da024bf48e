"""General grey numbers (kernel + greyness), interval grey numbers and metrics.

A general grey number (GGN) summarises a union of intervals by a kernel, the
most representative crisp value, and a greyness, the normalised width of the
uncertainty.  Interval grey numbers (IGN) are single intervals and are what the
interval-valued engine iterates on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

EQ_TOL = 1e-9
# below this |kernel| the greyness formula switches to its zero-kernel form
ZERO_KERNEL_TOL = 1e-12


def _finite(x, what):
    if not math.isfinite(x):
        raise ValueError(f"{what} must be finite, got {x!r}")


@dataclass(frozen=True)
class GreyDomain:
    """Background domain Omega = [lower, upper] used to normalise widths."""

    lower: float = -1.0
    upper: float = 1.0

    def __post_init__(self):
        _finite(self.lower, "domain lower")
        _finite(self.upper, "domain upper")
        if not self.upper > self.lower:
            raise ValueError(f"domain measure must be > 0, got [{self.lower}, {self.upper}]")

    @property
    def measure(self) -> float:
        return self.upper - self.lower


SIGNED_DOMAIN = GreyDomain(-1.0, 1.0)
UNIT_DOMAIN = GreyDomain(0.0, 1.0)


@dataclass(frozen=True)
class IGN:
    """Closed interval [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        _finite(self.lower, "interval lower")
        _finite(self.upper, "interval upper")
        if self.lower > self.upper:
            raise ValueError(f"interval lower {self.lower} exceeds upper {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def __add__(self, other: "IGN") -> "IGN":
        return ign_add(self, other)

    def __mul__(self, other: "IGN") -> "IGN":
        return ign_mul(self, other)


def ign_add(a: IGN, b: IGN) -> IGN:
    return IGN(a.lower + b.lower, a.upper + b.upper)


def ign_mul(a: IGN, b: IGN) -> IGN:
    """Interval product: hull of the four boundary products."""
    p = (a.lower * b.lower, a.lower * b.upper, a.upper * b.lower, a.upper * b.upper)
    return IGN(min(p), max(p))


@dataclass(frozen=True)
class GGN:
    """General grey number written kernel_{greyness}."""

    kernel: float
    greyness: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kernel", float(self.kernel))
        object.__setattr__(self, "greyness", float(self.greyness))
        _finite(self.kernel, "kernel")
        _finite(self.greyness, "greyness")
        if self.greyness < 0:
            raise ValueError(f"greyness must be >= 0, got {self.greyness}")

    @property
    def is_crisp(self) -> bool:
        return self.greyness == 0.0

    def __add__(self, other):
        return ggn_add(self, _as_ggn(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ggn_sub(self, _as_ggn(other))

    def __rsub__(self, other):
        return ggn_sub(_as_ggn(other), self)

    def __mul__(self, other):
        if isinstance(other, GGN):
            return ggn_mul(self, other)
        return ggn_scalar_mul(other, self)

    def __rmul__(self, other):
        return ggn_scalar_mul(other, self)

    def __truediv__(self, other):
        return ggn_div(self, _as_ggn(other))

    def __pow__(self, k):
        return ggn_pow(self, k)

    def __neg__(self):
        return ggn_scalar_mul(-1.0, self)

    def __str__(self):
        return f"{self.kernel:g}_{{{self.greyness:g}}}"


def _as_ggn(x) -> GGN:
    return x if isinstance(x, GGN) else GGN(float(x), 0.0)


def ggn_eq(a: GGN, b: GGN, tol: float = EQ_TOL) -> bool:
    """Equality of kernels and greynesses up to an absolute tolerance."""
    return abs(a.kernel - b.kernel) <= tol and abs(a.greyness - b.greyness) <= tol


def _sum_greyness(a: GGN, b: GGN) -> float:
    # greyness of a sum or difference is weighted by kernel magnitudes;
    # two zero kernels share the weight equally
    s = abs(a.kernel) + abs(b.kernel)
    if s == 0.0:
        return 0.5 * a.greyness + 0.5 * b.greyness
    w2 = abs(b.kernel) / s
    return a.greyness + w2 * (b.greyness - a.greyness)


def ggn_add(a: GGN, b: GGN) -> GGN:
    return GGN(a.kernel + b.kernel, _sum_greyness(a, b))


def ggn_sub(a: GGN, b: GGN) -> GGN:
    return GGN(a.kernel - b.kernel, _sum_greyness(a, b))


def ggn_scalar_mul(k: float, g: GGN) -> GGN:
    _finite(float(k), "scalar")
    return GGN(k * g.kernel, g.greyness)


def ggn_mul(a: GGN, b: GGN) -> GGN:
    return GGN(a.kernel * b.kernel, max(a.greyness, b.greyness))


def ggn_div(a: GGN, b: GGN) -> GGN:
    if b.kernel == 0.0:
        raise ZeroDivisionError("division by a grey number with zero kernel")
    return GGN(a.kernel / b.kernel, max(a.greyness, b.greyness))


def ggn_inv(a: GGN) -> GGN:
    if a.kernel == 0.0:
        raise ZeroDivisionError("inverse of a grey number with zero kernel")
    return GGN(1.0 / a.kernel, a.greyness)


def ggn_pow(a: GGN, k: float) -> GGN:
    return GGN(a.kernel ** k, a.greyness)


def _to_interval(x) -> IGN:
    if isinstance(x, IGN):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return IGN(x, x)
    lo, hi = x
    return IGN(lo, hi)


def ggn_from_intervals(
    intervals: Iterable,
    probs: Sequence[float] | None = None,
    domain: GreyDomain = SIGNED_DOMAIN,
) -> GGN:
    """Collapse a union of intervals into a GGN.

    The kernel is the mean of the interval midpoints, or their probability
    weighted mean when `probs` is given.  The greyness is

        (1/|k|) * sum_i |m_i| * width_i / mu(Omega)

    with m_i the midpoints.  For a zero kernel the prefactor is undefined and
    the plain sum of widths over mu(Omega) is used instead.

    Items of `intervals` may be IGN, (lower, upper) pairs or bare numbers
    (degenerate intervals).
    """
    ivs = [_to_interval(x) for x in intervals]
    if not ivs:
        raise ValueError("at least one interval is required")
    for iv in ivs:
        if iv.lower < domain.lower or iv.upper > domain.upper:
            raise ValueError(
                f"interval [{iv.lower}, {iv.upper}] lies outside the domain "
                f"[{domain.lower}, {domain.upper}]"
            )
    mids = np.array([iv.midpoint for iv in ivs])
    widths = np.array([iv.width for iv in ivs])
    if probs is None:
        kernel = float(mids.mean())
    else:
        p = np.asarray(probs, dtype=float)
        if p.shape != mids.shape:
            raise ValueError("probs must have one entry per interval")
        if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be positive and sum to 1")
        kernel = float(p @ mids)
    if len(ivs) == 1:
        # the |m|/|k| factor cancels exactly for a single interval
        grey = float(widths[0]) / domain.measure
    elif abs(kernel) < ZERO_KERNEL_TOL:
        grey = float(widths.sum()) / domain.measure
    else:
        grey = float(np.abs(mids) @ widths) / domain.measure / abs(kernel)
    return GGN(kernel, grey)


def metric_d2(a: GGN, b: GGN) -> float:
    """Distance between two GGNs: Euclidean over (kernel, greyness)."""
    return math.hypot(a.kernel - b.kernel, a.greyness - b.greyness)


class GGNVector:
    """Fixed-length vector of GGNs held as two float arrays.

    Indexing yields GGN values; the arrays are read-only so instances can be
    shared freely.
    """

    __slots__ = ("kernels", "greyness")

    def __init__(self, kernels, greyness=None):
        k = np.array(kernels, dtype=float).reshape(-1)
        g = np.zeros_like(k) if greyness is None else np.array(greyness, dtype=float).reshape(-1)
        if k.size < 1:
            raise ValueError("a grey vector needs at least one element")
        if g.shape != k.shape:
            raise ValueError("kernels and greyness must have the same length")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(g))):
            raise ValueError("kernels and greyness must be finite")
        if np.any(g < 0):
            raise ValueError("greyness must be >= 0")
        k.flags.writeable = False
        g.flags.writeable = False
        self.kernels = k
        self.greyness = g

    @classmethod
    def _trusted(cls, kernels: np.ndarray, greyness: np.ndarray) -> "GGNVector":
        # engine-internal constructor for arrays already known to be valid
        v = cls.__new__(cls)
        kernels.flags.writeable = False
        greyness.flags.writeable = False
        v.kernels = kernels
        v.greyness = greyness
        return v

    @classmethod
    def from_ggns(cls, elements: Iterable[GGN]) -> "GGNVector":
        el = list(elements)
        return cls([e.kernel for e in el], [e.greyness for e in el])

    def __len__(self):
        return self.kernels.size

    def __getitem__(self, i) -> GGN:
        return GGN(self.kernels[i], self.greyness[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def elements(self) -> list:
        return list(self)

    def __eq__(self, other):
        if not isinstance(other, GGNVector):
            return NotImplemented
        return np.array_equal(self.kernels, other.kernels) and np.array_equal(
            self.greyness, other.greyness
        )

    def __repr__(self):
        return f"GGNVector({self.kernels.tolist()}, {self.greyness.tolist()})"


def metric_d(x, y) -> float:
    """Vector distance: root of the summed squared component distances."""
    if not isinstance(x, GGNVector):
        x = GGNVector.from_ggns(x)
    if not isinstance(y, GGNVector):
        y = GGNVector.from_ggns(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    dk = x.kernels - y.kernels
    dg = x.greyness - y.greyness
    return float(math.sqrt(float(dk @ dk + dg @ dg)))


class GGNMatrix:
    """Square matrix of GGNs stored as kernel and greyness arrays."""

    __slots__ = ("kernels", "greyness")

    def __init__(self, kernels, greyness=None):
        k = np.array(kernels, dtype=float)
        g = np.zeros_like(k) if greyness is None else np.array(greyness, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] < 1:
            raise ValueError(f"weight matrix must be square and non-empty, got shape {k.shape}")
        if g.shape != k.shape:
            raise ValueError("kernel and greyness matrices differ in shape")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(g))):
            raise ValueError("weights must be finite")
        if np.any(g < 0):
            raise ValueError("weight greyness must be >= 0")
        k.flags.writeable = False
        g.flags.writeable = False
        self.kernels = k
        self.greyness = g

    @property
    def n(self) -> int:
        return self.kernels.shape[0]

    def __getitem__(self, ij) -> GGN:
        i, j = ij
        return GGN(self.kernels[i, j], self.greyness[i, j])

    def __eq__(self, other):
        if not isinstance(other, GGNMatrix):
            return NotImplemented
        return np.array_equal(self.kernels, other.kernels) and np.array_equal(
            self.greyness, other.greyness
        )

    def __repr__(self):
        return f"GGNMatrix(n={self.n})"


class IntervalArray:
    """Array of intervals (vector or matrix) as parallel lower/upper arrays."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lo = np.array(lower, dtype=float)
        hi = np.array(upper, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in shape")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("interval bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("interval lower bound exceeds upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lower = lo
        self.upper = hi

    @classmethod
    def crisp(cls, values) -> "IntervalArray":
        v = np.asarray(values, dtype=float)
        return cls(v, v)

    @property
    def shape(self):
        return self.lower.shape

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def __getitem__(self, idx) -> IGN:
        return IGN(self.lower[idx], self.upper[idx])

    def to_ggn(self, domain: GreyDomain) -> tuple[np.ndarray, np.ndarray]:
        """Kernels and greynesses of the single-interval entries."""
        k = self.midpoint
        g = self.width / domain.measure
        return k, g

    def __eq__(self, other):
        if not isinstance(other, IntervalArray):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __repr__(self):
        return f"IntervalArray(shape={self.shape})"
