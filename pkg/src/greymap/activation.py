"""Sigmoid and tanh activations on reals, intervals and grey numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from greymap.grey_core import GGN, IGN


class Kind(str, Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"


@dataclass(frozen=True)
class ActivationKind:
    """Activation family plus its slope parameter lambda."""

    kind: Kind
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0):
            raise ValueError(f"lambda must be positive and finite, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    def with_lambda(self, lam: float) -> "ActivationKind":
        return ActivationKind(self.kind, lam)

    @property
    def lipschitz(self) -> float:
        """Global Lipschitz constant: lambda/4 for sigmoid, lambda for tanh."""
        return self.lam / 4.0 if self.kind is Kind.SIGMOID else self.lam

    @property
    def threshold(self) -> float:
        """Contraction threshold on a Frobenius norm, 1/Lipschitz."""
        return 1.0 / self.lipschitz

    def __call__(self, x):
        return act_real(self, x)


def _sigmoid(z):
    # exp of a non-positive argument only, so large |z| saturates cleanly
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def act_real(a: ActivationKind, x):
    """Apply the activation to a scalar or an array (elementwise)."""
    z = a.lam * np.asarray(x, dtype=float)
    out = _sigmoid(z) if a.kind is Kind.SIGMOID else np.tanh(z)
    return float(out) if out.ndim == 0 else out


def act_ggn(a: ActivationKind, g: GGN) -> GGN:
    """Activation of a grey number.

    The kernel goes through the activation.  Sigmoid scales the greyness by the
    output kernel; tanh leaves it unchanged.
    """
    k = act_real(a, g.kernel)
    if a.kind is Kind.SIGMOID:
        return GGN(k, k * g.greyness)
    return GGN(k, g.greyness)


def act_interval(a: ActivationKind, x: IGN) -> IGN:
    # both activations are increasing, so endpoints map to endpoints
    return IGN(act_real(a, x.lower), act_real(a, x.upper))


def sigmoid(lam: float = 1.0) -> ActivationKind:
    return ActivationKind(Kind.SIGMOID, lam)


def tanh(lam: float = 1.0) -> ActivationKind:
    return ActivationKind(Kind.TANH, lam)
