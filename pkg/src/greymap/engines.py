"""Inference engines (crisp, interval, general grey) and behaviour classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from greymap.activation import ActivationKind, Kind, act_real
from greymap.grey_core import (
    SIGNED_DOMAIN,
    GGNMatrix,
    GGNVector,
    GreyDomain,
    IntervalArray,
)

DEN_GUARD = 1e-12
CONFIRM_STEPS = 5


class Engine(str, Enum):
    FCM = "fcm"
    FGCM = "fgcm"
    FGGCM = "fggcm"


class BehaviorKind(str, Enum):
    FIXED_POINT = "FixedPoint"
    LIMIT_CYCLE = "LimitCycle"
    CHAOS = "Chaos"


class UnsupportedEngine(ValueError):
    """The model lacks the representation the requested engine iterates on."""


@dataclass(frozen=True, eq=False)
class Model:
    """A cognitive map with its weights in one or more representations.

    `weights`/`initial_state` are the general grey form and are always present.
    The crisp form (for the plain FCM engine) and the interval form (for the
    interval engine) are optional.  When the crisp form is absent but every
    greyness is zero, the kernels serve as crisp values.
    """

    name: str
    activation: ActivationKind
    weights: GGNMatrix
    initial_state: GGNVector
    grey_domain: GreyDomain = SIGNED_DOMAIN
    weight_domain: GreyDomain = SIGNED_DOMAIN
    max_steps: int = 300
    fp_tolerance: float = 1e-6
    cycle_tolerance: float = 1e-6
    crisp_weights: Optional[np.ndarray] = None
    crisp_initial: Optional[np.ndarray] = None
    interval_weights: Optional[IntervalArray] = None
    interval_initial: Optional[IntervalArray] = None
    lambdas: tuple = ()

    def __post_init__(self):
        n = self.weights.n
        if len(self.initial_state) != n:
            raise ValueError(
                f"initial state has length {len(self.initial_state)} but weights are {n}x{n}"
            )
        if int(self.max_steps) < 2:
            raise ValueError("max_steps must be at least 2")
        if not (self.fp_tolerance > 0 and self.cycle_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if (self.crisp_weights is None) != (self.crisp_initial is None):
            raise ValueError("crisp weights and crisp initial state come together")
        if (self.interval_weights is None) != (self.interval_initial is None):
            raise ValueError("interval weights and interval initial state come together")
        if self.crisp_weights is not None:
            cw = np.array(self.crisp_weights, dtype=float)
            ci = np.array(self.crisp_initial, dtype=float)
            if cw.shape != (n, n) or ci.shape != (n,):
                raise ValueError("crisp form dimensions disagree with the weights")
            cw.flags.writeable = False
            ci.flags.writeable = False
            object.__setattr__(self, "crisp_weights", cw)
            object.__setattr__(self, "crisp_initial", ci)
        if self.interval_weights is not None:
            if self.interval_weights.shape != (n, n) or self.interval_initial.shape != (n,):
                raise ValueError("interval form dimensions disagree with the weights")
        object.__setattr__(self, "max_steps", int(self.max_steps))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))

    @property
    def n(self) -> int:
        return self.weights.n

    def crisp_form(self):
        """(W, A0) for the crisp engine, or None when the model is grey."""
        if self.crisp_weights is not None:
            return self.crisp_weights, self.crisp_initial
        if not self.weights.greyness.any() and not self.initial_state.greyness.any():
            return self.weights.kernels, self.initial_state.kernels
        return None

    def supports(self, engine: Engine) -> bool:
        engine = Engine(engine)
        if engine is Engine.FCM:
            return self.crisp_form() is not None
        if engine is Engine.FGCM:
            return self.interval_weights is not None
        return True

    def engines(self) -> list:
        return [e for e in Engine if self.supports(e)]

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            if isinstance(a, np.ndarray):
                return np.array_equal(a, b)
            return a == b

        return all(
            same(getattr(self, f), getattr(other, f))
            for f in self.__dataclass_fields__
        )


@dataclass(frozen=True)
class Trajectory:
    """All visited states of one run, index 0 being the initial state.

    For the interval engine `states` holds midpoints and normalised widths and
    the raw intervals are kept in `intervals`.
    """

    states: list
    model_ref: str
    lam: float
    engine: Engine = Engine.FGGCM
    intervals: Optional[list] = None

    def __post_init__(self):
        if not self.states:
            raise ValueError("a trajectory needs at least one state")
        n = len(self.states[0])
        if any(len(s) != n for s in self.states):
            raise ValueError("all states must have the same length")

    def __len__(self):
        return len(self.states)

    def kernels(self) -> np.ndarray:
        """(steps+1, n) array of kernels."""
        return np.stack([s.kernels for s in self.states])

    def greyness(self) -> np.ndarray:
        return np.stack([s.greyness for s in self.states])


@dataclass(frozen=True)
class Behavior:
    kind: BehaviorKind
    settle_step: Optional[int]
    period: Optional[int]
    final_state: GGNVector = field(repr=False)

    def __post_init__(self):
        if self.kind is BehaviorKind.FIXED_POINT and self.period is not None:
            raise ValueError("a fixed point has no period")
        if self.kind is BehaviorKind.LIMIT_CYCLE and (self.period is None or self.period < 2):
            raise ValueError("a limit cycle needs a period >= 2")

    def line(self) -> str:
        s = "-" if self.settle_step is None else str(self.settle_step)
        p = "-" if self.period is None else str(self.period)
        return f"behavior={self.kind.value} settle_step={s} period={p}"


def _check_dims(W, A):
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[1] != A.shape[0]:
        raise ValueError(f"dimension mismatch: weights {W.shape}, state {A.shape}")


def fcm_step(W, A, act: ActivationKind) -> np.ndarray:
    """One crisp update A' = f(W A); row i of W collects the inputs of node i."""
    W = np.asarray(W, dtype=float)
    A = np.asarray(A, dtype=float)
    _check_dims(W, A)
    return np.atleast_1d(act_real(act, W @ A))


def _interval_matvec(wl, wu, al, au):
    p = np.stack([wl * al, wl * au, wu * al, wu * au])
    return p.min(axis=0).sum(axis=1), p.max(axis=0).sum(axis=1)


def fgcm_step(W: IntervalArray, A: IntervalArray, act: ActivationKind) -> IntervalArray:
    """One interval update: interval products summed per row, then f at both ends."""
    _check_dims(W.lower, A.lower)
    lo, hi = _interval_matvec(W.lower, W.upper, A.lower[None, :], A.upper[None, :])
    return IntervalArray(np.atleast_1d(act_real(act, lo)), np.atleast_1d(act_real(act, hi)))


def _fggcm_arrays(wk, wg, ak, ag, act):
    nk = np.atleast_1d(act_real(act, wk @ ak))
    p = np.abs(wk * ak[None, :])
    den = p.sum(axis=1)
    ok = den >= DEN_GUARD
    num = (np.maximum(wg, ag[None, :]) * p).sum(axis=1)
    r = num / np.where(ok, den, 1.0)
    if act.kind is Kind.SIGMOID:
        r = nk * r
    # a vanishing weighted sum leaves the ratio undefined; keep the old greyness
    ng = np.where(ok, r, ag)
    return nk, ng


def fggcm_step(W: GGNMatrix, A: GGNVector, act: ActivationKind) -> GGNVector:
    """One general grey update.

    Kernels follow the crisp rule on the kernel matrix.  The greyness of node i
    is the |w_ij A_j|-weighted average of max(w_ij greyness, A_j greyness),
    further multiplied by the new kernel for sigmoid.
    """
    _check_dims(W.kernels, A.kernels)
    nk, ng = _fggcm_arrays(W.kernels, W.greyness, A.kernels, A.greyness, act)
    return GGNVector(nk, ng)


def _settled(dists, tol, k=CONFIRM_STEPS):
    k = min(k, len(dists))
    return k > 0 and bool(np.all(dists[-k:] < tol))


def run(model: Model, lam: float, engine: Engine = Engine.FGGCM, max_steps: int | None = None) -> Trajectory:
    """Iterate the model from its initial state.

    Stops after `max_steps` updates, or earlier once the state repeats exactly
    or the last few successive distances all fall below the fixed-point
    tolerance.  Oscillating runs always use the full horizon.
    """
    engine = Engine(engine)
    act = model.activation.with_lambda(lam)
    steps = model.max_steps if max_steps is None else int(max_steps)
    if steps < 1:
        raise ValueError("max_steps must be positive")
    if not model.supports(engine):
        raise UnsupportedEngine(f"model '{model.name}' does not support the {engine.value} engine")

    intervals = None
    if engine is Engine.FCM:
        W, a = model.crisp_form()
        k, g = np.array(a, dtype=float), np.zeros(model.n)

        def step(k, g):
            return np.atleast_1d(act_real(act, W @ k)), g
    elif engine is Engine.FGCM:
        W = model.interval_weights
        lo, hi = model.interval_initial.lower.copy(), model.interval_initial.upper.copy()
        mu = model.grey_domain.measure
        intervals = [IntervalArray(lo, hi)]
        k, g = 0.5 * (lo + hi), (hi - lo) / mu
    else:
        wk, wg = model.weights.kernels, model.weights.greyness
        k, g = model.initial_state.kernels.copy(), model.initial_state.greyness.copy()

        def step(k, g):
            return _fggcm_arrays(wk, wg, k, g, act)

    states = [GGNVector(k, g)]
    small = 0
    for _ in range(steps):
        if engine is Engine.FGCM:
            lo, hi = _interval_matvec(W.lower, W.upper, lo[None, :], hi[None, :])
            lo = np.atleast_1d(act_real(act, lo))
            hi = np.atleast_1d(act_real(act, hi))
            intervals.append(IntervalArray(lo, hi))
            nk, ng = 0.5 * (lo + hi), (hi - lo) / mu
        else:
            nk, ng = step(k, g)
        dk, dg = nk - k, ng - g
        d = math.sqrt(float(dk @ dk + dg @ dg))
        small = small + 1 if d < model.fp_tolerance else 0
        k, g = nk, ng
        states.append(GGNVector._trusted(k, g))
        if d == 0.0 or small >= CONFIRM_STEPS:
            break
    return Trajectory(states, model.name, float(lam), engine, intervals)


def successive_distances(traj: Trajectory, lag: int = 1) -> np.ndarray:
    """metric_d between states t+lag and t for every admissible t."""
    K, G = traj.kernels(), traj.greyness()
    dk = K[lag:] - K[:-lag]
    dg = G[lag:] - G[:-lag]
    return np.sqrt((dk * dk).sum(axis=1) + (dg * dg).sum(axis=1))


def classify(traj: Trajectory, fp_tol: float = 1e-6, cycle_tol: float = 1e-6) -> Behavior:
    """Label a trajectory as a fixed point, a limit cycle or chaos.

    Fixed point: the last five successive distances (fewer for very short
    trajectories) are below `fp_tol`, or the last state repeats the one before
    exactly; settle_step is the first step from which
    every later successive distance stays below it.

    Limit cycle: the smallest P in [2, T//3] such that d(A[t+P], A[t]) <
    `cycle_tol` for every t covering the final three periods.

    Anything else is reported as chaos.
    """
    T = len(traj.states) - 1
    if T < 1:
        raise ValueError("classification needs at least two states")
    final = traj.states[-1]
    d1 = successive_distances(traj, 1)
    # an exact repeat of a deterministic map is a fixed point outright
    if _settled(d1, fp_tol) or d1[-1] == 0.0:
        below = d1 < fp_tol
        t = T
        while t > 0 and below[t - 1]:
            t -= 1
        return Behavior(BehaviorKind.FIXED_POINT, t, None, final)

    for P in range(2, T // 3 + 1):
        dP = successive_distances(traj, P)
        tail = dP[T - 3 * P:]
        if np.all(tail < cycle_tol):
            below = dP < cycle_tol
            t = T - 3 * P
            while t > 0 and below[t - 1]:
                t -= 1
            return Behavior(BehaviorKind.LIMIT_CYCLE, t, P, final)
    return Behavior(BehaviorKind.CHAOS, None, None, final)


def simulate(model: Model, lam: float, engine: Engine = Engine.FGGCM, max_steps: int | None = None):
    """run followed by classify with the model's tolerances."""
    traj = run(model, lam, engine, max_steps)
    return traj, classify(traj, model.fp_tolerance, model.cycle_tolerance)
