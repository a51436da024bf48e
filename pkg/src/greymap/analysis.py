"""Sufficient convergence conditions, comparison matrices and run reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from greymap.activation import ActivationKind, Kind, act_real
from greymap.engines import Behavior, BehaviorKind, Engine, Model, simulate
from greymap.grey_core import GGNMatrix, GGNVector, IntervalArray

EQ_TOL = 1e-9
# slack when comparing node and weight greyness inside the step gate; the
# built-in models carry many equal greynesses that differ only by rounding
TIE_TOL = 1e-12


class Verdict(str, Enum):
    UNIQUE = "UniqueFixedPoint"
    AT_LEAST_ONE = "AtLeastOneFixedPoint"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ConditionVerdict:
    kind: Verdict
    lhs: float
    threshold: float
    margin: float

    @classmethod
    def judge(cls, lhs: float, threshold: float, eq_tol: float = EQ_TOL) -> "ConditionVerdict":
        if math.isnan(lhs):
            kind = Verdict.INCONCLUSIVE
        elif abs(lhs - threshold) <= eq_tol:
            kind = Verdict.AT_LEAST_ONE
        elif lhs < threshold:
            kind = Verdict.UNIQUE
        else:
            kind = Verdict.INCONCLUSIVE
        return cls(kind, float(lhs), float(threshold), float(threshold - lhs))


class SpansZero(ValueError):
    """An interval weight straddles zero so it has no sign-definite magnitude."""

    def __init__(self, i: int, j: int, lower: float, upper: float):
        super().__init__(f"weight ({i + 1},{j + 1}) = [{lower}, {upper}] spans zero")
        self.i, self.j = i, j


def frobenius(M) -> float:
    M = np.asarray(M, dtype=float)
    return float(np.sqrt((M * M).sum()))


def kernel_condition(W_hat, act: ActivationKind, eq_tol: float = EQ_TOL) -> ConditionVerdict:
    """Compare ||W||_F with 1/lambda (tanh) or 4/lambda (sigmoid)."""
    return ConditionVerdict.judge(frobenius(W_hat), act.threshold, eq_tol)


def w_star(W: IntervalArray) -> np.ndarray:
    """Magnitude matrix of sign-definite interval weights.

    Nonpositive intervals contribute |lower|, nonnegative ones contribute upper.
    """
    lo, hi = W.lower, W.upper
    bad = (lo < 0) & (hi > 0)
    if bad.any():
        i, j = (int(v) for v in np.argwhere(bad)[0])
        raise SpansZero(i, j, float(lo[i, j]), float(hi[i, j]))
    return np.where(hi <= 0, np.abs(lo), hi)


def heaviside(x):
    """Unit step with value 1 at 0."""
    out = np.where(np.asarray(x, dtype=float) >= 0, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


def _weighted_inputs(W: GGNMatrix, state: GGNVector):
    # |w_ij A_j| with A rescaled by its largest magnitude; the row ratios
    # are unchanged and tiny kernels stay well away from underflow
    k = state.kernels
    s = np.abs(k).max()
    if s > 0:
        k = k / s
    P = np.abs(W.kernels * k[None, :])
    return P, P.sum(axis=1)


def _next_kernels(W: GGNMatrix, state: GGNVector, act: ActivationKind):
    return np.atleast_1d(act_real(act, W.kernels @ state.kernels))


def m_tilde(
    W: GGNMatrix,
    state: GGNVector,
    act: ActivationKind,
    next_kernels=None,
    tie_tol: float = TIE_TOL,
) -> np.ndarray:
    """Gated contraction matrix of the greyness update.

    m_ij = |w_ij A_j| * step(A_j greyness - w_ij greyness) / sum_j |w_ij A_j|,
    times the output kernel of node i for sigmoid.  The output kernels default
    to one update of `state`.  Rows with no weighted input are zero.
    """
    P, den = _weighted_inputs(W, state)
    gate = heaviside(state.greyness[None, :] - W.greyness + tie_tol)
    safe = np.where(den > 0, den, 1.0)
    M = np.where(den[:, None] > 0, P * gate / safe[:, None], 0.0)
    if act.kind is Kind.SIGMOID:
        nk = _next_kernels(W, state, act) if next_kernels is None else np.asarray(next_kernels, float)
        M = M * nk[:, None]
    return M


def zero_rows(W: GGNMatrix, state: GGNVector) -> list:
    """Nodes whose weighted input sum is exactly zero."""
    _, den = _weighted_inputs(W, state)
    return [int(i) for i in np.flatnonzero(den == 0)]


def greyness_condition(mt, eq_tol: float = EQ_TOL) -> ConditionVerdict:
    return ConditionVerdict.judge(frobenius(mt), 1.0, eq_tol)


def m_matrix(W: GGNMatrix, state: GGNVector, next_state_kernels, act: ActivationKind) -> np.ndarray:
    """Greyness iteration matrix without gating.

    Rows sum to 1 for tanh and to the next kernel of the node for sigmoid.
    """
    P, den = _weighted_inputs(W, state)
    if np.any(den == 0):
        raise ValueError(f"zero weighted input at node(s) {np.flatnonzero(den == 0).tolist()}")
    M = P / den[:, None]
    if act.kind is Kind.SIGMOID:
        M = M * np.asarray(next_state_kernels, dtype=float)[:, None]
    return M


def gates_open(W: GGNMatrix, state: GGNVector, tie_tol: float = TIE_TOL) -> bool:
    """True when every node greyness dominates its incoming weight greyness."""
    return bool(np.all(state.greyness[None, :] - W.greyness + tie_tol >= 0))


def tanh_grey_fixed_point_residual(M, grey) -> float:
    """||M g - g||; zero when g is an eigenvalue-1 eigenvector of M (or 0)."""
    M = np.asarray(M, dtype=float)
    g = np.asarray(grey, dtype=float)
    if M.ndim != 2 or M.shape[1] != g.shape[0] or M.shape[0] != g.shape[0]:
        raise ValueError(f"dimension mismatch: M {M.shape}, grey {g.shape}")
    return float(np.linalg.norm(M @ g - g))


@dataclass(frozen=True)
class ConvergenceReport:
    model: str
    lam: float
    engine: Engine
    frobenius_kernel: float
    w_star_frobenius: Optional[float]
    kernel_verdict: ConditionVerdict
    m_tilde_frobenius: Optional[float]
    greyness_verdict: Optional[ConditionVerdict]
    behavior: Behavior
    grey_residual: Optional[float] = None
    notes: list = field(default_factory=list)

    CSV_HEADER = (
        "lambda,norm_kernel,norm_wstar,lhs_times_lambda,"
        "kernel_verdict,mtilde_norm,greyness_verdict,behavior"
    )

    def csv_row(self, digits: int = 6) -> str:
        def num(x):
            return "-" if x is None or math.isnan(x) else f"{x:.{digits}f}"

        return ",".join([
            f"{self.lam:g}",
            num(self.frobenius_kernel),
            num(self.w_star_frobenius),
            num(self.kernel_verdict.lhs * self.lam),
            self.kernel_verdict.kind.value,
            num(self.m_tilde_frobenius),
            "-" if self.greyness_verdict is None else self.greyness_verdict.kind.value,
            self.behavior.kind.value,
        ])

    def to_kv(self) -> str:
        def opt(x):
            return "-" if x is None else repr(x)

        b = self.behavior
        lines = [
            f"model={self.model}",
            f"lambda={self.lam!r}",
            f"engine={self.engine.value}",
            f"frobenius_kernel={self.frobenius_kernel!r}",
            f"w_star_frobenius={opt(self.w_star_frobenius)}",
            f"kernel_verdict={self.kernel_verdict.kind.value}",
            f"kernel_lhs={self.kernel_verdict.lhs!r}",
            f"kernel_threshold={self.kernel_verdict.threshold!r}",
            f"m_tilde_frobenius={opt(self.m_tilde_frobenius)}",
            "greyness_verdict=" + ("-" if self.greyness_verdict is None else self.greyness_verdict.kind.value),
            f"grey_residual={opt(self.grey_residual)}",
            f"behavior={b.kind.value}",
            f"settle_step={'-' if b.settle_step is None else b.settle_step}",
            f"period={'-' if b.period is None else b.period}",
        ]
        lines += [f"note={n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def full_report(model: Model, lam: float, engine: Engine = Engine.FGGCM, max_steps: int | None = None) -> ConvergenceReport:
    """Simulate one (model, lambda, engine) and evaluate every condition.

    The greyness diagnostics use the last recorded update: the state before it
    and the kernels it produced.  For a settled run this is the fixed point;
    for an oscillating run it depends on where the cycle was cut, and the notes
    give the spread over the final period.
    """
    engine = Engine(engine)
    act = model.activation.with_lambda(lam)
    traj, beh = simulate(model, lam, engine, max_steps)
    notes = []

    crisp = model.crisp_form()
    if engine is Engine.FCM:
        norm_kernel = frobenius(crisp[0])
    else:
        norm_kernel = frobenius(model.weights.kernels)

    wsf = None
    if model.interval_weights is not None:
        try:
            wsf = frobenius(w_star(model.interval_weights))
        except SpansZero as exc:
            notes.append(f"interval magnitude matrix undefined: {exc}")

    if engine is Engine.FGCM:
        if wsf is None:
            kv = ConditionVerdict(Verdict.INCONCLUSIVE, math.nan, act.threshold, math.nan)
            notes.append("interval condition inapplicable: a weight spans zero")
        else:
            kv = ConditionVerdict.judge(wsf, act.threshold)
    else:
        kv = ConditionVerdict.judge(norm_kernel, act.threshold)
    if kv.kind is Verdict.INCONCLUSIVE and not math.isnan(kv.lhs):
        notes.append("kernel condition not met: the sufficient test is inconclusive")

    mtf = gv = resid = None
    if engine is Engine.FGGCM:
        W = model.weights
        prev, last = traj.states[-2], traj.states[-1]
        mt = m_tilde(W, prev, act, next_kernels=last.kernels)
        mtf = frobenius(mt)
        gv = greyness_condition(mt)
        zr = zero_rows(W, prev)
        if zr:
            notes.append("m_tilde rows set to zero for nodes without weighted input: "
                         + " ".join(str(i + 1) for i in zr))
        if beh.kind is not BehaviorKind.FIXED_POINT:
            notes.append("kernel did not converge: greyness verdict not certified")
            if beh.kind is BehaviorKind.LIMIT_CYCLE:
                vals = [
                    frobenius(m_tilde(W, traj.states[t - 1], act, next_kernels=traj.states[t].kernels))
                    for t in range(len(traj.states) - beh.period, len(traj.states))
                ]
                notes.append(
                    "m_tilde depends on the cycle phase: "
                    f"range {min(vals):.4f}..{max(vals):.4f} over the last period"
                )
        if act.kind is Kind.TANH and not zr:
            M = m_matrix(W, prev, last.kernels, act)
            resid = tanh_grey_fixed_point_residual(M, last.greyness)
            if not gates_open(W, last):
                notes.append("some weight greyness exceeds node greyness: residual is indicative only")
        if gv.kind is Verdict.INCONCLUSIVE and resid is not None:
            notes.append(f"greyness contraction test inconclusive; eigenvector residual {resid:.3e}")

    return ConvergenceReport(
        model=model.name,
        lam=float(lam),
        engine=engine,
        frobenius_kernel=norm_kernel,
        w_star_frobenius=wsf,
        kernel_verdict=kv,
        m_tilde_frobenius=mtf,
        greyness_verdict=gv,
        behavior=beh,
        grey_residual=resid,
        notes=notes,
    )
