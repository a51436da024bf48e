"""Built-in case-study models, greyness injection and the JSON model format."""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path

import numpy as np

from greymap.activation import ActivationKind, Kind
from greymap.engines import Engine, Model
from greymap.grey_core import (
    SIGNED_DOMAIN,
    UNIT_DOMAIN,
    GGNMatrix,
    GGNVector,
    GreyDomain,
    IntervalArray,
    ggn_from_intervals,
)


class ScenarioId(str, Enum):
    WEB = "web"
    WEB_CASE1 = "web-case1"
    WEB_CASE2 = "web-case2"
    CIVIL = "civil"
    CIVIL_CASE1 = "civil-case1"
    CIVIL_CASE2 = "civil-case2"

    @property
    def engines(self) -> tuple:
        if self in (ScenarioId.WEB, ScenarioId.CIVIL):
            return (Engine.FCM, Engine.FGCM, Engine.FGGCM)
        if self in (ScenarioId.WEB_CASE1, ScenarioId.CIVIL_CASE1):
            return (Engine.FGCM, Engine.FGGCM)
        return (Engine.FGGCM,)


# web-experience map, sigmoid, 7 concepts
WEB_WEIGHTS = np.array([
    [0.0, -0.9, -0.88, 1.0, -0.85, -0.83, 1.0],
    [1.0, 0.0, -0.93, -0.89, -0.9, -0.94, 1.0],
    [-0.98, -0.93, -1.0, -1.0, 1.0, 1.0, 1.0],
    [-0.99, -0.89, -1.0, -0.39, 0.73, 0.58, 0.7],
    [1.0, 1.0, 1.0, 1.0, -0.8, 0.51, 1.0],
    [1.0, 1.0, 0.83, 1.0, 0.51, -0.39, 1.0],
    [1.0, 1.0, 1.0, 1.0, -0.71, -0.49, -0.67],
])
WEB_INITIAL = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0])
WEB_LAMBDAS = (0.5, 1.0, 2.0, 4.0)

# civil-engineering map, tanh, 7 concepts; (row, col, value) 1-based
_CIVIL_ENTRIES = [
    (1, 2, 0.1), (1, 6, -0.3), (2, 3, 0.7), (3, 1, 0.6), (4, 1, 0.9),
    (5, 3, 0.9), (6, 5, -0.9), (6, 7, 0.8), (7, 4, 0.9), (7, 5, -0.9),
]
CIVIL_WEIGHTS = np.zeros((7, 7))
for _i, _j, _v in _CIVIL_ENTRIES:
    CIVIL_WEIGHTS[_i - 1, _j - 1] = _v
CIVIL_INITIAL = np.array([0.8, 0.5, 0.3, 0.0, 0.0, 0.0, 0.0])
CIVIL_LAMBDAS = (0.2, 0.4, 1.5, 2.5)

INJECTED_GREYNESS = 0.01

# single uncertain self-loop used by both first variants
_CASE1 = {(0, 0): [(-0.1, 0.1)]}

# multi-interval substitutions (0-based cells); bare floats are point values
_WEB_CASE2 = {
    (0, 0): [(-0.9, -0.75), (0.4, 0.9)],
    (0, 1): [(-0.95, -0.89), -0.83, (-0.8, -0.75)],
    (2, 2): [(-1.0, -0.95), (-0.94, -0.90), (-0.89, 0.88)],
    (0, 4): [(0.99, 1.0), (0.95, 0.98), (-0.90, 0.93)],
}
_CIVIL_CASE2 = {
    (0, 0): [(-0.1, 0.1)],
    (0, 1): [(0.07, 0.08), (0.09, 0.11), (0.13, 0.15)],
    (1, 2): [(0.65, 0.68), (0.685, 0.715), 0.72, (0.725, 0.73)],
    (5, 4): [(-0.97, -0.93), (-0.92, -0.88), (-0.85, -0.8)],
}


def inject_greyness(W, g: float, domain: GreyDomain = SIGNED_DOMAIN) -> IntervalArray:
    """Widen crisp values into intervals [w - g, w + g] clipped to the domain.

    Entries with |w| < g stay degenerate so every interval keeps the sign of
    its crisp value.  Endpoints are rounded to 12 decimals to drop binary
    noise such as 0.9 + 0.01 = 0.9100000000000001.
    """
    if not g > 0:
        raise ValueError(f"greyness to inject must be positive, got {g}")
    W = np.asarray(W, dtype=float)
    small = np.abs(W) < g
    lo = np.where(small, W, np.maximum(np.round(W - g, 12), domain.lower))
    hi = np.where(small, W, np.minimum(np.round(W + g, 12), domain.upper))
    return IntervalArray(lo, hi)


def _grey_from_intervals(iv: IntervalArray, domain: GreyDomain):
    k = np.empty(iv.shape)
    g = np.empty(iv.shape)
    for idx in np.ndindex(iv.shape):
        x = ggn_from_intervals([iv[idx]], domain=domain)
        k[idx], g[idx] = x.kernel, x.greyness
    return k, g


def _substitute(k, g, cells, domain):
    k, g = k.copy(), g.copy()
    for (i, j), ivs in cells.items():
        x = ggn_from_intervals(ivs, domain=domain)
        k[i, j], g[i, j] = x.kernel, x.greyness
    return k, g


def builtin(sid) -> Model:
    """One of the six built-in case-study models."""
    sid = ScenarioId(sid)
    web = sid.value.startswith("web")
    W0, A0 = (WEB_WEIGHTS, WEB_INITIAL) if web else (CIVIL_WEIGHTS, CIVIL_INITIAL)
    act = ActivationKind(Kind.SIGMOID if web else Kind.TANH, 1.0)
    state_domain = UNIT_DOMAIN if web else SIGNED_DOMAIN
    wdom = SIGNED_DOMAIN

    W_iv = inject_greyness(W0, INJECTED_GREYNESS, wdom)
    A_iv = inject_greyness(A0, INJECTED_GREYNESS, state_domain)
    if sid in (ScenarioId.WEB_CASE1, ScenarioId.CIVIL_CASE1):
        lo, hi = W_iv.lower.copy(), W_iv.upper.copy()
        for (i, j), [(a, b)] in _CASE1.items():
            lo[i, j], hi[i, j] = a, b
        W_iv = IntervalArray(lo, hi)

    wk, wg = _grey_from_intervals(W_iv, wdom)
    ak, ag = _grey_from_intervals(A_iv, state_domain)
    interval_form = (W_iv, A_iv)
    if sid is ScenarioId.WEB_CASE2 or sid is ScenarioId.CIVIL_CASE2:
        wk, wg = _substitute(wk, wg, _WEB_CASE2 if web else _CIVIL_CASE2, wdom)
        interval_form = (None, None)
    crisp = (W0, A0) if sid in (ScenarioId.WEB, ScenarioId.CIVIL) else (None, None)

    return Model(
        name=sid.value,
        activation=act,
        weights=GGNMatrix(wk, wg),
        initial_state=GGNVector(ak, ag),
        grey_domain=state_domain,
        weight_domain=wdom,
        crisp_weights=crisp[0],
        crisp_initial=crisp[1],
        interval_weights=interval_form[0],
        interval_initial=interval_form[1],
        lambdas=WEB_LAMBDAS if web else CIVIL_LAMBDAS,
    )


# ---------------------------------------------------------------- file format


class ModelFileError(ValueError):
    """Malformed model document; the message names the offending field."""


def _num(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ModelFileError(f"{where}: expected a number, got {json.dumps(x)}")
    return float(x)


def _interval_pair(x, where):
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        lo, hi = float(x[0]), float(x[1])
        if lo > hi:
            raise ModelFileError(f"{where}: interval lower {lo} exceeds upper {hi}")
        return lo, hi
    return None


def _parse_entry(x, domain, where):
    """Return (kernel, greyness, interval-or-None) for one entry."""
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        v = float(x)
        return v, 0.0, (v, v)
    pair = _interval_pair(x, where)
    try:
        if pair is not None:
            g = ggn_from_intervals([pair], domain=domain)
            return g.kernel, g.greyness, pair
        if isinstance(x, list) and x:
            parts = []
            for m, item in enumerate(x):
                if isinstance(item, (int, float)) and not isinstance(item, bool):
                    parts.append(float(item))
                else:
                    p = _interval_pair(item, f"{where}[{m}]")
                    if p is None:
                        raise ModelFileError(f"{where}[{m}]: expected a number or [lower, upper]")
                    parts.append(p)
            g = ggn_from_intervals(parts, domain=domain)
            return g.kernel, g.greyness, None
        if isinstance(x, dict):
            if "intervals" in x:
                parts = x["intervals"]
                if not isinstance(parts, list):
                    raise ModelFileError(f"{where}.intervals: expected a list")
                g = ggn_from_intervals(
                    [p if isinstance(p, (int, float)) else tuple(p) for p in parts],
                    probs=x.get("probs"),
                    domain=domain,
                )
                return g.kernel, g.greyness, None
            if set(x) != {"kernel", "greyness"}:
                raise ModelFileError(f"{where}: object entries need exactly 'kernel' and 'greyness'")
            k = _num(x["kernel"], f"{where}.kernel")
            g = _num(x["greyness"], f"{where}.greyness")
            if g < 0:
                raise ModelFileError(f"{where}.greyness: must be >= 0")
            return k, g, None
    except ModelFileError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelFileError(f"{where}: {exc}") from None
    raise ModelFileError(
        f"{where}: expected a number, [lower, upper], a list of intervals or {{kernel, greyness}}"
    )


def _domain(obj, where, default):
    if obj is None:
        return default
    try:
        return GreyDomain(_num(obj["lower"], f"{where}.lower"), _num(obj["upper"], f"{where}.upper"))
    except (KeyError, TypeError):
        raise ModelFileError(f"{where}: expected {{lower, upper}}") from None
    except ModelFileError:
        raise
    except ValueError as exc:
        raise ModelFileError(f"{where}: {exc}") from None


def model_from_dict(doc: dict) -> Model:
    if not isinstance(doc, dict):
        raise ModelFileError("document: expected a JSON object")
    for key in ("weights", "initial_state", "activation"):
        if key not in doc:
            raise ModelFileError(f"{key}: missing")
    act_doc = doc["activation"]
    if not isinstance(act_doc, dict) or "kind" not in act_doc:
        raise ModelFileError("activation: expected {kind, lambda_default}")
    try:
        kind = Kind(str(act_doc["kind"]).lower())
    except ValueError:
        raise ModelFileError(f"activation.kind: unknown activation '{act_doc['kind']}'") from None
    try:
        act = ActivationKind(kind, _num(act_doc.get("lambda_default", 1.0), "activation.lambda_default"))
    except ModelFileError:
        raise
    except ValueError as exc:
        raise ModelFileError(f"activation.lambda_default: {exc}") from None

    default_state = UNIT_DOMAIN if kind is Kind.SIGMOID else SIGNED_DOMAIN
    sdom = _domain(doc.get("grey_domain"), "grey_domain", default_state)
    wdom = _domain(doc.get("weight_domain"), "weight_domain", SIGNED_DOMAIN)

    rows = doc["weights"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ModelFileError("weights: expected a non-empty list of rows")
    n = len(rows)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise ModelFileError(f"weights[{i}]: row has {len(r)} entries, expected {n}")
    init = doc["initial_state"]
    if not isinstance(init, list) or len(init) != n:
        raise ModelFileError(f"initial_state: expected {n} entries to match the weights")

    wk, wg = np.zeros((n, n)), np.zeros((n, n))
    wlo, whi = np.zeros((n, n)), np.zeros((n, n))
    all_interval = True
    all_number = True
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            k, g, iv = _parse_entry(x, wdom, f"weights[{i}][{j}]")
            wk[i, j], wg[i, j] = k, g
            all_number &= isinstance(x, (int, float))
            if iv is None:
                all_interval = False
            else:
                wlo[i, j], whi[i, j] = iv
    ak, ag = np.zeros(n), np.zeros(n)
    alo, ahi = np.zeros(n), np.zeros(n)
    for i, x in enumerate(init):
        k, g, iv = _parse_entry(x, sdom, f"initial_state[{i}]")
        ak[i], ag[i] = k, g
        all_number &= isinstance(x, (int, float))
        if iv is None:
            all_interval = False
        else:
            alo[i], ahi[i] = iv

    # a document may opt out of the interval form even when every entry is one
    all_interval = all_interval and bool(doc.get("interval_form", True))
    crisp_w = crisp_a = None
    if "crisp_weights" in doc or "crisp_initial_state" in doc:
        try:
            crisp_w = np.array(doc["crisp_weights"], dtype=float)
            crisp_a = np.array(doc["crisp_initial_state"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise ModelFileError("crisp_weights/crisp_initial_state: expected numeric arrays, both present") from None
        if crisp_w.shape != (n, n) or crisp_a.shape != (n,):
            raise ModelFileError("crisp_weights/crisp_initial_state: dimensions disagree with weights")

    tol = doc.get("tolerances", {}) or {}
    try:
        return Model(
            name=str(doc.get("name", "model")),
            activation=act,
            weights=GGNMatrix(wk, wg),
            initial_state=GGNVector(ak, ag),
            grey_domain=sdom,
            weight_domain=wdom,
            max_steps=int(doc.get("max_steps", 300)),
            fp_tolerance=_num(tol.get("fixed_point", 1e-6), "tolerances.fixed_point"),
            cycle_tolerance=_num(tol.get("cycle", 1e-6), "tolerances.cycle"),
            crisp_weights=crisp_w,
            crisp_initial=crisp_a,
            interval_weights=IntervalArray(wlo, whi) if all_interval else None,
            interval_initial=IntervalArray(alo, ahi) if all_interval else None,
            lambdas=tuple(_num(v, "lambdas") for v in doc.get("lambdas", [])),
        )
    except ModelFileError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelFileError(f"model: {exc}") from None


def load_model(path) -> Model:
    """Read a model document; errors carry line/column or field names."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return model_from_dict(doc)


def _entry(k, g, iv, domain):
    # write the interval when it regenerates the stored grey value exactly
    if iv is not None:
        lo, hi = iv
        if lo == hi and g == 0.0 and k == lo:
            return lo
        x = ggn_from_intervals([(lo, hi)], domain=domain)
        if x.kernel == k and x.greyness == g:
            return [lo, hi]
    if g == 0.0 and iv is None:
        return k
    return {"kernel": k, "greyness": g}


def model_to_dict(model: Model) -> dict:
    n = model.n
    W, A = model.weights, model.initial_state
    wiv, aiv = model.interval_weights, model.interval_initial
    weights = [
        [
            _entry(
                float(W.kernels[i, j]),
                float(W.greyness[i, j]),
                None if wiv is None else (float(wiv.lower[i, j]), float(wiv.upper[i, j])),
                model.weight_domain,
            )
            for j in range(n)
        ]
        for i in range(n)
    ]
    init = [
        _entry(
            float(A.kernels[i]),
            float(A.greyness[i]),
            None if aiv is None else (float(aiv.lower[i]), float(aiv.upper[i])),
            model.grey_domain,
        )
        for i in range(n)
    ]
    doc = {
        "name": model.name,
        "activation": {"kind": model.activation.kind.value, "lambda_default": model.activation.lam},
        "grey_domain": {"lower": model.grey_domain.lower, "upper": model.grey_domain.upper},
        "weight_domain": {"lower": model.weight_domain.lower, "upper": model.weight_domain.upper},
        "weights": weights,
        "initial_state": init,
        "max_steps": model.max_steps,
        "tolerances": {"fixed_point": model.fp_tolerance, "cycle": model.cycle_tolerance},
        "lambdas": list(model.lambdas),
    }
    if wiv is None:
        doc["interval_form"] = False
    if model.crisp_weights is not None:
        doc["crisp_weights"] = model.crisp_weights.tolist()
        doc["crisp_initial_state"] = model.crisp_initial.tolist()
    return doc


def dumps_model(model: Model) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def save_model(model: Model, path) -> None:
    Path(path).write_text(dumps_model(model))
