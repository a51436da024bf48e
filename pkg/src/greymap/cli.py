"""Command-line interface: simulate, analyze, reproduce tables, inject greyness."""

from __future__ import annotations

import argparse
import io
import os
import sys

from greymap.analysis import ConvergenceReport, frobenius, full_report, w_star
from greymap.engines import Engine, Model, UnsupportedEngine, simulate
from greymap.grey_core import GGNMatrix, GGNVector
from greymap.scenarios import (
    ModelFileError,
    ScenarioId,
    builtin,
    dumps_model,
    inject_greyness,
    load_model,
)

EXIT_BAD_INPUT = 2
EXIT_UNSUPPORTED = 3
MAX_STEPS_ENV = "GREYMAP_MAX_STEPS"


class BadInput(Exception):
    pass


def _sig(x: float) -> str:
    return f"{x:.12g}"


def _max_steps(args) -> int | None:
    if getattr(args, "steps", None) is not None:
        if args.steps < 1:
            raise BadInput("--steps must be positive")
        return args.steps
    env = os.environ.get(MAX_STEPS_ENV)
    if env is None or env == "":
        return None
    try:
        v = int(env)
    except ValueError:
        raise BadInput(f"{MAX_STEPS_ENV} must be an integer, got {env!r}") from None
    if v < 1:
        raise BadInput(f"{MAX_STEPS_ENV} must be positive")
    return v


def _load(args) -> Model:
    if args.model is not None:
        try:
            return load_model(args.model)
        except OSError as exc:
            raise BadInput(f"cannot read model file: {exc}") from None
    return builtin(args.scenario)


def _lambda(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"lambda must be positive and finite, got {text}")
    return v


def _lambda_list(text: str) -> list:
    return [_lambda(t) for t in text.split(",") if t.strip()]


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def trace_csv(traj) -> str:
    buf = io.StringIO()
    buf.write("step,node,kernel,greyness\n")
    for t, s in enumerate(traj.states):
        for i in range(len(s)):
            buf.write(f"{t},{i + 1},{_sig(s.kernels[i])},{_sig(s.greyness[i])}\n")
    return buf.getvalue()


def cmd_simulate(args) -> int:
    model = _load(args)
    traj, beh = simulate(model, args.lam, Engine(args.engine), _max_steps(args))
    _emit(trace_csv(traj), args.out)
    # keep stdout pure CSV when the trace goes there
    stream = sys.stdout if args.out is not None else sys.stderr
    print(beh.line(), file=stream)
    return 0


def cmd_analyze(args) -> int:
    model = _load(args)
    lams = args.lambdas or list(model.lambdas) or [model.activation.lam]
    steps = _max_steps(args)
    reports = [full_report(model, lam, Engine(args.engine), steps) for lam in lams]
    if args.format == "kv":
        text = "\n".join(r.to_kv() for r in reports)
    else:
        text = ConvergenceReport.CSV_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in reports)
    _emit(text, args.out)
    return 0


def _norm_rows(web: bool, steps=None):
    base = builtin(ScenarioId.WEB if web else ScenarioId.CIVIL)
    c1 = builtin(ScenarioId.WEB_CASE1 if web else ScenarioId.CIVIL_CASE1)
    c2 = builtin(ScenarioId.WEB_CASE2 if web else ScenarioId.CIVIL_CASE2)
    tag = "web" if web else "civil"
    rows = [
        (f"W_{tag}", frobenius(base.crisp_weights)),
        (f"W*_{tag}", frobenius(w_star(base.interval_weights))),
        (f"What_{tag}", frobenius(base.weights.kernels)),
        (f"What_{tag}1", frobenius(c1.weights.kernels)),
        (f"What_{tag}_mc", frobenius(c2.weights.kernels)),
    ]
    return base.lambdas, [(name, [v * lam for lam in base.lambdas]) for name, v in rows]


def reproduce_table(table: str, steps=None) -> str:
    """CSV text of one of the reproduced tables (4 decimals)."""
    buf = io.StringIO()
    if table in ("T2", "T4"):
        lams, rows = _norm_rows(table == "T2")
        buf.write("matrix," + ",".join(f"lambda={lam:g}" for lam in lams) + "\n")
        for name, vals in rows:
            buf.write(name + "," + ",".join(f"{v:.4f}" for v in vals) + "\n")
    elif table in ("T5", "T6"):
        model = builtin(ScenarioId.WEB if table == "T5" else ScenarioId.CIVIL)
        vals = [full_report(model, lam, Engine.FGGCM, steps).m_tilde_frobenius for lam in model.lambdas]
        buf.write("quantity," + ",".join(f"lambda={lam:g}" for lam in model.lambdas) + "\n")
        buf.write("Mtilde_F," + ",".join(f"{v:.4f}" for v in vals) + "\n")
    elif table == "behaviors":
        buf.write("scenario,lambda,fcm,fgcm,fggcm\n")
        for sid in (ScenarioId.WEB, ScenarioId.CIVIL):
            model = builtin(sid)
            for lam in model.lambdas:
                cells = []
                for e in Engine:
                    _, b = simulate(model, lam, e, steps)
                    cells.append(b.kind.value if b.period is None else f"{b.kind.value}/{b.period}")
                buf.write(f"{sid.value},{lam:g}," + ",".join(cells) + "\n")
    else:
        raise BadInput(f"unknown table {table!r}")
    return buf.getvalue()


def cmd_reproduce(args) -> int:
    _emit(reproduce_table(args.table, _max_steps(args)), args.out)
    return 0


def with_injected_greyness(model: Model, g: float) -> Model:
    """Grey and interval forms built from the crisp form of `model`."""
    crisp = model.crisp_form()
    if crisp is None:
        raise UnsupportedEngine(f"model '{model.name}' has no crisp form to widen")
    W, A = crisp
    W_iv = inject_greyness(W, g, model.weight_domain)
    A_iv = inject_greyness(A, g, model.grey_domain)
    wk, wg = W_iv.to_ggn(model.weight_domain)
    ak, ag = A_iv.to_ggn(model.grey_domain)
    return Model(
        name=model.name,
        activation=model.activation,
        weights=GGNMatrix(wk, wg),
        initial_state=GGNVector(ak, ag),
        grey_domain=model.grey_domain,
        weight_domain=model.weight_domain,
        max_steps=model.max_steps,
        fp_tolerance=model.fp_tolerance,
        cycle_tolerance=model.cycle_tolerance,
        crisp_weights=W,
        crisp_initial=A,
        interval_weights=W_iv,
        interval_initial=A_iv,
        lambdas=model.lambdas,
    )


def cmd_inject(args) -> int:
    if not args.g > 0:
        raise BadInput("--g must be positive")
    model = _load(args)
    _emit(dumps_model(with_injected_greyness(model, args.g)), args.out)
    return 0


def _source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="path to a JSON model file")
    src.add_argument("--scenario", choices=[s.value for s in ScenarioId], help="built-in model")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greymap", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)
    engines = [e.value for e in Engine]

    p = sub.add_parser("simulate", help="run one model and write its trace")
    _source(p)
    p.add_argument("--engine", choices=engines, default="fggcm")
    p.add_argument("--lambda", dest="lam", type=_lambda, required=True)
    p.add_argument("--steps", type=int, help="maximum number of updates")
    p.add_argument("--out", help="trace CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="convergence report per lambda")
    _source(p)
    p.add_argument("--engine", choices=engines, default="fggcm")
    p.add_argument("--lambdas", type=_lambda_list, help="comma separated, default the model's sweep")
    p.add_argument("--steps", type=int)
    p.add_argument("--format", choices=["csv", "kv"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reproduce", help="regenerate a case-study table")
    p.add_argument("table", choices=["T2", "T4", "T5", "T6", "behaviors"])
    p.add_argument("--steps", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("inject-grey", help="widen a crisp model into grey/interval form")
    _source(p)
    p.add_argument("--g", type=float, default=0.01, help="half-width to add (default 0.01)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_inject)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedEngine as exc:
        print(f"greymap: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (BadInput, ModelFileError, ValueError) as exc:
        print(f"greymap: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
