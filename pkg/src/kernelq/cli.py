"""``kq``: batch front-end emitting CSV tables.

Exit codes: 0 success, 2 bad input, 3 mathematically inadmissible
model, 4 non-convergence. Data goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernel, models, oracle
from .errors import InputError, KernelQueueError
from .pgf import Pgf, from_json
from .series import DEFAULT_ORDER, MAX_ORDER

MODELS = ("single", "random_service", "priority", "tandem")


@dataclass(frozen=True)
class Scenario:
    model: str
    arrivals: Pgf
    arrivals_b: Optional[Pgf] = None
    service_p: float = 1.0
    order: int = DEFAULT_ORDER
    r_max: int = 40
    truncation: int = oracle.DEFAULT_N_MAX
    tol: float = oracle.DEFAULT_TOL

    @classmethod
    def from_json(cls, obj) -> "Scenario":
        if not isinstance(obj, dict):
            raise InputError("scenario must be a JSON object")
        model = obj.get("model")
        if model not in MODELS:
            raise InputError(f"model must be one of {', '.join(MODELS)}; got {model!r}")
        if "arrivals" not in obj:
            raise InputError("scenario is missing 'arrivals'")
        b = None
        if model in ("priority", "tandem"):
            if "arrivals_b" not in obj:
                raise InputError(f"model {model!r} needs 'arrivals_b'")
            b = from_json(obj["arrivals_b"])
        try:
            sc = cls(
                model=model,
                arrivals=from_json(obj["arrivals"]),
                arrivals_b=b,
                service_p=float(obj.get("service_p", 1.0)) if model == "random_service" else 1.0,
                order=_as_int(obj.get("order", DEFAULT_ORDER), "order"),
                r_max=_as_int(obj.get("r_max", 40), "r_max"),
                truncation=_as_int(obj.get("truncation", oracle.DEFAULT_N_MAX), "truncation"),
                tol=float(obj.get("tol", oracle.DEFAULT_TOL)),
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad scenario field: {exc}") from None
        return sc

    def validated(self) -> "Scenario":
        if not 1 <= self.order <= MAX_ORDER:
            raise InputError(f"order must lie in [1, {MAX_ORDER}], got {self.order}")
        if not 0 <= self.r_max <= self.order - models.MIN_ORDER_MARGIN:
            raise InputError(
                f"r_max = {self.r_max} must satisfy 0 <= r_max <= order - {models.MIN_ORDER_MARGIN}")
        if self.r_max > self.truncation:
            raise InputError(f"r_max = {self.r_max} exceeds truncation {self.truncation}")
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol}")
        if not 0.0 < self.service_p <= 1.0:
            raise InputError(f"service_p must lie in (0, 1], got {self.service_p}")
        return self

    def model_spec(self) -> models.ModelSpec:
        if self.model == "single":
            return models.SingleDeterministic(self.arrivals)
        if self.model == "random_service":
            return models.RandomService(self.arrivals, self.service_p)
        if self.model == "priority":
            return models.PriorityLowFlow(self.arrivals, self.arrivals_b)
        return models.TandemSecondQueue(self.arrivals, self.arrivals_b)


def _as_int(x, name: str) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise InputError(f"{name} must be an integer, got {x!r}")
    return int(x)


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([row[0]] + [fmt(x) for x in row[1:]])
    return buf.getvalue()


def _oracle_tail(sc: Scenario) -> tuple:
    a, b = sc.arrivals, sc.arrivals_b
    if sc.model == "single":
        res = oracle.stationary_1d(a, 1.0, sc.truncation, sc.tol)
        axis = "X"
    elif sc.model == "random_service":
        res = oracle.stationary_1d(a, sc.service_p, sc.truncation, sc.tol)
        axis = "X"
    elif sc.model == "priority":
        res = oracle.stationary_2d_priority(a, b, sc.truncation, sc.tol)
        axis = "Y"
    else:
        res = oracle.stationary_2d_tandem(a, b, sc.truncation, sc.tol)
        axis = "Y"
    diag = (f"iterations={res.iterations} final_tv={res.final_tv:.3e} "
            f"clipped_mass_rate={res.clipped_mass_rate:.3e}")
    return oracle.tail_of(res, axis), diag


def run_analyze(sc: Scenario) -> tuple:
    an = models.analyze(sc.model_spec(), sc.order, sc.r_max)
    rs = np.arange(sc.r_max + 1)
    asym, doob = an.asymptotic(rs), an.doob(rs)
    rows = [(int(r), None if an.tail is None else an.tail[r], asym[r], doob[r]) for r in rs]
    return _write_csv(("R", "exact", "asymptotic", "doob"), rows), []


def run_oracle(sc: Scenario) -> tuple:
    sc.model_spec().check()
    tail, diag = _oracle_tail(sc)
    rows = [(r, tail[r]) for r in range(sc.r_max + 1)]
    return _write_csv(("R", "oracle"), rows), [diag]


def run_compare(sc: Scenario) -> tuple:
    an = models.analyze(sc.model_spec(), sc.order, sc.r_max)
    tail, diag = _oracle_tail(sc)
    rs = np.arange(sc.r_max + 1)
    asym, doob = an.asymptotic(rs), an.doob(rs)
    rows = [
        (int(r), None if an.tail is None else an.tail[r], asym[r], doob[r], tail[r],
         tail[r] / asym[r])
        for r in rs
    ]
    return _write_csv(("R", "exact", "asymptotic", "doob", "oracle", "ratio"), rows), [diag]


COMMANDS = {"analyze": run_analyze, "oracle": run_oracle, "compare": run_compare}


def _override(sc: Scenario, args) -> Scenario:
    changes = {}
    for flag, field in (("order", "order"), ("rmax", "r_max"),
                        ("truncation", "truncation"), ("tol", "tol")):
        val = getattr(args, flag, None)
        if val is not None:
            changes[field] = val
    return replace(sc, **changes) if changes else sc


def _run_one(command: str, path: str, args) -> tuple:
    """Returns ``(exit_code, stdout_text, stderr_lines)``."""
    try:
        sc = _override(Scenario.from_json(_load_json(path)), args).validated()
        out, diag = COMMANDS[command](sc)
        return 0, out, diag
    except KernelQueueError as exc:
        return exc.exit_code, "", [f"{type(exc).__name__}: {exc}"]


def cmd_scenarios(args) -> int:
    paths = args.scenarios
    jobs = max(1, getattr(args, "jobs", None) or 1)
    if jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda p: _run_one(args.command, p, args), paths))
    else:
        results = [_run_one(args.command, p, args) for p in paths]
    status = 0
    for path, (code, out, diag) in zip(paths, results):
        for line in diag:
            print(line if len(paths) == 1 else f"{path}: {line}", file=sys.stderr)
        if out:
            if len(paths) > 1:
                sys.stdout.write(f"# {path}\n")
            sys.stdout.write(out)
        status = status or code
    return status


def cmd_gw(args) -> int:
    try:
        a = from_json(_load_json(args.pgf))
        if args.beta:
            print(fmt(kernel.second_fixed_point(a)))
            return 0
        t = kernel.build_tree_function(a)
        if args.eval is not None:
            print(fmt(kernel.tree_eval(t, args.eval)))
        elif args.series is not None:
            if args.series < 1:
                raise InputError("--series needs a positive order")
            s = kernel.tree_series(t, args.series)
            sys.stdout.write(_write_csv(("n", "coefficient"), enumerate(s.coeffs)))
        else:
            sys.stdout.write(f"tau,rho\n{fmt(t.tau)},{fmt(t.rho)}\n")
    except KernelQueueError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=argparse.SUPPRESS,
                        help="series truncation order (default 128)")
    common.add_argument("--rmax", type=int, default=argparse.SUPPRESS,
                        help="largest R in the output table (default 40)")
    common.add_argument("--truncation", type=int, default=argparse.SUPPRESS,
                        help="oracle state-space cap per queue (default 200)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="oracle total-variation stopping threshold (default 1e-12)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="threads used when several scenario files are given")

    parser = argparse.ArgumentParser(
        prog="kq", parents=[common],
        description="Stationary tails of discrete-time queues by the kernel method.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("analyze", "exact, asymptotic and Doob tail curves"),
                       ("oracle", "tail from exact iteration of the truncated chain"),
                       ("compare", "analytic and oracle columns side by side")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("scenarios", nargs="+", metavar="scenario.json",
                       help="scenario file, or - for standard input")
        p.set_defaults(func=cmd_scenarios)

    gw = sub.add_parser("gw", parents=[common], help="Galton-Watson tree function utilities")
    gw.add_argument("pgf", metavar="pgf.json")
    what = gw.add_mutually_exclusive_group(required=True)
    what.add_argument("--beta", action="store_true", help="second fixed point of A")
    what.add_argument("--eval", type=float, metavar="Z", help="T_A(Z)")
    what.add_argument("--series", type=int, metavar="N", help="coefficients of T_A up to z^N")
    what.add_argument("--radius", action="store_true", help="tangency point tau and radius rho")
    gw.set_defaults(func=cmd_gw)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
