"""Command-line front end: ``btlrank {graph gen,simulate,fit,bounds,experiment}``.

Exit status is 0 on success, 2 for malformed input or invalid arguments, and
3 for numerical failures (including a non-existent MLE).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from typing import Sequence

from . import bounds as B
from . import graph as G
from .errors import MLENonexistenceError, NumericalError, ValidationError
from .estimators import FitConfig, fit, fit_tree_closed_form
from .experiments import DEFAULTS, ExperimentConfig, format_value, run_experiment, summarize
from .model import BtlParameters, linear_theta, read_data, simulate

EXIT_INPUT = 2
EXIT_NUMERIC = 3

TOPOLOGIES = (
    "complete", "path", "star", "cycle", "bipartite", "banded",
    "cayley", "erdos-renyi", "island", "barbell", "tree",
)


def _out(path: str | None):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w")


def _build_graph(a: argparse.Namespace) -> G.ComparisonGraph:
    t, n = a.topology, a.n
    need_n = t not in ("bipartite", "island", "barbell")
    if need_n and n is None:
        raise ValidationError(f"--n is required for topology {t}")
    if t == "complete":
        return G.complete(n)
    if t == "path":
        return G.path(n)
    if t == "star":
        return G.star(n)
    if t == "cycle":
        return G.cycle(n)
    if t == "tree":
        return G.random_tree(n, a.seed)
    if t == "bipartite":
        return G.complete_bipartite(a.m1, a.m2)
    if t == "banded":
        return G.banded(n, a.k)
    if t == "cayley":
        return G.cayley(n, a.d)
    if t == "erdos-renyi":
        if a.p is None:
            raise ValidationError("--p is required for erdos-renyi")
        return G.erdos_renyi(n, a.p, a.seed)
    if t == "island":
        return G.island(a.islands, a.n_island, a.n_overlap)
    if t == "barbell":
        if a.bridges is not None:
            return G.barbell(a.m1, a.m2, count=a.bridges, seed=a.seed)
        if a.p is None:
            raise ValidationError("barbell needs --bridges or --p")
        return G.barbell(a.m1, a.m2, p=a.p, seed=a.seed)
    raise ValidationError(f"unknown topology {t!r}")


def cmd_graph_gen(a) -> None:
    g = _build_graph(a)
    with _out(a.out) as fh:
        json.dump(g.to_dict(), fh)
        fh.write("\n")


def _truth(a, g: G.ComparisonGraph) -> BtlParameters:
    if a.theta:
        with open(a.theta) as fh:
            try:
                values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{a.theta}: not valid JSON ({exc})") from None
        if isinstance(values, dict):
            values = values.get("theta")
        if not isinstance(values, list) or len(values) != g.n:
            raise ValidationError(f"{a.theta}: expected a list of {g.n} scores")
        return BtlParameters.centered(values)
    return linear_theta(g.n, a.kappa)


def cmd_simulate(a) -> None:
    g = G.read_graph(a.graph)
    truth = _truth(a, g)
    data = simulate(g, truth, a.L, a.seed)
    with _out(a.out) as fh:
        json.dump(data.to_dict(), fh)
        fh.write("\n")
    if a.theta_out:
        with open(a.theta_out, "w") as fh:
            json.dump({"theta": truth.theta.tolist()}, fh)
            fh.write("\n")


def _parse_rho(text: str) -> str | float:
    if text == "auto":
        return "auto"
    try:
        rho = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--rho must be a number or 'auto', got {text!r}") from None
    if rho < 0 or not math.isfinite(rho):
        raise argparse.ArgumentTypeError("--rho must be non-negative")
    return rho


def cmd_fit(a) -> None:
    data = read_data(a.data)
    if a.closed_form:
        result = fit_tree_closed_form(data)
    else:
        kw = {"grad_tol": a.grad_tol, "max_iters": a.max_iters}
        config = FitConfig.auto(**kw) if a.rho == "auto" else FitConfig(rho=a.rho, **kw)
        result = fit(data, config)
    with _out(a.out) as fh:
        json.dump(result.to_dict(), fh)
        fh.write("\n")


def cmd_bounds(a) -> None:
    g = G.read_graph(a.graph)
    truth = _truth(a, g)
    rho = None if a.rho in (None, "auto") else a.rho
    report = B.bound_report(g, a.L, truth, rho=rho)
    rows = report.rows()
    if not a.all:
        rows = [(k, v) for k, v in rows if v is not None]
    with _out(a.out) as fh:
        if a.format == "json":
            json.dump({"bounds": dict(rows), "disclaimer": report.disclaimer}, fh)
            fh.write("\n")
        else:
            fh.write("bound,value\n")
            for name, value in rows:
                fh.write(f"{name},{format_value(value)}\n")


def _parse_sweep(text: str | None) -> tuple:
    if not text:
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            v = float(tok)
        except ValueError:
            raise ValidationError(f"bad sweep value {tok!r}") from None
        out.append(int(v) if v.is_integer() else v)
    return tuple(out)


def _parse_params(pairs: Sequence[str], experiment_id: str) -> dict:
    defaults = DEFAULTS[experiment_id]["params"]
    params = {}
    for item in pairs or ():
        if "=" not in item:
            raise ValidationError(f"--param expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        if key not in defaults:
            raise ValidationError(f"unknown parameter {key!r} for {experiment_id}")
        kind = type(defaults[key])
        if kind is bool:
            params[key] = raw.lower() in ("1", "true", "yes")
        else:
            try:
                params[key] = kind(raw)
            except ValueError:
                raise ValidationError(f"parameter {key} expects {kind.__name__}, got {raw!r}") from None
    return params


def cmd_experiment(a) -> None:
    params = _parse_params(a.param, a.experiment_id)
    for flag, key in (("L", "L"), ("kappa", "kappa"), ("n", "n")):
        value = getattr(a, flag)
        if value is not None:
            if key not in DEFAULTS[a.experiment_id]["params"]:
                raise ValidationError(f"--{flag} does not apply to {a.experiment_id}")
            params[key] = value
    config = ExperimentConfig(
        a.experiment_id,
        trials=a.trials,
        seed=a.seed,
        sweep=_parse_sweep(a.sweep),
        params=params,
        timing=a.timing,
    )
    result = run_experiment(config)
    if a.aggregate:
        result = summarize(result)
    with _out(a.out) as fh:
        if a.format == "json":
            json.dump({"columns": result.columns, "rows": [
                {c: format_value(r.get(c)) for c in result.columns} for r in result.rows
            ]}, fh)
            fh.write("\n")
        else:
            fh.write(result.to_csv())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="btlrank", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    gp = sub.add_parser("graph", help="graph utilities")
    gsub = gp.add_subparsers(dest="graph_command", required=True)
    gen = gsub.add_parser("gen", help="generate a comparison graph as JSON")
    gen.add_argument("--topology", required=True, choices=TOPOLOGIES)
    gen.add_argument("--n", type=int)
    gen.add_argument("--p", type=float, help="edge density (erdos-renyi) or bridge density (barbell)")
    gen.add_argument("--k", type=int, help="band half-width (banded)")
    gen.add_argument("--d", type=int, help="circular reach (cayley)")
    gen.add_argument("--m1", type=int, help="first part or clique size")
    gen.add_argument("--m2", type=int, help="second part or clique size")
    gen.add_argument("--islands", type=int, default=3)
    gen.add_argument("--n-island", type=int, default=50)
    gen.add_argument("--n-overlap", type=int, default=5)
    gen.add_argument("--bridges", type=int, help="bridge count (barbell)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_graph_gen)

    sim = sub.add_parser("simulate", help="simulate BTL outcomes on a graph")
    sim.add_argument("--graph", required=True)
    sim.add_argument("--L", type=int, required=True)
    sim.add_argument("--kappa", type=float, default=2.2, help="spread of the equally spaced truth")
    sim.add_argument("--theta", help="JSON list (or {'theta': [...]}) of true scores")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out")
    sim.add_argument("--theta-out", help="also write the true scores here")
    sim.set_defaults(func=cmd_simulate)

    ft = sub.add_parser("fit", help="fit the MLE to comparison data")
    ft.add_argument("--data", required=True)
    ft.add_argument("--rho", type=_parse_rho, default=0.0, help="number or 'auto'")
    ft.add_argument("--grad-tol", type=float, default=1e-8)
    ft.add_argument("--max-iters", type=int)
    ft.add_argument("--closed-form", action="store_true", help="exact vanilla MLE on a tree")
    ft.add_argument("--out")
    ft.set_defaults(func=cmd_fit)

    bd = sub.add_parser("bounds", help="evaluate error bounds for a graph")
    bd.add_argument("--graph", required=True)
    bd.add_argument("--L", type=int, required=True)
    bd.add_argument("--kappa", type=float, default=2.2)
    bd.add_argument("--theta")
    bd.add_argument("--rho", type=_parse_rho, default=None,
                    help="evaluate the general-rho form; omit for the tuned form")
    bd.add_argument("--all", action="store_true", help="include not-applicable bounds as NA")
    bd.add_argument("--format", choices=("csv", "json"), default="csv")
    bd.add_argument("--out")
    bd.set_defaults(func=cmd_bounds)

    ex = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    ex.add_argument("experiment_id", choices=sorted(DEFAULTS))
    ex.add_argument("--trials", type=int, default=20)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--sweep", help="comma-separated sweep values")
    ex.add_argument("--L", type=int)
    ex.add_argument("--kappa", type=float)
    ex.add_argument("--n", type=int)
    ex.add_argument("--param", action="append", metavar="KEY=VALUE")
    ex.add_argument("--aggregate", action="store_true", help="emit per-sweep summary rows")
    ex.add_argument("--timing", action="store_true", help="add a runtime column (not reproducible)")
    ex.add_argument("--format", choices=("csv", "json"), default="csv")
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"btlrank: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MLENonexistenceError, NumericalError) as exc:
        print(f"btlrank: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
