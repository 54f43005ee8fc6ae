"""Monte Carlo experiment recipes with seeded, order-independent trials.

Every recipe maps an :class:`ExperimentConfig` to an :class:`ExperimentResult`
holding one row per (sweep value, trial, estimator). Trial seeds are derived
from ``(seed, sweep index, trial index)`` through ``numpy.random.SeedSequence``,
so results do not depend on the number of worker threads or on the order in
which trials finish.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bounds as B
from .ensemble import SubgraphFit, add_mle_barbell, add_mle_island_chain
from .errors import BtlError, MLENonexistenceError, ValidationError
from .estimators import FitConfig, d_infinity, fit, fit_tree_closed_form
from .graph import ComparisonGraph, banded, barbell, island, island_blocks, path, spectral_summary
from .model import (
    kappa_E,
    linear_theta,
    shifted_barbell_theta,
    shifted_island_theta,
    simulate,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "EXPERIMENTS",
    "DEFAULTS",
    "trial_seed",
    "run_experiment",
    "run_island_additivity",
    "run_barbell_ratio",
    "run_banded_compare",
    "run_path_L_sweep",
    "run_barbell_additivity",
    "summarize",
    "format_value",
]

BASE_COLUMNS = ["experiment", "sweep", "trial", "estimator", "status", "linf_error", "l2_error"]

DEFAULTS: dict[str, dict] = {
    "island-additivity": {
        "sweep": (0.0, 1.0, 2.0, 3.0),
        "params": {"k": 3, "n_island": 50, "n_overlap": 5, "L": 10, "kappa": 2.2, "anchor": "first"},
    },
    "barbell-ratio": {
        "sweep": (50, 100, 200, 400),
        "params": {"L": 10, "kappa": 2.2, "p_factor": 3.0, "fit": True},
    },
    "banded-compare": {
        "sweep": (50, 100, 200),
        "params": {"L": 10, "band": "sqrt"},
    },
    "path-L-sweep": {
        "sweep": (1_000, 10_000, 100_000),
        "params": {"n": 50, "kappa": 6.9},
    },
    "barbell-additivity": {
        "sweep": (0.0, 1.0, 2.0, 3.0, 4.0),
        "params": {"n_s": 50, "n_bridges": 10, "L": 10, "L_bridge": 100, "kappa": 2.2},
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    trials: int = 20
    seed: int = 0
    sweep: tuple = ()
    params: dict = field(default_factory=dict)
    threads: int | None = None
    timing: bool = False

    def __post_init__(self):
        if self.experiment_id not in DEFAULTS:
            raise ValidationError(
                f"unknown experiment {self.experiment_id!r}; choose from {sorted(DEFAULTS)}"
            )
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        unknown = set(self.params) - set(DEFAULTS[self.experiment_id]["params"])
        if unknown:
            raise ValidationError(f"unknown parameters for {self.experiment_id}: {sorted(unknown)}")
        if not self.resolved_sweep():
            raise ValidationError("sweep must not be empty")

    def resolved_sweep(self) -> tuple:
        return tuple(self.sweep) if self.sweep else DEFAULTS[self.experiment_id]["sweep"]

    def resolved_params(self) -> dict:
        return {**DEFAULTS[self.experiment_id]["params"], **self.params}

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        return max(1, int(os.environ.get("BTLRANK_THREADS", "1")))


@dataclass
class ExperimentResult:
    experiment_id: str
    columns: list[str]
    rows: list[dict]

    def to_csv(self) -> str:
        return _to_csv(self.columns, self.rows)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def column(self, name: str, **where) -> np.ndarray:
        """Float array of ``name`` over rows matching ``where`` (missing values are NaN)."""
        out = [
            np.nan if r.get(name) is None else float(r[name])
            for r in self.rows
            if all(r.get(k) == v for k, v in where.items())
        ]
        return np.array(out, dtype=float)


def format_value(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "NA"
        return format(float(v), ".17g")
    return str(v)


def _to_csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def trial_seed(seed: int, sweep_index: int, trial: int) -> np.random.SeedSequence:
    """Seed sequence for one trial; spawn children for independent streams."""
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, sweep_index, trial])


def _child_seeds(ss: np.random.SeedSequence, k: int) -> list[int]:
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(k)]


def _l2_error(theta_hat, theta_star) -> float:
    a = np.asarray(getattr(theta_hat, "theta", theta_hat), dtype=float)
    b = np.asarray(getattr(theta_star, "theta", theta_star), dtype=float)
    return float(np.linalg.norm((a - a.mean()) - (b - b.mean())))


def _run_trials(
    config: ExperimentConfig,
    columns: list[str],
    trial_fn: Callable[[float, np.random.SeedSequence, dict], list[dict]],
    estimators: Sequence[str],
) -> ExperimentResult:
    params = config.resolved_params()
    sweep = config.resolved_sweep()
    tasks = [(si, sv, t) for si, sv in enumerate(sweep) for t in range(config.trials)]

    def one(task):
        si, sv, t = task
        start = time.perf_counter()
        try:
            rows = trial_fn(sv, trial_seed(config.seed, si, t), params)
        except MLENonexistenceError:
            rows = [{"estimator": e, "status": "mle-nonexistent"} for e in estimators]
        except BtlError as exc:
            rows = [{"estimator": e, "status": f"failed:{type(exc).__name__}"} for e in estimators]
        elapsed = time.perf_counter() - start
        for r in rows:
            r.setdefault("status", "ok")
            r.update(experiment=config.experiment_id, sweep=sv, trial=t)
            if config.timing:
                r["runtime_s"] = elapsed
        return rows

    threads = config.resolved_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, tasks))
    else:
        chunks = [one(task) for task in tasks]
    cols = BASE_COLUMNS + columns + (["runtime_s"] if config.timing else [])
    return ExperimentResult(config.experiment_id, cols, [r for c in chunks for r in c])


# --------------------------------------------------------------------------
# recipes


def run_island_additivity(config: ExperimentConfig) -> ExperimentResult:
    """Joint regularised MLE versus island-chain add-MLE while sweeping the island shift."""

    def trial(shift, ss, p):
        k, ni, no = p["k"], p["n_island"], p["n_overlap"]
        (data_seed,) = _child_seeds(ss, 1)
        g = island(k, ni, no)
        truth = shifted_island_theta(k, ni, no, p["kappa"], shift)
        data = simulate(g, truth, p["L"], data_seed)
        auto = FitConfig.auto()
        joint = fit(data, auto).theta
        local = []
        for blk in island_blocks(k, ni, no):
            sub, idx = data.restrict(blk)
            local.append(SubgraphFit.from_fit(idx, fit(sub, auto), p["L"]))
        add = add_mle_island_chain(local, ni, no, anchor=p["anchor"]).theta
        extra = {"n": g.n, "kappa_E": kappa_E(truth, g)}
        return [
            {"estimator": name, "linf_error": d_infinity(est, truth), "l2_error": _l2_error(est, truth), **extra}
            for name, est in (("joint-mle", joint), ("add-mle", add))
        ]

    return _run_trials(config, ["n", "kappa_E"], trial, ["joint-mle", "add-mle"])


def run_barbell_ratio(config: ExperimentConfig) -> ExperimentResult:
    """Ratio of the main sup-norm bound to the common-neighbour bound on random-bridge barbells."""

    def trial(n_s, ss, p):
        n_s = int(n_s)
        graph_seed, data_seed = _child_seeds(ss, 2)
        density = min(1.0, p["p_factor"] * math.log(n_s) / n_s)
        g = barbell(n_s, n_s, p=density, seed=graph_seed)
        truth = linear_theta(g.n, p["kappa"])
        inputs = B.BoundInputs(
            spectral=spectral_summary(g), L=p["L"], kappa=truth.kappa, kappa_E=kappa_E(truth, g)
        )
        ours = B.linf_upper_thm1(inputs)
        yan = B.yan_linf_bound(inputs)
        row = {
            "estimator": "joint-mle",
            "n_s": n_s,
            "n_bridges": g.m - n_s * (n_s - 1),
            "lambda2": inputs.spectral.lambda2,
            "min_common_neighbors": inputs.spectral.min_common_neighbors,
            "bound_linf": ours,
            "bound_yan": yan,
            "ratio": None if yan is None else ours / yan,
        }
        if p["fit"]:
            est = fit(simulate(g, truth, p["L"], data_seed), FitConfig.auto()).theta
            row.update(linf_error=d_infinity(est, truth), l2_error=_l2_error(est, truth))
        return [row]

    cols = ["n_s", "n_bridges", "lambda2", "min_common_neighbors", "bound_linf", "bound_yan", "ratio"]
    return _run_trials(config, cols, trial, ["joint-mle"])


def band_width(n: int, rule: str) -> int:
    if rule == "sqrt":
        k = math.ceil(math.sqrt(n))
    elif rule == "n-over-log":
        k = math.ceil(n / math.log(n))
    else:
        raise ValidationError(f"unknown band rule {rule!r}; use 'sqrt' or 'n-over-log'")
    return min(max(k, 1), n - 1)


def run_banded_compare(config: ExperimentConfig) -> ExperimentResult:
    """Euclidean error on banded graphs against bounds using the edge gap, the full gap, and the box radius."""

    def trial(n, ss, p):
        n = int(n)
        (data_seed,) = _child_seeds(ss, 1)
        k = band_width(n, p["band"])
        g = banded(n, k)
        kappa = math.log(n)
        truth = linear_theta(n, kappa)
        inputs = B.BoundInputs(
            spectral=spectral_summary(g), L=p["L"], kappa=kappa, kappa_E=kappa_E(truth, g)
        )
        with_kappa = B.BoundInputs(spectral=inputs.spectral, L=p["L"], kappa=kappa, kappa_E=kappa)
        est = fit(simulate(g, truth, p["L"], data_seed), FitConfig.auto()).theta
        return [
            {
                "estimator": "joint-mle",
                "linf_error": d_infinity(est, truth),
                "l2_error": _l2_error(est, truth),
                "n": n,
                "k": k,
                "kappa": kappa,
                "kappa_E": inputs.kappa_E,
                "bound_l2_kappa_E": B.l2_upper_thm1(inputs),
                "bound_l2_kappa": B.l2_upper_thm1(with_kappa),
                "bound_shah_l2sq": B.shah_l2_bound(inputs),
            }
        ]

    cols = ["n", "k", "kappa", "kappa_E", "bound_l2_kappa_E", "bound_l2_kappa", "bound_shah_l2sq"]
    return _run_trials(config, cols, trial, ["joint-mle"])


def run_path_L_sweep(config: ExperimentConfig) -> ExperimentResult:
    """Closed-form vanilla MLE on a path while sweeping the per-edge comparison count."""

    def trial(L, ss, p):
        L = int(L)
        (data_seed,) = _child_seeds(ss, 1)
        g = path(int(p["n"]))
        truth = linear_theta(g.n, p["kappa"])
        extra = {"n": g.n, "L": L, "kappa_E": kappa_E(truth, g)}
        data = simulate(g, truth, L, data_seed)
        try:
            est = fit_tree_closed_form(data).theta
        except MLENonexistenceError:
            return [{"estimator": "closed-form-mle", "status": "mle-nonexistent", **extra}]
        return [
            {
                "estimator": "closed-form-mle",
                "linf_error": d_infinity(est, truth),
                "l2_error": _l2_error(est, truth),
                **extra,
            }
        ]

    return _run_trials(config, ["n", "L", "kappa_E"], trial, ["closed-form-mle"])


def run_barbell_additivity(config: ExperimentConfig) -> ExperimentResult:
    """Joint MLE versus bridge-log-odds add-MLE on a barbell with heavily sampled bridges."""

    def trial(shift, ss, p):
        n_s = int(p["n_s"])
        graph_seed, data_seed, bridge_seed = _child_seeds(ss, 3)
        g = barbell(n_s, n_s, count=int(p["n_bridges"]), seed=graph_seed)
        n = g.n
        crossing = (g.edges[:, 0] < n_s) & (g.edges[:, 1] >= n_s)
        cliques = ComparisonGraph(n, g.edges[~crossing])
        bridges = ComparisonGraph(n, g.edges[crossing])
        truth = shifted_barbell_theta(n, p["kappa"], shift)
        d_cliques = simulate(cliques, truth, p["L"], data_seed)
        d_bridges = simulate(bridges, truth, p["L_bridge"], bridge_seed)
        auto = FitConfig.auto()
        joint = fit([d_cliques, d_bridges], auto).theta
        halves = []
        for nodes in (range(n_s), range(n_s, n)):
            sub, idx = d_cliques.restrict(nodes)
            halves.append(SubgraphFit.from_fit(idx, fit(sub, auto), p["L"]))
        add = add_mle_barbell(halves[0], halves[1], d_bridges).theta
        return [
            {"estimator": name, "linf_error": d_infinity(est, truth), "l2_error": _l2_error(est, truth)}
            for name, est in (("joint-mle", joint), ("add-mle", add))
        ]

    return _run_trials(config, [], trial, ["joint-mle", "add-mle"])


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "island-additivity": run_island_additivity,
    "barbell-ratio": run_barbell_ratio,
    "banded-compare": run_banded_compare,
    "path-L-sweep": run_path_L_sweep,
    "barbell-additivity": run_barbell_additivity,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return EXPERIMENTS[config.experiment_id](config)


SUMMARY_SKIP = set(BASE_COLUMNS) | {"runtime_s"}


def summarize(result: ExperimentResult) -> ExperimentResult:
    """Per (sweep, estimator): trial counts, mean/std/quantiles of errors, means of other numeric columns."""
    extra = [c for c in result.columns if c not in SUMMARY_SKIP]
    groups: dict[tuple, list[dict]] = {}
    for r in result.rows:
        groups.setdefault((r["sweep"], r["estimator"]), []).append(r)
    out = []
    for (sv, est), rows in groups.items():
        ok = [r for r in rows if r["status"] == "ok"]
        row = {
            "experiment": result.experiment_id,
            "sweep": sv,
            "estimator": est,
            "trials_ok": len(ok),
            "trials_failed": len(rows) - len(ok),
        }
        for metric in ("linf_error", "l2_error"):
            vals = np.array([r[metric] for r in ok if r.get(metric) is not None], dtype=float)
            short = metric.split("_")[0]
            if vals.size:
                q05, q50, q95 = np.quantile(vals, [0.05, 0.5, 0.95])
                row.update(
                    {
                        f"{short}_mean": vals.mean(),
                        f"{short}_std": vals.std(ddof=1) if vals.size > 1 else 0.0,
                        f"{short}_q05": q05,
                        f"{short}_q50": q50,
                        f"{short}_q95": q95,
                    }
                )
        for c in extra:
            vals = [r.get(c) for r in rows if isinstance(r.get(c), (int, float)) and not isinstance(r.get(c), bool)]
            vals = [v for v in vals if not math.isnan(v)]
            row[f"mean_{c}"] = float(np.mean(vals)) if vals else None
        out.append(row)
    cols = ["experiment", "sweep", "estimator", "trials_ok", "trials_failed"]
    for short in ("linf", "l2"):
        cols += [f"{short}_{s}" for s in ("mean", "std", "q05", "q50", "q95")]
    cols += [f"mean_{c}" for c in extra]
    return ExperimentResult(result.experiment_id, cols, out)
