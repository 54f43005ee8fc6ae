"""Seeded Monte Carlo recipes. Output is CSV and reruns are byte for byte identical."""

from btlrank.experiments import ExperimentConfig, run_experiment, summarize

cfg = ExperimentConfig("barbell-ratio", trials=5, seed=0, sweep=(50, 100, 200), params={"fit": False})
res = run_experiment(cfg)
summary = summarize(res)
for row in summary.rows:
    print(f"n_s={row['sweep']:>4}: mean bound ratio {row['mean_ratio']:.3f}")

again = run_experiment(cfg)
print("identical rerun:", res.to_csv() == again.to_csv())

res = run_experiment(ExperimentConfig("path-L-sweep", trials=20, seed=1))
print()
print(summarize(res).to_csv())
