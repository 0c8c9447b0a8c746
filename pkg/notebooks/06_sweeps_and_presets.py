"""
Parameter sweeps and figure presets
===================================

Sweeps vary one parameter and write CSV rows in sweep order.  The same
sweeps are available from the command line, for example::

    twohop simulate --sweep theta=0.4,0.8,1.2 --lambda-s 1 --lambda-r 1.5 --trials 20
    twohop preset fig3 --scale desk -o fig3.csv
"""

# %%
import io

from twohop.experiments import CsvSink, ExperimentSpec, preset, run_experiment

spec = ExperimentSpec(
    mode="simulate",
    config={"model": {"lambda_s": 1.0, "lambda_r": 1.5, "R": 1.0},
            "policy": {"name": "sector"},
            "simulation": {"half_width": 8.0, "guard_margin": 3.0, "n_trials": 10}},
    sweep_axis="theta", sweep_values=[0.2, 0.8, 1.6, 3.0], seed=4)
buf = io.StringIO()
rows = run_experiment(spec, sink=CsvSink(stream=buf))
for r in rows:
    print(f"theta {r['parameter']:.2f}  x {r['x_normalized']:.2f}  "
          f"Ps {r['sim_Ps_composed']:.4f} +- {r['se_Ps_composed']:.4f}")

# %%
# Presets bundle several sweeps, tagged by series.
for s in preset("fig3"):
    print(s.series, s.sweep_axis, [round(v, 3) for v in s.sweep_values])
