import csv
import math

import pytest
import yaml

from twohop import experiments
from twohop.cli import (EXIT_BUDGET, EXIT_CONFIG, EXIT_EMPTY, EXIT_INTERRUPTED, EXIT_OK,
                        main, make_parser)
from twohop.experiments import (COLUMNS, ConfigError, ExperimentSpec, compare_modes,
                                format_value, preset, run_experiment)

SMALL = {"model": {"lambda_s": 0.1, "lambda_r": 1.0, "R": 1.0},
         "simulation": {"half_width": 6.0, "guard_margin": 2.0, "n_trials": 4}}


def spec(**kw):
    base = dict(mode="simulate", config=SMALL, sweep_axis="lambda_r", sweep_values=[0.5, 1.0],
                seed=3)
    base.update(kw)
    return ExperimentSpec(**base)


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSpec:
    @pytest.mark.parametrize("kw, field", [
        ({"mode": "plot"}, "mode"),
        ({"sweep_axis": "alpha"}, "sweep.axis"),
        ({"sweep_values": []}, "sweep.values"),
        ({"sweep_values": [float("inf")]}, "sweep.values"),
        ({"sweep_axis": "delta", "sweep_values": [0.1]}, "sweep.axis"),
        ({"sweep_axis": "R", "sweep_values": [-1.0]}, "sweep value -1.0"),
        ({"config": {"model": {"lambda_q": 1}}}, "model.lambda_q"),
    ])
    def test_diagnostic_names_field(self, kw, field):
        with pytest.raises(ConfigError) as info:
            spec(**kw)
        assert info.value.field == field

    def test_center_is_simulation_only(self):
        with pytest.raises(ConfigError, match="simulation-only"):
            spec(mode="both", config={**SMALL, "policy": {"name": "center"}})

    def test_theta_domain(self):
        with pytest.raises(ConfigError):
            spec(config={**SMALL, "policy": {"name": "sector"}}, sweep_axis="theta",
                 sweep_values=[4.0])


class TestFormatting:
    def test_six_significant_digits(self):
        assert format_value(math.pi) == "3.14159"
        assert format_value(1.23456789e-7) == "1.23457e-07"
        assert format_value(None) == ""
        assert format_value(True) == "true"
        assert format_value(12) == "12"


class TestRunExperiment:
    def test_header_and_rows(self, tmp_path):
        out = tmp_path / "a.csv"
        rows = run_experiment(spec(output=str(out)))
        text = out.read_text().splitlines()
        assert text[0] == ",".join(COLUMNS)
        assert len(text) == 3 and len(rows) == 2
        assert [r["sweep_value"] for r in read(out)] == ["0.5", "1"]

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(spec(output=str(a)))
        run_experiment(spec(output=str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_sweep_point_alone(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(spec(output=str(a)))
        run_experiment(spec(output=str(b), sweep_values=[1.0]))
        assert read(a)[1] == read(b)[0]

    def test_schema_depends_on_mode_only(self, tmp_path):
        heads = set()
        for mode in ("simulate", "analytic", "both"):
            out = tmp_path / f"{mode}.csv"
            run_experiment(spec(mode=mode, output=str(out), sweep_values=[0.0]))
            heads.add(out.read_text().splitlines()[0])
        assert len(heads) == 1

    def test_zero_relays(self, tmp_path):
        rows = run_experiment(spec(mode="both", sweep_values=[0.0]))
        assert len(rows) == 1
        assert rows[0]["sim_P2"] == 0.0 and rows[0]["an_P2"] == 0.0

    def test_analytic_independent_of_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        kw = dict(mode="analytic", sweep_values=[0.0])
        run_experiment(spec(output=str(a), seed=1, **kw))
        run_experiment(spec(output=str(b), seed=2, **kw))
        assert a.read_bytes() == b.read_bytes()

    def test_parameter_sweep_sets_policy_parameter(self):
        s = spec(config={**SMALL, "policy": {"name": "rss"}}, sweep_axis="delta",
                 sweep_values=[0.0, 0.5])
        rows = run_experiment(s)
        assert [r["parameter"] for r in rows] == [0.0, 0.5]
        assert rows[0]["x_normalized"] == 0.0

    def test_worker_pool_preserves_order(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TWOHOP_MAX_WORKERS", "2")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(spec(output=str(a), sweep_values=[1.0, 0.0, 0.5]), workers=4)
        run_experiment(spec(output=str(b), sweep_values=[1.0, 0.0, 0.5]), workers=1)
        assert a.read_bytes() == b.read_bytes()

    def test_timing_column_opt_in(self, tmp_path):
        out = tmp_path / "t.csv"
        run_experiment(spec(output=str(out), sweep_values=[0.5], record_timing=True))
        row = read(out)[0]
        assert float(row["wall_time"]) > 0

    def test_compare_modes(self):
        rows, gap = compare_modes(spec(sweep_values=[0.0]))
        assert rows[0]["mode"] == "both"
        assert gap == rows[0]["gap_Ps"]
        assert gap == pytest.approx(abs(rows[0]["sim_P1"] - rows[0]["an_P1"]), rel=1e-12)


class TestPresets:
    @pytest.mark.parametrize("name", ["fig1", "fig2", "fig3"])
    @pytest.mark.parametrize("scale", ["desk", "full"])
    def test_build(self, name, scale):
        specs = preset(name, scale)
        assert specs and all(s.series for s in specs)

    def test_fig3_series_and_axes(self):
        axes = {s.series: s.sweep_axis for s in preset("fig3")}
        assert axes == {"method1": "lambda_r", "method2": "delta", "method3": "theta",
                        "method4": "epsilon"}
        for s in preset("fig3"):
            assert s.config["model"]["lambda_s"] == 1.0
            assert s.config["model"]["lambda_r"] == 1.5

    def test_unknown(self):
        with pytest.raises(ConfigError):
            preset("fig9")
        with pytest.raises(ConfigError):
            preset("fig1", "huge")


class TestCli:
    def test_help_documents_defaults(self, capsys):
        with pytest.raises(SystemExit):
            make_parser().parse_args(["simulate", "--help"])
        out = capsys.readouterr().out
        assert "lambda_s=0.1" in out and "trials=100" in out and "seed=0" in out

    def test_simulate_to_stdout(self, capsys):
        code = main(["simulate", "--lambda-s", "0.1", "--half-width", "6", "--guard-margin", "2",
                     "--trials", "3", "--sweep", "lambda_r=0,1"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("series,mode") and len(lines) == 3

    def test_config_file_with_overrides(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        out = tmp_path / "o.csv"
        cfg.write_text(yaml.safe_dump({**SMALL, "seed": 5, "sweep": {"axis": "lambda_r",
                                                                    "values": [0.5]}}))
        code = main(["simulate", "--config", str(cfg), "--trials", "2", "--set", "model.R=1.5",
                     "-o", str(out)])
        assert code == EXIT_OK
        row = read(out)[0]
        assert row["R"] == "1.5" and row["n_trials"] == "2" and row["seed"] == "5"

    def test_parameter_sweep_infers_policy(self, tmp_path):
        out = tmp_path / "o.csv"
        code = main(["simulate", "--half-width", "6", "--guard-margin", "2", "--trials", "2",
                     "--sweep", "theta=0.5,1", "-o", str(out)])
        assert code == EXIT_OK
        assert [r["policy"] for r in read(out)] == ["sector", "sector"]

    def test_config_error(self, tmp_path, capsys):
        assert main(["analytic", "--policy", "center"]) == EXIT_CONFIG
        assert main(["simulate", "--sweep", "lambda_r"]) == EXIT_CONFIG
        bad = tmp_path / "bad.yaml"
        bad.write_text("model: [1, 2\n")
        assert main(["simulate", "--config", str(bad)]) == EXIT_CONFIG
        assert "configuration error" in capsys.readouterr().err

    def test_empty_measurement(self):
        assert main(["simulate", "--lambda-s", "0", "--trials", "2"]) == EXIT_EMPTY

    def test_budget(self):
        code = main(["analytic", "--set", "quadrature.max_evaluations=1000"])
        assert code == EXIT_BUDGET

    def test_interrupt_keeps_completed_rows(self, tmp_path, monkeypatch):
        real = experiments.run_point
        calls = []

        def flaky(spec, value):
            calls.append(value)
            if len(calls) == 2:
                raise KeyboardInterrupt
            return real(spec, value)

        monkeypatch.setattr(experiments, "run_point", flaky)
        out = tmp_path / "o.csv"
        code = main(["simulate", "--half-width", "6", "--guard-margin", "2", "--trials", "2",
                     "--sweep", "lambda_r=0.5,1,2", "-o", str(out)])
        assert code == EXIT_INTERRUPTED
        assert [r["sweep_value"] for r in read(out)] == ["0.5"]

    def test_both_prints_max_gap(self, capsys):
        code = main(["both", "--half-width", "6", "--guard-margin", "2", "--trials", "2",
                     "--sweep", "lambda_r=0"])
        assert code == EXIT_OK
        assert "max |Ps_sim - Ps_analytic|" in capsys.readouterr().err
