import csv
from pathlib import Path

import pytest

from pcosync.cli import (
    CSV_COLUMNS,
    load_config,
    load_profile,
    main,
    parse_queries,
    parse_range,
)


def read_csv(path: Path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_COLUMNS
    assert rows[-1][0].startswith("# status:")
    return rows[1:-1], rows[-1][0]


class TestParseRange:
    def test_single_value(self):
        assert parse_range("3", int) == [3]

    def test_comma_list(self):
        assert parse_range("1,2,4", int) == [1, 2, 4]

    def test_inclusive_int_range(self):
        assert parse_range("1:1:4", int) == [1, 2, 3, 4]

    def test_inclusive_float_range(self):
        assert parse_range("0.1:0.1:1.0", float) == pytest.approx(
            [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        )

    def test_bad_step(self):
        with pytest.raises(ValueError):
            parse_range("1:0:5", int)


class TestParseQueries:
    def test_valid(self):
        assert parse_queries(["time:avg", "power:max"]) == [
            ("time", "avg"),
            ("power", "max"),
        ]

    def test_invalid(self):
        with pytest.raises(ValueError):
            parse_queries(["fuel:avg"])
        with pytest.raises(ValueError):
            parse_queries(["time:median"])


class TestLoadConfig:
    def test_comments_and_repeats(self, tmp_path):
        cfg = tmp_path / "sweep.conf"
        cfg.write_text("# full sweep\nn = 8\nr = 1\nr = 2  # second range\n")
        assert load_config(str(cfg)) == {"n": ["8"], "r": ["1", "2"]}

    def test_bad_line(self, tmp_path):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("n 8\n")
        with pytest.raises(ValueError):
            load_config(str(cfg))


class TestAnalyze:
    def test_single_row(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main([
            "analyze", "--n", "3", "--t", "4", "--r", "1", "--eps", "0.1",
            "--mu", "0.2", "--lambda", "0.5", "--query", "time:avg",
            "--output", str(out),
        ])
        assert code == 0
        rows, status = read_csv(out)
        assert status == "# status: ok"
        (row,) = rows
        record = dict(zip(CSV_COLUMNS, row))
        assert record["N"] == "3" and record["metric"] == "time"
        assert record["U"] == ""
        assert float(record["value"]) >= 0.0
        assert record["per_node_mWh"] == ""

    def test_sweep_row_count(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main([
            "analyze", "--n", "2", "--t", "3", "--r", "0,1", "--eps", "0.5",
            "--mu", "0.2", "--lambda", "0.5,1.0",
            "--query", "time:avg", "--query", "power:max",
            "--output", str(out),
        ])
        assert code == 0
        rows, _ = read_csv(out)
        assert len(rows) == 2 * 2 * 2  # r values x lambda values x queries

    def test_unreachable_target_reports_inf(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main([
            "analyze", "--n", "2", "--t", "2", "--r", "1", "--eps", "0.1",
            "--mu", "0.2", "--lambda", "1.0", "--query", "time:avg",
            "--output", str(out),
        ])
        assert code == 0
        (row,), _ = read_csv(out)
        record = dict(zip(CSV_COLUMNS, row))
        assert record["value"] == "inf"
        assert float(record["reach_probability"]) < 1.0

    def test_invalid_params_exit_code(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code = main([
            "analyze", "--n", "0", "--t", "4", "--r", "1", "--eps", "0.1",
            "--mu", "0.2", "--output", str(out),
        ])
        assert code == 1
        _, status = read_csv(out)
        assert status.startswith("# status: error")

    def test_state_cap_exit_code(self, tmp_path):
        code = main([
            "analyze", "--n", "6", "--t", "6", "--r", "1", "--eps", "0.1",
            "--mu", "0.2", "--max-states", "10",
            "--output", str(tmp_path / "out.csv"),
        ])
        assert code == 1

    def test_config_file_with_override(self, tmp_path):
        cfg = tmp_path / "run.conf"
        cfg.write_text(
            "n = 3\nt = 4\nr = 1\neps = 0.1\nmu = 0.2\nlambda = 1.0\nquery = time:avg\n"
        )
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(["analyze", "--config", str(cfg), "--output", str(out_a)]) == 0
        assert main([
            "analyze", "--config", str(cfg), "--r", "2", "--output", str(out_b)
        ]) == 0
        (row_a,), _ = read_csv(out_a)
        (row_b,), _ = read_csv(out_b)
        assert dict(zip(CSV_COLUMNS, row_a))["R"] == "1"
        assert dict(zip(CSV_COLUMNS, row_b))["R"] == "2"

    def test_identical_flags_identical_output(self, tmp_path):
        args = [
            "analyze", "--n", "2", "--t", "3", "--r", "1", "--eps", "0.5",
            "--mu", "0.2", "--lambda", "1.0", "--query", "power:avg",
        ]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(args + ["--output", str(out_a)]) == 0
        assert main(args + ["--output", str(out_b)]) == 0
        rows_a, _ = read_csv(out_a)
        rows_b, _ = read_csv(out_b)
        # wall_ms differs between runs; everything else must not
        assert [r[:-1] for r in rows_a] == [r[:-1] for r in rows_b]


class TestRestab:
    def test_u_column_and_state_reduction(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main([
            "restab", "--n", "10", "--t", "10", "--r", "4", "--eps", "0.1",
            "--mu", "0.2", "--u", "1", "--lambda", "1.0",
            "--query", "power:avg", "--output", str(out),
        ])
        assert code == 0
        (row,), _ = read_csv(out)
        record = dict(zip(CSV_COLUMNS, row))
        assert record["U"] == "1"
        assert int(record["states"]) < 92378  # full state space for N=10, T=10
        assert record["per_node_mWh"] != ""

    def test_u_equal_n_rejected(self, tmp_path):
        code = main([
            "restab", "--n", "5", "--t", "4", "--r", "1", "--eps", "0.1",
            "--mu", "0.2", "--u", "5", "--output", str(tmp_path / "o.csv"),
        ])
        assert code == 1


class TestExport:
    def test_golden_files(self, tmp_path, capsys):
        code = main([
            "export", "--n", "2", "--t", "2", "--r", "1", "--eps", "0.1",
            "--mu", "0", "--out", str(tmp_path / "model"),
        ])
        assert code == 0
        golden_dir = Path(__file__).parent / "golden"
        for suffix in (".sta", ".tra", ".time.trew", ".power.trew"):
            got = (tmp_path / "model").with_suffix(suffix)
            assert got.read_bytes() == (golden_dir / f"n2t2mu0{suffix}").read_bytes()

    def test_multiple_tuples_rejected(self, tmp_path):
        code = main([
            "export", "--n", "2,3", "--t", "2", "--r", "1", "--eps", "0.1",
            "--mu", "0", "--out", str(tmp_path / "model"),
        ])
        assert code == 1


class TestSimulate:
    def test_seed_required(self, tmp_path):
        code = main([
            "simulate", "--n", "2", "--t", "3", "--r", "1", "--eps", "0.5",
            "--mu", "0.2", "--output", str(tmp_path / "o.csv"),
        ])
        assert code == 1

    def test_fixed_seed_reproducible(self, tmp_path):
        args = [
            "simulate", "--n", "2", "--t", "3", "--r", "1", "--eps", "0.5",
            "--mu", "0.2", "--samples", "2000", "--seed", "42",
        ]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(args + ["--output", str(out_a)]) == 0
        assert main(args + ["--output", str(out_b)]) == 0
        rows_a, _ = read_csv(out_a)
        rows_b, _ = read_csv(out_b)
        assert [r[:-1] for r in rows_a] == [r[:-1] for r in rows_b]

    def test_single_oscillator_matches_analyze(self, tmp_path):
        base = ["--n", "1", "--t", "4", "--r", "1", "--eps", "0.1", "--mu", "0"]
        sim_out = tmp_path / "sim.csv"
        an_out = tmp_path / "an.csv"
        assert main(["simulate", *base, "--seed", "1", "--samples", "100",
                     "--output", str(sim_out)]) == 0
        assert main(["analyze", *base, "--output", str(an_out)]) == 0
        (sim_row,), _ = read_csv(sim_out)
        (an_row,), _ = read_csv(an_out)
        sim = dict(zip(CSV_COLUMNS, sim_row))
        exact = dict(zip(CSV_COLUMNS, an_row))
        assert sim["value"] == exact["value"] == "0"

    def test_min_aggregate_rejected(self, tmp_path):
        code = main([
            "simulate", "--n", "2", "--t", "3", "--r", "1", "--eps", "0.5",
            "--mu", "0.2", "--seed", "1", "--query", "time:min",
            "--output", str(tmp_path / "o.csv"),
        ])
        assert code == 1


class TestProfiles:
    def test_builtin(self):
        assert load_profile("micaz").receive_a == pytest.approx(19.7e-3)

    def test_unknown(self):
        with pytest.raises(ValueError):
            load_profile("nonexistent")

    def test_profile_directory(self, tmp_path, monkeypatch):
        (tmp_path / "slowmote.profile").write_text(
            "idle_a = 20e-6\nreceive_a = 19.7e-3\ntransmit_a = 17.4e-3\n"
            "voltage = 3.0\ncycle_s = 10.0\nmessage_s = 1e-3\n"
        )
        monkeypatch.setenv("PCOSYNC_PROFILE_DIR", str(tmp_path))
        profile = load_profile("slowmote")
        assert profile.cycle_s == 10.0

    def test_cycle_override_scales_energy(self, tmp_path):
        base = [
            "analyze", "--n", "2", "--t", "3", "--r", "1", "--eps", "0.5",
            "--mu", "0", "--lambda", "1.0", "--query", "power:avg",
        ]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(base + ["--output", str(out_a)]) == 0
        assert main(base + ["--cycle", "10", "--output", str(out_b)]) == 0
        (row_a,), _ = read_csv(out_a)
        (row_b,), _ = read_csv(out_b)
        val_a = float(dict(zip(CSV_COLUMNS, row_a))["value"])
        val_b = float(dict(zip(CSV_COLUMNS, row_b))["value"])
        # listening energy scales with the cycle, transmissions do not
        assert val_a < val_b < 10.0 * val_a
