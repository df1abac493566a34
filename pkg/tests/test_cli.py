"""End-to-end command-line flows exercised in process via main(argv)."""

import csv
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vigilkit.cli import main


def run(argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def read_manifest(out_dir):
    with open(out_dir / "run_manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


def write_cohort_csvs(tmp_path, n=12, seed=0, target="cvs_mean",
                      target_in_features=False, outlier=False):
    """Small feature table with a strong linear signal on x0."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 3))
    y = 2.0 * X[:, 0] + 0.1 * rng.standard_normal(n)
    if outlier:
        y[-1] = 50.0
    features = tmp_path / "features.csv"
    targets = tmp_path / "targets.csv"
    with open(features, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["participant", "x0", "x1", "x2"]
        if target_in_features:
            header.append(target)
        writer.writerow(header)
        for i in range(n):
            row = [f"P{i:02d}"] + [repr(float(v)) for v in X[i]]
            if target_in_features:
                row.append(repr(float(y[i])))
            writer.writerow(row)
    with open(targets, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["participant", target])
        for i in range(n):
            writer.writerow([f"P{i:02d}", repr(float(y[i]))])
    return features, targets


class TestSynth:
    def test_profile_writes_sessions_and_manifest(self, tmp_path):
        out = tmp_path / "out"
        assert run(["synth", "--profile", "steady", "--participants", 2,
                    "--out", out, "--seed", 5]) == 0
        for name in ("session_steady-01.jsonl", "session_steady-02.jsonl",
                     "ground_truth.json", "run_manifest.json"):
            assert (out / name).exists()
        manifest = read_manifest(out)
        assert manifest["subcommand"] == "synth"
        assert manifest["seed"] == 5
        assert manifest["outputs"] == sorted(manifest["outputs"])
        on_disk = {p.name for p in out.iterdir()} - {"run_manifest.json"}
        assert set(manifest["outputs"]) == on_disk
        assert set(manifest["versions"]) == {"vigilkit", "numpy", "scipy",
                                             "python"}

    def test_plant_writes_cohort(self, tmp_path):
        plant = tmp_path / "plant.json"
        plant.write_text(json.dumps({
            "target_measure": "cvs_mean",
            "planted_features": [["LP", "8-10", 1.2]],
            "noise_sd": 0.0,
            "n_participants": 8,
        }))
        out = tmp_path / "out"
        assert run(["synth", "--plant", plant, "--out", out]) == 0
        header, rows = read_csv(out / "features.csv")
        assert header[0] == "participant" and len(header) == 1 + 14 * 12
        assert len(rows) == 8
        theader, trows = read_csv(out / "targets.csv")
        assert theader == ["participant", "cvs_mean"] and len(trows) == 8
        truth = json.loads((out / "ground_truth.json").read_text())
        assert truth["cohort"]["planted"] == [
            {"feature": "LP_8-10", "coefficient": 1.2}]

    def test_recording_plan_writes_recording(self, tmp_path):
        plan = tmp_path / "plan.json"
        plan.write_text(json.dumps({
            "fs_hz": 256.0, "duration_s": 10.0, "seed": 3, "noise_sd": 1.0,
            "band_plants": [{"roi": "LP", "lo_hz": 9.0, "hi_hz": 11.0,
                             "amplitude": 2.0}],
            "spikes": [{"channel": "Fp1", "n_spikes": 3}],
        }))
        out = tmp_path / "out"
        assert run(["synth", "--recording-plan", plan, "--out", out]) == 0
        assert (out / "recording.json").exists()
        assert (out / "recording.raw").exists()
        truth = json.loads((out / "ground_truth.json").read_text())
        assert len(truth["recording"]["spike_positions"]["Fp1"]) == 3

    def test_nothing_requested_fails(self, tmp_path, capsys):
        assert run(["synth", "--out", tmp_path / "out"]) == 1
        assert "nothing to synthesize" in capsys.readouterr().err


class TestScore:
    def test_roundtrip_from_synthetic_session(self, tmp_path, capsys):
        gen = tmp_path / "gen"
        assert run(["synth", "--profile", "steady", "--out", gen]) == 0
        log = gen / "session_steady-01.jsonl"
        out = tmp_path / "scores"
        assert run(["score", "--log", log, "--out", out]) == 0
        assert "scored 1 session(s)" in capsys.readouterr().out
        header, rows = read_csv(out / "summary.csv")
        assert header == ["participant", "ce_pct", "oe_pct", "cvs_mean",
                          "cvs_var", "hrt_mean_ms", "hrt_var"]
        assert len(rows) == 1 and rows[0][0] == "steady-01"
        for value in rows[0][1:]:
            assert math.isfinite(float(value))
        theader, trows = read_csv(out / "trace_session_steady-01.csv")
        assert theader == ["trial_index", "block", "digit", "outcome", "rt_ms",
                           "tvs", "cvs"]
        assert len(trows) == 2700
        assert {r[5] for r in trows} <= {"0", "1", "2", "3", "4"}
        manifest = read_manifest(out)
        assert set(manifest["outputs"]) == {"summary.csv",
                                            "trace_session_steady-01.csv"}

    def test_missing_log_exits_before_writing(self, tmp_path, capsys):
        out = tmp_path / "scores"
        assert run(["score", "--log", tmp_path / "nope.jsonl",
                    "--out", out]) == 1
        assert "missing input file(s)" in capsys.readouterr().err
        assert not out.exists()


class TestScreen:
    def test_selects_signal_feature(self, tmp_path):
        features, targets = write_cohort_csvs(tmp_path)
        out = tmp_path / "out"
        assert run(["screen", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--alpha", 0.2, "--perms", 99,
                    "--out", out]) == 0
        header, rows = read_csv(out / "screen.csv")
        assert header == ["feature", "pearson_r", "p_value", "r2", "adj_r2",
                          "perm_p", "selected"]
        selected = {r[0]: r[6] for r in rows}
        assert selected["x0"] == "1"
        assert len(rows) == 3

    def test_target_column_inside_features_file(self, tmp_path):
        features, _ = write_cohort_csvs(tmp_path, target_in_features=True)
        out = tmp_path / "out"
        assert run(["screen", "--features", features, "--target", "cvs_mean",
                    "--alpha", 0.2, "--perms", 99, "--out", out]) == 0
        _, rows = read_csv(out / "screen.csv")
        assert [r[0] for r in rows] == ["x0", "x1", "x2"]

    def test_exclude_outliers_drops_participant(self, tmp_path, capsys):
        features, targets = write_cohort_csvs(tmp_path, outlier=True)
        out = tmp_path / "out"
        assert run(["screen", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--perms", 49,
                    "--exclude-outliers", "--out", out]) == 0
        assert "excluded outlier participant(s): P11" in capsys.readouterr().err


class TestMvpa:
    def test_search_outputs(self, tmp_path, capsys):
        features, targets = write_cohort_csvs(tmp_path)
        out = tmp_path / "out"
        assert run(["mvpa", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--alpha", 0.2, "--perms", 99,
                    "--out", out]) == 0
        assert "best subset" in capsys.readouterr().out
        header, rows = read_csv(out / "mvpa.csv")
        assert header[0] == "criterion"
        overall = [r for r in rows if r[0] == "overall_best"]
        assert len(overall) == 1
        assert "x0" in overall[0][2]

        _, card_rows = read_csv(out / "best_by_cardinality.csv")
        m = max(int(r[0]) for r in card_rows)
        for r in card_rows:
            assert int(r[1]) == math.comb(m, int(r[0]))

        pheader, prows = read_csv(out / "predictions_best.csv")
        assert pheader == ["participant", "true", "predicted"]
        assert len(prows) == 12

    def test_no_features_pass_screening(self, tmp_path, capsys):
        features, targets = write_cohort_csvs(tmp_path)
        out = tmp_path / "out"
        assert run(["mvpa", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--alpha", 1e-6, "--perms", 49,
                    "--out", out]) == 1
        assert "no features passed screening" in capsys.readouterr().err


class TestNnTrain:
    def test_grid_and_weight_outputs(self, tmp_path):
        features, targets = write_cohort_csvs(tmp_path, n=8)
        out = tmp_path / "out"
        assert run(["nn-train", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--units", "2", "--runs", 1,
                    "--max-epochs", 2, "--out", out]) == 0
        header, rows = read_csv(out / "err_surface_U2.csv")
        assert header == ["lr", "l2", "err"]
        assert len(rows) == 15 * 15
        _, wrows = read_csv(out / "weights_U2.csv")
        assert [r[0] for r in wrows] == ["x0", "x1", "x2"]
        _, srows = read_csv(out / "nn_summary.csv")
        assert len(srows) == 1 and srows[0][0] == "2"


class TestReport:
    def test_heatmap_and_scatter(self, tmp_path):
        matrix_csv = tmp_path / "matrix.csv"
        with open(matrix_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["roi", "low", "high"])
            writer.writerow(["LP", "0.2", "-0.4"])
            writer.writerow(["RP", "1.0", "0.0"])
        scatter_csv = tmp_path / "preds.csv"
        with open(scatter_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["participant", "true", "predicted"])
            for i, (t, p) in enumerate([(0.1, 0.2), (0.5, 0.4), (0.9, 1.0),
                                        (1.4, 1.3)]):
                writer.writerow([f"P{i}", t, p])
        out = tmp_path / "out"
        assert run(["report", "--heatmap", matrix_csv, "--scatter", scatter_csv,
                    "--title", "demo", "--out", out]) == 0
        for name in ("heatmap.svg", "scatter.svg"):
            ET.fromstring((out / name).read_text(encoding="utf-8"))

    def test_weight_csv_must_match_default_layout(self, tmp_path, capsys):
        bad = tmp_path / "weights.csv"
        with open(bad, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "weight"])
            writer.writerow(["x0", "0.5"])
        assert run(["report", "--heatmap", bad, "--out", tmp_path / "o"]) == 1
        assert "do not match" in capsys.readouterr().err

    def test_nothing_requested_fails(self, tmp_path):
        assert run(["report", "--out", tmp_path / "o"]) == 1


class TestConfigAndErrors:
    def test_config_file_sets_defaults(self, tmp_path):
        features, targets = write_cohort_csvs(tmp_path)
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"alpha": 0.05, "perms": 59}))
        out = tmp_path / "out"
        assert run(["screen", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--config", config,
                    "--out", out]) == 0
        manifest = read_manifest(out)
        assert manifest["config"]["alpha"] == 0.05
        assert manifest["config"]["perms"] == 59

    def test_explicit_flag_overrides_config(self, tmp_path):
        features, targets = write_cohort_csvs(tmp_path)
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"alpha": 0.05, "perms": 59}))
        out = tmp_path / "out"
        assert run(["screen", "--features", features, "--targets", targets,
                    "--target", "cvs_mean", "--config", config,
                    "--alpha", 0.15, "--out", out]) == 0
        manifest = read_manifest(out)
        assert manifest["config"]["alpha"] == 0.15
        assert manifest["config"]["perms"] == 59

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"alphaa": 0.05}))
        assert run(["screen", "--features", "f.csv", "--target", "cvs_mean",
                    "--config", config, "--out", tmp_path / "o"]) == 1
        assert "unknown option(s) alphaa" in capsys.readouterr().err

    def test_usage_errors_exit_2(self, tmp_path):
        assert run(["score", "--out", tmp_path / "o"]) == 2
        assert run([]) == 2

    def test_missing_target_column_reported(self, tmp_path, capsys):
        features, targets = write_cohort_csvs(tmp_path)
        assert run(["screen", "--features", features, "--targets", targets,
                    "--target", "nope", "--out", tmp_path / "o"]) == 1
        assert "no column named 'nope'" in capsys.readouterr().err
