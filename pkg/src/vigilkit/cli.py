"""Command-line entry point.

Subcommands cover the full workflow: synthesize data, score session logs,
extract band-power features from recordings, screen features, run the
exhaustive multivariate search, train the relevance network, and render
figures. Every run writes a machine-readable manifest beside its outputs so
results can be reproduced from the manifest alone.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import nn, report
from .eeg.bands import ROI_LABELS, BandSet, RoiMap, default_roi_map, feature_names
from .eeg.io import read_recording, write_recording
from .eeg.pipeline import ExtractConfig, extract_features
from .errors import VigilkitError
from .relevance import (Dataset, loocv_regress, mvpa_search, pearson_r_p,
                        screen_features, screening_pvalues, select_from_pvalues,
                        significance_stars, univariate_screen_table)
from .scoring import exclude_outliers, score_session
from .session import label_trials, load_session, write_event_log
from .synth import (BandPlant, OcularPlant, PlantSpec, RecordingPlan, SpikePlant,
                    gen_cohort, gen_recording, gen_session, profile_from_name)


class CliError(Exception):
    """Input or configuration problem reported before any output is written."""


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("vigilkit")
    except Exception:
        return "unknown"


def _fmt(value: float) -> str:
    return str(float(value))


def _require_inputs(*paths) -> None:
    missing = [str(p) for p in paths if p is not None and not Path(p).exists()]
    if missing:
        raise CliError("missing input file(s): " + ", ".join(missing))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(args, out: Path, outputs: list[str], started: float) -> None:
    import scipy
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "started"):
            continue
        if isinstance(value, Path):
            value = str(value)
        config[key] = value
    manifest = {
        "subcommand": args.subcommand,
        "config": config,
        "versions": {
            "vigilkit": _version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "seed": getattr(args, "seed", None),
        "started_utc": datetime.datetime.fromtimestamp(
            started, tz=datetime.timezone.utc).isoformat(),
        "wall_time_s": round(time.time() - started, 3),
        "outputs": sorted(outputs),
    }
    with open(out / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_table(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames:
            raise CliError(f"{path}: empty CSV")
        return list(reader.fieldnames), list(reader)


def _load_dataset(features_path, measure: str, targets_path=None,
                  exclude: bool = False) -> Dataset:
    """Join a features CSV with its target column, by participant.

    The target may live in the features file itself or in a separate targets
    file. Participants whose target is undefined (NaN) are dropped with a
    note; `exclude` additionally applies the mean + 2 SD exclusion rule.
    """
    fields, rows = _read_table(features_path)
    if fields[0] != "participant":
        raise CliError(f"{features_path}: first column must be 'participant'")
    names = [c for c in fields[1:] if c != measure]
    if targets_path is not None:
        tfields, trows = _read_table(targets_path)
        if measure not in tfields:
            raise CliError(f"{targets_path}: no column named {measure!r}")
        target_by_id = {r["participant"]: r[measure] for r in trows}
    else:
        if measure not in fields:
            raise CliError(f"{features_path}: no column named {measure!r} "
                           "(pass --targets for a separate file)")
        target_by_id = {r["participant"]: r[measure] for r in rows}

    ids, X_rows, y_vals = [], [], []
    dropped = []
    for row in rows:
        pid = row["participant"]
        if pid not in target_by_id:
            raise CliError(f"participant {pid!r} has no target value")
        y = float(target_by_id[pid])
        if math.isnan(y):
            dropped.append(pid)
            continue
        ids.append(pid)
        X_rows.append([float(row[c]) for c in names])
        y_vals.append(y)
    if dropped:
        print(f"note: dropped {len(dropped)} participant(s) with undefined "
              f"{measure}: {', '.join(dropped)}", file=sys.stderr)
    X = np.asarray(X_rows, dtype=float)
    y = np.asarray(y_vals, dtype=float)
    if exclude:
        keep = exclude_outliers(y)
        excluded = [pid for pid, k in zip(ids, keep) if not k]
        if excluded:
            print(f"note: excluded outlier participant(s): {', '.join(excluded)}",
                  file=sys.stderr)
        X, y = X[keep], y[keep]
        ids = [pid for pid, k in zip(ids, keep) if k]
    try:
        return Dataset(X=X, y=y, feature_names=tuple(names),
                       participant_ids=tuple(ids))
    except ValueError as exc:
        raise CliError(str(exc)) from exc


SUMMARY_COLUMNS = ["participant", "ce_pct", "oe_pct", "cvs_mean", "cvs_var",
                   "hrt_mean_ms", "hrt_var"]


def cmd_score(args) -> int:
    _require_inputs(*args.log)
    out = _out_dir(args)
    outputs = []
    summary_rows = []
    for path in args.log:
        session = load_session(path)
        labeled = label_trials(session.trials, session.paradigm)
        _, series, summary = score_session(labeled, paradigm=session.paradigm)
        summary_rows.append([session.participant] +
                            [_fmt(getattr(summary, c)) for c in SUMMARY_COLUMNS[1:]])
        trace = out / f"trace_{Path(path).stem}.csv"
        _write_csv(trace, ["trial_index", "block", "digit", "outcome", "rt_ms",
                           "tvs", "cvs"],
                   [[t.event.trial_index, t.event.block, t.event.digit,
                     t.outcome.value,
                     _fmt(t.rt_ms) if t.rt_ms is not None else "",
                     int(series.tvs[i]), _fmt(series.cvs[i])]
                    for i, t in enumerate(labeled)])
        outputs.append(trace.name)
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, summary_rows)
    outputs.append("summary.csv")
    _write_manifest(args, out, outputs, args.started)
    print(f"scored {len(args.log)} session(s) -> {out / 'summary.csv'}")
    return 0


def cmd_extract(args) -> int:
    _require_inputs(*args.recording, args.bands, args.rois)
    bands = BandSet.from_json_file(args.bands) if args.bands else BandSet()
    roi_map = (RoiMap.from_json_file(args.rois) if args.rois else default_roi_map())
    config = ExtractConfig(bands=bands, roi_map=roi_map, seed=args.seed,
                           ratio_then_average=args.ratio_then_average)
    out = _out_dir(args)
    names = feature_names(roi_map, bands)
    rows, reports = [], {}
    for path in args.recording:
        rec = read_recording(path)
        vector, rep = extract_features(rec, config)
        stem = Path(path).stem
        rows.append([stem] + [_fmt(v) for v in vector])
        reports[stem] = asdict(rep)
    _write_csv(out / "features.csv", ["participant"] + names, rows)
    with open(out / "extract_report.json", "w", encoding="utf-8") as fh:
        json.dump(reports, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args, out, ["features.csv", "extract_report.json"], args.started)
    print(f"extracted {len(rows)} recording(s) -> {out / 'features.csv'}")
    return 0


def cmd_screen(args) -> int:
    _require_inputs(args.features, args.targets)
    dataset = _load_dataset(args.features, args.target, args.targets,
                            exclude=args.exclude_outliers)
    out = _out_dir(args)
    table = univariate_screen_table(dataset)
    pvals = screening_pvalues(dataset, n_permutations=args.perms, seed=args.seed)
    selected = set(select_from_pvalues(pvals, args.alpha, args.max_features))
    rows = []
    for j, metrics in enumerate(table):
        if metrics is None:
            rows.append([dataset.feature_names[j], "", "", "", "", "", 0])
        else:
            rows.append([dataset.feature_names[j], _fmt(metrics.pearson_r),
                         _fmt(metrics.p_value), _fmt(metrics.r2),
                         _fmt(metrics.adj_r2), _fmt(pvals[j]),
                         int(j in selected)])
    _write_csv(out / "screen.csv",
               ["feature", "pearson_r", "p_value", "r2", "adj_r2", "perm_p",
                "selected"], rows)
    _write_manifest(args, out, ["screen.csv"], args.started)
    print(f"screening kept {len(selected)}/{dataset.n_features} features "
          f"(alpha={args.alpha}) -> {out / 'screen.csv'}")
    return 0


def cmd_mvpa(args) -> int:
    _require_inputs(args.features, args.targets)
    dataset = _load_dataset(args.features, args.target, args.targets,
                            exclude=args.exclude_outliers)
    screened = screen_features(dataset, alpha=args.alpha,
                               max_keep=args.max_features,
                               n_permutations=args.perms, seed=args.seed)
    if not screened:
        raise CliError("no features passed screening; nothing to search")
    result = mvpa_search(dataset, screened, n_permutations=args.perms,
                         seed=args.seed, cap=args.subset_cap)
    out = _out_dir(args)

    def feature_label(indices) -> str:
        return "|".join(dataset.feature_names[i] for i in indices)

    rows = []
    for card in result.by_cardinality:
        for criterion, group in (("best_adj_r2", card.best_adj_r2),
                                 ("best_pearson_r", card.best_pearson_r),
                                 ("best_rmse", card.best_rmse)):
            for res in group:
                m = res.metrics
                rows.append([criterion, card.k, feature_label(res.features),
                             _fmt(m.r2), _fmt(m.adj_r2), _fmt(m.pearson_r),
                             _fmt(m.rmse),
                             _fmt(res.permutation_p) if res.permutation_p is not None
                             else ""])
    best = result.overall_best()
    if best is not None:
        m = best.metrics
        rows.append(["overall_best", len(best.features),
                     feature_label(best.features), _fmt(m.r2), _fmt(m.adj_r2),
                     _fmt(m.pearson_r), _fmt(m.rmse),
                     _fmt(best.permutation_p) if best.permutation_p is not None
                     else ""])
    _write_csv(out / "mvpa.csv",
               ["criterion", "k", "features", "r2", "adj_r2", "pearson_r",
                "rmse", "perm_p"], rows)
    # one row per cardinality for the best-adjusted-R2 model(s)
    summary_rows = []
    for card in result.by_cardinality:
        for res in card.best_adj_r2:
            m = res.metrics
            p = res.permutation_p
            summary_rows.append([card.k, card.n_subsets,
                                 feature_label(res.features), _fmt(m.r2),
                                 _fmt(m.adj_r2), _fmt(m.rmse), _fmt(m.pearson_r),
                                 _fmt(p) if p is not None else "",
                                 significance_stars(p) if p is not None else ""])
    _write_csv(out / "best_by_cardinality.csv",
               ["k", "n_subsets", "features", "r2", "adj_r2", "rmse",
                "pearson_r", "perm_p", "stars"], summary_rows)
    outputs = ["mvpa.csv", "best_by_cardinality.csv"]
    if best is not None:
        preds, _ = loocv_regress(dataset.X[:, best.features], dataset.y)
        _write_csv(out / "predictions_best.csv", ["participant", "true", "predicted"],
                   [[pid, _fmt(t), _fmt(p)]
                    for pid, t, p in zip(dataset.participant_ids, dataset.y, preds)])
        outputs.append("predictions_best.csv")
        print(f"best subset ({len(best.features)} features): "
              f"{feature_label(best.features)} adj_r2={m.adj_r2:.3f}")
    _write_manifest(args, out, outputs, args.started)
    return 0


def cmd_nn_train(args) -> int:
    _require_inputs(args.features, args.targets)
    dataset = _load_dataset(args.features, args.target, args.targets,
                            exclude=args.exclude_outliers)
    constant = dataset.constant_columns()
    if constant.size:
        dropped = [dataset.feature_names[i] for i in constant]
        print(f"note: dropped constant feature(s): {', '.join(dropped)}",
              file=sys.stderr)
        keep = np.setdiff1d(np.arange(dataset.n_features), constant)
        dataset = Dataset(X=dataset.X[:, keep], y=dataset.y,
                          feature_names=tuple(dataset.feature_names[i]
                                              for i in keep),
                          participant_ids=dataset.participant_ids)
    X = dataset.X
    policy = "global" if args.paper_compat else "per-fold"
    units = [int(u) for u in args.units.split(",")]
    out = _out_dir(args)
    outputs = []
    summary_rows = []
    band_labels = BandSet().labels()
    for hidden in units:
        config = nn.NnConfig(input_dim=X.shape[1], hidden_units=hidden,
                             runs=args.runs, seed=args.seed,
                             max_epochs=args.max_epochs,
                             standardize_policy=policy)
        result = nn.train_relevance(X, dataset.y, config)
        grid = result.grid
        surface_name = f"err_surface_U{hidden}.csv"
        _write_csv(out / surface_name, ["lr", "l2", "err"],
                   [[_fmt(lr), _fmt(l2), _fmt(grid.err_surface[i, j])]
                    for i, lr in enumerate(grid.lr_grid)
                    for j, l2 in enumerate(grid.l2_grid)])
        outputs.append(surface_name)
        wmap = result.weight_map
        weights_name = f"weights_U{hidden}.csv"
        normalized = wmap.normalized()
        _write_csv(out / weights_name, ["feature", "weight", "weight_normalized"],
                   [[name, _fmt(w), _fmt(nw)]
                    for name, w, nw in zip(dataset.feature_names, wmap.weights,
                                           normalized)])
        outputs.append(weights_name)
        default_layout = tuple(feature_names(default_roi_map(), BandSet()))
        if dataset.feature_names == default_layout:
            matrix = nn.weight_heatmap(wmap)
            svg = report.render_heatmap(matrix, list(ROI_LABELS), band_labels,
                                        title=f"{args.target} weights (U={hidden})")
            svg_name = f"weights_U{hidden}.svg"
            report.save_svg(svg, out / svg_name)
            peak = float(np.max(np.abs(matrix)))
            norm_matrix = matrix / peak if peak > 0 else matrix
            norm_svg = report.render_heatmap(
                norm_matrix, list(ROI_LABELS), band_labels,
                title=f"{args.target} weights, normalized (U={hidden})")
            norm_name = f"weights_normalized_U{hidden}.svg"
            report.save_svg(norm_svg, out / norm_name)
            outputs.extend([svg_name, norm_name])
        summary_rows.append([hidden, _fmt(grid.lr_star), _fmt(grid.l2_star),
                             _fmt(grid.err_star), result.n_folds_averaged,
                             grid.n_diverged])
        print(f"U={hidden}: lr*={grid.lr_star:.6g} l2*={grid.l2_star:.6g} "
              f"err*={grid.err_star:.6g}")
    _write_csv(out / "nn_summary.csv",
               ["hidden_units", "lr_star", "l2_star", "err_star",
                "folds_averaged", "folds_diverged"], summary_rows)
    outputs.append("nn_summary.csv")
    _write_manifest(args, out, outputs, args.started)
    return 0


def _plant_from_json(path) -> PlantSpec:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        return PlantSpec(
            target_measure=obj["target_measure"],
            planted_features=tuple((f[0], f[1], float(f[2]))
                                   for f in obj["planted_features"]),
            noise_sd=float(obj.get("noise_sd", 0.05)),
            n_participants=int(obj.get("n_participants", 10)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: bad plant spec ({exc})") from exc


def _recording_plan_from_json(path) -> RecordingPlan:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        kwargs = {k: obj[k] for k in ("fs_hz", "duration_s", "noise_sd",
                                      "line_amplitude", "line_hz", "seed")
                  if k in obj}
        if "band_plants" in obj:
            kwargs["band_plants"] = tuple(BandPlant(**bp) for bp in obj["band_plants"])
        if "ocular" in obj and obj["ocular"] is not None:
            oc = dict(obj["ocular"])
            if "scalp_gain_range" in oc:
                oc["scalp_gain_range"] = tuple(oc["scalp_gain_range"])
            kwargs["ocular"] = OcularPlant(**oc)
        if "spikes" in obj:
            kwargs["spikes"] = tuple(SpikePlant(**sp) for sp in obj["spikes"])
        return RecordingPlan(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: bad recording plan ({exc})") from exc


def cmd_synth(args) -> int:
    if not (args.profile or args.plant or args.recording_plan):
        raise CliError("nothing to synthesize: pass --profile, --plant, "
                       "and/or --recording-plan")
    _require_inputs(args.plant, args.recording_plan)
    out = _out_dir(args)
    outputs = []
    truth: dict = {"seed": args.seed}

    if args.profile:
        sessions = []
        for i in range(args.participants):
            profile = profile_from_name(args.profile, seed=args.seed + i)
            pid = f"{args.profile}-{i + 1:02d}"
            session = gen_session(profile, participant=pid)
            name = f"session_{pid}.jsonl"
            write_event_log(session, out / name)
            outputs.append(name)
            sessions.append({"participant": pid, "profile": asdict(profile)})
        truth["sessions"] = sessions

    if args.plant:
        plant = _plant_from_json(args.plant)
        cohort = gen_cohort(plant, seed=args.seed)
        _write_csv(out / "features.csv", ["participant"] + list(cohort.feature_names),
                   [[pid] + [_fmt(v) for v in row]
                    for pid, row in zip(cohort.participant_ids, cohort.X)])
        _write_csv(out / "targets.csv", ["participant", plant.target_measure],
                   [[pid, _fmt(v)]
                    for pid, v in zip(cohort.participant_ids, cohort.y)])
        outputs.extend(["features.csv", "targets.csv"])
        truth["cohort"] = {
            "target_measure": plant.target_measure,
            "noise_sd": plant.noise_sd,
            "planted": [{"feature": cohort.feature_names[i],
                         "coefficient": float(cohort.coefficients[i])}
                        for i in cohort.planted_indices],
        }

    if args.recording_plan:
        plan = _recording_plan_from_json(args.recording_plan)
        recording, rec_truth = gen_recording(plan)
        write_recording(recording, out / "recording")
        outputs.extend(["recording.json", "recording.raw"])
        truth["recording"] = {
            "fs_hz": plan.fs_hz,
            "duration_s": plan.duration_s,
            "eog_gains": (rec_truth.eog_gains.tolist()
                          if rec_truth.eog_gains is not None else None),
            "spike_positions": {ch: pos.tolist()
                                for ch, pos in rec_truth.spike_positions.items()},
        }

    with open(out / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs.append("ground_truth.json")
    _write_manifest(args, out, outputs, args.started)
    print(f"synthesized {len(outputs) - 1} artifact(s) in {out}")
    return 0


def cmd_report(args) -> int:
    if not (args.heatmap or args.scatter):
        raise CliError("nothing to render: pass --heatmap and/or --scatter")
    _require_inputs(args.heatmap, args.scatter)
    out = _out_dir(args)
    outputs = []
    if args.heatmap:
        fields, rows = _read_table(args.heatmap)
        if fields[:2] == ["feature", "weight"]:
            names = [r["feature"] for r in rows]
            expected = feature_names(default_roi_map(), BandSet())
            if names != expected:
                raise CliError(f"{args.heatmap}: features do not match the "
                               "default ROI x band layout")
            values = np.array([float(r["weight"]) for r in rows])
            matrix = values.reshape(len(ROI_LABELS), -1)
            row_labels, col_labels = list(ROI_LABELS), BandSet().labels()
        else:
            row_labels = [r[fields[0]] for r in rows]
            col_labels = fields[1:]
            matrix = np.array([[float(r[c]) for c in col_labels] for r in rows])
        svg = report.render_heatmap(matrix, row_labels, col_labels,
                                    title=args.title or "")
        report.save_svg(svg, out / "heatmap.svg")
        outputs.append("heatmap.svg")
    if args.scatter:
        fields, rows = _read_table(args.scatter)
        if not {"true", "predicted"} <= set(fields):
            raise CliError(f"{args.scatter}: need 'true' and 'predicted' columns")
        true_vals = np.array([float(r["true"]) for r in rows])
        pred_vals = np.array([float(r["predicted"]) for r in rows])
        r, p = pearson_r_p(true_vals, pred_vals)
        svg = report.render_scatter(true_vals, pred_vals, r, p,
                                    title=args.title or "")
        report.save_svg(svg, out / "scatter.svg")
        outputs.append("scatter.svg")
    _write_manifest(args, out, outputs, args.started)
    print(f"rendered {', '.join(outputs)} in {out}")
    return 0


def _build_parser() -> tuple[argparse.ArgumentParser,
                             dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config",
                        help="JSON file of flag defaults, overridden by "
                             "explicit flags")
    common.add_argument("--paper-compat", action="store_true",
                        help="pin publication-default behavior (currently "
                             "the default everywhere)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker budget recorded in the manifest")

    dataset = argparse.ArgumentParser(add_help=False)
    dataset.add_argument("--features", required=True,
                         help="CSV with participant + feature columns")
    dataset.add_argument("--targets",
                         help="optional CSV with participant + measure columns")
    dataset.add_argument("--target", required=True,
                         help="target column name (e.g. cvs_mean)")
    dataset.add_argument("--exclude-outliers", action="store_true",
                         help="drop participants above mean + 2 SD of the target")

    parser = argparse.ArgumentParser(
        prog="vigilkit",
        description="Vigilance scoring and band-power relevance toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    p = subparsers["score"] = sub.add_parser(
        "score", parents=[common], help="score session event logs")
    p.add_argument("--log", nargs="+", required=True, help="event log JSONL path(s)")
    p.set_defaults(func=cmd_score)

    p = subparsers["extract"] = sub.add_parser(
        "extract", parents=[common],
        help="extract band-power ratio features from recordings")
    p.add_argument("--recording", nargs="+", required=True,
                   help="recording header path(s) (.json)")
    p.add_argument("--bands", help="JSON band-edge override")
    p.add_argument("--rois", help="JSON ROI map override")
    p.add_argument("--ratio-then-average", action="store_true",
                   help="per-channel ratios averaged within ROI instead of "
                        "averaging powers first")
    p.set_defaults(func=cmd_extract)

    p = subparsers["screen"] = sub.add_parser(
        "screen", parents=[common, dataset],
        help="univariate cross-validated feature screening")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--max-features", type=int, default=None)
    p.add_argument("--perms", type=int, default=500)
    p.set_defaults(func=cmd_screen)

    p = subparsers["mvpa"] = sub.add_parser(
        "mvpa", parents=[common, dataset],
        help="exhaustive multivariate subset search")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--max-features", type=int, default=None)
    p.add_argument("--perms", type=int, default=500)
    p.add_argument("--subset-cap", type=int, default=20,
                   help="refuse to enumerate more than 2^cap - 1 subsets")
    p.set_defaults(func=cmd_mvpa)

    p = subparsers["nn-train"] = sub.add_parser(
        "nn-train", parents=[common, dataset],
        help="train the relevance network over the lr/l2 grid")
    p.add_argument("--units", default="40",
                   help="comma-separated hidden-unit counts")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--max-epochs", type=int, default=1000)
    p.set_defaults(func=cmd_nn_train)

    p = subparsers["synth"] = sub.add_parser(
        "synth", parents=[common],
        help="generate synthetic sessions, cohorts, recordings")
    p.add_argument("--profile",
                   help="behavior preset: steady, declining, dip-recover, "
                        "early-sleep")
    p.add_argument("--participants", type=int, default=1,
                   help="sessions to generate for --profile")
    p.add_argument("--plant", help="JSON cohort plant spec")
    p.add_argument("--recording-plan", help="JSON recording plan")
    p.set_defaults(func=cmd_synth)

    p = subparsers["report"] = sub.add_parser(
        "report", parents=[common],
        help="render heat maps and prediction scatters")
    p.add_argument("--heatmap", help="weights CSV or labeled matrix CSV")
    p.add_argument("--scatter", help="CSV with true/predicted columns")
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_report)
    return parser, subparsers


def main(argv=None) -> int:
    parser, subparsers = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
            normalized = {k.replace("-", "_"): v for k, v in overrides.items()}
            unknown = sorted(set(normalized) - set(vars(args)))
            if unknown:
                raise CliError(f"{args.config}: unknown option(s) "
                               + ", ".join(unknown))
            # defaults live on the subparser; explicit flags still win on
            # the re-parse
            subparsers[args.subcommand].set_defaults(**normalized)
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (OSError, json.JSONDecodeError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args.started = time.time()
    try:
        return args.func(args)
    except (VigilkitError, CliError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
