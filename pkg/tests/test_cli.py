import json

import numpy as np
import pytest
import yaml

from gridspect import cli
from gridspect.errors import NoSeparationError
from gridspect.grid_map import binarize, load_map, save_map
from gridspect.pipeline import declutter_map
from gridspect.synthmaps import office_map, rectangle_map


@pytest.fixture()
def rect_pgm(tmp_path):
    path = tmp_path / "rect.pgm"
    save_map(rectangle_map(side=128), str(path))
    return str(path)


@pytest.fixture()
def office_pgm(tmp_path):
    path = tmp_path / "office.pgm"
    save_map(office_map(), str(path))
    return str(path)


@pytest.fixture()
def cluttered_rect_pgm(tmp_path):
    from gridspect.evalharness import ClutterSpec, inject_clutter

    path = tmp_path / "rect_cluttered.pgm"
    lab = inject_clutter(rectangle_map(side=128), ClutterSpec("square", 50, 5, seed=6))
    save_map(lab.bits, str(path))
    return str(path)


@pytest.fixture()
def cluttered_office_pgm(tmp_path):
    from gridspect.evalharness import ClutterSpec, inject_clutter

    path = tmp_path / "office_cluttered.pgm"
    lab = inject_clutter(office_map(), ClutterSpec("random", 50, 6, seed=2))
    save_map(lab.bits, str(path))
    return str(path)


@pytest.fixture()
def blank_pgm(tmp_path):
    path = tmp_path / "blank.pgm"
    with open(path, "wb") as fh:
        fh.write(b"P5\n32 32\n255\n" + b"\xff" * (32 * 32))
    return str(path)


def run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestAnalyze:
    def test_rectangle_two_directions(self, rect_pgm, capsys):
        code, report = run_json(capsys, ["analyze", rect_pgm, "--json", "-"])
        assert code == 0
        assert len(report["directions"]) == 2
        angles = [d["spectral_angle_deg"] for d in report["directions"]]
        assert angles == [0.0, 90.0]
        assert report["global_score"]["trust"] == "TRUSTED"

    def test_blank_map_exit_3(self, blank_pgm, capsys):
        code, report = run_json(capsys, ["analyze", blank_pgm, "--json", "-"])
        assert code == 3
        assert "NO_STRUCTURE" in report["global_score"]["flags"]

    def test_angle_bins_echoed(self, rect_pgm, capsys):
        code, report = run_json(
            capsys, ["analyze", rect_pgm, "--angle-bins", "360", "--json", "-"]
        )
        assert code == 0
        assert report["config"]["angle_bins"] == 360

    def test_config_file_overridden_by_flag(self, rect_pgm, tmp_path, capsys):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("angle_bins: 360\nprominence_threshold: 0.4\n")
        code, report = run_json(
            capsys,
            ["analyze", rect_pgm, "--config", str(cfg), "--angle-bins", "720", "--json", "-"],
        )
        assert code == 0
        assert report["config"]["angle_bins"] == 720
        assert report["config"]["prominence_threshold"] == 0.4

    def test_debug_images_written(self, rect_pgm, tmp_path, capsys):
        spec_png = tmp_path / "spec.png"
        prof_png = tmp_path / "prof.png"
        code = cli.main(
            [
                "analyze", rect_pgm,
                "--json", str(tmp_path / "r.json"),
                "--spectrum-out", str(spec_png),
                "--profile-out", str(prof_png),
            ]
        )
        assert code == 0
        assert spec_png.stat().st_size > 0
        assert prof_png.stat().st_size > 0

    def test_missing_file_exit_2(self, capsys):
        assert cli.main(["analyze", "/no/such/map.pgm"]) == 2


class TestDeclutter:
    def test_output_subset_of_input(self, office_pgm, tmp_path, capsys):
        out = tmp_path / "out.pgm"
        code, report = run_json(
            capsys, ["declutter", office_pgm, "-o", str(out), "--json", "-"]
        )
        assert code == 0
        original = binarize(load_map(office_pgm))
        dec = binarize(load_map(str(out)))
        assert not (dec.bits & ~original.bits).any()
        assert report["pixels"]["kept"] + report["pixels"]["removed"] == original.occupied_count

    def test_threshold_zero_keeps_positive_scores(self, office_pgm, tmp_path, capsys):
        out = tmp_path / "out.pgm"
        code, report = run_json(
            capsys,
            ["declutter", office_pgm, "-o", str(out), "--threshold", "0", "--json", "-"],
        )
        assert code == 0
        m = binarize(load_map(office_pgm))
        outcome = declutter_map(m, threshold_override=0.0)
        dec = binarize(load_map(str(out)))
        assert np.array_equal(dec.bits, outcome.decluttered.bits)
        # only the minimum-score cells (normalized score 0) are dropped
        padded = outcome.analysis.padded
        n_min = int(
            (outcome.nominal.normalized_scores[padded.bits] == 0.0).sum()
        )
        assert report["pixels"]["removed"] == n_min
        assert n_min >= 1

    def test_blank_map_exit_3(self, blank_pgm, tmp_path, capsys):
        code = cli.main(["declutter", blank_pgm, "-o", str(tmp_path / "o.pgm"), "--json", str(tmp_path / "r.json")])
        assert code == 3

    def test_no_separation_exit_4(self, office_pgm, tmp_path, capsys, monkeypatch):
        import gridspect.pipeline as pipeline

        def broken(fit):
            raise NoSeparationError("forced")

        monkeypatch.setattr(pipeline, "gmm_threshold", broken)
        out = tmp_path / "out.pgm"
        code, report = run_json(
            capsys, ["declutter", office_pgm, "-o", str(out), "--json", "-"]
        )
        assert code == 4
        assert "NO_SEPARATION" in report["flags"]
        original = binarize(load_map(office_pgm))
        passthrough = binarize(load_map(str(out)))
        assert np.array_equal(passthrough.bits, original.bits)

    def test_score_image_written(self, office_pgm, tmp_path, capsys):
        score = tmp_path / "scores.png"
        code = cli.main(
            ["declutter", office_pgm, "-o", str(tmp_path / "o.pgm"),
             "--score-out", str(score), "--json", str(tmp_path / "r.json")]
        )
        assert code == 0
        assert score.stat().st_size > 0


def write_gt(path, lines):
    with open(path, "w") as fh:
        json.dump({"lines": lines}, fh)


class TestWalls:
    def test_filtered_lines_snap_to_wall_angles(self, cluttered_office_pgm, capsys):
        code, report = run_json(capsys, ["walls", cluttered_office_pgm, "--json", "-"])
        assert code == 0
        assert report["filtered"] is True
        wall_angles = [0.0, 90.0]
        for line in report["lines"]:
            d = min(
                abs(line["angle_deg"] - a) % 180.0 for a in wall_angles
            )
            assert min(d, 180.0 - d) <= 5.0

    def test_no_filter_runs_raw(self, office_pgm, capsys):
        code, report = run_json(capsys, ["walls", office_pgm, "--no-filter", "--json", "-"])
        assert code == 0
        assert report["filtered"] is False
        assert report["lines"]

    def test_gt_identical_zero_cost(self, cluttered_rect_pgm, tmp_path, capsys):
        # first read the detected lines, then feed them back as ground truth
        code, report = run_json(capsys, ["walls", cluttered_rect_pgm, "--json", "-"])
        assert code == 0
        gt_path = tmp_path / "gt.json"
        write_gt(
            gt_path,
            [
                {"angle_deg": l["angle_deg"], "offset_cells": l["offset_cells"]}
                for l in report["lines"]
            ],
        )
        code, report2 = run_json(
            capsys, ["walls", cluttered_rect_pgm, "--gt", str(gt_path), "--json", "-"]
        )
        assert code == 0
        assert report2["wall_eval"]["mean_cost"] == pytest.approx(0.0, abs=1e-6)
        assert report2["wall_eval"]["unmatched_reference_count"] == 0

    def test_empty_gt_exit_2(self, rect_pgm, tmp_path, capsys):
        gt_path = tmp_path / "gt.json"
        write_gt(gt_path, [])
        assert cli.main(["walls", rect_pgm, "--gt", str(gt_path), "--json", "-"]) == 2

    def test_filtered_cost_not_worse(self, cluttered_office_pgm, tmp_path, capsys):
        gt_path = tmp_path / "gt.json"
        # office walls: borders plus corridors (angle, offset) in center frame
        c = 79.5
        entries = [
            {"angle_deg": 0.0, "offset_cells": o - c} for o in (6.5, 55.0, 104.0, 152.5)
        ] + [
            {"angle_deg": 90.0, "offset_cells": -(o - c)} for o in (6.5, 152.5)
        ]
        write_gt(gt_path, entries)
        code, filtered = run_json(capsys, ["walls", cluttered_office_pgm, "--gt", str(gt_path), "--json", "-"])
        assert code == 0
        code, raw = run_json(
            capsys, ["walls", cluttered_office_pgm, "--no-filter", "--gt", str(gt_path), "--json", "-"]
        )
        assert code == 0
        assert filtered["wall_eval"]["mean_cost"] <= raw["wall_eval"]["mean_cost"]


class TestInject:
    def test_writes_map_and_truth(self, office_pgm, tmp_path, capsys):
        out = tmp_path / "cluttered.pgm"
        truth = tmp_path / "truth.png"
        code, report = run_json(
            capsys,
            ["inject", office_pgm, "--shape", "square", "--size", "5", "--count", "10",
             "--seed", "3", "-o", str(out), "--truth-out", str(truth), "--json", "-"],
        )
        assert code == 0
        cluttered = binarize(load_map(str(out)))
        original = binarize(load_map(office_pgm))
        assert cluttered.occupied_count > original.occupied_count
        assert report["clutter"]["clutter_cells"] == cluttered.occupied_count - original.occupied_count
        assert truth.stat().st_size > 0


class TestSweepAndCorrelate:
    def write_config(self, tmp_path, office_pgm):
        cfg = {
            "maps": {"office": office_pgm},
            "shapes": ["square"],
            "sizes": [5],
            "counts": [20],
            "seeds": [0],
        }
        path = tmp_path / "sweep.yaml"
        path.write_text(yaml.safe_dump(cfg))
        return str(path)

    def test_single_row_sweep(self, office_pgm, tmp_path, capsys):
        cfg = self.write_config(tmp_path, office_pgm)
        out_dir = tmp_path / "out"
        assert cli.main(["sweep", cfg, "-o", str(out_dir)]) == 0
        rows = (out_dir / "rows.csv").read_text().strip().splitlines()
        assert len(rows) == 2  # header + 1 row

    def test_sweep_determinism(self, office_pgm, tmp_path, capsys):
        cfg = self.write_config(tmp_path, office_pgm)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", cfg, "-o", str(d1)]) == 0
        assert cli.main(["sweep", cfg, "-o", str(d2)]) == 0
        assert (d1 / "rows.csv").read_bytes() == (d2 / "rows.csv").read_bytes()
        assert (d1 / "rows.json").read_bytes() == (d2 / "rows.json").read_bytes()

    def test_malformed_config_exit_2(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("shapes: [square]\n")  # no maps
        assert cli.main(["sweep", str(bad)]) == 2

    def test_correlate(self, tmp_path, capsys):
        csv_path = tmp_path / "rows.csv"
        lines = ["map,shape,size,count,seed,precision,recall,w,s,flags"]
        ws = [0.1, 0.2, 0.3, 0.4]
        for i, w in enumerate(ws):
            lines.append(f"m,square,5,20,{i},{1 - w},1.0,{w},0.5,")
        csv_path.write_text("\n".join(lines) + "\n")
        code, report = run_json(capsys, ["correlate", str(csv_path), "--json", "-"])
        assert code == 0
        assert report["r"] == pytest.approx(-1.0)


class TestDeterminism:
    def test_analyze_rerun_identical(self, rect_pgm, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(["analyze", rect_pgm, "--json", str(a)]) == 0
        assert cli.main(["analyze", rect_pgm, "--json", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_declutter_rerun_identical(self, office_pgm, tmp_path):
        outs = []
        for name in ("a", "b"):
            o = tmp_path / f"{name}.pgm"
            r = tmp_path / f"{name}.json"
            assert cli.main(["declutter", office_pgm, "-o", str(o), "--json", str(r)]) == 0
            outs.append((o.read_bytes(), r.read_bytes()))
        assert outs[0] == outs[1]
