"""End-to-end tests for the `triage` command-line interface."""

import json

import pytest
from click.testing import CliRunner

from lus_triage.cli import main

from fixtures import B, C, P, standard_study, write_study


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def study_dir(tmp_path):
    return standard_study(tmp_path)


def invoke(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return result


class TestScore:
    def test_stdout_payload(self, runner, study_dir):
        result = invoke(runner, ["score", "--manifest", str(study_dir / "manifest.json")])
        payload = json.loads(result.output)
        assert payload["schema_version"] == 1
        assert payload["study_id"] == "study-001"
        by_id = {v["video_id"]: v for v in payload["videos"]}
        assert by_id["v3"]["video_severity"] == 4
        assert by_id["v3"]["worst_frame_id"] == "v3_f2"
        assert by_id["vq"]["frames"][0]["severity"]["score"] == -1
        assert by_id["vq"]["frames"][0]["quality"]["components"] == ["pleura"]

    def test_byte_identical_across_runs(self, runner, study_dir, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        manifest = str(study_dir / "manifest.json")
        invoke(runner, ["score", "--manifest", manifest, "--out", str(first)])
        invoke(runner, ["score", "--manifest", manifest, "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_config_threshold_applies(self, runner, study_dir, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"confidence_threshold": 0.95}))
        result = invoke(
            runner,
            [
                "score",
                "--manifest",
                str(study_dir / "manifest.json"),
                "--config",
                str(config),
            ],
        )
        payload = json.loads(result.output)
        frames = [f for v in payload["videos"] for f in v["frames"]]
        assert all(f["detections"] == [] for f in frames)
        assert all(f["severity"]["score"] == -2 for f in frames)

    def test_missing_manifest_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["score", "--manifest", str(tmp_path / "no.json")])
        assert result.exit_code == 2


class TestSummarize:
    def test_copies_summary_frames(self, runner, study_dir, tmp_path):
        out = tmp_path / "summary"
        invoke(
            runner,
            [
                "summarize",
                "--manifest",
                str(study_dir / "manifest.json"),
                "--video",
                "v3",
                "--out",
                str(out),
            ],
        )
        payload = json.loads((out / "summary.json").read_text())
        assert [f["frame_id"] for f in payload["frames"]] == ["v3_f1", "v3_f2", "v3_f3"]
        for entry in payload["frames"]:
            assert (out / entry["image"]).exists()

    def test_unknown_video(self, runner, study_dir, tmp_path):
        result = runner.invoke(
            main,
            [
                "summarize",
                "--manifest",
                str(study_dir / "manifest.json"),
                "--video",
                "nope",
                "--out",
                str(tmp_path / "x"),
            ],
        )
        assert result.exit_code == 1
        assert "nope" in result.output


class TestReport:
    def test_colors_and_svg(self, runner, study_dir, tmp_path):
        out, svg = tmp_path / "report.json", tmp_path / "report.svg"
        invoke(
            runner,
            [
                "report",
                "--manifest",
                str(study_dir / "manifest.json"),
                "--out",
                str(out),
                "--svg",
                str(svg),
            ],
        )
        payload = json.loads(out.read_text())
        assert payload["locations"]["3"]["color"] == "Red"
        assert payload["locations"]["7"]["color"] == "Green"
        assert payload["locations"]["9"]["color"] == "Black"
        assert svg.read_text().startswith("<svg")


class TestEvaluate:
    def test_perfect_predictions(self, runner, tmp_path):
        study_dir = write_study(
            tmp_path,
            "eval-study",
            videos=[
                (
                    "v1",
                    1,
                    [
                        {"classes": (P, B), "ground_truth": (P, B)},
                        {"classes": (P, C), "ground_truth": (P, C)},
                    ],
                )
            ],
        )
        manifest = str(study_dir / "manifest.json")
        result = invoke(
            runner,
            ["evaluate", "--gt-manifest", manifest, "--pred-manifest", manifest],
        )
        payload = json.loads(result.output)
        assert payload["mAP"] == 1.0
        aps = payload["per_threshold"]["0.50"]["per_class_ap"]
        assert aps["Pleura"] == 1.0
        assert aps["BLines"] == 1.0
        assert aps["ALines"] is None

    def test_missed_class_halves_map(self, runner, tmp_path):
        study_dir = write_study(
            tmp_path,
            "eval-study",
            videos=[("v1", 1, [{"classes": (P,), "ground_truth": (P, B)}])],
        )
        manifest = str(study_dir / "manifest.json")
        result = invoke(
            runner,
            ["evaluate", "--gt-manifest", manifest, "--pred-manifest", manifest],
        )
        payload = json.loads(result.output)
        assert payload["per_threshold"]["0.50"]["per_class_ap"]["BLines"] == 0.0
        assert payload["mAP"] == 0.5

    def test_sweep_and_curves(self, runner, tmp_path):
        study_dir = write_study(
            tmp_path,
            "eval-study",
            videos=[("v1", 1, [{"classes": (P, B), "ground_truth": (P, B)}])],
        )
        manifest = str(study_dir / "manifest.json")
        out, curves = tmp_path / "eval.json", tmp_path / "curves.csv"
        invoke(
            runner,
            [
                "evaluate",
                "--gt-manifest",
                manifest,
                "--pred-manifest",
                manifest,
                "--iou",
                "sweep",
                "--out",
                str(out),
                "--curves",
                str(curves),
            ],
        )
        payload = json.loads(out.read_text())
        assert len(payload["per_threshold"]) == 10
        assert payload["mAP"] == 1.0
        lines = curves.read_text().splitlines()
        assert lines[0] == "class,threshold,precision,recall,f1"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 9 * 21  # 8 classes plus pooled "all", 21 thresholds
        pleura_low = next(r for r in rows if r[0] == "Pleura" and r[1] == "0.0")
        assert float(pleura_low[2]) == 1.0 and float(pleura_low[3]) == 1.0

    def test_bad_iou(self, runner, tmp_path):
        study_dir = standard_study(tmp_path)
        manifest = str(study_dir / "manifest.json")
        result = runner.invoke(
            main,
            [
                "evaluate",
                "--gt-manifest",
                manifest,
                "--pred-manifest",
                manifest,
                "--iou",
                "2.0",
            ],
        )
        assert result.exit_code == 1
        assert "outside [0, 1]" in result.output


class TestMetrics:
    def test_identity_matrix(self, runner, tmp_path):
        matrix = tmp_path / "matrix.json"
        matrix.write_text(
            json.dumps(
                {
                    "row_labels": ["A", "B"],
                    "col_labels": ["A", "B", "No class"],
                    "counts": [[5, 0, 2], [0, 7, 1]],
                }
            )
        )
        result = invoke(
            runner, ["metrics", "--confusion", str(matrix), "--exclude", "No class"]
        )
        payload = json.loads(result.output)
        assert payload["excluded_columns"] == ["No class"]
        for label in ("A", "B"):
            assert payload["per_class"][label] == {
                "accuracy": 1.0,
                "sensitivity": 1.0,
                "specificity": 1.0,
            }

    def test_unexcluded_extra_column_fails(self, runner, tmp_path):
        matrix = tmp_path / "matrix.json"
        matrix.write_text(
            json.dumps(
                {
                    "row_labels": ["A"],
                    "col_labels": ["A", "No class"],
                    "counts": [[5, 1]],
                }
            )
        )
        result = runner.invoke(main, ["metrics", "--confusion", str(matrix)])
        assert result.exit_code == 1
        assert "square" in result.output


class TestStoreCommands:
    def test_queue_override_export_flow(self, runner, tmp_path):
        standard_study(tmp_path)
        root = ["--root", str(tmp_path), "--study", "study-001"]

        result = invoke(runner, ["queue", *root])
        entries = json.loads(result.output)["entries"]
        assert {e["frame_id"] for e in entries} == {"vq_f0", "vq_f1"}
        assert all(e["status"] == "Pending" for e in entries)

        annotations = tmp_path / "fix.json"
        annotations.write_text(
            json.dumps(
                [
                    {"class": "Pleura", "bbox": [2, 2, 8, 8]},
                    {"class": "Consolidation", "bbox": [10, 4, 30, 20]},
                ]
            )
        )
        result = invoke(
            runner,
            [
                "override",
                *root,
                "--frame",
                "vq_f0",
                "--author",
                "reviewer-1",
                "--annotations",
                str(annotations),
                "--note",
                "missed consolidation",
            ],
        )
        payload = json.loads(result.output)
        assert payload["severity"]["severity_class"] == 4
        assert payload["queue_status"] == "Reviewed"

        result = invoke(runner, ["export", *root])
        manifest = json.loads(result.output)
        assert manifest["export_id"] == "export-0001"
        assert manifest["class_counts"] == {"Consolidation": 1, "Pleura": 1}

        result = invoke(runner, ["queue", *root])
        statuses = {
            e["frame_id"]: e["status"] for e in json.loads(result.output)["entries"]
        }
        assert statuses["vq_f0"] == "Exported"

    def test_unknown_study(self, runner, tmp_path):
        standard_study(tmp_path)
        result = runner.invoke(main, ["queue", "--root", str(tmp_path), "--study", "no"])
        assert result.exit_code == 1
        assert "study not found: no" in result.output


def test_serve_rejects_bad_addr(runner, tmp_path):
    standard_study(tmp_path)
    result = runner.invoke(main, ["serve", "--root", str(tmp_path), "--addr", "nonsense"])
    assert result.exit_code == 1
    assert "HOST:PORT" in result.output
