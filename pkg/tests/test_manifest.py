import json

import pytest

from lus_triage.manifest import ManifestError, load_manifest, parse_manifest


def minimal_manifest(**overrides):
    doc = {
        "study_id": "study-001",
        "probe_type": "convex",
        "subject": {},
        "videos": [
            {
                "video_id": "v1",
                "scan_location": 1,
                "fps": 30,
                "frames": [
                    {
                        "frame_id": "v1_f0",
                        "image": "images/v1_f0.png",
                        "detections": "labels/v1_f0.txt",
                        "ground_truth": None,
                    }
                ],
            }
        ],
    }
    doc.update(overrides)
    return doc


def test_parse_minimal():
    study = parse_manifest(minimal_manifest())
    assert study.study_id == "study-001"
    assert study.probe_type == "convex"
    assert len(study.videos) == 1
    video = study.videos[0]
    assert video.scan_location == 1
    assert video.fps == 30
    assert video.frames[0].frame_id == "v1_f0"
    assert video.frames[0].ground_truth is None


def test_fourteen_locations_valid():
    videos = [
        {
            "video_id": f"v{loc}",
            "scan_location": loc,
            "fps": 20,
            "frames": [
                {
                    "frame_id": f"v{loc}_f0",
                    "image": f"images/v{loc}_f0.png",
                    "detections": None,
                    "ground_truth": None,
                }
            ],
        }
        for loc in range(1, 15)
    ]
    study = parse_manifest(minimal_manifest(videos=videos))
    assert sorted(v.scan_location for v in study.videos) == list(range(1, 15))


def test_null_scan_location_allowed():
    doc = minimal_manifest()
    doc["videos"][0]["scan_location"] = None
    assert parse_manifest(doc).videos[0].scan_location is None


def test_scan_location_out_of_protocol():
    doc = minimal_manifest()
    doc["videos"][0]["scan_location"] = 15
    with pytest.raises(ManifestError, match="scan_location"):
        parse_manifest(doc)


def test_duplicate_video_id():
    doc = minimal_manifest()
    doc["videos"].append(json.loads(json.dumps(doc["videos"][0])))
    doc["videos"][1]["frames"][0]["frame_id"] = "other"
    with pytest.raises(ManifestError, match="duplicate video_id"):
        parse_manifest(doc)


def test_duplicate_frame_id_across_videos():
    doc = minimal_manifest()
    second = json.loads(json.dumps(doc["videos"][0]))
    second["video_id"] = "v2"
    doc["videos"].append(second)
    with pytest.raises(ManifestError, match="duplicate frame_id"):
        parse_manifest(doc)


def test_bad_probe_type():
    with pytest.raises(ManifestError, match="probe_type"):
        parse_manifest(minimal_manifest(probe_type="sector"))


def test_nonpositive_fps():
    doc = minimal_manifest()
    doc["videos"][0]["fps"] = 0
    with pytest.raises(ManifestError, match="fps"):
        parse_manifest(doc)


def test_missing_required_key():
    doc = minimal_manifest()
    del doc["study_id"]
    with pytest.raises(ManifestError, match="study_id"):
        parse_manifest(doc)


def test_load_resolves_relative_paths(tmp_path):
    (tmp_path / "manifest.json").write_text(json.dumps(minimal_manifest()))
    study = load_manifest(tmp_path / "manifest.json")
    frame = study.videos[0].frames[0]
    assert study.resolve(frame.image) == tmp_path / "images" / "v1_f0.png"


def test_strict_load_requires_referenced_files(tmp_path):
    (tmp_path / "manifest.json").write_text(json.dumps(minimal_manifest()))
    with pytest.raises(ManifestError, match="file not found"):
        load_manifest(tmp_path / "manifest.json", strict=True)


def test_strict_load_passes_when_files_exist(tmp_path):
    (tmp_path / "images").mkdir()
    (tmp_path / "labels").mkdir()
    (tmp_path / "images" / "v1_f0.png").write_bytes(b"")
    (tmp_path / "labels" / "v1_f0.txt").write_text("")
    (tmp_path / "manifest.json").write_text(json.dumps(minimal_manifest()))
    study = load_manifest(tmp_path / "manifest.json", strict=True)
    assert study.frame_index()["v1_f0"][1].frame_id == "v1_f0"
