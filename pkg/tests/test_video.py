import pytest
from hypothesis import given, strategies as st

from lus_triage.scoring import (
    FrameAnalysis,
    QualityLabel,
    QualityResult,
    SeverityResult,
    quality_label,
    severity_score,
)
from lus_triage.landmarks import LandmarkClass
from lus_triage.video import (
    COLOR_HEX,
    Diagnosis,
    ReportColor,
    aggregate_video,
    classify_video_binary,
    report_svg,
    scan_report,
    severity_boxplot,
    severity_color,
    summarize_video,
)

from oracles import ref_five_number

_SETS_BY_SCORE = {
    -2: frozenset(),
    -1: frozenset({LandmarkClass.Pleura}),
    0: frozenset({LandmarkClass.Pleura, LandmarkClass.ALines}),
    1: frozenset({LandmarkClass.Pleura, LandmarkClass.BLines}),
    2: frozenset({LandmarkClass.Pleura, LandmarkClass.BPatch}),
    3: frozenset({LandmarkClass.Pleura, LandmarkClass.Consolidation}),
    4: frozenset({LandmarkClass.Pleura, LandmarkClass.AirBronchogram}),
}


def fake_frame(frame_id, score, quality=80):
    """FrameAnalysis with a planted severity score and quality score."""
    return FrameAnalysis(
        frame_id=frame_id,
        detections=(),
        quality=QualityResult(quality, quality_label(quality), frozenset()),
        severity=severity_score(_SETS_BY_SCORE[score]),
    )


def frames_of(scores, qualities=None):
    qualities = qualities or [80] * len(scores)
    return [fake_frame(f"f{i}", s, q) for i, (s, q) in enumerate(zip(scores, qualities))]


score_list_st = st.lists(st.sampled_from(sorted(_SETS_BY_SCORE)), max_size=30)


class TestAggregateVideo:
    def test_max_over_frames(self):
        video = aggregate_video("v", frames_of([-2, -1, 0]))
        assert video.video_severity == 0
        assert video.diagnosis is Diagnosis.Normal

    def test_worst_frame_is_earliest_argmax(self):
        video = aggregate_video("v", frames_of([0, 1, 3, 1, 3]))
        assert video.video_severity == 3
        assert video.worst_frame_id == "f2"

    def test_empty_video(self):
        video = aggregate_video("v", [])
        assert video.video_severity == -2
        assert video.diagnosis is Diagnosis.Undetected
        assert video.worst_frame_id is None
        assert video.summary_frame_ids == ()

    @given(score_list_st)
    def test_severity_is_permutation_invariant_worst_frame_is_not(self, scores):
        video = aggregate_video("v", frames_of(scores))
        flipped = aggregate_video("v", list(reversed(frames_of(scores))))
        assert video.video_severity == flipped.video_severity
        if scores:
            assert video.video_severity == max(scores)
            first_max = scores.index(max(scores))
            assert video.worst_frame_id == f"f{first_max}"

    @given(score_list_st, st.sampled_from(sorted(_SETS_BY_SCORE)))
    def test_appending_never_decreases_severity(self, scores, extra):
        before = aggregate_video("v", frames_of(scores)).video_severity
        after = aggregate_video("v", frames_of(scores + [extra])).video_severity
        assert after >= before

    @given(score_list_st)
    def test_abnormal_iff_summary_nonempty(self, scores):
        video = aggregate_video("v", frames_of(scores))
        assert (video.diagnosis is Diagnosis.Abnormal) == bool(video.summary_frame_ids)


class TestClassifyVideoBinary:
    @pytest.mark.parametrize(
        "severity,expected",
        [
            (4, Diagnosis.Abnormal),
            (1, Diagnosis.Abnormal),
            (0, Diagnosis.Normal),
            (-1, Diagnosis.Undetected),
            (-2, Diagnosis.Undetected),
        ],
    )
    def test_rule(self, severity, expected):
        assert classify_video_binary(severity) is expected


class TestSummarizeVideo:
    def test_severity_one_and_above(self):
        assert summarize_video(frames_of([0, 1, 2, 0])) == ["f1", "f2"]

    def test_all_normal_gives_empty_summary(self):
        assert summarize_video(frames_of([0, 0, 0])) == []

    def test_quality_filter_intersects(self):
        frames = frames_of([1, 1], qualities=[0, 80])
        assert summarize_video(frames, QualityLabel.Average) == ["f1"]

    @given(score_list_st)
    def test_filtered_summary_is_subset(self, scores):
        frames = frames_of(scores)
        unfiltered = summarize_video(frames)
        filtered = summarize_video(frames, QualityLabel.Excellent)
        assert set(filtered) <= set(unfiltered)
        by_id = {f.frame_id: f for f in frames}
        assert all(by_id[fid].severity.score >= 1 for fid in unfiltered)


class TestSeverityBoxplot:
    def test_constant(self):
        assert severity_boxplot([2, 2, 2]).as_dict() == {
            "min": 2, "q1": 2, "median": 2, "q3": 2, "max": 2,
        }

    def test_odd_length(self):
        assert severity_boxplot([0, 1, 2, 3, 4]).as_dict() == {
            "min": 0, "q1": 1, "median": 2, "q3": 3, "max": 4,
        }

    def test_two_points_interpolate(self):
        assert severity_boxplot([0, 4]).as_dict() == {
            "min": 0, "q1": 1, "median": 2, "q3": 3, "max": 4,
        }

    def test_empty_is_none(self):
        assert severity_boxplot([]) is None

    def test_negative_scores_rejected(self):
        with pytest.raises(ValueError):
            severity_boxplot([-1, 0])

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=40))
    def test_matches_percentile_oracle(self, scores):
        got = severity_boxplot(scores).as_dict()
        want = ref_five_number(scores)
        for key in want:
            assert got[key] == pytest.approx(want[key], abs=1e-12)


class TestColors:
    def test_mapping_is_total_and_exact(self):
        table = {
            0: ReportColor.Green,
            1: ReportColor.YellowGreen,
            2: ReportColor.Yellow,
            3: ReportColor.Orange,
            4: ReportColor.Red,
            -1: ReportColor.Black,
            -2: ReportColor.Black,
            None: ReportColor.Black,
        }
        for severity, color in table.items():
            assert severity_color(severity) is color

    def test_hex_table_covers_every_color(self):
        assert set(COLOR_HEX) == set(ReportColor)


class TestScanReport:
    def make_report(self):
        by_location = {
            3: [aggregate_video("v3", frames_of([1, 2, 3]))],
            7: [aggregate_video("v7", frames_of([0, 0]))],
        }
        return scan_report("study-x", by_location)

    def test_all_fourteen_keys(self):
        report = self.make_report()
        assert sorted(report.locations) == list(range(1, 15))

    def test_colors(self):
        report = self.make_report()
        assert report.locations[3].color is ReportColor.Orange
        assert report.locations[7].color is ReportColor.Green
        assert report.locations[9].color is ReportColor.Black
        assert report.locations[9].boxplot is None
        assert report.locations[9].video_severity is None

    def test_boxplot_values(self):
        report = self.make_report()
        assert report.locations[3].boxplot.as_dict() == {
            "min": 1, "q1": 1.5, "median": 2, "q3": 2.5, "max": 3,
        }

    def test_boxplot_excludes_undetected_frames(self):
        by_location = {1: [aggregate_video("v", frames_of([-2, -1, 2]))]}
        report = scan_report("s", by_location)
        assert report.locations[1].boxplot.as_dict() == {
            "min": 2, "q1": 2, "median": 2, "q3": 2, "max": 2,
        }

    def test_multiple_videos_pool(self):
        by_location = {
            2: [
                aggregate_video("a", frames_of([0])),
                aggregate_video("b", frames_of([4])),
            ]
        }
        report = scan_report("s", by_location)
        assert report.locations[2].video_severity == 4
        assert report.locations[2].color is ReportColor.Red
        assert report.locations[2].boxplot.as_dict()["min"] == 0

    def test_location_out_of_range(self):
        with pytest.raises(ValueError, match="location"):
            scan_report("s", {15: [aggregate_video("v", [])]})

    def test_undetected_location_is_black_not_green(self):
        by_location = {5: [aggregate_video("v", frames_of([-2]))]}
        report = scan_report("s", by_location)
        assert report.locations[5].color is ReportColor.Black
        assert report.locations[5].video_severity == -2


class TestReportSvg:
    def test_renders_fourteen_cells_with_mapped_fills(self):
        report = scan_report("study-x", {3: [aggregate_video("v", frames_of([4]))]})
        svg = report_svg(report)
        assert svg.count("<rect") == 14
        assert svg.count(f'fill="{COLOR_HEX[ReportColor.Red]}" stroke') == 1
        assert svg.count(f'fill="{COLOR_HEX[ReportColor.Black]}" stroke') == 13
        for label in [f"L{i}" for i in range(1, 8)] + [f"R{i}" for i in range(1, 8)]:
            assert f">{label}</text>" in svg
