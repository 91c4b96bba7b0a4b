import json

import pytest

from ranloop.datalake import BufferingWriter, DataLake, detect_violations, summarize_agent_behavior
from ranloop.datalake.analytics import ViolationDetector


def test_first_append_is_seq_one(tmp_path):
    lake = DataLake(tmp_path)
    assert lake.append("lifecycle", {"event": "boot"}, 0.0) == 1


def test_seqs_strictly_increase(tmp_path):
    lake = DataLake(tmp_path)
    seqs = [lake.append("kpi", {"n": i}, float(i)) for i in range(20)]
    assert seqs == list(range(1, 21))


def test_reopen_preserves_acknowledged_records(tmp_path):
    lake = DataLake(tmp_path)
    for i in range(10):
        lake.append("decision", {"n": i}, float(i), agent_id="pc-agent")
    # no close(): simulates the writer dying without a clean shutdown
    reopened = DataLake(tmp_path)
    got = list(reopened.iter_records())
    assert [r.payload["n"] for r in got] == list(range(10))
    assert reopened.append("decision", {"n": 10}, 10.0) == 11


def test_segment_rollover_and_order(tmp_path):
    lake = DataLake(tmp_path, segment_records=5)
    for i in range(12):
        lake.append("kpi", {"n": i}, float(i))
    segments = sorted(p.name for p in tmp_path.glob("segment-*.ndjson"))
    assert len(segments) == 3
    assert [r.seq for r in lake.iter_records()] == list(range(1, 13))


def test_query_range_inclusive_and_kind_filtered(tmp_path):
    lake = DataLake(tmp_path)
    lake.append("kpi", {}, 1.0)
    lake.append("decision", {}, 2.0)
    lake.append("kpi", {}, 2.0)
    lake.append("kpi", {}, 3.0)
    got = lake.query_range({"kpi"}, 2.0, 2.0)
    assert len(got) == 1 and got[0].timestamp_s == 2.0
    got = lake.query_range({"kpi", "decision"}, 1.0, 2.0)
    assert len(got) == 3
    assert lake.query_range({"kpi"}, 5.0, 9.0) == []


def test_query_range_rejects_inverted_bounds(tmp_path):
    lake = DataLake(tmp_path)
    with pytest.raises(ValueError):
        lake.query_range(None, 2.0, 1.0)


def test_empty_store_queries_empty(tmp_path):
    lake = DataLake(tmp_path)
    assert lake.query_range(None, 0.0, 100.0) == []


def test_records_are_single_json_lines(tmp_path):
    lake = DataLake(tmp_path)
    lake.append("message", {"body_text": "hello"}, 0.5, agent_id="l2-manager")
    raw = (tmp_path / "segment-000001.ndjson").read_text().strip().splitlines()
    assert len(raw) == 1
    obj = json.loads(raw[0])
    assert obj["kind"] == "message" and obj["payload"]["body_text"] == "hello"


def test_buffering_writer_survives_storage_failure(tmp_path):
    lake = DataLake(tmp_path)
    writer = BufferingWriter(lake, capacity=1000)
    assert writer.append("kpi", {"n": 0}, 0.0) == 1

    original = lake.append
    def boom(*a, **k):
        raise OSError("disk gone")
    lake.append = boom
    for i in range(5):
        assert writer.append("kpi", {"n": i + 1}, float(i + 1)) is None
    assert writer.buffered == 5

    lake.append = original
    writer.append("kpi", {"n": 6}, 6.0)
    assert writer.buffered == 0
    values = [r.payload["n"] for r in lake.iter_records()]
    assert values == list(range(7))


# --- violation detection ----------------------------------------------------


def _kpi_payload(mtc_bps: float, fwa_bps: float = 4e7) -> dict:
    return {
        "per_slice": [
            {"slice_id": 0, "aggregate_throughput_bps": fwa_bps,
             "prb_utilization_fraction": 0.5},
            {"slice_id": 1, "aggregate_throughput_bps": mtc_bps,
             "prb_utilization_fraction": 0.5},
        ],
        "per_ue": [],
    }


def _intent(min_bps=30e6):
    return {
        "intent_id": "intent-1",
        "timestamp_s": 0.0,
        "requirements": [
            {"slice_id": 1, "priority": "high", "min_throughput_bps": min_bps},
        ],
    }


def _fill(lake, series):
    for i, mtc in enumerate(series):
        lake.append("kpi", _kpi_payload(mtc), float(i + 1))


def test_three_sample_dip_yields_exactly_one_violation(tmp_path):
    lake = DataLake(tmp_path)
    series = [35e6] * 5 + [25e6] * 3 + [35e6] * 5
    _fill(lake, series)
    reports = detect_violations(lake, _intent(), window_s=1.0)
    assert len(reports) == 1
    r = reports[0]
    assert r.slice_id == 1
    assert r.required_bps == 30e6
    assert r.start_s == 6.0          # first failing sample
    assert r.end_s == 9.0            # first passing sample of the closing pair
    assert r.resolved


def test_single_sample_dip_is_debounced(tmp_path):
    lake = DataLake(tmp_path)
    _fill(lake, [35e6] * 5 + [25e6] + [35e6] * 5)
    assert detect_violations(lake, _intent(), window_s=1.0) == []


def test_unresolved_violation_marks_resolved_false(tmp_path):
    lake = DataLake(tmp_path)
    _fill(lake, [35e6] * 3 + [25e6] * 4)
    reports = detect_violations(lake, _intent(), window_s=1.0)
    assert len(reports) == 1
    assert not reports[0].resolved
    assert reports[0].end_s == 7.0


def test_all_requirements_met_yields_no_reports(tmp_path):
    lake = DataLake(tmp_path)
    _fill(lake, [35e6] * 10)
    assert detect_violations(lake, _intent(), window_s=1.0) == []


def test_detection_is_pure_replay_of_the_log(tmp_path):
    lake = DataLake(tmp_path)
    series = [35e6] * 4 + [20e6] * 4 + [35e6] * 4 + [22e6] * 2 + [35e6] * 4
    _fill(lake, series)
    a = [r.to_dict() for r in detect_violations(lake, _intent(), window_s=1.0)]
    b = [r.to_dict() for r in detect_violations(lake, _intent(), window_s=1.0)]
    assert a == b and len(a) == 2


def test_intent_without_quantitative_requirement_rejected(tmp_path):
    lake = DataLake(tmp_path)
    with pytest.raises(ValueError):
        detect_violations(lake, {"intent_id": "x", "requirements": [
            {"slice_id": 0, "priority": "high"}]}, window_s=1.0)


def test_incremental_detector_matches_batch(tmp_path):
    lake = DataLake(tmp_path)
    series = [35e6] * 4 + [20e6] * 5 + [35e6] * 6
    _fill(lake, series)
    live = ViolationDetector("intent-1", _intent()["requirements"], window_s=1.0)
    for rec in lake.iter_records():
        live.feed_snapshot(rec.timestamp_s, {
            int(s["slice_id"]): s["aggregate_throughput_bps"]
            for s in rec.payload["per_slice"]
        })
    batch = detect_violations(lake, _intent(), window_s=1.0)
    assert [r.to_dict() for r in live.reports] == [r.to_dict() for r in batch]


# --- behavior summaries ----------------------------------------------------


def _decision(cycle, proposed, clamped):
    return {
        "cycle_index": cycle,
        "proposed_actions": proposed,
        "clamped_actions": clamped,
        "rationale_text": "because",
    }


def test_summary_counts_clamps(tmp_path):
    lake = DataLake(tmp_path)
    for i in range(5):
        lake.append(
            "decision",
            _decision(
                i,
                [{"kind": "snr_target", "ue_id": 0, "value": 18.0, "previous": 10.0}],
                [{"kind": "snr_target", "ue_id": 0, "value": 13.0, "previous": 10.0}],
            ),
            float(i),
            agent_id="pc-agent",
        )
    summary = summarize_agent_behavior(lake, "pc-agent", 0.0, 10.0)
    assert summary.clamp_count == 5
    assert summary.action_counts == {"snr_target": 5}
    assert summary.max_step_count == 5  # 3 dB applied steps
    assert "clamps: 5" in summary.text


def test_summary_for_unknown_agent_flagged(tmp_path):
    lake = DataLake(tmp_path)
    summary = summarize_agent_behavior(lake, "ghost", 0.0, 1.0)
    assert not summary.found
    assert summary.action_counts == {}
    assert "ghost" in summary.text


def test_summary_tracks_max_step_runs(tmp_path):
    lake = DataLake(tmp_path)
    deltas = [3.0, 3.0, 3.0, 1.0, 3.0]
    value = 18.0
    for i, d in enumerate(deltas):
        action = {"kind": "snr_target", "ue_id": 2, "value": value - d, "previous": value}
        value -= d
        lake.append("decision", _decision(i, [dict(action)], [dict(action)]),
                    float(i), agent_id="pc-agent")
    summary = summarize_agent_behavior(lake, "pc-agent", 0.0, 10.0)
    assert summary.longest_max_step_run == 3
    assert summary.clamp_count == 0
