import json
import random

import pytest

from pkgverse.errors import CorruptLog, SchemaError
from pkgverse.eventlog import (
    EventLog,
    alias_event,
    contribution_event,
    replay,
    replay_until,
    unit_event,
    update_event,
    use_event,
    validate_payload,
)
from pkgverse.fixtures import sample_universe, sample_universe_events, sample_universe_extended


def write_log(path, events):
    path.touch()
    with EventLog(path) as log:
        for e in events:
            log.append(e)
    return log


class TestAppend:
    def test_first_seq_is_one(self, tmp_path):
        log = EventLog(tmp_path / "log.ndjson")
        assert log.append(unit_event("a", "1", 10)) == 1
        assert log.append(unit_event("a", "2", 20)) == 2

    def test_seq_continues_across_reopen(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, [unit_event("a", "1", 10)])
        log = EventLog(path)
        assert log.append(unit_event("a", "2", 20)) == 2
        log.close()

    def test_malformed_payload_rejected(self, tmp_path):
        log = EventLog(tmp_path / "log.ndjson")
        with pytest.raises(SchemaError):
            log.append(unit_event("a", "", 10))
        with pytest.raises(SchemaError):
            log.append(contribution_event("c1", "dev", "pkg", "vote", 5))
        assert not (tmp_path / "log.ndjson").exists()

    def test_wire_format_is_exact(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(
            path,
            [
                unit_event("a", "1.0.0", 100),
                use_event(("a", "1.0.0"), ("b", "2.0.0")),
                contribution_event("c1", "alice", "a", "pr", 120, merged=True),
                alias_event("alice", "a.jones"),
            ],
        )
        lines = path.read_text().splitlines()
        assert lines[0] == '{"v":1,"seq":1,"kind":"unit","name":"a","release":"1.0.0","time":100}'
        assert lines[1] == '{"v":1,"seq":2,"kind":"use","from":["a","1.0.0"],"to":["b","2.0.0"]}'
        assert lines[2] == (
            '{"v":1,"seq":3,"kind":"contribution","id":"c1","dev":"alice",'
            '"target":["a"],"ctype":"pr","time":120,"merged":true}'
        )
        assert lines[3] == '{"v":1,"seq":4,"kind":"developer-alias","canonical":"alice","alias":"a.jones"}'

    def test_append_only_file_growth(self, tmp_path):
        path = tmp_path / "log.ndjson"
        sizes = []
        with EventLog(path) as log:
            for i in range(20):
                log.append(unit_event("p", str(i), i))
                sizes.append(path.stat().st_size)
        assert sizes == sorted(sizes)
        head = path.read_bytes()[: sizes[0]]
        assert head == json.dumps(
            {"v": 1, "seq": 1, "kind": "unit", "name": "p", "release": "0", "time": 0},
            separators=(",", ":"),
        ).encode() + b"\n"


class TestValidatePayload:
    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            validate_payload("rename", {})

    def test_extra_fields_dropped(self):
        payload = validate_payload("unit", {"name": "a", "release": "1", "time": 1, "junk": 9})
        assert payload == {"name": "a", "release": "1", "time": 1}

    def test_bool_is_not_a_time(self):
        with pytest.raises(SchemaError):
            validate_payload("unit", {"name": "a", "release": "1", "time": True})


class TestReplay:
    def test_empty_log(self, tmp_path):
        path = tmp_path / "log.ndjson"
        path.write_text("")
        result = replay(path)
        assert result.graph.unit_count() == 0
        assert result.quarantine == []

    def test_replays_sample_universe(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, sample_universe_events())
        result = replay(path)
        expected, _ = sample_universe()
        assert result.graph == expected
        assert result.quarantine == []

    def test_growth_events_extend_base_log(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, sample_universe_events())
        with EventLog(path) as log:
            log.append(unit_event("a", "3", 6))
            log.append(use_event(("a", "3"), ("x", "2")))
            log.append(update_event(("a", "2"), ("a", "3")))
        result = replay(path)
        expected, _ = sample_universe_extended()
        assert result.graph == expected

    def test_axiom_violation_quarantined_rest_applied(self, tmp_path):
        path = tmp_path / "log.ndjson"
        events = sample_universe_events() + [update_event(("q", "3"), ("x", "2"))]
        write_log(path, events)
        result = replay(path)
        expected, _ = sample_universe()
        assert result.graph == expected
        assert len(result.quarantine) == 1
        assert result.quarantine[0].reason == "NameAxiomViolation"

    def test_unknown_reference_quarantined(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, [unit_event("a", "1", 1), use_event(("a", "1"), ("ghost", "9"))])
        result = replay(path)
        assert [q.reason for q in result.quarantine] == ["UnknownUnit"]
        assert result.graph.unit_count() == 1

    def test_contributions_and_aliases_surface(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(
            path,
            [
                contribution_event("c1", "alice", "a", "issue", 50),
                alias_event("alice", "al"),
            ],
        )
        result = replay(path)
        assert result.contributions[0]["id"] == "c1"
        assert result.aliases == [("alice", "al")]

    def test_garbled_line_is_corrupt_log(self, tmp_path):
        path = tmp_path / "log.ndjson"
        path.write_text('{"v":1,"seq":1,"kind":"unit","name":"a","release":"1","time":1}\n{oops\n')
        with pytest.raises(CorruptLog):
            replay(path)

    def test_schema_violations_quarantined(self, tmp_path):
        path = tmp_path / "log.ndjson"
        path.write_text('{"v":1,"seq":1,"kind":"unit","name":"a","time":1}\n')
        result = replay(path)
        assert result.graph.unit_count() == 0
        assert result.quarantine[0].reason == "SchemaError"

    def test_strict_mode_quarantines_time_anomalies(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(
            path,
            [
                unit_event("old", "1", 1),
                unit_event("new", "1", 9),
                use_event(("old", "1"), ("new", "1")),
            ],
        )
        relaxed = replay(path)
        assert relaxed.quarantine == [] and len(relaxed.graph.anomalies) == 1
        strict = replay(path, strict=True)
        assert [q.reason for q in strict.quarantine] == ["TimeAnomaly"]


def random_events(rng, n):
    events = []
    units = []
    for i in range(n):
        roll = rng.random()
        if roll < 0.45 or len(units) < 2:
            name = f"p{rng.randrange(8)}"
            release = f"{rng.randrange(40)}"
            events.append(unit_event(name, release, i))
            units.append((name, release))
        elif roll < 0.8:
            events.append(use_event(rng.choice(units), rng.choice(units)))
        elif roll < 0.92:
            events.append(update_event(rng.choice(units), rng.choice(units)))
        else:
            events.append(
                contribution_event(f"c{i}", f"dev{rng.randrange(5)}", "p0", "issue", i)
            )
    return events


class TestReplayProperties:
    def test_replay_determinism(self, tmp_path):
        rng = random.Random(7)
        for round_no in range(25):
            path = tmp_path / f"log{round_no}.ndjson"
            write_log(path, random_events(rng, rng.randint(1, 120)))
            first = replay(path)
            second = replay(path)
            assert first.graph == second.graph
            assert first.quarantine == second.quarantine

    def test_split_replay_equivalence(self, tmp_path):
        rng = random.Random(11)
        for round_no in range(25):
            events = random_events(rng, rng.randint(2, 120))
            cut = rng.randrange(len(events) + 1)
            p1 = tmp_path / f"a{round_no}.ndjson"
            p2 = tmp_path / f"b{round_no}.ndjson"
            p12 = tmp_path / f"ab{round_no}.ndjson"
            write_log(p1, events[:cut])
            write_log(p2, events[cut:])
            # byte-level concatenation of the two logs
            p12.write_bytes(p1.read_bytes() + p2.read_bytes())
            combined = replay(p12)
            split = replay(p1)
            split = replay(p2, into=split)
            assert combined.graph == split.graph
            assert [q.reason for q in combined.quarantine] == [
                q.reason for q in split.quarantine
            ]


def test_reader_between_appends_sees_a_prefix(tmp_path):
    path = tmp_path / "log.ndjson"
    events = sample_universe_events()
    with EventLog(path) as log:
        for i, event in enumerate(events):
            log.append(event)
            if i == 3:
                partial = replay(path)
                assert partial.graph.unit_count() == 4
    full = replay(path)
    assert full.graph.unit_count() == 7
    expected, _ = sample_universe()
    assert full.graph == expected


class TestReplayUntil:
    def test_zero_is_empty(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, sample_universe_events())
        assert replay_until(path, 0).unit_count() == 0

    def test_infinity_is_full_graph(self, tmp_path):
        path = tmp_path / "log.ndjson"
        write_log(path, sample_universe_events())
        g = replay_until(path, 10**12)
        expected, _ = sample_universe()
        assert g == expected

    def test_equals_snapshot_of_full_replay(self, tmp_path):
        rng = random.Random(13)
        for round_no in range(10):
            path = tmp_path / f"log{round_no}.ndjson"
            write_log(path, random_events(rng, rng.randint(1, 200)))
            t = rng.randint(0, 220)
            partial = replay_until(path, t)
            snap = replay(path).graph.timed_snapshot(t)
            assert {(u.name, u.release, u.time) for u in partial.units} == {
                (u.name, u.release, u.time) for u in snap.units
            }
            def edge_keys(units_by_uid, edges):
                return {
                    (units_by_uid[e.src], units_by_uid[e.dst]) for e in edges
                }
            partial_names = {u.uid: (u.name, u.release) for u in partial.units}
            snap_names = {u.uid: (u.name, u.release) for u in snap.units}
            assert edge_keys(partial_names, partial.use_edges) == edge_keys(
                snap_names, snap.use_edges
            )
            assert edge_keys(partial_names, partial.update_edges) == edge_keys(
                snap_names, snap.update_edges
            )
