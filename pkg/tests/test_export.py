import io
import xml.etree.ElementTree as ET

from pkgverse.contrib import CongruentPair, Window
from pkgverse.export import (
    export_snapshot_series,
    snapshot_to_dot,
    snapshot_to_graphml,
    snapshot_to_json,
    write_congruence_csv,
)
from pkgverse.fixtures import sample_universe
from pkgverse.sampling import snapshot_series

from oracles import check_dot_document


def full_snapshot():
    g, _ = sample_universe()
    return g, g.timed_snapshot(max(u.time for u in g.units))


class TestDot:
    def test_grammar_checker_accepts_export(self):
        _, snap = full_snapshot()
        nodes, edges = check_dot_document(snapshot_to_dot(snap))
        assert len(nodes) == len(snap.units)
        assert len(edges) == len(snap.use_edges) + len(snap.update_edges)
        assert all(a in nodes and b in nodes for a, b in edges)

    def test_empty_snapshot(self):
        g, _ = sample_universe()
        nodes, edges = check_dot_document(snapshot_to_dot(g.timed_snapshot(0)))
        assert nodes == set() and edges == []

    def test_labels_are_quoted_and_escaped(self):
        from pkgverse.graph import UniverseGraph

        g = UniverseGraph()
        g.add_unit('we"ird', "1", 1)
        text = snapshot_to_dot(g.timed_snapshot(1))
        check_dot_document(text)
        assert '\\"' in text

    def test_deterministic(self):
        _, snap = full_snapshot()
        assert snapshot_to_dot(snap) == snapshot_to_dot(snap)


class TestGraphml:
    def test_well_formed_and_structured(self):
        _, snap = full_snapshot()
        root = ET.fromstring(snapshot_to_graphml(snap))
        ns = "{http://graphml.graphdrawing.org/xmlns}"
        assert root.tag == f"{ns}graphml"
        graph = root.find(f"{ns}graph")
        node_ids = {n.get("id") for n in graph.findall(f"{ns}node")}
        assert len(node_ids) == len(snap.units)
        declared_keys = {k.get("id") for k in root.findall(f"{ns}key")}
        for edge in graph.findall(f"{ns}edge"):
            assert edge.get("source") in node_ids
            assert edge.get("target") in node_ids
        for data in graph.iter(f"{ns}data"):
            assert data.get("key") in declared_keys


class TestJson:
    def test_document_shape(self):
        import json

        _, snap = full_snapshot()
        doc = json.loads(snapshot_to_json(snap))
        assert doc["at"] == snap.at
        assert len(doc["units"]) == len(snap.units)
        assert all(set(u) == {"uid", "name", "release", "time"} for u in doc["units"])


class TestCsvAndSeries:
    def test_congruence_csv(self):
        buf = io.StringIO()
        pair = CongruentPair("alice", "app", "parser", "c1", "c2")
        write_congruence_csv(buf, [(Window(0, 100), pair)])
        lines = buf.getvalue().splitlines()
        assert lines[0] == "window_start,developer,client,library,client_contribution,library_contribution"
        assert lines[1] == "0,alice,app,parser,c1,c2"

    def test_series_export_writes_one_dot_per_snapshot(self, tmp_path):
        g, _ = sample_universe()
        series = snapshot_series(g, 0, 6, 2)
        paths = export_snapshot_series(series, tmp_path / "out")
        assert [p.name for p in paths] == [
            "snapshot_0.dot", "snapshot_2.dot", "snapshot_4.dot", "snapshot_6.dot",
        ]
        for p in paths:
            check_dot_document(p.read_text())
