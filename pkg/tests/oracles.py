"""Independent oracles the tests check the library against.

Everything here recomputes results from first principles (plain scans,
brute-force enumeration, or networkx), deliberately avoiding the code
paths under test.
"""

from __future__ import annotations

import networkx as nx

from pkgverse.graph import TimedSnapshot, UniverseGraph


def edge_scan_out(g, uid: int) -> set[int]:
    """Out-neighbourhood recomputed by scanning the full use-edge set."""
    return {e.dst for e in g.use_edges if e.src == uid}


def edge_scan_in(g, uid: int) -> set[int]:
    return {e.src for e in g.use_edges if e.dst == uid}


def reachability_closure(g, uid: int) -> set[int]:
    """Transitive dependencies recomputed via networkx descendants."""
    dg = nx.DiGraph()
    units = g.units if isinstance(g, UniverseGraph) else sorted(g.units, key=lambda u: u.uid)
    dg.add_nodes_from(u.uid for u in units)
    dg.add_edges_from((e.src, e.dst) for e in g.use_edges)
    return set(nx.descendants(dg, uid)) - {uid}


def brute_snapshot(g: UniverseGraph, t: int) -> TimedSnapshot:
    """Filter-and-induce computed directly from the definition."""
    units = frozenset(u for u in g.units if u.time <= t)
    uids = {u.uid for u in units}
    return TimedSnapshot(
        at=t,
        units=units,
        use_edges=frozenset(e for e in g.use_edges if {e.src, e.dst} <= uids),
        update_edges=frozenset(e for e in g.update_edges if {e.src, e.dst} <= uids),
    )


def time_sorted_chain(g, name: str) -> list[int]:
    """Chain order predicted by sorting that name's units by time."""
    units = [u for u in (g.units if isinstance(g, UniverseGraph) else g.units) if u.name == name]
    return [u.uid for u in sorted(units, key=lambda u: (u.time, u.uid))]


def congruence_brute_force(dependency_edges, contributions):
    """O(D * C^2) scan over every developer's contribution pairs.

    Returns the set of (developer, client, library, client_cid, library_cid)
    tuples, with each side represented by its earliest contribution.
    """
    dep_edges = set(dependency_edges)
    by_dev: dict[str, list] = {}
    for c in contributions:
        by_dev.setdefault(c.developer, []).append(c)
    found = {}
    for dev, items in by_dev.items():
        for c1 in items:
            for c2 in items:
                if (c1.target, c2.target) in dep_edges:
                    key = (dev, c1.target, c2.target)
                    best_client, best_library = found.get(key, (None, None))
                    if best_client is None or (c1.time, c1.id) < (best_client.time, best_client.id):
                        best_client = c1
                    if best_library is None or (c2.time, c2.id) < (best_library.time, best_library.id):
                        best_library = c2
                    found[key] = (best_client, best_library)
    return {
        (dev, client, library, cc.id, lc.id)
        for (dev, client, library), (cc, lc) in found.items()
    }


def breakage_oracle(snapshot: TimedSnapshot, subset: set[str]):
    """(dangling, broken, severed) recomputed with networkx reachability."""
    name_of = {u.uid: u.name for u in snapshot.units}
    dangling = sum(
        1
        for e in snapshot.use_edges
        if (name_of[e.src] in subset) != (name_of[e.dst] in subset)
    )

    full = nx.DiGraph()
    full.add_nodes_from(name_of.values())
    for e in snapshot.use_edges:
        a, b = name_of[e.src], name_of[e.dst]
        if a != b:
            full.add_edge(a, b)
    kept = full.subgraph(subset)
    full_pairs = {
        (a, b) for a in full.nodes for b in nx.descendants(full, a) if a != b
    }
    kept_pairs = {
        (a, b) for a in kept.nodes for b in nx.descendants(kept, a) if a != b
    }
    broken = len(full_pairs - kept_pairs)

    # chains of an excluded name, recomputed as the connected components
    # (with at least one edge) of its update-edge subgraph
    severed = 0
    for name in {u.name for u in snapshot.units} - set(subset):
        chain_graph = nx.Graph()
        for e in snapshot.update_edges:
            if name_of[e.src] == name:
                chain_graph.add_edge(e.src, e.dst)
        severed += sum(1 for comp in nx.connected_components(chain_graph) if len(comp) >= 2)
    return dangling, broken, severed


def nested_resolution_map(tree) -> dict:
    """(name, version) -> {dep name: resolved version}, read off the nested
    tree by enumeration (shared subtrees visited once)."""
    resolution: dict = {}
    stack, seen = [tree], set()
    while stack:
        node = stack.pop()
        if id(node) in seen or node.back_reference:
            continue
        seen.add(id(node))
        resolution[(node.name, node.version)] = {c.name: c.version for c in node.children}
        stack.extend(node.children)
    return resolution


def flat_lookup(flat_root, node, dep_name):
    """Version found from ``node`` under the nearest-enclosing-scope rule:
    own nested children first, then the top level."""
    for child in node.children:
        if child.name == dep_name:
            return child.version
    for child in flat_root.children:
        if child.name == dep_name:
            return child.version
    if flat_root.name == dep_name:
        return flat_root.version
    return None


def assert_flatten_preserves_resolution(nested, flat):
    resolution = nested_resolution_map(nested)
    stack = [flat]
    while stack:
        node = stack.pop()
        stack.extend(node.children)
        if node.back_reference:
            continue
        for dep_name, version in resolution.get((node.name, node.version), {}).items():
            assert flat_lookup(flat, node, dep_name) == version


def satisfying_max(rng, versions):
    """Resolution oracle: enumerate every satisfying version, take the max."""
    matching = [v for v in versions if rng.matches(v)]
    if not matching:
        return None
    best = matching[0]
    for v in matching[1:]:
        if v > best:
            best = v
    return best


# --- DOT grammar checker -----------------------------------------------------

import re

_DOT_TOKEN = re.compile(
    r"""\s*(?:
        (?P<string>"(?:[^"\\]|\\.)*")
      | (?P<id>[A-Za-z_][A-Za-z_0-9]*|-?\d+(?:\.\d+)?)
      | (?P<punct>->|[{}\[\];=,])
    )""",
    re.VERBOSE,
)


def _tokenize_dot(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _DOT_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"unexpected DOT character at {pos}: {text[pos:pos + 20]!r}")
            break
        pos = m.end()
        if m.lastgroup == "punct":
            tokens.append(("punct", m.group("punct")))
        elif m.lastgroup == "string":
            tokens.append(("id", m.group("string")))
        else:
            tokens.append(("id", m.group("id")))
    return tokens


def check_dot_document(text: str):
    """Parse a digraph document; returns (node_ids, edges) or raises.

    Accepts the subset of the DOT grammar the exporter may emit: node
    statements with optional attribute lists, and edge statements.
    """
    tokens = _tokenize_dot(text)
    pos = 0

    def expect(value=None, kind=None):
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of DOT document")
        t_kind, t_value = tokens[pos]
        if value is not None and t_value != value:
            raise ValueError(f"expected {value!r}, got {t_value!r}")
        if kind is not None and t_kind != kind:
            raise ValueError(f"expected {kind}, got {t_kind} {t_value!r}")
        pos += 1
        return t_value

    def maybe(value):
        nonlocal pos
        if pos < len(tokens) and tokens[pos][1] == value:
            pos += 1
            return True
        return False

    expect("digraph")
    if tokens[pos][1] != "{":
        expect(kind="id")  # graph name
    expect("{")
    nodes: set[str] = set()
    edges: list[tuple[str, str]] = []
    while not maybe("}"):
        left = expect(kind="id")
        if maybe("->"):
            right = expect(kind="id")
            edges.append((left, right))
        else:
            nodes.add(left)
        if maybe("["):
            while not maybe("]"):
                expect(kind="id")
                expect("=")
                expect(kind="id")
                maybe(",")
        maybe(";")
    if pos != len(tokens):
        raise ValueError("trailing tokens after closing brace")
    return nodes, edges
