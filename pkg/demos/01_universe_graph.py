"""
Building and querying a universe graph
======================================

A miniature ecosystem: three packages (a, q, x) where x is the workhorse
dependency, plus an update chain per package. We ask the basic questions —
who uses what, who depends on whom, what did the world look like at time t,
and what changed between two instants.
"""

from pkgverse import UniverseGraph, diff

g = UniverseGraph()

# x ships first, then a and q build on it
x1 = g.add_unit("x", "1", 1)
a1 = g.add_unit("a", "1", 2)
q1 = g.add_unit("q", "1", 2)
q2 = g.add_unit("q", "2", 3)
a2 = g.add_unit("a", "2", 3)
q3 = g.add_unit("q", "3", 4)
x2 = g.add_unit("x", "2", 5)

g.add_use_edge(a1, x1)
g.add_use_edge(q1, x1)
g.add_use_edge(q2, x1)
for src, dst in [(q1, q2), (q2, q3), (a1, a2), (x1, x2)]:
    g.add_update_edge(src, dst)

label = lambda uid: f"{g.unit(uid).name}@{g.unit(uid).release}"

print("a@1 uses:       ", sorted(label(u) for u in g.use_of(a1)))
print("x@1 is used by: ", sorted(label(u) for u in g.used_by(x1)))
print("releases of q:  ", [label(u) for u in g.update_chain("q")])

# the world as it stood at t=3: x@2 and q@3 do not exist yet
snap = g.timed_snapshot(3)
print("\nat t=3 the ecosystem had", len(snap.units), "releases")
print("x@2 present at t=3:", snap.find("x", "2") is not None)

# growth between two instants is additions only, never edits
a3 = g.add_unit("a", "3", 6)
g.add_use_edge(a3, x2)
g.add_update_edge(a2, a3)

delta = diff(g.timed_snapshot(5), g.timed_snapshot(6))
print("\nbetween t=5 and t=6:")
print("  new units:       ", sorted(f"{u.name}@{u.release}" for u in delta.added_units))
print("  new use edges:   ", len(delta.added_use_edges))
print("  new update edges:", len(delta.added_update_edges))
print("  pure growth (every new edge touches a new unit):", delta.strict_growth)

# transitive closure walks nested dependencies and survives cycles
print("\ntransitive dependencies of a@3:", sorted(label(u) for u in g.transitive_dependencies(a3)))
