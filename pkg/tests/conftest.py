import random

import pytest

from pkgverse.graph import UniverseGraph
from pkgverse.ingest import Manifest
from pkgverse.resolve import ManifestRegistry
from pkgverse.semver import VersionRange


def random_universe(rng: random.Random, n_units: int, p_edge: float = 0.06) -> UniverseGraph:
    """A random valid graph: a few package names, releases in time order,
    use-edges wired between arbitrary units, chains along each name."""
    g = UniverseGraph()
    n_names = max(1, n_units // 3)
    uids = []
    for i in range(n_units):
        name = f"p{rng.randrange(n_names)}"
        release = str(len(g.units_of_name(name)) + 1)
        uids.append(g.add_unit(name, release, i + rng.randrange(3)))
    for name in sorted(g.names()):
        chain = sorted(g.units_of_name(name), key=lambda u: (g.unit(u).time, u))
        previous = None
        for uid in chain:
            if previous is not None and g.unit(previous).time < g.unit(uid).time:
                g.add_update_edge(previous, uid)
            previous = uid
    seen = set()
    for _ in range(int(p_edge * n_units * n_units)):
        a, b = rng.choice(uids), rng.choice(uids)
        if a != b and (a, b) not in seen:
            seen.add((a, b))
            g.add_use_edge(a, b)
    return g


def random_manifest_universe(rng: random.Random, max_names: int = 16):
    """A resolvable random dependency universe.

    Returns (root manifest, registry). Dependency ranges are built around
    versions that actually exist, so resolution always succeeds; edges run
    in any direction, so cycles occur.
    """
    n_names = rng.randint(1, max_names)
    versions: dict[str, list[str]] = {
        f"lib{i}": [f"{v + 1}.0.0" for v in range(rng.randint(1, 3))]
        for i in range(n_names)
    }

    def range_for(dep_name: str) -> VersionRange:
        target = rng.choice(versions[dep_name])
        text = rng.choice((target, f"^{target}", "*", f"<={target}"))
        return VersionRange.parse(text)

    registry = ManifestRegistry()
    names = sorted(versions)
    for name in names:
        for release in versions[name]:
            pool = [n for n in names if n != name]
            rng.shuffle(pool)
            deps = tuple((dep, range_for(dep)) for dep in pool[: rng.randint(0, 3)])
            registry.add(Manifest(name, release, deps))

    pool = list(names)
    rng.shuffle(pool)
    root_deps = tuple((dep, range_for(dep)) for dep in pool[: rng.randint(1, min(4, len(pool)))])
    root = Manifest("root", "1.0.0", root_deps)
    return root, registry


@pytest.fixture
def rng():
    return random.Random(20240811)
