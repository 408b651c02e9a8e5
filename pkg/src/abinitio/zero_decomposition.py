"""Structure theory of graphs whose total count is zero.

Inside a hereditarily nonnegative graph with total count zero, the nonempty
self-sufficient subsets are exactly the zero-count subsets.  They form a
set-union lattice generated by the per-vertex closures, which yields the
minimally closed blocks, the maximal connected zero sets, accretion levels,
hulls, and the uniformity bookkeeping for relatively-tight attachments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from . import limits
from .errors import ConstructionFailed, InvalidMap, OutsideK0
from .graph import Embedding, Graph, connected_subsets, enumerate_embeddings
from .predimension import closure, delta, delta_rel, is_in_k0, is_self_sufficient


def _require_zero_ambient(g: Graph):
    if not is_in_k0(g):
        raise OutsideK0("ambient is not hereditarily nonnegative")
    if delta(g, g.vertices) != 0:
        raise OutsideK0(f"ambient count is {delta(g, g.vertices)}, expected 0")


def is_zero_algebraic(g: Graph, b: Iterable[str], a: Iterable[str]) -> bool:
    """b is relatively tight over a: count zero over a, every proper nonempty
    part strictly positive.  b must be nonempty and disjoint from a."""
    bb = g.check_subset(b)
    aa = g.check_subset(a)
    if not bb:
        raise InvalidMap("the attached set must be nonempty")
    if aa & bb:
        raise InvalidMap(f"sets must be disjoint, shared: {sorted(aa & bb)}")
    if delta_rel(g, bb, aa) != 0:
        return False
    for size in range(1, len(bb)):
        for part in itertools.combinations(sorted(bb), size):
            if delta_rel(g, frozenset(part), aa) <= 0:
                return False
    return True


def is_zero_minimally_algebraic(g: Graph, b: Iterable[str], a: Iterable[str]) -> bool:
    """Tight over a but over no proper subset of a."""
    bb = g.check_subset(b)
    aa = g.check_subset(a)
    if not is_zero_algebraic(g, bb, aa):
        return False
    for size in range(len(aa)):
        for part in itertools.combinations(sorted(aa), size):
            if delta_rel(g, bb, frozenset(part)) == 0 and is_zero_algebraic(g, bb, frozenset(part)):
                return False
    return True


# -- blocks and carriers ---------------------------------------------------


def _vertex_closures(g: Graph, max_ambient: int | None) -> dict:
    return {
        v: closure(g, frozenset([v]), max_ambient=max_ambient).closure
        for v in g.sorted_vertices()
    }


def minimally_closed_sets(g: Graph, max_ambient: int | None = None) -> list:
    """The minimal nonempty self-sufficient subsets.  They are exactly the
    per-vertex closures that are closures of each of their own points."""
    _require_zero_ambient(g)
    blobs = _vertex_closures(g, max_ambient)
    out = []
    for v in g.sorted_vertices():
        c = blobs[v]
        if all(blobs[u] == c for u in c) and c not in out:
            out.append(c)
    # blocks never touch: shared points or cross edges would merge them
    for i, a in enumerate(out):
        for b in out[i + 1:]:
            assert not (a & b)
            assert not any(g.neighbors(v) & b for v in a)
    return sorted(out, key=lambda s: sorted(s))


def connected_zero_sets(g: Graph, max_ambient: int | None = None) -> list:
    """Maximal zero-count subsets not splittable into two self-sufficient
    halves: the unions of overlap components of the per-vertex closures."""
    _require_zero_ambient(g)
    blobs = _vertex_closures(g, max_ambient)
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for v, blob in blobs.items():
        for u in blob:
            union(v, u)
    groups: dict = {}
    for v in g.vertices:
        groups.setdefault(find(v), set()).add(v)
    carriers = sorted((frozenset(s) for s in groups.values()), key=lambda s: sorted(s))
    for i, a in enumerate(carriers):
        for b in carriers[i + 1:]:
            assert not any(g.neighbors(v) & b for v in a)
    return carriers


def _tight_sets_over(g: Graph, pool: frozenset, base: frozenset, cap: int):
    """Connected candidates inside pool that are relatively tight over base,
    plus a flag telling whether the size ceiling was reached while scanning."""
    hit = False
    found = []
    for cand in connected_subsets(g, pool, cap):
        if len(cand) == cap:
            hit = True
        if delta_rel(g, cand, base) == 0 and is_zero_algebraic(g, cand, base):
            found.append(cand)
    return found, hit


@dataclass(frozen=True)
class ComponentLevels:
    carrier: frozenset
    level: int
    layers: tuple  # strictly increasing, layers[0] = union of blocks, layers[-1] = carrier
    ceiling_hit: bool

    def to_json_dict(self) -> dict:
        return {
            "carrier": sorted(self.carrier),
            "level": self.level,
            "layers": [sorted(s) for s in self.layers],
            "ceiling_hit": self.ceiling_hit,
        }


@dataclass(frozen=True)
class ZeroDecomposition:
    ambient: Graph
    minimally_closed: tuple
    components: tuple

    def to_json_dict(self) -> dict:
        return {
            "minimally_closed": [sorted(s) for s in self.minimally_closed],
            "components": [c.to_json_dict() for c in self.components],
        }


def level_chain(
    g: Graph,
    carrier: Iterable[str],
    blocks: list | None = None,
    carriers: list | None = None,
    max_set: int | None = None,
    max_ambient: int | None = None,
) -> ComponentLevels:
    """Accretion layers of one carrier: layer 0 is the union of its blocks,
    each next layer absorbs everything relatively tight over the previous."""
    car = g.check_subset(carrier)
    if carriers is None:
        carriers = connected_zero_sets(g, max_ambient=max_ambient)
    if car not in carriers:
        raise InvalidMap(f"{sorted(car)} is not a maximal connected zero set")
    cap = limits.max_set_size(max_set)
    if blocks is None:
        blocks = minimally_closed_sets(g, max_ambient=max_ambient)
    seed = frozenset().union(*(b for b in blocks if b <= car)) if blocks else frozenset()
    if not (seed and seed <= car):
        raise InvalidMap(f"carrier {sorted(car)} contains no block")
    layers = [seed]
    ceiling_hit = False
    current = seed
    while current != car:
        found, hit = _tight_sets_over(g, car - current, current, cap)
        ceiling_hit = ceiling_hit or hit
        if not found:
            raise ConstructionFailed(
                f"carrier not reachable with attachment size ceiling {cap}")
        current = current | frozenset().union(*found)
        layers.append(current)
    return ComponentLevels(car, len(layers) - 1, tuple(layers), ceiling_hit)


def decompose(
    g: Graph, max_set: int | None = None, max_ambient: int | None = None
) -> ZeroDecomposition:
    blocks = minimally_closed_sets(g, max_ambient=max_ambient)
    carriers = connected_zero_sets(g, max_ambient=max_ambient)
    for b in blocks:
        assert sum(1 for c in carriers if b <= c) == 1
    components = tuple(
        level_chain(g, c, blocks=blocks, carriers=carriers,
                    max_set=max_set, max_ambient=max_ambient)
        for c in carriers
    )
    return ZeroDecomposition(g, tuple(blocks), components)


# -- hull ------------------------------------------------------------------


def _absorbable_over(g: Graph, d: frozenset, anchor_pool: frozenset) -> bool:
    """Whether d is tight over some subset of anchor_pool."""
    need = g.m * len(d) - g.edges_within(d)
    contacts = sorted(frozenset().union(*(g.neighbors(v) for v in d)) & anchor_pool)
    if need == 0:
        return is_zero_algebraic(g, d, frozenset())
    for size in range(1, min(need, len(contacts)) + 1):
        for xs in itertools.combinations(contacts, size):
            if is_zero_algebraic(g, d, frozenset(xs)):
                return True
    return False


def hull(
    g: Graph, e: Iterable[str], iterate: bool = False, max_set: int | None = None
) -> frozenset:
    """e together with everything relatively tight over a subset of e;
    with iterate, repeat until nothing more is absorbed."""
    current = g.check_subset(e)
    cap = limits.max_set_size(max_set)
    while True:
        absorbed = set()
        for cand in connected_subsets(g, g.vertices - current, cap):
            if _absorbable_over(g, cand, current):
                absorbed |= cand
        if not absorbed:
            return current
        current = current | absorbed
        if not iterate:
            return current


# -- attachment types and counting ----------------------------------------


def find_pattern_iso(
    g_src: Graph,
    d_src: frozenset,
    anchor_pairs: list,
    g_dst: Graph,
    d_dst: frozenset,
    forced: dict | None = None,
) -> dict | None:
    """A bijection d_src -> d_dst matching internal edges and, through the
    given anchor correspondence, all cross edges.  Pairs in forced are fixed
    in advance.  None when no such bijection exists."""
    if len(d_src) != len(d_dst):
        return None
    assignment: dict = {}

    def ok(p, t):
        for a_src, a_dst in anchor_pairs:
            if g_src.has_edge(p, a_src) != g_dst.has_edge(t, a_dst):
                return False
        for q, u in assignment.items():
            if g_src.has_edge(p, q) != g_dst.has_edge(t, u):
                return False
        return True

    for p, t in sorted((forced or {}).items()):
        if p not in d_src or t not in d_dst or t in assignment.values() or not ok(p, t):
            return None
        assignment[p] = t
    src = [v for v in sorted(d_src) if v not in assignment]
    dst = sorted(d_dst)

    def extend(i):
        if i == len(src):
            return True
        for t in dst:
            if t not in assignment.values() and ok(src[i], t):
                assignment[src[i]] = t
                if extend(i + 1):
                    return True
                del assignment[src[i]]
        return False

    return dict(assignment) if extend(0) else None


def mu_count(
    c: Graph,
    a_image: Iterable[str],
    b_image: Iterable[str],
    alpha: Embedding,
    max_target: int | None = None,
) -> int:
    """How many self-sufficient copies of the combined pattern on a+b extend
    the given self-sufficient placement of the base pattern on a."""
    aa = c.check_subset(a_image)
    bb = c.check_subset(b_image)
    if aa & bb:
        raise InvalidMap(f"base and attachment overlap: {sorted(aa & bb)}")
    base_pattern = c.induced(aa)
    if alpha.source != base_pattern or alpha.target != c:
        raise InvalidMap("alpha must map the base pattern into the ambient")
    if not alpha.is_induced():
        raise InvalidMap("alpha is not induced")
    if not is_self_sufficient(c, alpha.image):
        raise InvalidMap("alpha is not strong: image is not self-sufficient")
    return count_strong_extensions(c, aa, bb, alpha.as_dict(), max_target=max_target)


def count_strong_extensions(
    c: Graph,
    base: frozenset,
    attach: frozenset,
    fixed: dict,
    max_target: int | None = None,
) -> int:
    pattern = c.induced(base | attach)
    embs = enumerate_embeddings(
        pattern,
        c,
        strong_only=True,
        is_strong=is_self_sufficient,
        fixed=fixed,
        max_target=max_target,
    )
    return len(embs)


# -- uniformity report ------------------------------------------------------


@dataclass(frozen=True)
class BaseWitness:
    base: frozenset
    generator: frozenset
    zero_minimal_set: frozenset
    level_index: int

    def to_json_dict(self) -> dict:
        return {
            "base": sorted(self.base),
            "generator": sorted(self.generator),
            "zero_minimal_set": sorted(self.zero_minimal_set),
            "level_index": self.level_index,
            "closure_scope": "ambient",
        }


def base_attachment_pairs(
    g: Graph,
    carrier: frozenset,
    base_layer: frozenset,
    level_index: int,
    max_set: int | None = None,
    max_ambient: int | None = None,
) -> list:
    """All (witness) triples for one carrier: a generator inside the given
    layer, its ambient closure as base, and a set minimally tight over the
    generator, disjoint from the base and living above the layer."""
    cap = limits.max_set_size(max_set)
    out = []
    for d in connected_subsets(g, carrier - base_layer, cap):
        # a generator vertex can carry several cross edges, so its size
        # ranges anywhere up to the cross-edge deficit
        need = g.m * len(d) - g.edges_within(d)
        contacts = sorted(
            (frozenset().union(*(g.neighbors(v) for v in d)) & base_layer) - d)
        for size in range(min(need, len(contacts)) + 1):
            for xs in itertools.combinations(contacts, size):
                gen = frozenset(xs)
                if not is_zero_minimally_algebraic(g, d, gen):
                    continue
                base = closure(g, gen, max_ambient=max_ambient).closure
                if not base <= base_layer:
                    continue
                if d & base:
                    continue
                out.append(BaseWitness(base, gen, d, level_index))
    return sorted(
        out, key=lambda w: (sorted(w.base), sorted(w.zero_minimal_set), sorted(w.generator)))


def _dedupe_witnesses(g: Graph, witnesses: list) -> list:
    """One witness per (base, attachment type over the base)."""
    kept: list = []
    for w in witnesses:
        duplicate = False
        for k in kept:
            if k.base != w.base:
                continue
            anchor_pairs = [(v, v) for v in sorted(w.base)]
            if find_pattern_iso(g, w.zero_minimal_set, anchor_pairs, g, k.zero_minimal_set):
                duplicate = True
                break
        if not duplicate:
            kept.append(w)
    return kept


def uniform_algebraicity_report(
    g: Graph,
    i: int,
    max_set: int | None = None,
    max_ambient: int | None = None,
    max_target: int | None = None,
) -> list:
    """Per (base, attachment type): the extension count over every strong
    placement of the base pattern, and whether all counts agree."""
    if i < 1:
        raise InvalidMap(f"level index must be >= 1, got {i}")
    _require_zero_ambient(g)
    blocks = minimally_closed_sets(g, max_ambient=max_ambient)
    carriers = connected_zero_sets(g, max_ambient=max_ambient)
    rows = []
    for carrier in carriers:
        comp = level_chain(
            g, carrier, blocks=blocks, carriers=carriers,
            max_set=max_set, max_ambient=max_ambient)
        if comp.level < i:
            continue
        witnesses = base_attachment_pairs(
            g, carrier, comp.layers[i - 1], i, max_set=max_set, max_ambient=max_ambient)
        for w in _dedupe_witnesses(g, witnesses):
            base_pattern = g.induced(w.base)
            alphas = enumerate_embeddings(
                base_pattern, g, strong_only=True, is_strong=is_self_sufficient,
                max_target=max_target)
            counts = [
                count_strong_extensions(
                    g, w.base, w.zero_minimal_set, a.as_dict(), max_target=max_target)
                for a in alphas
            ]
            rows.append((w, counts, len(set(counts)) <= 1))
    return rows
