"""Finite approximations of the generic structure for a sparsity class.

Grow a seed by realizing self-sufficient pattern extensions over every
placement found so far, extend partial isomorphisms to automorphisms by a
back-and-forth that only enlarges the ambient when no internal image exists,
and adjoin fresh points of prescribed relative count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import limits
from .amalgam import AmalgamSpec, free_amalgam
from .errors import ConstructionFailed, InvalidMap, OutsideK0, SizeCeilingExceeded
from .graph import Embedding, Graph, PartialIso, fresh_name
from .graph import enumerate_embeddings
from .predimension import closure, delta_rel, is_in_k0, is_self_sufficient

_UNBOUNDED = 10**9


def _first_induced_map(
    pattern: Graph,
    target: Graph,
    fixed: dict | None = None,
    require_strong: bool = False,
) -> dict | None:
    """First (canonical) induced embedding of pattern into target extending
    the fixed pairs, or None.  Early-exit backtracking."""
    fixed = dict(fixed or {})
    order = [v for v in pattern.sorted_vertices() if v not in fixed]
    assignment = dict(fixed)

    def fits(p, t):
        if t in assignment.values():
            return False
        for q, u in assignment.items():
            if pattern.has_edge(p, q) != target.has_edge(t, u):
                return False
        return True

    for p, t in fixed.items():
        if p not in pattern.vertices or t not in target.vertices:
            return None

    def walk(i):
        if i == len(order):
            if require_strong and not is_self_sufficient(
                    target, frozenset(assignment.values())):
                return False
            return True
        p = order[i]
        for t in target.sorted_vertices():
            if pattern.degree(p) <= target.degree(t) and fits(p, t):
                assignment[p] = t
                if walk(i + 1):
                    return True
                del assignment[p]
        return False

    for u, v in itertools.combinations(sorted(fixed), 2):
        if pattern.has_edge(u, v) != target.has_edge(fixed[u], fixed[v]):
            return None
    return dict(assignment) if walk(0) else None


# -- realizing pattern extensions --------------------------------------------


def realize_extension(
    current: Graph, pattern_base: Graph, pattern_ext: Graph, at: Embedding
) -> Graph:
    """Free amalgam of the current stage with the extension pattern over the
    placed base.  The current stage keeps its names and stays self-sufficient
    in the result."""
    if pattern_base.m != pattern_ext.m:
        raise InvalidMap("base and extension pattern coefficients differ")
    if not pattern_base.vertices <= pattern_ext.vertices:
        raise InvalidMap("the base pattern must be a subgraph of the extension pattern")
    if pattern_ext.induced(pattern_base.vertices) != pattern_base:
        raise InvalidMap("the base pattern must be induced in the extension pattern")
    spec = AmalgamSpec(
        left=current,
        right=pattern_ext,
        base_in_left=at,
        base_in_right=Embedding.build(
            pattern_base, pattern_ext, {v: v for v in pattern_base.vertices}),
    )
    result = free_amalgam(spec).graph
    assert is_self_sufficient(result, current.vertices)
    return result


@dataclass(frozen=True)
class ApproximationChain:
    stages: tuple
    task_log: tuple
    truncated: bool

    def to_json_dict(self) -> dict:
        return {
            "stages": [g.to_json_dict() for g in self.stages],
            "task_log": list(self.task_log),
            "truncated": self.truncated,
        }


def _isomorphic(g: Graph, h: Graph) -> bool:
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return False
    return _first_induced_map(g, h) is not None


def pattern_catalog(m: int, size_budget: int) -> list:
    """All member graphs of the class up to the size budget, one per
    isomorphism type, on canonical vertex names, smallest edge sets first."""
    out = []
    for n in range(size_budget + 1):
        names = [f"p{i + 1}" for i in range(n)]
        slots = list(itertools.combinations(sorted(names), 2))
        found = []
        for bits in range(2 ** len(slots)):
            edges = [slots[i] for i in range(len(slots)) if bits >> i & 1]
            g = Graph(m, names, edges)
            if not is_in_k0(g):
                continue
            if any(_isomorphic(g, h) for h in found):
                continue
            found.append(g)
        out.extend(found)
    return out


def _base_choices(ext: Graph) -> list:
    """Self-sufficient subsets of the extension pattern, one per orbit of its
    automorphism group."""
    autos = [e.as_dict() for e in enumerate_embeddings(ext, ext, max_target=_UNBOUNDED)]
    chosen = []
    emitted = set()
    for size in range(len(ext.vertices) + 1):
        for combo in itertools.combinations(ext.sorted_vertices(), size):
            s = frozenset(combo)
            if s in emitted:
                continue
            if not is_self_sufficient(ext, s):
                continue
            for a in autos:
                emitted.add(frozenset(a[v] for v in s))
            chosen.append(s)
    return chosen


def build_approximation(
    seed: Graph,
    rounds: int,
    size_budget: int,
    max_ambient: int | None = None,
) -> ApproximationChain:
    """Round-robin realization of every (base <= extension) pattern pair over
    every strong placement of the base present when the round starts."""
    if not is_in_k0(seed):
        raise OutsideK0("seed is not hereditarily nonnegative")
    ceiling = limits.max_ambient(max_ambient)
    pairs = []
    for ext in pattern_catalog(seed.m, size_budget):
        for base_set in _base_choices(ext):
            pairs.append((ext, base_set))

    stages = [seed]
    task_log = []
    current = seed
    truncated = False
    for rnd in range(rounds):
        snapshot = current
        queue = []
        for ext, base_set in pairs:
            base_pattern = ext.induced(base_set)
            placements = enumerate_embeddings(
                base_pattern, snapshot, strong_only=True,
                is_strong=is_self_sufficient, max_target=_UNBOUNDED)
            for at in placements:
                queue.append((ext, base_set, at.as_dict()))
        for ext, base_set, at_map in queue:
            base_pattern = ext.induced(base_set)
            if _first_induced_map(ext, current, fixed=at_map, require_strong=True):
                continue
            if len(current.vertices) + len(ext.vertices) - len(base_set) > ceiling:
                truncated = True
                break
            at = Embedding.build(base_pattern, current, at_map)
            current = realize_extension(current, base_pattern, ext, at)
            task_log.append({
                "round": rnd,
                "extension": ext.to_json_dict(),
                "base": sorted(base_set),
                "at": sorted(at_map.items()),
            })
        stages.append(current)
        if truncated:
            break
    return ApproximationChain(tuple(stages), tuple(task_log), truncated)


# -- back-and-forth automorphism extension ------------------------------------


def _grow_copy(ambient: Graph, new_part: frozenset, boundary_map: dict) -> tuple:
    """Adjoin a relabeled copy of new_part whose cross edges land on the
    boundary-map images; returns (graph, relabeling)."""
    taken = set(ambient.vertices)
    relabel = {}
    for v in sorted(new_part):
        nv = fresh_name(v, taken)
        relabel[v] = nv
        taken.add(nv)
    edges = list(ambient.sorted_edges())
    for (u, w) in ambient.sorted_edges():
        if u in new_part and w in new_part:
            edges.append((relabel[u], relabel[w]))
        elif u in new_part and w in boundary_map:
            edges.append((relabel[u], boundary_map[w]))
        elif w in new_part and u in boundary_map:
            edges.append((relabel[w], boundary_map[u]))
    grown = Graph(ambient.m, taken, edges)
    assert is_in_k0(grown)
    assert is_self_sufficient(grown, ambient.vertices)
    return grown, relabel


def _extend_one_side(ambient: Graph, phi: dict, v: str) -> tuple:
    """One forth step: bring v into the domain of phi, growing the ambient by
    a fresh copy of the closure increment when no internal image fits."""
    n = closure(ambient, frozenset(phi) | {v}, max_ambient=_UNBOUNDED).closure
    pattern = ambient.induced(n)
    hit = _first_induced_map(pattern, ambient, fixed=dict(phi), require_strong=True)
    if hit is not None:
        return ambient, hit
    new_part = n - frozenset(phi)
    grown, relabel = _grow_copy(ambient, new_part, dict(phi))
    out = dict(phi)
    out.update({w: relabel[w] for w in new_part})
    return grown, out


def extend_partial_iso(ambient: Graph, g: PartialIso, steps: int = 32) -> tuple:
    """Total automorphism extending g, growing the ambient only when forced.
    Alternates pulling the least unmatched vertex into the domain and into
    the range."""
    if g.ambient != ambient:
        raise InvalidMap("map does not live in the given ambient")
    if not is_self_sufficient(ambient, g.domain):
        raise InvalidMap("domain is not self-sufficient")
    if not is_self_sufficient(ambient, g.range):
        raise InvalidMap("range is not self-sufficient")
    phi = g.as_dict()
    current = ambient
    for _ in range(steps):
        total = _first_induced_map(current, current, fixed=phi, require_strong=False)
        if total is not None and set(total.values()) == set(current.vertices):
            gamma = Embedding.build(current, current, total)
            assert gamma.is_induced()
            return current, gamma
        missing_dom = sorted(set(current.vertices) - set(phi))
        if missing_dom:
            current, phi = _extend_one_side(current, phi, missing_dom[0])
        missing_rng = sorted(set(current.vertices) - set(phi.values()))
        if missing_rng:
            inverse = {r: d for d, r in phi.items()}
            current, inverse = _extend_one_side(current, inverse, missing_rng[0])
            phi = {r: d for d, r in inverse.items()}
        if not missing_dom and not missing_rng:
            break
    total = _first_induced_map(current, current, fixed=phi, require_strong=False)
    if total is not None and set(total.values()) == set(current.vertices):
        gamma = Embedding.build(current, current, total)
        assert gamma.is_induced()
        return current, gamma
    raise ConstructionFailed(f"no total extension within {steps} rounds")


def add_generic_point(ambient: Graph, over, relative_delta: int) -> Graph:
    """One fresh vertex with m - relative_delta edges into the canonically
    least members of a self-sufficient set."""
    target = ambient.check_subset(over)
    if not is_self_sufficient(ambient, target):
        raise InvalidMap("the attachment set must be self-sufficient")
    if not 0 <= relative_delta <= ambient.m:
        raise InvalidMap(
            f"relative count must lie in 0..{ambient.m}, got {relative_delta}")
    k = ambient.m - relative_delta
    if len(target) < k:
        raise InvalidMap(f"need {k} attachment targets, set has {len(target)}")
    fresh = fresh_name("x", set(ambient.vertices))
    edges = list(ambient.sorted_edges()) + [(fresh, t) for t in sorted(target)[:k]]
    out = Graph(ambient.m, set(ambient.vertices) | {fresh}, edges)
    assert delta_rel(out, frozenset([fresh]), target) == relative_delta
    if relative_delta >= 1:
        assert is_self_sufficient(out, ambient.vertices)
    return out
