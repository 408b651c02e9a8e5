"""Extending partial isomorphisms of a zero-count ambient to automorphisms.

Given a hereditarily nonnegative ambient with total count zero and a family
of isomorphisms between self-sufficient subsets, grow the ambient in stages:
a base stage closes each map into a permutation of the minimally closed
blocks (adjoining relabeled block copies to complete open chains into
cycles), then one stage per accretion level adjoins fresh attachment copies
until every strong placement of every base sees the same number of
extensions, after which each map extends along matching attachment
components.  The output is a certificate that an independent checker can
replay.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ConstructionFailed, InvalidMap, OutsideK0
from .graph import Embedding, Graph, PartialIso, components, fresh_name
from .graph import enumerate_embeddings
from .predimension import delta, delta_rel, is_in_k0, is_self_sufficient, strong_embeddings
from .zero_decomposition import (
    ZeroDecomposition,
    count_strong_extensions,
    decompose,
    find_pattern_iso,
    uniform_algebraicity_report,
)

_UNBOUNDED = 10**9
_MAX_SWEEP_PASSES = 32
_MAX_COPIES_PER_ROW = 4096


@dataclass(frozen=True)
class EPProblem:
    a: Graph
    maps: tuple

    def __post_init__(self):
        for pi in self.maps:
            if not isinstance(pi, PartialIso) or pi.ambient != self.a:
                raise InvalidMap("every map must be a partial isomorphism of the ambient")

    def to_json_dict(self) -> dict:
        return {
            "graph": self.a.to_json_dict(),
            "maps": [
                {"map": [[d, pi.as_dict()[d]] for d in sorted(pi.domain)]}
                for pi in self.maps
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict, m_override: int | None = None) -> "EPProblem":
        if not isinstance(data, dict) or "graph" not in data or "maps" not in data:
            raise ValueError("problem JSON must have 'graph' and 'maps' keys")
        g = Graph.from_json_dict(data["graph"], m_override=m_override)
        maps = []
        for entry in data["maps"]:
            if not isinstance(entry, dict) or "map" not in entry:
                raise ValueError("each map entry must be an object with a 'map' key")
            pairs = {}
            for pair in entry["map"]:
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise ValueError(f"map pairs must be 2-element lists, got {pair!r}")
                d, r = pair
                if d in pairs:
                    raise ValueError(f"duplicate map source {d!r}")
                pairs[d] = r
            maps.append(PartialIso.build(g, pairs))
        return cls(g, tuple(maps))


@dataclass(frozen=True)
class OrbitOrder:
    per_point: tuple  # one {vertex: order} dict per map
    per_map: tuple
    global_order: int

    def to_json_dict(self) -> dict:
        return {
            "per_point": [dict(sorted(d.items())) for d in self.per_point],
            "per_map": list(self.per_map),
            "global": self.global_order,
        }


def validate_problem(p: EPProblem):
    if not is_in_k0(p.a):
        raise OutsideK0("problem ambient is not hereditarily nonnegative")
    if delta(p.a, p.a.vertices) != 0:
        raise OutsideK0(f"problem ambient has count {delta(p.a, p.a.vertices)}, expected 0")
    for k, pi in enumerate(p.maps):
        if not is_self_sufficient(p.a, pi.domain):
            raise InvalidMap(f"map {k}: domain is not self-sufficient")
        if not is_self_sufficient(p.a, pi.range):
            raise InvalidMap(f"map {k}: range is not self-sufficient")


def orbit_orders(p: EPProblem) -> OrbitOrder:
    """Per vertex: the least iterate of its map returning it to itself, or 1
    when the trajectory leaves the domain first.  Per map the maximum, and
    globally the product."""
    per_point = []
    per_map = []
    for pi in p.maps:
        e = pi.as_dict()
        orders = {}
        for d in sorted(pi.domain):
            x = e[d]
            steps = 1
            while x in e and x != d and steps <= len(e):
                x = e[x]
                steps += 1
            orders[d] = steps if x == d else 1
        per_point.append(orders)
        per_map.append(max(orders.values(), default=1))
    global_order = 1
    for o in per_map:
        global_order *= o
    return OrbitOrder(tuple(per_point), tuple(per_map), global_order)


def _layer_index(decomp: ZeroDecomposition) -> dict:
    idx = {}
    for comp in decomp.components:
        for v in comp.carrier:
            idx[v] = min(i for i, layer in enumerate(comp.layers) if v in layer)
    return idx


def _validate_levels(p: EPProblem, decomp: ZeroDecomposition):
    idx = _layer_index(decomp)
    for k, pi in enumerate(p.maps):
        for d, r in pi.as_dict().items():
            if idx[d] != idx[r]:
                raise InvalidMap(
                    f"map {k}: {d} sits at accretion level {idx[d]} but its image "
                    f"{r} at level {idx[r]}; stagewise extension needs equal levels")


def _check_automorphism(g: Graph, f: dict) -> bool:
    if set(f) != set(g.vertices) or set(f.values()) != set(g.vertices):
        return False
    return all(g.has_edge(f[u], f[v]) == g.has_edge(u, v)
               for u, v in itertools.combinations(sorted(g.vertices), 2))


# -- base stage --------------------------------------------------------------


def _partial_permutation_parts(blocks: list, e: dict) -> tuple:
    """Split the block-level action of e into pure cycles, open chains, and
    untouched blocks.  Blocks must be inside or disjoint from the domain."""
    dom = set(e)
    rng = set(e.values())
    image = {}
    for bl in blocks:
        inside = bl & dom
        assert inside in (frozenset(), bl), "a block straddles the domain"
        if inside:
            image[bl] = frozenset(e[v] for v in bl)
    by_set = {bl: bl for bl in blocks}
    for bl, im in image.items():
        assert by_set.get(im) == im, "a block maps onto a non-block"
    has_incoming = set(image.values())
    chains = []
    cycles = []
    fixed = []
    seen = set()
    for bl in blocks:
        if bl in seen:
            continue
        if bl not in image and bl not in has_incoming:
            fixed.append(bl)
            seen.add(bl)
            continue
        if bl in has_incoming:
            continue  # chain interior or end; reached from its start
        chain = [bl]
        seen.add(bl)
        cur = bl
        while cur in image:
            cur = image[cur]
            chain.append(cur)
            seen.add(cur)
        chains.append(chain)
    for bl in blocks:
        if bl in seen:
            continue
        cycle = [bl]
        seen.add(bl)
        cur = image[bl]
        while cur != bl:
            cycle.append(cur)
            seen.add(cur)
            cur = image[cur]
        cycles.append(cycle)
    return cycles, chains, fixed


def build_base_stage(
    p: EPProblem, orders: OrbitOrder, decomp: ZeroDecomposition | None = None
) -> tuple:
    """Stage zero: the union of the ambient's blocks plus, per map and per
    open block chain of length s, (order-1)*s relabeled block copies closing
    the chain into a cycle of length order*s on which the full lap is the
    pointwise identity.  Returns (graph, one total vertex map per input map,
    log entry)."""
    a = p.a
    if decomp is None:
        decomp = decompose(a, max_ambient=_UNBOUNDED)
    blocks = list(decomp.minimally_closed)
    core = frozenset().union(*blocks) if blocks else frozenset()
    verts = set(core)
    edges = [eg for eg in a.sorted_edges() if eg[0] in core and eg[1] in core]

    mu = []
    for bl in blocks:
        pattern = a.induced(bl)
        mu.append({
            "block": sorted(bl),
            "count": len(strong_embeddings(pattern, a, max_target=_UNBOUNDED)),
        })

    plans = []  # (map_index, kind, original blocks, chain vertex maps)
    for k, pi in enumerate(p.maps):
        e = pi.as_dict()
        cycles, chains, fixed = _partial_permutation_parts(blocks, e)
        for cyc in cycles:
            plans.append((k, "cycle", cyc))
        for ch in chains:
            plans.append((k, "chain", ch))
        for bl in fixed:
            plans.append((k, "fixed", [bl]))

    fmaps = [dict() for _ in p.maps]
    log_closures = []
    for k, kind, chain in sorted(
            plans, key=lambda t: (t[0], sorted(map(sorted, t[2])))):
        e = p.maps[k].as_dict()
        order = orders.per_map[k]
        entry = {
            "map_index": k,
            "kind": kind,
            "blocks": [sorted(bl) for bl in chain],
            "copies": [],
            "order": order,
        }
        if kind == "fixed":
            for v in chain[0]:
                fmaps[k][v] = v
            entry["cycle_length"] = 1
        elif kind == "cycle":
            for bl in chain:
                for v in bl:
                    fmaps[k][v] = e[v]
            entry["cycle_length"] = len(chain)
        else:
            s = len(chain)
            start = chain[0]
            # walk the composite along the chain to relate start and end
            composite = {v: v for v in start}
            for _ in range(s - 1):
                composite = {v: e[composite[v]] for v in start}
            betas = []
            for _ in range((order - 1) * s):
                beta = {}
                for v in sorted(start):
                    nv = fresh_name(v, verts)
                    beta[v] = nv
                    verts.add(nv)
                for (u, w) in a.sorted_edges():
                    if u in start and w in start:
                        edges.append((beta[u], beta[w]))
                betas.append(beta)
                entry["copies"].append(sorted(beta.values()))
            for bl in chain[:-1]:
                for v in bl:
                    fmaps[k][v] = e[v]
            inv = {composite[v]: v for v in start}
            last = {v: inv[v] for v in chain[-1]}
            if betas:
                for v in chain[-1]:
                    fmaps[k][v] = betas[0][last[v]]
                for j in range(len(betas) - 1):
                    for u in start:
                        fmaps[k][betas[j][u]] = betas[j + 1][u]
                for u in start:
                    fmaps[k][betas[-1][u]] = u
            else:
                fmaps[k].update(last)
            entry["cycle_length"] = order * s
        log_closures.append(entry)

    b0 = Graph(a.m, verts, edges)
    # copies belonging to one map are untouched blocks for every other map
    for k in range(len(p.maps)):
        for v in sorted(b0.vertices):
            fmaps[k].setdefault(v, v)
        assert _check_automorphism(b0, fmaps[k])
        for v in sorted(p.maps[k].domain & core):
            assert fmaps[k][v] == p.maps[k].as_dict()[v]
    assert delta(b0, b0.vertices) == 0
    assert is_in_k0(b0)
    if core:
        assert is_self_sufficient(b0, core)
    log = {"stage": 0, "kind": "base", "blocks": [sorted(bl) for bl in blocks],
           "mu": mu, "closures": log_closures, "graph": b0.to_json_dict()}
    return b0, fmaps, log


# -- level stages -------------------------------------------------------------


def _attach_copy(b: Graph, base: frozenset, gen: frozenset, attachment: frozenset,
                 alpha: Embedding) -> tuple:
    """One fresh copy of the attachment, wired to the alpha-image of the
    generator with the original cross pattern."""
    taken = set(b.vertices)
    relabel = {}
    for d in sorted(attachment):
        nv = fresh_name(d, taken)
        relabel[d] = nv
        taken.add(nv)
    edges = list(b.sorted_edges())
    for (u, w) in b.sorted_edges():
        if u in attachment and w in attachment:
            edges.append((relabel[u], relabel[w]))
    for d in sorted(attachment):
        for x in sorted(b.neighbors(d) & gen):
            edges.append((relabel[d], alpha(x)))
    return Graph(b.m, taken, edges), sorted(relabel.values())


def _pattern_multiplicity(b: Graph, base: frozenset, gen: frozenset,
                          attachment: frozenset) -> int:
    """Self-matchings of the attachment fixing the generator pointwise; the
    amount one fresh copy adds to a placement's extension count."""
    pattern = b.induced(gen | attachment)
    autos = enumerate_embeddings(
        pattern, pattern, fixed={x: x for x in gen}, max_target=_UNBOUNDED)
    return len(autos)


def _uniformize_row(b: Graph, witness, added_log: list) -> tuple:
    """Add copies until every strong placement of the base sees the same
    count.  A copy's cross edges land exactly on one generator image, so
    placements with distinct generator image sets never share supply and can
    be topped up in one batch between recounts."""
    base, gen, att = witness.base, witness.generator, witness.zero_minimal_set
    t = _pattern_multiplicity(b, base, gen, att)
    assert t >= 1
    added = 0
    for _ in range(_MAX_SWEEP_PASSES):
        base_pattern = b.induced(base)
        alphas = enumerate_embeddings(
            base_pattern, b, strong_only=True, is_strong=is_self_sufficient,
            max_target=_UNBOUNDED)
        counts = [
            count_strong_extensions(b, base, att, al.as_dict(), max_target=_UNBOUNDED)
            for al in alphas
        ]
        nu = max(counts)
        if min(counts) == nu:
            return b, nu
        by_image = {}
        for al, cnt in zip(alphas, counts):
            key = frozenset(al(x) for x in gen)
            by_image.setdefault(key, []).append((al, cnt))
        for key in sorted(by_image, key=sorted):
            members = by_image[key]
            seen = {cnt for _, cnt in members}
            if seen == {nu}:
                continue
            al, cnt = min(members, key=lambda mc: mc[1])
            assert (nu - cnt) % t == 0, "copy contributions must divide the deficit"
            # twisted placements over the same image set can disagree; then
            # only one copy goes in before the next recount
            copies = (nu - cnt) // t if len(seen) == 1 else 1
            for _ in range(copies):
                if added >= _MAX_COPIES_PER_ROW:
                    raise ConstructionFailed(
                        "copy budget exhausted while evening out counts",
                        stage_log=added_log)
                b, fresh = _attach_copy(b, base, gen, att, al)
                added += 1
                added_log.append({
                    "base": sorted(base),
                    "generator": sorted(gen),
                    "attachment": sorted(att),
                    "alpha": [[v, al(v)] for v in sorted(base)],
                    "fresh": fresh,
                })
    raise ConstructionFailed("pass budget exhausted while evening out counts",
                             stage_log=added_log)


def _extend_map_over_satellites(
    b: Graph, prev_verts: frozenset, e: dict, fq: dict, log_cycles: list,
    map_index: int, stage_log,
) -> dict:
    """Extend one total map of the previous stage across the attachment
    components of the new one.  Components meeting the input map's domain are
    forced; the rest pair up greedily with unused isomorphic components."""
    sats = components(b, b.vertices - prev_verts)
    anchors = {
        s: frozenset().union(*(b.neighbors(v) for v in s)) & prev_verts
        for s in sats
    }

    def anchor_pairs(s):
        return [(x, fq[x]) for x in sorted(anchors[s])]

    fnew = dict(fq)
    arcs = {}
    used = set()
    for s in sats:
        touched = s & set(e)
        if not touched:
            continue
        image = {e[v] for v in touched}
        targets = [t for t in sats if image & t]
        if len(targets) != 1 or not image <= targets[0]:
            raise ConstructionFailed(
                f"map {map_index}: forced image straddles attachment components",
                stage_log=stage_log)
        t = targets[0]
        tau = find_pattern_iso(b, s, anchor_pairs(s), b, t,
                               forced={v: e[v] for v in touched})
        if tau is None or t in used:
            raise ConstructionFailed(
                f"map {map_index}: no compatible completion over a forced component",
                stage_log=stage_log)
        arcs[s] = tau
        used.add(t)
    for s in sats:
        if s in arcs:
            continue
        for t in sats:
            if t in used:
                continue
            tau = find_pattern_iso(b, s, anchor_pairs(s), b, t)
            if tau is not None:
                arcs[s] = tau
                used.add(t)
                break
        else:
            raise ConstructionFailed(
                f"map {map_index}: ran out of compatible components",
                stage_log=stage_log)
    for tau in arcs.values():
        fnew.update(tau)

    # component-level cycle bookkeeping: the map permutes the components
    comp_image = {s: frozenset(arcs[s][v] for v in s) for s in sats}
    seen = set()
    for s in sats:
        if s in seen:
            continue
        cyc = [s]
        seen.add(s)
        cur = comp_image[s]
        while cur != s:
            cyc.append(cur)
            seen.add(cur)
            cur = comp_image[cur]
        log_cycles.append({
            "map_index": map_index,
            "components": [sorted(c) for c in cyc],
            "length": len(cyc),
        })
    return fnew


def build_level_stage(
    prev: Graph,
    p: EPProblem,
    q: int,
    maps: list,
    decomp: ZeroDecomposition | None = None,
    max_set: int | None = None,
) -> tuple:
    """Stage q+1: bring in the ambient's own layer-(q+1) vertices, then add
    attachment copies until counts are level-(q+1) uniform, then extend every
    map across the new components."""
    a = p.a
    if decomp is None:
        decomp = decompose(a, max_set=max_set, max_ambient=_UNBOUNDED)
    new_verts = []
    for comp in decomp.components:
        hi = comp.layers[min(q + 1, comp.level)]
        lo = comp.layers[min(q, comp.level)]
        new_verts.extend(sorted(hi - lo))
    verts = set(prev.vertices) | set(new_verts)
    edges = list(prev.sorted_edges())
    for (u, w) in a.sorted_edges():
        if (u in new_verts or w in new_verts) and u in verts and w in verts:
            edges.append((u, w))
    b = Graph(a.m, verts, edges)
    if new_verts:
        assert delta_rel(b, frozenset(new_verts), prev.vertices) == 0

    added_log: list = []
    rows_log: list = []
    for _ in range(_MAX_SWEEP_PASSES):
        report = uniform_algebraicity_report(
            b, q + 1, max_set=max_set, max_ambient=_UNBOUNDED, max_target=_UNBOUNDED)
        bad = [row for row in report if not row[2]]
        if not bad:
            rows_log = [{
                "base": sorted(w.base),
                "generator": sorted(w.generator),
                "attachment": sorted(w.zero_minimal_set),
                "nu": counts[0] if counts else 0,
            } for (w, counts, _) in report]
            break
        for (w, _, _) in bad:
            b, _ = _uniformize_row(b, w, added_log)
    else:
        raise ConstructionFailed(
            "uniformity not reached within the pass budget", stage_log=added_log)

    assert delta(b, b.vertices) == 0
    assert is_in_k0(b)
    assert is_self_sufficient(b, prev.vertices)

    log = {"stage": q + 1, "kind": "level", "layer_added": sorted(new_verts),
           "rows": rows_log, "added": added_log, "map_cycles": [],
           "graph": b.to_json_dict()}
    new_maps = []
    for k, pi in enumerate(p.maps):
        fnew = _extend_map_over_satellites(
            b, prev.vertices, pi.as_dict(), maps[k], log["map_cycles"], k, [log])
        assert _check_automorphism(b, fnew)
        new_maps.append(fnew)
    return b, new_maps, log


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class EPCertificate:
    problem: EPProblem
    b: Graph
    inclusion: Embedding
    automorphisms: tuple
    orbit: OrbitOrder
    counts: dict
    stage_log: tuple

    def to_json_dict(self) -> dict:
        return {
            "problem": self.problem.to_json_dict(),
            "b": self.b.to_json_dict(),
            "inclusion": [[d, r] for (d, r) in self.inclusion.pairs],
            "automorphisms": [[[d, r] for (d, r) in f.pairs] for f in self.automorphisms],
            "orbit": self.orbit.to_json_dict(),
            "counts": self.counts,
            "stage_log": list(self.stage_log),
        }

    @classmethod
    def from_json_dict(cls, data: dict, m_override: int | None = None) -> "EPCertificate":
        for key in ("problem", "b", "inclusion", "automorphisms"):
            if key not in data:
                raise ValueError(f"certificate JSON lacks {key!r}")
        problem = EPProblem.from_json_dict(data["problem"], m_override=m_override)
        b = Graph.from_json_dict(data["b"], m_override=m_override)
        inclusion = Embedding.build(
            problem.a, b, {d: r for d, r in data["inclusion"]})
        autos = tuple(
            Embedding.build(b, b, {d: r for d, r in pairs})
            for pairs in data["automorphisms"]
        )
        orbit_raw = data.get("orbit", {"per_point": [], "per_map": [], "global": 1})
        orbit = OrbitOrder(
            tuple(dict(d) for d in orbit_raw.get("per_point", [])),
            tuple(orbit_raw.get("per_map", [])),
            orbit_raw.get("global", 1),
        )
        return cls(problem, b, inclusion, autos, orbit,
                   dict(data.get("counts", {})), tuple(data.get("stage_log", [])))


def ep_extend(p: EPProblem, max_set: int | None = None) -> EPCertificate:
    """Run every stage and package the result."""
    validate_problem(p)
    decomp = decompose(p.a, max_set=max_set, max_ambient=_UNBOUNDED)
    _validate_levels(p, decomp)
    orders = orbit_orders(p)
    b, fmaps, log0 = build_base_stage(p, orders, decomp)
    logs = [log0]
    level = max((c.level for c in decomp.components), default=0)
    for q in range(level):
        b, fmaps, lg = build_level_stage(
            b, p, q, fmaps, decomp=decomp, max_set=max_set)
        logs.append(lg)

    assert p.a.induced(p.a.vertices) == b.induced(p.a.vertices)
    inclusion = Embedding.build(p.a, b, {v: v for v in p.a.vertices})
    assert inclusion.is_induced()
    autos = []
    for k, pi in enumerate(p.maps):
        f = fmaps[k]
        for d, r in pi.as_dict().items():
            assert f[d] == r, f"map {k} not extended at {d}"
        emb = Embedding.build(b, b, f)
        assert emb.is_induced()
        autos.append(emb)
    counts = {
        "mu": logs[0]["mu"],
        "nu": [row for lg in logs[1:] for row in lg["rows"]],
    }
    return EPCertificate(p, b, inclusion, tuple(autos), orders, counts, tuple(logs))
