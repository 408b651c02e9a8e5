"""Finite simple graphs with a sparsity coefficient, and maps between them.

Vertices are opaque strings ordered lexicographically; every enumeration in
the package derives its order from that, so repeated runs are reproducible
byte for byte.  Graphs are immutable: all "mutating" operations build new
values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import CoefficientMismatch, InvalidMap, SizeCeilingExceeded, UnknownVertex
from . import limits

VertexSet = frozenset  # frozenset[str]; members must belong to an ambient graph


def normalize_edge(u: str, v: str) -> tuple[str, str]:
    if u == v:
        raise InvalidMap(f"loop edge at {u!r} not allowed")
    return (u, v) if u < v else (v, u)


class Graph:
    """An undirected simple graph together with an integer coefficient m >= 2.

    The coefficient scales the vertex weight in the rank-like count
    m*|s| - edges(s) used throughout the package.
    """

    __slots__ = ("m", "vertices", "edges", "_adj")

    def __init__(self, m: int, vertices: Iterable[str], edges: Iterable[tuple[str, str]]):
        if not isinstance(m, int) or m < 2:
            raise InvalidMap(f"coefficient must be an integer >= 2, got {m!r}")
        vs = frozenset(vertices)
        for v in vs:
            if not isinstance(v, str) or not v:
                raise InvalidMap(f"vertex names must be nonempty strings, got {v!r}")
        es = frozenset(normalize_edge(u, v) for (u, v) in edges)
        for (u, v) in es:
            if u not in vs or v not in vs:
                raise UnknownVertex(f"edge ({u!r}, {v!r}) mentions a vertex outside the graph")
        adj: dict[str, set[str]] = {v: set() for v in vs}
        for (u, v) in es:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "_adj", {v: frozenset(ns) for v, ns in adj.items()})

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.m == other.m and self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.m, self.vertices, self.edges))

    def __repr__(self):
        return f"Graph(m={self.m}, |V|={len(self.vertices)}, |E|={len(self.edges)})"

    # -- queries ---------------------------------------------------------

    def neighbors(self, v: str) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: str, v: str) -> bool:
        return normalize_edge(u, v) in self.edges

    def sorted_vertices(self) -> list[str]:
        return sorted(self.vertices)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    def check_subset(self, s: Iterable[str]) -> frozenset:
        sub = frozenset(s)
        missing = sub - self.vertices
        if missing:
            raise UnknownVertex(f"unknown vertices: {sorted(missing)}")
        return sub

    def edges_within(self, s: frozenset) -> int:
        # counts each edge once; callers pass validated subsets
        total = 0
        for v in s:
            total += len(self._adj[v] & s)
        return total // 2

    def induced(self, s: Iterable[str]) -> "Graph":
        sub = self.check_subset(s)
        es = [(u, v) for (u, v) in self.edges if u in sub and v in sub]
        return Graph(self.m, sub, es)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "vertices": self.sorted_vertices(),
            "edges": [[u, v] for (u, v) in self.sorted_edges()],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict, m_override: int | None = None) -> "Graph":
        if not isinstance(d, dict):
            raise ValueError("graph document must be a JSON object")
        for key in ("m", "vertices", "edges"):
            if key not in d:
                raise ValueError(f"graph document missing {key!r}")
        m = m_override if m_override is not None else d["m"]
        edges = [tuple(e) for e in d["edges"]]
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"malformed edge {e!r}")
        return cls(m, d["vertices"], edges)

    @classmethod
    def from_json(cls, text: str, m_override: int | None = None) -> "Graph":
        return cls.from_json_dict(json.loads(text), m_override=m_override)


def canonical_json(obj) -> str:
    """Canonical serialization: stable key order, two-space indent, newline at end."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- subgraphs and edge counts ------------------------------------------


def induced_subgraph(g: Graph, s: Iterable[str]) -> Graph:
    """The induced subgraph on s; inherits the coefficient."""
    return g.induced(s)


def cross_edges(g: Graph, s: Iterable[str], t: Iterable[str]) -> frozenset:
    """Edges with one endpoint in s and the other in t.  s and t must be disjoint."""
    ss = g.check_subset(s)
    tt = g.check_subset(t)
    if ss & tt:
        raise InvalidMap(f"cross_edges requires disjoint sets, shared: {sorted(ss & tt)}")
    out = set()
    for v in ss:
        for w in g.neighbors(v) & tt:
            out.add(normalize_edge(v, w))
    return frozenset(out)


def count_cross_edges(g: Graph, s: frozenset, t: frozenset) -> int:
    total = 0
    for v in s:
        total += len(g.neighbors(v) & t)
    return total


# -- maps ----------------------------------------------------------------


def _mapping_tuple(mapping) -> tuple:
    if isinstance(mapping, dict):
        items = mapping.items()
    else:
        items = list(mapping)
    return tuple(sorted((str(a), str(b)) for a, b in items))


@dataclass(frozen=True)
class Embedding:
    """An injective map between graphs, stored as sorted pairs.

    Injectivity and endpoint validity are enforced at construction;
    edge-and-nonedge preservation is checked by is_induced(), because some
    consumers need to talk about candidate maps that fail it.
    """

    source: Graph
    target: Graph
    pairs: tuple

    @classmethod
    def build(cls, source: Graph, target: Graph, mapping) -> "Embedding":
        return cls(source, target, _mapping_tuple(mapping))

    def __post_init__(self):
        seen_src, seen_dst = set(), set()
        for (a, b) in self.pairs:
            if a not in self.source.vertices:
                raise UnknownVertex(f"map source {a!r} not in source graph")
            if b not in self.target.vertices:
                raise UnknownVertex(f"map target {b!r} not in target graph")
            if a in seen_src:
                raise InvalidMap(f"duplicate source vertex {a!r}")
            if b in seen_dst:
                raise InvalidMap(f"map is not injective at {b!r}")
            seen_src.add(a)
            seen_dst.add(b)
        if seen_src != self.source.vertices:
            missing = sorted(self.source.vertices - seen_src)
            raise InvalidMap(f"embedding must be total on the source; missing {missing}")

    def as_dict(self) -> dict:
        return dict(self.pairs)

    @property
    def image(self) -> frozenset:
        return frozenset(b for (_, b) in self.pairs)

    def __call__(self, v: str) -> str:
        for (a, b) in self.pairs:
            if a == v:
                return b
        raise UnknownVertex(f"{v!r} not in embedding domain")

    def is_induced(self) -> bool:
        f = self.as_dict()
        vs = sorted(f)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                if self.source.has_edge(a, b) != self.target.has_edge(f[a], f[b]):
                    return False
        return True


@dataclass(frozen=True)
class PartialIso:
    """A partial isomorphism inside one ambient graph.

    The mapping must be a bijection between its domain and range whose
    induced subgraphs it matches edge for edge.
    """

    ambient: Graph
    pairs: tuple

    @classmethod
    def build(cls, ambient: Graph, mapping) -> "PartialIso":
        return cls(ambient, _mapping_tuple(mapping))

    def __post_init__(self):
        f = {}
        seen_dst = set()
        for (a, b) in self.pairs:
            self.ambient.check_subset([a, b])
            if a in f:
                raise InvalidMap(f"duplicate domain vertex {a!r}")
            if b in seen_dst:
                raise InvalidMap(f"map is not injective at {b!r}")
            f[a] = b
            seen_dst.add(b)
        vs = sorted(f)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                if self.ambient.has_edge(a, b) != self.ambient.has_edge(f[a], f[b]):
                    raise InvalidMap(
                        f"pairs ({a!r},{b!r}) break the induced-isomorphism requirement")

    def as_dict(self) -> dict:
        return dict(self.pairs)

    @property
    def domain(self) -> frozenset:
        return frozenset(a for (a, _) in self.pairs)

    @property
    def range(self) -> frozenset:
        return frozenset(b for (_, b) in self.pairs)


# -- embedding enumeration ----------------------------------------------


def enumerate_embeddings(
    a: Graph,
    c: Graph,
    strong_only: bool = False,
    is_strong: Callable | None = None,
    fixed: dict | None = None,
    max_target: int | None = None,
) -> list[Embedding]:
    """All induced embeddings of a into c, in canonical order.

    With strong_only, keep only embeddings whose image passes is_strong
    (default: self-sufficiency of the image in c).  fixed pins part of the
    map in advance.  Backtracking over sorted vertices with degree pruning;
    targets above the size ceiling are rejected.
    """
    ceiling = limits.max_target(max_target)
    if len(c.vertices) > ceiling:
        raise SizeCeilingExceeded(
            f"target has {len(c.vertices)} vertices, ceiling is {ceiling}")
    if a.m != c.m:
        raise CoefficientMismatch(f"coefficients differ: {a.m} vs {c.m}")
    if strong_only and is_strong is None:
        from .predimension import is_self_sufficient

        is_strong = is_self_sufficient

    pattern = a.sorted_vertices()
    fixed = dict(fixed or {})
    for k, v in fixed.items():
        a.check_subset([k])
        c.check_subset([v])

    out: list[Embedding] = []
    assignment: dict[str, str] = {}
    used: set[str] = set()

    def consistent(p: str, t: str) -> bool:
        if a.degree(p) > c.degree(t):
            return False
        for q, u in assignment.items():
            if a.has_edge(p, q) != c.has_edge(t, u):
                return False
        return True

    def extend(i: int):
        if i == len(pattern):
            emb = Embedding.build(a, c, dict(assignment))
            if not strong_only or is_strong(c, emb.image):
                out.append(emb)
            return
        p = pattern[i]
        if p in fixed:
            candidates = [fixed[p]] if fixed[p] not in used else []
        else:
            candidates = [t for t in c.sorted_vertices() if t not in used]
        for t in candidates:
            if consistent(p, t):
                assignment[p] = t
                used.add(t)
                extend(i + 1)
                del assignment[p]
                used.discard(t)

    extend(0)
    return out


# -- fresh names and disjoint unions -------------------------------------


def fresh_name(base: str, taken: set) -> str:
    """Deterministic collision-free variant of base: base, base~1, base~2, ..."""
    if base not in taken:
        return base
    k = 1
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


def disjoint_union(g: Graph, h: Graph) -> tuple[Graph, dict]:
    """Disjoint union keeping g's names; h is relabeled away from collisions.

    Returns the union and the relabeling applied to h (identity entries
    included so callers can always look names up).
    """
    if g.m != h.m:
        raise CoefficientMismatch(f"coefficients differ: {g.m} vs {h.m}")
    taken = set(g.vertices)
    relabel: dict[str, str] = {}
    for v in sorted(h.vertices):
        nv = fresh_name(v, taken)
        relabel[v] = nv
        taken.add(nv)
    vertices = set(g.vertices) | set(relabel.values())
    edges = list(g.edges) + [(relabel[u], relabel[v]) for (u, v) in h.edges]
    return Graph(g.m, vertices, edges), relabel


# -- connected subset enumeration ----------------------------------------


def connected_subsets(g: Graph, pool: frozenset, max_size: int) -> Iterator[frozenset]:
    """All subsets of pool that induce a connected subgraph, up to max_size.

    Connectivity is within the subset itself.  Classic expansion with an
    exclusion frontier, so each subset is produced exactly once.
    """
    pool = g.check_subset(pool)
    order = {v: i for i, v in enumerate(sorted(pool))}

    def grow(current: set, frontier: list, banned: set):
        yield frozenset(current)
        if len(current) >= max_size:
            return
        local_banned = set(banned)
        for i, v in enumerate(frontier):
            new_frontier = [w for w in frontier[i + 1:]]
            extra = sorted(
                (g.neighbors(v) & pool) - current - local_banned - set(new_frontier),
                key=order.get,
            )
            current.add(v)
            yield from grow(current, new_frontier + extra, local_banned)
            current.discard(v)
            local_banned.add(v)

    for root in sorted(pool, key=order.get):
        banned = {v for v in pool if order[v] < order[root]}
        seeds = sorted((g.neighbors(root) & pool) - banned - {root}, key=order.get)
        yield from grow({root}, seeds, banned)


def components(g: Graph, pool: Iterable[str]) -> list:
    """Connected components of the subgraph induced on pool, each a
    frozenset, ordered by least vertex."""
    left = set(g.check_subset(pool))
    out = []
    while left:
        root = min(left)
        comp = {root}
        queue = [root]
        while queue:
            v = queue.pop()
            for w in g.neighbors(v) & left:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        left -= comp
        out.append(frozenset(comp))
    return sorted(out, key=lambda s: sorted(s))


def export_dot(g: Graph, highlights: dict | None = None) -> str:
    """Deterministic DOT rendering; highlight groups become clusters."""
    lines = ["graph ambient {"]
    highlighted = set()
    for name in sorted(highlights or {}):
        members = sorted(frozenset(highlights[name]))
        g.check_subset(members)
        lines.append(f'  subgraph "cluster_{name}" {{')
        lines.append(f'    label="{name}";')
        for v in members:
            lines.append(f'    "{v}";')
            highlighted.add(v)
        lines.append("  }")
    for v in g.sorted_vertices():
        if v not in highlighted:
            lines.append(f'  "{v}";')
    for (u, v) in g.sorted_edges():
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
