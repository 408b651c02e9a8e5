"""Free amalgamation of two graphs over a shared self-sufficient base.

The amalgam adds no edges beyond the two factors, keeps the base's names
from the left factor, and relabels the right factor's private vertices away
from collisions.  Validation is eager: a bad specification fails before any
construction happens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AmalgamError, CoefficientMismatch
from .graph import Embedding, Graph, fresh_name
from .predimension import is_in_k0, is_self_sufficient


@dataclass(frozen=True)
class AmalgamSpec:
    left: Graph
    right: Graph
    base_in_left: Embedding
    base_in_right: Embedding


@dataclass(frozen=True)
class AmalgamResult:
    graph: Graph
    left_embedding: Embedding
    right_embedding: Embedding


def verify_strong_pair(g: Graph, h: Graph, emb: Embedding) -> bool:
    """Whether emb realizes g as an induced, self-sufficient subgraph of h."""
    if emb.source != g or emb.target != h:
        return False
    if not emb.is_induced():
        return False
    return is_self_sufficient(h, emb.image)


def free_amalgam(spec: AmalgamSpec) -> AmalgamResult:
    """Glue left and right along the base with no extra edges.

    Requires both factors hereditarily nonnegative and both base images
    self-sufficient; the result then is hereditarily nonnegative and both
    factors sit self-sufficiently inside it.
    """
    base = spec.base_in_left.source
    if spec.base_in_right.source != base:
        raise AmalgamError("base embeddings must share one base graph")
    if spec.left.m != spec.right.m:
        raise CoefficientMismatch(
            f"coefficients differ: {spec.left.m} vs {spec.right.m}")
    if spec.base_in_left.target != spec.left or spec.base_in_right.target != spec.right:
        raise AmalgamError("base embeddings must land in the declared factors")
    for side, g, emb in (
        ("left", spec.left, spec.base_in_left),
        ("right", spec.right, spec.base_in_right),
    ):
        if not emb.is_induced():
            raise AmalgamError(f"base embedding into {side} factor is not induced")
        if not is_in_k0(g):
            raise AmalgamError(f"{side} factor is not hereditarily nonnegative")
        if not is_self_sufficient(g, emb.image):
            raise AmalgamError(f"base image is not self-sufficient in the {side} factor")

    into_left = spec.base_in_left.as_dict()
    into_right = spec.base_in_right.as_dict()
    right_base_to_left = {into_right[b]: into_left[b] for b in into_left}

    taken = set(spec.left.vertices)
    right_map: dict[str, str] = {}
    for v in sorted(spec.right.vertices):
        if v in right_base_to_left:
            right_map[v] = right_base_to_left[v]
        else:
            nv = fresh_name(v, taken)
            right_map[v] = nv
            taken.add(nv)

    vertices = set(spec.left.vertices) | set(right_map.values())
    edges = list(spec.left.edges) + [
        (right_map[u], right_map[v]) for (u, v) in spec.right.edges
    ]
    result = Graph(spec.left.m, vertices, edges)

    left_emb = Embedding.build(spec.left, result, {v: v for v in spec.left.vertices})
    right_emb = Embedding.build(spec.right, result, right_map)

    # postconditions of the construction; cheap enough to check every time
    assert is_in_k0(result)
    assert left_emb.is_induced() and right_emb.is_induced()
    assert is_self_sufficient(result, left_emb.image)
    assert is_self_sufficient(result, right_emb.image)
    return AmalgamResult(result, left_emb, right_emb)
