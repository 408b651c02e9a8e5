"""Independent replay checks for extension certificates.

Deliberately self-contained: the counting, orientation, and bijection checks
re-derive everything from raw certificate data rather than calling the
builder's helpers, so a bug shared with the builder cannot hide here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .extension import EPCertificate, EPProblem
from .graph import Graph


def _admits_bounded_orientation(g: Graph) -> bool:
    """Every edge gets charged to one endpoint, at most m per vertex.
    Depth-first charge flipping; fails exactly when some subset holds more
    than m times its size in edges."""
    cap = g.m
    charge = {v: 0 for v in g.vertices}
    owner: dict = {}

    def other(e, x):
        return e[0] if e[1] == x else e[1]

    def relieve(root: str) -> bool:
        parent_edge = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            if charge[x] < cap:
                cur = x
                while parent_edge[cur] is not None:
                    e = parent_edge[cur]
                    prev = other(e, cur)
                    owner[e] = cur
                    charge[cur] += 1
                    charge[prev] -= 1
                    cur = prev
                return True
            for e, own in sorted(owner.items()):
                if own == x and other(e, x) not in parent_edge:
                    parent_edge[other(e, x)] = e
                    stack.append(other(e, x))
        return False

    for e in g.sorted_edges():
        u, v = e
        placed = False
        for cand in sorted((u, v), key=lambda w: (charge[w], w)):
            if charge[cand] < cap:
                owner[e] = cand
                charge[cand] += 1
                placed = True
                break
        if not placed:
            if relieve(u):
                owner[e] = u
                charge[u] += 1
            elif relieve(v):
                owner[e] = v
                charge[v] += 1
            else:
                return False
    return True


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    diagnostics: tuple

    def to_json_dict(self) -> dict:
        return {"ok": self.ok, "diagnostics": list(self.diagnostics)}


def verify_certificate(p: EPProblem, c: EPCertificate) -> VerificationReport:
    """Replay every certificate clause from scratch; diagnostics name each
    failed one."""
    diags = []
    a, b = p.a, c.b
    if a.m != b.m:
        diags.append(f"coefficient mismatch: problem {a.m}, result {b.m}")

    incl = dict(c.inclusion.pairs)
    if c.inclusion.source != a:
        diags.append("inclusion source is not the problem graph")
    if c.inclusion.target != b:
        diags.append("inclusion target is not the result graph")
    if set(incl) != set(a.vertices):
        diags.append("inclusion is not total on the problem graph")
    else:
        for u, v in itertools.combinations(sorted(a.vertices), 2):
            if a.has_edge(u, v) != b.has_edge(incl[u], incl[v]):
                diags.append(f"inclusion is not induced at ({u}, {v})")
                break

    count = b.m * len(b.vertices) - len(b.edges)
    if count != 0:
        diags.append(f"result count is {count}, expected 0")
    if not _admits_bounded_orientation(b):
        diags.append("result admits no bounded orientation: outside the class")

    if len(c.automorphisms) != len(p.maps):
        diags.append(
            f"{len(p.maps)} maps but {len(c.automorphisms)} automorphisms")
    for i, emb in enumerate(c.automorphisms):
        f = dict(emb.pairs)
        if emb.source != b or emb.target != b:
            diags.append(f"automorphism {i} is not a self-map of the result")
            continue
        if set(f) != set(b.vertices) or set(f.values()) != set(b.vertices):
            diags.append(f"automorphism {i} is not a vertex bijection")
            continue
        bad_pair = None
        for u, v in itertools.combinations(sorted(b.vertices), 2):
            if b.has_edge(u, v) != b.has_edge(f[u], f[v]):
                bad_pair = (u, v)
                break
        if bad_pair:
            diags.append(
                f"automorphism {i} is not an automorphism: edge status flips "
                f"at {bad_pair}")
        if i < len(p.maps) and set(incl) == set(a.vertices):
            for d, r in sorted(p.maps[i].as_dict().items()):
                if f.get(incl[d]) != incl[r]:
                    diags.append(f"automorphism {i} does not extend its map at {d}")
                    break
    return VerificationReport(not diags, tuple(diags))
