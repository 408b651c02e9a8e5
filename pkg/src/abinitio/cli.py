"""Command-line front end.

Every verb reads canonical JSON files, writes one JSON document to standard
output carrying a schema tag and the sha256 of each input, and signals
precondition failures with exit 1 and parse problems with exit 2.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import random
import sys

from .amalgam import AmalgamSpec, free_amalgam, verify_strong_pair
from .approximation import (
    add_generic_point, build_approximation, extend_partial_iso, realize_extension)
from .errors import AbinitioError
from .extension import EPCertificate, EPProblem, ep_extend
from .graph import (
    Embedding, Graph, PartialIso, canonical_json, export_dot)
from .predimension import (
    closure, delta, delta_rel, dimension, geometric_closure_bounded,
    is_in_k0, is_self_sufficient, orientation_witness)
from .verifier import verify_certificate
from .zero_decomposition import decompose, hull, mu_count


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _parse_set(text: str | None) -> list:
    if not text:
        return []
    return [part for part in text.split(",") if part]


def _parse_pairs(text: str | None) -> dict:
    out = {}
    for chunk in _parse_set(text):
        if "=" not in chunk:
            raise ValueError(f"expected src=dst pairs, got {chunk!r}")
        d, r = chunk.split("=", 1)
        if d in out:
            raise ValueError(f"duplicate source {d!r}")
        out[d] = r
    return out


def _load_graph(args, attr: str = "file") -> Graph:
    return Graph.from_json_dict(_read_json(getattr(args, attr)),
                                m_override=getattr(args, "m", None))


def _emit(args, payload: dict, paths: list) -> None:
    doc = {"schema": 1, "inputs": {p: _sha256(p) for p in paths}}
    doc.update(payload)
    sys.stdout.write(canonical_json(doc))


# -- verb handlers -----------------------------------------------------------


def _cmd_delta(args) -> int:
    g = _load_graph(args)
    s = _parse_set(args.set) if args.set is not None else g.sorted_vertices()
    if args.over is not None:
        value = delta_rel(g, s, _parse_set(args.over))
        _emit(args, {"delta_rel": value}, [args.file])
    else:
        _emit(args, {"delta": delta(g, s)}, [args.file])
    return 0


def _cmd_closed(args) -> int:
    g = _load_graph(args)
    _emit(args, {"closed": is_self_sufficient(g, _parse_set(args.set))}, [args.file])
    return 0


def _cmd_closure(args) -> int:
    g = _load_graph(args)
    res = closure(g, _parse_set(args.set), max_ambient=args.max_ambient)
    _emit(args, res.to_json_dict(), [args.file])
    return 0


def _cmd_dim(args) -> int:
    g = _load_graph(args)
    _emit(args, {"dim": dimension(g, _parse_set(args.set),
                                  max_ambient=args.max_ambient)}, [args.file])
    return 0


def _cmd_gcl(args) -> int:
    g = _load_graph(args)
    out = geometric_closure_bounded(g, _parse_set(args.set),
                                    max_ambient=args.max_ambient)
    _emit(args, {"gcl": sorted(out)}, [args.file])
    return 0


def _cmd_k0(args) -> int:
    g = _load_graph(args)
    if is_in_k0(g):
        _emit(args, {"in_k0": True, **orientation_witness(g).to_json_dict()},
              [args.file])
    else:
        _emit(args, {"in_k0": False}, [args.file])
    return 0


def _cmd_amalgamate(args) -> int:
    data = _read_json(args.file)
    for key in ("left", "right", "base", "base_in_left", "base_in_right"):
        if key not in data:
            raise ValueError(f"amalgam spec is missing {key!r}")
    left = Graph.from_json_dict(data["left"], m_override=args.m)
    right = Graph.from_json_dict(data["right"], m_override=args.m)
    base = Graph.from_json_dict(data["base"], m_override=args.m)
    spec = AmalgamSpec(
        left=left,
        right=right,
        base_in_left=Embedding.build(base, left, dict(map(tuple, data["base_in_left"]))),
        base_in_right=Embedding.build(base, right, dict(map(tuple, data["base_in_right"]))),
    )
    res = free_amalgam(spec)
    _emit(args, {
        "graph": res.graph.to_json_dict(),
        "left_embedding": [[d, r] for (d, r) in res.left_embedding.pairs],
        "right_embedding": [[d, r] for (d, r) in res.right_embedding.pairs],
    }, [args.file])
    return 0


def _cmd_decompose(args) -> int:
    g = _load_graph(args)
    _emit(args, decompose(g, max_ambient=args.max_ambient,
                          max_set=args.max_set).to_json_dict(), [args.file])
    return 0


def _cmd_hull(args) -> int:
    g = _load_graph(args)
    out = hull(g, _parse_set(args.set), iterate=args.iterate, max_set=args.max_set)
    _emit(args, {"hull": sorted(out)}, [args.file])
    return 0


def _cmd_mu(args) -> int:
    data = _read_json(args.file)
    for key in ("graph", "base", "attach", "alpha"):
        if key not in data:
            raise ValueError(f"mu spec is missing {key!r}")
    g = Graph.from_json_dict(data["graph"], m_override=args.m)
    base = data["base"]
    alpha = Embedding.build(g.induced(base), g, dict(map(tuple, data["alpha"])))
    value = mu_count(g, base, data["attach"], alpha, max_target=args.max_target)
    _emit(args, {"mu": value}, [args.file])
    return 0


def _cmd_ep_extend(args) -> int:
    p = EPProblem.from_json_dict(_read_json(args.file), m_override=args.m)
    cert = ep_extend(p, max_set=args.max_set)
    _emit(args, {"certificate": cert.to_json_dict()}, [args.file])
    return 0


def _cmd_ep_verify(args) -> int:
    p = EPProblem.from_json_dict(_read_json(args.problem), m_override=args.m)
    data = _read_json(args.certificate)
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    cert = EPCertificate.from_json_dict(data, m_override=args.m)
    report = verify_certificate(p, cert)
    _emit(args, report.to_json_dict(), [args.problem, args.certificate])
    return 0 if report.ok else 1


def _cmd_build(args) -> int:
    seed = _load_graph(args)
    chain = build_approximation(seed, args.rounds, args.budget,
                                max_ambient=args.max_ambient)
    _emit(args, chain.to_json_dict(), [args.file])
    return 0


def _cmd_extend_iso(args) -> int:
    g = _load_graph(args)
    iso = PartialIso.build(g, _parse_pairs(args.map))
    grown, gamma = extend_partial_iso(g, iso, steps=args.steps)
    _emit(args, {
        "ambient": grown.to_json_dict(),
        "gamma": [[d, r] for (d, r) in gamma.pairs],
        "grown": len(grown.vertices) > len(g.vertices),
    }, [args.file])
    return 0


def _cmd_add_point(args) -> int:
    g = _load_graph(args)
    out = add_generic_point(g, _parse_set(args.over), args.rel)
    fresh = sorted(out.vertices - g.vertices)[0]
    _emit(args, {"graph": out.to_json_dict(), "fresh": fresh}, [args.file])
    return 0


def _cmd_export_dot(args) -> int:
    g = _load_graph(args)
    highlights = {}
    for spec in args.highlight or []:
        if "=" not in spec:
            raise ValueError(f"expected NAME=v1,v2 highlight, got {spec!r}")
        name, verts = spec.split("=", 1)
        highlights[name] = _parse_set(verts)
    sys.stdout.write(f"// input {args.file} sha256 {_sha256(args.file)}\n")
    sys.stdout.write(export_dot(g, highlights or None))
    return 0


# -- selftest ----------------------------------------------------------------


def _random_graph(rng: random.Random, n: int, m: int, p: float) -> Graph:
    names = [f"v{i}" for i in range(n)]
    edges = [e for e in itertools.combinations(names, 2) if rng.random() < p]
    return Graph(m, names, edges)


def _brute_in_k0(g: Graph) -> bool:
    verts = g.sorted_vertices()
    for k in range(len(verts) + 1):
        for combo in itertools.combinations(verts, k):
            if delta(g, combo) < 0:
                return False
    return True


def _brute_closed(g: Graph, a: frozenset) -> bool:
    rest = sorted(g.vertices - a)
    base = delta(g, a)
    for k in range(len(rest) + 1):
        for combo in itertools.combinations(rest, k):
            if delta(g, a | frozenset(combo)) < base:
                return False
    return True


def _brute_closure(g: Graph, a: frozenset) -> frozenset:
    out = frozenset(g.vertices)
    rest = sorted(g.vertices - a)
    for k in range(len(rest) + 1):
        for combo in itertools.combinations(rest, k):
            s = a | frozenset(combo)
            if len(s) < len(out) and _brute_closed(g, s):
                out = s
    return out


def _suite_orientation(rng: random.Random) -> tuple:
    passed = failed = 0
    for _ in range(60):
        g = _random_graph(rng, rng.randint(0, 6), rng.choice([2, 3]), rng.random())
        ok = is_in_k0(g) == _brute_in_k0(g)
        sub = frozenset(v for v in g.vertices if rng.random() < 0.5)
        ok = ok and is_self_sufficient(g, sub) == _brute_closed(g, sub)
        passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    return passed, failed


def _suite_closure(rng: random.Random) -> tuple:
    passed = failed = 0
    done = 0
    while done < 30:
        g = _random_graph(rng, rng.randint(1, 6), 2, rng.random() * 0.7)
        if not is_in_k0(g):
            continue
        done += 1
        a = frozenset(v for v in g.vertices if rng.random() < 0.4)
        ok = closure(g, a).closure == _brute_closure(g, a)
        passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    return passed, failed


def _suite_amalgam(rng: random.Random) -> tuple:
    passed = failed = 0
    done = 0
    while done < 15:
        base = _random_graph(rng, rng.randint(0, 3), 2, 0.5)
        ln = rng.randint(0, 3)
        left_extra = [f"l{i}" for i in range(ln)]
        right_extra = [f"r{i}" for i in range(rng.randint(0, 3))]

        def grow(extra):
            edges = list(base.sorted_edges())
            pool = base.sorted_vertices() + extra
            for i, v in enumerate(extra):
                others = pool[:len(base.vertices) + i]
                rng.shuffle(others)
                for t in others[:rng.randint(0, 2)]:
                    edges.append((v, t))
            return Graph(2, pool, edges)

        left = grow(left_extra)
        right = grow(right_extra)
        if not (is_in_k0(left) and is_in_k0(right)):
            continue
        if not (is_self_sufficient(left, base.vertices)
                and is_self_sufficient(right, base.vertices)):
            continue
        done += 1
        ident = {v: v for v in base.vertices}
        res = free_amalgam(AmalgamSpec(
            left=left, right=right,
            base_in_left=Embedding.build(base, left, ident),
            base_in_right=Embedding.build(base, right, ident)))
        ok = is_in_k0(res.graph)
        ok = ok and verify_strong_pair(left, res.graph, res.left_embedding)
        ok = ok and verify_strong_pair(right, res.graph, res.right_embedding)
        ok = ok and (delta(res.graph, res.graph.vertices)
                     == delta(left, left.vertices) + delta(right, right.vertices)
                     - delta(base, base.vertices))
        passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    return passed, failed


def _block_with_tail() -> tuple:
    verts = [f"a{i}" for i in range(5)] + ["w"]
    edges = list(itertools.combinations(verts[:5], 2)) + [("w", "a0"), ("w", "a1")]
    g = Graph(2, verts, edges)
    e = PartialIso.build(g, {v: v for v in verts[:5]})
    return g, e


def _suite_ep(_: random.Random) -> tuple:
    passed = failed = 0
    try:
        g, e = _block_with_tail()
        p = EPProblem(g, (e,))
        cert = ep_extend(p)
        report = verify_certificate(p, cert)
        ok = report.ok and len(cert.b.vertices) == 15
        passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    except AbinitioError:
        failed += 1
    return passed, failed


def _suite_builder(_: random.Random) -> tuple:
    passed = failed = 0
    names = [f"a{i}" for i in range(5)] + [f"b{i}" for i in range(5)]
    edges = list(itertools.combinations(names[:5], 2)) + list(
        itertools.combinations(names[5:], 2))
    g = Graph(2, names, edges)
    iso = PartialIso.build(g, {f"a{i}": f"b{i}" for i in range(5)})
    try:
        grown, gamma = extend_partial_iso(g, iso)
        ok = grown == g and gamma.is_induced() and gamma.image == g.vertices
        passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    except AbinitioError:
        failed += 1
    out = add_generic_point(g, [v for v in names[:5]], 1)
    ok = len(out.vertices) == 11 and is_self_sufficient(out, g.vertices)
    passed, failed = (passed + 1, failed) if ok else (passed, failed + 1)
    return passed, failed


def _cmd_selftest(args) -> int:
    rng = random.Random(20260814)
    suites = [
        ("orientation", _suite_orientation),
        ("closure", _suite_closure),
        ("amalgam", _suite_amalgam),
        ("extension", _suite_ep),
        ("builder", _suite_builder),
    ]
    rows = []
    all_ok = True
    for name, fn in suites:
        passed, failed = fn(rng)
        rows.append({"name": name, "passed": passed, "failed": failed})
        all_ok = all_ok and failed == 0
    _emit(args, {"suites": rows, "ok": all_ok}, [])
    return 0 if all_ok else 1


# -- argument wiring ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="abinitio",
        description="Finite combinatorics of sparse generic structures.")
    sub = top.add_subparsers(dest="verb", required=True)

    def verb(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=fn)
        return p

    def with_graph(p, set_flag=True):
        p.add_argument("file", help="graph JSON file")
        p.add_argument("--m", type=int, default=None,
                       help="override the sparsity coefficient")
        if set_flag:
            p.add_argument("--set", default=None,
                           help="comma-separated vertex set (empty string for the empty set)")
        return p

    p = with_graph(verb("delta", _cmd_delta, help="predimension of a set"))
    p.add_argument("--over", default=None, help="relative count over this set")
    with_graph(verb("closed", _cmd_closed, help="self-sufficiency test"))
    p = with_graph(verb("closure", _cmd_closure, help="self-sufficient closure"))
    p.add_argument("--max-ambient", type=int, default=None)
    p = with_graph(verb("dim", _cmd_dim, help="dimension of a set"))
    p.add_argument("--max-ambient", type=int, default=None)
    p = with_graph(verb("gcl", _cmd_gcl, help="geometric closure"))
    p.add_argument("--max-ambient", type=int, default=None)
    with_graph(verb("k0", _cmd_k0, help="membership and orientation witness"),
               set_flag=False)

    p = verb("amalgamate", _cmd_amalgamate, help="free amalgam from a spec file")
    p.add_argument("file", help="spec JSON with left/right/base and base embeddings")
    p.add_argument("--m", type=int, default=None)

    p = with_graph(verb("decompose", _cmd_decompose,
                        help="blocks, carriers, and level chains"), set_flag=False)
    p.add_argument("--max-ambient", type=int, default=None)
    p.add_argument("--max-set", type=int, default=None)

    p = with_graph(verb("hull", _cmd_hull, help="tight-extension hull of a set"))
    p.add_argument("--iterate", action="store_true",
                   help="repeat absorption until a fixed point")
    p.add_argument("--max-set", type=int, default=None)

    p = verb("mu", _cmd_mu, help="strong extension count from a spec file")
    p.add_argument("file", help="spec JSON with graph/base/attach/alpha")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--max-target", type=int, default=None)

    p = verb("ep-extend", _cmd_ep_extend,
             help="solve an extension problem, emitting a certificate")
    p.add_argument("file", help="problem JSON with graph and maps")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--max-set", type=int, default=None)

    p = verb("ep-verify", _cmd_ep_verify, help="replay-check a certificate")
    p.add_argument("problem", help="problem JSON")
    p.add_argument("certificate", help="certificate JSON (bare or wrapped)")
    p.add_argument("--m", type=int, default=None)

    p = with_graph(verb("build", _cmd_build,
                        help="approximation chain from a seed"), set_flag=False)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--budget", type=int, required=True,
                   help="largest extension pattern size")
    p.add_argument("--max-ambient", type=int, default=None)

    p = with_graph(verb("extend-iso", _cmd_extend_iso,
                        help="extend a partial isomorphism to an automorphism"),
                   set_flag=False)
    p.add_argument("--map", required=True, help="src=dst pairs, comma separated")
    p.add_argument("--steps", type=int, default=32)

    p = with_graph(verb("add-point", _cmd_add_point,
                        help="adjoin a fresh point of given relative count"),
                   set_flag=False)
    p.add_argument("--over", required=True, help="attachment set")
    p.add_argument("--rel", type=int, required=True)

    p = with_graph(verb("export-dot", _cmd_export_dot, help="DOT rendering"),
                   set_flag=False)
    p.add_argument("--highlight", action="append",
                   help="NAME=v1,v2 cluster (repeatable)")

    verb("selftest", _cmd_selftest,
         help="run the built-in oracle suites and report pass/fail counts")
    return top


def main(argv: list | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except AbinitioError as exc:
        sys.stdout.write(canonical_json({
            "schema": 1,
            "error": {"type": exc.__class__.__name__, "message": str(exc)},
        }))
        return 1
    except (ValueError, KeyError, TypeError, OSError) as exc:
        sys.stdout.write(canonical_json({
            "schema": 1,
            "error": {"type": exc.__class__.__name__, "message": str(exc)},
        }))
        return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
