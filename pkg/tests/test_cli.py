import hashlib
import itertools
import json
import subprocess
import sys

import pytest

from abinitio import Graph, canonical_json, cli


def k5_dict(prefix="a"):
    names = [f"{prefix}{i}" for i in range(5)]
    return {
        "m": 2,
        "vertices": names,
        "edges": [[a, b] for a, b in itertools.combinations(names, 2)],
    }


def w_dict():
    d = k5_dict()
    d["vertices"] = d["vertices"] + ["w"]
    d["edges"] = d["edges"] + [["a0", "w"], ["a1", "w"]]
    return d


def chain_dict():
    d = w_dict()
    d["vertices"] = d["vertices"] + ["z"]
    d["edges"] = d["edges"] + [["a2", "z"], ["w", "z"]]
    return d


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def run(capsys, argv):
    rc = cli.main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out), out


def test_delta_and_envelope(tmp_path, capsys):
    path = write(tmp_path, "g.json", k5_dict())
    rc, doc, raw = run(capsys, ["delta", path])
    assert rc == 0
    assert doc["schema"] == 1 and doc["delta"] == 0
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    assert doc["inputs"] == {path: digest}
    # canonical output: reserializing the parsed document is byte-identical
    assert canonical_json(doc) == raw
    rc, doc, _ = run(capsys, ["delta", path, "--set", "a0,a1"])
    assert doc["delta"] == 3
    rc, doc, _ = run(capsys, ["delta", path, "--set", ""])
    assert doc["delta"] == 0


def test_delta_rel(tmp_path, capsys):
    path = write(tmp_path, "g.json", w_dict())
    rc, doc, _ = run(capsys, ["delta", path, "--set", "w", "--over", "a0,a1"])
    assert rc == 0 and doc["delta_rel"] == 0


def test_closed_and_closure(tmp_path, capsys):
    path = write(tmp_path, "g.json", k5_dict())
    rc, doc, _ = run(capsys, ["closed", path, "--set", "a0"])
    assert rc == 0 and doc["closed"] is False
    rc, doc, _ = run(capsys, ["closure", path, "--set", "a0"])
    assert doc["closure"] == [f"a{i}" for i in range(5)]
    assert doc["witness_chain"][0] == ["a0"]
    assert doc["witness_chain"][-1] == doc["closure"]


def test_dim_and_gcl(tmp_path, capsys):
    path = write(tmp_path, "g.json", w_dict())
    rc, doc, _ = run(capsys, ["dim", path, "--set", "a0,a1"])
    assert doc["dim"] == 0
    rc, doc, _ = run(capsys, ["gcl", path, "--set", "a0,a1,a2,a3,a4"])
    assert doc["gcl"] == sorted(["a0", "a1", "a2", "a3", "a4", "w"])


def test_k0_both_ways(tmp_path, capsys):
    path = write(tmp_path, "g.json", k5_dict())
    rc, doc, _ = run(capsys, ["k0", path])
    assert rc == 0 and doc["in_k0"] is True
    assert doc["max_outdegree"] <= 2
    assert len(doc["orientation"]) == 10
    names = [f"c{i}" for i in range(6)]
    k6 = {"m": 2, "vertices": names,
          "edges": [[a, b] for a, b in itertools.combinations(names, 2)]}
    path = write(tmp_path, "k6.json", k6)
    rc, doc, _ = run(capsys, ["k0", path])
    assert rc == 0 and doc["in_k0"] is False
    assert "orientation" not in doc


def test_k0_m_override(tmp_path, capsys):
    names = [f"c{i}" for i in range(6)]
    k6 = {"m": 2, "vertices": names,
          "edges": [[a, b] for a, b in itertools.combinations(names, 2)]}
    path = write(tmp_path, "k6.json", k6)
    rc, doc, _ = run(capsys, ["k0", path, "--m", "3"])
    assert doc["in_k0"] is True


def test_amalgamate(tmp_path, capsys):
    spec = {
        "left": k5_dict("a"),
        "right": k5_dict("b"),
        "base": {"m": 2, "vertices": [], "edges": []},
        "base_in_left": [],
        "base_in_right": [],
    }
    path = write(tmp_path, "spec.json", spec)
    rc, doc, _ = run(capsys, ["amalgamate", path])
    assert rc == 0
    assert len(doc["graph"]["vertices"]) == 10
    assert len(doc["graph"]["edges"]) == 20
    assert doc["left_embedding"] == [[v, v] for v in sorted(k5_dict("a")["vertices"])]

    del spec["base"]
    path = write(tmp_path, "bad.json", spec)
    rc, doc, _ = run(capsys, ["amalgamate", path])
    assert rc == 2 and "base" in doc["error"]["message"]


def test_decompose_and_hull(tmp_path, capsys):
    path = write(tmp_path, "g.json", chain_dict())
    rc, doc, _ = run(capsys, ["decompose", path])
    assert rc == 0
    comp = doc["components"][0]
    assert comp["level"] == 2
    assert comp["layers"][1] == sorted(["a0", "a1", "a2", "a3", "a4", "w"])
    rc, doc, _ = run(capsys, ["hull", path, "--set", "a0,a1,a2,a3,a4"])
    assert doc["hull"] == sorted(["a0", "a1", "a2", "a3", "a4", "w"])
    rc, doc, _ = run(capsys, ["hull", path, "--set", "a0,a1,a2,a3,a4", "--iterate"])
    assert doc["hull"] == sorted(["a0", "a1", "a2", "a3", "a4", "w", "z"])


def test_mu(tmp_path, capsys):
    base = [f"a{i}" for i in range(5)]
    spec = {
        "graph": w_dict(),
        "base": base,
        "attach": ["w"],
        "alpha": [[v, v] for v in base],
    }
    path = write(tmp_path, "mu.json", spec)
    rc, doc, _ = run(capsys, ["mu", path])
    assert rc == 0 and doc["mu"] == 1


def test_ep_extend_then_verify(tmp_path, capsys):
    problem = {
        "graph": {
            "m": 2,
            "vertices": k5_dict("a")["vertices"] + k5_dict("b")["vertices"],
            "edges": k5_dict("a")["edges"] + k5_dict("b")["edges"],
        },
        "maps": [{"map": [[f"a{i}", f"b{i}"] for i in range(5)]
                  + [[f"b{i}", f"a{i}"] for i in range(5)]}],
    }
    ppath = write(tmp_path, "problem.json", problem)
    rc, doc, raw = run(capsys, ["ep-extend", ppath])
    assert rc == 0 and "certificate" in doc
    cpath = tmp_path / "cert.json"
    cpath.write_text(raw)

    rc, doc, _ = run(capsys, ["ep-verify", ppath, str(cpath)])
    assert rc == 0 and doc["ok"] is True and doc["diagnostics"] == []

    tampered = json.loads(raw)["certificate"]
    tampered["b"]["edges"] = tampered["b"]["edges"][1:]
    tpath = write(tmp_path, "tampered.json", tampered)
    rc, doc, _ = run(capsys, ["ep-verify", ppath, tpath])
    assert rc == 1 and doc["ok"] is False and doc["diagnostics"]


def test_build(tmp_path, capsys):
    path = write(tmp_path, "empty.json", {"m": 2, "vertices": [], "edges": []})
    rc, doc, _ = run(capsys, ["build", path, "--rounds", "1", "--budget", "2"])
    assert rc == 0
    assert doc["truncated"] is False
    assert len(doc["stages"]) == 2
    assert len(doc["stages"][-1]["vertices"]) == 5


def test_extend_iso(tmp_path, capsys):
    g = {
        "m": 2,
        "vertices": k5_dict("a")["vertices"] + k5_dict("b")["vertices"],
        "edges": k5_dict("a")["edges"] + k5_dict("b")["edges"],
    }
    path = write(tmp_path, "g.json", g)
    pairs = ",".join(f"a{i}=b{i}" for i in range(5))
    rc, doc, _ = run(capsys, ["extend-iso", path, "--map", pairs])
    assert rc == 0 and doc["grown"] is False
    gamma = dict(map(tuple, doc["gamma"]))
    assert gamma["a0"] == "b0" and gamma["b0"] == "a0"

    g["vertices"] = g["vertices"] + ["w"]
    g["edges"] = g["edges"] + [["b0", "w"], ["b1", "w"]]
    path = write(tmp_path, "g2.json", g)
    rc, doc, _ = run(capsys, ["extend-iso", path, "--map", pairs])
    assert rc == 0 and doc["grown"] is True
    assert len(doc["ambient"]["vertices"]) == 12


def test_add_point(tmp_path, capsys):
    path = write(tmp_path, "g.json", k5_dict())
    rc, doc, _ = run(capsys, ["add-point", path, "--over", "a0,a1,a2,a3,a4",
                              "--rel", "0"])
    assert rc == 0 and doc["fresh"] == "x"
    assert len(doc["graph"]["vertices"]) == 6
    assert ["a0", "x"] in doc["graph"]["edges"]


def test_export_dot(tmp_path, capsys):
    path = write(tmp_path, "g.json", k5_dict())
    rc = cli.main(["export-dot", path, "--highlight", "core=a0,a1"])
    out = capsys.readouterr().out
    assert rc == 0
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    assert out.startswith(f"// input {path} sha256 {digest}\n")
    assert "graph ambient {" in out
    assert 'subgraph "cluster_core"' in out
    assert '    "a0";' in out


def test_error_exit_codes(tmp_path, capsys):
    rc, doc, _ = run(capsys, ["delta", str(tmp_path / "missing.json")])
    assert rc == 2 and doc["error"]["type"] == "FileNotFoundError"

    names = [f"c{i}" for i in range(6)]
    k6 = {"m": 2, "vertices": names,
          "edges": [[a, b] for a, b in itertools.combinations(names, 2)]}
    path = write(tmp_path, "k6.json", k6)
    rc, doc, _ = run(capsys, ["decompose", path])
    assert rc == 1 and doc["error"]["type"] == "OutsideK0"

    bad = {"m": 2, "vertices": ["a"], "edges": [["a", "b"]]}
    path = write(tmp_path, "bad.json", bad)
    rc, doc, _ = run(capsys, ["delta", path])
    assert rc == 1 and doc["error"]["type"] == "UnknownVertex"

    garbled = tmp_path / "garbled.json"
    garbled.write_text("not json at all {")
    rc, doc, _ = run(capsys, ["delta", str(garbled)])
    assert rc == 2 and doc["error"]["type"] == "JSONDecodeError"


def test_graph_roundtrip_through_cli(tmp_path, capsys):
    d = chain_dict()
    path = write(tmp_path, "g.json", d)
    rc, doc, _ = run(capsys, ["decompose", path])
    assert rc == 0
    # the graph parsed by the CLI serializes back to the same normal form
    g = Graph.from_json_dict(d)
    assert canonical_json(g.to_json_dict()) == canonical_json(
        Graph.from_json_dict(g.to_json_dict()).to_json_dict())


def test_selftest(capsys):
    rc, doc, _ = run(capsys, ["selftest"])
    assert rc == 0 and doc["ok"] is True
    assert {row["name"] for row in doc["suites"]} == {
        "orientation", "closure", "amalgam", "extension", "builder"}
    assert all(row["failed"] == 0 for row in doc["suites"])
    assert all(row["passed"] > 0 for row in doc["suites"])


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "g.json", k5_dict())
    proc = subprocess.run(
        [sys.executable, "-m", "abinitio.cli", "k0", path],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["in_k0"] is True
