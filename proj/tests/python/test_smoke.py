import json

import pytest

import tnpath

RING6_EXTENTS = {c: 2 for c in "ijklmnop"}


def ring6():
    return tnpath.Network.from_einsum("im,ijp,jkn,klp,mno,lo->", RING6_EXTENTS)


def test_golden_path_cost():
    net = ring6()
    assert net.tensor_count == 6
    assert net.index_count == 8
    assert net.output == []
    r = tnpath.cost(net, [(0, 4), (6, 5), (1, 2), (8, 3), (7, 9)])
    assert (r["flops"], r["peak_size"], r["write_volume"]) == (104, 16, 41)


def test_optimizers_on_ring6():
    net = ring6()
    dfs = tnpath.exhaustive_dfs(net)
    bfs = tnpath.exhaustive_bfs(net, init="greedy")
    assert dfs["flops"] == bfs["flops"] == 100
    assert dfs["nodes_expanded"] >= dfs["prunes"]
    g = tnpath.greedy(net)
    assert g["flops"] >= 100
    assert len(g["ssa_path"]) == 5
    assert tnpath.cost(net, g["ssa_path"])["flops"] == g["flops"]
    p = tnpath.partition(net, cutoff=2, seed=3)
    assert tnpath.cost(net, p["ssa_path"])["flops"] == p["flops"]


def test_generate_and_json_round_trip():
    net = tnpath.generate(40, regularity=3.0, n_open=2, extent_min=2, extent_max=5, seed=7)
    text = net.to_json()
    assert tnpath.Network.from_json(text).to_json() == text
    doc = json.loads(text)
    assert len(doc["tensors"]) == 40
    assert len(doc["output"]) == 2
    assert text == tnpath.generate(40, 3.0, 2, 2, 5, 7).to_json()


def test_sampled_greedy():
    net = tnpath.generate(60, seed=2, extent_max=4)
    r = tnpath.sampled_greedy(net, temperature=1.0, samples=8, seed=5)
    assert len(r["sample_flops"]) == 8
    assert r["flops"] == min(r["sample_flops"])
    assert r["sample_flops"][0] == tnpath.greedy(net)["flops"]


def test_big_costs_are_python_ints():
    ext = {c: 1 << 60 for c in "abc"}
    net = tnpath.Network.from_einsum("ab,bc->ac", ext)
    r = tnpath.greedy(net)
    assert r["flops"] == 1 << 180
    assert isinstance(r["flops"], int)


def test_dot_export():
    net = ring6()
    dot = tnpath.export_dot(net, tnpath.greedy(net)["ssa_path"])
    assert dot.startswith("digraph")


def test_errors():
    with pytest.raises(tnpath.TnpathError):
        tnpath.Network.from_einsum("ii->", {"i": 2})
    with pytest.raises(ValueError):
        tnpath.Network.from_json("{")
    with pytest.raises(tnpath.TnpathError):
        tnpath.cost(ring6(), [(0, 1)])
    with pytest.raises(ValueError):
        tnpath.exhaustive_dfs(ring6(), init="clever")
    with pytest.raises(ValueError):
        tnpath.partition(ring6(), leaf="magic")
