import json
import math

import pytest

import memnet


def test_grid_shortest_path():
    net = memnet.generate_grid(11, 11)
    assert (net.node_count, net.edge_count) == (121, 220)
    final, res = memnet.solve_shortest_path(net, 55, 65, 6.0)
    assert res["hop_count"] == 10
    assert not res["degenerate"]
    best = memnet.dijkstra(final, 55, 65)
    assert sorted(res["on_edges"]) == sorted(best["edges"])
    assert res["trajectory"]["reached_steady"]


def test_solve_matches_dense_oracle():
    net = memnet.generate_grid(4, 5)
    a = memnet.solve_dc(net, 0, 19, 2.0)
    b = memnet.dense_solve(net, 0, 19, 2.0)
    for x, y in zip(a["edge_currents"], b["edge_currents"]):
        assert x == pytest.approx(y, rel=1e-9, abs=1e-15)
    assert a["relative_residual"] < 1e-9


def test_pulse_switches_lone_unit():
    net = memnet.Network()
    net.add_edge(net.add_node(0, 0), net.add_node(1, 0))
    final, traj = memnet.apply_pulse(net, 0, 1, 6.0)
    assert traj["status"] == "steady"
    assert final.unit_resistances()[0] == pytest.approx(200 / 21)
    assert net.unit_resistances()[0] == pytest.approx(100.0)


def test_entropy():
    assert memnet.current_entropy([0.2] * 7) == pytest.approx(math.log(7), abs=1e-12)
    assert memnet.current_entropy([0, 0.3, 0]) == 0.0
    with pytest.raises(memnet.ZeroCurrent):
        memnet.current_entropy([0.0, 0.0])


def test_errors_map_to_exceptions():
    net = memnet.generate_grid(3, 3)
    net.add_node(9, 9)
    with pytest.raises(memnet.DisconnectedTerminals):
        memnet.apply_pulse(net, 0, 9, 1.0)
    with pytest.raises(memnet.Error):
        memnet.DeviceParams(r_on=300.0)


def test_held_karp():
    d = [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]
    length, order = memnet.brute_force_tsp(d)
    assert length == pytest.approx(4.0)
    assert sorted(order) == [0, 1, 2, 3]


def test_run_scenario(tmp_path):
    cfg = {
        "network": {"kind": "grid", "rows": 5, "cols": 7},
        "terminals": {"input": 14, "output": 20},
        "amplitude": 6,
        "render": False,
    }
    code, summary = memnet.run_scenario(cfg, tmp_path)
    assert code == 0
    assert summary["matches_oracle"] is True
    assert json.loads((tmp_path / "summary.json").read_text()) == summary
    with pytest.raises(memnet.ConfigError):
        memnet.run_scenario({"bogus": 1}, tmp_path)
