import math

import pytest

cim = pytest.importorskip("cim_sim")


def test_evidence_mapping():
    op = cim.from_evidence(1, 1, 101, 0.5)
    assert op.u == pytest.approx(101 / 103)
    b, d = cim.project(op)
    assert b + d == pytest.approx(1.0)


def test_fusion_pools_evidence():
    x = cim.from_evidence(2, 1)
    y = cim.from_evidence(1, 3)
    fused = cim.fuse(x, y, 1.0)
    pooled = cim.from_evidence(3, 4)
    assert fused.b == pytest.approx(pooled.b)
    assert fused.u == pytest.approx(pooled.u)
    assert fused.u <= min(x.u, y.u)


def test_trust_and_dissonance():
    i = cim.Opinion(0.2, 0.1, 0.7)
    j = cim.Opinion(0.5, 0.4, 0.1)
    assert cim.trust("nom", i, j) == 1.0
    assert cim.trust("uom", i, j) == pytest.approx(0.3 * 0.9)
    assert 0.0 <= cim.dissonance(j) <= 1.0
    v = cim.vacuity_maximize(j)
    assert cim.project(v)[0] == pytest.approx(cim.project(j)[0])
    with pytest.raises(ValueError):
        cim.trust("xyz", i, j)


def test_simulate_is_deterministic():
    nodes, edges = cim.graph_size()
    assert (nodes, edges) == (1133, 5452)
    a = cim.simulate("bf", "random", model="uom", seed=3, rounds=5)
    b = cim.simulate("bf", "random", model="uom", seed=3, rounds=5)
    assert a == b
    assert len(a) == 10
    assert [s["party"] for s in a[:2]] == ["false", "true"]
    assert all(s["n_true"] + s["n_false"] == nodes for s in a)
    assert all(not math.isnan(s["reward"]) for s in a)


def test_experiment_and_report(tmp_path):
    cfg = tmp_path / "spec.cfg"
    cfg.write_text(
        "[experiment]\nschemes = drim-na\nopponents = cf\nruns = 2\n"
        "[episode]\nrounds = 4\n"
        f"[training]\nupdates = 1\nepisodes_per_update = 1\nepochs = 1\npolicy_dir = {tmp_path / 'pol'}\n"
    )
    rows = cim.run_experiment(str(cfg), str(tmp_path / "out"))
    assert len(rows) == 1
    assert rows[0]["scheme"] == "drim-na" and rows[0]["runs"] == 2
    with pytest.raises(RuntimeError, match="missing"):
        cim.report("table1", str(tmp_path / "out" / "results.csv"))
