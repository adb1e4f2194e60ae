import math

import pytest

import gibbsgraph as gg

LINE = {"sides": [4.0], "boundary": "open"}
HARD = {"family": "hard_sphere", "r": 0.1}
ZERO = {"family": "zero"}


def test_zero_potential_graph_has_no_edges():
    g = gg.sample_graph(LINE, ZERO, 50, seed=3)
    assert g["n"] == 50
    assert g["edges"] == []
    assert len(g["points"]) == 50


def test_graph_is_reproducible():
    assert gg.sample_graph(LINE, HARD, 40, seed=9) == gg.sample_graph(LINE, HARD, 40, seed=9)


def test_partition_exact_small_graphs():
    k2 = {"n": 2, "edges": [[0, 1]]}
    assert gg.partition_exact(k2, 1.0) == 3.0
    assert gg.partition_exact(k2, 1.0, beta=1.0) == 4.0
    p3 = {"n": 3, "edges": [[0, 1], [1, 2]]}
    assert gg.occupation_ratio(p3, 1.0, 1) == pytest.approx(0.25)


def test_poisson_identity():
    inst = {"region": {"sides": [2.0]}, "potential": ZERO, "lambda": 1.0}
    r = gg.approximate_partition(inst, 0.1, seed=1, n=2000)
    assert r["value"] == pytest.approx((1 + 2 / 2000) ** 2000, rel=1e-12)
    assert abs(r["value"] - math.e**2) / math.e**2 < 0.01


def test_critical_fugacity_and_profiles():
    assert gg.critical_fugacity(3) == 4.0
    k3 = {"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}
    assert gg.weitz_layer_counts(k3, 0, 2, ordering="id")["counts"] == [1, 2, 1]
    assert gg.saw_layer_counts(k3, 0, 2)["counts"] == [1, 2, 2]


def test_temperedness_hard_sphere():
    assert gg.temperedness_constant(HARD, 1) == pytest.approx(0.4)


def test_sampler_output_lies_in_region():
    inst = {"region": LINE, "potential": HARD, "lambda": 1.0}
    s = gg.sample_configuration(inst, 0.2, seed=5, n=200)
    for p in s["points"]:
        assert 0.0 <= p[0] <= 4.0


def test_experiment_round_trip():
    spec = {"kind": "ssm", "paths": [{"n": 12, "root": 0}], "distances": [1, 2, 3]}
    out = gg.run_experiment(spec)
    assert out["passed"]
    again = gg.summarize(spec, out["rows"])
    assert again["passed"] == out["summary"]["passed"]
    assert again["graphs"] == out["summary"]["graphs"]


def test_bad_potential_is_a_value_error():
    with pytest.raises(ValueError):
        gg.sample_graph(LINE, {"family": "nope"}, 5, seed=0)
