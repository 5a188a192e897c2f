import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sapsky.data_gen import (
    Instance, StreamConfig, UncertainObject, arrivals_at_step, generate_object, generate_step,
    read_objects_csv, sample_centers, step_rng, write_objects_csv,
)


def test_default_object_shape_and_uniform_mass():
    cfg = StreamConfig(m=3, d=3)
    o = generate_object(np.random.default_rng(1), cfg, 7, 2, 5)
    assert o.values.shape == (3, 3)
    np.testing.assert_array_equal(o.probs, np.full(3, 1 / 3))
    assert (o.object_id, o.node_id, o.arrival_step) == (7, 2, 5)
    assert len(o.instances) == 3 and all(len(i.values) == 3 for i in o.instances)


def test_degenerate_certain_object_sits_on_center():
    cfg = StreamConfig(m=1, d=1, instance_spread=0.0)
    rng_a, rng_b = np.random.default_rng(3), np.random.default_rng(3)
    o = generate_object(rng_a, cfg, 0, 1, 0)
    center = sample_centers(rng_b, cfg, 1)[0]
    assert o.probs.tolist() == [1.0]
    assert o.values[0, 0] == center[0]


def test_same_seed_is_bit_identical():
    cfg = StreamConfig(m=4, d=5, distribution="anti_correlated")
    a = generate_object(np.random.default_rng(11), cfg, 1, 1, 0)
    b = generate_object(np.random.default_rng(11), cfg, 1, 1, 0)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.probs.tobytes() == b.probs.tobytes()


@pytest.mark.parametrize("dist", ["independent", "correlated", "anti_correlated"])
@given(seed=st.integers(0, 2**31), m=st.integers(1, 9), d=st.integers(1, 9), rnd=st.booleans())
@settings(max_examples=30, deadline=None)
def test_mass_and_range_invariants(dist, seed, m, d, rnd):
    cfg = StreamConfig(distribution=dist, m=m, d=d, random_instance_probs=rnd, instance_spread=0.2)
    o = generate_object(np.random.default_rng(seed), cfg, 0, 1, 0)
    assert o.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all((o.values >= 0) & (o.values <= 1))


def test_ghost_mass_leaves_probability_missing():
    cfg = StreamConfig(ghost_mass=0.25)
    o = generate_object(np.random.default_rng(0), cfg, 0, 1, 0)
    assert o.probs.sum() == pytest.approx(0.75)


def test_object_rejects_excess_mass_and_bad_instances():
    with pytest.raises(ValueError):
        UncertainObject(0, 1, 0, [[0.1], [0.2]], [0.7, 0.7])
    with pytest.raises(ValueError):
        Instance((0.1,), 0.0)
    with pytest.raises(ValueError):
        StreamConfig(m=0)
    with pytest.raises(ValueError):
        StreamConfig(lam=0)


@pytest.mark.parametrize("dist,lo,hi", [
    ("anti_correlated", -1.0, -0.5),
    ("correlated", 0.5, 1.0),
    ("independent", -0.1, 0.1),
])
def test_center_correlation_by_family(dist, lo, hi):
    cfg = StreamConfig(distribution=dist, d=2)
    c = sample_centers(np.random.default_rng(5), cfg, 20_000)
    r = np.corrcoef(c[:, 0], c[:, 1])[0, 1]
    assert lo < r < hi


def test_poisson_arrival_moments():
    cfg = StreamConfig(lam=4.0)
    counts = np.array([arrivals_at_step(step_rng(0, 1, t), cfg, t) for t in range(100_000)])
    assert 3.96 <= counts.mean() <= 4.04
    assert 3.8 <= counts.var() <= 4.2


def test_vanishing_rate_gives_no_arrivals():
    cfg = StreamConfig(lam=1e-9)
    assert sum(arrivals_at_step(step_rng(0, 1, t), cfg, t) for t in range(1000)) == 0


def test_step_batches_are_reproducible_and_limited():
    cfg = StreamConfig(lam=5.0, seed=9)
    a = generate_step(cfg, 2, 17, 100)
    b = generate_step(cfg, 2, 17, 100)
    assert [o.values.tobytes() for o in a] == [o.values.tobytes() for o in b]
    assert [o.object_id for o in a] == list(range(100, 100 + len(a)))
    assert len(generate_step(cfg, 2, 17, 100, limit=1)) == min(1, len(a))


def test_csv_round_trip(tmp_path):
    cfg = StreamConfig(m=2, d=3)
    rng = np.random.default_rng(0)
    objs = [generate_object(rng, cfg, i, 1, i) for i in range(4)]
    path = tmp_path / "objs.csv"
    write_objects_csv(path, objs)
    header = path.read_text().splitlines()[0]
    assert header == "object_id,node_id,arrival_step,instance_index,prob,v1,v2,v3"
    back = read_objects_csv(path)
    for o, r in zip(objs, back):
        np.testing.assert_array_equal(o.values, r.values)
        np.testing.assert_array_equal(o.probs, r.probs)
