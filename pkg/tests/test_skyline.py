import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sapsky.skyline import (
    Candidate, DominanceStats, brute_force_skyline, dominance_probability, dominates,
    global_aggregate, global_probabilities, local_filter, skyline_probability, write_skyline_csv,
)
from conftest import obj, random_window


def test_dominates_examples():
    assert dominates((1, 1, 1), (2, 2, 2))
    assert not dominates((1, 1, 1), (1, 1, 1))
    assert not dominates((1, 3), (2, 2)) and not dominates((2, 2), (1, 3))
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_dominance_antisymmetric(a, b):
    assert not (dominates(a, b) and dominates(b, a))


def test_dominance_probability_examples(pair_ab):
    a, b = pair_ab
    assert dominance_probability(obj(9, [[1, 1]]), obj(10, [[2, 2]])) == 1.0
    # only (1,1) < (2,2) contributes 0.5 * 1.0
    assert dominance_probability(a, b) == pytest.approx(0.5)
    # only (2,2) < (3,3) contributes 1.0 * 0.5
    assert dominance_probability(b, a) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        dominance_probability(obj(1, [[1, 1]]), obj(2, [[1, 1, 1]]))


def test_skyline_probability_examples(pair_ab):
    a, b = pair_ab
    assert skyline_probability(a, [a]) == 1.0
    assert skyline_probability(b, [a, b]) == pytest.approx(0.5)
    assert skyline_probability(obj(3, [[5, 5]]), [obj(4, [[0, 0]])]) == 0.0


def test_brute_force_examples(pair_ab):
    a, b = pair_ab
    assert brute_force_skyline([], 0.0) == []
    assert brute_force_skyline([a]) == [(1, 1.0)]
    res = brute_force_skyline([a, b], 0.5)
    assert [r[0] for r in res] == [1, 2]
    assert [r[1] for r in res] == pytest.approx([0.5, 0.5])


def test_filter_alpha_bounds():
    win = random_window(0, 30, 3, 3)
    assert len(local_filter(win, 0.0)) == 30
    exact = {oid: p for oid, p in brute_force_skyline(win)}
    top = {c.object.object_id for c in local_filter(win, 1.0)}
    assert top == {oid for oid, p in exact.items() if p == 1.0}
    with pytest.raises(ValueError):
        local_filter(win, 1.0 + 1e-9)


def test_filter_matches_oracle_on_fixed_window():
    win = random_window(1234, 40, 3, 3)
    oracle = dict(brute_force_skyline(win, 0.02))
    got = {c.object.object_id: c.local_probability for c in local_filter(win, 0.02)}
    assert got.keys() == oracle.keys()
    for k in got:
        assert got[k] == pytest.approx(oracle[k], abs=1e-12)


@given(seed=st.integers(0, 10**6), n=st.integers(0, 30), m=st.integers(1, 4), d=st.integers(1, 4),
       dist=st.sampled_from(["independent", "correlated", "anti_correlated"]),
       alpha=st.sampled_from([0.0, 0.02, 0.1, 0.5, 0.9, 1.0]))
@settings(max_examples=60, deadline=None)
def test_filter_membership_equals_oracle(seed, n, m, d, dist, alpha):
    win = random_window(seed, n, m, d, dist, spread=0.1)
    oracle = {oid for oid, _ in brute_force_skyline(win, alpha)}
    got = {c.object.object_id for c in local_filter(win, alpha)}
    assert got == oracle


def test_full_scan_count_closed_form():
    n, m = 60, 3
    win = random_window(2, n, m, 3)
    stats = DominanceStats()
    local_filter(win, 0.0, stats)
    assert stats.instance_pair_comparisons == n * (n - 1) * m * m
    assert stats.objects_scanned == n and stats.candidates_emitted == n


def test_termination_only_removes_work():
    win = random_window(3, 80, 3, 3, "anti_correlated")
    full, cut = DominanceStats(), DominanceStats()
    local_filter(win, 0.0, full)
    local_filter(win, 0.5, cut)
    assert cut.instance_pair_comparisons <= full.instance_pair_comparisons
    assert cut.candidates_emitted <= cut.objects_scanned


def test_candidates_carry_exact_probability():
    win = random_window(4, 50, 4, 2, "anti_correlated", spread=0.1)
    for c in local_filter(win, 0.1):
        assert c.local_probability >= 0.1
        assert c.local_probability == pytest.approx(skyline_probability(c.object, win), abs=1e-12)


def test_targets_restrict_evaluation():
    win = random_window(5, 30, 3, 3)
    full = {c.object.object_id for c in local_filter(win, 0.1)}
    stats = DominanceStats()
    some = {c.object.object_id for c in local_filter(win, 0.1, stats, targets=[25, 26, 27, 28, 29])}
    assert some == full & {w.object_id for w in win[25:]}
    assert stats.objects_scanned == 5


def test_monotonicity_over_subsets():
    rng = np.random.default_rng(0)
    for trial in range(100):
        win = random_window(trial, int(rng.integers(2, 25)), 3, 2, "anti_correlated", spread=0.1)
        u = win[int(rng.integers(len(win)))]
        sub = [v for v in win if v is u or rng.random() < 0.5]
        assert skyline_probability(u, sub) >= skyline_probability(u, win) - 1e-12


def test_global_single_node_returns_local_probabilities():
    win = random_window(6, 25, 3, 3)
    cands = local_filter(win, 0.02)
    res = global_aggregate([cands], 0.02)
    assert res == [(c.object.object_id, c.local_probability) for c in cands]
    # with one node the window is the whole dataset, so these are exact
    assert res == pytest.approx(brute_force_skyline(win, 0.02), abs=1e-12)


def test_global_dominating_node_eliminates_other():
    rng = np.random.default_rng(7)
    node1 = [obj(i, 0.6 + 0.3 * rng.random((2, 2)), node=1) for i in range(5)]
    node2 = [obj(10 + i, 0.1 + 0.3 * rng.random((2, 2)), node=2) for i in range(5)]
    c1 = local_filter(node1, 0.02)
    c2 = local_filter(node2, 0.02)
    assert c1 and c2
    ids = {oid for oid, _ in global_aggregate([c1, c2], 0.02)}
    assert ids and ids.isdisjoint({o.object_id for o in node1})


@pytest.mark.parametrize("seed", range(10))
def test_global_union_never_drops_true_members(seed):
    alpha = 0.1
    wins = [random_window(100 * seed + k, 20, 3, 2, "anti_correlated", spread=0.1, node=k + 1, first_id=100 * k)
            for k in range(3)]
    cands = [local_filter(w, alpha * 0.5) for w in wins]
    stats = DominanceStats()
    got = dict(global_aggregate(cands, alpha, stats))
    oracle = dict(brute_force_skyline([o for w in wins for o in w], alpha))
    assert oracle.keys() <= got.keys()
    sizes = [len(c) for c in cands]
    assert stats.instance_pair_comparisons == sum(s * (sum(sizes) - s) for s in sizes) * 9
    for oid, p in got.items():
        local = next(c.local_probability for cs in cands for c in cs if c.object.object_id == oid)
        assert p <= local + 1e-15
        if oid in oracle:
            assert p >= oracle[oid] - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_global_raw_objects_give_exact_union_skyline(seed):
    wins = [random_window(50 * seed + k, 15, 2, 3, "independent", spread=0.1, node=k + 1, first_id=100 * k)
            for k in range(3)]
    raw = [[Candidate(o, None) for o in w] for w in wins]
    got = global_aggregate(raw, 0.02)
    oracle = brute_force_skyline([o for w in wins for o in w], 0.02)
    assert [g[0] for g in got] == [o[0] for o in oracle]
    assert [g[1] for g in got] == pytest.approx([o[1] for o in oracle], abs=1e-12)


def test_global_stats_and_log_space():
    win = random_window(8, 1100, 1, 2, spread=0.0)
    stats = DominanceStats()
    res = global_aggregate([[Candidate(o, None) for o in win]], 0.0, stats)
    assert stats.instance_pair_comparisons == 1100 * 1099
    probs = np.array([p for _, p in res])
    assert np.all((probs >= 0) & (probs <= 1))
    # certain points: skyline probability is 1 for the exact skyline and 0 elsewhere
    assert set(np.unique(probs)) <= {0.0, 1.0}


def test_skyline_csv_sorted(tmp_path):
    path = tmp_path / "sky.csv"
    write_skyline_csv(path, [(1, 1, 0.2), (2, 3, 0.9), (3, 2, 0.5)])
    lines = path.read_text().splitlines()
    assert lines[0] == "object_id,node_id,probability"
    assert [l.split(",")[0] for l in lines[1:]] == ["2", "3", "1"]


@pytest.mark.parametrize("seed", range(6))
def test_cached_filter_matches_local_filter(seed):
    from sapsky.skyline import CachedWindowFilter
    from sapsky.window import SlidingWindow
    rng = np.random.default_rng(seed)
    stream = random_window(seed, 300, 3, 3, ["independent", "anti_correlated"][seed % 2], spread=0.08)
    win, cache = SlidingWindow(90), CachedWindowFilter()
    pos = 0
    while pos < len(stream):
        batch = stream[pos:pos + int(rng.integers(0, 6))]
        pos += max(len(batch), 1)
        evicted = sum(win.insert(o) is not None for o in batch)
        cache.update(batch, evicted)
        assert cache.objects == win.active_dataset()
        alpha = float(rng.choice([0.0, 0.02, 0.3, 0.9]))
        s1, s2 = DominanceStats(), DominanceStats()
        a = local_filter(win.active_dataset(), alpha, s1)
        b = cache.filter(alpha, s2)
        assert [c.object.object_id for c in a] == [c.object.object_id for c in b]
        assert [c.local_probability for c in a] == [c.local_probability for c in b]
        assert s1 == s2
