import pytest
from hypothesis import given, strategies as st

from sapsky.window import OrderingError, SlidingWindow
from conftest import obj


def test_fifo_eviction():
    w = SlidingWindow(2)
    a, b, c = obj(1, [0.1]), obj(2, [0.2]), obj(3, [0.3])
    assert w.insert(a) is None
    assert w.insert(b) is None
    assert w.insert(c) is a
    assert w.active_dataset() == [b, c]


def test_capacity_500_saturates():
    w = SlidingWindow(500)
    objs = [obj(i, [0.5]) for i in range(501)]
    assert all(w.insert(o) is None for o in objs[:500])
    assert w.insert(objs[500]) is objs[0]
    assert len(w.active_dataset()) == 500


def test_fresh_and_partial():
    w = SlidingWindow(10)
    assert w.active_dataset() == []
    for i in range(4):
        w.insert(obj(i, [0.5]))
    assert len(w.active_dataset()) == 4


def test_out_of_order_rejected():
    w = SlidingWindow(3)
    w.insert(obj(5, [0.5], step=2))
    with pytest.raises(OrderingError):
        w.insert(obj(6, [0.5], step=1))
    # same step, lower id is also out of order
    with pytest.raises(OrderingError):
        w.insert(obj(4, [0.5], step=2))
    w.insert(obj(7, [0.5], step=2))


@given(cap=st.integers(1, 20), k=st.integers(0, 60))
def test_contents_are_last_k(cap, k):
    w = SlidingWindow(cap)
    objs = [obj(i, [0.5]) for i in range(k)]
    for o in objs:
        w.insert(o)
        assert len(w) <= cap
    assert w.active_dataset() == objs[-cap:] if k else w.active_dataset() == []
