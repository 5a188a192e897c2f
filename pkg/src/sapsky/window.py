"""Count-based FIFO sliding window kept by every edge node."""
from __future__ import annotations

from collections import deque


class OrderingError(ValueError):
    """Raised when an object arrives out of (arrival_step, object_id) order."""


class SlidingWindow:
    def __init__(self, capacity: int, node_id: int = 1):
        if capacity < 1:
            raise ValueError("window capacity must be positive")
        self.capacity = capacity
        self.node_id = node_id
        self._items = deque()

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def insert(self, obj):
        """Append ``obj``; return the evicted oldest object when the window was full."""
        if self._items:
            last = self._items[-1]
            if (obj.arrival_step, obj.object_id) <= (last.arrival_step, last.object_id):
                raise OrderingError(
                    f"object {obj.object_id}@{obj.arrival_step} arrives after "
                    f"{last.object_id}@{last.arrival_step}")
        evicted = self._items.popleft() if len(self._items) >= self.capacity else None
        self._items.append(obj)
        return evicted

    def active_dataset(self) -> list:
        return list(self._items)

    def clear(self):
        self._items.clear()
