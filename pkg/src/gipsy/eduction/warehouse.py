"""The intensional value warehouse: an LRU memo keyed by (identifier, context)."""

from __future__ import annotations

import threading
from collections import OrderedDict

MISS = object()


class Warehouse:
    """Thread-safe LRU cache.

    ``capacity`` None means unbounded, 0 disables storage entirely. Eviction
    happens on ``gc``, which ``put`` runs whenever the capacity is exceeded.
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self._entries: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.puts = 0
        self.evictions = 0

    def get(self, key):
        with self._lock:
            try:
                value = self._entries[key]
            except KeyError:
                self.misses += 1
                return MISS
            self._entries.move_to_end(key)
            self.hits += 1
            return value

    def put(self, key, value) -> None:
        if self.capacity == 0:
            return
        with self._lock:
            if key in self._entries:
                # first completed result wins
                self._entries.move_to_end(key)
                return
            self._entries[key] = value
            self.puts += 1
            if self.capacity is not None and len(self._entries) > self.capacity:
                self._evict()

    def _evict(self) -> int:
        n = 0
        while self.capacity is not None and len(self._entries) > self.capacity:
            self._entries.popitem(last=False)
            n += 1
        self.evictions += n
        return n

    def gc(self) -> int:
        with self._lock:
            return self._evict()

    def clear(self) -> int:
        with self._lock:
            n = len(self._entries)
            self._entries.clear()
            self.evictions += n
            return n

    def __contains__(self, key) -> bool:
        with self._lock:
            return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def keys(self) -> list:
        with self._lock:
            return list(self._entries)

    def snapshot(self) -> dict:
        with self._lock:
            return dict(self._entries)

    def counters(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "puts": self.puts,
                "evictions": self.evictions, "size": len(self._entries)}


def gc(wh: Warehouse) -> int:
    return wh.gc()
