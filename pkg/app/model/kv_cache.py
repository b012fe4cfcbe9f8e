# app/model/kv_cache.py
#
# Sliding-window key/value cache.
#
# Responsibilities:
# - Keep the keys and values of the C most recent tokens of one block in a
#   fixed-capacity ring buffer
# - Track the absolute index of the next token (total_tokens_seen) so
#   attention masks and rotary phases can be computed from positions
#
# Cached entries are plain arrays: gradients never flow into them.
#

import numpy as np

from app.errors import ConfigurationError, DimensionError


class KVCache:
    def __init__(self, capacity: int, key_size: int, value_size: int, dtype=np.float32):
        if capacity < 0:
            raise ConfigurationError(f"KV cache capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self.key_size = key_size
        self.value_size = value_size
        self.keys = np.zeros((capacity, key_size), dtype=dtype)
        self.values = np.zeros((capacity, value_size), dtype=dtype)
        self.cursor = 0
        self.total_tokens_seen = 0

    @property
    def size(self) -> int:
        # Number of valid entries
        return min(self.total_tokens_seen, self.capacity)

    def append(self, keys: np.ndarray, values: np.ndarray) -> None:
        #
        # Write the keys/values of the next tokens, overwriting the oldest.
        #
        # Raises:
        #     DimensionError: If row counts or widths disagree with the cache
        #
        keys = np.asarray(keys)
        values = np.asarray(values)
        if keys.ndim != 2 or keys.shape[1] != self.key_size:
            raise DimensionError(f"KVCache.append: keys {keys.shape}, expected [n, {self.key_size}]")
        if values.shape != (keys.shape[0], self.value_size):
            raise DimensionError(
                f"KVCache.append: values {values.shape}, expected [{keys.shape[0]}, {self.value_size}]"
            )

        count = keys.shape[0]
        if self.capacity > 0 and count > 0:
            kept = min(count, self.capacity)
            first = self.cursor + count - kept
            slots = (first + np.arange(kept)) % self.capacity
            self.keys[slots] = keys[count - kept :]
            self.values[slots] = values[count - kept :]
            self.cursor = (self.cursor + count) % self.capacity
        self.total_tokens_seen += count

    def ordered(self) -> tuple[np.ndarray, np.ndarray]:
        # Valid entries, oldest first
        size = self.size
        if size < self.capacity:
            return self.keys[:size].copy(), self.values[:size].copy()
        slots = (self.cursor + np.arange(self.capacity)) % self.capacity
        return self.keys[slots], self.values[slots]

    def positions(self) -> np.ndarray:
        # Absolute token indices of the valid entries, oldest first
        return np.arange(self.total_tokens_seen - self.size, self.total_tokens_seen)

    def reset(self) -> None:
        self.keys[:] = 0
        self.values[:] = 0
        self.cursor = 0
        self.total_tokens_seen = 0

    def __repr__(self) -> str:
        return f"KVCache(capacity={self.capacity}, size={self.size}, total_tokens_seen={self.total_tokens_seen})"


def kv_cache_floats(depth: int, key_size: int, window: int) -> int:
    #
    # Floats held by the key caches of a whole model (the value caches hold
    # depth * dv * C more).
    #
    # Example: kv_cache_floats(8, 128, 1024) == 1_048_576
    #
    if min(depth, key_size, window) < 0:
        raise ConfigurationError(f"kv_cache_floats needs non-negative sizes, got ({depth}, {key_size}, {window})")
    return depth * key_size * window
