"""
Counter based random streams.

Events are generated in fixed size chunks. Chunk k draws from a Philox generator keyed by (seed, k) and always
draws a full chunk, so the randomness of event i depends only on the seed and i, never on how chunks are spread over
workers or on the total number of events.
"""

import numpy as np

CHUNK_SIZE = 16384


def chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent generator for one chunk of events."""
    assert seed >= 0, f"Seed must be non-negative, got {seed}"
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk_index, ))))


def chunk_bounds(n_events: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int, int]]:
    """(chunk index, first event, end event) for every chunk covering n_events."""
    assert chunk_size > 0, f"Chunk size must be positive, got {chunk_size}"
    return [(k, start, min(start + chunk_size, n_events)) for k, start in enumerate(range(0, n_events, chunk_size))]
