"""Counter-based random streams keyed by (base_seed, stream, index).

Every trajectory owns an independent Philox stream, so results do not depend
on block size, thread count or execution order.
"""

import numpy as np

# Stream identifiers keep coupled and shot-noise reference draws apart.
TRAJECTORY_STREAM = 0
SHOT_NOISE_STREAM = 1


def stream_generator(base_seed: int, stream: int, index: int) -> np.random.Generator:
    """Generator for one (stream, index) pair under a base seed."""
    sequence = np.random.SeedSequence(entropy=base_seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(sequence))


def derived_seed(base_seed: int, *keys: int) -> int:
    """Child seed for a sweep point or a reference run."""
    sequence = np.random.SeedSequence([base_seed, *keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
