# app/streams/replay.py
#
# Stochastic replay resets.
#
# A replay stream restarts from position 0 with probability min(1, S/t)
# at the start of every turn, t being the reporting stream's position.
# Resetting this way makes the replayed position approximately uniform
# over everything seen so far without storing examples.
#

import numpy as np

from app.errors import ConfigurationError


def reset_probability(lead_position: int, chunk_size: int) -> float:
    if lead_position <= 0:
        return 1.0
    return min(1.0, chunk_size / lead_position)


def replay_chunk_length(replay_position: int, lead_position: int, chunk_size: int) -> int:
    # Replay never reads past what the reporting stream has consumed
    return max(0, min(chunk_size, lead_position - replay_position))


def simulate_replay_positions(total_examples: int, chunk_size: int, trials: int, seed: int = 0) -> np.ndarray:
    #
    # Model-free Monte-Carlo of one replay stream.
    #
    # Runs the trainer's turn schedule and reset rule for `trials`
    # independent replay streams and counts, per position, how often it was
    # read in the final turn's replay chunk.
    #
    # Returns:
    #     Integer counts of shape [total_examples]
    #
    if total_examples < 1 or chunk_size < 1 or trials < 1:
        raise ConfigurationError(
            f"simulation needs positive sizes, got T={total_examples}, S={chunk_size}, trials={trials}"
        )
    rng = np.random.default_rng(seed)
    positions = np.zeros(trials, dtype=np.int64)
    lengths = np.zeros(trials, dtype=np.int64)
    for start in range(0, total_examples, chunk_size):
        lead_end = min(start + chunk_size, total_examples)
        resets = rng.random(trials) < reset_probability(start, chunk_size)
        positions[resets] = 0
        lengths = np.minimum(chunk_size, lead_end - positions)
        stalled = lengths <= 0
        positions[stalled] = 0
        lengths[stalled] = min(chunk_size, lead_end)
        if lead_end < total_examples:
            positions += lengths

    counts = np.zeros(total_examples, dtype=np.int64)
    offsets = np.arange(chunk_size)
    read = positions[:, None] + offsets[None, :]
    valid = offsets[None, :] < lengths[:, None]
    np.add.at(counts, read[valid], 1)
    return counts


def replay_total_variation(counts, support: int, num_bins: int = 10) -> float:
    #
    # Total-variation distance between binned replay counts and the uniform
    # distribution over positions [0, support).
    #
    # Mass at positions >= support counts entirely as deviation.
    #
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        raise ConfigurationError("no replayed positions to compare")
    bins = np.array_split(np.arange(support), num_bins)
    observed = np.array([counts[b].sum() for b in bins]) / total
    expected = np.array([len(b) for b in bins]) / support
    outside = counts[support:].sum() / total
    return 0.5 * (np.abs(observed - expected).sum() + outside)
