#!/usr/bin/env python
# scripts/few_shot_emergence.py
# Desk-scale Split-blobs run: does in-context few-shot learning emerge,
# and does replay help?
#
# Usage: PYTHONPATH=. python scripts/few_shot_emergence.py [num_seeds]
# Takes minutes per run on one CPU core.

import logging
import sys

from app.data import SequenceSpec, SplitSequence, gaussian_blob_dataset
from app.eval import first_last_tasks, summarize
from app.model import ModelConfig, OnlineTransformer
from app.streams import TrainerConfig, train_sequence

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)8s] %(message)s")

num_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5

model_config = ModelConfig(
    variant="pi", width=64, depth=2, key_size=32, window=512, num_classes=10, feature_dim=32
)
spec = SequenceSpec(num_tasks=100, examples_per_task=500, ways=10)


def run(data_seed: int, num_streams: int):
    base = gaussian_blob_dataset(47, 32, 0.3, seed=data_seed)
    source = SplitSequence(base, spec.model_copy(update={"seed": data_seed}))
    trainer = TrainerConfig(num_streams=num_streams, chunk_size=50, alpha0=3e-2, total_examples=spec.length)
    log = train_sequence(OnlineTransformer(model_config, seed=0), source, trainer)
    return log


print("=" * 70)
print(f"FEW-SHOT EMERGENCE - {num_seeds} data seeds, E=8 vs E=1")
print("=" * 70)

emergence_votes = 0
replay_votes = 0
for seed in range(num_seeds):
    replay_log = run(seed, num_streams=8)
    first, last = first_last_tasks(replay_log, 20)
    plain = summarize(run(seed, num_streams=1)).average_accuracy
    replay = summarize(replay_log).average_accuracy
    emergence_votes += last - first >= 0.20
    replay_votes += replay > plain
    print(f"\nseed {seed}: tasks 1-20 {first:.3f} | tasks 81-100 {last:.3f} | E=8 {replay:.3f} | E=1 {plain:.3f}")

print("\n" + "=" * 70)
print(f"Later tasks >= 20 points better: {emergence_votes}/{num_seeds}")
print(f"Replay beats no replay:          {replay_votes}/{num_seeds}")
print("PASS" if 2 * emergence_votes > num_seeds and 2 * replay_votes > num_seeds else "FAIL")
