#!/usr/bin/env python
# scripts/gradient_stop_ordering.py
# Stop gradient updates at 0, halfway, or never on a Split-blobs sequence
# and compare final average accuracy.
#
# Usage: PYTHONPATH=. python scripts/gradient_stop_ordering.py [data_seed]

import logging
import sys

from app.data import SequenceSpec, SplitSequence, gaussian_blob_dataset
from app.eval import gradient_stop_schedule, summarize
from app.model import ModelConfig, OnlineTransformer
from app.streams import TrainerConfig, train_sequence

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)8s] %(message)s")

data_seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0

model_config = ModelConfig(width=32, depth=2, key_size=16, window=256, num_classes=10, feature_dim=16)
spec = SequenceSpec(num_tasks=40, examples_per_task=250, ways=10, seed=data_seed)
source = SplitSequence(gaussian_blob_dataset(47, 16, 0.3, seed=data_seed), spec)
trainer = TrainerConfig(num_streams=4, chunk_size=25, alpha0=3e-2, total_examples=spec.length)

print("=" * 70)
print(f"GRADIENT STOP ORDERING - T={spec.length}, data seed {data_seed}")
print("=" * 70)

accuracy = {}
for label, stop in (("stop at 0", 0), ("stop at T/2", spec.length // 2), ("never stop", None)):
    hook = gradient_stop_schedule([stop]) if stop is not None else None
    log = train_sequence(OnlineTransformer(model_config, seed=0), source, trainer, hook=hook)
    accuracy[label] = summarize(log).average_accuracy
    print(f"{label:>12}: average accuracy {accuracy[label]:.4f}")

ordered = accuracy["stop at 0"] <= accuracy["stop at T/2"] <= accuracy["never stop"]
print("PASS" if ordered else "FAIL")
