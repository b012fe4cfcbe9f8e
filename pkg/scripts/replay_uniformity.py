#!/usr/bin/env python
# scripts/replay_uniformity.py
# Monte-Carlo check that stochastic resets replay positions ~uniformly
#
# Usage: PYTHONPATH=. python scripts/replay_uniformity.py [T] [S] [trials]

import sys

from app.streams import replay_total_variation, simulate_replay_positions

total = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
chunk = int(sys.argv[2]) if len(sys.argv) > 2 else 10
trials = int(sys.argv[3]) if len(sys.argv) > 3 else 20000

print("=" * 70)
print(f"REPLAY UNIFORMITY - T={total}, S={chunk}, trials={trials}")
print("=" * 70)

counts = simulate_replay_positions(total, chunk, trials, seed=0)
support = chunk * ((total - 1) // chunk)
distance = replay_total_variation(counts, support)

print(f"Replayed positions counted: {int(counts.sum())}")
print(f"Support of the final replay chunk: [0, {support})")
print(f"Total-variation distance to uniform (10 bins): {distance:.4%}")
print("PASS" if distance < 0.02 else "FAIL")
