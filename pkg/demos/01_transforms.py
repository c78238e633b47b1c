"""Normalization and the log-score transform, on the shipped reference table.

Raw game scores live on wildly different scales (Pong tops out around 21,
Video Pinball in the hundreds of thousands). Normalization puts the random
policy at 0 and average human play at 100; the log transform then tames the
orders-of-magnitude spread that remains above 100.
"""
import numpy as np

from benchsel import fixtures
from benchsel.data import inverse_log_transform, log_transform

norms = fixtures.load_normalization()

print("reference scores for a few environments:")
for env in ("Battle Zone", "Pong", "Video Pinball", "Skiing"):
    e = norms.lookup(env)
    print(f"  {e.name:<14} random={e.random:>10.2f}   human={e.human:>10.2f}")

bz = norms.lookup("Battle Zone")
for raw in (bz.random, 18000.0, bz.human, 120000.0):
    z = (raw - bz.random) / (bz.human - bz.random) * 100.0
    print(f"Battle Zone raw {raw:>9.1f} -> normalized {z:>8.3f} "
          f"-> log {float(log_transform(z)):.4f}")

print("\nround trip is exact on the whole usable range:")
x = np.linspace(0, 5000, 7)
back = inverse_log_transform(log_transform(x))
for a, b in zip(x, back):
    print(f"  {a:>8.1f} -> phi -> phi_inv -> {b:>12.6f}")

print("\nnegative normalized scores (slightly worse than random) clip to 0:")
print(f"  phi(-5) = {float(log_transform(-5.0))}")
