"""
SIR-threshold decoding under Rayleigh fading
============================================

A receiver decodes a transmitter when its signal exceeds T times the sum of
all other received powers.  With T > 1 at most one transmitter can pass.
"""

# %%
import numpy as np

from twohop.channel import FadingField, connects, received_power, receive, rss, sir
from twohop.geometry import PathLossModel

model = PathLossModel(4.0)
fading = FadingField(seed=3)
tx = np.array([[0.0, 0.0], [3.0, 0.5], [-2.5, 2.0], [1.0, -4.0]])
rx = np.array([0.8, 0.1])

# %%
# Fading is a fixed function of (seed, slot, receiver kind, tx, rx).
for k in range(len(tx)):
    print(f"tx {k}: SIR {sir(k, rx, tx, fading, 0, model):8.3f}  "
          f"decodes at T=3: {connects(k, rx, tx, fading, 0, model, 3.0)}")

# %%
# The received signal strength seen by a decoding receiver is S + I.
winner = next(k for k in range(len(tx)) if connects(k, rx, tx, fading, 0, model, 3.0))
print(f"RSS at the receiver decoding tx {winner}: {rss(rx, winner, tx, fading, 0, model, 3.0):.4f}")

# %%
# Vectorised reception over many receivers: at most one decode each.
rng = np.random.default_rng(1)
rxs = rng.uniform(-5, 5, (1000, 2))
h = fading.rows(np.arange(len(tx)), len(rxs), slot=0)
rec = receive(received_power(tx, rxs, h, model), 3.0)
print(f"{rec.connected.mean():.1%} of receivers decode something; "
      f"decodes per transmitter: {np.bincount(rec.best[rec.connected], minlength=len(tx))}")
