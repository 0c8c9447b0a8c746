"""
Poisson deployments and path loss
=================================

Sources and relays are homogeneous Poisson point processes on a square
window.  Each source has a destination at distance R in a uniformly random
direction.  Only sources in the inner measurement region are scored.
"""

# %%
import numpy as np

from twohop.geometry import NetworkRealization, PathLossModel, Window, path_loss, sample_ppp

window = Window(half_width=15.0, guard_margin=5.0)
rng = np.random.default_rng(0)
sources = sample_ppp(0.1, window, rng)
relays = sample_ppp(1.0, window, rng)
print(f"{len(sources)} sources (mean {0.1 * window.area:.0f}), "
      f"{len(relays)} relays (mean {1.0 * window.area:.0f})")

# %%
# Counts are Poisson: mean and variance agree.
counts = np.array([len(sample_ppp(0.5, Window(10.0), rng)) for _ in range(2000)])
print(f"mean {counts.mean():.1f}, variance {counts.var(ddof=1):.1f}, expected 200")

# %%
# Destinations are placed at distance R; they may leave the window.
angles = rng.uniform(0, 2 * np.pi, len(sources))
real = NetworkRealization(sources, angles, relays, link_distance=1.0, fading_seed=7)
lengths = np.hypot(*(real.destinations - sources.points).T)
print("link lengths:", np.unique(np.round(lengths, 12)))
print("measured sources:", int(window.in_measurement_region(sources.points).sum()))

# %%
# The unbounded power law has infinite gain at zero distance; the capped
# variant saturates at 1.
d = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
print("d^-4           ", path_loss(PathLossModel(4.0), d))
print("min(1, d^-4)   ", path_loss(PathLossModel(4.0, bounded=True), d))
