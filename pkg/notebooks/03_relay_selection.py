"""
Decentralised relay selection
=============================

Every relay that decoded a source in the first slot decides alone whether
to forward.  Four rules are available plus a midpoint-relay baseline:
all relays forward; thinning by received strength; a sector around the
destination direction; thinning by distance to the destination.
"""

# %%
import math

import numpy as np

from twohop.channel import FadingField
from twohop.policies import (AllTransmit, CenterBaseline, DistanceThinning, RssThinning,
                             Sectorized, decode_sets, select)
from twohop.simulation import SimulationConfig, sample_realization

cfg = SimulationConfig(lambda_s=0.1, lambda_r=2.0, R=1.0, half_width=10.0)
real, uniforms = sample_realization(cfg, trial=0)
sets = decode_sets(real, FadingField(real.fading_seed), cfg.T, cfg.model, uniforms)
source = max(sets, key=lambda s: len(sets[s]))
records = sets[source]
src, dst = real.sources.points[source], real.destinations[source]
print(f"source {source} was decoded by {len(records)} relays")

# %%
# Forwarding sets under each rule.  Thinning uniforms belong to the relay, so
# sweeps over a parameter give nested sets.
for policy in (AllTransmit(), RssThinning(0.05), Sectorized(math.pi / 4),
               DistanceThinning(1.0)):
    kept = select(policy, src, dst, records, cfg.T, cfg.R)
    print(f"{policy.name:8s} keeps {len(kept):2d}: {[r.relay for r in kept]}")

# %%
for theta in (0.0, math.pi / 8, math.pi / 4, math.pi / 2, math.pi):
    n = len(select(Sectorized(theta), src, dst, records, cfg.T, cfg.R))
    print(f"theta = {theta:5.3f}: {n} relays")

# %%
# The baseline replaces the relay field by one relay per pair at the midpoint.
print(CenterBaseline().name, "is simulation-only:", not CenterBaseline().analytic)
