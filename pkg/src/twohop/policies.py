"""Decentralised relay selection for the second hop.

Each relay that decoded a source in the first slot decides on its own
whether to forward.  All rules act element-wise on aligned arrays (one
entry per decoding relay), so the decision of a relay never depends on
another source's cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import FadingField, RX_RELAY, received_power, receive
from .geometry import NetworkRealization, ParameterError, PathLossModel, PppSample


class SelectionPolicy:
    """Base class; subclasses implement :meth:`keep`."""

    name = "policy"
    analytic = True

    def keep(self, sources, dests, relays, rss, uniforms, T, R) -> np.ndarray:
        raise NotImplementedError

    @property
    def parameter(self):
        return None


@dataclass(frozen=True)
class AllTransmit(SelectionPolicy):
    name = "all"

    def keep(self, sources, dests, relays, rss, uniforms, T, R):
        return np.ones(len(np.asarray(rss)), dtype=bool)


@dataclass(frozen=True)
class RssThinning(SelectionPolicy):
    """Forward with probability ``exp(-delta * RSS / (1 + T))``."""

    delta: float
    name = "rss"

    def __post_init__(self):
        if not self.delta >= 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")

    @property
    def parameter(self):
        return self.delta

    def keep(self, sources, dests, relays, rss, uniforms, T, R):
        return np.asarray(uniforms) < np.exp(-self.delta * np.asarray(rss) / (1.0 + T))


@dataclass(frozen=True)
class Sectorized(SelectionPolicy):
    """Forward iff the angle at the source between relay and destination is below ``theta``.

    ``theta`` is a half-angle: the sector spans ``2 * theta`` around the
    source-destination ray.
    """

    theta: float
    name = "sector"

    def __post_init__(self):
        if not 0 <= self.theta <= math.pi:
            raise ParameterError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def parameter(self):
        return self.theta

    def keep(self, sources, dests, relays, rss, uniforms, T, R):
        return sector_angle(sources, relays, dests) < self.theta


@dataclass(frozen=True)
class DistanceThinning(SelectionPolicy):
    """Forward with probability ``exp(-2 * epsilon * |relay - dest| / R)``."""

    epsilon: float
    name = "distance"

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")

    @property
    def parameter(self):
        return self.epsilon

    def keep(self, sources, dests, relays, rss, uniforms, T, R):
        d = np.hypot(*(np.asarray(relays) - np.asarray(dests)).reshape(-1, 2).T)
        return np.asarray(uniforms) < np.exp(-2.0 * self.epsilon * d / R)


@dataclass(frozen=True)
class CenterBaseline(SelectionPolicy):
    """One relay per pair at the midpoint; it forwards iff it decoded its own source.

    Only meaningful on a realization built by
    :func:`center_baseline_realization`, where relay ``i`` serves source ``i``.
    """

    name = "center"
    analytic = False

    def keep(self, sources, dests, relays, rss, uniforms, T, R):
        # the simulator masks by assignment; every decoded own-source relay forwards
        return np.ones(len(np.asarray(rss)), dtype=bool)


POLICIES = {
    "all": AllTransmit,
    "rss": RssThinning,
    "sector": Sectorized,
    "distance": DistanceThinning,
    "center": CenterBaseline,
}
# method numbers used in the literature on this scheme
METHOD_NUMBERS = {1: "all", 2: "rss", 3: "sector", 4: "distance"}


def make_policy(name, parameter=None) -> SelectionPolicy:
    """Build a policy from its short name (or method number) and parameter."""
    name = METHOD_NUMBERS.get(name, name)
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ParameterError(f"unknown policy {name!r}; expected one of {sorted(POLICIES)}")
    if cls in (AllTransmit, CenterBaseline):
        return cls()
    if parameter is None:
        raise ParameterError(f"policy {name!r} needs a parameter")
    return cls(float(parameter))


def sector_angle(sources, relays, dests) -> np.ndarray:
    """Unsigned angle in ``[0, pi]`` at the source between relay and destination."""
    s = np.asarray(sources, dtype=float).reshape(-1, 2)
    u = np.asarray(relays, dtype=float).reshape(-1, 2) - s
    v = np.asarray(dests, dtype=float).reshape(-1, 2) - s
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
    return np.arctan2(np.abs(cross), dot)


class DecodeRecord(NamedTuple):
    relay: int
    source: int
    relay_point: tuple
    rss_value: float
    uniform: float


@dataclass(frozen=True, eq=False)
class DecodeTable:
    """First-slot decoding results, one row per relay that decoded some source.

    Arrays are aligned: ``relay[k]`` decoded ``source[k]`` with received
    strength ``rss[k]`` and carries thinning uniform ``uniform[k]``.
    """

    relay: np.ndarray
    source: np.ndarray
    rss: np.ndarray
    uniform: np.ndarray
    relay_points: np.ndarray
    n_connected: np.ndarray  # per relay (all relays), number of decodable sources

    def records(self) -> dict[int, list[DecodeRecord]]:
        out: dict[int, list[DecodeRecord]] = {}
        for k in range(len(self.relay)):
            out.setdefault(int(self.source[k]), []).append(DecodeRecord(
                int(self.relay[k]), int(self.source[k]), tuple(self.relay_points[k]),
                float(self.rss[k]), float(self.uniform[k])))
        return out


def count_connected(power: np.ndarray, T: float) -> np.ndarray:
    """Number of transmitters exceeding the SIR threshold at each receiver (brute force)."""
    if power.shape[0] == 0:
        return np.zeros(power.shape[1], dtype=int)
    total = power.sum(axis=0)
    with np.errstate(invalid="ignore"):
        return np.sum(power > T * (total[None, :] - power), axis=0)


def decode_table(realization: NetworkRealization, fading: FadingField, T: float,
                 model: PathLossModel, uniforms=None) -> DecodeTable:
    """Relays decoding each source in slot 0, with every source transmitting."""
    src = realization.sources.points
    rel = realization.relays.points
    n_s, n_r = len(src), len(rel)
    if uniforms is None:
        uniforms = np.zeros(n_r)
    h = fading.rows(np.arange(n_s), n_r, slot=0, rx_kind=RX_RELAY)
    power = received_power(src, rel, h, model)
    rec = receive(power, T)
    ok = np.flatnonzero(rec.connected)
    return DecodeTable(
        relay=ok,
        source=rec.best[ok],
        rss=rec.rss[ok],
        uniform=np.asarray(uniforms, dtype=float)[ok],
        relay_points=rel[ok],
        n_connected=count_connected(power, T),
    )


def decode_sets(realization, fading, T, model, uniforms=None) -> dict[int, list[DecodeRecord]]:
    """Map source index to the relays that decoded it (sources without relays omitted)."""
    return decode_table(realization, fading, T, model, uniforms).records()


def select(policy: SelectionPolicy, source, dest, records, T, R) -> list[DecodeRecord]:
    """Apply ``policy`` to one source's decode records."""
    if not records:
        return []
    n = len(records)
    relays = np.array([r.relay_point for r in records], dtype=float).reshape(n, 2)
    rss = np.array([r.rss_value for r in records])
    u = np.array([r.uniform for r in records])
    src = np.broadcast_to(np.asarray(source, dtype=float), (n, 2))
    dst = np.broadcast_to(np.asarray(dest, dtype=float), (n, 2))
    mask = policy.keep(src, dst, relays, rss, u, T, R)
    return [r for r, m in zip(records, mask) if m]


def center_baseline_realization(realization: NetworkRealization) -> NetworkRealization:
    """Replace the relay field with one relay at each source-destination midpoint."""
    mid = 0.5 * (realization.sources.points + realization.destinations)
    relays = PppSample(mid.reshape(-1, 2), realization.sources.intensity,
                       realization.sources.window)
    return NetworkRealization(realization.sources, realization.dest_angles, relays,
                              realization.link_distance, realization.fading_seed)
