"""Planar geometry, Poisson point sampling and path loss.

Points are handled as ``(n, 2)`` float arrays throughout; :class:`Point2`
exists for the scalar helpers and for readability at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class ParameterError(ValueError):
    """A model or configuration parameter is outside its domain."""


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Window:
    """Square observation window ``[-L, L]^2`` with an inner measurement region.

    Only sources inside ``[-L + m, L - m]^2`` are counted by the simulator;
    the guard band of width ``m`` keeps them away from the window edge.
    """

    half_width: float
    guard_margin: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise ParameterError(f"half_width must be positive, got {self.half_width}")
        if self.guard_margin is None:
            object.__setattr__(self, "guard_margin", self.half_width / 3.0)
        m = self.guard_margin
        if not (0 <= m < self.half_width):
            raise ParameterError(
                f"guard_margin must satisfy 0 <= m < L, got m={m}, L={self.half_width}"
            )

    @property
    def area(self) -> float:
        return (2.0 * self.half_width) ** 2

    @property
    def inner_half_width(self) -> float:
        return self.half_width - self.guard_margin

    @property
    def inner_area(self) -> float:
        return (2.0 * self.inner_half_width) ** 2

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(np.abs(p) <= self.half_width, axis=1)

    def in_measurement_region(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        return np.all(np.abs(p) <= self.inner_half_width, axis=1)


@dataclass(frozen=True)
class PathLossModel:
    """Power-law path loss ``g(d) = d**-alpha``, optionally capped at unit gain.

    ``alpha > 2`` is required so that the mean interference of a planar
    Poisson field is finite.
    """

    alpha: float = 4.0
    bounded: bool = False

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= 2:
            raise ParameterError(f"path-loss exponent must exceed 2, got {self.alpha}")

    def gain(self, distance):
        return path_loss(self, distance)

    def inverse(self, gain):
        """Smallest distance at which the gain drops to ``gain`` (``gain`` in (0, inf))."""
        gain = np.asarray(gain, dtype=float)
        d = gain ** (-1.0 / self.alpha)
        if self.bounded:
            d = np.where(gain >= 1.0, 0.0, d)
        return d


def path_loss(model: PathLossModel, distance):
    """Evaluate the path-loss gain at ``distance`` (scalar or array).

    An unbounded model returns ``inf`` at distance zero: a transmitter on
    top of its receiver always decodes.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ParameterError("distance must be non-negative")
    with np.errstate(divide="ignore"):
        g = d ** (-model.alpha)
    if model.bounded:
        g = np.minimum(1.0, g)
    return g if g.ndim else float(g)


@dataclass(frozen=True, eq=False)
class PppSample:
    points: np.ndarray
    intensity: float
    window: Window

    def __len__(self):
        return len(self.points)


def sample_ppp(intensity: float, window: Window, rng) -> PppSample:
    """Draw a homogeneous Poisson point process on ``window``.

    ``rng`` is a :class:`numpy.random.Generator` or anything accepted by
    :func:`numpy.random.default_rng` (an int seed, a SeedSequence).
    """
    if not np.isfinite(intensity) or intensity < 0:
        raise ParameterError(f"intensity must be non-negative, got {intensity}")
    rng = np.random.default_rng(rng)
    n = rng.poisson(intensity * window.area)
    L = window.half_width
    pts = rng.uniform(-L, L, size=(n, 2))
    return PppSample(pts, float(intensity), window)


def destination_of(source, R: float, angle):
    """Point at distance ``R`` from ``source`` in direction ``angle``.

    Vectorised: ``source`` may be ``(n, 2)`` with ``angle`` of shape ``(n,)``.
    """
    if R <= 0:
        raise ParameterError(f"link distance must be positive, got {R}")
    src = np.asarray(source, dtype=float)
    angle = np.asarray(angle, dtype=float)
    offset = R * np.stack([np.cos(angle), np.sin(angle)], axis=-1)
    out = src + offset
    if out.ndim == 1:
        return Point2(float(out[0]), float(out[1]))
    return out


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """One deployment: sources, destination directions and the relay field."""

    sources: PppSample
    dest_angles: np.ndarray
    relays: PppSample
    link_distance: float
    fading_seed: int = 0
    destinations: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.dest_angles) != len(self.sources):
            raise ParameterError("need exactly one destination angle per source")
        dest = destination_of(self.sources.points.reshape(-1, 2), self.link_distance,
                              np.asarray(self.dest_angles, dtype=float).reshape(-1))
        object.__setattr__(self, "destinations", np.asarray(dest).reshape(-1, 2))

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_relays(self) -> int:
        return len(self.relays)
