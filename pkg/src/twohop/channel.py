"""Rayleigh fading, interference and SIR-threshold decoding.

The model is interference limited (no thermal noise).  Every coefficient of
a :class:`FadingField` is a unit-mean exponential power gain fixed by
``(seed, slot, receiver kind, transmitter id, receiver id)``, so the same
link sees the same fading no matter which other nodes are active.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import PathLossModel, path_loss


class ContractViolation(ValueError):
    """An operation was called outside its documented precondition."""


# receiver kinds used as stream indices
RX_RELAY = 0
RX_DESTINATION = 1


@dataclass(frozen=True)
class FadingField:
    seed: int

    def _row_rng(self, slot, rx_kind, tx_id):
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(slot), int(rx_kind), int(tx_id)))
        return np.random.default_rng(ss)

    def coefficient(self, tx_id, rx_id, slot, rx_kind=RX_RELAY) -> float:
        return float(self.rows([tx_id], rx_id + 1, slot, rx_kind)[0, rx_id])

    def rows(self, tx_ids, n_rx, slot, rx_kind=RX_RELAY) -> np.ndarray:
        """Fading powers from transmitters ``tx_ids`` to receivers ``0..n_rx-1``.

        Row ``i`` is a prefix of one per-transmitter stream, so an entry does
        not depend on ``n_rx`` or on which other rows are requested.
        """
        tx_ids = np.asarray(tx_ids, dtype=np.int64).reshape(-1)
        out = np.empty((len(tx_ids), int(n_rx)))
        for k, t in enumerate(tx_ids):
            out[k] = self._row_rng(slot, rx_kind, t).standard_exponential(int(n_rx))
        return out


def distances(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    diff = a[:, None, :] - b[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def received_power(tx, rx, fading: np.ndarray, model: PathLossModel) -> np.ndarray:
    """Faded received powers, shape ``(n_tx, n_rx)``."""
    return fading * path_loss(model, distances(tx, rx))


@dataclass(frozen=True, eq=False)
class Reception:
    """Per-receiver outcome of one slot.

    ``best`` is the strongest transmitter per receiver (-1 with no
    transmitters); ``signal`` and ``interference`` are measured with respect
    to it; ``connected`` is ``signal > T * interference``.
    """

    best: np.ndarray
    signal: np.ndarray
    interference: np.ndarray
    connected: np.ndarray

    @property
    def rss(self) -> np.ndarray:
        return self.signal + self.interference


def receive(power: np.ndarray, T: float) -> Reception:
    """Resolve which transmitter (if any) each receiver decodes.

    For ``T >= 1`` only the strongest transmitter can exceed the threshold,
    so checking the argmax per column is exact.
    """
    n_tx, n_rx = power.shape
    if n_tx == 0:
        z = np.zeros(n_rx)
        return Reception(np.full(n_rx, -1), z, z.copy(), np.zeros(n_rx, dtype=bool))
    best = np.argmax(power, axis=0)
    cols = np.arange(n_rx)
    signal = power[best, cols]
    masked = power.copy()
    masked[best, cols] = 0.0
    interference = masked.sum(axis=0)
    with np.errstate(invalid="ignore"):
        connected = signal > T * interference
    # two colocated transmitters (inf vs inf) cannot both be resolved
    connected &= ~(np.isinf(signal) & np.isinf(interference))
    return Reception(best, signal, interference, connected)


def _resolve_tx(tx, tx_set):
    tx_set = np.asarray(tx_set, dtype=float).reshape(-1, 2)
    if isinstance(tx, (int, np.integer)):
        if not 0 <= tx < len(tx_set):
            raise ContractViolation("transmitter index outside the transmitting set")
        return int(tx), tx_set
    hits = np.flatnonzero(np.all(tx_set == np.asarray(tx, dtype=float), axis=1))
    if len(hits) == 0:
        raise ContractViolation("tx must belong to the transmitting set")
    return int(hits[0]), tx_set


def _fading_column(fading, n_tx, slot, rx_index, rx_kind):
    if isinstance(fading, FadingField):
        return fading.rows(np.arange(n_tx), rx_index + 1, slot, rx_kind)[:, rx_index]
    h = np.asarray(fading, dtype=float).reshape(-1)
    if len(h) != n_tx:
        raise ContractViolation("need one fading coefficient per transmitter")
    return h


def link_budget(tx, rx, tx_set, fading, slot, model, rx_index=0, rx_kind=RX_RELAY):
    """Signal and interference at ``rx`` for transmitter ``tx`` of ``tx_set``.

    ``fading`` is a :class:`FadingField` (combined with ``rx_index`` and
    ``rx_kind`` to locate the receiver's coefficients) or an explicit array
    with one power gain per member of ``tx_set``.
    """
    i, tx_set = _resolve_tx(tx, tx_set)
    h = _fading_column(fading, len(tx_set), slot, rx_index, rx_kind)
    p = h * path_loss(model, distances(tx_set, rx)[:, 0])
    signal = p[i]
    interference = float(np.sum(np.delete(p, i)))
    return float(signal), interference


def sir(tx, rx, tx_set, fading, slot, model, rx_index=0, rx_kind=RX_RELAY) -> float:
    """Signal-to-interference ratio; ``inf`` when ``tx`` is the only transmitter."""
    s, i = link_budget(tx, rx, tx_set, fading, slot, model, rx_index, rx_kind)
    if i == 0.0:
        return float("inf")
    return s / i


def connects(tx, rx, tx_set, fading, slot, model, T, rx_index=0, rx_kind=RX_RELAY) -> bool:
    if T <= 0:
        raise ContractViolation("threshold must be positive")
    if T <= 1:
        warnings.warn("T <= 1: more than one transmitter may connect to a receiver",
                      stacklevel=2)
    s, i = link_budget(tx, rx, tx_set, fading, slot, model, rx_index, rx_kind)
    if np.isinf(s) and np.isinf(i):
        return False
    return bool(s > T * i)


def rss(rx, connected_tx, tx_set, fading, slot, model, T, rx_index=0,
        rx_kind=RX_RELAY) -> float:
    """Received signal strength ``S + I`` seen by a receiver that decoded ``connected_tx``."""
    if not connects(connected_tx, rx, tx_set, fading, slot, model, T, rx_index, rx_kind):
        raise ContractViolation("rss is only defined for a receiver that decoded its source")
    s, i = link_budget(connected_tx, rx, tx_set, fading, slot, model, rx_index, rx_kind)
    return s + i
