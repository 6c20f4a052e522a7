"""Padded per-path time grids merging a regular grid with Poisson event times."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import CadlagPath

GRID = 0


def regular_grid(t_end: float, h: float) -> np.ndarray:
    if not (t_end > 0 and h > 0):
        raise ValueError("t_end and h must be positive")
    n = max(1, int(np.ceil(t_end / h - 1e-9)))
    return np.linspace(0.0, t_end, n + 1)


@dataclass
class EventGrid:
    """Row i holds the sorted times of path i; padding sits at +inf.

    ``kind[i, k]`` is 0 for grid points, otherwise the 1-based index of the
    event type; ``index[i, k]`` is the event's position in that type's draws.
    """

    times: np.ndarray
    kind: np.ndarray
    index: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.times)

    @property
    def dt(self) -> np.ndarray:
        dt = np.zeros_like(self.times)
        with np.errstate(invalid="ignore"):
            dt[:, 1:] = np.diff(self.times, axis=1)
        dt[~np.isfinite(dt)] = 0.0
        return dt


def poisson_times(rng: np.random.Generator, rate: float, t_end: float, n: int) -> np.ndarray:
    """Event times of ``n`` independent rate-``rate`` Poisson processes on (0, t_end), inf-padded."""
    counts = rng.poisson(rate * t_end, size=n) if rate > 0 else np.zeros(n, dtype=int)
    kmax = int(counts.max()) if n else 0
    u = np.sort(rng.uniform(0.0, t_end, size=(n, kmax)), axis=1)
    u[np.arange(kmax)[None, :] >= counts[:, None]] = np.inf
    # A draw of exactly 0 would collide with the initial knot.
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return u


def merge(grid: np.ndarray, *event_times: np.ndarray) -> EventGrid:
    n = event_times[0].shape[0] if event_times else 1
    cols = [np.broadcast_to(grid, (n, len(grid)))]
    kinds = [np.zeros((n, len(grid)), dtype=np.int8)]
    idx = [np.broadcast_to(np.arange(len(grid)), (n, len(grid)))]
    for k, ev in enumerate(event_times, start=1):
        cols.append(ev)
        kinds.append(np.full(ev.shape, k, dtype=np.int8))
        idx.append(np.broadcast_to(np.arange(ev.shape[1]), ev.shape))
    times = np.concatenate(cols, axis=1)
    order = np.argsort(times, axis=1, kind="stable")
    times = np.take_along_axis(times, order, axis=1)
    kind = np.take_along_axis(np.concatenate(kinds, axis=1), order, axis=1)
    index = np.take_along_axis(np.concatenate(idx, axis=1), order, axis=1)
    kind[~np.isfinite(times)] = -1
    return EventGrid(times, kind, index)


def gather(values: np.ndarray, grid: EventGrid, k: int) -> np.ndarray:
    """Per-column values of event type ``k`` (zero elsewhere)."""
    mask = grid.kind == k
    out = np.zeros(grid.times.shape + values.shape[2:])
    if values.shape[1]:
        rows = np.nonzero(mask)
        out[rows] = values[rows[0], grid.index[rows]]
    return out


def to_paths(times, states, jump_mask, left, lifetimes) -> list[CadlagPath]:
    """Cut padded batch arrays into per-path :class:`CadlagPath` objects.

    Columns with time >= lifetime (and the inf padding) are dropped.
    """
    out = []
    for i in range(times.shape[0]):
        keep = times[i] < lifetimes[i]
        t = times[i, keep]
        s = states[i, keep]
        jm = jump_mask[i, keep]
        out.append(CadlagPath(t, s, t[jm], left[i, keep][jm], s[jm], lifetime=lifetimes[i], validate=False))
    return out
