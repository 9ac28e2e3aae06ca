"""Logistic population dynamics and Poisson count simulation."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .seeds import Stream, spawn_rng

SCENARIOS = {
    "normal": 0.10,
    "fast": 1.00,
    "slow": 0.05,
}

DEFAULT_CAPACITY = 2000.0
DEFAULT_START = 10.0
DEFAULT_SEASON = 100


@dataclass(frozen=True)
class GrowthParams:
    """Logistic curve parameters.

    r : per-day growth rate, > 0
    K : carrying capacity, > 0
    n0 : population at day 0, in (0, K]
    """

    r: float
    K: float
    n0: float = DEFAULT_START

    def __post_init__(self) -> None:
        if not (np.isfinite(self.r) and self.r > 0):
            raise ValueError(f"growth rate must be positive and finite, got {self.r}")
        if not (np.isfinite(self.K) and self.K > 0):
            raise ValueError(f"carrying capacity must be positive and finite, got {self.K}")
        if not (np.isfinite(self.n0) and 0 < self.n0 <= self.K):
            raise ValueError(f"start size must satisfy 0 < n0 <= K, got {self.n0}")


def scenario(name: str, n0: float = DEFAULT_START) -> GrowthParams:
    """Named growth regimes: normal (r=0.10), fast (r=1.00), slow (r=0.05)."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}, expected one of {sorted(SCENARIOS)}")
    return GrowthParams(r=SCENARIOS[name], K=DEFAULT_CAPACITY, n0=n0)


def logistic_mean(params: GrowthParams, t):
    """Population mean at time(s) t under the closed-form logistic solution.

    N(t) = K*n0 / ((K - n0) * exp(-r*t) + n0).  Accepts a scalar or an
    array of times; times must be >= 0.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("time must be non-negative")
    decay = np.exp(-params.r * t_arr)
    out = params.K * params.n0 / ((params.K - params.n0) * decay + params.n0)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def mean_curve(params: GrowthParams, days: Sequence[int]) -> np.ndarray:
    return logistic_mean(params, np.asarray(list(days), dtype=float))


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing integer sampling days inside a season of length horizon."""

    days: tuple[int, ...]
    horizon: int

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        prev = 0
        for d in self.days:
            if d != int(d):
                raise ValueError(f"grid days must be integers, got {d!r}")
            if d <= prev:
                raise ValueError("grid days must be strictly increasing and >= 1")
            if d > self.horizon:
                raise ValueError(f"grid day {d} exceeds horizon {self.horizon}")
            prev = d

    @classmethod
    def full(cls, horizon: int) -> "TimeGrid":
        return cls(days=tuple(range(1, horizon + 1)), horizon=horizon)


class Observation(NamedTuple):
    day: int
    count: int


@dataclass(frozen=True)
class Dataset:
    """Observed counts, one per day, days strictly increasing."""

    points: tuple[Observation, ...]

    def __post_init__(self) -> None:
        prev = None
        for p in self.points:
            if p.day < 1 or p.day != int(p.day):
                raise ValueError(f"observation day must be a positive integer, got {p.day!r}")
            if prev is not None and p.day <= prev:
                raise ValueError("observation days must be strictly increasing")
            if p.count < 0 or p.count != int(p.count):
                raise ValueError(f"count must be a non-negative integer, got {p.count!r}")
            prev = p.day

    def __len__(self) -> int:
        return len(self.points)

    @property
    def days(self) -> np.ndarray:
        return np.array([p.day for p in self.points], dtype=float)

    @property
    def counts(self) -> np.ndarray:
        return np.array([p.count for p in self.points], dtype=float)

    def day_list(self) -> tuple[int, ...]:
        return tuple(int(p.day) for p in self.points)

    def last_day(self) -> int:
        return int(self.points[-1].day) if self.points else 0

    def append(self, day: int, count: int) -> "Dataset":
        return Dataset(self.points + (Observation(int(day), int(count)),))

    def restrict(self, days: Iterable[int]) -> "Dataset":
        """Subset containing only the given days; every day must be present."""
        want = sorted(int(d) for d in days)
        have = {int(p.day): p for p in self.points}
        missing = [d for d in want if d not in have]
        if missing:
            raise ValueError(f"dataset has no observation for days {missing}")
        return Dataset(tuple(have[d] for d in want))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Dataset":
        return cls(tuple(Observation(int(d), int(c)) for d, c in pairs))


def simulate_counts(params: GrowthParams, grid: TimeGrid, seed: int) -> Dataset:
    """Poisson counts around the logistic mean at each grid day.

    Deterministic for a given seed: one PCG64 substream drives the whole
    grid in day order.
    """
    if not grid.days:
        return Dataset(())
    lam = mean_curve(params, grid.days)
    rng = spawn_rng(seed, Stream.SIMULATE)
    counts = rng.poisson(lam)
    return Dataset.from_pairs(zip(grid.days, (int(c) for c in counts)))


def count_at_day(params: GrowthParams, day: int, seed: int) -> int:
    """Single simulated count with a per-day substream.

    The draw depends only on (seed, day), so acquisition order never
    changes the value a sequential procedure sees.
    """
    if day < 1:
        raise ValueError(f"day must be >= 1, got {day}")
    lam = logistic_mean(params, float(day))
    rng = spawn_rng(seed, Stream.DAY_COUNT, int(day))
    return int(rng.poisson(lam))


# serialization: CSV `day,count` and a JSON array of {day, count}

def dataset_to_csv(data: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "count"])
        for p in data.points:
            writer.writerow([p.day, p.count])


def dataset_from_csv(path: str | Path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["day", "count"]:
            raise ValueError(f"expected header day,count in {path}, got {reader.fieldnames}")
        pairs = [(int(row["day"]), int(row["count"])) for row in reader]
    return Dataset.from_pairs(pairs)


def dataset_to_json(data: Dataset, path: str | Path) -> None:
    payload = [{"day": p.day, "count": p.count} for p in data.points]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def dataset_from_json(path: str | Path) -> Dataset:
    with open(path) as fh:
        payload = json.load(fh)
    return Dataset.from_pairs((int(rec["day"]), int(rec["count"])) for rec in payload)
