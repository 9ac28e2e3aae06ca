"""Design search: forward sequential selection and simulated annealing."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .bayes import (
    MHConfig,
    PosteriorSample,
    PriorSpec,
    PredictionBand,
    mh_sample,
    posterior_summary,
    prediction_band,
)
from .criteria import (
    Criterion,
    argmin_day,
    a_criterion,
    bayes_utility,
    d_criterion,
    i_criterion,
    posterior_cov,
    preposterior_score,
)
from .growth import (
    DEFAULT_SEASON,
    DEFAULT_START,
    Dataset,
    GrowthParams,
    TimeGrid,
    count_at_day,
    mean_curve,
    scenario,
    simulate_counts,
)
from .seeds import Stream

STATUS_BUDGET = "budget-exhausted"
STATUS_SEASON = "season-exhausted"


class DataSource(Protocol):
    """Yields one observed count for any requested day."""

    def count(self, day: int) -> int: ...


@dataclass(frozen=True)
class SimulatedSource:
    """Ground-truth logistic simulator; per-day substreams make the count
    at a day independent of acquisition order."""

    params: GrowthParams
    seed: int

    def count(self, day: int) -> int:
        return count_at_day(self.params, day, self.seed)


@dataclass(frozen=True)
class Design:
    """Chosen sampling days, strictly increasing."""

    days: tuple[int, ...]

    def __post_init__(self) -> None:
        prev = 0
        for d in self.days:
            if d <= prev:
                raise ValueError("design days must be strictly increasing and >= 1")
            prev = d

    def __len__(self) -> int:
        return len(self.days)


@dataclass(frozen=True)
class SeqConfig:
    """Forward sequential selection settings.

    The initial design is observed up front; afterwards each step fits
    the posterior, scores the next ``window`` days after the latest
    observation (clipped at ``season``), and acquires the best one,
    until ``budget`` total days are observed or the season ends.
    """

    initial_days: tuple[int, ...] = (1, 2, 3)
    budget: int = 10
    window: int = 10
    season: int = DEFAULT_SEASON
    criterion: Criterion = field(default_factory=lambda: Criterion("I"))
    mh: MHConfig = field(default_factory=MHConfig)
    priors: PriorSpec = field(default_factory=PriorSpec)
    n0: float = DEFAULT_START

    def __post_init__(self) -> None:
        if not self.initial_days:
            raise ValueError("initial design must contain at least one day")
        prev = 0
        for d in self.initial_days:
            if d <= prev:
                raise ValueError("initial days must be strictly increasing and >= 1")
            prev = d
        if self.initial_days[-1] > self.season:
            raise ValueError("initial days must lie within the season")
        if self.budget < len(self.initial_days):
            raise ValueError("budget must cover the initial design")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.season < 1:
            raise ValueError("season must be >= 1")

    def to_dict(self) -> dict:
        return {
            "initial_days": list(self.initial_days),
            "budget": self.budget,
            "window": self.window,
            "season": self.season,
            "criterion": self.criterion.to_dict(),
            "mh": self.mh.to_dict(),
            "priors": self.priors.to_dict(),
            "n0": self.n0,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SeqConfig":
        return cls(
            initial_days=tuple(payload["initial_days"]),
            budget=payload["budget"],
            window=payload["window"],
            season=payload["season"],
            criterion=Criterion.from_dict(payload["criterion"]),
            mh=MHConfig.from_dict(payload["mh"]),
            priors=PriorSpec.from_dict(payload["priors"]),
            n0=payload["n0"],
        )


@dataclass(frozen=True)
class StepRecord:
    step: int
    window: tuple[int, ...]
    scores: tuple[float, ...]
    chosen: int
    posterior: dict
    terminal_draw: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "window": list(self.window),
            "scores": list(self.scores),
            "chosen": self.chosen,
            "posterior_summary": self.posterior,
            "terminal_draw": list(self.terminal_draw),
        }


@dataclass(frozen=True)
class SequentialResult:
    design: Design
    dataset: Dataset
    trace: tuple[StepRecord, ...]
    status: str
    posterior: PosteriorSample


def candidate_window(last_day: int, window: int, season: int) -> tuple[int, ...]:
    """Days last_day+1 .. last_day+window, clipped at the season end."""
    return tuple(range(last_day + 1, min(last_day + window, season) + 1))


def fit_step(
    data: Dataset,
    cfg: SeqConfig,
    seed: int,
    step_index: int,
    warm: tuple[float, float] | None,
) -> PosteriorSample:
    """Posterior fit for one sequential step.

    The chain seed derives from (seed, FIT, step_index) where step_index
    is the design size being fit, and the chain warm-starts from the
    previous fit's terminal draw, so a live session and a direct run
    walk through identical fits.
    """
    return mh_sample(
        data,
        cfg.priors,
        cfg.mh,
        n0=cfg.n0,
        seed=seed,
        seed_path=(Stream.FIT, step_index),
        init=warm,
    )


def score_window(
    post: PosteriorSample,
    data: Dataset,
    cfg: SeqConfig,
    window: Sequence[int],
    seed: int,
    step_index: int,
) -> tuple[float, ...]:
    """Score each candidate day in the window under cfg.criterion.

    Classical criteria use the deterministic expected-effect preposterior
    score; utility criteria draw predictive outcomes under sub-seeds
    derived from (seed, SCORE, step_index) and the candidate day, so
    candidates may be evaluated in any order or concurrently.
    """
    crit = cfg.criterion
    pred = crit.pred_days or tuple(range(1, cfg.season + 1))
    scores = []
    for day in window:
        if crit.is_utility():
            s = bayes_utility(
                crit.kind,
                post,
                data,
                day,
                cfg.n0,
                cfg.priors,
                draws=crit.draws,
                refit=crit.refit,
                seed=seed,
                seed_path=(Stream.SCORE, step_index),
            )
        else:
            s = preposterior_score(crit.kind, post, data, day, cfg.n0, pred)
        scores.append(float(s))
    return tuple(scores)


def sequential_design(source: DataSource, cfg: SeqConfig, seed: int) -> SequentialResult:
    """Greedy one-day-ahead design construction.

    Observes the initial days, then repeats fit / score window / acquire
    argmin until the budget is spent or the next window would start past
    the season end.  The returned posterior is fit to the complete data.
    """
    data = Dataset(())
    for day in cfg.initial_days:
        data = data.append(day, source.count(day))

    trace: list[StepRecord] = []
    warm: tuple[float, float] | None = None
    status = STATUS_BUDGET
    while len(data) < cfg.budget:
        if data.last_day() >= cfg.season:
            status = STATUS_SEASON
            break
        step_index = len(data)
        post = fit_step(data, cfg, seed, step_index, warm)
        warm = post.last_draw()
        window = candidate_window(data.last_day(), cfg.window, cfg.season)
        scores = score_window(post, data, cfg, window, seed, step_index)
        chosen = argmin_day(window, scores)
        trace.append(
            StepRecord(
                step=step_index,
                window=window,
                scores=scores,
                chosen=chosen,
                posterior=posterior_summary(post),
                terminal_draw=warm,
            )
        )
        data = data.append(chosen, source.count(chosen))

    final_post = fit_step(data, cfg, seed, len(data), warm)
    return SequentialResult(
        design=Design(data.day_list()),
        dataset=data,
        trace=tuple(trace),
        status=status,
        posterior=final_post,
    )


# ---------------------------------------------------------------------------
# simulated annealing over fixed-size subsets of available days

@dataclass(frozen=True)
class AnnealConfig:
    """Subset-selection annealing settings.

    Energy of a design is the criterion value after fitting the
    posterior to the data restricted to those days.  t0 defaults to a
    pilot calibration that accepts about 80 percent of uphill moves.
    Only the classical criteria (A, D, I) are valid energies.
    """

    size: int
    iterations: int = 2_000
    t0: float | None = None
    alpha: float = 0.95
    criterion: Criterion = field(default_factory=lambda: Criterion("A"))
    mh: MHConfig = field(default_factory=lambda: MHConfig(kept=2_000, burn_in=500))
    priors: PriorSpec = field(default_factory=PriorSpec)
    n0: float = DEFAULT_START
    seed: int = 0

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("design size must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not (0 < self.alpha < 1):
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("initial temperature must be positive")
        if self.criterion.is_utility():
            raise ValueError("annealing energy supports the classical criteria only")


@dataclass(frozen=True)
class AnnealResult:
    best: Design
    best_energy: float
    energies: tuple[float, ...]
    initial: Design
    t0: float
    evaluations: int


def design_energy(
    data: Dataset,
    days: Sequence[int],
    cfg: AnnealConfig,
    cache: dict[tuple[int, ...], float] | None = None,
) -> float:
    """Criterion value after refitting to the design-restricted data.

    The fit seed derives from (cfg.seed, ANNEAL_ENERGY, *days), so the
    energy is a pure function of the design for a given run seed and can
    be cached by sorted day tuple.
    """
    key = tuple(sorted(int(d) for d in days))
    if cache is not None and key in cache:
        return cache[key]
    subset = data.restrict(key)
    post = mh_sample(
        subset,
        cfg.priors,
        cfg.mh,
        n0=cfg.n0,
        seed=cfg.seed,
        seed_path=(Stream.ANNEAL_ENERGY,) + key,
    )
    kind = cfg.criterion.kind
    if kind == "A":
        value = a_criterion(posterior_cov(post))
    elif kind == "D":
        value = d_criterion(posterior_cov(post))
    else:
        pred = cfg.criterion.pred_days or tuple(range(1, data.last_day() + 1))
        value = i_criterion(post, pred, cfg.n0)
    if cache is not None:
        cache[key] = value
    return value


def _pilot_t0(
    data: Dataset,
    start: tuple[int, ...],
    pool: tuple[int, ...],
    cfg: AnnealConfig,
    rng: np.random.Generator,
    cache: dict,
) -> float:
    """Temperature at which ~80 percent of pilot uphill moves accept.

    Walks 100 random moves accepting everything, collects the positive
    energy jumps, and solves exp(-mean/t0) = 0.8.
    """
    state = list(start)
    energy = design_energy(data, state, cfg, cache)
    uphill = []
    for _ in range(100):
        nxt = _neighbor(state, pool, rng)
        e = design_energy(data, nxt, cfg, cache)
        if e > energy:
            uphill.append(e - energy)
        state, energy = nxt, e
    if not uphill:
        return 1.0
    return float(np.mean(uphill) / -math.log(0.8))


def _neighbor(state: list[int], pool: tuple[int, ...], rng: np.random.Generator) -> list[int]:
    """Swap one chosen day for one unused day, both picked uniformly."""
    unused = [d for d in pool if d not in state]
    out = rng.integers(0, len(state))
    into = rng.integers(0, len(unused))
    nxt = list(state)
    nxt[out] = unused[into]
    return nxt


def simulated_annealing(data: Dataset, cfg: AnnealConfig) -> AnnealResult:
    """Geometric-cooling annealing over size-m subsets of the data's days.

    Proposes single-day swaps, accepts downhill always and uphill with
    probability exp(-dE / t_k), cools t by alpha each iteration, and
    returns the best design ever visited.  Deterministic per cfg.seed.
    """
    pool = data.day_list()
    if cfg.size > len(pool):
        raise ValueError(f"design size {cfg.size} exceeds the {len(pool)} available days")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, Stream.ANNEAL])))
    cache: dict[tuple[int, ...], float] = {}

    start = sorted(int(d) for d in rng.choice(pool, size=cfg.size, replace=False))
    state = list(start)
    energy = design_energy(data, state, cfg, cache)
    t = cfg.t0 if cfg.t0 is not None else _pilot_t0(data, tuple(start), pool, cfg, rng, cache)
    t0 = t

    best = list(state)
    best_energy = energy
    energies = [energy]
    for _ in range(cfg.iterations):
        nxt = _neighbor(state, pool, rng)
        e = design_energy(data, nxt, cfg, cache)
        delta = e - energy
        if delta <= 0 or rng.random() < math.exp(-delta / t):
            state, energy = nxt, e
            if energy < best_energy:
                best, best_energy = list(state), energy
        energies.append(energy)
        t *= cfg.alpha

    return AnnealResult(
        best=Design(tuple(sorted(best))),
        best_energy=best_energy,
        energies=tuple(energies),
        initial=Design(tuple(start)),
        t0=t0,
        evaluations=len(cache),
    )


def exhaustive_minimum(data: Dataset, cfg: AnnealConfig) -> tuple[Design, float, dict[tuple[int, ...], float]]:
    """Enumerate every size-m design and return the energy minimum.

    Uses the same energy definition and seed derivation as annealing, so
    the two are directly comparable search strategies.
    """
    pool = data.day_list()
    cache: dict[tuple[int, ...], float] = {}
    best_days: tuple[int, ...] | None = None
    best_energy = math.inf
    for combo in itertools.combinations(pool, cfg.size):
        e = design_energy(data, combo, cfg, cache)
        if e < best_energy:
            best_days, best_energy = combo, e
    assert best_days is not None
    return Design(best_days), best_energy, cache


# ---------------------------------------------------------------------------
# full replication recipe for one scenario / criterion / mode cell

@dataclass(frozen=True)
class ReplicateBundle:
    scenario: str
    criterion: str
    mode: str
    seed: int
    params: GrowthParams
    design: Design
    dataset: Dataset
    trace: tuple[StepRecord, ...]
    status: str
    band: PredictionBand
    truth: tuple[float, ...]
    posterior: dict

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "criterion": self.criterion,
            "mode": self.mode,
            "seed": self.seed,
            "params": {"r": self.params.r, "K": self.params.K, "n0": self.params.n0},
            "design": list(self.design.days),
            "dataset": [{"day": p.day, "count": p.count} for p in self.dataset.points],
            "trace": [rec.to_dict() for rec in self.trace],
            "status": self.status,
            "band": self.band.to_dict(),
            "truth": list(self.truth),
            "posterior_summary": self.posterior,
        }


MODES = ("sequential", "anneal")


def replicate_scenario(
    scenario_name: str,
    criterion: Criterion,
    mode: str,
    seed: int,
    budget: int = 10,
    window: int = 10,
    season: int = DEFAULT_SEASON,
    initial_days: tuple[int, ...] = (1, 2, 3),
    mh: MHConfig | None = None,
    priors: PriorSpec | None = None,
    n0: float = DEFAULT_START,
    band_mode: str = "mean-curve",
    progress=None,
) -> ReplicateBundle:
    """One full design-construction run against the named growth regime.

    sequential mode drives the forward optimizer against a simulated
    data source; anneal mode simulates the whole season once and anneals
    a budget-sized subset.  Everything derives from the one seed.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    params = scenario(scenario_name, n0=n0)
    mh = mh or MHConfig()
    priors = priors or PriorSpec()
    grid = TimeGrid.full(season)
    truth = tuple(float(v) for v in mean_curve(params, grid.days))

    def emit(event: dict) -> None:
        if progress is not None:
            progress(event)

    emit({"event": "start", "scenario": scenario_name, "criterion": criterion.kind,
          "mode": mode, "seed": seed})

    if mode == "sequential":
        cfg = SeqConfig(
            initial_days=initial_days,
            budget=budget,
            window=window,
            season=season,
            criterion=criterion,
            mh=mh,
            priors=priors,
            n0=n0,
        )
        source = SimulatedSource(params, seed)
        result = sequential_design(source, cfg, seed)
        for rec in result.trace:
            emit({"event": "step", "step": rec.step, "chosen": rec.chosen})
        band = prediction_band(result.posterior, grid.days, n0, mode=band_mode, seed=seed)
        bundle = ReplicateBundle(
            scenario=scenario_name,
            criterion=criterion.kind,
            mode=mode,
            seed=seed,
            params=params,
            design=result.design,
            dataset=result.dataset,
            trace=result.trace,
            status=result.status,
            band=band,
            truth=truth,
            posterior=posterior_summary(result.posterior),
        )
    else:
        full_data = simulate_counts(params, grid, seed)
        # energies refit constantly; keep those chains short
        energy_mh = MHConfig(kept=min(mh.kept, 2_000), burn_in=min(mh.burn_in, 500))
        acfg = AnnealConfig(
            size=budget,
            criterion=criterion,
            mh=energy_mh,
            priors=priors,
            n0=n0,
            seed=seed,
        )
        result = simulated_annealing(full_data, acfg)
        emit({"event": "annealed", "best": list(result.best.days),
              "energy": result.best_energy})
        subset = full_data.restrict(result.best.days)
        post = mh_sample(
            subset,
            priors,
            mh,
            n0=n0,
            seed=seed,
            seed_path=(Stream.FIT, len(subset)),
        )
        band = prediction_band(post, grid.days, n0, mode=band_mode, seed=seed)
        bundle = ReplicateBundle(
            scenario=scenario_name,
            criterion=criterion.kind,
            mode=mode,
            seed=seed,
            params=params,
            design=result.best,
            dataset=subset,
            trace=(),
            status="annealed",
            band=band,
            truth=truth,
            posterior=posterior_summary(post),
        )
    emit({"event": "done", "design": list(bundle.design.days), "status": bundle.status})
    return bundle
