"""Posterior inference for the logistic-Poisson observation model.

Counts are Poisson around the logistic mean curve; the growth rate r and
the carrying capacity K carry independent log-normal priors, and the
start size n0 is treated as known.  Sampling runs a random-walk
Metropolis chain on (ln r, ln K) with a Jacobian correction, so the
draws returned are on the natural scale.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .growth import Dataset, GrowthParams, logistic_mean
from .seeds import Stream, spawn_rng

LOG_2PI = math.log(2.0 * math.pi)

PARAMETERIZATIONS = ("mean-var", "mean-logvar", "log-precision")


@dataclass(frozen=True)
class PriorSpec:
    """Independent log-normal priors on r and K.

    The two numbers attached to each parameter are read according to
    ``parameterization``:

    mean-var (default)
        natural-scale mean and variance; the underlying normal has
        sigma^2 = ln(1 + v/m^2) and mu = ln m - sigma^2/2.
    mean-logvar
        natural-scale mean with log-scale variance: sigma^2 = v,
        mu = ln m - sigma^2/2 (natural mean still equals m).
    log-precision
        location and precision of the underlying normal: mu = m,
        sigma^2 = 1/v.
    """

    r_mean: float = 1.0
    r_var: float = 10.0
    k_mean: float = 2000.0
    k_var: float = 0.1
    parameterization: str = "mean-var"

    def __post_init__(self) -> None:
        if self.parameterization not in PARAMETERIZATIONS:
            raise ValueError(
                f"unknown parameterization {self.parameterization!r}, "
                f"expected one of {PARAMETERIZATIONS}"
            )
        if self.r_var <= 0 or self.k_var <= 0:
            raise ValueError("prior spread parameters must be positive")
        if self.parameterization != "log-precision" and (self.r_mean <= 0 or self.k_mean <= 0):
            raise ValueError("natural-scale prior means must be positive")

    def log_scale(self) -> tuple[float, float, float, float]:
        """(mu_r, sig2_r, mu_k, sig2_k) of the underlying normals."""

        def one(m: float, v: float) -> tuple[float, float]:
            if self.parameterization == "mean-var":
                sig2 = math.log1p(v / m**2)
                return math.log(m) - sig2 / 2.0, sig2
            if self.parameterization == "mean-logvar":
                return math.log(m) - v / 2.0, v
            return m, 1.0 / v

        mu_r, sig2_r = one(self.r_mean, self.r_var)
        mu_k, sig2_k = one(self.k_mean, self.k_var)
        return mu_r, sig2_r, mu_k, sig2_k

    def natural_moments(self) -> dict[str, float]:
        """Analytic natural-scale means and variances of the two priors."""
        mu_r, sig2_r, mu_k, sig2_k = self.log_scale()

        def moments(mu: float, sig2: float) -> tuple[float, float]:
            mean = math.exp(mu + sig2 / 2.0)
            var = math.expm1(sig2) * math.exp(2.0 * mu + sig2)
            return mean, var

        r_mean, r_var = moments(mu_r, sig2_r)
        k_mean, k_var = moments(mu_k, sig2_k)
        return {"r_mean": r_mean, "r_var": r_var, "k_mean": k_mean, "k_var": k_var}

    def to_dict(self) -> dict:
        return {
            "r_mean": self.r_mean,
            "r_var": self.r_var,
            "k_mean": self.k_mean,
            "k_var": self.k_var,
            "parameterization": self.parameterization,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PriorSpec":
        return cls(**payload)


def _lognorm_logpdf(x: float, mu: float, sig2: float) -> float:
    lx = math.log(x)
    return -lx - 0.5 * (LOG_2PI + math.log(sig2)) - (lx - mu) ** 2 / (2.0 * sig2)


def log_prior(r: float, k: float, spec: PriorSpec) -> float:
    """Joint log prior density at natural-scale (r, K); -inf off support."""
    if r <= 0 or k <= 0 or not (np.isfinite(r) and np.isfinite(k)):
        return -np.inf
    mu_r, sig2_r, mu_k, sig2_k = spec.log_scale()
    return _lognorm_logpdf(r, mu_r, sig2_r) + _lognorm_logpdf(k, mu_k, sig2_k)


def log_likelihood(r: float, k: float, data: Dataset, n0: float) -> float:
    """Poisson log likelihood of the counts around the logistic mean."""
    if len(data) == 0:
        return 0.0
    if r <= 0 or k <= 0 or n0 <= 0 or n0 > k:
        return -np.inf
    lam = logistic_mean(GrowthParams(r=r, K=k, n0=n0), data.days)
    counts = data.counts
    if np.any(lam <= 0):
        return -np.inf
    val = float(np.sum(counts * np.log(lam) - lam - gammaln(counts + 1.0)))
    return val if np.isfinite(val) else -np.inf


def log_target(eta: np.ndarray, data: Dataset, spec: PriorSpec, n0: float) -> float:
    """Unnormalized log density the chain samples, in eta = (ln r, ln K).

    Includes the change-of-variables Jacobian ln r + ln K, so acceptance
    ratios in eta-space match posterior ratios on the natural scale.
    """
    r = math.exp(eta[0])
    k = math.exp(eta[1])
    lp = log_prior(r, k, spec)
    if not np.isfinite(lp):
        return -np.inf
    ll = log_likelihood(r, k, data, n0)
    if not np.isfinite(ll):
        return -np.inf
    return lp + ll + eta[0] + eta[1]


@dataclass(frozen=True)
class MHConfig:
    """Random-walk chain settings.

    kept draws are recorded after burn_in iterations, one per thin
    steps.  Proposal scales start from the prior standard deviations on
    the log scale (unless initial_scales overrides them) and adapt
    during burn-in toward target_acceptance, then freeze.
    """

    kept: int = 10_000
    burn_in: int = 2_000
    thin: int = 1
    initial_scales: tuple[float, float] | None = None
    adapt: bool = True
    adapt_interval: int = 50
    target_acceptance: float = 0.30

    def __post_init__(self) -> None:
        if self.kept < 1:
            raise ValueError("kept must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.adapt_interval < 1:
            raise ValueError("adapt_interval must be >= 1")
        if not (0 < self.target_acceptance < 1):
            raise ValueError("target_acceptance must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "kept": self.kept,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "initial_scales": list(self.initial_scales) if self.initial_scales else None,
            "adapt": self.adapt,
            "adapt_interval": self.adapt_interval,
            "target_acceptance": self.target_acceptance,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MHConfig":
        payload = dict(payload)
        scales = payload.get("initial_scales")
        if scales is not None:
            payload["initial_scales"] = tuple(scales)
        return cls(**payload)


@dataclass(frozen=True)
class PosteriorSample:
    """Kept natural-scale draws of (r, K) plus chain diagnostics."""

    draws: np.ndarray
    acceptance_rate: float
    seed_path: tuple[int, ...]
    proposal_scales: tuple[float, float]

    def __post_init__(self) -> None:
        if self.draws.ndim != 2 or self.draws.shape[1] != 2:
            raise ValueError("draws must be an (n, 2) array of (r, K)")
        if len(self.draws) < 1:
            raise ValueError("posterior must contain at least one draw")
        if np.any(self.draws <= 0) or not np.all(np.isfinite(self.draws)):
            raise ValueError("posterior draws must be positive and finite")
        if not (0.0 <= self.acceptance_rate <= 1.0):
            raise ValueError("acceptance rate must lie in [0, 1]")
        self.draws.flags.writeable = False

    @property
    def n_kept(self) -> int:
        return len(self.draws)

    @property
    def r(self) -> np.ndarray:
        return self.draws[:, 0]

    @property
    def k(self) -> np.ndarray:
        return self.draws[:, 1]

    def last_draw(self) -> tuple[float, float]:
        return float(self.draws[-1, 0]), float(self.draws[-1, 1])


class ChainInitError(RuntimeError):
    """Posterior density is not finite at the chain's starting point."""


def mh_sample(
    data: Dataset,
    spec: PriorSpec,
    config: MHConfig,
    n0: float,
    seed: int,
    seed_path: tuple[int, ...] = (),
    init: tuple[float, float] | None = None,
) -> PosteriorSample:
    """Random-walk Metropolis on (ln r, ln K).

    The chain starts at the prior medians unless init gives a warm-start
    point on the natural scale.  During burn-in a global step factor
    adapts toward the target acceptance rate and per-coordinate scales
    are re-estimated from the chain's own spread; both freeze before any
    draw is kept, preserving detailed balance for the recorded sample.
    Fully deterministic for a given (seed, seed_path).
    """
    mu_r, sig2_r, mu_k, sig2_k = spec.log_scale()
    if init is not None:
        if init[0] <= 0 or init[1] <= 0:
            raise ChainInitError(f"warm start must be positive, got {init}")
        eta = np.array([math.log(init[0]), math.log(init[1])])
    else:
        eta = np.array([mu_r, mu_k])

    lp = log_target(eta, data, spec, n0)
    if not np.isfinite(lp):
        raise ChainInitError(
            f"log posterior is {lp} at initialization eta={eta.tolist()}; "
            "check priors, n0 and the dataset"
        )

    # 2.4/sqrt(d) is the classic random-walk scaling for d dimensions
    base = config.initial_scales or (math.sqrt(sig2_r), math.sqrt(sig2_k))
    rel = np.array(base, dtype=float)
    rel = np.maximum(rel, 1e-12)
    log_step = math.log(2.4 / math.sqrt(2.0))

    rng = spawn_rng(seed, *seed_path) if seed_path else spawn_rng(seed, Stream.FIT)
    total = config.burn_in + config.kept * config.thin
    kept = np.empty((config.kept, 2))
    n_kept = 0
    accepted_after_burn = 0
    window_accepts = 0
    burn_hist = np.empty((config.burn_in, 2)) if config.burn_in else None

    for it in range(total):
        step = math.exp(log_step) * rel
        prop = eta + step * rng.standard_normal(2)
        lp_prop = log_target(prop, data, spec, n0)
        if math.log(rng.random()) < lp_prop - lp:
            eta = prop
            lp = lp_prop
            window_accepts += 1
            if it >= config.burn_in:
                accepted_after_burn += 1

        if it < config.burn_in:
            burn_hist[it] = eta
            if config.adapt and (it + 1) % config.adapt_interval == 0:
                rate = window_accepts / config.adapt_interval
                window_accepts = 0
                log_step += 0.66 * (rate - config.target_acceptance)
                if it + 1 >= config.burn_in // 2:
                    tail = burn_hist[max(0, it + 1 - 1000) : it + 1]
                    spread = tail.std(axis=0)
                    rel = np.where(spread > 0, spread, rel)
                    rel = np.maximum(rel, 1e-12)
            if it + 1 == config.burn_in:
                window_accepts = 0
        else:
            k_idx = it - config.burn_in
            if (k_idx + 1) % config.thin == 0:
                kept[n_kept] = eta
                n_kept += 1

    draws = np.exp(kept[:n_kept])
    post_iters = config.kept * config.thin
    acc = accepted_after_burn / post_iters if post_iters else 0.0
    final_step = math.exp(log_step) * rel
    return PosteriorSample(
        draws=draws,
        acceptance_rate=float(acc),
        seed_path=(int(seed),) + tuple(int(p) for p in seed_path),
        proposal_scales=(float(final_step[0]), float(final_step[1])),
    )


def effective_sample_size(x: np.ndarray) -> float:
    """Autocorrelation-based ESS (initial positive sequence, simple form)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return float(n)
    centered = x - x.mean()
    var = float(centered @ centered) / n
    if var == 0:
        return float(n)
    acf_sum = 0.0
    for lag in range(1, min(n, 1000)):
        rho = float(centered[lag:] @ centered[:-lag]) / ((n - lag) * var)
        if rho <= 0:
            break
        acf_sum += rho
    return float(n / (1.0 + 2.0 * acf_sum))


@dataclass(frozen=True)
class PredictionBand:
    """Per-day 2.5/50/97.5 percent quantiles of predictions."""

    days: tuple[int, ...]
    lower: tuple[float, ...]
    median: tuple[float, ...]
    upper: tuple[float, ...]
    mode: str

    def __post_init__(self) -> None:
        lengths = {len(self.days), len(self.lower), len(self.median), len(self.upper)}
        if len(lengths) != 1:
            raise ValueError("band columns must have equal length")
        for lo, mid, hi in zip(self.lower, self.median, self.upper):
            if not (lo <= mid <= hi):
                raise ValueError("band quantiles must be ordered lower <= median <= upper")

    def to_dict(self) -> dict:
        return {
            "days": list(self.days),
            "lower": list(self.lower),
            "median": list(self.median),
            "upper": list(self.upper),
            "mode": self.mode,
        }


BAND_MODES = ("mean-curve", "predictive-count")


def prediction_band(
    post: PosteriorSample,
    grid_days,
    n0: float,
    mode: str = "mean-curve",
    seed: int = 0,
) -> PredictionBand:
    """Empirical posterior band over the given days.

    mean-curve quantifies uncertainty in the logistic mean itself;
    predictive-count adds Poisson observation noise by drawing one count
    per posterior draw per day (seeded, deterministic).
    """
    if mode not in BAND_MODES:
        raise ValueError(f"unknown band mode {mode!r}, expected one of {BAND_MODES}")
    days = [int(d) for d in grid_days]
    if not days:
        raise ValueError("band grid must be non-empty")
    values = curve_matrix(post, days, n0)
    if mode == "predictive-count":
        rng = spawn_rng(seed, Stream.PREDICT)
        values = rng.poisson(values).astype(float)
    q = np.quantile(values, [0.025, 0.5, 0.975], axis=0)
    return PredictionBand(
        days=tuple(days),
        lower=tuple(float(v) for v in q[0]),
        median=tuple(float(v) for v in q[1]),
        upper=tuple(float(v) for v in q[2]),
        mode=mode,
    )


def curve_matrix(post: PosteriorSample, days, n0: float) -> np.ndarray:
    """Logistic mean at each (draw, day); shape (n_kept, len(days))."""
    t = np.asarray(list(days), dtype=float)
    if np.any(t < 0):
        raise ValueError("days must be non-negative")
    r = post.draws[:, 0][:, None]
    k = post.draws[:, 1][:, None]
    decay = np.exp(-r * t[None, :])
    return k * n0 / ((k - n0) * decay + n0)


# serialization: draws as CSV `iter,r,K`, summary as a small JSON object

def posterior_to_csv(post: PosteriorSample, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iter", "r", "K"])
        for i, (r, k) in enumerate(post.draws):
            writer.writerow([i, repr(float(r)), repr(float(k))])


def posterior_from_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["iter", "r", "K"]:
            raise ValueError(f"expected header iter,r,K in {path}, got {reader.fieldnames}")
        rows = [(float(row["r"]), float(row["K"])) for row in reader]
    return np.array(rows)


def posterior_summary(post: PosteriorSample) -> dict:
    cov = np.cov(post.draws, rowvar=False, ddof=1) if post.n_kept > 1 else np.zeros((2, 2))
    return {
        "n_kept": post.n_kept,
        "acceptance_rate": post.acceptance_rate,
        "mean": {"r": float(post.r.mean()), "K": float(post.k.mean())},
        "cov": [[float(cov[0, 0]), float(cov[0, 1])], [float(cov[1, 0]), float(cov[1, 1])]],
        "ess": {
            "r": float(effective_sample_size(post.r)),
            "K": float(effective_sample_size(post.k)),
        },
    }
