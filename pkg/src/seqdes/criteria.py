"""Design criteria scored from posterior samples.

Classical scores reduce the posterior covariance of (r, K): the trace
(A), the determinant (D), and the average prediction variance over the
design region (I).  Their Bayesian counterparts (UI, UA, UD) are
expected utilities of adding one more sampling day, estimated by
simulating outcomes at the candidate from the posterior predictive and
refitting.  Every criterion is oriented so that lower is better.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .bayes import MHConfig, PosteriorSample, PriorSpec, curve_matrix, mh_sample
from .growth import Dataset
from .seeds import Stream, spawn_rng

CLASSICAL_KINDS = ("A", "D", "I")
UTILITY_KINDS = ("UI", "UA", "UD")
ALL_KINDS = CLASSICAL_KINDS + UTILITY_KINDS

REFIT_MODES = ("importance", "full-mh")
ESS_FLOOR = 50.0
REFIT_MH = MHConfig(kept=2_000, burn_in=500)

DET_CLAMP = 1e-12


def parse_kind(token: str) -> str:
    kind = token.strip().upper().replace("-", "").replace("_", "")
    if kind in ALL_KINDS:
        return kind
    raise ValueError(f"unknown criterion {token!r}, expected one of {ALL_KINDS}")


@dataclass(frozen=True)
class CovMatrix2:
    """2x2 covariance of (r, K) draws."""

    var_r: float
    var_k: float
    cov_rk: float

    def __post_init__(self) -> None:
        tol = DET_CLAMP * max(1.0, abs(self.var_r), abs(self.var_k))
        if self.var_r < -tol or self.var_k < -tol:
            raise ValueError(f"variances must be non-negative, got {self}")

    def trace(self) -> float:
        return max(self.var_r, 0.0) + max(self.var_k, 0.0)

    def det(self) -> float:
        d = self.var_r * self.var_k - self.cov_rk**2
        # sample covariances are PSD up to roundoff; clamp that noise at zero
        tol = max(DET_CLAMP, DET_CLAMP * abs(self.var_r * self.var_k))
        if d < 0 and d >= -tol:
            return 0.0
        return d

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.var_r, self.cov_rk], [self.cov_rk, self.var_k]])


def posterior_cov(post: PosteriorSample) -> CovMatrix2:
    """Sample covariance of the kept (r, K) draws, n-1 divisor."""
    if post.n_kept < 2:
        raise ValueError("posterior covariance needs at least two draws")
    cov = np.cov(post.draws, rowvar=False, ddof=1)
    return CovMatrix2(var_r=float(cov[0, 0]), var_k=float(cov[1, 1]), cov_rk=float(cov[0, 1]))


def a_criterion(cov: CovMatrix2) -> float:
    """Trace of the posterior covariance; sum of the parameter variances."""
    return cov.trace()


def d_criterion(cov: CovMatrix2) -> float:
    """Determinant of the posterior covariance, clamped at zero near roundoff."""
    return cov.det()


def i_criterion(post: PosteriorSample, grid_days: Sequence[int], n0: float) -> float:
    """Average over the grid of the across-draw variance of the mean curve."""
    days = list(grid_days)
    if not days:
        raise ValueError("prediction grid must be non-empty")
    if post.n_kept < 2:
        raise ValueError("i criterion needs at least two draws")
    curves = curve_matrix(post, days, n0)
    return float(curves.var(axis=0, ddof=1).mean())


@dataclass(frozen=True)
class Criterion:
    """A named criterion plus the settings its evaluation needs.

    pred_days fixes the grid the I-flavored scores average over (defaults
    to the full design region 1..season at the call site).  draws and
    refit only matter for the UI/UA/UD utilities.
    """

    kind: str
    pred_days: tuple[int, ...] | None = None
    draws: int = 200
    refit: str = "importance"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", parse_kind(self.kind))
        if self.refit not in REFIT_MODES:
            raise ValueError(f"unknown refit mode {self.refit!r}, expected one of {REFIT_MODES}")
        if self.draws < 1:
            raise ValueError("draws must be >= 1")

    def is_utility(self) -> bool:
        return self.kind in UTILITY_KINDS

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pred_days": list(self.pred_days) if self.pred_days else None,
            "draws": self.draws,
            "refit": self.refit,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Criterion":
        payload = dict(payload)
        pred = payload.get("pred_days")
        if pred is not None:
            payload["pred_days"] = tuple(pred)
        return cls(**payload)


def _weighted_cov(draws: np.ndarray, weights: np.ndarray) -> CovMatrix2:
    mean = weights @ draws
    centered = draws - mean
    cov = (weights[:, None] * centered).T @ centered
    return CovMatrix2(var_r=float(cov[0, 0]), var_k=float(cov[1, 1]), cov_rk=float(cov[0, 1]))


def _poisson_logweights(lam: np.ndarray, y: float) -> np.ndarray:
    # Poisson log density in y up to the y! term, valid for real-valued y
    return y * np.log(lam) - lam


def _normalize(logw: np.ndarray) -> tuple[np.ndarray, float]:
    """Softmax plus effective sample size (sum w)^2 / sum w^2."""
    shifted = logw - logw.max()
    w = np.exp(shifted)
    total = w.sum()
    w = w / total
    ess = 1.0 / float(w @ w)
    return w, ess


def preposterior_score(
    kind: str,
    post: PosteriorSample,
    data: Dataset,
    candidate: int,
    n0: float,
    pred_days: Sequence[int] | None = None,
) -> float:
    """Deterministic score of a candidate day for the classical criteria.

    The candidate's contribution is taken at its expected effect: the
    posterior draws are importance-reweighted by the likelihood of
    observing the posterior-predictive mean count at the candidate day,
    and the criterion is evaluated under those weights.  No randomness
    is involved, so repeated scoring always agrees.
    """
    kind = parse_kind(kind)
    if kind not in CLASSICAL_KINDS:
        raise ValueError(f"preposterior score applies to {CLASSICAL_KINDS}, got {kind}")
    if candidate <= data.last_day():
        raise ValueError(f"candidate {candidate} must follow the last observed day")
    lam = curve_matrix(post, [candidate], n0)[:, 0]
    y_star = float(lam.mean())
    w, _ = _normalize(_poisson_logweights(lam, y_star))
    if kind == "A":
        return _weighted_cov(post.draws, w).trace()
    if kind == "D":
        return _weighted_cov(post.draws, w).det()
    days = list(pred_days) if pred_days else list(range(1, max(int(candidate), data.last_day()) + 1))
    curves = curve_matrix(post, days, n0)
    mean = w @ curves
    var = w @ (curves - mean) ** 2
    return float(var.mean())


class _UtilityTables:
    """Per-candidate refit summaries shared across utility calls.

    Updated-posterior scores depend only on the integer outcome, so each
    (candidate, y2) pair is summarized once: trace and determinant of
    the reweighted covariance plus the importance ESS, and, when a chain
    refit is required, the trace and determinant from a short chain
    seeded by (candidate, y2).  Sharing the table across replicates
    changes nothing numerically; it only avoids recomputing identical
    summaries.  Missing reweighting entries are filled in one vectorized
    pass per batch: a row-wise softmax over the draws and a single
    matrix product against centered moment features.
    """

    def __init__(
        self,
        post: PosteriorSample,
        n0: float,
        data: Dataset,
        priors: PriorSpec,
        refit_mh: MHConfig,
        seed: int,
    ):
        self.post = post
        self.n0 = n0
        self.data = data
        self.priors = priors
        self.refit_mh = refit_mh
        self.seed = seed
        self.lam: dict[int, np.ndarray] = {}
        self.loglam: dict[int, np.ndarray] = {}
        self.stats: dict[int, dict[int, tuple[float, float, float]]] = {}
        self.chain_stats: dict[int, dict[int, tuple[float, float]]] = {}
        # centered draws keep the weighted second moments away from the
        # catastrophic cancellation a raw E[x^2] - E[x]^2 pass would hit
        r = post.r - post.r.mean()
        k = post.k - post.k.mean()
        self._features = np.column_stack([r, k, r * r, k * k, r * k])

    def lam_for(self, candidate: int) -> np.ndarray:
        if candidate not in self.lam:
            self.lam[candidate] = curve_matrix(self.post, [candidate], self.n0)[:, 0]
        return self.lam[candidate]

    def _fill(self, candidate: int, outcomes: Sequence[int]) -> None:
        lam = self.lam_for(candidate)
        if candidate not in self.loglam:
            self.loglam[candidate] = np.log(lam)
        y = np.asarray(outcomes, dtype=float)[:, None]
        logw = y * self.loglam[candidate][None, :] - lam[None, :]
        logw -= logw.max(axis=1, keepdims=True)
        w = np.exp(logw)
        w /= w.sum(axis=1, keepdims=True)
        ess = 1.0 / np.einsum("ij,ij->i", w, w)
        mom = w @ self._features
        table = self.stats.setdefault(candidate, {})
        for row, outcome in enumerate(outcomes):
            mr, mk, mrr, mkk, mrk = mom[row]
            var_r = float(mrr - mr * mr)
            var_k = float(mkk - mk * mk)
            # weights collapsed onto one draw cancel the moments to
            # roundoff; clamp negatives on that scale (ESS ~ 1 sends
            # these through the chain refit anyway)
            if -DET_CLAMP * max(mrr, 1.0) <= var_r < 0.0:
                var_r = 0.0
            if -DET_CLAMP * max(mkk, 1.0) <= var_k < 0.0:
                var_k = 0.0
            cov = CovMatrix2(var_r=var_r, var_k=var_k, cov_rk=float(mrk - mr * mk))
            table[int(outcome)] = (cov.trace(), cov.det(), float(ess[row]))

    def stats_batch(self, candidate: int, y2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Aligned (trace, det, ess) arrays for a vector of outcomes."""
        table = self.stats.setdefault(candidate, {})
        missing = sorted({int(v) for v in y2} - table.keys())
        if missing:
            self._fill(candidate, missing)
        rows = [table[int(v)] for v in y2]
        tr, det, ess = (np.array(col) for col in zip(*rows))
        return tr, det, ess

    def stats_for(self, candidate: int, y2: int) -> tuple[float, float, float]:
        table = self.stats.setdefault(candidate, {})
        if int(y2) not in table:
            self._fill(candidate, [int(y2)])
        return table[int(y2)]

    def chain_stats_for(self, candidate: int, y2: int) -> tuple[float, float]:
        """Trace and determinant from a short chain refit on the outcome."""
        table = self.chain_stats.setdefault(candidate, {})
        outcome = int(y2)
        if outcome not in table:
            refit_post = mh_sample(
                self.data.append(candidate, outcome),
                self.priors,
                self.refit_mh,
                n0=self.n0,
                seed=self.seed,
                seed_path=(Stream.REFIT, int(candidate), outcome),
                init=self.post.last_draw(),
            )
            cov = np.cov(refit_post.draws, rowvar=False, ddof=1)
            tr = float(cov[0, 0] + cov[1, 1])
            det = float(max(cov[0, 0] * cov[1, 1] - cov[0, 1] ** 2, 0.0))
            table[outcome] = (tr, det)
        return table[outcome]


def bayes_utility(
    kind: str,
    post: PosteriorSample,
    data: Dataset,
    candidate: int,
    n0: float,
    priors: PriorSpec,
    draws: int = 200,
    refit: str = "importance",
    seed: int = 0,
    seed_path: tuple[int, ...] = (),
    refit_mh: MHConfig = REFIT_MH,
    _tables: _UtilityTables | None = None,
) -> float:
    """Monte Carlo expected utility of sampling at the candidate day.

    Simulates ``draws`` outcomes from the posterior predictive at the
    candidate, updates the posterior for each, and averages the loss:
    squared deviation from the predictive mean (UI), the trace (UA) or
    determinant (UD) of the updated covariance.  Lower is better.

    The refit summaries are deterministic per outcome: the importance
    path reweights the existing draws by the outcome's likelihood, and
    when its effective sample size drops below 50 (or refit is full-mh)
    the outcome is refit once with a short chain seeded by the
    (candidate, outcome) pair.  Deterministic for a given (seed,
    seed_path).
    """
    kind = parse_kind(kind)
    if kind not in UTILITY_KINDS:
        raise ValueError(f"bayes utility applies to {UTILITY_KINDS}, got {kind}")
    if refit not in REFIT_MODES:
        raise ValueError(f"unknown refit mode {refit!r}")
    if candidate <= data.last_day():
        raise ValueError(f"candidate {candidate} must follow the last observed day")
    if draws < 1:
        raise ValueError("draws must be >= 1")

    tables = _tables if _tables is not None else _UtilityTables(post, n0, data, priors, refit_mh, seed)
    lam = tables.lam_for(candidate)
    path = tuple(seed_path) + (Stream.UTILITY, int(candidate))
    rng = spawn_rng(seed, *path)
    idx = rng.integers(0, post.n_kept, size=draws)
    y2 = rng.poisson(lam[idx])

    if kind == "UI":
        mean = float(y2.mean())
        return float(np.mean((y2 - mean) ** 2))

    if refit == "importance":
        tr, det, ess = tables.stats_batch(candidate, y2)
        values = tr if kind == "UA" else det
        chain_refits = np.nonzero(ess < ESS_FLOOR)[0]
    else:
        values = np.zeros(draws)
        chain_refits = np.arange(draws)
    for m in chain_refits:
        tr_m, det_m = tables.chain_stats_for(candidate, int(y2[m]))
        values[m] = tr_m if kind == "UA" else det_m
    return float(values.mean())


@dataclass(frozen=True)
class CandidateScoreTable:
    """Scores and selection frequencies over a window of candidate days."""

    days: tuple[int, ...]
    scores: tuple[float, ...]
    wins: tuple[int, ...]
    replicates: int

    def __post_init__(self) -> None:
        if not (len(self.days) == len(self.scores) == len(self.wins)):
            raise ValueError("table columns must have equal length")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if sum(self.wins) != self.replicates:
            raise ValueError("wins must sum to the replicate count")

    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.replicates) for w in self.wins)

    def winner(self) -> int:
        best = max(self.wins)
        return self.days[self.wins.index(best)]

    def to_rows(self) -> list[dict]:
        return [
            {"day": d, "score": s, "probability": w / self.replicates}
            for d, s, w in zip(self.days, self.scores, self.wins)
        ]


def argmin_day(days: Sequence[int], scores: Sequence[float]) -> int:
    """Day with the smallest score; ties resolve to the earliest day."""
    best_idx = 0
    for i in range(1, len(scores)):
        if scores[i] < scores[best_idx]:
            best_idx = i
    return int(days[best_idx])


def selection_frequencies(
    kind: str,
    post: PosteriorSample,
    data: Dataset,
    window: Sequence[int],
    n0: float,
    priors: PriorSpec,
    replicates: int = 500,
    draws: int = 200,
    refit: str = "importance",
    seed: int = 0,
    pred_days: Sequence[int] | None = None,
    _tables: _UtilityTables | None = None,
) -> CandidateScoreTable:
    """How often each window day wins the criterion across replicates.

    Classical criteria are deterministic, so one evaluation decides the
    winner and its probability is exactly one.  Utility criteria rerun
    the scoring with an independent sub-seed per replicate; probability
    is wins over replicates, an exact rational.
    """
    kind = parse_kind(kind)
    days = [int(d) for d in window]
    if not days:
        raise ValueError("window must be non-empty")
    wins = [0] * len(days)

    if kind in CLASSICAL_KINDS:
        scores = [preposterior_score(kind, post, data, d, n0, pred_days) for d in days]
        winner = argmin_day(days, scores)
        wins[days.index(winner)] = replicates
        return CandidateScoreTable(tuple(days), tuple(scores), tuple(wins), replicates)

    tables = _tables if _tables is not None else _UtilityTables(post, n0, data, priors, REFIT_MH, seed)
    score_sums = np.zeros(len(days))
    for rep in range(replicates):
        rep_scores = [
            bayes_utility(
                kind,
                post,
                data,
                d,
                n0,
                priors,
                draws=draws,
                refit=refit,
                seed=seed,
                seed_path=(Stream.FREQUENCY, rep),
                _tables=tables,
            )
            for d in days
        ]
        score_sums += rep_scores
        winner = argmin_day(days, rep_scores)
        wins[days.index(winner)] += 1
    scores = tuple(float(s / replicates) for s in score_sums)
    return CandidateScoreTable(tuple(days), scores, tuple(wins), replicates)


def table_to_csv(table: CandidateScoreTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "score", "probability"])
        for row in table.to_rows():
            writer.writerow([row["day"], repr(row["score"]), repr(row["probability"])])
