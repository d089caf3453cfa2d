"""Seeded Monte Carlo campaigns.

Trial ``i`` of a campaign draws from ``child_rng(seed, i)``; vectorised
estimators draw chunk ``j`` from ``child_rng(seed, j)`` with a fixed chunk
size.  Results therefore do not depend on the number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .combinatorics import uea_probability_bound
from .core import Assembly, JigSystem
from .sampler import child_rng, jig_system_of_kind, sample_carving, sample_carvings
from .solver import Verdict, classify, is_feasible_batch
from .structure import exact_feasibility_probability, is_k_good

CONFIDENCE = 0.99


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class TrialStats:
    n: int
    q: int
    iota_kind: str
    trials: int
    seed: int
    uea_rate: float
    uva_rate: float
    undecided_rate: float
    multiple_rate: float
    mean_X: float
    mean_Y: float
    mean_nodes: float
    budget: int | None
    timeout: float | None = None
    wilson_ci: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def decided(self) -> int:
        return self.trials - round(self.undecided_rate * self.trials)


def _one_trial(args):
    n, sys, seed, i, limit, budget, timeout = args
    w = sample_carving(n, sys, child_rng(seed, i))
    c = classify(w, sys, limit=limit, node_budget=budget, timeout=timeout)
    return c.verdict, c.uva, c.duplicates_X, c.symmetric_Y, c.nodes_expanded


def run_trials(
    n: int,
    q: int,
    sys: JigSystem | None = None,
    trials: int = 100,
    seed: int = 0,
    budget: int | None = 10**7,
    *,
    iota_kind: str | None = None,
    limit: int = 2,
    timeout: float | None = None,
    workers: int = 1,
    progress=None,
) -> TrialStats:
    """Classify ``trials`` random puzzles and aggregate the verdicts."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if sys is None:
        sys = jig_system_of_kind(q, iota_kind or "identity")
    if sys.q != q:
        raise ValueError(f"jig system has q={sys.q}, expected {q}")
    kind = iota_kind or _kind_of(sys)
    tasks = [(n, sys, seed, i, limit, budget, timeout) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_one_trial, tasks, chunksize=max(1, trials // (4 * workers))))
    else:
        results = []
        for i, t in enumerate(tasks):
            results.append(_one_trial(t))
            if progress is not None:
                progress(i + 1, trials)
    uea = sum(v is Verdict.UEA for v, *_ in results)
    und = sum(v is Verdict.UNDECIDED for v, *_ in results)
    mult = sum(v is Verdict.MULTIPLE_NONSIMILAR for v, *_ in results)
    uva = sum(r[1] for r in results)
    return TrialStats(
        n=n,
        q=q,
        iota_kind=kind,
        trials=trials,
        seed=seed,
        uea_rate=uea / trials,
        uva_rate=uva / trials,
        undecided_rate=und / trials,
        multiple_rate=mult / trials,
        mean_X=sum(r[2] for r in results) / trials,
        mean_Y=sum(r[3] for r in results) / trials,
        mean_nodes=sum(r[4] for r in results) / trials,
        budget=budget,
        timeout=timeout,
        wilson_ci={
            "uea": wilson_interval(uea, trials),
            "uva": wilson_interval(uva, trials),
            "undecided": wilson_interval(und, trials),
            "multiple": wilson_interval(mult, trials),
        },
    )


def _kind_of(sys: JigSystem) -> str:
    s = sys.num_self_fitting
    if s == sys.q:
        return "identity"
    if s == sys.q % 2:
        return "paired"
    return f"mixed:{s}"


def sweep(
    n: int,
    q_list,
    sys_kind: str = "identity",
    trials: int = 100,
    seed: int = 0,
    budget: int | None = 10**7,
    **kwargs,
) -> list[TrialStats]:
    q_list = list(q_list)
    if not q_list:
        raise ValueError("q_list is empty")
    if q_list != sorted(q_list):
        raise ValueError("q_list must be sorted")
    return [
        run_trials(n, q, jig_system_of_kind(q, sys_kind), trials, seed, budget, iota_kind=sys_kind, **kwargs)
        for q in q_list
    ]


SWEEP_COLUMNS = (
    "n", "q", "iota_kind", "trials", "uea_rate", "uva_rate", "undecided_rate",
    "mean_x", "mean_y", "mean_nodes", "uea_bound_log10",
)


def stats_row(s: TrialStats) -> list:
    return [
        s.n, s.q, s.iota_kind, s.trials, s.uea_rate, s.uva_rate, s.undecided_rate,
        s.mean_X, s.mean_Y, s.mean_nodes, uea_probability_bound(s.n, s.q).log10,
    ]


@dataclass
class RateEstimate:
    successes: int
    trials: int
    ci: tuple[float, float]

    @property
    def rate(self) -> float:
        return self.successes / self.trials


def kgood_rate(n: int, q: int, k: int, trials: int, seed: int, sys: JigSystem | None = None) -> RateEstimate:
    """Fraction of random carvings whose planted assembly is k-good."""
    if k > n:
        raise ValueError(f"window size k={k} exceeds n={n}")
    sys = sys or jig_system_of_kind(q, "identity")
    planted = Assembly.planted(n)
    good = sum(
        is_k_good(planted, sample_carving(n, sys, child_rng(seed, i)), sys, k) for i in range(trials)
    )
    return RateEstimate(good, trials, wilson_interval(good, trials))


@dataclass
class FeasibilityMC:
    hits: int
    trials: int
    exact: float

    @property
    def empirical(self) -> float:
        return self.hits / self.trials

    @property
    def sigma(self) -> float:
        p = self.exact
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def z(self) -> float:
        diff = self.empirical - self.exact
        if self.sigma == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.sigma


CHUNK = 50_000


def feasibility_mc(a: Assembly, n: int, sys: JigSystem, trials: int, seed: int, chunk: int = CHUNK) -> FeasibilityMC:
    """Empirical feasibility rate of ``a`` against its exact probability."""
    if a.n != n:
        raise ValueError("assembly does not live in the n-grid")
    hits = 0
    for j, size in enumerate(_chunks(trials, chunk)):
        north, west = sample_carvings(n, sys.q, size, child_rng(seed, j))
        hits += int(is_feasible_batch(a, north, west, sys).sum())
    return FeasibilityMC(hits, trials, float(exact_feasibility_probability(a, sys).value))


def _chunks(total: int, size: int):
    while total > 0:
        yield min(size, total)
        total -= size


@dataclass
class PieceStatsMC:
    trials: int
    mean_X: float
    mean_Y: float
    se_X: float
    se_Y: float


def piece_grids_batch(north: np.ndarray, west: np.ndarray, sys: JigSystem) -> np.ndarray:
    """Batch version of :func:`randjig.core.piece_grid`: shape ``(B, n, n, 4)``."""
    n = west.shape[1]
    t = sys.table
    south = t[north[:, 1:, :]]
    south[:, n - 1, :] = north[:, n, :]
    east = t[west[:, :, 1:]]
    east[:, :, n - 1] = west[:, :, n]
    return np.stack([north[:, :n, :], east, south, west[:, :, :n]], axis=-1)


def box_counts_batch(grids: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Per carving ``(X, Y)``: duplicate pairs and symmetric pieces."""
    b = grids.shape[0]
    pieces = grids.reshape(b, -1, 4).astype(np.int64) - 1
    y = ((pieces[..., 0] == pieces[..., 2]) & (pieces[..., 1] == pieces[..., 3])).sum(axis=1)
    weights = np.array([q**3, q**2, q, 1], dtype=np.int64)
    codes = np.min(
        np.stack([(np.roll(pieces, -k, axis=-1) * weights).sum(-1) for k in range(4)]), axis=0
    )
    codes.sort(axis=1)
    m = codes.shape[1]
    pos = np.broadcast_to(np.arange(m), codes.shape)
    new_run = np.ones_like(codes, dtype=bool)
    new_run[:, 1:] = codes[:, 1:] != codes[:, :-1]
    run_start = np.maximum.accumulate(np.where(new_run, pos, 0), axis=1)
    x = (pos - run_start).sum(axis=1)
    return x, y


def piece_stats(n: int, q: int, sys: JigSystem, trials: int, seed: int, chunk: int = 10_000) -> PieceStatsMC:
    """Monte Carlo means of ``X`` and ``Y`` (no solving involved)."""
    xs, ys = [], []
    for j, size in enumerate(_chunks(trials, chunk)):
        north, west = sample_carvings(n, q, size, child_rng(seed, j))
        x, y = box_counts_batch(piece_grids_batch(north, west, sys), q)
        xs.append(x)
        ys.append(y)
    x = np.concatenate(xs).astype(float)
    y = np.concatenate(ys).astype(float)
    return PieceStatsMC(
        trials,
        float(x.mean()),
        float(y.mean()),
        float(x.std(ddof=1) / math.sqrt(trials)),
        float(y.std(ddof=1) / math.sqrt(trials)),
    )
