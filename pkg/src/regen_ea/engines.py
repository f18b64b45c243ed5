"""Evolution loops: classic / ReGen GA and classic / ReGen HAEA.

Every run owns two PCG64 streams spawned from its seed: one drives evolution
(selection, crossover, mutation, operator choice) and one drives marking.  The
marking stream never feeds back into the evolution stream, so a ReGen run that
never marks replays the classic run draw for draw.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .epigenome import NO_TAG, MarkingParams, grow_population, mark
from .operators import Individual, cross_rows, random_population, tournament_indices
from .problems import Problem

log = logging.getLogger(__name__)

ENGINES = ("ga", "haea")
REPLACEMENTS = ("generational", "steady_state")
MUTATIONS = ("per_bit", "single_bit")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MarkingPeriod:
    """Inclusive iteration range ``start..end``."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ConfigError(f"marking period needs 0 <= start <= end, got {self.start}..{self.end}")

    @classmethod
    def from_duration(cls, start: int, duration: int) -> "MarkingPeriod":
        return cls(start, start + duration)


DEFAULT_PERIODS = tuple(MarkingPeriod.from_duration(s, 150) for s in (200, 500, 800))


def marking_period_on(it: int, periods: Sequence[MarkingPeriod]) -> bool:
    return any(p.start <= it <= p.end for p in periods)


@dataclass(frozen=True)
class EngineConfig:
    engine: str = "ga"
    replacement: str = "generational"
    regen_enabled: bool = True
    pop_size: int = 100
    iterations: int = 1000
    crossover_rate: float = 1.0
    mutation: Optional[str] = None
    tournament_k: int = 4
    marking: MarkingParams = field(default_factory=MarkingParams)
    periods: tuple = DEFAULT_PERIODS
    seed: int = 0

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.replacement not in REPLACEMENTS:
            raise ConfigError(f"unknown replacement {self.replacement!r}")
        if self.mutation is None:
            object.__setattr__(self, "mutation", "per_bit" if self.engine == "ga" else "single_bit")
        if self.mutation not in MUTATIONS:
            raise ConfigError(f"unknown mutation {self.mutation!r}")
        if self.pop_size < 2 or self.iterations < 1 or self.tournament_k < 1:
            raise ConfigError("pop_size >= 2, iterations >= 1 and tournament_k >= 1 are required")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError(f"crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        periods = tuple(sorted(self.periods, key=lambda p: p.start))
        for prev, nxt in zip(periods, periods[1:]):
            if nxt.start <= prev.end:
                raise ConfigError(f"marking periods overlap: {prev} and {nxt}")
        object.__setattr__(self, "periods", periods)


@dataclass
class RunTrace:
    best_fitness_per_iteration: np.ndarray
    final_best: Individual
    best_iteration: int

    @property
    def final_fitness(self) -> float:
        return float(self.final_best.fitness)


@dataclass
class GenerationState:
    """Snapshot handed to ``on_generation`` callbacks (arrays are live; copy to keep)."""

    iteration: int
    genotypes: np.ndarray
    epigenotypes: np.ndarray
    fitness: np.ndarray
    op_rates: Optional[np.ndarray] = None


Callback = Callable[[GenerationState], None]


def rng_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    evo, epi = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(evo)), np.random.Generator(np.random.PCG64(epi))


class _Run:
    """Shared bookkeeping for both engines."""

    def __init__(self, config: EngineConfig, problem: Problem):
        if problem.genome_length < 2:
            raise ConfigError("genome length must be at least 2")
        self.config = config
        self.problem = problem
        self.evo, self.epi_rng = rng_streams(config.seed)
        n, length = config.pop_size, problem.genome_length
        self.geno = random_population(n, length, self.evo)
        self.epi = np.full((n, length), NO_TAG, dtype=np.int16)
        self.fit = self.evaluate(self.geno, self.epi)
        self.trace = np.empty(config.iterations, dtype=np.float64)
        self.best: Optional[Individual] = None
        self.best_score = -np.inf
        self.best_iteration = -1

    def evaluate(self, geno: np.ndarray, epi: np.ndarray) -> np.ndarray:
        pheno = grow_population(geno, epi) if self.config.regen_enabled else geno
        return self.problem.evaluate(pheno)

    def maybe_mark(self, epi: np.ndarray, it: int) -> np.ndarray:
        if self.config.regen_enabled and marking_period_on(it, self.config.periods):
            return mark(epi, self.config.marking, self.epi_rng)
        return epi

    def mutate(self, geno: np.ndarray) -> np.ndarray:
        rows, length = geno.shape
        if self.config.mutation == "per_bit":
            return geno ^ (self.evo.random((rows, length)) < 1.0 / length).astype(np.uint8)
        out = geno.copy()
        out[np.arange(rows), self.evo.integers(0, length, rows)] ^= 1
        return out

    def record(self, it: int, rates: Optional[np.ndarray] = None) -> None:
        score = self.problem.score(self.fit)
        i = int(np.argmax(score))
        self.trace[it] = self.fit[i]
        if score[i] > self.best_score:
            self.best_score = score[i]
            self.best_iteration = it
            self.best = Individual(self.geno[i], self.epi[i], float(self.fit[i]),
                                   None if rates is None else rates[i].copy())

    def result(self) -> RunTrace:
        return RunTrace(self.trace, self.best, self.best_iteration)


def run_ga(config: EngineConfig, problem: Problem, on_generation: Optional[Callback] = None) -> RunTrace:
    """Classic or ReGen GA with generational or elitist steady-state replacement."""
    if config.engine != "ga":
        raise ConfigError("run_ga needs engine='ga'")
    run = _Run(config, problem)
    n, length = config.pop_size, problem.genome_length
    pairs = (n + 1) // 2
    for it in range(config.iterations):
        score = problem.score(run.fit)
        parents = tournament_indices(score, config.tournament_k, 2 * pairs, run.evo)
        a, b = parents[0::2], parents[1::2]
        recombine = run.evo.random(pairs) < config.crossover_rate
        cuts = np.where(recombine, run.evo.integers(1, length, pairs), length)
        g1, g2 = cross_rows(run.geno[a], run.geno[b], cuts)
        e1, e2 = cross_rows(run.epi[a], run.epi[b], cuts)
        child_geno = run.mutate(np.concatenate([g1, g2])[:n])
        child_epi = run.maybe_mark(np.concatenate([e1, e2])[:n], it)
        child_fit = run.evaluate(child_geno, child_epi)

        if config.replacement == "generational":
            run.geno, run.epi, run.fit = child_geno, child_epi, child_fit
        else:
            best_child = int(np.argmax(problem.score(child_fit)))
            worst = int(np.argmin(score))
            if problem.score(child_fit[best_child]) > score[worst]:
                run.geno[worst] = child_geno[best_child]
                run.epi[worst] = child_epi[best_child]
                run.fit[worst] = child_fit[best_child]
        run.record(it)
        if on_generation is not None:
            on_generation(GenerationState(it, run.geno, run.epi, run.fit))
    return run.result()


def update_rates(rates: np.ndarray, op, improved, delta) -> np.ndarray:
    """Reward (``1 + delta``) or punish (``1 - delta``) the operator used, then renormalise.

    Works on one rate vector or row-wise on an ``(N, n_ops)`` matrix.
    """
    rates = np.array(rates, dtype=np.float64)
    flat = rates.reshape(-1, rates.shape[-1])
    rows = np.arange(flat.shape[0])
    factor = np.where(np.asarray(improved).reshape(-1), 1.0 + np.asarray(delta).reshape(-1),
                      1.0 - np.asarray(delta).reshape(-1))
    flat[rows, np.asarray(op).reshape(-1)] *= factor
    flat /= flat.sum(axis=1, keepdims=True)
    return flat.reshape(rates.shape)


def run_haea(config: EngineConfig, problem: Problem, on_generation: Optional[Callback] = None) -> RunTrace:
    """HAEA with two operators (single point crossover, mutation) and per-individual rates.

    Each individual picks an operator by its own rates, keeps the best offspring
    (steady state: best of offspring and itself), then rewards the operator by
    a random factor ``1 + delta`` on strict improvement or punishes it by
    ``1 - delta`` otherwise.
    """
    if config.engine != "haea":
        raise ConfigError("run_haea needs engine='haea'")
    run = _Run(config, problem)
    n, length = config.pop_size, problem.genome_length
    rows = np.arange(n)
    rates = np.full((n, 2), 0.5)
    steady = config.replacement == "steady_state"
    for it in range(config.iterations):
        score = problem.score(run.fit)
        use_mutation = run.evo.random(n) >= rates[:, 0]
        partner = tournament_indices(score, config.tournament_k, n, run.evo)
        cuts = run.evo.integers(1, length, n)
        mutant = run.mutate(run.geno)
        delta = run.evo.random(n)

        c1, c2 = cross_rows(run.geno, run.geno[partner], cuts)
        e1, e2 = cross_rows(run.epi, run.epi[partner], cuts)
        off_geno = np.concatenate([np.where(use_mutation[:, None], mutant, c1), c2])
        off_epi = np.concatenate([np.where(use_mutation[:, None], run.epi, e1), e2])
        off_epi = run.maybe_mark(off_epi, it)
        off_score = problem.score(run.evaluate(off_geno, off_epi))

        candidates = np.stack([
            off_score[:n],
            np.where(use_mutation, -np.inf, off_score[n:]),
            score if steady else np.full(n, -np.inf),
        ], axis=1)
        pick = np.argmax(candidates, axis=1)
        child_score = candidates[rows, pick]

        rates = update_rates(rates, use_mutation.astype(np.intp), child_score > score, delta)

        from_off = pick < 2
        src = np.where(pick == 1, rows + n, rows)
        run.geno = np.where(from_off[:, None], off_geno[src], run.geno)
        run.epi = np.where(from_off[:, None], off_epi[src], run.epi)
        run.fit = child_score if problem.maximize else -child_score
        run.record(it, rates)
        if on_generation is not None:
            on_generation(GenerationState(it, run.geno, run.epi, run.fit, rates))
    return run.result()


def run(config: EngineConfig, problem: Problem, on_generation: Optional[Callback] = None) -> RunTrace:
    engine = run_ga if config.engine == "ga" else run_haea
    return engine(config, problem, on_generation)


def _seeded(config: EngineConfig, seed: int) -> EngineConfig:
    from dataclasses import replace

    return replace(config, seed=seed % 2**64)


def _run_one(args):
    config, problem = args
    return run(config, problem)


def run_experiment(config: EngineConfig, problem: Problem, runs: int, jobs: int = 1) -> list[RunTrace]:
    """``runs`` independent runs seeded ``config.seed + i``; results ordered by run index."""
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    tasks = [(_seeded(config, config.seed + i), problem) for i in range(runs)]
    if jobs <= 1 or runs == 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks))
