"""Selection, recombination and mutation.

The ``Individual``-level functions are the public contract.  The engines use
the population-level helpers below them, which operate on whole ``(N, L)``
matrices and draw their random numbers in the same order on every backend.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .epigenome import empty_epigenotype
from .genome import BitsLike, as_bits


@dataclass(eq=False)
class Individual:
    genotype: np.ndarray
    epigenotype: np.ndarray = field(default=None)
    fitness: Optional[float] = None
    op_rates: Optional[np.ndarray] = None

    def __post_init__(self):
        self.genotype = as_bits(self.genotype).copy()
        if self.epigenotype is None:
            self.epigenotype = empty_epigenotype(self.genotype.size)
        self.epigenotype = np.asarray(self.epigenotype, dtype=np.int16).copy()
        if self.genotype.shape != self.epigenotype.shape:
            raise ValueError("genotype and epigenotype lengths differ")
        if self.op_rates is not None:
            rates = np.asarray(self.op_rates, dtype=np.float64)
            if (rates < 0).any() or abs(rates.sum() - 1.0) > 1e-9:
                raise ValueError(f"operator rates must be a distribution, got {rates}")
            self.op_rates = rates

    def __len__(self) -> int:
        return self.genotype.size


def _score(fitness: float, maximize: bool) -> float:
    return fitness if maximize else -fitness


def tournament_select(population: Sequence[Individual], k: int, rng: np.random.Generator,
                      direction: str = "maximize") -> Individual:
    """Best of ``k`` uniform draws with replacement; ties go to the first drawn."""
    if not population:
        raise ValueError("cannot select from an empty population")
    if k < 1:
        raise ValueError("tournament size must be positive")
    maximize = direction == "maximize"
    draws = rng.integers(0, len(population), k)
    best = draws[0]
    for i in draws[1:]:
        if _score(population[i].fitness, maximize) > _score(population[best].fitness, maximize):
            best = i
    return population[best]


def single_point_crossover(p1: Individual, p2: Individual,
                           rng: np.random.Generator) -> tuple[Individual, Individual]:
    """Cut both parents at the same point; each allele travels with its tag."""
    if len(p1) != len(p2):
        raise ValueError("parents must have equal length")
    if len(p1) < 2:
        raise ValueError("crossover needs chromosomes of length >= 2")
    cut = int(rng.integers(1, len(p1)))
    return _cross_at(p1, p2, cut), _cross_at(p2, p1, cut)


def _cross_at(head: Individual, tail: Individual, cut: int) -> Individual:
    return Individual(
        np.concatenate([head.genotype[:cut], tail.genotype[cut:]]),
        np.concatenate([head.epigenotype[:cut], tail.epigenotype[cut:]]),
    )


def per_bit_mutation(ind: Individual, rate: float, rng: np.random.Generator) -> Individual:
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must be a probability, got {rate}")
    flips = rng.random(len(ind)) < rate
    return replace(ind, genotype=ind.genotype ^ flips.astype(np.uint8), fitness=None)


def single_bit_mutation(ind: Individual, rng: np.random.Generator) -> Individual:
    if len(ind) < 1:
        raise ValueError("cannot mutate an empty chromosome")
    geno = ind.genotype.copy()
    geno[rng.integers(0, len(ind))] ^= 1
    return replace(ind, genotype=geno, fitness=None)


# --------------------------------------------------------------------------
# population-level helpers (``score`` is always "larger is better")


def tournament_indices(score: np.ndarray, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    draws = rng.integers(0, score.size, (count, k))
    winner = np.argmax(score[draws], axis=1)  # first maximum == first drawn
    return draws[np.arange(count), winner]


def cross_rows(a: np.ndarray, b: np.ndarray, cuts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise single point crossover of two matrices at per-row ``cuts``."""
    head = np.arange(a.shape[1])[None, :] < cuts[:, None]
    return np.where(head, a, b), np.where(head, b, a)


def random_population(size: int, length: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, (size, length), dtype=np.uint8)


def hamming(a: BitsLike, b: BitsLike) -> int:
    return int(np.count_nonzero(as_bits(a) != as_bits(b)))
