"""Benchmark functions: four binary, four real-valued (decoded from 32-bit genes)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .genome import BitsLike, RealInterval, as_bits, decode_population

DECEPTIVE3_TABLE = np.array([28, 26, 22, 0, 14, 0, 0, 30], dtype=np.float64)
DECEPTIVE4_TABLE = np.array([5, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4], dtype=np.float64)
ROYAL_ROAD_ORDER = 8


def _blocks(bits: np.ndarray, width: int) -> np.ndarray:
    bits = np.atleast_2d(bits)
    if bits.shape[1] % width:
        raise ValueError(f"length {bits.shape[1]} is not a multiple of {width}")
    return bits.reshape(bits.shape[0], -1, width)


def _block_index(blocks: np.ndarray) -> np.ndarray:
    width = blocks.shape[-1]
    return blocks.astype(np.intp) @ (1 << np.arange(width - 1, -1, -1))


# population versions: (N, L) bits -> (N,) fitness

def max_ones_batch(bits: np.ndarray) -> np.ndarray:
    return np.atleast_2d(bits).sum(axis=1, dtype=np.int64).astype(np.float64)


def deceptive3_batch(bits: np.ndarray) -> np.ndarray:
    return DECEPTIVE3_TABLE[_block_index(_blocks(bits, 3))].sum(axis=1)


def deceptive4_batch(bits: np.ndarray) -> np.ndarray:
    return DECEPTIVE4_TABLE[_block_index(_blocks(bits, 4))].sum(axis=1)


def royal_road_batch(bits: np.ndarray) -> np.ndarray:
    complete = _blocks(bits, ROYAL_ROAD_ORDER).all(axis=2)
    return ROYAL_ROAD_ORDER * complete.sum(axis=1).astype(np.float64)


def rastrigin_batch(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return 10.0 * x.shape[1] + (x * x - 10.0 * np.cos(2.0 * np.pi * x)).sum(axis=1)


def rosenbrock_batch(x: np.ndarray, a: float = 1.0, b: float = 100.0) -> np.ndarray:
    x = np.atleast_2d(x)
    if x.shape[1] < 2:
        raise ValueError("Rosenbrock needs at least two dimensions")
    head, tail = x[:, :-1], x[:, 1:]
    return (b * (tail - head**2) ** 2 + (a - head) ** 2).sum(axis=1)


def schwefel_batch(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return 418.9829 * x.shape[1] - (x * np.sin(np.sqrt(np.abs(x)))).sum(axis=1)


def griewank_batch(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    i = np.arange(1, x.shape[1] + 1)
    return 1.0 + (x * x).sum(axis=1) / 4000.0 - np.cos(x / np.sqrt(i)).prod(axis=1)


# scalar versions

def eval_max_ones(x: BitsLike) -> float:
    return float(max_ones_batch(as_bits(x))[0])


def eval_deceptive3(x: BitsLike) -> float:
    return float(deceptive3_batch(as_bits(x))[0])


def eval_deceptive4(x: BitsLike) -> float:
    return float(deceptive4_batch(as_bits(x))[0])


def eval_royal_road(x: BitsLike) -> float:
    return float(royal_road_batch(as_bits(x))[0])


def eval_rastrigin(v) -> float:
    return float(rastrigin_batch(np.asarray(v, dtype=np.float64))[0])


def eval_rosenbrock(v) -> float:
    return float(rosenbrock_batch(np.asarray(v, dtype=np.float64))[0])


def eval_schwefel(v) -> float:
    return float(schwefel_batch(np.asarray(v, dtype=np.float64))[0])


def eval_griewank(v) -> float:
    return float(griewank_batch(np.asarray(v, dtype=np.float64))[0])


@dataclass(frozen=True)
class Problem:
    name: str
    genome_length: int
    direction: str
    objective: Callable[[np.ndarray], np.ndarray]
    interval: Optional[RealInterval] = None
    dimension: Optional[int] = None
    optimum: Optional[float] = None

    def __post_init__(self):
        if self.direction not in ("maximize", "minimize"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if (self.interval is None) != (self.dimension is None):
            raise ValueError("real problems need both an interval and a dimension")
        if self.interval is not None and self.genome_length != self.dimension * self.interval.n:
            raise ValueError("genome length must equal dimension * bits per value")

    @property
    def maximize(self) -> bool:
        return self.direction == "maximize"

    @property
    def is_real(self) -> bool:
        return self.interval is not None

    def evaluate(self, phenotypes: np.ndarray) -> np.ndarray:
        """Fitness of each row of an ``(N, genome_length)`` phenotype matrix."""
        phenotypes = np.atleast_2d(phenotypes)
        if phenotypes.shape[1] != self.genome_length:
            raise ValueError(f"{self.name} expects {self.genome_length} bits, got {phenotypes.shape[1]}")
        if self.is_real:
            return self.objective(decode_population(phenotypes, self.interval, self.dimension))
        return self.objective(phenotypes)

    def score(self, fitness: np.ndarray) -> np.ndarray:
        """Map raw objective values to "larger is better"."""
        return fitness if self.maximize else -fitness


def eval_problem(problem: Problem, phenotype: BitsLike) -> float:
    bits = as_bits(phenotype)
    if bits.ndim != 1 or bits.size != problem.genome_length:
        raise ValueError(f"{problem.name} expects {problem.genome_length} bits, got {bits.size}")
    return float(problem.evaluate(bits[None, :])[0])


def _real(name, objective, a, b, dimension=10):
    iv = RealInterval(a, b, 32)
    return Problem(name, dimension * iv.n, "minimize", objective, iv, dimension, 0.0)


PROBLEMS: dict[str, Problem] = {
    p.name: p
    for p in (
        Problem("max_ones", 360, "maximize", max_ones_batch, optimum=360.0),
        Problem("deceptive3", 360, "maximize", deceptive3_batch, optimum=3600.0),
        Problem("deceptive4", 360, "maximize", deceptive4_batch, optimum=450.0),
        Problem("royal_road", 360, "maximize", royal_road_batch, optimum=360.0),
        _real("rastrigin", rastrigin_batch, -5.12, 5.12),
        _real("rosenbrock", rosenbrock_batch, -2.048, 2.048),
        _real("schwefel", schwefel_batch, -500.0, 500.0),
        _real("griewank", griewank_batch, -600.0, 600.0),
    )
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
