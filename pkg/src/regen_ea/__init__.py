"""ReGen: epigenetic tags that rewrite how chromosome segments are read, on GA and HAEA engines."""
from ._accel import backend
from .engines import (ConfigError, EngineConfig, MarkingPeriod, RunTrace, marking_period_on, run, run_experiment, update_rates,
                      run_ga, run_haea)
from .epigenome import NO_TAG, MarkingParams, Tag, TagOp, apply_op, epigenotype_from_tags, grow, grow_population, mark
from .genome import RealInterval, as_bits, bits_to_str, decode_real, decode_vector, encode_real
from .operators import Individual, per_bit_mutation, single_bit_mutation, single_point_crossover, tournament_select
from .problems import PROBLEMS, Problem, eval_problem, get_problem
from .stats import SampleGroup, anova_one_way, describe, pairwise_t_bh, wilcoxon_signed_rank

__version__ = "0.1.0"

__all__ = [
    "backend", "ConfigError", "EngineConfig", "MarkingPeriod", "RunTrace", "marking_period_on", "run",
    "run_experiment", "update_rates", "run_ga", "run_haea", "NO_TAG", "MarkingParams", "Tag", "TagOp", "apply_op",
    "epigenotype_from_tags", "grow", "grow_population", "mark", "RealInterval", "as_bits", "bits_to_str",
    "decode_real", "decode_vector", "encode_real", "Individual", "per_bit_mutation", "single_bit_mutation",
    "single_point_crossover", "tournament_select", "PROBLEMS", "Problem", "eval_problem", "get_problem",
    "SampleGroup", "anova_one_way", "describe", "pairwise_t_bh", "wilcoxon_signed_rank",
]
