"""Descriptive statistics, one-way ANOVA, pooled-SD pairwise t-tests with
Benjamini-Hochberg adjustment, and the paired Wilcoxon signed-rank test.

Only the distribution tails come from ``scipy.special``; the test statistics
are computed here.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy import special
from scipy.stats import rankdata


@dataclass(frozen=True)
class SampleGroup:
    label: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError(f"group {self.label!r} must be a non-empty 1-D sample")
        if not np.isfinite(values).all():
            raise ValueError(f"group {self.label!r} contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


GroupsLike = Sequence[Union[SampleGroup, Sequence[float], np.ndarray]]


def _groups(groups: GroupsLike) -> list[SampleGroup]:
    return [g if isinstance(g, SampleGroup) else SampleGroup(f"g{i + 1}", g) for i, g in enumerate(groups)]


class Description(NamedTuple):
    count: int
    sum: float
    mean: float
    variance: float


def describe(group: Union[SampleGroup, Sequence[float]]) -> Description:
    """Count, sum, mean and sample variance (divisor ``n - 1``)."""
    values = group.values if isinstance(group, SampleGroup) else np.asarray(group, dtype=np.float64)
    n = values.size
    if n < 2:
        raise ValueError("describe needs at least two values")
    total = math.fsum(values)
    mean = total / n
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return Description(n, total, mean, variance)


@dataclass(frozen=True)
class AnovaResult:
    ss_between: float
    ss_within: float
    df_between: int
    df_within: int
    ms_between: float
    ms_within: float
    f_statistic: float
    p_value: float

    @property
    def ss_total(self) -> float:
        return self.ss_between + self.ss_within

    @property
    def df_total(self) -> int:
        return self.df_between + self.df_within


def anova_one_way(groups: GroupsLike) -> AnovaResult:
    groups = _groups(groups)
    if len(groups) < 2 or any(len(g) < 2 for g in groups):
        raise ValueError("ANOVA needs at least two groups of at least two values")
    grand = math.fsum(math.fsum(g.values) for g in groups) / sum(len(g) for g in groups)
    ss_between = math.fsum(len(g) * (g.values.mean() - grand) ** 2 for g in groups)
    ss_within = math.fsum(math.fsum((g.values - g.values.mean()) ** 2) for g in groups)
    df_between = len(groups) - 1
    df_within = sum(len(g) for g in groups) - len(groups)
    ms_between, ms_within = ss_between / df_between, ss_within / df_within
    if ms_within == 0.0:
        raise ValueError("zero within-group variance: F is undefined")
    f = ms_between / ms_within
    return AnovaResult(ss_between, ss_within, df_between, df_within, ms_between, ms_within, f,
                       float(special.fdtrc(df_between, df_within, f)))


def bh_adjust(p_values: Iterable[float]) -> np.ndarray:
    """Benjamini-Hochberg step-up adjustment (same order as the input)."""
    p = np.asarray(list(p_values), dtype=np.float64)
    m = p.size
    if m == 0:
        return p
    order = np.argsort(p)[::-1]
    ranks = np.arange(m, 0, -1)
    adjusted = np.minimum.accumulate(p[order] * m / ranks)
    out = np.empty(m)
    out[order] = np.minimum(adjusted, 1.0)
    return out


@dataclass(frozen=True)
class PairwiseResult:
    """Lower-triangular matrices indexed ``[row, col]`` with ``row > col``; NaN elsewhere."""

    labels: tuple
    raw: np.ndarray
    adjusted: np.ndarray
    pooled_sd: float
    df: int

    def p(self, a: str, b: str, adjusted: bool = True) -> float:
        i, j = self.labels.index(a), self.labels.index(b)
        if i < j:
            i, j = j, i
        return float((self.adjusted if adjusted else self.raw)[i, j])


def pairwise_t_bh(groups: GroupsLike) -> PairwiseResult:
    """Two-sided t-tests for every pair using one SD pooled over *all* groups."""
    groups = _groups(groups)
    k = len(groups)
    if k < 2:
        raise ValueError("pairwise comparisons need at least two groups")
    df = sum(len(g) - 1 for g in groups)
    if df < 1:
        raise ValueError("not enough observations to pool a variance")
    pooled_var = math.fsum(math.fsum((g.values - g.values.mean()) ** 2) for g in groups) / df
    if pooled_var == 0.0:
        raise ValueError("zero pooled variance")
    sd = math.sqrt(pooled_var)
    means = [g.values.mean() for g in groups]
    raw = np.full((k, k), np.nan)
    rows, cols = np.tril_indices(k, -1)
    for i, j in zip(rows, cols):
        se = sd * math.sqrt(1.0 / len(groups[i]) + 1.0 / len(groups[j]))
        t = (means[i] - means[j]) / se
        raw[i, j] = 2.0 * special.stdtr(df, -abs(t))
    adjusted = np.full((k, k), np.nan)
    adjusted[rows, cols] = bh_adjust(raw[rows, cols])
    return PairwiseResult(tuple(g.label for g in groups), raw, adjusted, sd, df)


class WilcoxonResult(NamedTuple):
    v: float
    p_value: float
    log_p_value: float
    z: float
    n: int


def wilcoxon_signed_rank(x: Sequence[float], y: Sequence[float]) -> WilcoxonResult:
    """Paired signed-rank test, normal approximation with continuity and tie correction.

    Zero differences are dropped; tied absolute differences share their
    average rank.  ``V`` is the rank sum of the positive differences ``x - y``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError("wilcoxon needs two paired samples of equal, non-zero length")
    d = x - y
    d = d[d != 0]
    n = d.size
    if n == 0:
        raise ValueError("all paired differences are zero: the test is undefined")
    ranks = rankdata(np.abs(d))
    v = float(ranks[d > 0].sum())
    _, ties = np.unique(np.abs(d), return_counts=True)
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - float((ties**3 - ties).sum()) / 48.0)
    if sigma == 0.0:
        raise ValueError("zero variance of V")
    centred = v - n * (n + 1) / 4.0
    z = (centred - math.copysign(0.5, centred) * (centred != 0)) / sigma
    log_p = min(math.log(2.0) + float(special.log_ndtr(-abs(z))), 0.0)
    return WilcoxonResult(v, math.exp(log_p), log_p, z, n)


# --------------------------------------------------------------------------
# column-aligned sample files


def read_groups_csv(path) -> list[SampleGroup]:
    """One group per column, header row of labels, one run per row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one data row")
    header = [h.strip() for h in rows[0]]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header) or any(not c.strip() for c in row):
            raise ValueError(f"{path}: ragged row {lineno} ({len(row)} cells, header has {len(header)})")
    data = np.array([[float(c) for c in r] for r in rows[1:]])
    return [SampleGroup(label, data[:, i]) for i, label in enumerate(header)]


_RATE_SUFFIX = re.compile(r"X\d+$")


def family_of(label: str) -> str:
    """``ReGenGGAX06`` -> ``GGA``: strip the ReGen marker and the crossover-rate suffix."""
    return _RATE_SUFFIX.sub("", label.replace("ReGen", ""))


def regen_pairings(groups: Sequence[SampleGroup]) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Pool classic vs ReGen columns per family, preserving column order.

    Column ``C`` is paired with ``ReGen`` + ``C``.  Within a family the pooled
    samples are concatenated in column order, then run order.
    """
    by_label = {g.label: g for g in groups}
    pooled: dict[str, tuple[list, list]] = {}
    for g in groups:
        if "ReGen" in g.label:
            continue
        partner = None
        for other in groups:
            if "ReGen" in other.label and other.label.replace("ReGen", "") == g.label:
                partner = other
                break
        if partner is None:
            continue
        if len(partner) != len(g):
            raise ValueError(f"{g.label} and {partner.label} have different run counts")
        xs, ys = pooled.setdefault(family_of(g.label), ([], []))
        xs.append(g.values)
        ys.append(by_label[partner.label].values)
    if not pooled:
        raise ValueError("no classic/ReGen column pairs found")
    return [(fam, np.concatenate(xs), np.concatenate(ys)) for fam, (xs, ys) in pooled.items()]
