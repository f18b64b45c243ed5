from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from regen_ea.stats import (SampleGroup, anova_one_way, bh_adjust, describe, pairwise_t_bh, read_groups_csv,
                            regen_pairings, wilcoxon_signed_rank)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def d3():
    return read_groups_csv(DATA / "samples_deceptive3.csv")


@pytest.fixture(scope="module")
def rastrigin():
    return read_groups_csv(DATA / "samples_rastrigin.csv")


def test_fixture_layout(d3):
    assert len(d3) == 20 and all(len(g) == 30 for g in d3)
    assert d3[0].label == "GGAX06" and d3[-1].label == "ReGenSSGAX10"


def test_describe_table_row(d3):
    c = describe(d3[0])
    assert c.count == 30 and c.sum == 103036
    assert c.mean == pytest.approx(3434.533333, abs=1e-4)
    assert c.variance == pytest.approx(119.4298851, abs=1e-4)


def test_describe_trivial():
    assert describe([4.0, 4.0, 4.0]).variance == 0.0
    c = describe([1.0, 2.0, 3.0])
    assert (c.mean, c.variance) == (2.0, 1.0)
    with pytest.raises(ValueError):
        describe([1.0])


@pytest.mark.parametrize("name", ["deceptive3", "deceptive4", "royal_road", "rastrigin", "schwefel", "griewank"])
def test_describe_matches_exact_rationals(name):
    for g in read_groups_csv(DATA / f"samples_{name}.csv"):
        exact = [Fraction(v) for v in g.values]
        mean = sum(exact) / len(exact)
        var = sum((v - mean) ** 2 for v in exact) / (len(exact) - 1)
        c = describe(g)
        assert c.mean == pytest.approx(float(mean), rel=1e-9, abs=1e-300)
        assert c.variance == pytest.approx(float(var), rel=1e-9, abs=1e-300)


def test_anova_fixtures(d3, rastrigin):
    a = anova_one_way(d3)
    assert a.f_statistic == pytest.approx(1240.0941, abs=0.01)
    assert (a.df_between, a.df_within) == (19, 580)
    assert a.ss_between == pytest.approx(3141837.193, abs=1e-3)
    r = anova_one_way(rastrigin)
    assert r.f_statistic == pytest.approx(86.3753, abs=0.01)
    assert r.p_value == pytest.approx(4.8815e-155, rel=0.01)


def test_anova_agrees_with_scipy(rastrigin):
    ref = sps.f_oneway(*[g.values for g in rastrigin])
    a = anova_one_way(rastrigin)
    assert a.f_statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert a.p_value == pytest.approx(ref.pvalue, rel=1e-6)


def test_anova_degenerate():
    with pytest.raises(ValueError):
        anova_one_way([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        anova_one_way([[1.0, 2.0]])


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_anova_decomposition(k, n, seed):
    rng = np.random.default_rng(seed)
    groups = [rng.normal(rng.normal(0, 5), rng.uniform(0.5, 3), n) for _ in range(k)]
    a = anova_one_way(groups)
    allv = np.concatenate(groups)
    ss_total = float(((allv - allv.mean()) ** 2).sum())
    assert a.ss_total == pytest.approx(ss_total, rel=1e-9)
    assert a.f_statistic == pytest.approx(a.ms_between / a.ms_within)


def test_pairwise_fixture(d3):
    pw = pairwise_t_bh(d3)
    assert pw.p("GGAX06", "GGAX07") == pytest.approx(0.17764919, abs=1e-4)
    assert pw.df == 580


def test_pairwise_matches_scipy_and_manual_bh(d3):
    pw = pairwise_t_bh(d3)
    values = [g.values for g in d3]
    sd = np.sqrt(sum(((v - v.mean()) ** 2).sum() for v in values) / 580)
    i, j = 10, 3
    t = (values[i].mean() - values[j].mean()) / (sd * np.sqrt(2 / 30))
    assert pw.raw[i, j] == pytest.approx(2 * sps.t.sf(abs(t), 580), rel=1e-9)
    rows, cols = np.tril_indices(20, -1)
    ref = sps.false_discovery_control(pw.raw[rows, cols], method="bh")
    np.testing.assert_allclose(pw.adjusted[rows, cols], ref, rtol=1e-12)


def test_pairwise_identical_groups_raw_p_is_one():
    rng = np.random.default_rng(1)
    a = rng.normal(size=10)
    pw = pairwise_t_bh([SampleGroup("a", a), SampleGroup("b", rng.normal(size=10)), SampleGroup("c", a)])
    assert pw.p("a", "c", adjusted=False) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pairwise_t_bh([[1.0, 1.0], [2.0, 2.0]])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40))
def test_bh_properties(p):
    p = np.array(p)
    adj = bh_adjust(p)
    assert (adj >= p - 1e-15).all() and (adj <= 1).all()
    order = np.argsort(p, kind="stable")
    assert (np.diff(adj[order]) >= -1e-15).all()


def test_wilcoxon_fixture(rastrigin):
    pairs = {fam: (x, y) for fam, x, y in regen_pairings(rastrigin)}
    x, y = pairs["GGA"]
    assert x.size == 150
    cols = np.column_stack([g.values for g in rastrigin])
    np.testing.assert_array_equal(x, cols[:, 0:5].T.ravel())
    np.testing.assert_array_equal(y, cols[:, 10:15].T.ravel())
    w = wilcoxon_signed_rank(x, y)
    assert w.v == 11325
    assert w.p_value == pytest.approx(2.322841e-26, rel=0.05)
    assert np.exp(w.log_p_value) == pytest.approx(w.p_value)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_wilcoxon_against_scipy_and_rank_identity(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 6, n).astype(float)  # heavy ties and zero differences
    y = rng.integers(0, 6, n).astype(float)
    d = x - y
    m = int((d != 0).sum())
    if m == 0:
        with pytest.raises(ValueError):
            wilcoxon_signed_rank(x, y)
        return
    w = wilcoxon_signed_rank(x, y)
    v_neg = wilcoxon_signed_rank(y, x).v
    assert 0 <= w.v <= m * (m + 1) / 2
    assert w.v + v_neg == m * (m + 1) / 2
    try:
        ref = sps.wilcoxon(x, y, zero_method="wilcox", correction=True, method="approx")
    except ValueError:
        return
    assert min(w.v, v_neg) == ref.statistic
    assert w.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_wilcoxon_errors():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [1.0])


def test_read_groups_rejects_ragged(tmp_path):
    f = tmp_path / "ragged.csv"
    f.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ValueError, match="ragged"):
        read_groups_csv(f)


def test_haea_fixture_pairings():
    groups = read_groups_csv(DATA / "samples_haea.csv")
    pairs = regen_pairings(groups)
    assert [fam for fam, _, _ in pairs] == [f"{p}_{r}HAEA" for p in
                                            ("deceptive3", "deceptive4", "rastrigin", "schwefel", "griewank")
                                            for r in ("G", "SS")]
    for _, x, y in pairs:
        assert x.size == y.size == 30
        w = wilcoxon_signed_rank(x, y)
        assert 0 <= w.v <= w.n * (w.n + 1) / 2 and 0 < w.p_value <= 1
