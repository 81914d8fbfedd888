import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgbench.benchstats import (LowCountRow, RangeRow, SummaryRow, activity_filter, benchmark,
                                exclusion_report, low_counts, percentile_of, range_rows,
                                render_table, summarize)
from hgbench.indices import OK, ZERO_CITATIONS, ZERO_PUBLICATIONS, IndexSet, ProfileRow


def test_summarize_reference():
    r = summarize([1, 2, 3, 4, 5], "X")
    assert (r.n, r.q1, r.median, r.q3, r.max, r.mean, r.variance) == (5, 2, 3, 4, 5, 3, 2.5)


def test_summarize_small_groups():
    r = summarize([7])
    assert (r.q1, r.median, r.q3, r.max, r.variance) == (7, 7, 7, 7, 0.0)
    r = summarize([1, 2, 3, 4])
    assert (r.q1, r.median, r.q3) == (1.75, 2.5, 3.25)
    with pytest.raises(ValueError):
        summarize([])


def _oracle_quantile(xs, p):
    xs = sorted(xs)
    pos = p * (len(xs) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (pos - lo) * (xs[hi] - xs[lo])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 200), min_size=1, max_size=60))
def test_summarize_matches_oracle_and_orders(xs):
    r = summarize(xs)
    for p, got in ((0.25, r.q1), (0.5, r.median), (0.75, r.q3)):
        assert got == pytest.approx(_oracle_quantile(xs, p), abs=1e-9)
    assert r.q1 <= r.median <= r.q3 <= r.max
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1) if len(xs) > 1 else 0.0
    assert r.variance == pytest.approx(var, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 200), min_size=1, max_size=40), st.integers(1, 9))
def test_summarize_scales(xs, k):
    a, b = summarize(xs), summarize([k * x for x in xs])
    for f in ("q1", "median", "q3", "max", "mean"):
        assert getattr(b, f) == pytest.approx(k * getattr(a, f), abs=1e-9)
    assert b.variance == pytest.approx(k * k * a.variance, rel=1e-9, abs=1e-9)


def test_activity_filter():
    def grp(active, total):
        return [OK] * active + [ZERO_PUBLICATIONS] * (total - active)
    kept = activity_filter({"A": grp(5, 10), "B": grp(4, 10), "C": [], "D": [ZERO_CITATIONS]})
    assert sorted(kept) == ["A", "D"]


def test_exclusion_report():
    rep = exclusion_report([OK, ZERO_PUBLICATIONS, ZERO_CITATIONS, OK])
    assert (rep.excluded_total, rep.zero_publications, rep.zero_citations) == (2, 1, 1)


def _row(q1, med, mx=10):
    return SummaryRow("S", 10, q1, med, med + 1, mx, med, 1.0)


def test_range_and_low_counts():
    rows = {"02": [_row(1, 1, 5), _row(1, 2, 9), _row(2, 3, 7)]}
    assert range_rows(rows) == [RangeRow("02", 1, 3, 5, 9)]
    assert low_counts(rows) == [LowCountRow("02", 3, 2, 2)]
    with pytest.raises(ValueError):
        range_rows({"01": []})


def test_percentiles():
    assert percentile_of(3, [1, 2, 3, 4, 5]) == 50.0
    assert percentile_of(5, [5, 5]) == 50.0
    assert percentile_of(0, [1, 2]) == 0.0
    assert percentile_of(9, [1, 2]) == 100.0
    with pytest.raises(ValueError):
        percentile_of(1, [])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=1, max_size=50))
def test_mean_percentile_is_fifty(xs):
    ps = [percentile_of(x, xs) for x in xs]
    assert np.mean(ps) == pytest.approx(50.0)
    assert all(0 <= p <= 100 for p in ps)


def _profile(rid, sds, uda, h, status=OK):
    return ProfileRow(rid, sds, uda, IndexSet(h, h, float(h), float(h), None, status, 1))


def test_benchmark_end_to_end():
    rows = [_profile("a", "S1", "U", 2), _profile("b", "S1", "U", 4),
            _profile("c", "S1", "U", 0, ZERO_CITATIONS),
            _profile("d", "S2", "U", 0, ZERO_PUBLICATIONS), _profile("e", "S2", "U", 0, ZERO_PUBLICATIONS),
            _profile("f", "S2", "U", 3)]
    b = benchmark(rows, "h")
    assert b.dropped_sds == ["S2"]
    assert [r.group_code for r in b.sds_rows] == ["S1"]
    assert b.sds_rows[0].n == 2
    assert b.exclusion.excluded_total == 1
    assert sum(r.n for r in b.sds_rows) == b.n_eligible - b.exclusion.excluded_total
    with pytest.raises(ValueError):
        benchmark(rows, "zz")


def test_render_table():
    rows = [summarize([1, 2, 3, 4, 5], "FIS/01")]
    csv_text = render_table(rows)
    assert csv_text.splitlines() == ["code,n,q1,median,q3,max,mean,variance",
                                     "FIS/01,5,2.00,3.00,4.00,5,3.00,2.50"]
    assert len(render_table(rows, with_level=True).splitlines()[1].split(",")) == 9
    md = render_table(rows, "markdown").splitlines()
    assert md[0].startswith("| code |") and md[1].startswith("|---")
    assert render_table([], kind=RangeRow).strip() == "uda,median_min,median_max,max_min,max_max"
    with pytest.raises(ValueError):
        render_table(rows, "html")
