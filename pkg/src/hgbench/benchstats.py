"""Field-stratified benchmark tables and individual percentiles.

Conventions, exposed as module constants so alternatives can be compared:
quartiles interpolate linearly at position p*(n-1); variance uses the n-1
denominator (0 for a single value).
"""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from hgbench.indices import INDEX_FIELDS, OK, ZERO_CITATIONS, ZERO_PUBLICATIONS

QUANTILE_METHOD = "linear"
VARIANCE_DDOF = 1


@dataclass(frozen=True)
class SummaryRow:
    group_code: str
    n: int
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    variance: float
    level: str = "SDS"


@dataclass(frozen=True)
class RangeRow:
    uda_code: str
    median_min: float
    median_max: float
    max_min: float
    max_max: float


@dataclass(frozen=True)
class LowCountRow:
    uda_code: str
    n_sds: int
    n_q1_eq_1: int
    n_median_le_2: int


@dataclass(frozen=True)
class ExclusionReport:
    excluded_total: int
    zero_publications: int
    zero_citations: int


def _status(p) -> str:
    return p if isinstance(p, str) else p.status


def activity_filter(groups: Mapping[str, Sequence]) -> dict[str, list]:
    """Keep the SDSs where at least half the members published something."""
    kept = {}
    for code in sorted(groups):
        members = list(groups[code])
        if not members:
            continue
        active = sum(1 for p in members if _status(p) != ZERO_PUBLICATIONS)
        if 2 * active >= len(members):
            kept[code] = members
    return kept


def exclusion_report(profiles: Iterable) -> ExclusionReport:
    zp = zc = 0
    for p in profiles:
        s = _status(p)
        if s == ZERO_PUBLICATIONS:
            zp += 1
        elif s == ZERO_CITATIONS:
            zc += 1
    return ExclusionReport(zp + zc, zp, zc)


def summarize(values: Iterable[float], group_code: str = "", level: str = "SDS") -> SummaryRow:
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot summarize an empty group")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method=QUANTILE_METHOD)
    var = float(arr.var(ddof=VARIANCE_DDOF)) if arr.size > 1 else 0.0
    return SummaryRow(group_code, int(arr.size), float(q1), float(med), float(q3),
                      _num(arr.max()), float(arr.mean()), var, level)


def _num(x) -> float:
    x = float(x)
    return int(x) if x.is_integer() else x


def range_rows(per_sds: Mapping[str, Sequence[SummaryRow]]) -> list[RangeRow]:
    out = []
    for uda in sorted(per_sds):
        rows = per_sds[uda]
        if not rows:
            raise ValueError(f"UDA {uda} has no SDS rows")
        medians = [r.median for r in rows]
        maxima = [r.max for r in rows]
        out.append(RangeRow(uda, _num(min(medians)), _num(max(medians)),
                            _num(min(maxima)), _num(max(maxima))))
    return out


def low_counts(per_sds: Mapping[str, Sequence[SummaryRow]]) -> list[LowCountRow]:
    return [
        LowCountRow(uda, len(rows),
                    sum(1 for r in rows if r.q1 == 1),
                    sum(1 for r in rows if r.median <= 2))
        for uda, rows in sorted(per_sds.items())
    ]


def percentile_of(value: float, group: Iterable[float]) -> float:
    """Midrank percentile: ties count half."""
    group = list(group)
    if not group:
        raise ValueError("percentile of an empty group")
    below = sum(1 for v in group if v < value)
    equal = sum(1 for v in group if v == value)
    return 100.0 * (below + 0.5 * equal) / len(group)


# -- end-to-end benchmark ----------------------------------------------------

@dataclass
class Benchmark:
    index: str
    uda_rows: list[SummaryRow]
    sds_rows: list[SummaryRow]
    ranges: list[RangeRow]
    lows: list[LowCountRow]
    exclusion: ExclusionReport
    n_eligible: int
    dropped_sds: list[str]

    def meta(self) -> dict:
        return {
            "index": self.index,
            "n_eligible": self.n_eligible,
            "exclusion": asdict(self.exclusion),
            "n_benchmarked": sum(r.n for r in self.sds_rows),
            "dropped_sds": self.dropped_sds,
            "quantile_method": f"{QUANTILE_METHOD} interpolation at p*(n-1)",
            "variance": "sample (n-1 denominator)" if VARIANCE_DDOF == 1 else "population",
        }


def benchmark(profile_rows: Iterable, index: str = "h",
              uda_of: Optional[Mapping[str, str]] = None) -> Benchmark:
    """Group profile rows by SDS, drop inactive SDSs, exclude null indexes,
    and summarize per SDS and per UDA.

    ``profile_rows`` carry ``sds``, ``uda`` and ``indexes`` (see
    :class:`hgbench.indices.ProfileRow`). Exclusions are counted only over
    SDSs that pass the activity filter.
    """
    if index not in INDEX_FIELDS:
        raise ValueError(f"unknown index {index!r}")
    rows = list(profile_rows)
    by_sds: dict[str, list] = defaultdict(list)
    uda_map: dict[str, str] = dict(uda_of or {})
    for r in rows:
        by_sds[r.sds].append(r)
        uda_map.setdefault(r.sds, r.uda)

    kept = activity_filter({k: [r.indexes for r in v] for k, v in by_sds.items()})
    dropped = sorted(set(by_sds) - set(kept))
    retained = [r for code in sorted(kept) for r in by_sds[code]]
    excl = exclusion_report(r.indexes for r in retained)

    sds_rows: list[SummaryRow] = []
    per_uda_rows: dict[str, list[SummaryRow]] = defaultdict(list)
    per_uda_vals: dict[str, list[float]] = defaultdict(list)
    for code in sorted(kept):
        vals = []
        for r in by_sds[code]:
            if r.indexes.status != OK:
                continue
            v = r.indexes.value(index)
            if v is None:
                raise ValueError(f"{r.researcher_id}: index {index} missing from profile")
            vals.append(v)
        if not vals:
            continue
        row = summarize(vals, code, "SDS")
        sds_rows.append(row)
        per_uda_rows[uda_map[code]].append(row)
        per_uda_vals[uda_map[code]].extend(vals)
    uda_rows = [summarize(per_uda_vals[u], u, "UDA") for u in sorted(per_uda_vals)]
    return Benchmark(index, uda_rows, sds_rows, range_rows(per_uda_rows),
                     low_counts(per_uda_rows), excl, len(retained), dropped)


# -- rendering ---------------------------------------------------------------

SUMMARY_COLUMNS = ("code", "n", "q1", "median", "q3", "max", "mean", "variance")
BENCHMARK_COLUMNS = ("level",) + SUMMARY_COLUMNS
RANGE_COLUMNS = ("uda", "median_min", "median_max", "max_min", "max_max")
LOWCOUNT_COLUMNS = ("uda", "n_sds", "n_q1_eq_1", "n_median_le_2")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.2f}"
    return str(v)


def _summary_cells(r: SummaryRow, with_level: bool) -> list[str]:
    cells = [r.group_code, str(r.n), _cell(r.q1), _cell(r.median), _cell(r.q3),
             _cell(r.max), _cell(r.mean), _cell(r.variance)]
    return [r.level] + cells if with_level else cells


def render_table(rows: Sequence, fmt: str = "csv", kind: Optional[type] = None,
                 with_level: bool = False) -> str:
    """Render summary, range or low-count rows as CSV or a markdown table.

    ``kind`` picks the header when ``rows`` is empty (defaults to summary).
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    kind = type(rows[0]) if rows else (kind or SummaryRow)
    if kind is SummaryRow:
        header = BENCHMARK_COLUMNS if with_level else SUMMARY_COLUMNS
        body = [_summary_cells(r, with_level) for r in rows]
    elif kind is RangeRow:
        header = RANGE_COLUMNS
        body = [[_cell(getattr(r, f.name)) for f in fields(RangeRow)] for r in rows]
    elif kind is LowCountRow:
        header = LOWCOUNT_COLUMNS
        body = [[_cell(getattr(r, f.name)) for f in fields(LowCountRow)] for r in rows]
    else:
        raise TypeError(f"cannot render {kind.__name__}")

    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(cells) + " |" for cells in body]
    return "\n".join(lines) + "\n"
