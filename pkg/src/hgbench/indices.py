"""h, g and the h variants (individual h, h_m, generalized h).

Scalar functions here sort their input and hand it to the selected kernel
backend; :func:`compute_profiles` packs many researchers into CSR arrays
and runs the batch kernels once per index.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from hgbench._backend import kernels
from hgbench.corpus import CorpusError, PublicationRecord, WindowConfig, citations_at, in_window

logger = logging.getLogger(__name__)

OK = "ok"
ZERO_PUBLICATIONS = "zero_publications"
ZERO_CITATIONS = "zero_citations"
STATUSES = (OK, ZERO_PUBLICATIONS, ZERO_CITATIONS)

INDEX_NAMES = ("h", "g", "hi", "hm", "hf")
INDEX_FIELDS = {"h": "h", "g": "g", "hi": "h_individual", "hm": "h_m", "hf": "h_f"}

PROFILE_HEADER = ("researcher_id", "sds", "uda", "status", "n_pubs",
                  "h", "g", "h_individual", "h_m", "h_f")
BASELINE_HEADER = ("category", "year", "c0")

Baselines = Mapping[tuple[str, int], float]


class MissingBaselineError(KeyError):
    def __init__(self, category: str, year: int):
        super().__init__((category, year))
        self.category = category
        self.year = year

    def __str__(self):
        return f"no field baseline for category {self.category!r}, year {self.year}"


@dataclass(frozen=True)
class PaperStat:
    citations: int
    n_authors: int = 1
    category: str = ""
    year: int = 0
    pub_id: str = ""

    def __post_init__(self):
        if self.citations < 0:
            raise ValueError("citations must be nonnegative")
        if self.n_authors < 1:
            raise ValueError("n_authors must be at least 1")


@dataclass(frozen=True)
class IndexSet:
    h: int = 0
    g: int = 0
    h_individual: float = 0.0
    h_m: float = 0.0
    h_f: Optional[int] = None
    status: str = ZERO_PUBLICATIONS
    n_pubs: int = 0
    hf_error: Optional[str] = None

    def value(self, index: str):
        return getattr(self, INDEX_FIELDS[index])


def _ranked(papers: Iterable[PaperStat]) -> list[PaperStat]:
    return sorted(papers, key=lambda p: (-p.citations, p.pub_id))


def h_index(counts: Iterable[int]) -> int:
    """Largest h such that h of the counts are at least h."""
    return kernels.h_sorted(sorted(counts, reverse=True))


def g_index(counts: Iterable[int], pad: bool = True) -> int:
    """Largest g such that the top g counts sum to at least g**2.

    With ``pad`` (the default) the list is extended with zero-cited papers,
    so g may exceed the number of papers: ``g_index([25]) == 5``.
    """
    return kernels.g_sorted(sorted(counts, reverse=True), pad)


def h_core(papers: Iterable[PaperStat]) -> list[PaperStat]:
    ranked = _ranked(papers)
    h = kernels.h_sorted([p.citations for p in ranked])
    return ranked[:h]


def individual_h(papers: Iterable[PaperStat]) -> float:
    """h divided by the mean author count of the h-core."""
    ranked = _ranked(papers)
    h = kernels.h_sorted([p.citations for p in ranked])
    return kernels.hi_sorted([p.n_authors for p in ranked], h)


def hm_index(papers: Iterable[PaperStat]) -> float:
    """h on fractional ranks: each paper advances the rank by 1/n_authors."""
    ranked = _ranked(papers)
    return kernels.hm_sorted([p.citations for p in ranked], [p.n_authors for p in ranked])


def _normalized(papers: Iterable[PaperStat], baselines: Baselines) -> list[float]:
    out = []
    for p in papers:
        c0 = baselines.get((p.category, p.year))
        if c0 is None:
            raise MissingBaselineError(p.category, p.year)
        out.append(p.citations / c0)
    return out


def generalized_h(papers: Iterable[PaperStat], baselines: Baselines) -> int:
    """h over citations divided by the paper's (category, year) mean."""
    return kernels.hreal_sorted(sorted(_normalized(papers, baselines), reverse=True))


def _status(papers: Sequence[PaperStat]) -> str:
    if not papers:
        return ZERO_PUBLICATIONS
    if all(p.citations == 0 for p in papers):
        return ZERO_CITATIONS
    return OK


def index_set(papers: Sequence[PaperStat], baselines: Optional[Baselines] = None,
              pad_g: bool = True) -> IndexSet:
    papers = list(papers)
    status = _status(papers)
    if status != OK:
        return IndexSet(h_f=None if baselines is None else 0, status=status,
                        n_pubs=len(papers))
    counts = [p.citations for p in papers]
    h_f = None
    hf_error = None
    if baselines is not None:
        try:
            h_f = generalized_h(papers, baselines)
        except MissingBaselineError as exc:
            hf_error = str(exc)
    return IndexSet(h_index(counts), g_index(counts, pad_g), individual_h(papers),
                    hm_index(papers), h_f, status, len(papers), hf_error)


def paper_stats(attributions, corpus: Mapping[str, PublicationRecord] | Iterable[PublicationRecord],
                window: WindowConfig, obs_date: Optional[date] = None) -> dict[str, list[PaperStat]]:
    """Each researcher's attributed, in-window papers as PaperStat lists."""
    if not isinstance(corpus, Mapping):
        corpus = {p.pub_id: p for p in corpus}
    obs = obs_date or window.observation_date
    out: dict[str, list[PaperStat]] = {}
    seen: set[tuple[str, str]] = set()
    for att in attributions:
        key = (att.researcher_id, att.pub_id)
        if key in seen:
            continue
        seen.add(key)
        pub = corpus.get(att.pub_id)
        if pub is None:
            raise CorpusError(f"attribution references unknown pub_id {att.pub_id!r}")
        if not in_window(pub, window):
            continue
        out.setdefault(att.researcher_id, []).append(
            PaperStat(citations_at(pub, obs), pub.n_authors, pub.category, pub.year, pub.pub_id))
    return out


def profile(researcher_id: str, attributions, corpus, window: WindowConfig,
            obs_date: Optional[date] = None, baselines: Optional[Baselines] = None,
            pad_g: bool = True) -> IndexSet:
    """All five indexes for one researcher."""
    mine = [a for a in attributions if a.researcher_id == researcher_id]
    papers = paper_stats(mine, corpus, window, obs_date).get(researcher_id, [])
    return index_set(papers, baselines, pad_g)


def compute_profiles(researcher_ids: Iterable[str],
                     papers_by_researcher: Mapping[str, Sequence[PaperStat]],
                     baselines: Optional[Baselines] = None,
                     pad_g: bool = True) -> dict[str, IndexSet]:
    """Batch version of :func:`index_set` over many researchers.

    A missing baseline only blanks ``h_f`` for the affected researcher.
    """
    ids = sorted(set(researcher_ids))
    result: dict[str, IndexSet] = {}
    active: list[str] = []
    ranked_lists: list[list[PaperStat]] = []
    for rid in ids:
        papers = list(papers_by_researcher.get(rid, ()))
        status = _status(papers)
        if status != OK:
            result[rid] = IndexSet(h_f=None if baselines is None else 0,
                                   status=status, n_pubs=len(papers))
            continue
        active.append(rid)
        ranked_lists.append(_ranked(papers))

    sizes = np.fromiter((len(r) for r in ranked_lists), dtype=np.int64, count=len(ranked_lists))
    offsets = np.zeros(len(ranked_lists) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    c = np.fromiter((p.citations for r in ranked_lists for p in r), dtype=np.int64,
                    count=int(offsets[-1]))
    a = np.fromiter((p.n_authors for r in ranked_lists for p in r), dtype=np.int64,
                    count=int(offsets[-1]))

    hs = kernels.h_batch(c, offsets)
    gs = kernels.g_batch(c, offsets, pad_g)
    his = kernels.hi_batch(a, offsets, hs)
    hms = kernels.hm_batch(c, a, offsets)

    hfs: list[Optional[int]] = [None] * len(active)
    errors: list[Optional[str]] = [None] * len(active)
    if baselines is not None:
        ok_rows: list[int] = []
        norm: list[list[float]] = []
        for i, ranked in enumerate(ranked_lists):
            try:
                norm.append(sorted(_normalized(ranked, baselines), reverse=True))
                ok_rows.append(i)
            except MissingBaselineError as exc:
                errors[i] = str(exc)
                logger.warning("%s: %s", active[i], exc)
        noff = np.zeros(len(norm) + 1, dtype=np.int64)
        np.cumsum([len(x) for x in norm], out=noff[1:])
        x = np.fromiter((v for row in norm for v in row), dtype=np.float64, count=int(noff[-1]))
        for i, v in zip(ok_rows, kernels.hreal_batch(x, noff).tolist()):
            hfs[i] = v

    for i, rid in enumerate(active):
        result[rid] = IndexSet(int(hs[i]), int(gs[i]), float(his[i]), float(hms[i]),
                               hfs[i], OK, len(ranked_lists[i]), errors[i])
    return result


# -- file formats ------------------------------------------------------------

@dataclass(frozen=True)
class ProfileRow:
    researcher_id: str
    sds: str
    uda: str
    indexes: IndexSet


def _fmt_int(v) -> str:
    return "" if v is None else str(int(v))


def _fmt_real(v) -> str:
    return "" if v is None else repr(float(v))


def format_profiles(rows: Iterable[ProfileRow], selected: Iterable[str] = INDEX_NAMES) -> str:
    """Profile CSV. Unselected indexes are left blank; reals keep full precision."""
    selected = set(selected)
    unknown = selected - set(INDEX_NAMES)
    if unknown:
        raise ValueError(f"unknown index name(s): {', '.join(sorted(unknown))}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_HEADER)
    for row in sorted(rows, key=lambda r: r.researcher_id):
        ix = row.indexes
        w.writerow([
            row.researcher_id, row.sds, row.uda, ix.status, ix.n_pubs,
            _fmt_int(ix.h) if "h" in selected else "",
            _fmt_int(ix.g) if "g" in selected else "",
            _fmt_real(ix.h_individual) if "hi" in selected else "",
            _fmt_real(ix.h_m) if "hm" in selected else "",
            _fmt_int(ix.h_f) if "hf" in selected else "",
        ])
    return buf.getvalue()


def parse_profiles(text) -> list[ProfileRow]:
    reader = csv.reader(io.StringIO(text) if isinstance(text, str) else text)
    header = next(reader, None)
    if header is None or tuple(header) != PROFILE_HEADER:
        raise CorpusError(f"line 1: profile header must be {','.join(PROFILE_HEADER)}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(PROFILE_HEADER):
            raise CorpusError(f"line {lineno}: expected {len(PROFILE_HEADER)} fields")
        rid, sds, uda, status, n_pubs, h, g, hi, hm, hf = rec
        if status not in STATUSES:
            raise CorpusError(f"line {lineno}: unknown status {status!r}")
        try:
            ix = IndexSet(
                int(h) if h else None, int(g) if g else None,
                float(hi) if hi else None, float(hm) if hm else None,
                int(hf) if hf else None, status, int(n_pubs))
        except ValueError as exc:
            raise CorpusError(f"line {lineno}: {exc}") from None
        rows.append(ProfileRow(rid, sds, uda, ix))
    return rows


def parse_baselines(text) -> dict[tuple[str, int], float]:
    reader = csv.reader(io.StringIO(text) if isinstance(text, str) else text)
    header = next(reader, None)
    if header is None:
        return {}
    if tuple(header) != BASELINE_HEADER:
        raise CorpusError(f"line 1: baseline header must be {','.join(BASELINE_HEADER)}")
    out = {}
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        try:
            cat, year, c0 = rec
            key, value = (cat, int(year)), float(c0)
        except ValueError:
            raise CorpusError(f"line {lineno}: malformed baseline row") from None
        if not value > 0:
            raise CorpusError(f"line {lineno}: c0 must be positive")
        if key in out:
            raise CorpusError(f"line {lineno}: duplicate baseline {key}")
        out[key] = value
    return out


def format_baselines(baselines: Baselines) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BASELINE_HEADER)
    for (cat, year) in sorted(baselines):
        w.writerow([cat, year, repr(float(baselines[(cat, year)]))])
    return buf.getvalue()

