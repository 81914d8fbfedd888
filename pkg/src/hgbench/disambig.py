"""Author-mention attribution: surname/initials blocking, a three-signal
linear score, thresholding, and precision/recall evaluation."""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from hgbench.corpus import (AuthorMention, ClassificationScheme, CorpusError, PublicationRecord,
                            RosterEntry, WindowConfig, effective_sds, fold)

ATTRIBUTION_HEADER = ("pub_id", "mention_position", "researcher_id", "score")
RESIDUE_HEADER = ("pub_id", "mention_position", "best_score")
GOLD_HEADER = ("pub_id", "mention_position", "researcher_id")
ALIAS_HEADER = ("pattern", "institution_id")


@dataclass(frozen=True)
class Attribution:
    pub_id: str
    mention_position: int
    researcher_id: str
    score: float

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.pub_id, self.mention_position, self.researcher_id)


@dataclass(frozen=True)
class Residue:
    pub_id: str
    mention_position: int
    best_score: Optional[float]  # None: no candidate survived blocking


@dataclass(frozen=True)
class DisambigConfig:
    threshold: float = 0.6
    weights: tuple[float, float, float] = (0.5, 0.3, 0.2)
    alias_table: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        # thresholds above 1 are allowed and simply reject everything
        if not 0.0 <= self.threshold < float("inf"):
            raise ValueError(f"threshold must be a nonnegative number, got {self.threshold}")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be three nonnegative numbers")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)!r}")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


@dataclass(frozen=True)
class EvalReport:
    true_positive: int
    false_positive: int
    false_negative: int
    precision: float
    recall: float
    f_measure: float


def f_measure(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def initials_compatible(mention: Sequence[str], researcher: Sequence[str]) -> bool:
    """First initial equal, the remaining mention initials appear in order
    among the researcher's remaining initials."""
    if not mention or not researcher or mention[0] != researcher[0]:
        return False
    it = iter(researcher[1:])
    return all(any(x == y for y in it) for x in mention[1:])


class RosterIndex:
    """Roster entries bucketed by normalized surname."""

    def __init__(self, roster: Iterable[RosterEntry]):
        self.by_surname: dict[str, list[tuple[RosterEntry, tuple[str, ...]]]] = defaultdict(list)
        for entry in roster:
            self.by_surname[entry.surname_norm].append((entry, entry.initials))
        for bucket in self.by_surname.values():
            bucket.sort(key=lambda item: item[0].researcher_id)

    def block(self, mention: AuthorMention) -> list[RosterEntry]:
        return [e for e, ini in self.by_surname.get(mention.surname_norm, ())
                if initials_compatible(mention.initials, ini)]


def block(mention: AuthorMention, roster) -> list[RosterEntry]:
    """Candidates sharing the surname key with compatible initials, by id."""
    if not isinstance(roster, RosterIndex):
        roster = RosterIndex(roster)
    return roster.block(mention)


class _AddressMapper:
    def __init__(self, alias_table: Mapping[str, str]):
        self.aliases = sorted((fold(k), v) for k, v in alias_table.items())
        self._cache: dict[str, frozenset[str]] = {}

    def institutions(self, addresses: Iterable[str]) -> frozenset[str]:
        found: set[str] = set()
        for addr in addresses:
            hit = self._cache.get(addr)
            if hit is None:
                up = fold(addr)
                hit = frozenset(inst for key, inst in self.aliases if key in up)
                self._cache[addr] = hit
            found |= hit
        return frozenset(found)


def _candidate_sds(candidate: RosterEntry, window: Optional[WindowConfig]) -> Optional[str]:
    if not candidate.sds_history:
        return None
    if window is None:
        return candidate.sds_history[-1][1]
    try:
        return effective_sds(candidate, window)
    except CorpusError:
        return None


def _field_signal(category: str, sds: Optional[str], scheme: ClassificationScheme) -> float:
    if scheme.category_affinity is None:
        return 0.5
    return 1.0 if sds is not None and sds in scheme.sds_affine_to(category) else 0.0


def _combine(weights, affiliation: float, field_: float, uniqueness: float) -> float:
    wa, wf, wu = weights
    return min(1.0, wa * affiliation + wf * field_ + wu * uniqueness)


def score_match(mention: AuthorMention, candidate: RosterEntry, pub: PublicationRecord,
                scheme: ClassificationScheme, config: DisambigConfig,
                n_candidates: int = 1, window: Optional[WindowConfig] = None) -> float:
    """Weighted sum of affiliation, field-affinity and uniqueness signals.

    ``n_candidates`` is the size of the block the candidate came from.
    """
    if n_candidates < 1:
        raise ValueError("n_candidates must be at least 1")
    insts = _AddressMapper(config.alias_table).institutions(pub.addresses)
    affiliation = 1.0 if candidate.institution_id in insts else 0.0
    field_ = _field_signal(pub.category, _candidate_sds(candidate, window), scheme)
    return _combine(config.weights, affiliation, field_, 1.0 / n_candidates)


@dataclass
class AttributionResult:
    attributions: list[Attribution]
    residue: list[Residue]


def attribute(corpus: Iterable[PublicationRecord], roster, scheme: ClassificationScheme,
              config: DisambigConfig, window: Optional[WindowConfig] = None) -> AttributionResult:
    """Link mentions to roster researchers.

    Within a publication, (mention, candidate) pairs are taken greedily by
    score, then researcher_id, then byline position, so a researcher gets
    at most one mention per paper and ties go to the lower id.
    """
    index = roster if isinstance(roster, RosterIndex) else RosterIndex(roster)
    mapper = _AddressMapper(config.alias_table)
    sds_cache: dict[str, Optional[str]] = {}
    out: list[Attribution] = []
    residue: list[Residue] = []
    threshold = config.threshold

    for pub in corpus:
        insts = mapper.institutions(pub.addresses)
        pairs: list[tuple[float, str, int]] = []
        best: dict[int, Optional[float]] = {}
        for m in pub.mentions:
            cands = index.block(m)
            best[m.position] = None
            if not cands:
                continue
            uniq = 1.0 / len(cands)
            for c in cands:
                sds = sds_cache.get(c.researcher_id, "")
                if sds == "":
                    sds = sds_cache[c.researcher_id] = _candidate_sds(c, window)
                s = _combine(config.weights,
                             1.0 if c.institution_id in insts else 0.0,
                             _field_signal(pub.category, sds, scheme), uniq)
                pairs.append((s, c.researcher_id, m.position))
                if best[m.position] is None or s > best[m.position]:
                    best[m.position] = s
        pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
        taken_pos: set[int] = set()
        taken_rid: set[str] = set()
        for s, rid, pos in pairs:
            if s < threshold:
                break
            if pos in taken_pos or rid in taken_rid:
                continue
            taken_pos.add(pos)
            taken_rid.add(rid)
            out.append(Attribution(pub.pub_id, pos, rid, s))
        for m in pub.mentions:
            if m.position not in taken_pos:
                residue.append(Residue(pub.pub_id, m.position, best[m.position]))

    out.sort(key=lambda a: (a.pub_id, a.mention_position))
    residue.sort(key=lambda r: (r.pub_id, r.mention_position))
    return AttributionResult(out, residue)


def evaluate(attributions: Iterable, gold: Iterable[tuple[str, int, str]]) -> EvalReport:
    """Precision, recall and F against gold links.

    With no predictions, precision is defined as 0 (not 1).
    """
    pred = {a.key if isinstance(a, Attribution) else tuple(a) for a in attributions}
    truth = {tuple(g) for g in gold}
    tp = len(pred & truth)
    fp = len(pred - truth)
    fn = len(truth - pred)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalReport(tp, fp, fn, precision, recall, f_measure(precision, recall))


# -- file formats ------------------------------------------------------------

def _reader(text, header: tuple[str, ...], what: str):
    reader = csv.reader(io.StringIO(text) if isinstance(text, str) else text)
    first = next(reader, None)
    if first is None:
        return
    if tuple(c.strip() for c in first) != header:
        raise CorpusError(f"line 1: {what} header must be {','.join(header)}")
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CorpusError(f"line {lineno}: {what} row needs {len(header)} fields")
        yield lineno, [c.strip() for c in row]


def _position(text: str, lineno: int) -> int:
    try:
        pos = int(text)
    except ValueError:
        raise CorpusError(f"line {lineno}: mention_position {text!r} is not an integer") from None
    if pos < 0:
        raise CorpusError(f"line {lineno}: negative mention_position")
    return pos


def parse_gold(text) -> set[tuple[str, int, str]]:
    return {(pid, _position(pos, ln), rid)
            for ln, (pid, pos, rid) in _reader(text, GOLD_HEADER, "gold")}


def format_gold(links: Iterable[tuple[str, int, str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GOLD_HEADER)
    w.writerows(sorted(links))
    return buf.getvalue()


def parse_aliases(text) -> dict[str, str]:
    return {pattern: inst for _, (pattern, inst) in _reader(text, ALIAS_HEADER, "alias")}


def format_aliases(table: Mapping[str, str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ALIAS_HEADER)
    w.writerows(sorted(table.items()))
    return buf.getvalue()


def format_attributions(rows: Iterable[Attribution]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ATTRIBUTION_HEADER)
    for a in sorted(rows, key=lambda a: (a.pub_id, a.mention_position)):
        w.writerow([a.pub_id, a.mention_position, a.researcher_id, f"{a.score:.6f}"])
    return buf.getvalue()


def parse_attributions(text) -> list[Attribution]:
    out = []
    for ln, (pid, pos, rid, score) in _reader(text, ATTRIBUTION_HEADER, "attribution"):
        try:
            s = float(score)
        except ValueError:
            raise CorpusError(f"line {ln}: bad score {score!r}") from None
        out.append(Attribution(pid, _position(pos, ln), rid, s))
    return out


def format_residue(rows: Iterable[Residue]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESIDUE_HEADER)
    for r in sorted(rows, key=lambda r: (r.pub_id, r.mention_position)):
        w.writerow([r.pub_id, r.mention_position,
                    "" if r.best_score is None else f"{r.best_score:.6f}"])
    return buf.getvalue()
