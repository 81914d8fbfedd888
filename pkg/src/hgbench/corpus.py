"""Ingestion and validation of publications, roster and field classification.

Everything returned here is immutable (frozen dataclasses, tuples), so the
loaded corpus can be shared read-only by the downstream stages.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Mapping, Optional, TextIO, Union

logger = logging.getLogger(__name__)

MIN_YEAR, MAX_YEAR = 1900, 2100

ROSTER_HEADER = ("researcher_id", "surname", "given_names", "institution_id",
                 "entry_year", "exit_year", "sds_history")
SCHEME_HEADER = ("sds_code", "sds_name", "uda_code", "uda_name")
AFFINITY_HEADER = ("category", "sds_code")

_STRIP_CHARS = re.compile(r"['\u2018\u2019\u02bc`\-\s.]+")
_INITIAL_SPLIT = re.compile(r"[\s.\-]+")


class CorpusError(ValueError):
    """Raised for malformed or inconsistent input data."""


def fold(text: str) -> str:
    """Uppercase and strip diacritics ("Nicolò" -> "NICOLO")."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c)).upper()


def normalize_surname(text: str) -> str:
    """Blocking key for a surname: "D'Amico" -> "DAMICO"."""
    return _STRIP_CHARS.sub("", fold(text))


def initials_of(given: str) -> tuple[str, ...]:
    """Ordered initials of a given-name string.

    Full names contribute their first letter ("Maria Anna" -> M, A). Short
    all-caps tokens are read as packed initials, WoS style ("CA" -> C, A).
    """
    out: list[str] = []
    for piece in _INITIAL_SPLIT.split(given.strip()):
        letters = "".join(ch for ch in piece if ch.isalpha())
        if not letters:
            continue
        folded = fold(letters)
        if len(letters) <= 3 and letters.isupper():
            out.extend(folded)
        else:
            out.append(folded[0])
    return tuple(out)


@dataclass(frozen=True)
class AuthorMention:
    raw: str
    surname_norm: str
    initials: tuple[str, ...]
    position: int

    @classmethod
    def parse(cls, raw: str, position: int) -> "AuthorMention":
        """Parse a byline entry such as ``"Rossi, M.A."`` or ``"Rossi MA"``."""
        if "," in raw:
            surname, given = raw.split(",", 1)
        else:
            parts = raw.strip().rsplit(None, 1)
            if len(parts) != 2:
                raise CorpusError(f"author {raw!r} has no initials")
            surname, given = parts
        surname_norm = normalize_surname(surname)
        initials = initials_of(given)
        if not surname_norm or not initials:
            raise CorpusError(f"author {raw!r} needs a surname and initials")
        return cls(raw, surname_norm, initials, position)


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    year: int
    mentions: tuple[AuthorMention, ...]
    addresses: tuple[str, ...]
    category: str
    citation_events: tuple[date, ...] = ()
    citation_snapshot: Optional[int] = None
    has_events: bool = False

    @property
    def n_authors(self) -> int:
        return len(self.mentions)

    def to_json(self) -> str:
        obj: dict = {
            "pub_id": self.pub_id,
            "year": self.year,
            "authors": [m.raw for m in self.mentions],
            "addresses": list(self.addresses),
            "category": self.category,
        }
        if self.has_events:
            obj["citation_dates"] = [d.isoformat() for d in self.citation_events]
        if self.citation_snapshot is not None:
            obj["citation_count"] = self.citation_snapshot
        return json.dumps(obj, ensure_ascii=False)


@dataclass(frozen=True)
class RosterEntry:
    researcher_id: str
    surname_norm: str
    given_names: str
    institution_id: str
    entry_year: Optional[int]
    exit_year: Optional[int]
    sds_history: tuple[tuple[int, str], ...]
    surname_raw: str = ""

    @property
    def initials(self) -> tuple[str, ...]:
        return initials_of(self.given_names)


@dataclass(frozen=True)
class ClassificationScheme:
    udas: tuple[tuple[str, str], ...]
    sds: tuple[tuple[str, str, str], ...]
    # None means no affinity file was supplied.
    category_affinity: Optional[Mapping[str, frozenset[str]]] = None
    _parent: Mapping[str, str] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        uda_codes = [u for u, _ in self.udas]
        if len(set(uda_codes)) != len(uda_codes):
            raise CorpusError("duplicate UDA code in classification")
        sds_codes = [s for s, _, _ in self.sds]
        if len(set(sds_codes)) != len(sds_codes):
            raise CorpusError("duplicate SDS code in classification")
        known = set(uda_codes)
        for code, _, parent in self.sds:
            if parent not in known:
                raise CorpusError(f"SDS {code} has unknown parent UDA {parent}")
        object.__setattr__(self, "_parent", {s: p for s, _, p in self.sds})

    def uda_of(self, sds_code: str) -> str:
        try:
            return self._parent[sds_code]
        except KeyError:
            raise CorpusError(f"unknown SDS code {sds_code!r}") from None

    def has_sds(self, sds_code: str) -> bool:
        return sds_code in self._parent

    def known_categories(self) -> frozenset[str]:
        if self.category_affinity is None:
            return frozenset()
        return frozenset(self.category_affinity)

    def sds_affine_to(self, category: str) -> frozenset[str]:
        if self.category_affinity is None:
            return frozenset()
        return self.category_affinity.get(category, frozenset())


@dataclass(frozen=True)
class WindowConfig:
    start_year: int
    end_year: int
    observation_date: date

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise CorpusError(
                f"window start {self.start_year} is after end {self.end_year}")
        if isinstance(self.observation_date, str):
            object.__setattr__(self, "observation_date",
                               parse_date(self.observation_date))

    @classmethod
    def parse(cls, window: str, obs: str) -> "WindowConfig":
        """Build from ``"2001:2005"`` and ``"2008-03-31"``."""
        try:
            start, end = (int(x) for x in window.split(":"))
        except ValueError:
            raise CorpusError(f"window must be START:END, got {window!r}") from None
        return cls(start, end, parse_date(obs))


def parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except (TypeError, ValueError):
        raise CorpusError(f"invalid ISO date {text!r}") from None


def _lines(stream: Union[str, TextIO, Iterable[str]]) -> Iterable[str]:
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


# -- publications ------------------------------------------------------------

_REQUIRED_PUB_FIELDS = ("pub_id", "year", "authors", "addresses", "category")


def parse_publications(stream) -> list[PublicationRecord]:
    """Parse line-delimited JSON publication records.

    Blank lines are skipped. Errors carry the 1-based line number.
    """
    records: list[PublicationRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: malformed record ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CorpusError(f"line {lineno}: record is not an object")
        rec = _publication_from_obj(obj, lineno)
        if rec.pub_id in seen:
            raise CorpusError(f"line {lineno}: duplicate pub_id {rec.pub_id!r}")
        seen.add(rec.pub_id)
        records.append(rec)
    return records


def _publication_from_obj(obj: dict, lineno: int) -> PublicationRecord:
    for name in _REQUIRED_PUB_FIELDS:
        if name not in obj:
            raise CorpusError(f"line {lineno}: missing required field {name!r}")
    pub_id = obj["pub_id"]
    if not isinstance(pub_id, str) or not pub_id:
        raise CorpusError(f"line {lineno}: pub_id must be a nonempty string")
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int) or not MIN_YEAR <= year <= MAX_YEAR:
        raise CorpusError(f"line {lineno}: year {year!r} outside [{MIN_YEAR}, {MAX_YEAR}]")
    authors = obj["authors"]
    if not isinstance(authors, list) or not authors:
        raise CorpusError(f"line {lineno}: authors must be a nonempty array")
    try:
        mentions = tuple(AuthorMention.parse(a, i) for i, a in enumerate(authors))
    except (CorpusError, AttributeError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None
    addresses = obj["addresses"]
    if not isinstance(addresses, list) or not all(isinstance(a, str) for a in addresses):
        raise CorpusError(f"line {lineno}: addresses must be an array of strings")
    category = obj["category"]
    if not isinstance(category, str):
        raise CorpusError(f"line {lineno}: category must be a string")

    has_events = "citation_dates" in obj and obj["citation_dates"] is not None
    events: tuple[date, ...] = ()
    if has_events:
        raw_dates = obj["citation_dates"]
        if not isinstance(raw_dates, list):
            raise CorpusError(f"line {lineno}: citation_dates must be an array")
        try:
            events = tuple(sorted(parse_date(d) for d in raw_dates))
        except CorpusError as exc:
            raise CorpusError(f"line {lineno}: {exc}") from None
    snapshot = obj.get("citation_count")
    if snapshot is not None:
        if isinstance(snapshot, bool) or not isinstance(snapshot, int) or snapshot < 0:
            raise CorpusError(f"line {lineno}: citation_count must be a nonnegative integer")
        if has_events:
            logger.warning("line %d: %s has both citation_dates and citation_count; "
                           "using dates", lineno, pub_id)
    return PublicationRecord(pub_id, year, mentions, tuple(addresses), category,
                             events, snapshot, has_events)


def serialize_publications(records: Iterable[PublicationRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


def citations_at(pub: PublicationRecord, obs: date) -> int:
    """Citations received up to and including ``obs``.

    Falls back to the static snapshot (ignoring ``obs``) when the record
    carries no dated events.
    """
    if pub.has_events:
        # events are sorted; bisect would do, but lists are short
        n = 0
        for d in pub.citation_events:
            if d > obs:
                break
            n += 1
        return n
    return pub.citation_snapshot or 0


def uses_snapshot(pub: PublicationRecord) -> bool:
    return not pub.has_events and pub.citation_snapshot is not None


def in_window(pub: PublicationRecord, window: WindowConfig) -> bool:
    return window.start_year <= pub.year <= window.end_year


def unknown_categories(records: Iterable[PublicationRecord],
                       scheme: ClassificationScheme,
                       baselines: Optional[Mapping] = None) -> set[str]:
    """pub_ids whose category is unknown to the affinity map (or baselines)."""
    if baselines is not None:
        known = {cat for cat, _ in baselines}
    else:
        known = scheme.known_categories()
    return {r.pub_id for r in records if r.category not in known}


# -- roster ------------------------------------------------------------------

def _parse_year(text: str, lineno: int, name: str, optional: bool) -> Optional[int]:
    text = text.strip()
    if not text:
        if optional:
            return None
        raise CorpusError(f"line {lineno}: missing {name}")
    try:
        year = int(text)
    except ValueError:
        raise CorpusError(f"line {lineno}: {name} {text!r} is not a year") from None
    if not MIN_YEAR <= year <= MAX_YEAR:
        raise CorpusError(f"line {lineno}: {name} {year} out of range")
    return year


def parse_sds_history(text: str, lineno: int = 0) -> tuple[tuple[int, str], ...]:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        year, sep, code = chunk.partition(":")
        if not sep or not code.strip():
            raise CorpusError(f"line {lineno}: bad sds_history entry {chunk!r}")
        pairs.append((_parse_year(year, lineno, "sds_history year", False), code.strip()))
    pairs.sort(key=lambda p: p[0])
    return tuple(pairs)


def parse_roster(stream) -> list[RosterEntry]:
    reader = csv.reader(_lines(stream))
    header = next(reader, None)
    if header is None:
        return []
    if tuple(h.strip() for h in header) != ROSTER_HEADER:
        raise CorpusError(f"line 1: roster header must be {','.join(ROSTER_HEADER)}")
    entries: list[RosterEntry] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(ROSTER_HEADER):
            raise CorpusError(f"line {lineno}: expected {len(ROSTER_HEADER)} fields, got {len(row)}")
        rid, surname, given, inst, entry, exit_, hist = row
        rid = rid.strip()
        if not rid:
            raise CorpusError(f"line {lineno}: missing researcher_id")
        if rid in seen:
            raise CorpusError(f"line {lineno}: duplicate researcher_id {rid!r}")
        seen.add(rid)
        entry_year = _parse_year(entry, lineno, "entry_year", True)
        exit_year = _parse_year(exit_, lineno, "exit_year", True)
        if entry_year is not None and exit_year is not None and entry_year > exit_year:
            raise CorpusError(
                f"line {lineno}: entry_year {entry_year} after exit_year {exit_year}")
        surname_norm = normalize_surname(surname)
        if not surname_norm:
            raise CorpusError(f"line {lineno}: missing surname")
        if not initials_of(given):
            raise CorpusError(f"line {lineno}: missing given_names")
        entries.append(RosterEntry(rid, surname_norm, given.strip(), inst.strip(),
                                   entry_year, exit_year,
                                   parse_sds_history(hist, lineno), surname.strip()))
    return entries


def serialize_roster(entries: Iterable[RosterEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROSTER_HEADER)
    for e in entries:
        writer.writerow([
            e.researcher_id, e.surname_raw or e.surname_norm, e.given_names,
            e.institution_id,
            "" if e.entry_year is None else e.entry_year,
            "" if e.exit_year is None else e.exit_year,
            ";".join(f"{y}:{c}" for y, c in e.sds_history),
        ])
    return buf.getvalue()


def eligible_researchers(roster: Iterable[RosterEntry],
                         window: WindowConfig) -> list[RosterEntry]:
    """Researchers on staff for the whole window.

    An unknown entry year counts as "always there".
    """
    return [
        e for e in roster
        if (e.entry_year is None or e.entry_year <= window.start_year)
        and (e.exit_year is None or e.exit_year >= window.end_year)
    ]


def effective_sds(entry: RosterEntry, window: WindowConfig) -> str:
    """SDS held at the close of the window's last year."""
    if not entry.sds_history:
        raise CorpusError(f"{entry.researcher_id}: empty sds_history")
    code = None
    for year, sds in entry.sds_history:
        if year <= window.end_year:
            code = sds
        else:
            break
    if code is None:
        raise CorpusError(
            f"{entry.researcher_id}: no SDS assignment on or before {window.end_year}")
    return code


# -- classification ----------------------------------------------------------

def _read_table(stream, header: tuple[str, ...], what: str) -> list[tuple[int, list[str]]]:
    reader = csv.reader(_lines(stream))
    first = next(reader, None)
    if first is None:
        return []
    if tuple(h.strip() for h in first) != header:
        raise CorpusError(f"line 1: {what} header must be {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CorpusError(f"line {lineno}: {what} row needs {len(header)} fields")
        rows.append((lineno, [c.strip() for c in row]))
    return rows


def parse_scheme(stream, affinity_stream=None) -> ClassificationScheme:
    udas: dict[str, str] = {}
    sds: list[tuple[str, str, str]] = []
    for lineno, (sds_code, sds_name, uda_code, uda_name) in _read_table(
            stream, SCHEME_HEADER, "classification"):
        if not sds_code or not uda_code:
            raise CorpusError(f"line {lineno}: empty code")
        if udas.get(uda_code, uda_name) != uda_name:
            raise CorpusError(f"line {lineno}: UDA {uda_code} has two names")
        udas[uda_code] = uda_name
        sds.append((sds_code, sds_name, uda_code))
    affinity = None
    if affinity_stream is not None:
        codes = {s for s, _, _ in sds}
        acc: dict[str, set[str]] = {}
        for lineno, (category, sds_code) in _read_table(
                affinity_stream, AFFINITY_HEADER, "affinity"):
            if sds_code not in codes:
                raise CorpusError(f"line {lineno}: affinity names unknown SDS {sds_code!r}")
            acc.setdefault(category, set()).add(sds_code)
        affinity = {k: frozenset(v) for k, v in acc.items()}
    return ClassificationScheme(tuple(sorted(udas.items())), tuple(sds), affinity)


def serialize_scheme(scheme: ClassificationScheme) -> tuple[str, Optional[str]]:
    names = dict(scheme.udas)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCHEME_HEADER)
    for code, name, parent in scheme.sds:
        w.writerow([code, name, parent, names[parent]])
    if scheme.category_affinity is None:
        return buf.getvalue(), None
    abuf = io.StringIO()
    w = csv.writer(abuf, lineterminator="\n")
    w.writerow(AFFINITY_HEADER)
    for category in sorted(scheme.category_affinity):
        for code in sorted(scheme.category_affinity[category]):
            w.writerow([category, code])
    return buf.getvalue(), abuf.getvalue()
