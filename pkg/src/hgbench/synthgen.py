"""Deterministic synthetic corpora with gold attribution labels.

A fixed seed reproduces every emitted file byte for byte. Sectors differ in
publication intensity, citation skew (discretized lognormal) and share of
inactive staff; surnames are assigned so the homonym fraction of the roster
is controlled directly.
"""
from __future__ import annotations

import json
import os
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Optional, Sequence

import numpy as np

from hgbench.corpus import (ClassificationScheme, PublicationRecord, RosterEntry, WindowConfig,
                            citations_at, fold, initials_of, normalize_surname, serialize_roster,
                            serialize_scheme)
from hgbench.disambig import format_aliases, format_gold
from hgbench.indices import format_baselines


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class Sector:
    code: str
    name: str
    uda_code: str
    uda_name: str
    weight: float  # share of the roster
    pub_rate: float  # lead papers per researcher-year
    cit_mu: float  # lognormal location of citation counts
    cit_sigma: float
    inactive_share: float
    categories: tuple[str, ...]


DEFAULT_SECTORS: tuple[Sector, ...] = (
    Sector("MAT/03", "Geometry", "01", "Mathematics and computer sciences", 0.06, 0.5, 0.4, 0.9, 0.30, ("MATH",)),
    Sector("MAT/05", "Mathematical analysis", "01", "Mathematics and computer sciences", 0.07, 0.5, 0.5, 0.9, 0.25, ("MATH", "MATH-APPL")),
    Sector("INF/01", "Computer science", "01", "Mathematics and computer sciences", 0.08, 0.7, 0.6, 1.0, 0.25, ("COMP-SCI", "MATH-APPL")),
    Sector("MAT/04", "Mathematics education", "01", "Mathematics and computer sciences", 0.03, 0.3, 0.2, 0.8, 0.65, ("EDU", "MATH")),
    Sector("FIS/01", "Experimental physics", "02", "Physics", 0.10, 1.2, 1.7, 1.1, 0.08, ("PHYS-PART", "PHYS-MULTI")),
    Sector("FIS/03", "Physics of matter", "02", "Physics", 0.08, 1.1, 1.9, 1.0, 0.08, ("PHYS-COND", "PHYS-APPL")),
    Sector("FIS/05", "Astronomy and astrophysics", "02", "Physics", 0.04, 1.0, 2.0, 1.2, 0.10, ("ASTRO",)),
    Sector("CHIM/03", "General and inorganic chemistry", "03", "Chemistry", 0.09, 1.2, 1.9, 0.9, 0.06, ("CHEM-INORG", "CHEM-MULTI")),
    Sector("CHIM/06", "Organic chemistry", "03", "Chemistry", 0.09, 1.2, 2.0, 0.9, 0.06, ("CHEM-ORG", "CHEM-MULTI")),
    Sector("ING-INF/05", "Information processing systems", "09", "Industrial and information engineering", 0.12, 0.8, 0.8, 1.0, 0.20, ("COMP-SCI", "ENG-ELEC")),
    Sector("ING-IND/10", "Technical physics", "09", "Industrial and information engineering", 0.08, 0.7, 0.9, 1.0, 0.20, ("ENG-MECH", "THERMO")),
    Sector("ICAR/08", "Structural mechanics", "08", "Civil engineering and architecture", 0.07, 0.5, 0.6, 1.0, 0.30, ("ENG-CIVIL",)),
)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_researchers: int = 2000
    sectors: tuple[Sector, ...] = DEFAULT_SECTORS
    # weights for 1, 2, ..., len(coauthors) authors per paper
    coauthors: tuple[float, ...] = (0.12, 0.22, 0.24, 0.18, 0.12, 0.07, 0.05)
    internal_share: float = 0.55  # co-author drawn from the lead's institution
    external_roster_surname: float = 0.15  # external author reusing a roster surname
    homonym_rate: float = 0.12
    window: WindowConfig = WindowConfig(2001, 2005, date(2008, 3, 31))
    n_institutions: int = 40
    late_entry_share: float = 0.14
    early_exit_share: float = 0.10
    sds_move_share: float = 0.06
    address_drop: float = 0.05  # an author institution missing from the address list
    snapshot_share: float = 0.0  # papers carrying a bare citation count
    horizon_years: int = 2  # citations dated up to obs date + this

    def __post_init__(self):
        if self.n_researchers < 0:
            raise SynthError("n_researchers must be nonnegative")
        if not 0.0 <= self.homonym_rate < 1.0:
            raise SynthError("homonym_rate must lie in [0, 1)")
        if any(s.pub_rate < 0 or s.weight < 0 for s in self.sectors):
            raise SynthError("sector rates and weights must be nonnegative")
        if not self.sectors or sum(s.weight for s in self.sectors) <= 0:
            raise SynthError("need at least one sector with positive weight")
        if not self.coauthors or any(w < 0 for w in self.coauthors) or sum(self.coauthors) <= 0:
            raise SynthError("coauthor weights must be nonnegative with a positive sum")

    def scheme(self) -> ClassificationScheme:
        udas = sorted({(s.uda_code, s.uda_name) for s in self.sectors})
        aff: dict[str, set[str]] = defaultdict(set)
        for s in self.sectors:
            for cat in s.categories:
                aff[cat].add(s.code)
        return ClassificationScheme(tuple(udas), tuple((s.code, s.name, s.uda_code) for s in self.sectors),
                                    {k: frozenset(v) for k, v in aff.items()})


@dataclass
class SynthOutput:
    publications: str
    roster: str
    gold: str
    baselines: str
    scheme: str
    affinity: str
    aliases: str

    FILES = {
        "publications": "publications.jsonl",
        "roster": "roster.csv",
        "gold": "gold.csv",
        "baselines": "baselines.csv",
        "scheme": "scheme.csv",
        "affinity": "affinity.csv",
        "aliases": "aliases.csv",
    }

    def items(self):
        for attr, fname in self.FILES.items():
            yield fname, getattr(self, attr)

    def write(self, out_dir: str, writer=None) -> None:
        """Write all files; ``writer(path, text)`` defaults to a plain write."""
        os.makedirs(out_dir, exist_ok=True)
        for fname, text in self.items():
            path = os.path.join(out_dir, fname)
            if writer is not None:
                writer(path, text)
            else:
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)


_SYLLABLES = ("ro", "ssi", "bi", "an", "chi", "fe", "rra", "ri", "ma", "ti", "co", "lo",
              "gal", "li", "ne", "gri", "mo", "re", "sca", "ppa", "ve", "rdi", "bru", "no",
              "col", "bo", "sa", "ba", "to", "lu", "ca", "de", "pa", "ce", "gi", "vi",
              "tta", "nu", "zzi", "fa", "mar", "ten", "spa", "dor", "mi", "ga", "ler", "pi")
_ENDINGS = ("i", "o", "a", "ini", "etti", "one", "elli", "ucci")
_GIVEN = ("Alessandro", "Andrea", "Anna", "Antonio", "Barbara", "Bruno", "Carla", "Carlo",
          "Chiara", "Claudio", "Daniela", "Davide", "Elena", "Emanuele", "Enrico", "Fabio",
          "Federica", "Francesca", "Francesco", "Gabriele", "Giorgio", "Giovanni", "Giulia",
          "Giuseppe", "Ilaria", "Irene", "Laura", "Lorenzo", "Luca", "Lucia", "Marco",
          "Maria", "Mario", "Massimo", "Matteo", "Michele", "Nicola", "Nicolò", "Olga",
          "Paola", "Paolo", "Pietro", "Raffaele", "Renato", "Roberta", "Sara", "Silvia",
          "Simone", "Stefano", "Teresa", "Ugo", "Valentina", "Vittorio", "Walter", "Zeno")
_DEPTS = ("Fisica", "Chimica", "Matematica", "Ingegneria", "Informatica", "Scienze")
_FOREIGN = ("Paris, France", "Lyon, France", "Berlin, Germany", "Munich, Germany",
            "Madrid, Spain", "Oxford, England", "Leiden, Netherlands", "Zurich, Switzerland",
            "Boston, MA USA", "Austin, TX USA", "Vienna, Austria", "Lund, Sweden")


def _surname(rng: np.random.Generator, n_syll: int) -> str:
    parts = [_SYLLABLES[i] for i in rng.integers(0, len(_SYLLABLES), n_syll)]
    word = "".join(parts) + _ENDINGS[int(rng.integers(0, len(_ENDINGS)))]
    word = word.capitalize()
    roll = rng.random()
    if roll < 0.04:
        word = "D'" + word
    elif roll < 0.07:
        word = "De " + word
    elif roll < 0.10 and word[-1] in "aeiou":
        word = word[:-1] + {"a": "à", "e": "è", "i": "ì", "o": "ò", "u": "ù"}[word[-1]]
    return word


def _unique_surnames(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    out: list[str] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 50 * count + 1000:
            raise SynthError("surname pool exhausted")
        name = _surname(rng, 2 + int(rng.integers(0, 3)))
        key = normalize_surname(name)
        if key in taken:
            continue
        taken.add(key)
        out.append(name)
    return out


def homonym_group_sizes(n: int, rate: float) -> list[int]:
    """Group sizes (each >= 2) whose total is closest to ``rate * n``.

    Raises when the achievable fraction misses ``rate`` by more than one
    percentage point, which only happens for tiny rosters.
    """
    target = round(rate * n)
    if target == 1:
        target = 2 if n >= 2 and abs(2 / n - rate) <= abs(0 - rate) else 0
    if target > n:
        target = n
    if n and abs(target / n - rate) > 0.01:
        raise SynthError(f"homonym rate {rate} not attainable with {n} researchers")
    if target == 0:
        return []
    if target < 2:
        raise SynthError(f"homonym rate {rate} not attainable with {n} researchers")
    sizes = [2] * (target // 2)
    if target % 2:
        sizes[-1] = 3
    return sizes


def _initials_string(given: str, rng: np.random.Generator) -> str:
    ini = "".join(initials_of(given))
    if len(ini) > 1 and rng.random() < 0.5:
        ini = ini[0]
    return ini


def _mention(surname: str, given: str, rng: np.random.Generator) -> str:
    roll = rng.random()
    if roll < 0.2:
        # ASCII byline rendering of accented surnames
        surname = fold(surname).title()
    return f"{surname}, {_initials_string(given, rng)}"


def _date_offsets(rng: np.random.Generator, year: int, horizon: date, k: int) -> list[date]:
    start = date(year, 1, 1)
    span = (horizon - start).days
    if span <= 0 or k == 0:
        return []
    days = np.sort(rng.integers(0, span + 1, k))
    return [start + timedelta(days=int(d)) for d in days]


def generate(config: SynthConfig) -> SynthOutput:
    rng = np.random.default_rng(config.seed)
    w = config.window
    n = config.n_researchers
    sectors = config.sectors
    scheme = config.scheme()

    # institutions
    city_names = _unique_surnames(rng, config.n_institutions, set())
    institutions = []
    aliases: dict[str, str] = {}
    for i, city in enumerate(city_names):
        inst_id = f"U{i + 1:03d}"
        plain = fold(city).title().replace(" ", "")
        institutions.append((inst_id, plain))
        aliases[f"Univ {plain},"] = inst_id
        aliases[f"Universita di {plain},"] = inst_id

    # sectors per researcher
    weights = np.array([s.weight for s in sectors], dtype=float)
    counts = np.floor(weights / weights.sum() * n).astype(int)
    for i in np.argsort(-(weights / weights.sum() * n - counts), kind="stable")[: n - counts.sum()]:
        counts[i] += 1
    sector_of = np.repeat(np.arange(len(sectors)), counts)

    # surnames with controlled homonym mass
    sizes = homonym_group_sizes(n, config.homonym_rate)
    n_hom = sum(sizes)
    taken: set[str] = set()
    shared = _unique_surnames(rng, len(sizes), taken)
    single = _unique_surnames(rng, n - n_hom, taken)
    surnames: list[str] = []
    for name, k in zip(shared, sizes):
        surnames.extend([name] * k)
    surnames.extend(single)
    order = rng.permutation(n)
    surnames = [surnames[i] for i in order]

    roster: list[RosterEntry] = []
    tenure: list[tuple[int, int]] = []
    active: list[bool] = []
    final_sector: list[int] = []
    for i in range(n):
        s_idx = int(sector_of[i])
        sector = sectors[s_idx]
        first = _GIVEN[int(rng.integers(0, len(_GIVEN)))]
        given = first
        if rng.random() < 0.3:
            second = _GIVEN[int(rng.integers(0, len(_GIVEN)))]
            if second != first:
                given = f"{first} {second}"
        inst = institutions[int(rng.integers(0, len(institutions)))][0]
        roll = rng.random()
        exit_year: Optional[int] = None
        if roll < config.late_entry_share:
            entry = int(rng.integers(w.start_year + 1, w.end_year + 3))
        else:
            entry = int(rng.integers(w.start_year - 25, w.start_year + 1))
        if rng.random() < config.early_exit_share and entry < w.end_year:
            exit_year = int(rng.integers(max(entry, w.start_year), w.end_year))
        elif rng.random() < 0.3:
            exit_year = int(rng.integers(w.end_year, w.end_year + 6))
            exit_year = max(exit_year, entry)

        history = [(entry, sector.code)]
        roll = rng.random()
        if roll < config.sds_move_share:
            peers = [j for j, s in enumerate(sectors) if s.uda_code == sector.uda_code and j != s_idx]
            if peers and entry < w.end_year:
                move_to = peers[int(rng.integers(0, len(peers)))]
                move_year = int(rng.integers(max(entry + 1, w.start_year), w.end_year + 1))
                if move_year > entry:
                    history.append((move_year, sectors[move_to].code))
                    s_idx = move_to
        elif roll < config.sds_move_share * 1.4:
            # reassignment after the window: effective SDS stays the first one
            peers = [j for j, s in enumerate(sectors) if s.uda_code == sector.uda_code and j != s_idx]
            if peers:
                history.append((w.end_year + 1, sectors[peers[0]].code))
        roster.append(RosterEntry(
            f"R{i + 1:05d}", normalize_surname(surnames[i]), given, inst,
            entry, exit_year, tuple(history), surnames[i]))
        tenure.append((entry, exit_year if exit_year is not None else w.end_year + 10))
        active.append(bool(rng.random() >= sectors[s_idx].inactive_share))
        final_sector.append(s_idx)

    # internal co-author pools: active researchers by (institution, UDA)
    pools: dict[tuple[str, str], list[int]] = defaultdict(list)
    for i, e in enumerate(roster):
        if active[i]:
            pools[(e.institution_id, sectors[final_sector[i]].uda_code)].append(i)

    roster_surnames = [surnames[i] for i in range(n)]
    external_pool = _unique_surnames(rng, max(200, n // 2), set(taken))
    inst_name = dict(institutions)
    co_w = np.array(config.coauthors, dtype=float)
    co_w = co_w / co_w.sum()
    all_categories = sorted({c for s in sectors for c in s.categories})
    horizon = date(w.observation_date.year + config.horizon_years,
                   w.observation_date.month, min(w.observation_date.day, 28))
    years = range(w.start_year - 1, w.end_year + 2)

    pubs: list[PublicationRecord] = []
    gold: list[tuple[str, int, str]] = []
    pub_lines: list[str] = []
    for i in range(n):
        if not active[i]:
            continue
        lead = roster[i]
        sector = sectors[final_sector[i]]
        lo, hi = tenure[i]
        for year in years:
            if not lo <= year <= hi:
                continue
            for _ in range(int(rng.poisson(sector.pub_rate))):
                pub_id = f"P{len(pubs) + 1:07d}"
                n_auth = 1 + int(rng.choice(len(co_w), p=co_w))
                members = [i]
                externals: list[tuple[str, str, str]] = []
                pool = pools.get((lead.institution_id, sector.uda_code), [])
                for _k in range(n_auth - 1):
                    if rng.random() < config.internal_share and len(pool) > len(members):
                        cand = pool[int(rng.integers(0, len(pool)))]
                        if cand not in members:
                            members.append(cand)
                            continue
                    if rng.random() < config.external_roster_surname and n:
                        sname = roster_surnames[int(rng.integers(0, n))]
                    else:
                        sname = external_pool[int(rng.integers(0, len(external_pool)))]
                    gname = _GIVEN[int(rng.integers(0, len(_GIVEN)))]
                    city = _FOREIGN[int(rng.integers(0, len(_FOREIGN)))]
                    externals.append((sname, gname, city))
                byline: list[tuple[str, Optional[str]]] = []
                for m in members:
                    e = roster[m]
                    byline.append((_mention(e.surname_raw, e.given_names, rng), e.researcher_id))
                for sname, gname, _city in externals:
                    byline.append((_mention(sname, gname, rng), None))
                perm = rng.permutation(len(byline))
                byline = [byline[j] for j in perm]

                addresses: list[str] = []
                for inst in sorted({roster[m].institution_id for m in members}):
                    if rng.random() < config.address_drop:
                        continue
                    city = inst_name[inst]
                    dept = _DEPTS[int(rng.integers(0, len(_DEPTS)))]
                    if rng.random() < 0.5:
                        addresses.append(f"Univ {city}, Dipartimento di {dept}, I-00100 {city}, Italy")
                    else:
                        addresses.append(f"Universita di {city}, Dip {dept}, {city}, Italy")
                for city in sorted({c for _, _, c in externals}):
                    addresses.append(f"Univ {city}")

                if rng.random() < 0.1:
                    category = all_categories[int(rng.integers(0, len(all_categories)))]
                else:
                    category = sector.categories[int(rng.integers(0, len(sector.categories)))]

                n_cit = int(np.floor(rng.lognormal(sector.cit_mu, sector.cit_sigma))) - 1
                n_cit = min(max(n_cit, 0), 3000)
                obj = {"pub_id": pub_id, "year": year,
                       "authors": [b[0] for b in byline],
                       "addresses": addresses, "category": category}
                if rng.random() < config.snapshot_share:
                    obj["citation_count"] = n_cit
                    events: tuple[date, ...] = ()
                    has_events = False
                    snapshot: Optional[int] = n_cit
                else:
                    events = tuple(_date_offsets(rng, year, horizon, n_cit))
                    obj["citation_dates"] = [d.isoformat() for d in events]
                    has_events = True
                    snapshot = None
                pub_lines.append(json.dumps(obj, ensure_ascii=False) + "\n")
                pubs.append(PublicationRecord(pub_id, year, (), tuple(addresses), category,
                                              events, snapshot, has_events))
                for pos, (_, rid) in enumerate(byline):
                    if rid is not None:
                        gold.append((pub_id, pos, rid))

    scheme_text, affinity_text = serialize_scheme(scheme)
    return SynthOutput(
        publications="".join(pub_lines),
        roster=serialize_roster(roster),
        gold=format_gold(gold),
        baselines=format_baselines(field_baselines(pubs, w.observation_date)),
        scheme=scheme_text,
        affinity=affinity_text or "",
        aliases=format_aliases(aliases),
    )


def field_baselines(pubs: Iterable[PublicationRecord], obs: date) -> dict[tuple[str, int], float]:
    """Mean citations at ``obs`` per (category, year); cells with mean 0 are omitted."""
    tot: dict[tuple[str, int], int] = defaultdict(int)
    cnt: dict[tuple[str, int], int] = defaultdict(int)
    for p in pubs:
        key = (p.category, p.year)
        tot[key] += citations_at(p, obs)
        cnt[key] += 1
    return {k: tot[k] / cnt[k] for k in sorted(cnt) if tot[k] > 0}


@dataclass(frozen=True)
class Census:
    publications: int
    researchers: int
    mentions: int
    homonym_fraction: float


def homonym_fraction(roster: Sequence[RosterEntry]) -> float:
    if not roster:
        return 0.0
    c = Counter(e.surname_norm for e in roster)
    return sum(1 for e in roster if c[e.surname_norm] > 1) / len(roster)


def corpus_census(corpus: Sequence[PublicationRecord], roster: Sequence[RosterEntry]) -> Census:
    return Census(len(corpus), len(roster), sum(len(p.mentions) for p in corpus),
                  homonym_fraction(roster))
