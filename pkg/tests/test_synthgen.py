import pytest

from hgbench.corpus import parse_publications, parse_roster, parse_scheme
from hgbench.disambig import parse_aliases, parse_gold
from hgbench.indices import parse_baselines
from hgbench.synthgen import (SynthConfig, SynthError, corpus_census, field_baselines, generate,
                              homonym_fraction, homonym_group_sizes)


@pytest.fixture(scope="module")
def small():
    return generate(SynthConfig(seed=7, n_researchers=600))


def test_deterministic(small):
    again = generate(SynthConfig(seed=7, n_researchers=600))
    assert list(small.items()) == list(again.items())
    other = generate(SynthConfig(seed=8, n_researchers=600))
    assert other.publications != small.publications


def test_files_parse(small):
    cfg = SynthConfig(seed=7, n_researchers=600)
    pubs = parse_publications(small.publications)
    roster = parse_roster(small.roster)
    scheme = parse_scheme(small.scheme, small.affinity)
    gold = parse_gold(small.gold)
    assert len(roster) == 600 and pubs
    assert scheme == cfg.scheme()
    assert parse_aliases(small.aliases)
    ids = {e.researcher_id for e in roster}
    by_id = {p.pub_id: p for p in pubs}
    for pid, pos, rid in gold:
        assert rid in ids and pos < by_id[pid].n_authors
    # each researcher at most once per paper
    assert len({(pid, rid) for pid, _, rid in gold}) == len(gold)


def test_baselines_match_corpus(small):
    pubs = parse_publications(small.publications)
    expected = field_baselines(pubs, SynthConfig().window.observation_date)
    got = parse_baselines(small.baselines)
    assert got.keys() == expected.keys()
    for k, v in expected.items():
        assert got[k] == pytest.approx(v, abs=1e-9)


def test_no_homonyms_at_zero_rate():
    out = generate(SynthConfig(seed=1, n_researchers=300, homonym_rate=0.0))
    assert homonym_fraction(parse_roster(out.roster)) == 0.0


@pytest.mark.slow
def test_homonym_rate_at_scale():
    out = generate(SynthConfig(seed=3, n_researchers=10_000))
    frac = homonym_fraction(parse_roster(out.roster))
    assert 0.11 <= frac <= 0.13


def test_group_sizes():
    assert homonym_group_sizes(100, 0.12) == [2] * 6
    assert sum(homonym_group_sizes(100, 0.13)) == 13
    assert homonym_group_sizes(100, 0.0) == []
    with pytest.raises(SynthError):
        homonym_group_sizes(20, 0.03)


def test_config_validation():
    with pytest.raises(SynthError):
        SynthConfig(n_researchers=-1)
    with pytest.raises(SynthError):
        SynthConfig(homonym_rate=1.5)


def test_census(small):
    roster = parse_roster(small.roster)
    pubs = parse_publications(small.publications)
    c = corpus_census(pubs, roster)
    assert (c.publications, c.researchers) == (len(pubs), 600)
    assert c.mentions == sum(p.n_authors for p in pubs)
    assert 0.10 <= c.homonym_fraction <= 0.14
    assert corpus_census([], []).homonym_fraction == 0.0
