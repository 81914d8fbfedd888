from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgbench.corpus import (AuthorMention, ClassificationScheme, PublicationRecord, RosterEntry,
                            WindowConfig)
from hgbench.disambig import (Attribution, DisambigConfig, RosterIndex, attribute, block,
                              evaluate, f_measure, format_attributions, format_gold,
                              format_residue, initials_compatible, parse_aliases,
                              parse_attributions, parse_gold, score_match)

W = WindowConfig(2001, 2005, date(2008, 3, 31))
SCHEME = ClassificationScheme((("02", "Physics"), ("01", "Math")),
                              (("FIS/01", "Exp", "02"), ("MAT/05", "An", "01")),
                              {"PHYS": frozenset({"FIS/01"}), "MATH": frozenset({"MAT/05"})})
NO_AFFINITY = ClassificationScheme((("02", "Physics"),), (("FIS/01", "Exp", "02"),))
CFG = DisambigConfig(0.7, (0.5, 0.3, 0.2), {"Univ Roma,": "U1", "Univ Pisa,": "U2"})


def person(rid, surname, given, inst="U1", sds="FIS/01"):
    return RosterEntry(rid, surname, given, inst, 1990, None, ((1990, sds),))


def pub(pid, authors, addresses=("Univ Roma, Italy",), category="PHYS"):
    ms = tuple(AuthorMention.parse(a, i) for i, a in enumerate(authors))
    return PublicationRecord(pid, 2003, ms, tuple(addresses), category)


ROSTER = [person("R1", "ROSSI", "Maria"), person("R2", "ROSSI", "Marco"),
          person("R3", "BIANCHI", "Mario")]


def test_block_examples():
    m = AuthorMention.parse("Rossi, M", 0)
    assert [e.researcher_id for e in block(m, ROSTER)] == ["R1", "R2"]
    ma = AuthorMention.parse("Rossi, MA", 0)
    assert [e.researcher_id for e in block(ma, [person("X", "ROSSI", "Maria Anna")])] == ["X"]
    assert block(ma, [person("Y", "ROSSI", "Marco")]) == []
    assert block(m, []) == []


def test_initials_compatibility():
    assert initials_compatible(("M",), ("M", "A"))
    assert initials_compatible(("M", "B"), ("M", "A", "B"))
    assert not initials_compatible(("M", "A"), ("M",))
    assert not initials_compatible(("A",), ("M", "A"))
    assert not initials_compatible(("M", "B", "A"), ("M", "A", "B"))


@settings(max_examples=50, deadline=None)
@given(st.permutations(ROSTER + [person("R4", "ROSSI", "Mara Bice")]))
def test_block_order_independent(perm):
    m = AuthorMention.parse("Rossi, M", 0)
    assert {e.researcher_id for e in block(m, perm)} == {"R1", "R2", "R4"}


def test_score_examples():
    m = AuthorMention.parse("Rossi, M", 0)
    p = pub("P", ["Rossi, M"])
    assert score_match(m, ROSTER[0], p, SCHEME, CFG, 1) == pytest.approx(1.0, abs=1e-12)
    p_far = pub("P", ["Rossi, M"], addresses=("Univ Napoli, Italy",))
    assert score_match(m, ROSTER[0], p_far, SCHEME, CFG, 2) == pytest.approx(0.40, abs=1e-12)
    p_none = pub("P", ["Rossi, M"], addresses=(), category="MATH")
    assert score_match(m, ROSTER[0], p_none, SCHEME, CFG, 1) == pytest.approx(0.2, abs=1e-12)
    # no affinity map: field signal is 0.5
    assert score_match(m, ROSTER[0], p_none, NO_AFFINITY, CFG, 1) == pytest.approx(0.35, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.booleans(), st.booleans(), st.integers(1, 6),
       st.lists(st.floats(0, 1), min_size=3, max_size=3).filter(lambda w: sum(w) > 0.01))
def test_score_bounded_and_monotone(aff, fld, k, raw):
    w = tuple(x / sum(raw) for x in raw)
    w = (w[0], w[1], max(0.0, 1.0 - w[0] - w[1]))
    cfg = DisambigConfig(0.5, w, {"Univ Roma,": "U1"})
    m = AuthorMention.parse("Rossi, M", 0)
    def s(a, f, kk):
        p = pub("P", ["Rossi, M"], ("Univ Roma, I",) if a else (), "PHYS" if f else "MATH")
        return score_match(m, ROSTER[0], p, SCHEME, cfg, kk)
    v = s(aff, fld, k)
    assert 0.0 <= v <= 1.0
    assert s(True, fld, k) >= v - 1e-12
    assert s(aff, True, k) >= v - 1e-12
    assert s(aff, fld, 1) >= v - 1e-12


def test_attribute_threshold_and_residue():
    roster = [person("R1", "VERDI", "Anna")]
    hit = pub("P1", ["Verdi, A"])  # 1.0
    miss = pub("P2", ["Verdi, A"], addresses=(), category="PHYS")  # 0.5
    res = attribute([hit, miss], roster, SCHEME, CFG)
    assert [a.key for a in res.attributions] == [("P1", 0, "R1")]
    assert [(r.pub_id, r.best_score) for r in res.residue] == [("P2", pytest.approx(0.5))]


def test_attribute_tie_goes_to_lower_id():
    roster = [person("R9", "NERI", "Luca"), person("R2", "NERI", "Lucia")]
    res = attribute([pub("P1", ["Neri, L"])], roster, SCHEME, CFG)
    [a] = res.attributions
    assert a.researcher_id == "R2" and a.score == pytest.approx(0.9)


def test_attribute_one_mention_per_researcher_per_paper():
    roster = [person("R1", "NERI", "Luca"), person("R2", "NERI", "Lucia", inst="U2")]
    p = pub("P1", ["Neri, L", "Neri, L"], addresses=("Univ Roma, I", "Univ Pisa, I"))
    res = attribute([p], roster, SCHEME, CFG)
    assert sorted(a.researcher_id for a in res.attributions) == ["R1", "R2"]
    assert len({a.mention_position for a in res.attributions}) == 2


def test_attribute_extreme_thresholds():
    corpus = [pub("P1", ["Rossi, M", "Bianchi, M", "Gialli, Q"]),
              pub("P2", ["Bianchi, M"], addresses=(), category="MATH")]
    none = attribute(corpus, ROSTER, SCHEME, DisambigConfig(1.01, (0.5, 0.3, 0.2), CFG.alias_table))
    assert none.attributions == []
    everything = attribute(corpus, ROSTER, SCHEME, DisambigConfig(0.0, (0.5, 0.3, 0.2), CFG.alias_table))
    idx = RosterIndex(ROSTER)
    with_cands = {(p.pub_id, m.position) for p in corpus for m in p.mentions if idx.block(m)}
    assert {(a.pub_id, a.mention_position) for a in everything.attributions} == with_cands


def test_config_validation():
    with pytest.raises(ValueError):
        DisambigConfig(0.5, (0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        DisambigConfig(-0.1)


def test_evaluate_cases():
    gold = {("P1", 0, "R1"), ("P2", 1, "R2")}
    rep = evaluate([Attribution(p, m, r, 1.0) for p, m, r in gold], gold)
    assert (rep.precision, rep.recall, rep.f_measure) == (1.0, 1.0, 1.0)
    empty = evaluate([], gold)
    assert (empty.precision, empty.recall, empty.f_measure) == (0.0, 0.0, 0.0)
    mixed = evaluate([Attribution("P1", 0, "R1", 1), Attribution("P3", 0, "R1", 1)], gold)
    assert (mixed.true_positive, mixed.false_positive, mixed.false_negative) == (1, 1, 1)
    assert f_measure(0.96, 0.94) == pytest.approx(0.949894736842, abs=1e-4)
    assert abs(f_measure(0.96, 0.94) - 0.9499) < 1e-4


@settings(max_examples=50)
@given(st.sets(st.tuples(st.sampled_from("ABC"), st.integers(0, 3), st.sampled_from("XYZ")),
               min_size=1))
def test_evaluate_gold_against_itself(gold):
    assert evaluate(gold, gold).f_measure == 1.0


def test_file_formats():
    atts = [Attribution("P2", 0, "R1", 0.9), Attribution("P1", 1, "R2", 2 / 3)]
    text = format_attributions(atts)
    assert text.splitlines() == ["pub_id,mention_position,researcher_id,score",
                                 "P1,1,R2,0.666667", "P2,0,R1,0.900000"]
    assert [a.key for a in parse_attributions(text)] == [("P1", 1, "R2"), ("P2", 0, "R1")]
    gold = {("P1", 0, "R1")}
    assert parse_gold(format_gold(gold)) == gold
    assert parse_aliases("pattern,institution_id\nUniv Roma,,U1\n".replace(",,", ",")) == {"Univ Roma": "U1"}
    from hgbench.disambig import Residue
    assert format_residue([Residue("P1", 0, None)]).splitlines()[1] == "P1,0,"
