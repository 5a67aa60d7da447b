import time

import pytest
from hypothesis import given, settings, strategies as st

from sirup.classify import (Complexity, FORewriting, NotAPath, NotOneCQ, OutOfScope, Periodicity, Reason,
                            analyze_path, cq_kind, orient, periodicity, tetrachotomy)
from sirup.model import F, Ontology, parse_query
from sirup.oracle import certain_answer

from fixtures import Q1, Q2, Q3, Q5, TTFF, random_abox, random_path_query, rng_for

BOT = Ontology.COV_A_BOT


@pytest.mark.parametrize("q, cls", [(Q1, Complexity.CONP), (Q2, Complexity.P), (Q3, Complexity.NL),
                                    (Q5, Complexity.AC0), (TTFF, Complexity.CONP)])
def test_figure_queries(q, cls):
    assert tetrachotomy(q, BOT).cls is cls


def test_summaries():
    assert tetrachotomy(Q3, BOT).summary() == "NL (periodic 1-CQ, left)"
    assert tetrachotomy(Q2, Ontology.COV_A).summary() == "P (aperiodic 1-CQ)"
    assert tetrachotomy(Q5, BOT).reason is Reason.HAS_TWIN
    rec = tetrachotomy(Q3, BOT).record()
    assert rec["class"] == "NL" and rec["side"] == "left"


def test_zero_cq_rewrites_to_itself():
    q = parse_query("[T] -R-> [T]")
    v = tetrachotomy(q, Ontology.COV_A)
    assert v.cls is Complexity.AC0 and v.reason is Reason.ZERO_CQ
    assert v.rewriting == FORewriting((q,))


def test_analyze_q3():
    p = analyze_path(Q3)
    x = Q3.path
    assert p.solitary_T == (x[0], x[1]) and p.solitary_F == (x[2],)
    assert p.lr == (2, 0)
    assert p.intervals[0] == ("R",) and p.intervals[-1] == ("R",) and p.intervals[-2] == ()
    assert p.delta(x[0], x[2]) == 2


def test_analyze_q5_and_single():
    p = analyze_path(Q5)
    assert p.twins == (Q5.path[-1],) and p.solitary_F == ()
    s = analyze_path(parse_query("T(x)."))
    assert s.solitary_T == ("x",) and s.size == 0


def test_periodicity_examples():
    assert periodicity(analyze_path(Q3)) is Periodicity.LEFT
    assert periodicity(analyze_path(Q2)) is Periodicity.APERIODIC
    assert periodicity(analyze_path(parse_query("[F] -R-> [T]"))) is Periodicity.RIGHT
    assert periodicity(analyze_path(Q5)) is Periodicity.NOT_ONE_CQ


def test_right_periodic_prefix_tail():
    # intervals R S | R S | R: tail is a prefix of the period
    q = parse_query("[F] -R-> [] -S-> [T] -R-> [] -S-> [T] -R-> []")
    assert periodicity(analyze_path(q)) is Periodicity.RIGHT
    q = parse_query("[F] -R-> [] -S-> [T] -R-> [] -S-> [T] -S-> []")
    assert periodicity(analyze_path(q)) is Periodicity.APERIODIC


def test_orient_mirrors_single_t():
    q = parse_query("[F] -R-> [T] -R-> [F]")
    o, mirrored = orient(q)
    assert mirrored and len(o.solitary(F)) == 1
    with pytest.raises(NotOneCQ):
        orient(TTFF)


def test_kinds():
    assert [cq_kind(q) for q in (Q1, Q2, Q3, parse_query("[T] -R-> [T]"))] == [2, 1, 1, 0]


def test_scope_errors():
    with pytest.raises(OutOfScope):
        tetrachotomy(parse_query("[F] -R-> [F,T] -R-> [T]"), Ontology.COV_A)
    with pytest.raises(OutOfScope):
        tetrachotomy(Q2, Ontology.COV_TOP)
    with pytest.raises(NotAPath):
        tetrachotomy(parse_query("R(x,y). R(x,z). T(y). F(z)."), BOT)


def test_fixtures_fast():
    t = time.perf_counter()
    for q in (Q1, Q2, Q3, Q5, TTFF):
        tetrachotomy(q, BOT)
    assert time.perf_counter() - t < 1


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mirror_keeps_class(seed):
    q = random_path_query(rng_for(seed), twins=False)
    v = tetrachotomy(q, BOT)
    assert tetrachotomy(q.swap_ft(), BOT).cls is v.cls
    back = tetrachotomy(q.reverse_path(), BOT)
    assert back.cls is v.cls
    if v.reason is Reason.PERIODIC:
        assert back.side == {"left": "right", "right": "left"}[v.side]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fo_rewriting_matches_oracle(seed):
    rng = rng_for(seed)
    q = random_path_query(rng, max_edges=3)
    for o in (Ontology.COV_A, BOT):
        try:
            v = tetrachotomy(q, o)
        except OutOfScope:
            continue
        if v.cls is not Complexity.AC0:
            continue
        for _ in range(5):
            a = random_abox(rng, max_individuals=6)
            assert v.rewriting.holds(a) == certain_answer(o, q, a)
