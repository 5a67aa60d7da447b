import pytest
from hypothesis import given, settings, strategies as st

from sirup.cactus import (OPEN, PRUNED, CactusError, ProbeKind, branching_number, bud, enumerate_cactuses,
                          find_cactus_witness, fo_probe, min_stage, minimal_filter, minimal_pool, prune,
                          root_cactus)
from sirup.model import A, F, T, Ontology, parse_abox, parse_query
from sirup.oracle import certain_answer, certain_answer_sat

from fixtures import LOOP_DEPTH0, LOOP_DEPTH1, Q2, Q3, random_abox, random_one_cq, rng_for

COV_A, TOP = Ontology.COV_A, Ontology.COV_TOP
FRT = parse_query("[F] -R-> [T]")
PRUNE_Q = parse_query("[F] -R-> [T] -R-> [T]")
CACTUS_Q = parse_query("[F] -R-> [T] -R-> [] -R-> [T]")


def test_root_and_single_bud():
    r = root_cactus(FRT, COV_A)
    assert r.open_T == {"s__x2"} and r.depth == 0
    c = bud(r, "s__x2")
    assert c.size == 2 and c.depth == 1
    assert (A, "s__x2") in c.abox.unary and (T, "s__x2") not in c.abox.unary
    assert c.skeleton() == [("s", "s_0", "s__x2")]


def test_open_t_bookkeeping():
    r = root_cactus(Q3, COV_A)
    c = bud(r, "s__x1")
    assert len(c.open_T) == len(r.open_T) + 1
    with pytest.raises(CactusError):
        bud(c, "s__x1")


def test_two_buds_example():
    c = bud(bud(root_cactus(Q2, COV_A), "s__x1"), "s__x2")
    assert len(c.segments) == 3
    assert branching_number(c).number == 1


def test_prune_example():
    c1 = bud(root_cactus(PRUNE_Q, COV_A), "s__x2")
    assert c1.open_T == {"s_0__x2", "s_0__x3", "s__x3"}
    pruned = prune(c1, "s__x3")
    assert pruned is not None and (T, "s__x3") not in pruned.abox.unary
    assert certain_answer_sat(COV_A, PRUNE_Q, pruned.abox).answer
    assert prune(c1, "s_0__x2") is None and prune(c1, "s_0__x3") is None
    c2 = bud(c1, "s__x3")
    assert minimal_filter([c2, pruned]) == [pruned]


def test_prune_only_t_fails():
    assert prune(root_cactus(FRT, COV_A), "s__x2") is None


def test_prune_under_top():
    r2 = bud(bud(root_cactus(CACTUS_Q, TOP), "s__x4"), "s_1__x2")
    assert prune(r2, "s__x2") is not None
    r2a = bud(bud(root_cactus(CACTUS_Q, COV_A), "s__x4"), "s_1__x2")
    assert prune(r2a, "s__x2") is None


def test_enumeration_counts():
    assert len(enumerate_cactuses(FRT, COV_A, 2).cactuses) == 3
    e = enumerate_cactuses(Q2, COV_A, 1)
    assert len(e.cactuses) == 4 and not e.truncated
    capped = enumerate_cactuses(Q2, COV_A, 3, count_cap=5)
    assert capped.truncated and "truncated" in capped.frontier()


def test_enumerated_cactuses_entail_q():
    for q in (Q2, Q3, PRUNE_Q):
        for c in enumerate_cactuses(q, COV_A, 2).cactuses:
            assert certain_answer(COV_A, q, c.abox)


def test_enumeration_with_prune_sound():
    e = enumerate_cactuses(PRUNE_Q, COV_A, 2, with_prune=True)
    assert any(c.pruned for c in e.cactuses)
    for c in e.cactuses:
        assert certain_answer(COV_A, PRUNE_Q, c.abox)


def test_branching_numbers():
    r = root_cactus(Q2, COV_A)
    assert branching_number(r).number == 0
    leaf = (0, 0)
    full = ((leaf, leaf), (leaf, leaf))
    assert branching_number(full).number == 2
    assert branching_number(((leaf, 0), 0)).number == 0


def test_minimal_filter_trivia():
    c = bud(root_cactus(Q2, COV_A), "s__x1")
    assert minimal_filter([c]) == [c]
    assert minimal_filter([c, c]) == [c]


def _live(t):
    """The trie with dead segments (every slot pruned, nothing budded) cut
    back to a pruned slot: such a segment only contributes an A label."""
    if not isinstance(t, tuple):
        return t
    kids = tuple(_live(e) for e in t)
    return tuple(PRUNED if isinstance(e, tuple) and all(x == PRUNED for x in e) else e for e in kids)


def test_minimal_pool_small():
    pool = minimal_pool(PRUNE_Q, COV_A, 2, 4)
    assert "complete" in pool.frontier()
    assert max(branching_number(c).number for c in pool.cactuses) == 1
    assert all(branching_number(_live(c.trie)).number == 0 for c in pool.cactuses)


def test_dead_segment_cactus_is_minimal():
    # bud y1 and y2, then prune both T's of the y1 copy: still entails q and
    # no smaller cactus embeds, yet the skeleton has two branches
    c = bud(bud(root_cactus(PRUNE_Q, COV_A), "s__x2"), "s__x3")
    c = prune(prune(c, "s_0__x2"), "s_0__x3")
    assert c is not None and c.trie == ((PRUNED, PRUNED), (OPEN, OPEN))
    assert certain_answer_sat(COV_A, PRUNE_Q, c.abox).answer
    pool = minimal_pool(PRUNE_Q, COV_A, 2, 4)
    assert any(m.trie == c.trie for m in pool.cactuses)
    assert branching_number(c).number == 1


@pytest.mark.xfail(strict=True, reason="dead segments give minimal cactuses with two branches")
def test_minimal_pool_one_branch_literal():
    pool = minimal_pool(PRUNE_Q, COV_A, 2, 4)
    assert all(branching_number(c).number == 0 for c in pool.cactuses)


def test_dump_has_skeleton():
    c = bud(root_cactus(FRT, COV_A), "s__x2")
    text = c.dump()
    assert "# skeleton:" in text and "s -> s_0 at s__x2" in text
    back = parse_abox(text)
    assert back.unary == c.abox.unary


def test_loop_probes():
    r0 = fo_probe(LOOP_DEPTH0, COV_A, 3)
    assert r0.kind is ProbeKind.REWRITABLE and r0.depth == 0 and len(r0.rewriting.disjuncts) == 1
    r1 = fo_probe(LOOP_DEPTH1, COV_A, 3)
    assert r1.kind is ProbeKind.REWRITABLE and r1.depth == 1 and len(r1.rewriting.disjuncts) == 2


def test_aperiodic_has_no_bound():
    r = fo_probe(Q2, COV_A, 4)
    assert r.kind is ProbeKind.NO_BOUND and r.depth == 4
    assert r.summary().startswith("NoBoundUpTo(4)")


def test_mirrored_cactus():
    q = parse_query("[T] -R-> [F] -R-> [F]")
    r = root_cactus(q, COV_A)
    assert r.mirrored
    assert r.abox.unary == {(T, "s__x1"), (F, "s__x2"), (F, "s__x3")}  # original labels come back
    assert r.open_T == {"s__x2", "s__x3"}
    assert certain_answer(COV_A, q, bud(r, "s__x2").abox)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_probe_ucq_matches_oracle(seed):
    rng = rng_for(seed)
    q = LOOP_DEPTH1 if seed % 2 else LOOP_DEPTH0
    ucq = fo_probe(q, COV_A, 3).rewriting
    a = random_abox(rng, max_individuals=6)
    assert ucq.holds(a) == certain_answer(COV_A, q, a)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_witness_routes_agree(seed):
    rng = rng_for(seed)
    q = random_one_cq(rng, max_edges=3)
    a = random_abox(rng, max_individuals=6)
    o = rng.choice([COV_A, TOP])
    c, truncated = find_cactus_witness(q, o, a, 2, 10_000)
    stage = min_stage(q, o, a, 2)
    assert not truncated
    assert (c is not None) == (stage is not None)
    if c is not None:
        assert c.depth == stage
        assert certain_answer(o, q, a)
