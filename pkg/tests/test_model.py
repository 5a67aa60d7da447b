import pytest
from hypothesis import given, settings, strategies as st

from sirup.model import (A, F, T, ABox, DisconnectedQuery, Labeling, Ontology, ParseError, Query,
                         SirupError, apply_labeling, find_homomorphism, iter_homomorphisms,
                         parse_abox, parse_query, path_shorthand, query_to_abox, serialize)

from fixtures import Q2, Q5, WORKED_ABOX, random_abox, random_path_query, rng_for


def test_parse_atoms_path():
    q = parse_query("T(x1). S(x1,x2). T(x2). R(x2,x3). F(x3).")
    assert q.path == ("x1", "x2", "x3")
    assert q.path_roles == ("S", "R")
    assert [q.label(v) for v in q.path] == [{T}, {T}, {F}]


def test_single_node():
    q = parse_query("T(x).")
    assert q.path == ("x",)
    assert not q.binary


def test_shorthand_twin():
    assert len(Q5.individuals) == 3
    assert Q5.twins() == [Q5.path[-1]]
    assert Q5.label(Q5.path[1]) == frozenset()


def test_duplicates_merge():
    q = parse_query("T(x). T(x). R(x,y). R(x,y).")
    assert len(q.unary) == 1 and len(q.binary) == 1


@pytest.mark.parametrize("text", ["T(x", "T(x) R(x,y).", "R(x,y,z).", "[T] -R->", "[T] R [F]"])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_query(text)


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse_query("T(x).\nR(x y).")
    assert "line 2" in str(e.value)


def test_disconnected():
    with pytest.raises(DisconnectedQuery):
        parse_query("T(x). F(y).")


def test_query_labels_restricted():
    with pytest.raises(ParseError):
        parse_query("A(x).")


def test_not_a_path():
    assert parse_query("R(x,y). R(x,z).").path is None
    assert parse_query("R(x,y). S(x,y).").path is None


def test_parse_abox():
    assert len(WORKED_ABOX.individuals) == 7
    assert parse_abox("").individuals == frozenset()
    assert parse_abox("F(a). T(a).").twins() == ["a"]
    with pytest.raises(ParseError):
        parse_abox("B(a).")


def test_worked_example_homomorphisms():
    # a labelled F completes the left S-R path
    fa = apply_labeling(Labeling(WORKED_ABOX, {"a": F, "b": T}))
    h = find_homomorphism(Q2, fa)
    assert h is not None and h[Q2.path[-1]] == "a"
    # a T, b F: the lower path into b
    tb = apply_labeling(Labeling(WORKED_ABOX, {"a": T, "b": F}))
    h = find_homomorphism(Q2, tb)
    assert h is not None and h[Q2.path[-1]] == "b"


def test_no_f_no_hom():
    q = parse_query("[T] -R-> [F]")
    assert find_homomorphism(q, parse_abox("T(a). R(a,b).")) is None


def test_query_to_abox():
    q = parse_query("[T] -R-> [F]")
    a = query_to_abox(q)
    assert serialize(a) == "T(n1).\nF(n2).\nR(n1,n2).\n"
    b = query_to_abox(q, relabel={q.path[0]: {A}})
    assert (A, "n1") in b.unary and (T, "n1") not in b.unary
    with pytest.raises(SirupError):
        query_to_abox(q, relabel={q.path[0]: {"B"}})


def test_apply_labeling():
    a = parse_abox("A(a).")
    assert apply_labeling(Labeling(a, {"a": T})).unary == {(A, "a"), (T, "a")}
    b = parse_abox("T(b). R(b,c).")
    assert apply_labeling(Labeling(b, {})) == b
    with pytest.raises(SirupError):
        Labeling(a, {})


def test_top_labeling_covers_unlabelled():
    a = parse_abox("R(a,b). T(b).")
    assert a.undecided(Ontology.COV_TOP) == ["a"]
    assert a.undecided(Ontology.COV_A) == []


def test_fixed_and_deterministic():
    a = parse_abox("T(a). T(b). R(a,c). R(b,c). F(c).")
    q = parse_query("[T] -R-> [F]")
    homs = list(iter_homomorphisms(q, a))
    assert [h[q.path[0]] for h in homs] == ["a", "b"]
    assert find_homomorphism(q, a, fixed={q.path[0]: "b"})[q.path[0]] == "b"


def test_ontology_parse():
    assert Ontology.parse("ddsirup") is Ontology.COV_A_BOT
    assert Ontology.parse("cov-top") is Ontology.COV_TOP
    with pytest.raises(SirupError):
        Ontology.parse("owl")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_identity_hom(seed):
    q = random_path_query(rng_for(seed))
    a = query_to_abox(q)
    h = find_homomorphism(q, a)
    assert h is not None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_roundtrip(seed):
    rng = rng_for(seed)
    q = random_path_query(rng)
    if q.unary or q.binary:  # a bare node has no atom form
        back = parse_query(serialize(q))
        assert (back.unary, back.binary) == (q.unary, q.binary)
    again = parse_query(path_shorthand(q))
    assert again.path_roles == q.path_roles
    assert [again.label(v) for v in again.path] == [q.label(v) for v in q.path]
    a = random_abox(rng)
    b = parse_abox(serialize(a))
    assert (b.unary, b.binary) == (a.unary, a.binary)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_homs_survive_growth(seed):
    rng = rng_for(seed)
    q = random_path_query(rng, max_edges=3)
    a = random_abox(rng)
    if find_homomorphism(q, a) is None:
        return
    bigger = ABox.of(set(a.unary) | {(T, "extra")}, set(a.binary) | {("extra", "R", next(iter(a.individuals)))},
                     extra=a.individuals)
    assert find_homomorphism(q, bigger) is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_labeling_decides_everything(seed):
    rng = rng_for(seed)
    a = random_abox(rng)
    for o in Ontology:
        und = a.undecided(o)
        full = apply_labeling(Labeling(a, {u: rng.choice([F, T]) for u in und}, o))
        assert full.undecided(o) == []


def test_numeric_individuals():
    a = parse_abox("T(0). R(0,1). A(1).")
    assert a.individuals == {"0", "1"}
    assert parse_abox(serialize(a)) == a
    with pytest.raises(ParseError):
        parse_abox("0(a).")
