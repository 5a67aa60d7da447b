import pytest
from hypothesis import given, settings, strategies as st

from sirup.model import A, F, T, ABox, Ontology, apply_labeling, find_homomorphism, parse_abox, parse_query
from sirup.oracle import (UNSAT, BudgetExceeded, Sat, certain_answer, certain_answer_enum, certain_answer_sat,
                          dpll_solve, ground_to_cnf)

from fixtures import Q2, WORKED_ABOX, random_abox, random_path_query, rng_for

TR_F = parse_query("[T] -R-> [F]")
T_X = parse_query("T(x).")


def test_worked_example_yes():
    assert certain_answer_enum(Ontology.COV_TOP, Q2, WORKED_ABOX).answer
    assert certain_answer_sat(Ontology.COV_TOP, Q2, WORKED_ABOX).answer


def test_empty_abox_no():
    q = parse_query("F(x).")
    for o in Ontology:
        assert not certain_answer_enum(o, q, parse_abox("")).answer
        assert not certain_answer_sat(o, q, parse_abox("")).answer


def test_twin_shortcut():
    twin = parse_abox("F(a). T(a).")
    assert certain_answer_enum(Ontology.COV_A_BOT, TR_F, twin).answer
    assert certain_answer_sat(Ontology.COV_A_BOT, TR_F, twin).answer
    assert not certain_answer(Ontology.COV_A, TR_F, twin)


def test_ground_clauses_small():
    cnf = ground_to_cnf(Ontology.COV_A, T_X, parse_abox("A(a)."))
    a, f, t = (cnf.variables[p, "a"] for p in (A, F, T))
    assert cnf.clauses == {frozenset({-a, f, t}), frozenset({a}), frozenset({-t})}
    assert isinstance(dpll_solve(cnf), Sat)
    cnf = ground_to_cnf(Ontology.COV_A, T_X, parse_abox("T(a)."))
    t = cnf.variables[T, "a"]
    assert {frozenset({t}), frozenset({-t})} <= cnf.clauses
    assert dpll_solve(cnf) is UNSAT


def test_ground_disjoint_clash():
    q = parse_query("F(x). T(x).")
    cnf = ground_to_cnf(Ontology.COV_A_BOT, q, parse_abox("F(a). T(a)."))
    f, t = cnf.variables[F, "a"], cnf.variables[T, "a"]
    assert frozenset({-f, -t}) in cnf.clauses
    assert dpll_solve(cnf) is UNSAT


def test_missing_edges_drop_clauses():
    cnf = ground_to_cnf(Ontology.COV_A, TR_F, parse_abox("T(a). F(b)."))
    ta, fb = cnf.variables[T, "a"], cnf.variables[F, "b"]
    assert frozenset({-ta, -fb}) not in cnf.clauses
    assert all(any(l > 0 for l in c) for c in cnf.clauses)
    assert isinstance(dpll_solve(cnf), Sat)


def test_dpll_basics():
    assert dpll_solve([]) == Sat({})
    assert dpll_solve([{1}, {-1}]) is UNSAT
    assert isinstance(dpll_solve([{1, 2}, {-1}, {-2, 3}]), Sat)


def test_dimacs_export():
    text = ground_to_cnf(Ontology.COV_A, T_X, parse_abox("A(a).")).to_dimacs()
    assert "p cnf 3 3" in text
    assert "c 1 F(a)" in text


def test_budgets():
    a = ABox.of({(A, f"a{i}") for i in range(6)})
    with pytest.raises(BudgetExceeded):
        certain_answer_enum(Ontology.COV_A, T_X, a, cap=8)
    with pytest.raises(BudgetExceeded):
        ground_to_cnf(Ontology.COV_A, T_X, a, cap=3)


def test_counter_models_are_models_without_q():
    a = parse_abox("A(a). A(b). R(a,b). T(c). R(c,a). F(d). R(b,d).")
    rep = certain_answer_sat(Ontology.COV_A, parse_query("[T] -R-> [T] -R-> [F]"), a)
    assert rep.answer is False
    model = apply_labeling(rep.sat_model)
    assert find_homomorphism(parse_query("[T] -R-> [T] -R-> [F]"), model) is None
    rep = certain_answer_enum(Ontology.COV_A, parse_query("[T] -R-> [T] -R-> [F]"), a)
    assert find_homomorphism(parse_query("[T] -R-> [T] -R-> [F]"), apply_labeling(rep.witness)) is None


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_oracles_agree(seed):
    rng = rng_for(seed)
    q = random_path_query(rng, max_edges=4)
    a = random_abox(rng, max_individuals=7)
    for o in Ontology:
        assert certain_answer_enum(o, q, a).answer == certain_answer_sat(o, q, a).answer


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_monotone_and_bot_harder(seed):
    rng = rng_for(seed)
    q = random_path_query(rng, max_edges=3)
    a = random_abox(rng, max_individuals=6)
    extra = ABox.of(set(a.unary) | {(T, "z")}, set(a.binary) | {("z", "R", sorted(a.individuals)[0])},
                    extra=a.individuals)
    for o in Ontology:
        if certain_answer(o, q, a):
            assert certain_answer(o, q, extra)
    if certain_answer(Ontology.COV_A, q, a):
        assert certain_answer(Ontology.COV_A_BOT, q, a)
    if not a.twins():
        assert certain_answer(Ontology.COV_A, q, a) == certain_answer(Ontology.COV_A_BOT, q, a)
        assert certain_answer(Ontology.COV_TOP, q, a) == certain_answer(Ontology.COV_TOP_BOT, q, a)
