"""Datalog programs: representation, semi-naive evaluation, the standard
rewriting of 1-CQ sirups, a symmetric rewriting, and structural checks."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache

import networkx as nx

from .classify import orient
from .model import A, F, T, ABox, Ontology, Query, SirupError, Structure, iter_homomorphisms

GOAL = "G"


@dataclass(frozen=True, order=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        return self.pred if not self.args else f"{self.pred}({','.join(self.args)})"


def _atom_key(a: Atom):
    return (len(a.args) != 1, a.pred, a.args)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(sorted(set(self.body), key=_atom_key)))
        hv = set(self.head.args)
        bv = {v for b in self.body for v in b.args}
        if not hv <= bv:
            raise SirupError(f"head variables {sorted(hv - bv)} missing from the body")

    def __str__(self):
        return f"{self.head} :- {', '.join(map(str, self.body))} ."


@dataclass(frozen=True)
class Program:
    rules: tuple
    goal: str = GOAL
    comments: tuple = ()

    def __post_init__(self):
        if any(self.goal == b.pred for r in self.rules for b in r.body):
            raise SirupError("the goal may only appear in rule heads")

    @cached_property
    def idb(self) -> frozenset:
        return frozenset(r.head.pred for r in self.rules)

    @cached_property
    def edb(self) -> frozenset:
        return frozenset(b.pred for r in self.rules for b in r.body) - self.idb

    def emit(self) -> str:
        lines = [f"% {c}" for c in self.comments]
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"

    def rename_preds(self, m: dict) -> "Program":
        f = lambda a: Atom(m.get(a.pred, a.pred), a.args)
        return Program(tuple(Rule(f(r.head), tuple(map(f, r.body))) for r in self.rules),
                       self.goal, self.comments)


# ------------------------------------------------------------ evaluation

def _abox_facts(a: Structure) -> dict:
    rel = defaultdict(set)
    for p, x in a.unary:
        rel[p].add((x,))
    for s, r, d in a.binary:
        rel[r].add((s, d))
    return rel


class _Index:
    """Relation lookups by (pred, bound-position pattern)."""

    def __init__(self, rel):
        self.rel = rel
        self.cache = {}

    def lookup(self, pred, pattern):
        key = (pred, tuple(i for i, v in enumerate(pattern) if v is not None))
        if key not in self.cache:
            idx = defaultdict(list)
            for t in self.rel.get(pred, ()):
                idx[tuple(t[i] for i in key[1])].append(t)
            self.cache[key] = idx
        return self.cache[key].get(tuple(v for v in pattern if v is not None), ())


@lru_cache(maxsize=4096)
def _join_order(body, first, bound=frozenset()):
    """Greedy atom order: the delta atom first, then the most-bound atom."""
    order, seen = [], set(bound)
    remaining = list(range(len(body)))
    while remaining:
        best = max(remaining, key=lambda i: (i == first, sum(v in seen for v in body[i].args), -i))
        remaining.remove(best)
        order.append(best)
        seen.update(body[best].args)
    return tuple(order)


def match_body(body, index: _Index, binding=None, override=None):
    """Yield variable bindings satisfying all body atoms. `override` maps an
    atom position to an alternative index (the delta relation)."""
    binding = dict(binding or {})
    override = override or {}
    first = next(iter(override), -1)
    order = _join_order(tuple(body), first, frozenset(binding))

    def rec(k):
        if k == len(order):
            yield dict(binding)
            return
        atom = body[order[k]]
        idx = override.get(order[k], index)
        pattern = [binding.get(v) for v in atom.args]
        for t in idx.lookup(atom.pred, pattern):
            new = []
            ok = True
            for v, c in zip(atom.args, t):
                if v in binding:
                    if binding[v] != c:
                        ok = False
                        break
                else:
                    binding[v] = c
                    new.append(v)
            if ok:
                yield from rec(k + 1)
            for v in new:
                del binding[v]

    yield from rec(0)


def _fire(rule, index, override=None):
    for b in match_body(rule.body, index, override=override):
        yield tuple(b[v] for v in rule.head.args)


def evaluate_naive(p: Program, a: Structure) -> dict:
    rel = _abox_facts(a)
    while True:
        index = _Index(rel)
        new = defaultdict(set)
        for r in p.rules:
            for t in _fire(r, index):
                if t not in rel.get(r.head.pred, ()):
                    new[r.head.pred].add(t)
        if not new:
            return rel
        for k, v in new.items():
            rel[k] |= v


def evaluate_seminaive(p: Program, a: Structure) -> dict:
    rel = _abox_facts(a)
    index = _Index(rel)
    delta = defaultdict(set)
    for r in p.rules:
        for t in _fire(r, index):
            delta[r.head.pred].add(t)
    delta = {k: v - rel.get(k, set()) for k, v in delta.items()}
    while any(delta.values()):
        for k, v in delta.items():
            rel[k] |= v
        index, dindex = _Index(rel), _Index(delta)
        new = defaultdict(set)
        for r in p.rules:
            for i, b in enumerate(r.body):
                if delta.get(b.pred):
                    for t in _fire(r, index, {i: dindex}):
                        if t not in rel.get(r.head.pred, ()):
                            new[r.head.pred].add(t)
        delta = new
    return rel


def evaluate(p: Program, a: Structure) -> bool:
    return () in evaluate_seminaive(p, a).get(p.goal, ())


# ------------------------------------------------------- program builders

class NotOneCQError(SirupError):
    pass


def _atoms_of(q: Structure, drop=()) -> list:
    drop = set(drop)
    out = [Atom(p, (v,)) for p, v in q.unary if (p, v) not in drop]
    out += [Atom(r, (s, d)) for s, r, d in q.binary]
    return out


def build_pi_q(q: Query, o: Ontology) -> Program:
    """The datalog rewriting of a 1-CQ sirup.

    With a single solitary T instead of a single solitary F, the program is
    built for the label-swapped query and its F and T predicates are swapped
    back, which is sound because the covering axiom is symmetric in F, T."""
    qo, mirrored = orient(q)
    (x,) = qo.solitary(F)
    ys = qo.solitary(T)
    body = _atoms_of(qo, drop=[(F, x)] + [(T, y) for y in ys])
    ps = [Atom("P", (y,)) for y in ys]
    rules = [
        Rule(Atom(GOAL), tuple([Atom(F, (x,))] + body + ps)),
        Rule(Atom("P", ("x",)), (Atom(T, ("x",)),)),
        Rule(Atom("P", (x,)), tuple(([] if o.total else [Atom(A, (x,))]) + body + ps)),
    ]
    if o.disjoint:
        rules.append(Rule(Atom(GOAL), (Atom(F, ("x",)), Atom(T, ("x",)))))
    prog = Program(tuple(rules), comments=(f"datalog rewriting for {o.value}",))
    if mirrored:
        prog = prog.rename_preds({F: T, T: F})
        prog = Program(prog.rules, prog.goal, prog.comments + ("F and T swapped: single solitary T",))
    return prog


# ------------------------------------------------------ structural checks

@dataclass(frozen=True)
class StructuralReport:
    linear: bool
    symmetric: bool
    stratification: dict | None
    linear_stratified: bool

    def record(self) -> dict:
        strata = "-" if self.stratification is None else ", ".join(
            f"{k}:{v}" for k, v in sorted(self.stratification.items()))
        return {"linear": self.linear, "symmetric": self.symmetric,
                "strata": strata, "linear_stratified": self.linear_stratified}


def _dep_graph(p: Program):
    g = nx.DiGraph()
    g.add_nodes_from(p.idb)
    for r in p.rules:
        for b in r.body:
            if b.pred in p.idb:
                g.add_edge(b.pred, r.head.pred)
    return g


def _rule_structure(body) -> Query:
    unary = [(b.pred, b.args[0]) for b in body if len(b.args) == 1]
    binary = [(b.args[0], b.pred, b.args[1]) for b in body if len(b.args) == 2]
    return Query.of(unary, binary)


def _equivalent_rules(r1: Rule, r2: Rule) -> bool:
    """Same head predicate and homomorphically equivalent bodies, with the
    head arguments mapped onto each other."""
    if r1.head.pred != r2.head.pred or len(r1.head.args) != len(r2.head.args):
        return False
    if any(len(b.args) > 2 for b in r1.body + r2.body):
        return r1 == r2
    s1, s2 = _rule_structure(r1.body), _rule_structure(r2.body)
    f12 = dict(zip(r1.head.args, r2.head.args))
    f21 = dict(zip(r2.head.args, r1.head.args))
    if len(f12) != len(f21):
        return False
    fwd = next(iter_homomorphisms(s1, s2, fixed=f12), None)
    return fwd is not None and next(iter_homomorphisms(s2, s1, fixed=f21), None) is not None


def structural_check(p: Program) -> StructuralReport:
    idb = p.idb
    linear = all(sum(b.pred in idb for b in r.body) <= 1 for r in p.rules)
    g = _dep_graph(p)
    comp = {}
    cond = nx.condensation(g)
    for c, data in cond.nodes(data=True):
        for pred in data["members"]:
            comp[pred] = c
    order = list(nx.topological_sort(cond))
    level = {c: i for i, c in enumerate(order)}
    strata = {pred: level[comp[pred]] for pred in idb}

    def recursive(r):
        return any(b.pred in idb and comp[b.pred] == comp[r.head.pred] for b in r.body)

    symmetric = linear
    if linear:
        for r in p.rules:
            if not recursive(r):
                continue
            (i, idb_atom), = [(i, b) for i, b in enumerate(r.body) if b.pred in idb]
            body = list(r.body)
            body[i] = r.head
            counterpart = Rule(idb_atom, tuple(body))
            if not any(_equivalent_rules(counterpart, r2) for r2 in p.rules):
                symmetric = False
                break
    lin_strat = all(sum(b.pred in idb and strata[b.pred] == strata[r.head.pred] for b in r.body) <= 1
                    for r in p.rules)
    return StructuralReport(linear, symmetric, strata, lin_strat)


# ------------------------------------------------------ symmetric programs

def is_symmetric_cq(qp: Structure, x: str, y: str) -> bool:
    """qp(x,y) and qp(y,x) are homomorphically equivalent with the answer
    variables frozen."""
    if x not in qp.individuals or y not in qp.individuals:
        raise SirupError("answer variables must be nodes of the query")
    there = next(iter_homomorphisms(qp, qp, fixed={x: y, y: x}), None)
    back = next(iter_homomorphisms(qp, qp, fixed={y: x, x: y}), None)
    return there is not None and back is not None


class DecompositionError(SirupError):
    pass


def _copy_atoms(q: Structure, keep: dict, tag: str) -> list:
    """Atoms of q with the variables in `keep` renamed and all others fresh."""
    nm = {v: keep.get(v, f"{v}_{tag}") for v in q.individuals}
    return _atoms_of(q.rename(nm))


def build_symmetric_program(q1: Structure, qp: Structure, q2: Structure, x: str, y: str,
                            o: Ontology) -> Program:
    """Symmetric datalog for q = F(x), q1(x), qp(x,y), q2(y), T(y)."""
    for name, part in (("q1", q1), ("qp", qp), ("q2", q2)):
        if any(len(part.label(v) & {F, T}) == 1 for v in part.individuals):
            raise DecompositionError(f"condition (a): {name} contains a solitary F or T")
    if x not in qp.individuals or y not in qp.individuals:
        raise DecompositionError("x and y must be nodes of qp")
    if not is_symmetric_cq(qp, x, y):
        raise DecompositionError("condition (b): qp(x,y) is not symmetric")
    v1, v2, vp = set(q1.individuals), set(q2.individuals), set(qp.individuals)
    if x not in v1 or y not in v2:
        raise DecompositionError("condition (c): q1 must contain x and q2 must contain y")
    if v1 & v2 or (v1 & vp) != {x} or (v2 & vp) != {y}:
        raise DecompositionError("condition (c): q1, q2 must be disjoint and meet qp only in x, y")

    def q1at(v, tag):
        return _copy_atoms(q1, {x: v}, tag)

    def q2at(v, tag):
        return _copy_atoms(q2, {y: v}, tag)

    def qpat(u, v, tag):
        return _copy_atoms(qp, {x: u, y: v}, tag)

    def B(v, tag):
        base = [] if o.total else [Atom(A, (v,))]
        return base + q1at(v, tag + "a") + q2at(v, tag + "b")

    full = Query.of(set(q1.unary) | set(qp.unary) | set(q2.unary) | {(F, x), (T, y)},
                    set(q1.binary) | set(qp.binary) | set(q2.binary))
    X, Y = "X_", "Y_"
    rules = [
        Rule(Atom(GOAL), tuple(_atoms_of(full))),
        Rule(Atom(GOAL), tuple([Atom(F, (X,))] + q1at(X, "g") + qpat(X, Y, "g") + [Atom("P", (Y,))])),
        Rule(Atom("P", (X,)), tuple(B(X, "bx") + qpat(X, Y, "s") + q2at(Y, "s") + [Atom(T, (Y,))])),
        Rule(Atom("P", (X,)), tuple(B(X, "bx") + qpat(X, Y, "r") + [Atom("P", (Y,))] + B(Y, "by"))),
    ]
    if o.disjoint:
        rules.append(Rule(Atom(GOAL), (Atom(F, (X,)), Atom(T, (X,)))))
    return Program(tuple(rules), comments=(f"symmetric datalog rewriting for {o.value}",))
