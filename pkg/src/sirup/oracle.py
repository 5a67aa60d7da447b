"""Two independent certain-answer deciders.

`certain_answer_enum` walks every minimal model and searches for a
homomorphism in each. `certain_answer_sat` grounds the covering axiom,
the facts and the query into propositional clauses and runs DPLL.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .model import A, ABox, F, Labeling, Ontology, Query, SirupError, T, iter_homomorphisms

ENUM_CAP = 2 ** 24
CLAUSE_CAP = 10 ** 7


class BudgetExceeded(SirupError):
    pass


class Method(Enum):
    ENUMERATION = "Enumeration"
    GROUNDING = "Grounding"


@dataclass(frozen=True)
class CertainAnswerReport:
    answer: bool
    method: Method
    witness: Labeling | None = None  # enumeration counter-model
    sat_model: Labeling | None = None  # counter-model decoded from a SAT assignment


def _twin_shortcut(o: Ontology, a: ABox) -> bool:
    return o.disjoint and bool(a.twins())


def _entails_in(q, a, extra):
    for _ in iter_homomorphisms(q, a, extra_labels=extra):
        return True
    return False


def certain_answer_enum(o: Ontology, q: Query, a: ABox, cap: int = ENUM_CAP,
                        minimize=True) -> CertainAnswerReport:
    if _twin_shortcut(o, a):
        return CertainAnswerReport(True, Method.ENUMERATION)
    und = a.undecided(o)
    if 2 ** len(und) > cap:
        raise BudgetExceeded(f"2^{len(und)} labelings exceed the enumeration cap {cap}")
    fs, ts = frozenset({F}), frozenset({T})
    for bits in itertools.product((fs, ts), repeat=len(und)):
        extra = dict(zip(und, bits))
        if not _entails_in(q, a, extra):
            if minimize:
                for u in und:  # flip toward F while the model stays a counter-model
                    if extra[u] is ts:
                        extra[u] = fs
                        if _entails_in(q, a, extra):
                            extra[u] = ts
            choice = {u: next(iter(extra[u])) for u in und}
            return CertainAnswerReport(False, Method.ENUMERATION, Labeling(a, choice, o))
    return CertainAnswerReport(True, Method.ENUMERATION)


# ------------------------------------------------------------------ CNF

@dataclass
class CNF:
    variables: dict = field(default_factory=dict)  # (pred, individual) -> int
    clauses: set = field(default_factory=set)  # frozensets of int literals

    def var(self, pred, ind) -> int:
        key = (pred, ind)
        if key not in self.variables:
            self.variables[key] = len(self.variables) + 1
        return self.variables[key]

    def add(self, lits):
        self.clauses.add(frozenset(lits))

    def sorted_clauses(self) -> list:
        return sorted((sorted(c, key=lambda l: (abs(l), l)) for c in self.clauses),
                      key=lambda c: (len(c), [abs(l) for l in c], c))

    def to_dimacs(self) -> str:
        names = {v: f"{p}({a})" for (p, a), v in self.variables.items()}
        lines = [f"c {v} {names[v]}" for v in sorted(names)]
        cls = self.sorted_clauses()
        lines.append(f"p cnf {len(self.variables)} {len(cls)}")
        lines += [" ".join(map(str, c + [0])) for c in cls]
        return "\n".join(lines) + "\n"


def ground_to_cnf(o: Ontology, q: Query, a: ABox, cap: int = CLAUSE_CAP) -> CNF:
    """Ground clauses whose unsatisfiability is equivalent to a 'yes'.

    Binary atoms are fixed by the ABox, so they are resolved here rather than
    given variables: a query instance whose edges are missing is trivially
    satisfied and dropped, and the remaining ones are exactly the label-free
    homomorphisms of q into the ABox."""
    cnf = CNF()
    for c in a.sorted_individuals:
        f, t = cnf.var(F, c), cnf.var(T, c)
        if o.total:
            cnf.add([f, t])
        else:
            cnf.add([-cnf.var(A, c), f, t])
        if o.disjoint:
            cnf.add([-f, -t])
    for p, c in sorted(a.unary):
        cnf.add([cnf.var(p, c)])
    qunary = sorted(q.unary)
    emitted = 0
    for h in iter_homomorphisms(q, a, ignore_labels=True):
        emitted += 1
        if emitted > cap:
            raise BudgetExceeded(f"more than {cap} ground query clauses")
        cnf.add([-cnf.var(p, h[v]) for p, v in qunary])
    return cnf


class Unsat:
    def __repr__(self):
        return "Unsat"


UNSAT = Unsat()


@dataclass(frozen=True)
class Sat:
    assignment: dict


def _simplify(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


def dpll_solve(cnf) -> Sat | Unsat:
    """Unit propagation, pure literals, branch on the most frequent variable."""
    clauses = cnf.clauses if isinstance(cnf, CNF) else cnf
    clauses = [frozenset(c) for c in clauses]
    if any(not c for c in clauses):
        return UNSAT
    nvars = cnf.variables.values() if isinstance(cnf, CNF) else {abs(l) for c in clauses for l in c}

    def solve(clauses, assign):
        while True:
            unit = next((c for c in clauses if len(c) == 1), None)
            if unit is None:
                break
            lit = next(iter(unit))
            assign[abs(lit)] = lit > 0
            clauses = _simplify(clauses, lit)
            if clauses is None:
                return None
        lits = {l for c in clauses for l in c}
        pures = [l for l in lits if -l not in lits]
        for lit in pures:
            assign[abs(lit)] = lit > 0
        if pures:
            ps = set(pures)
            clauses = [c for c in clauses if not (c & ps)]
        if not clauses:
            return assign
        count = Counter(abs(l) for c in clauses for l in c)
        v = max(sorted(count), key=lambda x: count[x])
        for lit in (v, -v):
            rest = _simplify(clauses, lit)
            if rest is None:
                continue
            got = solve(rest, {**assign, v: lit > 0})
            if got is not None:
                return got
        return None

    got = solve(clauses, {})
    if got is None:
        return UNSAT
    return Sat({v: got.get(v, False) for v in nvars})


def certain_answer_sat(o: Ontology, q: Query, a: ABox, cap: int = CLAUSE_CAP) -> CertainAnswerReport:
    cnf = ground_to_cnf(o, q, a, cap)
    res = dpll_solve(cnf)
    if isinstance(res, Unsat):
        return CertainAnswerReport(True, Method.GROUNDING)
    val = res.assignment
    choice = {}
    for u in a.undecided(o):
        choice[u] = F if val.get(cnf.variables[F, u]) else T
    return CertainAnswerReport(False, Method.GROUNDING, sat_model=Labeling(a, choice, o))


def certain_answer(o: Ontology, q: Query, a: ABox, method="sat") -> bool:
    if method == "enum":
        return certain_answer_enum(o, q, a).answer
    return certain_answer_sat(o, q, a).answer


def twin_check(a: ABox) -> bool:
    """The FO sentence 'some individual is both F and T'."""
    return bool(a.twins())

