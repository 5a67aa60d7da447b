"""3CNF formulas, forall-exists 3SAT, and the combined-complexity gadget."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..model import A, F, T, ABox, Builder, Ontology, ParseError, Query
from . import GadgetError


@dataclass(frozen=True)
class ThreeCNF:
    """Variables are 1..variables; literals are signed variable indices."""

    variables: int
    clauses: tuple

    def __post_init__(self):
        cls = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", cls)
        for c in cls:
            if len(c) != 3:
                raise GadgetError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.variables:
                    raise GadgetError(f"literal {lit} out of range")

    def value(self, assignment) -> bool:
        """assignment maps variable index to True/False."""
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def assignments(self):
        for bits in itertools.product((False, True), repeat=self.variables):
            yield dict(zip(range(1, self.variables + 1), bits))

    def satisfiable(self) -> bool:
        return any(self.value(a) for a in self.assignments())

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.variables} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def _dimacs_body(text):
    header, prefix, clauses, cur = None, [], [], []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("bad problem line", n)
            header = int(parts[2])
            continue
        if line[0] in "ae":
            nums = [int(v) for v in line[1:].split()]
            if not nums or nums[-1] != 0:
                raise ParseError("quantifier line must end with 0", n)
            prefix.append((line[0], nums[:-1]))
            continue
        try:
            nums = [int(v) for v in line.split()]
        except ValueError:
            raise ParseError(f"unexpected token in {line!r}", n) from None
        for v in nums:
            if v == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        raise ParseError("last clause is not terminated by 0")
    if header is None:
        raise ParseError("missing problem line")
    return header, prefix, clauses


def parse_dimacs(text: str) -> ThreeCNF:
    nv, prefix, clauses = _dimacs_body(text)
    if prefix:
        raise ParseError("quantifier lines in a plain CNF")
    return ThreeCNF(nv, tuple(clauses))


@dataclass(frozen=True)
class ForallExists3SAT:
    """forall x_1..x_m exists y_1..y_k psi; x are variables 1..m, y are
    m+1..m+k."""

    x_vars: int
    y_vars: int
    clauses: tuple

    def __post_init__(self):
        ThreeCNF(self.x_vars + self.y_vars, self.clauses)
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len({abs(l) for l in c}) != 3:
                raise GadgetError(f"clause {c} mentions a variable twice")

    @property
    def matrix(self) -> ThreeCNF:
        return ThreeCNF(self.x_vars + self.y_vars, self.clauses)

    def is_x(self, v) -> bool:
        return abs(v) <= self.x_vars

    def x_assignments(self):
        for bits in itertools.product((False, True), repeat=self.x_vars):
            yield dict(zip(range(1, self.x_vars + 1), bits))

    def exists_y(self, a) -> bool:
        ys = range(self.x_vars + 1, self.x_vars + self.y_vars + 1)
        for bits in itertools.product((False, True), repeat=self.y_vars):
            if self.matrix.value({**a, **dict(zip(ys, bits))}):
                return True
        return False

    def truth(self) -> bool:
        return all(self.exists_y(a) for a in self.x_assignments())

    def to_qdimacs(self) -> str:
        m, k = self.x_vars, self.y_vars
        lines = [f"p cnf {m + k} {len(self.clauses)}"]
        if m:
            lines.append("a " + " ".join(map(str, range(1, m + 1))) + " 0")
        if k:
            lines.append("e " + " ".join(map(str, range(m + 1, m + k + 1))) + " 0")
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_qdimacs(text: str) -> ForallExists3SAT:
    nv, prefix, clauses = _dimacs_body(text)
    xs = [v for q, vs in prefix if q == "a" for v in vs]
    ys = [v for q, vs in prefix if q == "e" for v in vs]
    if [q for q, _ in prefix] not in (["a", "e"], ["a"], ["e"], []):
        raise ParseError("expected one 'a' line followed by one 'e' line")
    free = [v for v in range(1, nv + 1) if v not in xs and v not in ys]
    ys += free  # free variables are existential
    ren = {v: i for i, v in enumerate(xs + ys, 1)}
    cls = tuple(tuple((1 if l > 0 else -1) * ren[abs(l)] for l in c) for c in clauses)
    return ForallExists3SAT(len(xs), len(ys), cls)


# ------------------------------------------------------------ the gadget

def _var_name(phi, v):
    v = abs(v)
    return f"x{v}" if phi.is_x(v) else f"y{v - phi.x_vars}"


def forall_exists_query(phi: ForallExists3SAT) -> Query:
    if not phi.clauses:
        raise GadgetError("formula has no clauses")
    unary, binary = set(), set()
    for k, c in enumerate(phi.clauses, 1):
        z = f"z{k}"
        for i, lit in enumerate(c, 1):
            name = _var_name(phi, lit)
            if phi.is_x(lit):
                u = f"{name}_c{k}"
                unary.add((T if lit > 0 else F, u))
            else:
                u = name
            binary.add((z, f"R{k}_{i}", u))
    return Query.of(unary, binary)


def _choices(phi, lit, o):
    name = _var_name(phi, lit)
    if phi.is_x(lit):
        if o.disjoint:
            return [f"a_{name}_star", f"a_{name}_F", f"a_{name}_T"]
        return [f"a_{name}_star", f"a_{name}_circ"]
    return [f"b_{name}_F", f"b_{name}_T"]


def _makes_true(phi, lit, e):
    """Condition (iii) for one position."""
    if phi.is_x(lit):
        return e.endswith("_star")
    val = e.endswith("_T")
    return val == (lit > 0)


def clause_triples(phi: ForallExists3SAT, c, o: Ontology) -> list:
    opts = [_choices(phi, lit, o) for lit in c]
    return [e for e in itertools.product(*opts)
            if any(_makes_true(phi, lit, ei) for lit, ei in zip(c, e))]


def forall_exists(phi: ForallExists3SAT, o: Ontology = Ontology.COV_A) -> tuple[Query, ABox]:
    if o.total:
        raise GadgetError("the gadget is defined for the covering axiom over A")
    q = forall_exists_query(phi)
    b = Builder()
    for v in range(1, phi.x_vars + 1):
        name = f"x{v}"
        b.add(A, f"a_{name}_star")
        if o.disjoint:
            b.add(F, f"a_{name}_F")
            b.add(T, f"a_{name}_T")
        else:
            b.add(F, f"a_{name}_circ")
            b.add(T, f"a_{name}_circ")
    for v in range(1, phi.y_vars + 1):
        b.names.update((f"b_y{v}_F", f"b_y{v}_T"))
    for k, c in enumerate(phi.clauses, 1):
        triples = clause_triples(phi, c, o)
        for j, e in enumerate(triples, 1):
            d = f"d{k}_{j}"
            for i, ei in enumerate(e, 1):
                b.add(f"R{k}_{i}", d, ei)
        b.notes.append(f"clause {k} {c}: {len(triples)} centres")
    return q, b.build()


def with_assignment(phi: ForallExists3SAT, a: ABox, assignment) -> ABox:
    """Add T or F to each starred individual as the x-assignment says."""
    add = [(T if assignment[v] else F, f"a_x{v}_star") for v in range(1, phi.x_vars + 1)]
    return a.with_unary(add=add)
