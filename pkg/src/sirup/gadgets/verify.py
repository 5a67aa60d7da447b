"""Ground-truth checks for every reduction.

Each kind expands its parameters into a deterministic list of small
instances, checks each one independently (optionally in worker processes)
and collects the failures in instance order.
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import networkx as nx

from ..model import Ontology, Query, find_homomorphism, parse_query, path_shorthand
from ..oracle import certain_answer_enum, certain_answer_sat
from . import GadgetError
from .bike import bike, bike_labeling, cogwheel, psi_gadget, shape_of, wheel_labeling
from .chess import board_cells, chess_query, chessboard_region, has_domino_tiling
from .circuit import circuit_gadget, small_circuits
from .qbf import ForallExists3SAT, ThreeCNF, forall_exists, with_assignment
from .reach import reach_dag, reach_undirected, reachable

KINDS = ("Chessboard", "ForallExists", "ReachU", "ReachDag", "Circuit", "Wheel", "Bike", "PsiStructured")
ORACLES = ("sat", "enum", "both")

PSI_ASSUMPTION = (
    "only assignment-induced models were enumerated; models that mix labels "
    "inside a wheel or give both wheels of a bike one value are covered by "
    "the wheel and bike checks")


@dataclass
class VerificationReport:
    kind: str
    passed: bool
    checked: int
    oracle: str
    failures: list = field(default_factory=list)  # counterexample payloads
    assumption: str = ""
    params: dict = field(default_factory=dict)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        s = f"{self.kind}: {verdict} ({self.checked} instances, {len(self.failures)} failures, oracle {self.oracle})"
        if self.assumption:
            s += f"\nassumption: {self.assumption}"
        for f in self.failures[:5]:
            s += "\n  counterexample: " + ", ".join(f"{k}={v}" for k, v in f.items())
        return s

    def record(self) -> dict:
        return {"kind": self.kind, "passed": str(self.passed).lower(), "checked": self.checked,
                "failures": len(self.failures), "oracle": self.oracle,
                "assumption": self.assumption or "-"}


def decide(o: Ontology, q: Query, a, oracle: str):
    """Returns (answer, None) or (answer, message) when the two oracles
    disagree."""
    if oracle == "sat":
        return certain_answer_sat(o, q, a).answer, None
    if oracle == "enum":
        return certain_answer_enum(o, q, a).answer, None
    x, y = certain_answer_sat(o, q, a).answer, certain_answer_enum(o, q, a).answer
    return x, (None if x == y else f"sat={x} enum={y}")


def _mismatch(got, want, clash, **payload):
    if clash:
        return {**payload, "oracle_disagreement": clash}
    if got != want:
        return {**payload, "gadget": got, "truth": want}
    return None


# --------------------------------------------------------------- checkers
# Each takes a picklable task tuple and the oracle name, returns a failure
# payload or None.

def _chess(task, oracle):
    cells = task
    a = chessboard_region(cells)
    got, clash = decide(Ontology.COV_A, chess_query(), a, oracle)
    return _mismatch(got, not has_domino_tiling(cells), clash, cells=list(cells))


def _forall(task, oracle):
    phi, o = task
    q, a = forall_exists(phi, o)
    got, clash = decide(o, q, a, oracle)
    bad = _mismatch(got, phi.truth(), clash, formula=phi.to_qdimacs().replace("\n", " ; "), ontology=o.value)
    if bad:
        return bad
    for asg in phi.x_assignments():
        hom = find_homomorphism(q, with_assignment(phi, a, asg)) is not None
        if hom != phi.exists_y(asg):
            return {"formula": phi.to_qdimacs().replace("\n", " ; "), "ontology": o.value,
                    "assignment": asg, "claim": "per-assignment"}
    return None


def _reach_u(task, oracle):
    q, n, edges, o, label_a = task
    g = nx.Graph()
    g.add_nodes_from(map(str, range(n)))
    g.add_edges_from(edges)
    a = reach_undirected(q, g, "0", "1", label_a=label_a)
    got, clash = decide(o, q, a, oracle)
    return _mismatch(got, reachable(g, "0", "1", False), clash, nodes=n, edges=edges, ontology=o.value)


def _reach_dag(task, oracle):
    q, n, edges, o = task
    g = nx.DiGraph()
    g.add_nodes_from(map(str, range(n)))
    g.add_edges_from(edges)
    for s, t in itertools.permutations(map(str, range(n)), 2):
        got, clash = decide(o, q, reach_dag(q, g, s, t), oracle)
        bad = _mismatch(got, reachable(g, s, t, True), clash, nodes=n, edges=edges, s=s, t=t)
        if bad:
            return bad
    return None


def _circuit(task, oracle):
    q, circ, o = task
    for alpha in circ.assignments():
        got, clash = decide(o, q, circuit_gadget(q, circ, alpha), oracle)
        bad = _mismatch(got, circ.evaluate(alpha), clash,
                        circuit=circ.to_netlist().strip().replace("\n", " ; "), alpha=alpha, ontology=o.value)
        if bad:
            return bad
    return None


def _wheel(task, oracle):
    q, n, values = task
    w = cogwheel(q, n)
    hom = find_homomorphism(w.shape.query, wheel_labeling(w, values)) is not None
    uniform = all(values) or not any(values)
    if hom == uniform:
        return {"n": n, "labeling": "".join("T" if v else "F" for v in values), "hom": hom}
    return None


def _bike(task, oracle):
    q, n, black, white = task
    bk = bike(q, n)
    hom = find_homomorphism(bk.shape.query, bike_labeling(bk, black, white)) is not None
    canonical = (all(black) and not any(white)) or (all(white) and not any(black))
    if hom == canonical:
        show = lambda vs: "".join("T" if v else "F" for v in vs)
        return {"black": show(black), "white": show(white), "hom": hom}
    return None


def _psi(task, oracle):
    q, psi, assignment = task
    g = psi_gadget(q, psi)
    hom = find_homomorphism(g.shape.query, g.model(assignment)) is not None
    if hom == psi.value(assignment):
        return {"assignment": assignment, "hom": hom, "satisfies": psi.value(assignment)}
    return None


_CHECK = {"Chessboard": _chess, "ForallExists": _forall, "ReachU": _reach_u, "ReachDag": _reach_dag,
          "Circuit": _circuit, "Wheel": _wheel, "Bike": _bike, "PsiStructured": _psi}


def _run(args):
    kind, task, oracle = args
    return _CHECK[kind](task, oracle)


# ------------------------------------------------------------- instances

def _query(params, default):
    q = params.get("query", default)
    return parse_query(q) if isinstance(q, str) else q


def _ontologies(params, default):
    os_ = params.get("ontologies", default)
    return [Ontology.parse(o) if isinstance(o, str) else o for o in os_]


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(2 ** len(pairs)):
        yield [(str(u), str(v)) for k, (u, v) in enumerate(pairs) if bits >> k & 1]


def random_forall_exists(rng, max_x=2, max_y=2, max_clauses=2) -> ForallExists3SAT:
    """Needs at least three variables so a clause can name three distinct ones."""
    while True:
        nx_, ny = rng.randint(0, max_x), rng.randint(0, max_y)
        if nx_ + ny >= 3:
            break
    cls = []
    for _ in range(rng.randint(1, max_clauses)):
        vs = rng.sample(range(1, nx_ + ny + 1), 3)
        cls.append(tuple(v * rng.choice((1, -1)) for v in vs))
    return ForallExists3SAT(nx_, ny, tuple(cls))


def _tasks(kind, p):
    rng = random.Random(p.get("seed", 0))
    if kind == "Chessboard":
        regions = [tuple(board_cells(p.get("n", 1)))]
        regions += [tuple(r) for r in p.get("regions", [])]
        return regions
    if kind == "ForallExists":
        if "formulas" in p:
            phis = list(p["formulas"])
        else:
            phis = [random_forall_exists(rng, p.get("max_x", 2), p.get("max_y", 2), p.get("max_clauses", 2))
                    for _ in range(p.get("samples", 100))]
        return [(phi, o) for phi in phis for o in _ontologies(p, ("cov_a", "cov_a_bot"))]
    if kind == "ReachU":
        q = _query(p, "[F] -R-> [T] -R-> [F] -R-> [T]")
        modes = [(Ontology.COV_TOP, False), (Ontology.COV_A, True)]
        return [(q, n, e, o, la) for n in range(2, p.get("max_nodes", 5) + 1)
                for e in all_graphs(n) for o, la in modes]
    if kind == "ReachDag":
        q = _query(p, "[T] -R-> [T] -R-> [F]")
        return [(q, n, e, o) for n in range(2, p.get("max_nodes", 5) + 1)
                for e in all_graphs(n) for o in _ontologies(p, ("cov_a",))]
    if kind == "Circuit":
        q = _query(p, "[T] -S-> [T] -R-> [F]")
        return [(q, c, o) for c in small_circuits(p.get("max_gates", 2))
                for o in _ontologies(p, ("cov_a", "cov_a_bot"))]
    if kind == "Wheel":
        q = _query(p, "[T] -R-> [T] -R-> [F] -R-> [F]")
        size = shape_of(q).size
        ns = p.get("ns", range(size, size + 3))
        return [(q, n, vals) for n in ns for vals in itertools.product((False, True), repeat=n)]
    if kind == "Bike":
        q = _query(p, "[T] -R-> [T] -R-> [F] -R-> [F]")
        n = p.get("n") or 4 * shape_of(q).size + 2
        out = [(q, n, (True,) * n, (False,) * n), (q, n, (False,) * n, (True,) * n)]
        out += [(q, n, (b,) * n, (b,) * n) for b in (True, False)]
        for _ in range(p.get("samples", 50)):
            b = rng.random() < 0.5
            black, white = [b] * n, [not b] * n
            side = black if rng.random() < 0.5 else white
            for k in rng.sample(range(n), rng.randint(1, n)):
                side[k] = not side[k]
            out.append((q, n, tuple(black), tuple(white)))
        return out
    if kind == "PsiStructured":
        q = _query(p, "[T] -R-> [T] -R-> [F] -R-> [F]")
        psi = p["psi"]
        if isinstance(psi, (list, tuple)):
            psi = ThreeCNF(max(abs(l) for c in psi for l in c), tuple(psi))
        return [(q, psi, a) for a in psi.assignments()]
    raise GadgetError(f"unknown verification kind {kind!r}; expected one of {', '.join(KINDS)}")


def verify_reduction(kind: str, params: dict | None = None, oracle_choice: str = "sat",
                     jobs: int = 1) -> VerificationReport:
    params = dict(params or {})
    if oracle_choice not in ORACLES:
        raise GadgetError(f"oracle must be one of {', '.join(ORACLES)}")
    tasks = _tasks(kind, params)
    args = [(kind, t, oracle_choice) for t in tasks]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        results = [_run(a) for a in args]
    failures = [r for r in results if r is not None]
    oracle = "homomorphism search" if kind in ("Wheel", "Bike", "PsiStructured") else oracle_choice
    shown = {k: (path_shorthand(v) if isinstance(v, Query) else v) for k, v in params.items()
             if k in ("query", "n", "max_nodes", "max_gates", "samples", "seed")}
    return VerificationReport(kind, not failures, len(tasks), oracle, failures,
                              PSI_ASSUMPTION if kind == "PsiStructured" else "", shown)
