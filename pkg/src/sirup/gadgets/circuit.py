"""Monotone circuits and the gate-gadget reduction for aperiodic 1-CQs.

Gadgets are drawn as graphs whose edges stand for copies of a stretch of
the query path (an interval). An interval copy keeps the labels of the
query nodes strictly inside it; its end points get the gadget's labels.
Empty intervals glue their end points together.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..classify import NotOneCQ, Periodicity, analyze_path, periodicity
from ..model import A, F, T, ABox, ParseError, Query
from . import GadgetError

INPUT, AND, OR = "Input", "And", "Or"


@dataclass(frozen=True)
class MonotoneCircuit:
    gates: tuple  # (id, kind, inputs) in any order
    output: str

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple((g, k, tuple(i)) for g, k, i in self.gates))
        ids = [g for g, _, _ in self.gates]
        if len(set(ids)) != len(ids):
            raise GadgetError("duplicate gate id")
        known = set(ids)
        for g, k, ins in self.gates:
            if k not in (INPUT, AND, OR):
                raise GadgetError(f"gate {g}: unknown kind {k}")
            if (k == INPUT) != (len(ins) == 0) or (k != INPUT and len(ins) != 2):
                raise GadgetError(f"gate {g}: non-input gates take exactly two inputs")
            for i in ins:
                if i not in known:
                    raise GadgetError(f"gate {g}: unknown input {i}")
        if self.output not in known or self.kind(self.output) == INPUT:
            raise GadgetError("the output must be a non-input gate")
        self.topological()  # raises on cycles

    def kind(self, g) -> str:
        return {x: k for x, k, _ in self.gates}[g]

    def inputs_of(self, g) -> tuple:
        return {x: i for x, _, i in self.gates}[g]

    @property
    def input_gates(self) -> list:
        return [g for g, k, _ in self.gates if k == INPUT]

    def topological(self) -> list:
        order, state = [], {}

        def visit(g):
            if state.get(g) == 1:
                raise GadgetError("circuit has a cycle")
            if state.get(g) == 2:
                return
            state[g] = 1
            for i in self.inputs_of(g):
                visit(i)
            state[g] = 2
            order.append(g)

        for g, _, _ in self.gates:
            visit(g)
        return order

    def values(self, alpha) -> dict:
        val = {}
        for g in self.topological():
            k = self.kind(g)
            if k == INPUT:
                val[g] = bool(alpha[g])
            else:
                a, b = (val[i] for i in self.inputs_of(g))
                val[g] = (a and b) if k == AND else (a or b)
        return val

    def evaluate(self, alpha) -> bool:
        return self.values(alpha)[self.output]

    def assignments(self):
        ins = self.input_gates
        for bits in itertools.product((False, True), repeat=len(ins)):
            yield dict(zip(ins, bits))

    def to_netlist(self) -> str:
        lines = []
        for g in self.topological():
            k = self.kind(g)
            if k == INPUT:
                lines.append(f"in {g}")
            else:
                a, b = self.inputs_of(g)
                lines.append(f"{g} = {k.upper()} {a} {b}")
        lines.append(f"out {self.output}")
        return "\n".join(lines) + "\n"


def parse_netlist(text: str) -> MonotoneCircuit:
    gates, output = [], None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "in" and len(parts) == 2:
            gates.append((parts[1], INPUT, ()))
        elif parts[0] == "out" and len(parts) == 2:
            if output is not None:
                raise ParseError("more than one output line", n)
            output = parts[1]
        elif len(parts) == 5 and parts[1] == "=" and parts[2].upper() in ("AND", "OR"):
            gates.append((parts[0], AND if parts[2].upper() == "AND" else OR, (parts[3], parts[4])))
        else:
            raise ParseError(f"cannot read {line!r}", n)
    if output is None:
        raise ParseError("missing output line")
    return MonotoneCircuit(tuple(gates), output)


def small_circuits(max_gates=2):
    """Every monotone circuit with 1..max_gates non-input gates in which all
    gates feed the output, up to renaming of gates. Input order matters to
    the gadgets, so (a, b) and (b, a) are both produced."""
    seen = set()
    for k in range(1, max_gates + 1):
        for m in range(1, 2 * k + 1):
            ins = [f"i{j}" for j in range(1, m + 1)]
            inner = [f"g{j}" for j in range(1, k + 1)]
            slots = []
            for j, g in enumerate(inner):
                avail = ins + inner[:j]
                slots.append([p for p in itertools.permutations(avail, 2)])
            for wiring in itertools.product(*slots):
                for kinds in itertools.product((AND, OR), repeat=k):
                    used = {i for pair in wiring for i in pair}
                    if any(x not in used for x in ins + inner[:-1]):
                        continue
                    gates = [(i, INPUT, ()) for i in ins]
                    gates += [(g, kd, w) for g, kd, w in zip(inner, kinds, wiring)]
                    c = MonotoneCircuit(tuple(gates), inner[-1])
                    key = c.to_netlist()
                    if key not in seen:
                        seen.add(key)
                        yield c


# ------------------------------------------------------------- gadgets

class _Net:
    """Points joined by interval copies, with gluing by union-find."""

    def __init__(self, q: Query):
        self.order, self.roles = q.path, q.path_roles
        self.qlabels = [q.label(v) & {F, T} for v in self.order]
        self.parent, self.tag = {}, {}
        self.edges, self.inner = [], {}
        self.k = 0

    def point(self, name, tag=None):
        """tag: 'T', 'F', ('slot', key) for nodes whose final label is
        decided by the wiring, or 'end' for a loose end of an interval,
        which keeps the query label of the position it stands for."""
        self.parent[name] = name
        self.tag[name] = tag
        return name

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def glue(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def seg(self, u, v, span, owner):
        i, j = span
        for w, at in ((u, i), (v, j)):
            if self.tag[w] == "end":
                self.inner[w] = self.qlabels[at]
        if i == j:
            self.glue(u, v)
            return
        self.k += 1
        prev = u
        for p in range(i + 1, j):
            w = f"{owner}_e{self.k}_{p}"
            self.point(w)
            self.inner[w] = self.qlabels[p]
            self.edges.append((prev, self.roles[p - 1], w))
            prev = w
        self.edges.append((prev, self.roles[j - 1], v))

    def build(self, slot_label, notes) -> ABox:
        groups = {}
        for p in self.parent:
            groups.setdefault(self.find(p), []).append(p)
        unary = set()
        for rep, members in groups.items():
            labs = set()
            slots = [self.tag[m] for m in members if isinstance(self.tag[m], tuple)]
            if slots:
                got = {slot_label(s[1]) for s in slots}
                if len(got) != 1:
                    raise GadgetError(f"conflicting labels {sorted(got)} on glued node {rep}")
                labs = got
            else:
                for m in members:
                    if self.tag[m] in (F, T):
                        labs.add(self.tag[m])
                    labs |= self.inner.get(m, set())
            unary |= {(lab, rep) for lab in labs}
        binary = {(self.find(s), r, self.find(d)) for s, r, d in self.edges}
        return ABox.of(unary, binary, extra=groups.keys(), provenance=notes)


@dataclass(frozen=True)
class GadgetPlan:
    """How the reduction treats a query: the case of the hardness proof,
    the interval end positions on the (oriented, possibly reversed) path
    and the query actually used to draw gadgets."""

    case: str
    query: Query
    swapped: bool
    reversed: bool
    spans: dict
    n: int | None = None
    tall: int | None = None


def plan_for(q: Query) -> GadgetPlan:
    if q.path is None:
        raise GadgetError("query is not a path")
    if q.twins():
        raise GadgetError("query has an FT-twin")
    prof = analyze_path(q)
    if prof.lr is None:
        raise NotOneCQ("the circuit reduction needs a path 1-CQ")
    if periodicity(prof) is not Periodicity.APERIODIC:
        raise GadgetError("query is periodic; the circuit reduction needs an aperiodic 1-CQ")
    qo, swapped = prof.query, prof.mirrored
    l, r = prof.lr
    rev = False
    if l >= 1 and r >= 1:
        return _plan_iii(qo, swapped)
    if r == 0:
        qo, rev = Query(qo.individuals, qo.unary, qo.reverse_path().binary), True
        prof = analyze_path(qo)
        l, r = prof.lr
    return _plan_i(qo, prof, swapped, rev)


def _marks(prof):
    pos = {v: i for i, v in enumerate(prof.order)}
    x0 = pos[prof.solitary_F[0]]
    ts = sorted(pos[t] for t in prof.solitary_T)
    return x0, [p for p in ts if p < x0], [p for p in ts if p > x0]


def _plan_i(q, prof, swapped, rev) -> GadgetPlan:
    x0, _, after = _marks(prof)
    r = len(after)
    x = [x0] + after  # x[i] is the position of x_i
    R = prof.intervals
    diff = [i for i in range(2, r + 1) if R[i] != R[1]]
    n = diff[0] if diff else r
    end = len(prof.order) - 1
    spans = {"l": (0, x[0]), "r1": (x[0], x[1]), "r": (x[1], x[n - 1]),
             "s": (x[n - 1], x[n]), "t": (x[n], end)}
    return GadgetPlan("i" if not rev else "ii", q, swapped, rev, spans, n=n)


def _plan_iii(q, swapped) -> GadgetPlan:
    prof = analyze_path(q)
    x0, before, after = _marks(prof)
    end = len(prof.order) - 1
    spans = {"l": (0, before[-1]), "r": (before[-1], x0), "s": (x0, after[-1]), "t": (after[-1], end)}
    return GadgetPlan("iii", q, swapped, False, spans, tall=prof.size + 3)


def _span_len(sp):
    return sp[1] - sp[0]


def _gadget_i(net, plan, g, kind):
    """Returns the slot names: c, a, b and, for the wide AND, a' and b'."""
    S = plan.spans
    p = lambda n, tag="end": net.point(f"{g}_{n}", tag)
    slot = lambda n, key: net.point(f"{g}_{n}", ("slot", (g, key)))
    seg = lambda u, sp, v: net.seg(u, v, S[sp], g)
    c = slot("c", "c")
    if kind == AND and _span_len(S["s"]) > _span_len(S["r1"]):
        a, a2, b, b2 = slot("a", "a"), slot("a2", "a"), slot("b", "b"), slot("b2", "b")
        r3, u, l3, l4, z = p("r3", T), p("u", T), p("l3", T), p("l4", T), p("z", T)
        seg(p("p1"), "l", c)
        seg(p("p2"), "l", a2)
        seg(p("p3"), "l", b2)
        seg(c, "r1", a2)
        seg(a2, "r1", r3)
        seg(r3, "r", u)
        seg(u, "s", a)
        seg(a, "t", p("z3"))
        seg(b2, "r1", l3)
        seg(l3, "r", l4)
        seg(l4, "s", b)
        seg(b, "t", p("z2"))
        seg(a2, "r", z)
        seg(z, "s", b2)
        seg(b2, "t", p("z1"))
    elif kind == AND:
        a, b, z = slot("a", "a"), slot("b", "b"), p("z", T)
        seg(p("p1"), "l", c)
        seg(c, "r1", z)
        seg(z, "r", b)
        seg(b, "s", a)
        seg(a, "t", p("p5"))
    else:
        a, b = slot("a", "a"), slot("b", "b")
        seg(p("p1"), "l", c)
        for side, end in (("L", a), ("R", b)):
            t1, t2 = p(f"{side}1", T), p(f"{side}2", T)
            seg(c, "r1", t1)
            seg(t1, "r", t2)
            seg(t2, "s", end)
            seg(end, "t", p(f"{side}3"))
    return c


def _gadget_iii(net, plan, g, kind, is_output):
    S = plan.spans
    p = lambda n, tag="end": net.point(f"{g}_{n}", tag)
    slot = lambda n, key: net.point(f"{g}_{n}", ("slot", (g, key)))
    seg = lambda u, sp, v: net.seg(u, v, S[sp], g)
    a, b = slot("a", "a"), slot("b", "b")
    centre = p("f", F) if is_output else slot("z", "c")
    if kind == AND:
        seg(p("p1"), "l", a)
        seg(a, "r", centre)
        seg(centre, "s", b)
        seg(b, "t", p("p4"))
        if is_output:
            return centre
        top = centre
        seg(p("p5"), "l", centre)
        for k in range(1, plan.tall):
            v = slot(f"v{k}", "c")
            seg(top, "r", v)
            if k < plan.tall - 1:
                seg(p(f"l{k}"), "l", v)
            tk = p(f"t{k}", T)
            seg(v, "s", tk)
            seg(tk, "t", p(f"e{k}"))
            top = v
        return top
    seg(p("p1"), "l", a)
    seg(a, "r", centre)
    seg(p("p4"), "l", b)
    seg(b, "r", centre)
    t6 = p("t6", T)
    seg(centre, "s", t6)
    seg(t6, "t", p("p7"))
    return centre


def circuit_gadget(q: Query, circ: MonotoneCircuit, alpha) -> ABox:
    plan = plan_for(q)
    net = _Net(plan.query)
    top = {}
    notes = [f"circuit reduction, case ({plan.case})"]
    if plan.swapped:
        notes.append("query mirrored: F and T exchanged")
    for g in circ.topological():
        kind = circ.kind(g)
        if kind == INPUT:
            continue
        if plan.case == "iii":
            top[g] = _gadget_iii(net, plan, g, kind, g == circ.output)
        else:
            top[g] = _gadget_i(net, plan, g, kind)
        notes.append(f"gadget {g}: {kind}")
        for key, src in zip("ab", circ.inputs_of(g)):
            if src in top:
                net.glue(top[src], f"{g}_{key}")

    def slot_label(key):
        g, role = key
        if role == "c":
            return F if g == circ.output and plan.case != "iii" else A
        src = circ.inputs_of(g)["ab".index(role)]
        if circ.kind(src) == INPUT:
            return T if alpha[src] else F
        return A

    out = net.build(slot_label, notes)
    if plan.reversed:
        out = out.reversed_edges()
    if plan.swapped:
        out = out.swap_ft()
    return out
