"""Cogwheels, bikes and (psi, n)-gadgets for twinless path 2-CQs.

All constructions work on an oriented copy of the query in which the
first T-node precedes the first F-node. When the input query starts the
other way round, F and T are exchanged before building and exchanged back
in the ABox handed out; `swapped` records this.

Inside a cogwheel the copies are numbered 1..n. Contact k is the node
where the chosen F-node of copy k is glued to the chosen T-node of copy
k+1 (indices mod n), so copy j runs from contact j-1 to contact j.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from ..classify import cq_kind
from ..model import A, F, T, ABox, Builder, Query
from . import GadgetError


class ContactViolation(GadgetError):
    """A contact choice breaks one of the two ordering conditions."""

    def __init__(self, kind, j, detail):
        super().__init__(f"{kind} violation at copy {j}: {detail}")
        self.kind, self.j = kind, j


WITHIN = "within-copy"  # chosen T-node must precede the chosen F-node
ACROSS = "across-glue"  # glued T-node of copy j+1 must precede F-node of copy j


@dataclass(frozen=True)
class Shape:
    """Named nodes of an oriented 2-CQ."""

    query: Query
    swapped: bool

    @cached_property
    def order(self):
        return self.query.path

    def pos(self, v) -> int:
        return self.order.index(v)

    def delta(self, u, v) -> int:
        return abs(self.pos(v) - self.pos(u))

    @cached_property
    def ts(self):
        return self.query.solitary(T)

    @cached_property
    def fs(self):
        return self.query.solitary(F)

    @property
    def size(self) -> int:
        return len(self.order) - 1

    @property
    def t1(self):
        return self.ts[0]

    @property
    def f1(self):
        return self.fs[0]

    @property
    def f2(self):
        return self.fs[1]

    @property
    def t_last(self):
        return self.ts[-1]

    @property
    def t_prev(self):
        """The last but one T-node."""
        return self.ts[-2]

    @property
    def f1_before_tlast(self) -> bool:
        return self.pos(self.f1) < self.pos(self.t_last)

    @property
    def t_box(self):
        """The last T-node preceding f1."""
        return [t for t in self.ts if self.pos(t) < self.pos(self.f1)][-1]

    @property
    def t_tri(self):
        """The first T-node succeeding f1 (only when f1 precedes t_last)."""
        return next(t for t in self.ts if self.pos(t) > self.pos(self.f1))

    @property
    def t_dia(self):
        """A T-node before f2 at distance delta(t1, f1) from it, or None."""
        p = self.pos(self.f2) - self.delta(self.t1, self.f1)
        if p >= 0 and self.order[p] in self.ts:
            return self.order[p]
        return None

    @property
    def tied_tail(self) -> bool:
        """t_last precedes f1 and is equidistant from t_{last-1} and f1."""
        return (not self.f1_before_tlast
                and self.delta(self.t_prev, self.t_last) == self.delta(self.t_last, self.f1))


def shape_of(q: Query) -> Shape:
    if q.path is None:
        raise GadgetError("query is not a path")
    if q.twins():
        raise GadgetError("query has an FT-twin")
    if cq_kind(q) != 2:
        raise GadgetError("the bike technique needs a path 2-CQ")
    ts, fs = q.solitary(T), q.solitary(F)
    if q.path.index(ts[0]) < q.path.index(fs[0]):
        return Shape(q, False)
    return Shape(q.swap_ft(), True)


# ------------------------------------------------------------ cogwheels

def uniform_choice(n, t, f) -> dict:
    return {j: (t, f) for j in range(1, n + 1)}


@dataclass(frozen=True)
class Cogwheel:
    shape: Shape
    n: int
    choice: dict  # copy index -> (T-node, F-node) of the query
    prefix: str = "w"

    def __post_init__(self):
        q = self.shape.query
        if self.n < self.shape.size:
            raise GadgetError(f"a cogwheel needs at least {self.shape.size} copies, got {self.n}")
        if sorted(self.choice) != list(range(1, self.n + 1)):
            raise GadgetError("contact choice must cover copies 1..n")
        for j, (t, f) in self.choice.items():
            if T not in q.label(t) or F not in q.label(f):
                raise GadgetError(f"copy {j}: contacts must be a T-node and an F-node")
        check_contacts(self.shape, self.choice, self.n)

    def contact(self, k) -> str:
        k = (k - 1) % self.n + 1
        return f"{self.prefix}_c{k}"

    @property
    def contacts(self) -> list:
        return [self.contact(k) for k in range(1, self.n + 1)]

    def node(self, j, v) -> str:
        """Name of query node v in copy j."""
        t, f = self.choice[j]
        if v == t:
            return self.contact(j - 1)
        if v == f:
            return self.contact(j)
        return f"{self.prefix}_{j}_{v}"

    def distance(self, i, j) -> int:
        d = abs(i - j) % self.n
        return min(d, self.n - d)

    def build_into(self, b: Builder):
        q = self.shape.query
        for j in range(1, self.n + 1):
            names = {v: self.node(j, v) for v in q.individuals}
            t, f = self.choice[j]
            b.copy(q, names, relabel={t: {A}, f: {A}})
        b.notes.append(f"cogwheel {self.prefix}: {self.n} copies")

    @cached_property
    def oriented_abox(self) -> ABox:
        b = Builder()
        self.build_into(b)
        return b.build()

    @property
    def abox(self) -> ABox:
        return self.oriented_abox.swap_ft() if self.shape.swapped else self.oriented_abox


def check_contacts(shape: Shape, choice: dict, n: int):
    for j in range(1, n + 1):
        t, f = choice[j]
        if shape.pos(t) >= shape.pos(f):
            raise ContactViolation(WITHIN, j, f"{t} does not precede {f}")
        t_next = choice[j % n + 1][0]
        if shape.pos(t_next) >= shape.pos(f):
            raise ContactViolation(ACROSS, j, f"{t_next} of copy {j % n + 1} does not precede {f}")


def cogwheel(q: Query, n: int, choice=None, prefix="w") -> Cogwheel:
    """`choice` is a dict copy -> (T-node, F-node), a single pair used for
    every copy, or None for the default (t1, f2)."""
    sh = shape_of(q)
    if choice is None:
        choice = (sh.t1, sh.f2)
    if isinstance(choice, tuple):
        choice = uniform_choice(n, *choice)
    return Cogwheel(sh, n, dict(choice), prefix)


def wheel_labeling(wheel: Cogwheel, values) -> ABox:
    """The oriented wheel with contact k labelled values[k-1] (True = T)."""
    add = [(T if v else F, c) for c, v in zip(wheel.contacts, values)]
    return wheel.oriented_abox.with_unary(add=add)


# -------------------------------------------------- neighbourhood tables
# Each table maps an offset from the connection's copy index to a
# (T-node, F-node) pair. Offsets run over -|q|..|q|.

def _default(sh):
    return (sh.t1, sh.f2)


def _near(sh):
    return (sh.t1, sh.f1)


def table_f(sh: Shape) -> dict:
    """F-neighbourhoods of both wheels and the third clause wheel."""
    m = sh.size
    out = {-k: _near(sh) for k in range(1, m + 1)}
    out[0] = (sh.t1, sh.f2)
    tail = not sh.f1_before_tlast
    short = sh.delta(sh.f1, sh.f2) < sh.delta(sh.t1, sh.f1)
    t = sh.t1 if tail and short else sh.t_box
    f = sh.f2 if tail and not short else sh.f1
    for l in range(1, m + 1):
        out[l] = (t, f)
    return out


def table_t_black(sh: Shape) -> dict:
    """T-neighbourhood of the black wheel; also the first clause wheel."""
    out = {k: _near(sh) for k in range(-sh.size, sh.size + 1)}
    out[0] = (sh.t_box, sh.f1 if sh.f1_before_tlast else sh.f2)
    return out


def table_t_white(sh: Shape) -> dict:
    out = {k: _near(sh) for k in range(-sh.size, sh.size + 1)}
    out[0] = (sh.t1, sh.f2 if sh.tied_tail else sh.f1)
    return out


def table_c2(sh: Shape) -> dict:
    """The second clause wheel."""
    m, a = sh.size, sh.f1_before_tlast
    dia = sh.t_dia
    out = {}
    for k in range(0, m + 1):
        t = dia if a and dia is not None else sh.t1
        if a:
            f = sh.f2
        elif k == 0 and sh.tied_tail:
            f = sh.f2
        else:
            f = sh.f1
        out[-k] = (t, f)
    for l in range(1, m + 1):
        out[l] = (sh.t_box if a else sh.t1, sh.f1)
    return out


def slot_centres(n, slots, width) -> list:
    """Connection copy indices for `slots` disjoint neighbourhoods of
    `width` copies, spreading spare copies as gaps after each one."""
    if slots * width > n:
        raise GadgetError(f"{slots} neighbourhoods of {width} copies do not fit in {n} copies")
    extra = n - slots * width
    out, start = [], 1
    half = width // 2
    for s in range(slots):
        out.append(start + half)
        start += width + extra // slots + (1 if s < extra % slots else 0)
    return out


def _apply(choice, centre, table, n):
    for off, pair in table.items():
        choice[(centre + off - 1) % n + 1] = pair


# ---------------------------------------------------------------- bikes

@dataclass(frozen=True)
class Bike:
    shape: Shape
    n: int
    wheel_black: Cogwheel
    wheel_white: Cogwheel
    i_black: int
    j_black: int
    i_white: int
    j_white: int
    prefix: str = "b"

    @property
    def t_connections(self):
        """(T-node glued into the black wheel, T-node glued into the white)."""
        sh = self.shape
        return sh.t1, (sh.t_tri if sh.f1_before_tlast else sh.t_last)

    @property
    def f_connections(self):
        return self.shape.f1, self.shape.f2

    def build_into(self, b: Builder):
        self.wheel_black.build_into(b)
        self.wheel_white.build_into(b)
        q = self.shape.query
        fb, fw = self.f_connections
        names = {v: f"{self.prefix}_qF_{v}" for v in q.individuals}
        names[fb] = self.wheel_black.contact(self.i_black)
        names[fw] = self.wheel_white.contact(self.i_white)
        b.copy(q, names, relabel={fb: {A}, fw: {A}}, note=f"bike {self.prefix}: F-connector")
        tb, tw = self.t_connections
        names = {v: f"{self.prefix}_qT_{v}" for v in q.individuals}
        names[tb] = self.wheel_black.contact(self.j_black)
        names[tw] = self.wheel_white.contact(self.j_white)
        b.copy(q, names, relabel={tb: {A}, tw: {A}}, note=f"bike {self.prefix}: T-connector")

    @cached_property
    def oriented_abox(self) -> ABox:
        b = Builder()
        self.build_into(b)
        return b.build()

    @property
    def abox(self) -> ABox:
        return self.oriented_abox.swap_ft() if self.shape.swapped else self.oriented_abox


def _bike_choices(sh, n, centres_black, centres_white, extra_black=(), extra_white=()):
    """Contact choices for both wheels. centres are (i, j) connection
    copy indices; extra lists (centre, table) pairs for clause wheels."""
    out = []
    for (i, j), tt, extra in ((centres_black, table_t_black(sh), extra_black),
                              (centres_white, table_t_white(sh), extra_white)):
        ch = {k: _default(sh) for k in range(1, n + 1)}
        _apply(ch, i, table_f(sh), n)
        _apply(ch, j, tt, n)
        for c, tab in extra:
            _apply(ch, c, tab, n)
        out.append(ch)
    return out


def bike(q: Query, n: int | None = None, prefix="b") -> Bike:
    sh = shape_of(q)
    need = 4 * sh.size + 2
    if n is None:
        n = need
    if n < need:
        raise GadgetError(f"a bike needs n >= {need}, got {n}")
    i, j = slot_centres(n, 2, 2 * sh.size + 1)
    cb, cw = _bike_choices(sh, n, (i, j), (i, j))
    wb = Cogwheel(sh, n, cb, f"{prefix}_B")
    ww = Cogwheel(sh, n, cw, f"{prefix}_W")
    return Bike(sh, n, wb, ww, i, j, i, j, prefix)


def bike_labeling(bk: Bike, black, white) -> ABox:
    """Oriented bike with contacts labelled; black/white are lists of
    booleans (True = T), one per contact."""
    add = [(T if v else F, c) for c, v in zip(bk.wheel_black.contacts, black)]
    add += [(T if v else F, c) for c, v in zip(bk.wheel_white.contacts, white)]
    return bk.oriented_abox.with_unary(add=add)


# ----------------------------------------------------------- psi gadget

@dataclass(frozen=True)
class PsiGadget:
    shape: Shape
    psi: object  # ThreeCNF
    n: int
    bikes: dict  # variable -> Bike
    special_triple: tuple
    wiring: dict  # clause index -> ((variable, 'black'|'white', contact index), ...)
    clause_copies: dict = field(default_factory=dict)  # clause index -> node names

    @cached_property
    def oriented_abox(self) -> ABox:
        b = Builder()
        for v in sorted(self.bikes):
            self.bikes[v].build_into(b)
        q = self.shape.query
        for k, names in sorted(self.clause_copies.items()):
            relabel = {s: {A} for s in self.special_triple}
            b.copy(q, names, relabel=relabel, note=f"clause {k}: {self.psi.clauses[k - 1]}")
        return b.build()

    @property
    def abox(self) -> ABox:
        return self.oriented_abox.swap_ft() if self.shape.swapped else self.oriented_abox

    def wheel(self, var, colour) -> Cogwheel:
        bk = self.bikes[var]
        return bk.wheel_black if colour == "black" else bk.wheel_white

    def model(self, assignment) -> ABox:
        """The oriented gadget with every black wheel of a true variable
        (and white wheel of a false one) set to T, the other wheel to F."""
        add = []
        for v, bk in self.bikes.items():
            val = bool(assignment[v])
            add += [(T if val else F, c) for c in bk.wheel_black.contacts]
            add += [(F if val else T, c) for c in bk.wheel_white.contacts]
        return self.oriented_abox.with_unary(add=add)


def special_triple(sh: Shape) -> tuple:
    return sh.t1, (sh.f1 if sh.f1_before_tlast else sh.t_last), sh.f2


def psi_gadget(q: Query, psi) -> PsiGadget:
    sh = shape_of(q)
    trip = special_triple(sh)
    tables = (table_t_black(sh), table_c2(sh), table_f(sh))
    variables = sorted({abs(l) for c in psi.clauses for l in c})
    hits = {}  # (var, colour) -> list of (clause, z)
    for k, c in enumerate(psi.clauses, 1):
        for z, lit in enumerate(c):
            s_is_f = F in sh.query.label(trip[z])
            positive = lit > 0
            colour = "black" if s_is_f == positive else "white"
            hits.setdefault((abs(lit), colour), []).append((k, z))
    most = max((len(h) for h in hits.values()), default=0)
    m = sh.size
    n = max((len(psi.clauses) + 2) * (2 * m + 1), (most + 2) * (2 * m + 2))
    centres = slot_centres(n, most + 2, 2 * m + 1)
    bikes, wiring = {}, {}
    for v in variables:
        extra = {}
        for colour in ("black", "white"):
            extra[colour] = [(centres[2 + s], tables[z]) for s, (_, z) in enumerate(hits.get((v, colour), []))]
        cb, cw = _bike_choices(sh, n, (centres[0], centres[1]), (centres[0], centres[1]),
                               extra["black"], extra["white"])
        pre = f"p{v}"
        bikes[v] = Bike(sh, n, Cogwheel(sh, n, cb, f"{pre}_B"), Cogwheel(sh, n, cw, f"{pre}_W"),
                        centres[0], centres[1], centres[0], centres[1], pre)
    slots = {key: iter(centres[2:2 + len(h)]) for key, h in hits.items()}
    placed = {}
    for key, h in sorted(hits.items()):
        for (k, z), centre in zip(h, slots[key]):
            placed[k, z] = (key[0], key[1], centre)
    copies = {}
    for k in range(1, len(psi.clauses) + 1):
        wiring[k] = tuple(placed[k, z] for z in range(3))
        names = {v: f"c{k}_{v}" for v in sh.query.individuals}
        for z, (var, colour, centre) in enumerate(wiring[k]):
            w = bikes[var].wheel_black if colour == "black" else bikes[var].wheel_white
            names[trip[z]] = w.contact(centre)
        copies[k] = names
    return PsiGadget(sh, psi, n, bikes, trip, wiring, copies)
