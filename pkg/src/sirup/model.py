"""Queries, ABoxes, labelings and homomorphism search.

A query and an ABox share one representation: a finite set of unary and
binary ground atoms over opaque string names. Queries additionally know
whether they are shaped like a simple directed path.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping

F, T, A = "F", "T", "A"
NODE_LABELS = frozenset({F, T})
ABOX_LABELS = frozenset({F, T, A})
EMPTY = frozenset()


class SirupError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(SirupError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


class DisconnectedQuery(SirupError):
    pass


class Ontology(Enum):
    COV_A = "CovA"
    COV_A_BOT = "CovABot"
    COV_TOP = "CovTop"
    COV_TOP_BOT = "CovTopBot"

    @property
    def disjoint(self) -> bool:
        return self in (Ontology.COV_A_BOT, Ontology.COV_TOP_BOT)

    @property
    def total(self) -> bool:
        """Covering axiom over the top concept, so A is irrelevant."""
        return self in (Ontology.COV_TOP, Ontology.COV_TOP_BOT)

    @classmethod
    def parse(cls, name: str) -> "Ontology":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "cova": cls.COV_A, "dsirup": cls.COV_A,
            "covabot": cls.COV_A_BOT, "ddsirup": cls.COV_A_BOT,
            "covtop": cls.COV_TOP, "covtopbot": cls.COV_TOP_BOT,
        }
        if key not in aliases:
            raise SirupError(f"unknown ontology {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class Structure:
    """Ground atoms: unary as (pred, name), binary as (src, role, dst)."""

    individuals: frozenset
    unary: frozenset = EMPTY
    binary: frozenset = EMPTY
    provenance: tuple = field(default=(), compare=False, hash=False, repr=False)

    def __post_init__(self):
        mentioned = {a for _, a in self.unary}
        for s, _, d in self.binary:
            mentioned.add(s)
            mentioned.add(d)
        missing = mentioned - self.individuals
        if missing:
            raise SirupError(f"atoms mention undeclared names {sorted(missing)}")

    @classmethod
    def of(cls, unary=(), binary=(), extra=(), provenance=()):
        unary, binary = frozenset(unary), frozenset(binary)
        names = set(extra)
        names.update(a for _, a in unary)
        for s, _, d in binary:
            names.update((s, d))
        return cls(frozenset(names), unary, binary, tuple(provenance))

    # indexes, built lazily and cached on the instance
    @cached_property
    def labels(self) -> dict:
        out = defaultdict(set)
        for p, a in self.unary:
            out[a].add(p)
        return {a: frozenset(ps) for a, ps in out.items()}

    def label(self, a) -> frozenset:
        return self.labels.get(a, EMPTY)

    @cached_property
    def succ(self) -> dict:
        out = defaultdict(list)
        for s, r, d in self.binary:
            out[s, r].append(d)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def pred(self) -> dict:
        out = defaultdict(list)
        for s, r, d in self.binary:
            out[d, r].append(s)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def neighbours(self) -> dict:
        out = defaultdict(set)
        for s, _, d in self.binary:
            out[s].add(d)
            out[d].add(s)
        return out

    @cached_property
    def roles(self) -> frozenset:
        return frozenset(r for _, r, _ in self.binary)

    @cached_property
    def sorted_individuals(self) -> tuple:
        return tuple(sorted(self.individuals))

    def size(self) -> int:
        return len(self.unary) + len(self.binary)

    def is_connected(self) -> bool:
        if not self.individuals:
            return True
        start = min(self.individuals)
        seen, stack = {start}, [start]
        while stack:
            for b in self.neighbours.get(stack.pop(), ()):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return len(seen) == len(self.individuals)

    def twins(self) -> list:
        return sorted(a for a, ls in self.labels.items() if F in ls and T in ls)

    def union(self, *others: "Structure"):
        unary, binary, names = set(self.unary), set(self.binary), set(self.individuals)
        prov = list(self.provenance)
        for o in others:
            unary |= o.unary
            binary |= o.binary
            names |= o.individuals
            prov.extend(o.provenance)
        return type(self)(frozenset(names), frozenset(unary), frozenset(binary), tuple(prov))

    def with_unary(self, add=(), remove=()):
        unary = (self.unary - frozenset(remove)) | frozenset(add)
        names = self.individuals | {a for _, a in unary}
        return type(self)(names, unary, self.binary, self.provenance)

    def swap_ft(self):
        """Exchange the F and T labels everywhere."""
        sw = {F: T, T: F}
        unary = frozenset((sw.get(p, p), a) for p, a in self.unary)
        return type(self)(self.individuals, unary, self.binary, self.provenance)

    def reversed_edges(self):
        binary = frozenset((d, r, s) for s, r, d in self.binary)
        return type(self)(self.individuals, self.unary, binary, self.provenance)

    def rename(self, names: Mapping):
        """Apply a name map (names not in the map stay put); may merge names."""
        f = lambda a: names.get(a, a)
        unary = frozenset((p, f(a)) for p, a in self.unary)
        binary = frozenset((f(s), r, f(d)) for s, r, d in self.binary)
        return type(self)(frozenset(map(f, self.individuals)), unary, binary, self.provenance)


class Query(Structure):
    """A Boolean CQ. Node labels are drawn from F and T (A is allowed for
    cactus disjuncts and rule bodies, which reuse this class)."""

    __hash__ = Structure.__hash__

    @property
    def nodes(self) -> frozenset:
        return self.individuals

    @cached_property
    def path(self) -> tuple | None:
        """Node order when the binary atoms form a simple directed path."""
        n = len(self.individuals)
        if n == 0:
            return None
        if n == 1:
            return None if self.binary else (next(iter(self.individuals)),)
        if len(self.binary) != n - 1:
            return None
        nxt, indeg = {}, defaultdict(int)
        for s, _, d in self.binary:
            if s in nxt or s == d:
                return None
            nxt[s] = d
            indeg[d] += 1
        starts = [a for a in self.individuals if indeg[a] == 0]
        if len(starts) != 1 or any(v > 1 for v in indeg.values()):
            return None
        order = [starts[0]]
        while order[-1] in nxt:
            order.append(nxt[order[-1]])
        return tuple(order) if len(order) == n else None

    @cached_property
    def path_roles(self) -> tuple | None:
        if self.path is None:
            return None
        edge = {(s, d): r for s, r, d in self.binary}
        return tuple(edge[a, b] for a, b in zip(self.path, self.path[1:]))

    @property
    def order(self) -> tuple:
        """Canonical node order: the path order when there is one."""
        return self.path if self.path is not None else self.sorted_individuals

    def solitary(self, lab: str) -> list:
        other = T if lab == F else F
        return [v for v in self.order if lab in self.label(v) and other not in self.label(v)]

    def reverse_path(self):
        """Path reversal: the same atoms with every edge flipped."""
        return self.reversed_edges()


class ABox(Structure):
    __hash__ = Structure.__hash__

    def undecided(self, o: Ontology) -> list:
        """Individuals whose label a minimal model still has to choose."""
        out = []
        for a in self.sorted_individuals:
            ls = self.label(a)
            if F in ls or T in ls:
                continue
            if o.total or A in ls:
                out.append(a)
        return out


@dataclass(frozen=True)
class Labeling:
    """A choice of F or T for every undecided individual of `base`."""

    base: ABox
    choice: tuple  # sorted (individual, label) pairs
    ontology: Ontology = Ontology.COV_A

    def __post_init__(self):
        if not isinstance(self.choice, tuple):
            object.__setattr__(self, "choice", tuple(sorted(dict(self.choice).items())))
        keys = [a for a, _ in self.choice]
        if keys != self.base.undecided(self.ontology):
            raise SirupError("labeling must cover exactly the undecided individuals")
        if any(v not in NODE_LABELS for _, v in self.choice):
            raise SirupError("labeling values must be F or T")

    @property
    def mapping(self) -> dict:
        return dict(self.choice)


def apply_labeling(l: Labeling) -> ABox:
    return l.base.with_unary(add=[(v, a) for a, v in l.choice])


class Fresh:
    """Monotone name supply with a namespace prefix."""

    def __init__(self, prefix="n", start=1):
        self.prefix, self.k = prefix, start

    def __call__(self) -> str:
        self.k += 1
        return f"{self.prefix}{self.k - 1}"


# ---------------------------------------------------------------- parsing

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_NAME = r"[A-Za-z0-9_]+"  # individuals may start with a digit, e.g. graph vertices
_TOKEN = re.compile(rf"\s+|#[^\n]*|{_NAME}|[().,\[\]]|-{_IDENT}->|.", re.S)


def _tokens(text):
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if not tok.isspace() and not tok.startswith("#"):
            yield tok, line, col
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)


def _parse_atoms(text):
    toks = list(_tokens(text))
    unary, binary = set(), set()
    i = 0

    def expect(pred, what):
        nonlocal i
        if i >= len(toks):
            last = toks[-1] if toks else ("", 1, 1)
            raise ParseError(f"expected {what} at end of input", last[1], last[2])
        tok, ln, cl = toks[i]
        if not pred(tok):
            raise ParseError(f"expected {what}, got {tok!r}", ln, cl)
        i += 1
        return tok

    ident = lambda t: re.fullmatch(_IDENT, t) is not None
    name = lambda t: re.fullmatch(_NAME, t) is not None
    while i < len(toks):
        p = expect(ident, "predicate name")
        expect(lambda t: t == "(", "'('")
        args = [expect(name, "name")]
        if i < len(toks) and toks[i][0] == ",":
            i += 1
            args.append(expect(name, "name"))
        expect(lambda t: t == ")", "')'")
        if i < len(toks) and toks[i][0] == ".":
            i += 1
        elif i < len(toks):
            tok, ln, cl = toks[i]
            raise ParseError(f"expected '.', got {tok!r}", ln, cl)
        if len(args) == 1:
            unary.add((p, args[0]))
        else:
            binary.add((args[0], p, args[1]))
    return unary, binary


def _parse_shorthand(text):
    toks = list(_tokens(text))
    unary, binary = set(), set()
    names = []
    i = 0
    while i < len(toks):
        tok, ln, cl = toks[i]
        if names:
            if not (tok.startswith("-") and tok.endswith("->")):
                raise ParseError(f"expected -Role->, got {tok!r}", ln, cl)
            role = tok[1:-2]
            i += 1
            if i >= len(toks):
                raise ParseError("path ends with an edge", ln, cl)
            tok, ln, cl = toks[i]
        if tok != "[":
            raise ParseError(f"expected '[', got {tok!r}", ln, cl)
        i += 1
        node = f"x{len(names) + 1}"
        while i < len(toks) and toks[i][0] != "]":
            t2, l2, c2 = toks[i]
            if t2 in NODE_LABELS:
                unary.add((t2, node))
            elif t2 != ",":
                raise ParseError(f"node labels must be F or T, got {t2!r}", l2, c2)
            i += 1
        if i >= len(toks):
            raise ParseError("unclosed '['", ln, cl)
        i += 1
        if names:
            binary.add((names[-1], role, node))
        names.append(node)
    return unary, binary, names


def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_query(text: str) -> Query:
    body = _strip_comments(text)
    if body.lstrip().startswith("["):
        unary, binary, names = _parse_shorthand(body)
        q = Query.of(unary, binary, extra=names)
    else:
        unary, binary = _parse_atoms(body)
        q = Query.of(unary, binary)
    if not q.individuals:
        raise ParseError("empty query")
    if any(p not in NODE_LABELS for p, _ in q.unary):
        bad = sorted(p for p, _ in q.unary if p not in NODE_LABELS)[0]
        raise ParseError(f"query labels must be F or T, got {bad!r}")
    if not q.is_connected():
        raise DisconnectedQuery("query is not connected")
    return q


def parse_abox(text: str) -> ABox:
    unary, binary = _parse_atoms(_strip_comments(text))
    for p, a in unary:
        if p not in ABOX_LABELS:
            raise ParseError(f"unknown unary predicate {p!r} (allowed: A, F, T)")
    return ABox.of(unary, binary)


def serialize(s: Structure, header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"# provenance: {p}" for p in s.provenance]
    lines += [f"{p}({a})." for p, a in sorted(s.unary, key=lambda x: (x[1], x[0]))]
    lines += [f"{r}({a},{b})." for a, r, b in sorted(s.binary)]
    return "\n".join(lines) + "\n"


def path_shorthand(q: Query) -> str:
    if q.path is None:
        raise SirupError("query is not a path")
    parts = []
    for i, v in enumerate(q.path):
        if i:
            parts.append(f"-{q.path_roles[i - 1]}->")
        parts.append("[" + ",".join(sorted(q.label(v) & NODE_LABELS)) + "]")
    return " ".join(parts)


# ------------------------------------------------------- homomorphisms

def _plan(q: Structure, fixed):
    """Order q's nodes so each one (after a component's first) touches an
    earlier node, and collect the edge checks against earlier nodes."""
    order, seen = [], set()
    pending = sorted(q.individuals, key=lambda v: (v not in fixed, -len(q.neighbours.get(v, ())), v))
    for root in pending:
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(q.neighbours.get(v, ())):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    pos = {v: i for i, v in enumerate(order)}
    steps = []
    for v in order:
        checks = []  # (direction, role, earlier node); '>' means v -> u
        for s, r, d in q.binary:
            if s == v and pos[d] < pos[v]:
                checks.append((">", r, d))
            elif d == v and pos[s] < pos[v]:
                checks.append(("<", r, s))
            elif s == v and d == v:
                checks.append(("o", r, v))
        checks.sort(key=lambda c: (c[0] == "o", c))
        steps.append((v, q.label(v), checks))
    return steps


def iter_homomorphisms(q: Structure, target: Structure, fixed: Mapping | None = None,
                       ignore_labels=False, injective=False, extra_labels: Mapping | None = None
                       ) -> Iterator[dict]:
    """All homomorphisms q -> target in lexicographic backtracking order.

    `fixed` pins some nodes; `extra_labels` adds labels to target names
    without rebuilding its indexes (used by model enumeration)."""
    fixed = dict(fixed or {})
    if isinstance(target, Labeling):
        target = apply_labeling(target)
    steps = _plan(q, fixed)
    tlabels, succ, pred, edges = target.labels, target.succ, target.pred, target.binary
    extra = extra_labels or {}
    everyone = target.sorted_individuals
    h: dict = {}
    used: set = set()

    def ok_label(c, need):
        if ignore_labels or not need:
            return True
        have = tlabels.get(c, EMPTY)
        if c in extra:
            have = have | extra[c]
        return need <= have

    def candidates(v, checks):
        if v in fixed:
            return (fixed[v],)
        for kind, r, u in checks:
            if kind == ">":
                return pred.get((h[u], r), ())
            if kind == "<":
                return succ.get((h[u], r), ())
        return everyone

    def rec(i):
        if i == len(steps):
            yield dict(h)
            return
        v, need, checks = steps[i]
        for c in candidates(v, checks):
            if injective and c in used:
                continue
            if not ok_label(c, need):
                continue
            good = True
            for kind, r, u in checks:
                if kind == ">":
                    good = (c, r, h[u]) in edges
                elif kind == "<":
                    good = (h[u], r, c) in edges
                else:
                    good = (c, r, c) in edges
                if not good:
                    break
            if not good:
                continue
            h[v] = c
            used.add(c)
            yield from rec(i + 1)
            used.discard(c)
            del h[v]

    yield from rec(0)


def find_homomorphism(q: Structure, target, **kw) -> dict | None:
    return next(iter_homomorphisms(q, target, **kw), None)


# --------------------------------------------------------- constructions

def fresh_names(q: Structure, prefix="n") -> dict:
    order = q.order if isinstance(q, Query) else q.sorted_individuals
    return {v: f"{prefix}{i}" for i, v in enumerate(order, 1)}


def query_to_abox(q: Query, relabel: Mapping | None = None, names: Mapping | None = None,
                  prefix="n") -> ABox:
    """Copy q into an ABox under fresh names, replacing the label set of each
    node listed in `relabel` (values are iterables over F, T, A)."""
    relabel = {v: frozenset(ls) for v, ls in (relabel or {}).items()}
    for ls in relabel.values():
        if not ls <= ABOX_LABELS:
            raise SirupError("relabel may only use F, T and A")
    nm = fresh_names(q, prefix)
    nm.update(names or {})
    unary = set()
    for v in q.individuals:
        for p in relabel.get(v, q.label(v)):
            unary.add((p, nm[v]))
    binary = {(nm[s], r, nm[d]) for s, r, d in q.binary}
    return ABox.of(unary, binary, extra=[nm[v] for v in q.individuals])


def as_abox(s: Structure) -> ABox:
    return ABox(s.individuals, s.unary, s.binary, s.provenance)


def as_query(s: Structure) -> Query:
    return Query(s.individuals, s.unary, s.binary, s.provenance)


class Builder:
    """Accumulates atoms and provenance notes for a gadget ABox."""

    def __init__(self):
        self.unary, self.binary, self.names, self.notes = set(), set(), set(), []

    def add(self, pred, a, b=None):
        if b is None:
            self.unary.add((pred, a))
            self.names.add(a)
        else:
            self.binary.add((a, pred, b))
            self.names.update((a, b))

    def label(self, a, labels):
        for p in labels:
            self.add(p, a)

    def unlabel(self, a, labels=ABOX_LABELS):
        self.unary -= {(p, a) for p in labels}

    def copy(self, q: Structure, names: Mapping, relabel: Mapping | None = None, note=None):
        relabel = relabel or {}
        for v in q.individuals:
            self.names.add(names[v])
            self.label(names[v], relabel.get(v, q.label(v)))
        for s, r, d in q.binary:
            self.add(r, names[s], names[d])
        if note:
            self.notes.append(note)

    def build(self) -> ABox:
        return ABox(frozenset(self.names), frozenset(self.unary), frozenset(self.binary),
                    tuple(self.notes))
