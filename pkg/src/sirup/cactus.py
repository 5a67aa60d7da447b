"""Cactuses: budding, pruning, skeletons, branching ranks, minimality and
the FO-rewritability depth probe.

A cactus of a 1-CQ with solitary T-nodes y1..yn is stored as a trie: a
tuple with one entry per slot yi, each entry OPEN (yi keeps its T),
PRUNED (T(yi) removed) or a child trie (a query copy budded at yi).
The trie is the canonical form used for deduplication.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

from .classify import orient
from .model import (A, F, T, ABox, Ontology, Query, SirupError, find_homomorphism,
                    iter_homomorphisms, serialize)
from .oracle import certain_answer_sat

OPEN, PRUNED = 0, 1


class CactusError(SirupError):
    pass


def seg_name(path) -> str:
    return "s" + "".join(f"_{i}" for i in path)


def trie_depth(t) -> int:
    kids = [e for e in t if isinstance(e, tuple)]
    return 1 + max(map(trie_depth, kids)) if kids else 0


def trie_segments(t) -> int:
    return 1 + sum(trie_segments(e) for e in t if isinstance(e, tuple))


def _replace(t, path, slot, value):
    if not path:
        return t[:slot] + (value,) + t[slot + 1:]
    i = path[0]
    return t[:i] + (_replace(t[i], path[1:], slot, value),) + t[i + 1:]


@dataclass(frozen=True)
class Segment:
    id: str
    parent: str | None
    budded_at: str | None  # individual shared with the parent
    depth: int
    names: tuple  # (query node, individual) pairs


@dataclass(frozen=True)
class Cactus:
    query: Query  # oriented: exactly one solitary F
    ontology: Ontology
    trie: tuple
    mirrored: bool = False

    @cached_property
    def x(self):
        return self.query.solitary(F)[0]

    @cached_property
    def slots(self) -> tuple:
        return tuple(self.query.solitary(T))

    @cached_property
    def _built(self):
        q, slots, x = self.query, self.slots, self.x
        unary, binary, segs = set(), set(), []
        open_t, pruned, where = set(), set(), {}

        def rec(t, path, parent_y):
            sid = seg_name(path)
            nm = {v: f"{sid}__{v}" for v in q.individuals}
            if parent_y is not None:
                nm[x] = parent_y
            for p, v in q.unary:
                if v == x and parent_y is not None:
                    continue
                if v in slots and p == T:
                    continue
                unary.add((p, nm[v]))
            if parent_y is not None:
                unary.add((A, parent_y))
            binary.update((nm[s], r, nm[d]) for s, r, d in q.binary)
            parent = seg_name(path[:-1]) if path else None
            segs.append(Segment(sid, parent, parent_y, len(path), tuple(sorted(nm.items()))))
            for i, (y, e) in enumerate(zip(slots, t)):
                if e == OPEN:
                    unary.add((T, nm[y]))
                    open_t.add(nm[y])
                    where[nm[y]] = (path, i)
                elif e == PRUNED:
                    pruned.add(nm[y])
                else:
                    rec(e, path + (i,), nm[y])

        rec(self.trie, (), None)
        ab = ABox.of(unary, binary, provenance=[f"segment {s.id}" + (f" budded at {s.budded_at}" if s.parent else " (root)") for s in segs])
        return ab, tuple(segs), frozenset(open_t), frozenset(pruned), where

    @property
    def abox(self) -> ABox:
        """The cactus in the signature of the original (unoriented) query."""
        ab = self._built[0]
        return ab.swap_ft() if self.mirrored else ab

    @property
    def segments(self) -> tuple:
        return self._built[1]

    @property
    def open_T(self) -> frozenset:
        return self._built[2]

    @property
    def pruned(self) -> frozenset:
        return self._built[3]

    @property
    def depth(self) -> int:
        return trie_depth(self.trie)

    @property
    def size(self) -> int:
        return trie_segments(self.trie)

    def locate(self, y):
        if y not in self._built[4]:
            raise CactusError(f"{y} is not an open solitary T of this cactus")
        return self._built[4][y]

    def as_query(self) -> Query:
        """The cactus read as a Boolean CQ (A atoms vanish when A is the top concept)."""
        ab = self.abox
        unary = [(p, a) for p, a in ab.unary if not (self.ontology.total and p == A)]
        return Query.of(unary, ab.binary, extra=ab.individuals)

    def skeleton(self) -> list:
        return [(s.parent, s.id, s.budded_at) for s in self.segments if s.parent]

    def dump(self) -> str:
        text = serialize(self.abox)
        lines = ["# skeleton:"]
        lines += [f"#   {p} -> {c} at {y}" for p, c, y in self.skeleton()]
        return text + "\n".join(lines) + "\n"


def root_cactus(q: Query, o: Ontology) -> Cactus:
    qo, mirrored = orient(q)
    return Cactus(qo, o, (OPEN,) * len(qo.solitary(T)), mirrored)


def _with_trie(c: Cactus, t) -> Cactus:
    return Cactus(c.query, c.ontology, t, c.mirrored)


def bud(c: Cactus, y: str) -> Cactus:
    path, slot = c.locate(y)
    return _with_trie(c, _replace(c.trie, path, slot, (OPEN,) * len(c.slots)))


def original_query(c: Cactus) -> Query:
    return c.query.swap_ft() if c.mirrored else c.query


def sat_entails(c: Cactus) -> bool:
    return certain_answer_sat(c.ontology, original_query(c), c.abox).answer


def prune(c: Cactus, y: str, oracle=sat_entails) -> Cactus | None:
    path, slot = c.locate(y)
    c2 = _with_trie(c, _replace(c.trie, path, slot, PRUNED))
    return c2 if oracle(c2) else None


# ----------------------------------------------------------- generation

@lru_cache(maxsize=None)
def _tries_exact(n: int, k: int, d: int) -> tuple:
    """Unpruned tries with n slots, exactly k segments and depth <= d."""
    if k == 1:
        return ((OPEN,) * n,)
    if d == 0:
        return ()
    out = []
    # distribute k-1 segments over the n slots (0 means the slot stays open)
    for comp in _compositions(k - 1, n):
        choices = [((OPEN,) if m == 0 else _tries_exact(n, m, d - 1)) for m in comp]
        if any(not ch for ch in choices):
            continue
        out.extend(itertools.product(*choices))
    return tuple(out)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_tries(n: int, depth_bound: int, max_segments: int | None = None):
    """Unpruned tries in order of segment count, then lexicographically."""
    top = count_segments_bound(n, depth_bound)
    if max_segments is not None:
        top = min(top, max_segments)
    for k in range(1, top + 1):
        yield from _tries_exact(n, k, depth_bound)


def count_unpruned(n: int, depth: int) -> int:
    t = 1
    for _ in range(depth):
        t = (1 + t) ** n
    return t


def prune_family(c: Cactus, oracle) -> list:
    """All prune sets S (sets of open individuals) with the pruned cactus
    still entailing q; the family is closed under subsets."""
    opens = sorted(c.open_T)
    out = []

    def rec(i, chosen, cur):
        out.append((tuple(chosen), cur))
        for j in range(i, len(opens)):
            path, slot = cur.locate(opens[j])
            nxt = _with_trie(cur, _replace(cur.trie, path, slot, PRUNED))
            if oracle(nxt):
                rec(j + 1, chosen + [opens[j]], nxt)

    rec(0, [], c)
    return out


@dataclass
class Enumeration:
    cactuses: list
    truncated: bool
    depth_bound: int
    segments_done: int  # every cactus with at most this many segments is present

    def frontier(self) -> str:
        state = "truncated" if self.truncated else "complete"
        return (f"{state}: depth <= {self.depth_bound}, "
                f"all cactuses with <= {self.segments_done} segments enumerated")


def enumerate_cactuses(q: Query, o: Ontology, depth_bound: int, count_cap: int = 10_000,
                       with_prune=False, oracle=sat_entails, max_segments=None) -> Enumeration:
    root = root_cactus(q, o)
    n = len(root.slots)
    out, seen = [], set()
    k = 1
    for t in iter_tries(n, depth_bound, max_segments):
        k = trie_segments(t)
        base = _with_trie(root, t)
        variants = [c for _, c in prune_family(base, oracle)] if with_prune else [base]
        for c in variants:
            if c.trie in seen:
                continue
            if len(out) >= count_cap:
                return Enumeration(out, True, depth_bound, k - 1)
            seen.add(c.trie)
            out.append(c)
    limited = max_segments is not None and max_segments < count_segments_bound(n, depth_bound)
    return Enumeration(out, limited, depth_bound, k)


def embeds(small: Cactus, big: Cactus) -> bool:
    """`small` is a labelled sub-ABox of `big` up to renaming."""
    sa, ba = small.abox, big.abox
    if sa.size() > ba.size() or len(sa.individuals) > len(ba.individuals):
        return False
    return find_homomorphism(sa, ba, injective=True) is not None


def minimal_filter(pool: list) -> list:
    """Drop every cactus that contains another pool member. Relative to the
    pool only: the full class of cactuses is infinite."""
    kept = []
    for c in sorted(pool, key=lambda c: (c.abox.size(), c.size, repr(c.trie))):
        if not any(embeds(k, c) for k in kept):
            kept.append(c)
    return kept


# ------------------------------------------------------------ branching

@dataclass(frozen=True)
class BranchingReport:
    ranks: dict
    number: int


def _rank(t, path, ranks):
    kids = [(i, e) for i, e in enumerate(t) if isinstance(e, tuple)]
    if not kids:
        r = 0
    else:
        rs = [_rank(e, path + (i,), ranks) for i, e in kids]
        m = max(rs)
        r = m + 1 if rs.count(m) >= 2 else m
    ranks[seg_name(path)] = r
    return r


def branching_number(c) -> BranchingReport:
    t = c.trie if isinstance(c, Cactus) else c
    ranks = {}
    num = _rank(t, (), ranks)
    return BranchingReport(ranks, num)


# ----------------------------------------------------- minimal cactuses

def datalog_entails(c: Cactus) -> bool:
    from .datalog import build_pi_q, evaluate
    return evaluate(build_pi_q(original_query(c), c.ontology), c.abox)


@dataclass
class MinimalPool:
    cactuses: list
    candidates: int
    tries_examined: int
    max_segments: int
    depth_bound: int
    truncated: bool

    def frontier(self) -> str:
        state = "truncated by count cap" if self.truncated else "complete within bounds"
        return (f"{state}: tries with <= {self.max_segments} segments and depth <= "
                f"{self.depth_bound}; {self.tries_examined} tries, {self.candidates} candidates")


def _cut_subtrees(c: Cactus):
    def rec(t, path):
        for i, e in enumerate(t):
            if isinstance(e, tuple):
                yield _replace(c.trie, path, i, PRUNED)
                yield from rec(e, path + (i,))
    yield from rec(c.trie, ())


def minimal_pool(q: Query, o: Ontology, depth_bound: int, max_segments: int,
                 oracle=None, tries_cap: int = 200_000) -> MinimalPool:
    """Pool-relative minimal cactuses among all tries within the bounds.

    A minimal cactus admits no further prune (its prune set is maximal) and
    no budded subtree can be cut back to a bare node while still entailing q;
    the survivors are then filtered by embedding against each other."""
    root = root_cactus(q, o)
    memo = {}

    def ent(c):
        if c.trie not in memo:
            memo[c.trie] = (oracle or datalog_entails)(c)
        return memo[c.trie]

    cands, examined, truncated = [], 0, False
    for t in iter_tries(len(root.slots), depth_bound, max_segments):
        examined += 1
        if examined > tries_cap:
            truncated = True
            break
        base = _with_trie(root, t)
        fam = prune_family(base, ent)
        sets = [frozenset(s) for s, _ in fam]
        for s, c in fam:
            fs = frozenset(s)
            if any(fs < other for other in sets):
                continue
            if any(ent(_with_trie(c, cut)) for cut in _cut_subtrees(c)):
                continue
            cands.append(c)
    return MinimalPool(minimal_filter(cands), len(cands), examined, max_segments, depth_bound,
                       truncated)


# ------------------------------------------------------------- FO probe

@dataclass(frozen=True)
class UCQRewriting:
    disjuncts: tuple  # Query values
    depth: int
    twin_check: bool = False

    def holds(self, a: ABox) -> bool:
        if self.twin_check and a.twins():
            return True
        return any(find_homomorphism(d, a) is not None for d in self.disjuncts)

    def render(self) -> str:
        parts = []
        for i, d in enumerate(self.disjuncts):
            parts.append(f"# disjunct {i}\n" + serialize(d))
        if self.twin_check:
            parts.append("# disjunct twin\nF(x).\nT(x).\n")
        return "\n".join(parts)


class ProbeKind(Enum):
    REWRITABLE = "RewritableAtDepth"
    NO_BOUND = "NoBoundUpTo"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProbeResult:
    kind: ProbeKind
    depth: int | None = None
    rewriting: UCQRewriting | None = None
    reason: str = ""
    counterexamples: tuple = ()  # (d, trie) pairs

    def summary(self) -> str:
        if self.kind is ProbeKind.REWRITABLE:
            return (f"RewritableAtDepth({self.depth}): {len(self.rewriting.disjuncts)} disjuncts; "
                    f"{self.reason}")
        if self.kind is ProbeKind.NO_BOUND:
            return f"NoBoundUpTo({self.depth}); {self.reason}"
        return f"Inconclusive: {self.reason}"


def min_stage(q: Query, o: Ontology, a: ABox, max_stage: int) -> int | None:
    """Least d such that some cactus of depth <= d maps into `a`, found by
    staged evaluation: stage 0 marks T-individuals, stage k adds A-individuals
    (any individual when A is the top concept) that root a q copy whose slots
    land in stage k-1."""
    qo, mirrored = orient(q)
    if mirrored:
        a = a.swap_ft()
    x = qo.solitary(F)[0]
    ys = qo.solitary(T)
    body = qo.with_unary(remove=[(F, x)] + [(T, y) for y in ys]).with_unary(add=[("P*", y) for y in ys])
    top = body.with_unary(add=[(F, x)])
    grow = body if o.total else body.with_unary(add=[(A, x)])
    mark = frozenset({"P*"})
    stage = {b for b in a.individuals if T in a.label(b)}
    for d in range(max_stage + 1):
        extra = {b: mark for b in stage}
        if next(iter_homomorphisms(top, a, extra_labels=extra), None) is not None:
            return d
        if d == max_stage:
            break
        grown = set(stage)
        for b in a.sorted_individuals:
            if b not in grown and next(iter_homomorphisms(grow, a, fixed={x: b}, extra_labels=extra),
                                       None) is not None:
                grown.add(b)
        if grown == stage:
            break
        stage = grown
    return None


def ucq_of_depth(q: Query, o: Ontology, d: int) -> UCQRewriting:
    root = root_cactus(q, o)
    tries = [t for k in range(1, count_segments_bound(len(root.slots), d) + 1)
             for t in _tries_exact(len(root.slots), k, d)]
    qs = tuple(_with_trie(root, t).as_query() for t in tries)
    return UCQRewriting(qs, d, twin_check=o.disjoint)


def count_segments_bound(n: int, d: int) -> int:
    """Largest segment count of a depth <= d trie with n slots."""
    return sum(n ** i for i in range(d + 1))


def fo_probe(q: Query, o: Ontology, max_depth: int, cap: int = 50_000) -> ProbeResult:
    """Search the least d < max_depth such that every cactus of depth d+1
    contains an image of a cactus of depth <= d. Sound only relative to the
    enumerated frontier; the probe is semi-decisive by nature."""
    root = root_cactus(q, o)
    n = len(root.slots)
    found = []
    for d in range(max_depth):
        total = count_unpruned(n, d + 1) - count_unpruned(n, d)
        checked, counter = 0, None
        for k in range(d + 2, count_segments_bound(n, d + 1) + 1):
            for t in _tries_exact(n, k, d + 1):
                if trie_depth(t) != d + 1:
                    continue
                checked += 1
                if checked > cap:
                    return ProbeResult(ProbeKind.INCONCLUSIVE, d, reason=(
                        f"more than {cap} cactuses of depth {d + 1} ({total} in all)"),
                        counterexamples=tuple(found))
                c = _with_trie(root, t)
                if min_stage(original_query(c), o, c.abox, d) is None:
                    counter = t
                    break
            if counter is not None:
                break
        if counter is None:
            return ProbeResult(ProbeKind.REWRITABLE, d, ucq_of_depth(q, o, d),
                               reason=f"all {checked} cactuses of depth {d + 1} checked",
                               counterexamples=tuple(found))
        found.append((d, counter))
    return ProbeResult(ProbeKind.NO_BOUND, max_depth,
                       reason="each depth d < bound has a depth d+1 cactus with no smaller image",
                       counterexamples=tuple(found))


def find_cactus_witness(q: Query, o: Ontology, a: ABox, depth_bound: int, count_cap: int):
    """Direct route: search cactuses in size order for one mapping into `a`.
    Returns (cactus or None, truncated)."""
    root = root_cactus(q, o)
    n = len(root.slots)
    seen = 0
    for t in iter_tries(n, depth_bound):
        seen += 1
        if seen > count_cap:
            return None, True
        c = _with_trie(root, t)
        if find_homomorphism(c.as_query(), a) is not None:
            return c, False
    return None, False
