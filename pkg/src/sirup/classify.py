"""Path-query profiles, periodicity and the four-way complexity verdict."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import F, T, ABox, Ontology, Query, SirupError, find_homomorphism


class NotAPath(SirupError):
    pass


class NotOneCQ(SirupError):
    pass


class OutOfScope(SirupError):
    pass


def solitary_counts(q: Query):
    return len(q.solitary(F)), len(q.solitary(T))


def cq_kind(q: Query) -> int:
    """0, 1 or 2 for 0-CQs, 1-CQs and 2-CQs; 3 for anything else (one
    solitary F plus one solitary T counts as a 1-CQ)."""
    nf, nt = solitary_counts(q)
    if nf == 0 or nt == 0:
        return 0
    if nf == 1 or nt == 1:
        return 1
    return 2


def orient(q: Query) -> tuple[Query, bool]:
    """Return a copy of a 1-CQ with exactly one solitary F, swapping the
    F and T labels when the query has a single solitary T instead."""
    nf, nt = solitary_counts(q)
    if nf == 1 and nt >= 1:
        return q, False
    if nt == 1 and nf >= 1:
        return q.swap_ft(), True
    raise NotOneCQ(f"query has {nf} solitary F and {nt} solitary T nodes")


@dataclass(frozen=True)
class PathProfile:
    query: Query  # after orientation
    mirrored: bool
    solitary_F: tuple
    solitary_T: tuple
    twins: tuple
    lr: tuple | None  # (l, r)
    intervals: dict  # i -> role tuple, for i = -l .. r+1
    order: tuple

    @property
    def size(self) -> int:
        return len(self.order) - 1

    def pos(self, v) -> int:
        return self.order.index(v)

    def delta(self, u, v) -> int:
        return abs(self.pos(v) - self.pos(u))

    @property
    def distances(self) -> dict:
        return {(u, v): self.delta(u, v) for u in self.order for v in self.order}

    def interval(self, i) -> tuple:
        return self.intervals[i]


def _roles_between(q: Query, i, j) -> tuple:
    return q.path_roles[i:j]


def analyze_path(q: Query) -> PathProfile:
    if q.path is None:
        raise NotAPath("query is not a simple directed path")
    mirrored = False
    if cq_kind(q) == 1 and not q.twins():
        q, mirrored = orient(q)
    order = q.path
    twins = set(q.twins())
    sf, st = tuple(q.solitary(F)), tuple(q.solitary(T))
    tw = tuple(v for v in order if v in twins)
    lr, intervals = None, {}
    if len(sf) == 1 and st and not tw:
        x0 = order.index(sf[0])
        tpos = [order.index(t) for t in st]
        before = [p for p in tpos if p < x0]
        after = [p for p in tpos if p > x0]
        l, r = len(before), len(after)
        marks = [0] + before + [x0] + after + [len(order) - 1]
        # interval i runs between x_{i-1} and x_i; the outer ones reach b_q and e_q
        for k in range(len(marks) - 1):
            intervals[k - l] = _roles_between(q, marks[k], marks[k + 1])
        lr = (l, r)
    return PathProfile(q, mirrored, sf, st, tw, lr, intervals, order)


class Periodicity(Enum):
    RIGHT = "RightPeriodic"
    LEFT = "LeftPeriodic"
    APERIODIC = "Aperiodic"
    NOT_ONE_CQ = "NotOneCQ"


def _in_star_prefix(s, p) -> bool:
    """s = p^k . lam for a prefix lam of p."""
    if not p:
        return not s
    return s == (p * (len(s) // len(p) + 1))[:len(s)]


def _in_suffix_star(s, p) -> bool:
    """s = lam . p^k for a suffix lam of p."""
    if not p:
        return not s
    if not s:
        return True
    return s == (p * (len(s) // len(p) + 1))[-len(s):]


def periodicity(p: PathProfile) -> Periodicity:
    if p.lr is None:
        return Periodicity.NOT_ONE_CQ
    l, r = p.lr
    R = p.intervals
    if l == 0:
        if r == 1 or (all(R[i] == R[1] for i in range(1, r + 1)) and _in_star_prefix(R[r + 1], R[1])):
            return Periodicity.RIGHT
    if r == 0:
        if l == 1 or (all(R[-i] == R[0] for i in range(1, l)) and _in_suffix_star(R[-l], R[0])):
            return Periodicity.LEFT
    return Periodicity.APERIODIC


# -------------------------------------------------------------- verdicts

class Complexity(Enum):
    AC0 = "AC0"
    NL = "NL"
    P = "P"
    CONP = "CONP"


class Reason(Enum):
    HAS_TWIN = "HasTwin"
    ZERO_CQ = "ZeroCQ"
    PERIODIC = "PeriodicOneCQ"
    APERIODIC = "AperiodicOneCQ"
    TWO_CQ = "TwoCQ"


@dataclass(frozen=True)
class FORewriting:
    """A union of CQs, optionally joined by the twin sentence."""

    disjuncts: tuple
    twin_check: bool = False

    def holds(self, a: ABox) -> bool:
        if self.twin_check and a.twins():
            return True
        return any(find_homomorphism(d, a) is not None for d in self.disjuncts)

    def render(self) -> str:
        from .model import serialize
        parts = [serialize(d).strip().replace("\n", " ") for d in self.disjuncts]
        if self.twin_check:
            parts.append("F(x). T(x).")
        return "\n  OR ".join(parts)


@dataclass(frozen=True)
class Verdict:
    cls: Complexity
    reason: Reason
    side: str | None = None  # "left" or "right" for periodic queries
    rewriting: object = None
    mirrored: bool = False
    note: str = ""

    def summary(self) -> str:
        text = {
            Reason.HAS_TWIN: "contains an FT-twin",
            Reason.ZERO_CQ: "0-CQ",
            Reason.PERIODIC: f"periodic 1-CQ, {self.side}",
            Reason.APERIODIC: "aperiodic 1-CQ",
            Reason.TWO_CQ: "2-CQ",
        }[self.reason]
        return f"{self.cls.value} ({text})"

    def record(self) -> dict:
        return {
            "class": self.cls.value,
            "reason": self.reason.value,
            "side": self.side or "-",
            "mirrored": str(self.mirrored).lower(),
            "rewriting": type(self.rewriting).__name__ if self.rewriting is not None else "-",
            "note": self.note or "-",
        }


def tetrachotomy(q: Query, o: Ontology) -> Verdict:
    if q.path is None:
        raise NotAPath("the classifier handles path queries only")
    if o.total:
        raise OutOfScope("the classification covers the covering axiom over A only")
    twins = bool(q.twins())
    if twins and o.disjoint:
        return Verdict(Complexity.AC0, Reason.HAS_TWIN,
                       rewriting=FORewriting((), twin_check=True))
    kind = cq_kind(q)
    if kind == 0:
        return Verdict(Complexity.AC0, Reason.ZERO_CQ,
                       rewriting=FORewriting((q,), twin_check=o.disjoint))
    if twins:
        raise OutOfScope("path queries with twins under the plain covering axiom are open")
    if kind == 2:
        return Verdict(Complexity.CONP, Reason.TWO_CQ,
                       note="coNP-complete; no datalog rewriting exists unless P = coNP")
    from .datalog import build_pi_q

    prof = analyze_path(q)
    per = periodicity(prof)
    prog = build_pi_q(q, o)
    if per in (Periodicity.LEFT, Periodicity.RIGHT):
        side = "right" if per is Periodicity.RIGHT else "left"
        return Verdict(Complexity.NL, Reason.PERIODIC, side, prog, prof.mirrored,
                       note="NL-complete; the attached program is the general datalog rewriting")
    return Verdict(Complexity.P, Reason.APERIODIC, None, prog, prof.mirrored,
                   note="P-complete; datalog-rewritable")
