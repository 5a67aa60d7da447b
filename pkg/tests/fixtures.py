"""Shared queries, ABoxes and random instance generators for the tests."""
import random

from sirup.model import A, F, T, ABox, Query, parse_abox, parse_query

Q1 = parse_query("[F] -R-> [T] -R-> [F] -R-> [T]")
Q2 = parse_query("[T] -S-> [T] -R-> [F]")
Q3 = parse_query("[T] -R-> [T] -R-> [F]")
Q5 = parse_query("[T] -R-> [] -R-> [F,T]")
TTFF = parse_query("[T] -R-> [T] -R-> [F] -R-> [F]")
TFTF = parse_query("[T] -R-> [F] -R-> [T] -R-> [F]")
TTFTF = parse_query("[T] -R-> [T] -R-> [F] -R-> [T] -R-> [F]")
CASE_III = parse_query("[T] -R-> [F] -R-> [T]")

# two S-R paths into a and b, plus a S b and b R F: every labelling of a, b
# completes one of them
WORKED_ABOX = parse_abox("""
A(a). A(b). F(c). T(d). T(e). T(g). T(h).
S(a,b). R(b,c).
S(d,e). R(e,a).
S(g,h). R(h,b).
""")

# looped queries that are FO-rewritable at depth 0 and 1
LOOP_DEPTH0 = parse_query("F(a). T(a). R(a,a). R(a,b). T(b). R(b,c). S(c,d). F(d). S(d,e). F(e). T(e). S(e,e).")
LOOP_DEPTH1 = parse_query("R(b,a). R(m,b). T(m). R(c,m). R(c,d). F(d). T(d). R(d,e). F(e).")

# the 3CNF used with TTFF in the bike construction
PSI_TTFF = ((-1, 2, -3), (1, 2, -3), (1, -2, 3))
PSI_UNSAT = tuple((a * 1, b * 2, c * 3) for a in (1, -1) for b in (1, -1) for c in (1, -1))


def shorthand(labels, roles) -> Query:
    """labels: list of label strings such as 'T', '', 'FT'."""
    out = "[" + ",".join(labels[0]) + "]"
    for r, lab in zip(roles, labels[1:]):
        out += f" -{r}-> [" + ",".join(lab) + "]"
    return parse_query(out)


def random_path_query(rng, max_edges=5, roles="RS", twins=True) -> Query:
    n = rng.randint(0, max_edges)
    pool = ["", "F", "T"] + (["FT"] if twins else [])
    labels = [rng.choice(pool) for _ in range(n + 1)]
    return shorthand(labels, [rng.choice(roles) for _ in range(n)])


def random_one_cq(rng, max_edges=4, roles="RS") -> Query:
    """A twinless path query with one solitary F and at least one solitary T
    (or the mirror image)."""
    while True:
        n = rng.randint(1, max_edges)
        labels = [rng.choice(["", "T", "T"]) for _ in range(n + 1)]
        labels[rng.randrange(n + 1)] = "F"
        if "T" in labels:
            break
    if rng.random() < 0.3:
        labels = [{"F": "T", "T": "F"}.get(l, l) for l in labels]
    return shorthand(labels, [rng.choice(roles) for _ in range(n)])


def random_abox(rng, max_individuals=8, roles="RS", density=0.25) -> ABox:
    n = rng.randint(1, max_individuals)
    names = [f"a{i}" for i in range(n)]
    unary, binary = set(), set()
    for a in names:
        r = rng.random()
        if r < 0.35:
            unary.add((A, a))
        elif r < 0.55:
            unary.add((T, a))
        elif r < 0.7:
            unary.add((F, a))
        elif r < 0.72:
            unary.update({(F, a), (T, a)})
    for a in names:
        for b in names:
            if a != b and rng.random() < density:
                binary.add((a, rng.choice(roles), b))
    return ABox.of(unary, binary, extra=names)


def rng_for(seed) -> random.Random:
    return random.Random(seed)
