"""Mutilated chessboard instances.

Each board square carries a small pattern with four contact individuals,
one per side. Contacts shared by two squares are labelled A, contacts on
the boundary F. A model is a domino covering exactly when every square
sees one T contact, and those are precisely the models that avoid the
query.
"""
from __future__ import annotations

from ..model import A, F, T, ABox, Builder, Query, SirupError, parse_query

ROLE = "R"

# F-node tournament used both in the query and under every w-node
_TOURNAMENT = ((1, 2), (2, 3), (1, 4), (4, 3), (2, 4), (1, 3))
# contacts: 1 right, 2 top, 3 left, 4 bottom
_CONTACT_EDGES = ((2, 1), (3, 2), (4, 1), (3, 4), (2, 4), (3, 1))

_QUERY = """
F(f1). F(f2). F(f3). F(f4).
R(x,f1). R(x,f2). R(x,f3). R(x,f4).
R(f1,f2). R(f2,f3). R(f1,f4). R(f4,f3). R(f2,f4). R(f1,f3).
R(y,x). T(t1). T(t2). R(y,t1). R(y,t2). R(t2,t1).
"""


def chess_query() -> Query:
    return parse_query(_QUERY)


def contact_name(cell, side) -> str:
    """Shared contacts get one name: the right side of (i, j) is the left
    side of (i+1, j), the top of (i, j) the bottom of (i, j+1)."""
    i, j = cell
    if side == 1:
        return f"v{i + 1}_{j}"
    if side == 3:
        return f"v{i}_{j}"
    if side == 2:
        return f"h{i}_{j + 1}"
    if side == 4:
        return f"h{i}_{j}"
    raise ValueError(side)


def neighbour(cell, side):
    i, j = cell
    return {1: (i + 1, j), 2: (i, j + 1), 3: (i - 1, j), 4: (i, j - 1)}[side]


def chessboard_region(cells) -> ABox:
    """The instance for an arbitrary set of board cells."""
    cells = sorted(set(cells))
    present = set(cells)
    b = Builder()
    for cell in cells:
        i, j = cell
        tag = f"{i}_{j}"
        w, z, t0 = f"w{tag}", f"z{tag}", f"t{tag}"
        fs = {k: f"f{tag}_{k}" for k in range(1, 5)}
        for k in range(1, 5):
            b.add(F, fs[k])
            b.add(ROLE, w, fs[k])
        for u, v in _TOURNAMENT:
            b.add(ROLE, fs[u], fs[v])
        b.add(ROLE, z, w)
        contacts = {k: contact_name(cell, k) for k in range(1, 5)}
        for k, c in contacts.items():
            b.add(ROLE, z, c)
            b.add(A if neighbour(cell, k) in present else F, c)
        for u, v in _CONTACT_EDGES:
            b.add(ROLE, contacts[u], contacts[v])
        b.add(ROLE, t0, z)
        b.add(T, f"u{tag}_1")
        b.add(T, f"u{tag}_2")
        b.add(ROLE, t0, f"u{tag}_1")
        b.add(ROLE, t0, f"u{tag}_2")
        b.add(ROLE, f"u{tag}_1", f"u{tag}_2")
        b.notes.append(f"square ({i},{j})")
    return b.build()


def board_cells(n: int) -> list:
    """A 2n x 2n board without the two white corners (2n-1, 0) and (0, 2n-1)."""
    if n < 1:
        raise SirupError("board size must be at least 1")
    m = 2 * n
    cut = {(m - 1, 0), (0, m - 1)}
    return [(i, j) for i in range(m) for j in range(m) if (i, j) not in cut]


def chessboard(n: int) -> tuple[Query, ABox]:
    return chess_query(), chessboard_region(board_cells(n))


def square_contacts(cell) -> list:
    return [contact_name(cell, k) for k in range(1, 5)]


def has_domino_tiling(cells) -> bool:
    """Brute-force tiling search, used as ground truth."""
    todo = set(cells)

    def go():
        if not todo:
            return True
        c = min(todo)
        for nb in (neighbour(c, 1), neighbour(c, 2)):
            if nb in todo:
                todo.difference_update((c, nb))
                if go():
                    return True
                todo.update((c, nb))
        return False

    return go()


def tiling_labeling(cells, dominoes) -> dict:
    """Contact labels for a domino covering: the contact inside each domino
    is T, every other shared contact F."""
    shared = set()
    present = set(cells)
    for c in cells:
        for k in range(1, 5):
            if neighbour(c, k) in present:
                shared.add(contact_name(c, k))
    inside = set()
    for c, d in dominoes:
        for k in range(1, 5):
            if neighbour(c, k) == d:
                inside.add(contact_name(c, k))
    return {s: (T if s in inside else F) for s in sorted(shared)}
