"""Closed-form counts, probability bounds and the lattice-subgraph enumerator.

Everything that can overflow a double is computed with Python integers and
:class:`fractions.Fraction`; ``log10`` companions are for reporting only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple


class Exact(NamedTuple):
    value: Fraction
    log10: float


def log10_fraction(x: Fraction) -> float:
    if x <= 0:
        return -math.inf if x == 0 else math.nan
    return math.log10(x.numerator) - math.log10(x.denominator)


def exact(x) -> Exact:
    x = Fraction(x)
    return Exact(x, log10_fraction(x))


def count_piece_types(q: int) -> int:
    """Number of pieces up to rotation (Burnside over Z4)."""
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    total = q**4 + q**2 + 2 * q
    assert total % 4 == 0
    return total // 4


def count_boxes(n: int, q: int) -> int:
    """Multisets of ``n^2`` pieces drawn from all piece types."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    m = n * n
    return math.comb(count_piece_types(q) + m - 1, m)


def uea_probability_bound(n: int, q: int) -> Exact:
    """At most four carvings per box can belong to a puzzle whose solutions are all similar."""
    return exact(Fraction(4 * count_boxes(n, q), q ** (2 * n * (n + 1))))


def nonadjacent_duplicate_probability(q: int) -> Fraction:
    """Two independent uniform pieces being equal up to rotation.

    Summing ``|orbit|^2`` over the three symmetry classes gives
    ``q + 4(q^2 - q)/2 + 16(q^4 - q^2)/4 = 4q^4 - 2q^2 - q``.
    """
    return Fraction(4 * q**4 - 2 * q**2 - q, q**8)


def adjacent_duplicate_probability(q: int, num_self_fitting: int) -> Fraction:
    """Two pieces sharing one edge being equal up to rotation.

    With the left piece ``a`` and the shared jig ``v`` (``a_E = iota(v)``,
    ``b_W = v``), the count of ``(a, b)`` with ``b`` a rotation of ``a`` is
    the sum over ``a`` of the distinct rotations whose west side equals
    ``iota(a_E)``.  Summed naively over the four rotations this is
    ``q^3 (3 + f)`` (``f`` fixed points of iota); symmetric pieces are then
    de-duplicated, removing ``q (f + 1) + f``.
    """
    f = num_self_fitting
    return Fraction(q**3 * (3 + f) - q * (f + 1) - f, q**7)


def expected_piece_stats(n: int, q: int, num_self_fitting: int | None = None) -> tuple[Fraction, Fraction]:
    """Exact ``(E[Y], E[X])`` for a uniform carving.

    ``Y`` counts pieces with half- or quarter-turn symmetry and ``X``
    unordered pairs of cells holding equal pieces.  Only adjacent pairs
    depend on the involution, through its number of fixed points (default:
    edge-matching, every type self-fitting).
    """
    if n < 1 or q < 1:
        raise ValueError("n and q must be positive")
    f = q if num_self_fitting is None else num_self_fitting
    cells = n * n
    adjacent = 2 * n * (n - 1)
    pairs = math.comb(cells, 2)
    ey = Fraction(cells, q * q)
    ex = (pairs - adjacent) * nonadjacent_duplicate_probability(q) + adjacent * adjacent_duplicate_probability(q, f)
    return ey, ex


def dup_zero_bound(n: int, q: int) -> float:
    """Upper bound ``exp(-(n^4 - 2n^2) / (8 q^4))`` on ``P(X = 0)``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return math.exp(-(n**4 - 2 * n**2) / (8 * q**4))


def expected_solutions_heuristic(n: int, q: int) -> float:
    """``log10`` of ``4^(n^2) (n^2)! / q^(2n(n-1))`` for independently carved pieces."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    m = n * n
    return log10_fraction(Fraction(4**m * math.factorial(m), q ** (2 * n * (n - 1))))


def window_solutions_heuristic(n: int, q: int, k: int) -> float:
    """``log10`` of ``4^(k^2) (n^2)^(k^2) / q^(2k(k-1))``."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    kk = k * k
    return log10_fraction(Fraction(4**kk * (n * n) ** kk, q ** (2 * k * (k - 1))))


def subgraph_count_bound(E: int, F: int) -> int:
    """``C(3E - 4F + 4, 2E - 4F + 4)``."""
    top, bottom = 3 * E - 4 * F + 4, 2 * E - 4 * F + 4
    if E < 0 or F < 0 or bottom < 0:
        raise ValueError(f"binomial ill-formed for E={E}, F={F}")
    return math.comb(top, bottom)


Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

MAX_E_CAP = 8


@dataclass
class GraphInfo:
    edges: tuple[Edge, ...]
    V: int
    E: int
    F: int
    R: int
    face_perimeters: tuple[int, ...]
    outer_perimeter: int


@dataclass
class SubgraphTable:
    max_E: int
    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    witnesses: dict[tuple[int, int], GraphInfo] = field(default_factory=dict)

    def bound_holds(self) -> dict[tuple[int, int], bool]:
        return {ef: c <= subgraph_count_bound(*ef) for ef, c in self.counts.items()}

    def total(self, E: int) -> int:
        return sum(c for (e, _), c in self.counts.items() if e == E)


def _canonical(edges) -> tuple[Edge, ...]:
    x0, y0 = min(v for e in edges for v in e)
    return tuple(sorted(((a[0] - x0, a[1] - y0), (b[0] - x0, b[1] - y0)) for a, b in edges))


def _unit_edges_at(v: Vertex):
    x, y = v
    yield ((x, y), (x + 1, y))
    yield ((x - 1, y), (x, y))
    yield ((x, y), (x, y + 1))
    yield ((x, y - 1), (x, y))


def graph_info(edges: tuple[Edge, ...]) -> GraphInfo:
    """Vertex count, bounded faces by flood fill, and face perimeters.

    A face is a maximal set of unit cells connected without crossing an
    edge.  A face's perimeter counts cell sides lying on edges, so an edge
    with the same face on both sides counts twice.
    """
    verts = {v for e in edges for v in e}
    eset = set(edges)
    deg = {v: 0 for v in verts}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    E = len(edges)
    V = len(verts)
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    # cell (x, y) is the unit square with lower-left corner (x, y)
    cells = [(x, y) for x in range(min(xs) - 1, max(xs) + 1) for y in range(min(ys) - 1, max(ys) + 1)]
    inside = set(cells)

    def walls(cell):
        x, y = cell
        # (neighbour, separating segment)
        yield (x + 1, y), ((x + 1, y), (x + 1, y + 1))
        yield (x - 1, y), ((x, y), (x, y + 1))
        yield (x, y + 1), ((x, y + 1), (x + 1, y + 1))
        yield (x, y - 1), ((x, y), (x + 1, y))

    label: dict = {}
    faces: list[list] = []
    for cell in cells:
        if cell in label:
            continue
        comp = [cell]
        label[cell] = len(faces)
        stack = [cell]
        while stack:
            cur = stack.pop()
            for nb, seg in walls(cur):
                if nb in inside and nb not in label and seg not in eset:
                    label[nb] = len(faces)
                    comp.append(nb)
                    stack.append(nb)
        faces.append(comp)
    outer = label[cells[0]]
    perims = []
    for i, comp in enumerate(faces):
        perims.append(sum(1 for c in comp for _, seg in walls(c) if seg in eset))
    bounded = tuple(p for i, p in enumerate(perims) if i != outer)
    return GraphInfo(
        edges=edges,
        V=V,
        E=E,
        F=len(bounded),
        R=sum(4 - d for d in deg.values()),
        face_perimeters=bounded,
        outer_perimeter=perims[outer],
    )


def enumerate_lattice_subgraphs(max_E: int, cap: int = MAX_E_CAP, check=None) -> SubgraphTable:
    """Connected subgraphs of Z^2 with up to ``max_E`` edges, up to translation.

    Level ``E`` is grown from level ``E - 1`` by adding one unit edge at an
    existing vertex; every connected graph loses a cycle edge or a leaf edge
    and stays connected, so nothing is missed.  ``check`` is called with the
    :class:`GraphInfo` of every graph.
    """
    if max_E > cap:
        raise ValueError(f"max_E={max_E} exceeds the enumeration cap {cap}")
    if max_E < 0:
        raise ValueError("max_E must be non-negative")
    table = SubgraphTable(max_E)
    table.counts[(0, 0)] = 1
    table.witnesses[(0, 0)] = GraphInfo((), 1, 0, 0, 4, (), 0)
    level: set[tuple[Edge, ...]] = set()
    for e in _unit_edges_at((0, 0)):
        level.add(_canonical([e]))
    for E in range(1, max_E + 1):
        for g in sorted(level):
            info = graph_info(g)
            if check is not None:
                check(info)
            key = (E, info.F)
            table.counts[key] = table.counts.get(key, 0) + 1
            table.witnesses.setdefault(key, info)
        if E == max_E:
            break
        nxt: set[tuple[Edge, ...]] = set()
        for g in level:
            present = set(g)
            for v in {v for e in g for v in e}:
                for e in _unit_edges_at(v):
                    if e not in present:
                        nxt.add(_canonical(g + (e,)))
        level = nxt
    table.counts = dict(sorted(table.counts.items()))
    return table
