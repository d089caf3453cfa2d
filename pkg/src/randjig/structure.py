"""Dual graphs, contour graphs, connected regions, shape multiplicity,
k-goodness and exact feasibility probabilities of assemblies.

A half-edge is ``(origin, side)``: the planted cell of a piece and one of
its planted sides.  Geometry uses lattice corners ``(row, col)``; the cell
``(r, c)`` spans corners ``(r, c)`` to ``(r + 1, c + 1)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import Exact, exact
from .core import STEP, Assembly, Carving, JigSystem, Position, piece_grid

HalfEdge = tuple[Position, int]
Corner = tuple[int, int]


class ConsistencyError(RuntimeError):
    """An internal invariant of the contour machinery failed."""


@dataclass(frozen=True)
class DualEdge:
    """Common side of two neighbouring placed pieces.

    ``cells[0]`` is north or west of ``cells[1]``; ``half_edges`` lists
    their facing half-edges in the same order.
    """

    cells: tuple[Position, Position]
    half_edges: tuple[HalfEdge, HalfEdge]

    @property
    def horizontal_neighbours(self) -> bool:
        return self.cells[0][0] == self.cells[1][0]

    @property
    def segment(self) -> tuple[Corner, Corner]:
        (r, c), _ = self.cells
        if self.horizontal_neighbours:
            return (r, c + 1), (r + 1, c + 1)
        return (r + 1, c), (r + 1, c + 1)


def planted_partner(h: HalfEdge, n: int) -> HalfEdge | None:
    (r, c), side = h
    dr, dc = STEP[side]
    rr, cc = r + dr, c + dc
    if 0 <= rr < n and 0 <= cc < n:
        return (rr, cc), (side + 2) % 4
    return None


def dual_edges(a: Assembly) -> list[DualEdge]:
    edges = []
    for (r, c), (origin, rot) in a.cells.items():
        for facing in (1, 2):  # east and south neighbours
            nb = (r + STEP[facing][0], c + STEP[facing][1])
            if nb not in a.cells:
                continue
            origin2, rot2 = a.cells[nb]
            # the side now facing direction f is planted side (f + rot) % 4
            h1 = (origin, (facing + rot) % 4)
            h2 = (origin2, (facing + 2 + rot2) % 4)
            edges.append(DualEdge(((r, c), nb), (h1, h2)))
    return edges


def is_contour_edge(e: DualEdge, n: int) -> bool:
    h1, h2 = e.half_edges
    return planted_partner(h1, n) != h2


@dataclass(frozen=True)
class ContourGraph:
    edges: tuple[DualEdge, ...]
    contours: tuple[tuple[DualEdge, ...], ...]

    @property
    def vertices(self) -> frozenset[Corner]:
        return frozenset(v for e in self.edges for v in e.segment)

    def __len__(self):
        return len(self.edges)


def _components(items, links):
    """Group ``items`` by the undirected ``links`` (pairs of items)."""
    parent = {x: x for x in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in links:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for x in items:
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values(), key=lambda g: min(g))


def contour_graph(a: Assembly) -> ContourGraph:
    edges = tuple(e for e in dual_edges(a) if is_contour_edge(e, a.n))
    # contours are linked through shared lattice corners
    by_corner: dict[Corner, list[int]] = {}
    for i, e in enumerate(edges):
        for v in e.segment:
            by_corner.setdefault(v, []).append(i)
    links = [(ids[0], j) for ids in by_corner.values() for j in ids[1:]]
    groups = _components(range(len(edges)), links)
    return ContourGraph(edges, tuple(tuple(edges[i] for i in g) for g in groups))


def region_offset(pos: Position, origin: Position, rot: int) -> tuple[int, int, int]:
    """``(rot, dr, dc)`` such that ``pos = R^rot(origin) + (dr, dc)`` with ``R(r, c) = (-c, r)``."""
    r, c = origin
    for _ in range(rot % 4):
        r, c = -c, r
    return rot % 4, pos[0] - r, pos[1] - c


def connected_regions(a: Assembly) -> list[frozenset[Position]]:
    """Cells grouped by the faces cut out by the contour graph and the boundary.

    Every region is checked to share a single rigid offset from the planted
    assembly.
    """
    links = [e.cells for e in dual_edges(a) if not is_contour_edge(e, a.n)]
    regions = [frozenset(g) for g in _components(list(a.cells), links)]
    for region in regions:
        offsets = {region_offset(p, *a.cells[p]) for p in region}
        if len(offsets) != 1:
            raise ConsistencyError(f"region {sorted(region)} mixes offsets {offsets}")
    return regions


def edge_type(e: DualEdge, grid: np.ndarray, sys: JigSystem) -> int:
    """``min(j, iota(j))`` for the jig ``j`` on the first half-edge."""
    (r, c), side = e.half_edges[0]
    j = int(grid[r, c, side])
    return min(j, sys.fit(j))


def shape_multiplicity(edges, w: Carving, sys: JigSystem) -> int:
    grid = piece_grid(w, sys)
    counts = Counter(edge_type(e, grid, sys) for e in edges)
    return sum(m // 2 for m in counts.values())


def _type_arrays(a: Assembly, w: Carving, sys: JigSystem):
    """Edge types of a complete assembly: ``H[r, c]`` between ``(r, c)`` and
    ``(r, c+1)``, ``V[r, c]`` between ``(r, c)`` and ``(r+1, c)``."""
    n = a.n
    grid = piece_grid(w, sys)
    lo = np.minimum(np.arange(sys.q + 1), sys.table)
    H = np.zeros((n, max(n - 1, 0)), dtype=np.int64)
    V = np.zeros((max(n - 1, 0), n), dtype=np.int64)
    for e in dual_edges(a):
        (r, c), side = e.half_edges[0]
        t = lo[grid[r, c, side]]
        (r0, c0), _ = e.cells
        if e.horizontal_neighbours:
            H[r0, c0] = t
        else:
            V[r0, c0] = t
    return H, V


def is_k_good(a: Assembly, w: Carving, sys: JigSystem, k: int) -> bool:
    """Every ``k x k`` window has shape multiplicity at most 1 if it touches
    the boundary and at most 2 otherwise.

    Windows slide left to right along each band of rows; each shift updates
    the type counts of the ``O(k)`` edges entering and leaving.
    """
    n = a.n
    if k > n:
        raise ValueError(f"window size k={k} exceeds n={n}")
    if k < 1 or k % 2:
        raise ValueError(f"k must be a positive even integer, got {k}")
    if not a.is_complete:
        raise ValueError("k-goodness is defined for complete assemblies")
    H, V = _type_arrays(a, w, sys)
    for top in range(n - k + 1):
        counts: Counter = Counter()
        sm = 0

        def add(t, delta):
            nonlocal sm
            before = counts[t]
            counts[t] = before + delta
            sm += counts[t] // 2 - before // 2

        for t in H[top:top + k, 0:k - 1].ravel():
            add(t, 1)
        for t in V[top:top + k - 1, 0:k].ravel():
            add(t, 1)
        for left in range(n - k + 1):
            if left:
                for t in H[top:top + k, left - 1]:
                    add(t, -1)
                for t in V[top:top + k - 1, left - 1]:
                    add(t, -1)
                for t in H[top:top + k, left + k - 2]:
                    add(t, 1)
                for t in V[top:top + k - 1, left + k - 1]:
                    add(t, 1)
            touches = top == 0 or left == 0 or top + k == n or left + k == n
            if sm > (1 if touches else 2):
                return False
    return True


@dataclass(frozen=True)
class OldNewGraph:
    """Half-edges across the contour, joined by planted (old) and proposed (new) pairs."""

    vertices: frozenset[HalfEdge]
    new_edges: tuple[tuple[HalfEdge, HalfEdge], ...]
    old_edges: tuple[tuple[HalfEdge, HalfEdge], ...]
    paths: tuple[tuple[HalfEdge, ...], ...]
    cycles: tuple[tuple[HalfEdge, ...], ...]

    @property
    def num_cycles(self) -> int:
        return len(self.cycles)

    def path_new_counts(self) -> list[int]:
        return [len(p) // 2 for p in self.paths]

    def cycle_new_counts(self) -> list[int]:
        return [len(c) // 2 for c in self.cycles]


def old_new_graph(a: Assembly) -> OldNewGraph:
    cg = contour_graph(a)
    new_edges = tuple(e.half_edges for e in cg.edges)
    new_of: dict[HalfEdge, HalfEdge] = {}
    for h1, h2 in new_edges:
        new_of[h1] = h2
        new_of[h2] = h1
    vertices = frozenset(new_of)
    if len(vertices) != 2 * len(new_edges):
        raise ConsistencyError("a half-edge lies on two contour edges")
    old_of: dict[HalfEdge, HalfEdge] = {}
    for h in vertices:
        p = planted_partner(h, a.n)
        if p is not None and p in vertices:
            old_of[h] = p
    old_edges = tuple(sorted({tuple(sorted((h, p))) for h, p in old_of.items()}))
    for h, p in old_of.items():
        if new_of[h] == p:
            raise ConsistencyError(f"{h} and {p} are joined by both an old and a new edge")

    paths, cycles = [], []
    seen: set[HalfEdge] = set()
    # paths start and end at vertices without an old edge
    for start in sorted(vertices):
        if start in seen or start in old_of:
            continue
        walk = [start]
        cur = start
        while True:
            nxt = new_of[cur]
            walk.append(nxt)
            if nxt not in old_of:
                break
            cur = old_of[nxt]
            walk.append(cur)
        seen.update(walk)
        paths.append(tuple(walk))
    for start in sorted(vertices):
        if start in seen:
            continue
        walk = [start]
        cur = start
        while True:
            nxt = new_of[cur]
            walk.append(nxt)
            cur = old_of[nxt]
            if cur == start:
                break
            walk.append(cur)
        seen.update(walk)
        if len(walk) < 4:
            raise ConsistencyError(f"cycle {walk} has fewer than two new edges")
        cycles.append(tuple(walk))
    return OldNewGraph(vertices, new_edges, old_edges, tuple(paths), tuple(cycles))


def exact_feasibility_probability(a: Assembly, sys: JigSystem) -> Exact:
    """Probability over uniform carvings that ``a`` is feasible: ``q^(c - E)``.

    ``E`` counts contour edges and ``c`` cycles of the old/new graph.
    Each path component fits with probability ``q^-(new edges)``; a cycle
    gains one factor of ``q`` because its last new edge is implied by the
    others.
    """
    g = old_new_graph(a)
    e = len(g.new_edges)
    return exact(Fraction(sys.q) ** (g.num_cycles - e))


def render_contours(a: Assembly) -> str:
    """ASCII overlay: ``#``/``=`` mark contour segments, ``.`` occupied cells.

    Rows alternate between corner lines and cell lines; this is a debugging
    aid, its exact layout is not part of any interface.
    """
    cells = a.cells
    if not cells:
        return ""
    rows = [p[0] for p in cells]
    cols = [p[1] for p in cells]
    r0, r1, c0, c1 = min(rows), max(rows), min(cols), max(cols)
    segs = {e.segment for e in contour_graph(a).edges}
    lines = []
    for r in range(r0, r1 + 2):
        line = ""
        for c in range(c0, c1 + 1):
            line += "+" + ("==" if ((r, c), (r, c + 1)) in segs else "  ")
        lines.append(line + "+")
        if r > r1:
            break
        line = ""
        for c in range(c0, c1 + 2):
            line += "#" if ((r, c), (r + 1, c)) in segs else " "
            if c <= c1:
                line += " ." if (r, c) in cells else "  "
        lines.append(line)
    return "\n".join(lines)
