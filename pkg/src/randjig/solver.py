"""Feasibility, exact enumeration of solutions up to similarity, classification."""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    STEP,
    Assembly,
    Carving,
    JigSystem,
    PieceBox,
    Symmetry,
    carving_from_grid,
    carving_from_key,
    piece_grid,
    piece_orbit,
    piece_symmetry,
    rotate_piece,
)
from .sampler import box_of
from .structure import dual_edges


class Verdict(enum.Enum):
    MULTIPLE_NONSIMILAR = "multiple_nonsimilar"
    UEA = "uea"
    UNDECIDED = "undecided"


@dataclass
class SolveResult:
    distinct_carvings: frozenset[Carving]
    exhausted: bool
    nodes_expanded: int
    duplicates_X: int
    symmetric_Y: int
    timed_out: bool = False

    @property
    def keys(self) -> frozenset[tuple[int, ...]]:
        return frozenset(w.key() for w in self.distinct_carvings)


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    uva: bool
    duplicates_X: int
    symmetric_Y: int
    num_distinct: int
    nodes_expanded: int
    exhausted: bool
    timed_out: bool = False

    @property
    def uea(self) -> bool:
        return self.verdict is Verdict.UEA


class _Stop(Exception):
    pass


def box_stats(box: PieceBox) -> tuple[int, int]:
    """``(X, Y)``: unordered duplicate pairs and rotationally symmetric pieces."""
    x = sum(math.comb(m, 2) for m in box.counts.values())
    y = sum(m for p, m in box.counts.items() if piece_symmetry(p) is not Symmetry.NONE)
    return x, y


def _placed_grid(a: Assembly, w: Carving, sys: JigSystem) -> dict:
    grid = piece_grid(w, sys)
    return {
        pos: rotate_piece(tuple(grid[o[0], o[1]].tolist()), rot)
        for pos, (o, rot) in a.cells.items()
    }


def is_feasible(a: Assembly, w: Carving, sys: JigSystem) -> bool:
    """Do all facing sides of neighbouring placed pieces fit?"""
    placed = _placed_grid(a, w, sys)
    fit = sys.iota
    for (r, c), sides in placed.items():
        # each adjacency is checked once, from its north or west member
        for d in (1, 2):
            nb = placed.get((r + STEP[d][0], c + STEP[d][1]))
            if nb is not None and fit[sides[d] - 1] != nb[(d + 2) % 4]:
                return False
    return True


def carving_of_assembly(a: Assembly, w: Carving, sys: JigSystem) -> Carving:
    if not a.is_complete:
        raise ValueError("carving_of_assembly needs a complete assembly")
    if not is_feasible(a, w, sys):
        raise ValueError("assembly is not feasible for this carving")
    placed = _placed_grid(a, w, sys)
    n = a.n
    grid = np.array([[placed[(r, c)] for c in range(n)] for r in range(n)], dtype=np.int64)
    return carving_from_grid(grid)


def _grid_key(grid: np.ndarray) -> tuple[int, ...]:
    """``carving_from_grid(grid).key()`` without building the carving."""
    north = np.concatenate([grid[:, :, 0].ravel(), grid[-1, :, 2]])
    west = np.concatenate([grid[:, :, 3], grid[:, -1:, 1]], axis=1).ravel()
    return tuple(np.concatenate([north, west]).tolist())


def _batch_keys(grids: np.ndarray) -> np.ndarray:
    """Row ``i`` is ``_grid_key(grids[i])``."""
    m, n = grids.shape[:2]
    north = np.concatenate([grids[:, :, :, 0].reshape(m, n * n), grids[:, -1, :, 2]], axis=1)
    west = np.concatenate([grids[:, :, :, 3], grids[:, :, -1:, 1]], axis=2).reshape(m, n * (n + 1))
    return np.concatenate([north, west], axis=1)


def _canonical_key_of_grid(grid: np.ndarray) -> tuple[int, ...]:
    keys = []
    for k in range(4):
        # same turn as rotate_grid: cells via rot90, sides shifted by k
        keys.append(_grid_key(np.rot90(grid, k, axes=(0, 1))[:, :, _SIDE_SHIFT[k]]))
    return min(keys)


_SIDE_SHIFT = [np.array([(f + k) % 4 for f in range(4)]) for k in range(4)]


def cell_order(n: int, order: str = "shell") -> list[tuple[int, int]]:
    if order == "row":
        return [(r, c) for r in range(n) for c in range(n)]
    if order == "shell":
        cells = []
        for k in range(n):
            cells += [(r, k) for r in range(k)]
            cells += [(k, c) for c in range(k + 1)]
        return cells
    raise ValueError(f"unknown cell order {order!r}")


def enumerate_solution_carvings(
    box: PieceBox,
    n: int,
    sys: JigSystem,
    limit: int | None = None,
    node_budget: int | None = None,
    timeout: float | None = None,
    order: str = "shell",
    hint: Carving | None = None,
    engine: str = "compiled",
) -> SolveResult:
    """Backtracking enumeration of every solution's similarity class.

    Cells are filled either row by row (``order="row"``) or in growing
    squares (``order="shell"``: column ``k`` top-down, then row ``k``
    left-to-right).  Both orders place a cell's west and north neighbours
    before the cell, so candidates come from one index keyed by the jigs
    those neighbours demand (wildcard on the first row/column).  The shell
    order keeps partial assemblies compact, which cuts the search tree by
    orders of magnitude once ``q`` is comparable to ``n``.

    The search branches over piece types and their distinct rotations, not
    over physical pieces, so permutations of duplicates and turns of
    symmetric pieces are merged before the carving-level dedup.

    ``hint`` (a carving whose box is ``box``) only reorders candidates: at
    each cell the hinted piece in its hinted orientation is tried first.
    The explored tree, and hence the result when exhausted, is unchanged.

    ``engine="compiled"`` runs the numba kernel; ``engine="python"`` is the
    plain recursive reference.  Both visit candidates in the same order and
    report the same node counts.
    """
    if box.n != n or box.total != n * n:
        raise ValueError(f"box with {box.total} pieces does not fill a {n}x{n} grid")
    x, y = box_stats(box)

    types = list(box.counts)
    counts = [box.counts[p] for p in types]
    orbits = [piece_orbit(p) for p in types]
    cells = cell_order(n, order)
    where = {cell: i for i, cell in enumerate(cells)}
    left = [where[(r, c - 1)] if c else -1 for r, c in cells]
    up = [where[(r - 1, c)] if r else -1 for r, c in cells]
    preferred = None
    if hint is not None:
        if hint.n != n:
            raise ValueError("hint carving has the wrong size")
        hgrid = piece_grid(hint, sys)
        preferred = [tuple(hgrid[r, c].tolist()) for r, c in cells]

    found: dict[tuple[int, ...], None] = {}
    budget = node_budget if node_budget is not None else math.inf
    deadline = time.monotonic() + timeout if timeout is not None else None

    def record(chosen) -> bool:
        grid = np.empty((n, n, 4), dtype=np.int64)
        for (r, c), sides in zip(cells, chosen):
            grid[r, c] = sides
        found.setdefault(_canonical_key_of_grid(grid))
        return limit is not None and len(found) >= limit

    if engine == "compiled":
        exhausted, nodes, timed_out = _run_compiled(
            counts, orbits, sys, left, up, preferred, record, budget, deadline
        )
    elif engine == "python":
        exhausted, nodes, timed_out = _run_python(
            counts, orbits, sys, left, up, preferred, record, budget, deadline
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")
    carvings = frozenset(carving_from_key(n, k) for k in found)
    return SolveResult(carvings, exhausted, nodes, x, y, timed_out)


_CHUNK = 1 << 21


def _run_compiled(counts, orbits, sys, left, up, preferred, record, budget, deadline):
    from ._kernel import EXHAUSTED, FOUND, Search

    search = Search(counts, orbits, sys.fit, left, up, preferred)
    while True:
        cap = search.nodes + _CHUNK
        if budget != math.inf:
            cap = min(cap, int(budget))
        status = search.run(cap)
        if status == EXHAUSTED:
            return True, search.nodes, False
        if status == FOUND:
            if record(search.solution()):
                return False, search.nodes, False
            continue
        if search.nodes >= budget:
            return False, search.nodes, False
        if deadline is not None and time.monotonic() > deadline:
            return False, search.nodes, True


def _run_python(counts, orbits, sys, left, up, preferred, record, budget, deadline):
    index: dict[tuple, list[tuple[int, tuple]]] = {}
    for t, orbit in enumerate(orbits):
        for sides in orbit:
            for key in ((sides[3], sides[0]), (None, sides[0]), (sides[3], None), (None, None)):
                index.setdefault(key, []).append((t, sides))
    empty: list = []
    counts = list(counts)
    fit = (0,) + sys.iota
    nn = len(left)
    east = [0] * nn
    south = [0] * nn
    chosen: list = [None] * nn
    nodes = 0
    timed_out = False

    def extend(i):
        nonlocal nodes, timed_out
        if i == nn:
            if record(chosen):
                raise _Stop
            return
        li, ui = left[i], up[i]
        wreq = fit[east[li]] if li >= 0 else None
        nreq = fit[south[ui]] if ui >= 0 else None
        cands = index.get((wreq, nreq), empty)
        if preferred is not None:
            pref = preferred[i]
            cands = sorted(cands, key=lambda ts: ts[1] != pref)
        for t, sides in cands:
            if not counts[t]:
                continue
            if nodes >= budget:
                raise _Stop
            if deadline is not None and not nodes & 0xFFF and time.monotonic() > deadline:
                timed_out = True
                raise _Stop
            nodes += 1
            counts[t] -= 1
            chosen[i] = sides
            east[i] = sides[1]
            south[i] = sides[2]
            extend(i + 1)
            counts[t] += 1

    try:
        extend(0)
    except _Stop:
        return False, nodes, timed_out
    return True, nodes, False


def naive_enumerate(box: PieceBox, n: int, sys: JigSystem) -> SolveResult:
    """Try every placement bijection and orientation vector (``n <= 2`` only)."""
    if n > 2:
        raise ValueError(f"naive enumeration refused for n={n} > 2")
    if box.n != n or box.total != n * n:
        raise ValueError(f"box with {box.total} pieces does not fill a {n}x{n} grid")
    m = n * n
    pieces = np.array(list(box), dtype=np.int64)
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    orients = np.array(list(itertools.product(range(4), repeat=m)), dtype=np.int64)
    # side f of a piece turned by k is its original side (f + k) % 4
    side_idx = (np.arange(4)[None, None, :] + orients[:, :, None]) % 4
    placed = pieces[perms][:, None, :, :]  # (perm, 1, cell, 4)
    grids = np.take_along_axis(
        np.broadcast_to(placed, (len(perms), len(orients), m, 4)),
        np.broadcast_to(side_idx[None], (len(perms), len(orients), m, 4)),
        axis=3,
    ).reshape(-1, m, 4)
    table = sys.table
    ok = np.ones(len(grids), dtype=bool)
    for r in range(n):
        for c in range(n):
            i = r * n + c
            if c + 1 < n:
                ok &= table[grids[:, i, 1]] == grids[:, i + 1, 3]
            if r + 1 < n:
                ok &= table[grids[:, i, 2]] == grids[:, i + n, 0]
    # dedup identical grids through their raw bytes (np.unique on rows is slow here)
    rows = np.ascontiguousarray(grids[ok])
    distinct = dict.fromkeys(r.tobytes() for r in rows)
    feasible = np.frombuffer(b"".join(distinct), dtype=np.int64).reshape(-1, n, n, 4)
    rotated = [_batch_keys(np.rot90(feasible, k, axes=(1, 2))[..., _SIDE_SHIFT[k]]).tolist() for k in range(4)]
    keys = {min(tuple(r[i]) for r in rotated) for i in range(len(feasible))}
    x, y = box_stats(box)
    carvings = frozenset(carving_from_key(n, k) for k in keys)
    return SolveResult(carvings, True, len(grids), x, y)


def classify(
    w: Carving,
    sys: JigSystem,
    limit: int = 2,
    node_budget: int | None = None,
    timeout: float | None = None,
    order: str = "shell",
    use_hint: bool = True,
    engine: str = "compiled",
) -> Classification:
    box = box_of(w, sys)
    res = enumerate_solution_carvings(
        box, w.n, sys, limit=limit, node_budget=node_budget, timeout=timeout, order=order,
        hint=w if use_hint else None, engine=engine,
    )
    k = len(res.distinct_carvings)
    if k >= 2:
        verdict = Verdict.MULTIPLE_NONSIMILAR
    elif res.exhausted:
        verdict = Verdict.UEA
    else:
        verdict = Verdict.UNDECIDED
    uva = verdict is Verdict.UEA and res.duplicates_X == 0 and res.symmetric_Y == 0
    return Classification(
        verdict, uva, res.duplicates_X, res.symmetric_Y, k,
        res.nodes_expanded, res.exhausted, res.timed_out,
    )


def half_edge_values(h, north: np.ndarray, west: np.ndarray, sys: JigSystem) -> np.ndarray:
    """Jig on half-edge ``h`` for a batch of carvings (leading batch axis)."""
    (r, c), side = h
    n = west.shape[1]
    if side == 0:
        return north[:, r, c]
    if side == 3:
        return west[:, r, c]
    table = sys.table
    if side == 2:
        return north[:, n, c] if r == n - 1 else table[north[:, r + 1, c]]
    return west[:, r, n] if c == n - 1 else table[west[:, r, c + 1]]


def is_feasible_batch(a: Assembly, north: np.ndarray, west: np.ndarray, sys: JigSystem) -> np.ndarray:
    """Vectorised :func:`is_feasible` over carvings stacked along axis 0."""
    table = sys.table
    ok = np.ones(north.shape[0], dtype=bool)
    for e in dual_edges(a):
        h1, h2 = e.half_edges
        ok &= table[half_edge_values(h1, north, west, sys)] == half_edge_values(h2, north, west, sys)
    return ok
