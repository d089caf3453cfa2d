"""Domain types: jig systems, carvings, pieces, boxes and assemblies.

Conventions used throughout the package
---------------------------------------
* Grid cells are 0-indexed ``(row, col)`` with row 0 at the top.
* Piece sides are listed in cyclic order ``(N, E, S, W)``; side index
  0..3 follows the same order.
* ``Carving.north`` has shape ``(n + 1, n)``.  ``north[r, c]`` is the jig on
  the north side of the piece at ``(r, c)``; the piece above shows
  ``iota(north[r, c])`` on its south side.  The last row ``north[n, c]`` is
  the south side of the bottom piece, stored directly.
* ``Carving.west`` has shape ``(n, n + 1)``.  ``west[r, c]`` is the jig on the
  west side of piece ``(r, c)``; the piece to its left shows
  ``iota(west[r, c])`` on its east side.  ``west[r, n]`` is the east side of
  the rightmost piece, stored directly.
* Rotation ``k`` (an element of Z4) turns a piece or the whole grid by
  ``90 * k`` degrees counterclockwise.  A piece ``(N, E, S, W)`` rotated once
  becomes ``(E, S, W, N)``; a grid cell ``(r, c)`` moves to ``(n-1-c, r)``.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

Piece = tuple[int, int, int, int]
Position = tuple[int, int]

N, E, S, W = 0, 1, 2, 3
# unit step (dr, dc) when leaving a cell through side d
STEP = ((-1, 0), (0, 1), (1, 0), (0, -1))


class Symmetry(enum.Enum):
    NONE = "none"
    HALF_TURN = "half_turn"
    QUARTER_TURN = "quarter_turn"


@dataclass(frozen=True)
class JigSystem:
    """Jig alphabet ``1..q`` with the fitting involution ``iota``.

    ``iota[j - 1]`` is the jig type that fits type ``j``.
    """

    q: int
    iota: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        iota = tuple(int(j) for j in self.iota)
        object.__setattr__(self, "iota", iota)
        if len(iota) != self.q:
            raise ValueError(f"iota has {len(iota)} entries, expected {self.q}")
        for j, image in enumerate(iota, start=1):
            if not 1 <= image <= self.q:
                raise ValueError(f"iota({j}) = {image} is outside 1..{self.q}")
            if iota[image - 1] != j:
                raise ValueError(f"iota is not an involution: iota(iota({j})) != {j}")

    @classmethod
    def identity(cls, q: int) -> "JigSystem":
        return cls(q, tuple(range(1, q + 1)))

    def fit(self, j: int) -> int:
        return self.iota[j - 1]

    @property
    def is_edge_matching(self) -> bool:
        return all(self.iota[j] == j + 1 for j in range(self.q))

    @property
    def num_self_fitting(self) -> int:
        return sum(1 for j in range(self.q) if self.iota[j] == j + 1)

    @property
    def table(self) -> np.ndarray:
        """Lookup array with ``table[j] == iota(j)``; index 0 is unused."""
        return np.array((0,) + self.iota, dtype=np.int64)

    def check_type(self, j: int) -> None:
        if not 1 <= j <= self.q:
            raise ValueError(f"jig type {j} is outside 1..{self.q}")


def piece_fits(a: int, b: int, sys: JigSystem) -> bool:
    sys.check_type(a)
    sys.check_type(b)
    return sys.fit(a) == b


def rotate_piece(p: Piece, k: int) -> Piece:
    k %= 4
    return tuple(p[k:] + p[:k])  # type: ignore[return-value]


def piece_symmetry(p: Piece) -> Symmetry:
    if p[0] == p[1] == p[2] == p[3]:
        return Symmetry.QUARTER_TURN
    if p[0] == p[2] and p[1] == p[3]:
        return Symmetry.HALF_TURN
    return Symmetry.NONE


def canonicalize_piece(p: Iterable[int]) -> tuple[Piece, Symmetry]:
    p = tuple(int(x) for x in p)
    if len(p) != 4:
        raise ValueError(f"a piece has four sides, got {len(p)}")
    return min(rotate_piece(p, k) for k in range(4)), piece_symmetry(p)


def piece_orbit(p: Piece) -> list[Piece]:
    seen: list[Piece] = []
    for k in range(4):
        r = rotate_piece(p, k)
        if r not in seen:
            seen.append(r)
    return seen


@dataclass(frozen=True, eq=False)
class Carving:
    """Jig types on all ``2n(n+1)`` piece sides of the planted ``n x n`` grid."""

    n: int
    north: np.ndarray
    west: np.ndarray

    def __post_init__(self):
        north = np.array(self.north, dtype=np.int64)
        west = np.array(self.west, dtype=np.int64)
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if north.shape != (self.n + 1, self.n):
            raise ValueError(f"north has shape {north.shape}, expected {(self.n + 1, self.n)}")
        if west.shape != (self.n, self.n + 1):
            raise ValueError(f"west has shape {west.shape}, expected {(self.n, self.n + 1)}")
        if north.min() < 1 or west.min() < 1:
            raise ValueError("jig types start at 1")
        north.setflags(write=False)
        west.setflags(write=False)
        object.__setattr__(self, "north", north)
        object.__setattr__(self, "west", west)

    def key(self) -> tuple[int, ...]:
        return tuple(self.north.ravel().tolist()) + tuple(self.west.ravel().tolist())

    def __eq__(self, other):
        if not isinstance(other, Carving):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.north, other.north)
            and np.array_equal(self.west, other.west)
        )

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        return f"Carving(n={self.n}, north={self.north.tolist()}, west={self.west.tolist()})"

    def check_types(self, sys: JigSystem) -> None:
        if max(self.north.max(), self.west.max()) > sys.q:
            raise ValueError(f"carving uses jig types above q={sys.q}")

    @property
    def num_values(self) -> int:
        return 2 * self.n * (self.n + 1)


def piece_grid(w: Carving, sys: JigSystem) -> np.ndarray:
    """Sides of every planted piece as an ``(n, n, 4)`` array in N, E, S, W order."""
    n = w.n
    t = sys.table
    grid = np.empty((n, n, 4), dtype=np.int64)
    grid[:, :, N] = w.north[:n, :]
    grid[:, :, W] = w.west[:, :n]
    south = t[w.north[1:, :]]
    south[n - 1, :] = w.north[n, :]
    east = t[w.west[:, 1:]]
    east[:, n - 1] = w.west[:, n]
    grid[:, :, S] = south
    grid[:, :, E] = east
    return grid


def planted_piece(w: Carving, sys: JigSystem, pos: Position) -> Piece:
    r, c = pos
    n = w.n
    north = int(w.north[r, c])
    west = int(w.west[r, c])
    south = int(w.north[r + 1, c]) if r == n - 1 else sys.fit(int(w.north[r + 1, c]))
    east = int(w.west[r, c + 1]) if c == n - 1 else sys.fit(int(w.west[r, c + 1]))
    return (north, east, south, west)


def carving_from_grid(grid: np.ndarray) -> Carving:
    """Inverse of :func:`piece_grid` for a grid whose interior sides all fit.

    Only the north/west sides (plus the south row and east column) are read,
    so fitting must be checked beforehand.
    """
    grid = np.asarray(grid)
    n = grid.shape[0]
    north = np.empty((n + 1, n), dtype=np.int64)
    west = np.empty((n, n + 1), dtype=np.int64)
    north[:n, :] = grid[:, :, N]
    north[n, :] = grid[n - 1, :, S]
    west[:, :n] = grid[:, :, W]
    west[:, n] = grid[:, n - 1, E]
    return Carving(n, north, west)


def rotate_grid(grid: np.ndarray, k: int) -> np.ndarray:
    """Rotate a piece grid by ``90 * k`` degrees counterclockwise."""
    k %= 4
    # np.rot90 moves cell (r, c) to (n-1-c, r); each piece turns with it
    out = np.rot90(grid, k, axes=(0, 1))
    return np.roll(out, -k, axis=2).copy()


def rotate_carving(w: Carving, sys: JigSystem, k: int = 1) -> Carving:
    if k % 4 == 0:
        return w
    return carving_from_grid(rotate_grid(piece_grid(w, sys), k))


def canonical_carving_key(w: Carving, sys: JigSystem) -> tuple[int, ...]:
    """Similarity-class key: the least key over the four global rotations."""
    grid = piece_grid(w, sys)
    return min(carving_from_grid(rotate_grid(grid, k)).key() for k in range(4))


def canonical_carving(w: Carving, sys: JigSystem) -> Carving:
    grid = piece_grid(w, sys)
    rotations = [carving_from_grid(rotate_grid(grid, k)) for k in range(4)]
    return min(rotations, key=Carving.key)


def carving_from_key(n: int, key: tuple[int, ...]) -> Carving:
    split = (n + 1) * n
    north = np.array(key[:split]).reshape(n + 1, n)
    west = np.array(key[split:]).reshape(n, n + 1)
    return Carving(n, north, west)


def similar(w1: Carving, w2: Carving, sys: JigSystem) -> bool:
    if w1.n != w2.n:
        raise ValueError(f"carvings have different sizes: {w1.n} and {w2.n}")
    return any(rotate_carving(w1, sys, k) == w2 for k in range(4))


@dataclass(frozen=True, eq=False)
class PieceBox:
    """Unordered multiset of canonical pieces."""

    n: int
    counts: Mapping[Piece, int]

    def __post_init__(self):
        merged: Counter = Counter()
        for p, m in dict(self.counts).items():
            if m < 0:
                raise ValueError(f"negative multiplicity for {p}")
            if m:
                merged[canonicalize_piece(p)[0]] += int(m)
        total = sum(merged.values())
        if total != self.n * self.n:
            raise ValueError(f"box holds {total} pieces, expected n^2 = {self.n * self.n}")
        object.__setattr__(self, "counts", dict(sorted(merged.items())))

    @classmethod
    def from_pieces(cls, n: int, pieces: Iterable[Iterable[int]]) -> "PieceBox":
        return cls(n, Counter(canonicalize_piece(p)[0] for p in pieces))

    def __eq__(self, other):
        if not isinstance(other, PieceBox):
            return NotImplemented
        return self.n == other.n and self.counts == other.counts

    def __hash__(self):
        return hash((self.n, tuple(self.counts.items())))

    def __iter__(self) -> Iterator[Piece]:
        """Every physical piece, duplicates repeated, in canonical order."""
        for p, m in self.counts.items():
            for _ in range(m):
                yield p

    def __len__(self):
        return self.n * self.n

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True, eq=False)
class Assembly:
    """Placement of (some of) the planted pieces.

    ``cells`` maps a position to ``(origin, rotation)``: the planted position
    of the piece placed there and its rotation relative to the planted
    orientation.  Positions of partial assemblies are free lattice points; a
    complete assembly fills ``{0..n-1}^2`` with every origin exactly once.
    """

    n: int
    cells: Mapping[Position, tuple[Position, int]] = field(default_factory=dict)

    def __post_init__(self):
        cells = {}
        seen = set()
        for pos, (origin, rot) in dict(self.cells).items():
            pos = (int(pos[0]), int(pos[1]))
            origin = (int(origin[0]), int(origin[1]))
            if not (0 <= origin[0] < self.n and 0 <= origin[1] < self.n):
                raise ValueError(f"origin {origin} lies outside the {self.n}x{self.n} grid")
            if origin in seen:
                raise ValueError(f"origin {origin} is placed twice")
            seen.add(origin)
            cells[pos] = (origin, int(rot) % 4)
        object.__setattr__(self, "cells", dict(sorted(cells.items())))

    @classmethod
    def planted(cls, n: int) -> "Assembly":
        return cls(n, {(r, c): ((r, c), 0) for r in range(n) for c in range(n)})

    @classmethod
    def planted_window(cls, n: int, top: int, left: int, height: int, width: int) -> "Assembly":
        return cls(
            n,
            {
                (r, c): ((r, c), 0)
                for r in range(top, top + height)
                for c in range(left, left + width)
            },
        )

    def __eq__(self, other):
        if not isinstance(other, Assembly):
            return NotImplemented
        return self.n == other.n and self.cells == other.cells

    def __hash__(self):
        return hash((self.n, tuple(self.cells.items())))

    def __len__(self):
        return len(self.cells)

    @property
    def footprint(self) -> frozenset[Position]:
        return frozenset(self.cells)

    @property
    def is_complete(self) -> bool:
        n = self.n
        return len(self.cells) == n * n and all(
            0 <= r < n and 0 <= c < n for r, c in self.cells
        )

    def rotated(self, k: int = 1) -> "Assembly":
        """Global rotation of a complete assembly (or of its ``n x n`` frame)."""
        n = self.n
        cells = dict(self.cells)
        for _ in range(k % 4):
            cells = {(n - 1 - c, r): (o, (rot + 1) % 4) for (r, c), (o, rot) in cells.items()}
        return Assembly(n, cells)

    def swapped(self, p1: Position, p2: Position) -> "Assembly":
        cells = dict(self.cells)
        cells[p1], cells[p2] = cells[p2], cells[p1]
        return Assembly(self.n, cells)

    def with_rotation(self, pos: Position, k: int) -> "Assembly":
        cells = dict(self.cells)
        origin, rot = cells[pos]
        cells[pos] = (origin, (rot + k) % 4)
        return Assembly(self.n, cells)


def placed_sides(a: Assembly, grid: np.ndarray, pos: Position) -> Piece:
    """Sides shown by the piece at ``pos`` once rotated, in N, E, S, W order."""
    (orow, ocol), rot = a.cells[pos]
    return rotate_piece(tuple(int(x) for x in grid[orow, ocol]), rot)
