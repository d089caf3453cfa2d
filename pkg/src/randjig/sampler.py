"""Jig systems and uniform random carvings.

Randomness comes from numpy's PCG64 generator.  Child streams for trial
``i`` of a campaign seeded with ``seed`` are built from
``SeedSequence(seed, spawn_key=(i,))`` so serial and parallel runs see the
same numbers.  Streams are reproducible within this package only.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .core import Carving, JigSystem, PieceBox, canonicalize_piece, piece_grid


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def child_rng(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def make_jig_system(q: int, num_self_fitting: int) -> JigSystem:
    """Fix types ``1..s`` and pair the rest as ``s+1<->s+2``, ``s+3<->s+4``, ..."""
    s = num_self_fitting
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    if not 0 <= s <= q:
        raise ValueError(f"num_self_fitting={s} outside 0..{q}")
    if (q - s) % 2:
        raise ValueError(
            f"an involution on {q} types with {s} fixed points needs q - s even"
        )
    iota = list(range(1, s + 1))
    for j in range(s + 1, q + 1, 2):
        iota += [j + 1, j]
    return JigSystem(q, tuple(iota))


def jig_system_of_kind(q: int, kind: str) -> JigSystem:
    """``identity``, ``paired`` (as few fixed points as parity allows) or ``mixed:<s>``."""
    if kind == "identity":
        return make_jig_system(q, q)
    if kind == "paired":
        return make_jig_system(q, q % 2)
    if kind.startswith("mixed:"):
        return make_jig_system(q, int(kind.split(":", 1)[1]))
    raise ValueError(f"unknown jig system kind {kind!r}")


def sample_carving(n: int, sys: JigSystem, rng: np.random.Generator) -> Carving:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    values = rng.integers(1, sys.q + 1, size=2 * n * (n + 1))
    split = (n + 1) * n
    return Carving(n, values[:split].reshape(n + 1, n), values[split:].reshape(n, n + 1))


def sample_carvings(n: int, q: int, count: int, rng: np.random.Generator):
    """Batch of ``count`` carvings as ``(north, west)`` arrays with a leading batch axis."""
    values = rng.integers(1, q + 1, size=(count, 2 * n * (n + 1)), dtype=np.int64)
    split = (n + 1) * n
    return values[:, :split].reshape(count, n + 1, n), values[:, split:].reshape(count, n, n + 1)


def box_of(w: Carving, sys: JigSystem) -> PieceBox:
    grid = piece_grid(w, sys)
    counts = Counter(canonicalize_piece(p)[0] for p in grid.reshape(-1, 4).tolist())
    return PieceBox(w.n, counts)
