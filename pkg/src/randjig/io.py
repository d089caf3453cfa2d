"""JSON puzzle and box files, and the sweep CSV."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Carving, JigSystem, PieceBox, canonicalize_piece
from .experiments import SWEEP_COLUMNS, TrialStats, stats_row

FORMAT_VERSION = 1
PUZZLE_FIELDS = {"format_version", "n", "q", "iota", "north", "west", "seed"}
BOX_FIELDS = {"format_version", "n", "pieces"}


class PuzzleFormatError(ValueError):
    """Base class for file read errors."""


class MalformedFileError(PuzzleFormatError):
    pass


class VersionMismatchError(PuzzleFormatError):
    pass


class InvolutionError(PuzzleFormatError):
    pass


class ShapeError(PuzzleFormatError):
    pass


class UnknownFieldError(PuzzleFormatError):
    pass


class BoxCountError(PuzzleFormatError):
    pass


class NormalizationWarning(UserWarning):
    pass


@dataclass
class PuzzleFile:
    carving: Carving
    sys: JigSystem
    seed: int | None = None


def _load(path, allowed: set[str], strict: bool) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise MalformedFileError(f"{path}: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format_version {version!r}, expected {FORMAT_VERSION}")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        if strict:
            raise UnknownFieldError(f"{path}: unknown fields {unknown}")
        warnings.warn(f"{path}: ignoring unknown fields {unknown}", stacklevel=3)
    return doc


def _int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise MalformedFileError(f"field {key!r} must be an integer, got {v!r}")
    return v


def _matrix(doc: dict, key: str, shape: tuple[int, int], q: int) -> np.ndarray:
    v = doc.get(key)
    if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
        raise MalformedFileError(f"field {key!r} must be a list of rows")
    if len(v) != shape[0] or any(len(row) != shape[1] for row in v):
        got = (len(v), len(v[0]) if v else 0)
        raise ShapeError(f"{key} has shape {got}, expected {shape}")
    if not all(isinstance(x, int) and not isinstance(x, bool) for row in v for x in row):
        raise MalformedFileError(f"{key} entries must be integers")
    arr = np.array(v, dtype=np.int64).reshape(shape)
    if arr.size and (arr.min() < 1 or arr.max() > q):
        raise MalformedFileError(f"{key} entries must lie in 1..{q}")
    return arr


def write_puzzle(path, w: Carving, sys: JigSystem, seed: int | None = None) -> None:
    w.check_types(sys)
    doc = {
        "format_version": FORMAT_VERSION,
        "n": w.n,
        "q": sys.q,
        "iota": list(sys.iota),
        "north": w.north.tolist(),
        "west": w.west.tolist(),
    }
    if seed is not None:
        doc["seed"] = int(seed)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_puzzle_file(path, strict: bool = True) -> PuzzleFile:
    doc = _load(path, PUZZLE_FIELDS, strict)
    n, q = _int(doc, "n"), _int(doc, "q")
    if n < 1 or q < 1:
        raise MalformedFileError("n and q must be positive")
    iota = doc.get("iota")
    if not isinstance(iota, list) or not all(isinstance(x, int) for x in iota):
        raise MalformedFileError("iota must be a list of integers")
    try:
        sys = JigSystem(q, tuple(iota))
    except ValueError as exc:
        raise InvolutionError(str(exc)) from exc
    north = _matrix(doc, "north", (n + 1, n), q)
    west = _matrix(doc, "west", (n, n + 1), q)
    seed = doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise MalformedFileError("seed must be an integer")
    return PuzzleFile(Carving(n, north, west), sys, seed)


def read_puzzle(path, strict: bool = True) -> tuple[Carving, JigSystem]:
    pf = read_puzzle_file(path, strict)
    return pf.carving, pf.sys


def write_box(path, box: PieceBox) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "n": box.n,
        "pieces": [{"piece": list(p), "count": m} for p, m in box.counts.items()],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_box(path, strict: bool = True) -> PieceBox:
    doc = _load(path, BOX_FIELDS, strict)
    n = _int(doc, "n")
    entries = doc.get("pieces")
    if not isinstance(entries, list):
        raise MalformedFileError("pieces must be a list")
    counts: dict = {}
    for e in entries:
        if not isinstance(e, dict) or set(e) != {"piece", "count"}:
            raise MalformedFileError(f"bad box entry {e!r}")
        p, m = e["piece"], e["count"]
        if not (isinstance(p, list) and len(p) == 4 and all(isinstance(x, int) and x >= 1 for x in p)):
            raise MalformedFileError(f"piece must be four positive integers, got {p!r}")
        if not isinstance(m, int) or m < 1:
            raise MalformedFileError(f"count must be a positive integer, got {m!r}")
        canon, _ = canonicalize_piece(p)
        if canon != tuple(p):
            warnings.warn(f"piece {p} normalised to {list(canon)}", NormalizationWarning, stacklevel=2)
        counts[canon] = counts.get(canon, 0) + m
    total = sum(counts.values())
    if total != n * n:
        raise BoxCountError(f"box holds {total} pieces, expected n^2 = {n * n}")
    return PieceBox(n, counts)


def format_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def sweep_csv(rows: list[TrialStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for s in rows:
        writer.writerow([format_cell(x) for x in stats_row(s)])
    return buf.getvalue()


def write_sweep_csv(path, rows: list[TrialStats]) -> None:
    Path(path).write_text(sweep_csv(rows), encoding="utf-8")


def stats_json(s: TrialStats) -> dict:
    d = dict(zip(SWEEP_COLUMNS, stats_row(s)))
    d.update(
        seed=s.seed,
        multiple_rate=s.multiple_rate,
        budget=s.budget,
        wilson_ci={k: list(v) for k, v in s.wilson_ci.items()},
    )
    return d
