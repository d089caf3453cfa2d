"""Compiled depth-first search used by :func:`randjig.solver.enumerate_solution_carvings`.

The search state lives in plain arrays so that the kernel can stop at each
complete assembly (or when a node chunk runs out) and be resumed later by
the Python driver, which handles dedup, limits and timeouts.
"""

from __future__ import annotations

import numpy as np
import numba

FOUND, EXHAUSTED, PAUSED = 1, 0, 2


@numba.njit(cache=True)
def dfs(
    left, up, fit, width, start, stop, oids, cand_type, cand_w, cand_n, cand_e, cand_s,
    pref, counts, chosen, ptr, state, node_limit,
):
    """Advance the search until a solution, exhaustion or ``node_limit`` nodes.

    ``state`` holds ``[depth, nodes]``.  ``ptr[d] == -2`` means depth ``d``
    has not tried its preferred candidate yet, ``-1`` that it has.
    """
    ncell = left.shape[0]
    d = state[0]
    nodes = state[1]
    if d == ncell:
        # resume after a reported solution
        d -= 1
        counts[cand_type[chosen[d]]] += 1
    while True:
        li = left[d]
        ui = up[d]
        wreq = fit[cand_e[chosen[li]]] if li >= 0 else 0
        nreq = fit[cand_s[chosen[ui]]] if ui >= 0 else 0
        key = wreq * width + nreq
        lo = start[key]
        hi = stop[key]
        p = ptr[d]
        nxt = -1
        if p == -2:
            p = -1
            o = pref[d]
            if (
                o >= 0
                and counts[cand_type[o]] > 0
                and (wreq == 0 or cand_w[o] == wreq)
                and (nreq == 0 or cand_n[o] == nreq)
            ):
                nxt = o
        if nxt < 0:
            p += 1
            while lo + p < hi:
                o = oids[lo + p]
                if o != pref[d] and counts[cand_type[o]] > 0:
                    nxt = o
                    break
                p += 1
        if nxt >= 0:
            if nodes >= node_limit:
                # leave ptr untouched so the same candidate is tried on resume
                state[0] = d
                state[1] = nodes
                return PAUSED
            nodes += 1
            ptr[d] = p
            counts[cand_type[nxt]] -= 1
            chosen[d] = nxt
            d += 1
            if d == ncell:
                state[0] = d
                state[1] = nodes
                return FOUND
            ptr[d] = -2
        else:
            d -= 1
            if d < 0:
                state[0] = 0
                state[1] = nodes
                return EXHAUSTED
            counts[cand_type[chosen[d]]] += 1


class Search:
    """Resumable search over one box (see ``enumerate_solution_carvings``)."""

    def __init__(self, counts, orbits, fit_of, left, up, preferred):
        values = sorted({v for orbit in orbits for sides in orbit for v in sides})
        code = {v: i + 1 for i, v in enumerate(values)}
        m = len(values)
        absent = m + 1
        self.width = m + 2
        # fit[c] is the code of the jig fitting code c; 0 stays the wildcard
        fit = np.zeros(self.width, dtype=np.int64)
        for v, c in code.items():
            fit[c] = code.get(fit_of(v), absent)
        fit[absent] = absent

        sides_list, cand_type = [], []
        for t, orbit in enumerate(orbits):
            for sides in orbit:
                sides_list.append(sides)
                cand_type.append(t)
        cs = np.array([[code[v] for v in s] for s in sides_list], dtype=np.int64)
        self.sides = sides_list
        ncand = len(sides_list)
        buckets: dict[int, list[int]] = {}
        for o in range(ncand):
            nn, ww = cs[o, 0], cs[o, 3]
            for key in (ww * self.width + nn, nn, ww * self.width, 0):
                buckets.setdefault(int(key), []).append(o)
        start = np.zeros(self.width * self.width, dtype=np.int64)
        stop = np.zeros(self.width * self.width, dtype=np.int64)
        flat = []
        for key in sorted(buckets):
            start[key] = len(flat)
            flat.extend(buckets[key])
            stop[key] = len(flat)

        ncell = len(left)
        pref = np.full(ncell, -1, dtype=np.int64)
        if preferred is not None:
            lookup = {s: o for o, s in enumerate(sides_list)}
            for i, s in enumerate(preferred):
                pref[i] = lookup.get(s, -1)

        self.args = [
            np.asarray(left, dtype=np.int64),
            np.asarray(up, dtype=np.int64),
            fit,
            self.width,
            start,
            stop,
            np.array(flat, dtype=np.int64),
            np.array(cand_type, dtype=np.int64),
            cs[:, 3].copy(),
            cs[:, 0].copy(),
            cs[:, 1].copy(),
            cs[:, 2].copy(),
            pref,
        ]
        self.counts = np.array(counts, dtype=np.int64)
        self.chosen = np.zeros(ncell, dtype=np.int64)
        self.ptr = np.full(ncell, -2, dtype=np.int64)
        self.state = np.zeros(2, dtype=np.int64)

    @property
    def nodes(self) -> int:
        return int(self.state[1])

    def run(self, node_limit: int) -> int:
        return dfs(*self.args, self.counts, self.chosen, self.ptr, self.state, node_limit)

    def solution(self):
        return [self.sides[o] for o in self.chosen]
