"""Exact minimum-weight set cover over a small universe by dynamic programming on bitmasks."""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 22  # cap on (masks x candidate sets) per vectorised step


def min_set_cover(universe: int, sets: list[int], weights: list[int]) -> tuple[int, list[int]] | None:
    """Minimum total weight of sets (bitmasks over ``universe`` bits) covering everything.

    ``g[mask]`` is the cheapest way to cover ``mask``; the set chosen for a mask
    is the cheapest one containing its lowest bit.  Masks are processed in
    groups sharing the lowest bit, from the top bit down, so every lookup hits
    a finished entry.  Ties go to the smallest set index.  Returns
    ``(weight, indices)`` or None when some element lies in no set.
    """
    if universe == 0:
        return 0, []
    full = (1 << universe) - 1
    inf = np.iinfo(np.int64).max // 4
    g = np.full(1 << universe, inf, dtype=np.int64)
    choice = np.full(1 << universe, -1, dtype=np.int64)
    g[0] = 0
    sets_arr = np.array(sets, dtype=np.int64)
    w_arr = np.array(weights, dtype=np.int64)
    for b in range(universe - 1, -1, -1):
        idx = np.nonzero((sets_arr >> b) & 1)[0]
        if idx.size == 0:
            continue  # element b is uncoverable; masks holding it stay infinite
        masks = (np.arange(1 << (universe - b - 1), dtype=np.int64) << (b + 1)) | (1 << b)
        cs = sets_arr[idx]
        cw = w_arr[idx]
        step = max(1, _CHUNK // idx.size)
        for s in range(0, masks.size, step):
            mk = masks[s:s + step]
            rest = mk[:, None] & ~cs[None, :]
            cost = cw[None, :] + g[rest]
            j = np.argmin(cost, axis=1)
            best = cost[np.arange(mk.size), j]
            g[mk] = np.minimum(best, inf)
            choice[mk] = np.where(best < inf, idx[j], -1)
    if g[full] >= inf:
        return None
    out = []
    mask = full
    while mask:
        j = int(choice[mask])
        out.append(j)
        mask &= ~sets[j]
    return int(g[full]), out
