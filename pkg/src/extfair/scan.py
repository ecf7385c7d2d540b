"""Exhaustive reductions over all n**m allocations of a scaled view.

Each reduction is order independent across enumeration blocks, and ties are
always resolved toward the smallest allocation index, so threaded and
sequential runs agree.
"""
from __future__ import annotations

import enum

import numpy as np

from .core import Unsupported, allocation_count, map_blocks
from .views import ScaledView

#: Tables up to this many rows are materialized and cached on the view.
CACHE_ROWS = 1 << 21


class Objective(enum.Enum):
    MUW = "muw"
    MEW = "mew"
    LEXIMIN = "leximin"
    MNW = "mnw"


def own_blocks(view: ScaledView, threads: int = 1) -> list[tuple[int, np.ndarray]]:
    """[(lo, table)] covering every allocation; table[r, i] = own value of agent i."""
    total = allocation_count(view.n, view.m)
    if total <= CACHE_ROWS:
        return [(0, view.own_table)]
    return map_blocks(lambda lo, a: (lo, view.own_values(a)), view.n, view.m, threads)


def _key_rows(table: np.ndarray, objective: Objective) -> np.ndarray:
    """Per-row comparison keys as a 2-D array compared lexicographically."""
    if objective is Objective.MUW:
        return table.sum(axis=1, dtype=table.dtype).reshape(-1, 1)
    if objective is Objective.MEW:
        return table.min(axis=1).reshape(-1, 1)
    if objective is Objective.LEXIMIN:
        return np.sort(table, axis=1)
    if objective is Objective.MNW:
        obj = table.astype(object)
        pos = obj > 0
        count = pos.sum(axis=1).astype(object)
        prod = np.where(pos, obj, 1).prod(axis=1)
        return np.stack([count, prod], axis=1)
    raise Unsupported(objective)


def _lex_best(keys: np.ndarray) -> np.ndarray:
    """Row indices whose key is lexicographically maximal."""
    cand = np.arange(len(keys))
    for c in range(keys.shape[1]):
        col = keys[cand, c]
        cand = cand[col == col.max()]
    return cand


def optimum(view: ScaledView, objective: Objective, threads: int = 1) -> tuple[int, tuple]:
    """(first optimal allocation index, optimal key), memoized on the view."""
    key = ("optimum", objective)
    hit = view._cache.get(key)
    if hit is None:
        hit = view._cache[key] = _optimum(view, objective, threads)
    return hit


def _optimum(view: ScaledView, objective: Objective, threads: int) -> tuple[int, tuple]:
    best_idx, best_key = None, None
    for lo, table in own_blocks(view, threads):
        if len(table) == 0:
            continue
        keys = _key_rows(table, objective)
        cand = _lex_best(keys)
        key = tuple(keys[cand[0]].tolist())
        if best_key is None or key > best_key:
            best_idx, best_key = lo + int(cand[0]), key
    return best_idx, best_key


def optimal_indices(view: ScaledView, objective: Objective, threads: int = 1) -> list[int]:
    """Every allocation index attaining the optimum, ascending."""
    _, best_key = optimum(view, objective, threads)
    out: list[int] = []
    for lo, table in own_blocks(view, threads):
        keys = _key_rows(table, objective)
        hit = np.all(keys == np.array(best_key, dtype=keys.dtype), axis=1)
        out.extend((lo + np.flatnonzero(hit)).tolist())
    return out


def key_of(values, objective: Objective) -> tuple:
    row = np.array([values], dtype=object)
    return tuple(_key_rows(row, objective)[0].tolist())


def first_dominating(view: ScaledView, own: list[int], threads: int = 1) -> int | None:
    """Smallest allocation index Pareto-dominating the own-value vector ``own``."""
    u = np.array(own, dtype=object)
    for lo, table in own_blocks(view, threads):
        if table.dtype != object:
            uu = u.astype(table.dtype)
        else:
            uu = u
        dom = np.all(table >= uu, axis=1) & np.any(table > uu, axis=1)
        hit = np.flatnonzero(dom)
        if len(hit):
            return lo + int(hit[0])
    return None
