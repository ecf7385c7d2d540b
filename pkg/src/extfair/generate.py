"""Seeded random instances with a requested sign pattern."""
from __future__ import annotations

import random
from fractions import Fraction

from .core import Instance2D

KINDS = ("goods", "chores", "mixed")
EXTERNALITIES = ("correlated", "inverse", "positive", "negative", "mixed", "none")


def _externality_sign(kind: str, externality: str) -> int | None:
    """+1 / -1 for a forced v' sign, 0 for no externality, None for free signs."""
    if externality in ("correlated", "inverse"):
        if kind == "mixed":
            raise ValueError(f"{externality} externality needs goods or chores")
        same = externality == "correlated"
        goods = kind == "goods"
        return 1 if same == goods else -1
    return {"positive": 1, "negative": -1, "none": 0, "mixed": None}[externality]


def _magnitude(rng: random.Random, max_den: int, top: int = 10) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, top * den), den)


def random_instance(rng: random.Random | int, n: int, m: int, kind: str = "goods",
                    externality: str = "mixed", max_den: int = 1) -> Instance2D:
    """v' gets the externality's sign, w = v - v' the kind's sign; denominators <= max_den."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if externality not in EXTERNALITIES:
        raise ValueError(f"unknown externality {externality!r}")
    if n < 1 or m < 0 or max_den < 1:
        raise ValueError("need n >= 1, m >= 0 and max_den >= 1")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    ext = _externality_sign(kind, externality)
    v, vp = [], []
    for _ in range(n):
        rv, rp = [], []
        for _ in range(m):
            w = _magnitude(rng, max_den)
            if kind == "chores" or (kind == "mixed" and rng.random() < 0.5):
                w = -w
            p = _magnitude(rng, max_den) if ext != 0 else Fraction(0)
            if ext == -1 or (ext is None and rng.random() < 0.5):
                p = -p
            rv.append(p + w)
            rp.append(p)
        v.append(rv)
        vp.append(rp)
    return Instance2D(v, vp)
