"""Seeded random corpora shared by the property and acceptance tests."""
from __future__ import annotations

import random

from extfair.generate import random_instance

SIGN_PATTERNS = {
    "goods": ("correlated", "inverse", "positive", "negative", "mixed", "none"),
    "chores": ("correlated", "inverse", "positive", "negative", "mixed", "none"),
    "mixed": ("positive", "negative", "mixed", "none"),
}


def random_corpus(count: int, seed: int = 0, max_agents: int = 3, max_items: int = 6, kinds=None):
    """``count`` instances with sizes n <= max_agents, m <= max_items; kinds cycle if not fixed."""
    rng = random.Random(seed)
    kinds = kinds or ("goods", "chores", "mixed")
    for t in range(count):
        kind = kinds[t % len(kinds)]
        n = rng.randint(1, max_agents)
        m = rng.randint(0, max_items)
        ext = rng.choice(SIGN_PATTERNS[kind])
        yield random_instance(rng, n, m, kind, ext, rng.choice((1, 2, 3, 10)))
