"""
Random instances shared by the property tests
"""

import numpy as np

from src.capacity.renewal_core import InterarrivalPmf
from src.capacity.reward_process import RewardTable


def random_pmf(rng: np.random.Generator, max_k: int = 6) -> InterarrivalPmf:
    K = int(rng.integers(1, max_k + 1))
    probs = rng.dirichlet(np.ones(K))
    return InterarrivalPmf(tuple(np.concatenate(([0.0], probs))))


def random_table(rng: np.random.Generator, max_k: int = 4, max_states: int = 2) -> RewardTable:
    """Random table whose largest interarrival always carries mass"""
    K = int(rng.integers(1, max_k + 1))
    rows = []
    for k in range(1, K + 1):
        if k < K and rng.random() < 0.2:
            continue
        states = int(rng.integers(1, max_states + 1)) if k < K else 1
        for s in range(states):
            rows.append([k, f"s{s}", 0.0, float(rng.uniform(0.0, 3.0))])
    probs = rng.dirichlet(np.ones(len(rows)))
    for row, p in zip(rows, probs):
        row[2] = float(p)
    return RewardTable.from_rows(rows)
