"""
Module with generic helpers.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from typing import List, Tuple

# third-party modules
import numpy as np

# linfsindy modules
from linfsindy.sparse_regression import ObjectiveKind, SparseCoefficients


def sparse_problem(seed: int, n: int = 40, m: int = 8, support_size: int = 2,
                   noise: float = 0.05) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Create a seeded random regression problem y = theta xi + uniform noise with a sparse
    xi whose nonzero entries have a magnitude within [1, 2]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = rng.standard_normal((n, m))
    xi = np.zeros(m)
    support = rng.choice(m, size=support_size, replace=False)
    xi[support] = rng.choice([-1.0, 1.0], size=support_size) * rng.uniform(1.0, 2.0,
                                                                           support_size)
    y = theta @ xi + rng.uniform(-noise, noise, n)
    return theta, y, xi


def coefficients_of(xi_matrix: np.ndarray,
                    kind: ObjectiveKind = ObjectiveKind.L2) -> List[SparseCoefficients]:
    """Wrap the columns of a coefficient matrix into SparseCoefficients."""
    return [SparseCoefficients(xi=xi_matrix[:, k],
                               support=tuple(int(j) for j in np.flatnonzero(xi_matrix[:, k])),
                               objective_value=0.0, objective_kind=kind, lam=0.0)
            for k in range(xi_matrix.shape[1])]


def minimax_line(t: np.ndarray, y: np.ndarray, lo: float = -50.0, hi: float = 50.0,
                 iterations: int = 200) -> float:
    """Brute-force minimax residual of fitting y ~ a + b t. For a fixed slope b the best
    offset is the midrange of y - b t, leaving the convex function (max - min) / 2 of b, which
    is minimized by a ternary search after a dense grid scan."""
    def spread(b: float) -> float:
        r = y - b * t
        return 0.5 * float(np.max(r) - np.min(r))

    grid = np.linspace(lo, hi, 2001)
    best = int(np.argmin([spread(b) for b in grid]))
    left, right = grid[max(best - 1, 0)], grid[min(best + 1, grid.size - 1)]
    for _ in range(iterations):
        m1 = left + (right - left) / 3.0
        m2 = right - (right - left) / 3.0
        if spread(m1) < spread(m2):
            right = m2
        else:
            left = m1
    return spread(0.5 * (left + right))
