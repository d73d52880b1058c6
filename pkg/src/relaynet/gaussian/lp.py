"""Dense tableau simplex for small ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``."""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError


class UnboundedLP(ArithmeticError):
    pass


def simplex_max(c, A, b, tol: float = 1e-12, max_iter: int = 100_000):
    """Solve a feasible-at-origin LP with Bland's anti-cycling rule.

    Returns
    -------
    value : float
    x : ndarray
        Optimal primal solution.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ArgumentError("inconsistent LP dimensions")
    if np.any(b < 0):
        raise ArgumentError("right-hand side must be non-negative (origin must be feasible)")
    # columns: n decision vars, m slacks, then rhs
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        reduced = tab[m, :-1]
        entering = next((j for j in range(n + m) if reduced[j] < -tol), None)
        if entering is None:
            break
        col = tab[:m, entering]
        ratios = np.full(m, np.inf)
        pos = col > tol
        ratios[pos] = tab[:m, -1][pos] / col[pos]
        if not np.any(pos):
            raise UnboundedLP("objective is unbounded")
        best = ratios.min()
        # Bland: among tied rows pick the smallest basic variable index
        tied = [i for i in range(m) if pos[i] and ratios[i] <= best + tol * max(1.0, abs(best))]
        leave = min(tied, key=lambda i: basis[i])
        tab[leave] /= tab[leave, entering]
        for i in range(m + 1):
            if i != leave and tab[i, entering] != 0:
                tab[i] -= tab[i, entering] * tab[leave]
        basis[leave] = entering
    else:
        raise RuntimeError("simplex iteration limit reached")
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = tab[i, -1]
    return float(tab[m, -1]), x[:n]
