"""Independent reference computations used by the tests."""

import itertools

import numpy as np


def vertex_enumeration_max(c, G, h, tol=1e-9):
    """Maximum of ``c @ v`` over the vertices of ``{v : G v <= h}``.

    Solves every ``n``-subset of constraints as an equality system and keeps
    the feasible solutions. Valid for bounded LPs whose ``G`` has full column
    rank. Returns ``(value, argmax)``, or ``(-inf, None)`` without vertices.
    """
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    h = np.asarray(h, float)
    m, n = G.shape
    subsets = np.array(list(itertools.combinations(range(m), n)))
    A = G[subsets]  # (S, n, n)
    b = h[subsets]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-10
    if not np.any(ok):
        return -np.inf, None
    V = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    feasible = np.all(V @ G.T <= h + tol * (1 + np.abs(h)), axis=1)
    if not np.any(feasible):
        return -np.inf, None
    V = V[feasible]
    vals = V @ c
    k = int(np.argmax(vals))
    return float(vals[k]), V[k]


def random_bounded_lp(rng, n_vars=None, n_cons=None):
    """Random ``(c, G, h)`` that is feasible and bounded by construction.

    ``h = G v0 + positive`` makes ``v0`` strictly feasible and
    ``c = G.T w`` with ``w >= 0`` bounds the objective by ``w @ h``.
    """
    n = n_vars or int(rng.integers(1, 7))
    m = n_cons or int(rng.integers(n + 1, 13))
    G = rng.standard_normal((m, n))
    v0 = rng.standard_normal(n)
    h = G @ v0 + rng.uniform(0.1, 1.0, m)
    w = rng.uniform(0.0, 1.0, m) * (rng.uniform(size=m) < 0.7)
    if not np.any(w):
        w[0] = 1.0
    c = G.T @ w
    return c, G, h
