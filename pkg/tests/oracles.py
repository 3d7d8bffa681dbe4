"""Independent oracles used to freeze expected values.

Nothing here calls into ``starban`` or into any SVD routine.
"""

import numpy as np


def _h(a):
    return np.conj(np.swapaxes(a, -1, -2))


def decomposition_search(t, restarts=10_000, rank=None, iters=400, step=0.25, seed=0):
    """Smallest ``sum |x_k| |y_k|`` found over exact decompositions ``t = X @ Yt``.

    ``X`` is n x r (n <= m after transposing, r = n + 1 by default) and
    ``Yt = X^H (X X^H)^{-1} t`` is the min-norm completion, so every iterate
    reconstructs ``t`` exactly. Each restart draws a random complex ``X`` and
    runs gradient descent on ``(|X|^2 + |Yt|^2) / 2``, which bounds the
    decomposition cost from above.

    Returns ``(best_cost, residual_of_best)``.
    """
    t = np.asarray(t, dtype=complex)
    if t.shape[0] > t.shape[1]:
        t = t.T
    n, m = t.shape
    r = rank or n + 1
    scale = np.linalg.norm(t)
    if scale == 0:
        return 0.0, 0.0
    u = t / scale
    rng = np.random.default_rng(seed)
    best, best_res = np.inf, np.inf
    batch = 1000
    for start in range(0, restarts, batch):
        size = min(batch, restarts - start)
        ub = np.broadcast_to(u, (size, n, m))
        x = (rng.normal(size=(size, n, r)) + 1j * rng.normal(size=(size, n, r))) / np.sqrt(2 * r)
        for _ in range(iters):
            ginv_u = np.linalg.solve(x @ _h(x), ub)
            mx = ginv_u @ (_h(ginv_u) @ x)
            x = x - step * (x - mx)
        yt = _h(x) @ np.linalg.solve(x @ _h(x), ub)
        cost = scale * np.sum(np.linalg.norm(x, axis=1) * np.linalg.norm(yt, axis=2), axis=1)
        residual = scale * np.linalg.norm(x @ yt - ub, axis=(1, 2))
        cost = np.where(residual < 1e-9, cost, np.inf)
        k = int(np.argmin(cost))
        if cost[k] < best:
            best, best_res = float(cost[k]), float(residual[k])
    return best, best_res


def sphere_ratio_max(a, dom_norm, cod_norm, samples=20_000, seed=0):
    """Max of ``cod_norm(a v) / dom_norm(v)`` over random complex ``v`` plus the
    coordinate axes: a brute-force lower bound on an operator norm."""
    a = np.asarray(a, dtype=complex)
    rng = np.random.default_rng(seed)
    n = a.shape[1]
    vs = list(np.eye(n, dtype=complex))
    vs += list(rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n)))
    return max(cod_norm(a @ v) / dom_norm(v) for v in vs)
