"""Lawson-Hanson active-set non-negative least squares.

Two front ends share the same active-set loop: :func:`nnls` works on the
design matrix directly, :func:`nnls_gram` on the normal equations
``G = A.T @ A``, ``h = A.T @ b``.  The Gram form is what the fitting inner
loop uses, since ``G`` is tiny (one row/column per force term) no matter how
many observations there are.
"""

from __future__ import annotations

import numpy as np

from ..errors import MaxIterations, ValidationError


def _active_set(n, gradient, solve, tol, maxiter):
    """Core Lawson-Hanson iteration.

    ``gradient(x)`` returns the negative gradient ``A.T (b - A x)``;
    ``solve(P)`` returns the unconstrained least-squares solution restricted
    to the boolean column mask ``P``.
    """
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    # columns whose entry failed numerically; cleared whenever x moves
    stalled = np.zeros(n, dtype=bool)
    w = gradient(x)
    it = 0
    while np.any((w > tol) & ~passive & ~stalled):
        j = np.argmax(np.where(passive | stalled, -np.inf, w))
        passive[j] = True
        first = True
        while True:
            it += 1
            if it > maxiter:
                raise MaxIterations(f"NNLS did not converge in {maxiter} iterations")
            z = np.zeros(n)
            z[passive] = solve(passive)
            if first and z[j] <= 0:
                passive[j] = False
                stalled[j] = True
                break
            first = False
            stalled[:] = False
            if np.all(z[passive] > 0):
                x = z
                break
            # step back to the feasible boundary and drop the blocking columns
            blocking = passive & (z <= 0)
            alpha = np.min(x[blocking] / (x[blocking] - z[blocking]))
            x = x + alpha * (z - x)
            passive &= x > tol
            x[~passive] = 0.0
            if not passive.any():
                break
        w = gradient(x)
    return x


def nnls(A, b, maxiter=None, tol=None):
    """Solve ``min ||A x - b||^2`` subject to ``x >= 0``.

    Parameters
    ----------
    A : (m, n) array_like
    b : (m,) array_like
    maxiter : int, optional
        Inner iteration cap (default ``30 * n``).
    tol : float, optional
        Dual feasibility tolerance (default scales with ``eps``, the problem
        size and the magnitudes of ``A`` and ``b``).

    Returns
    -------
    x : (n,) ndarray
    rss : float
        Residual sum of squares ``||A x - b||^2``.

    Raises
    ------
    MaxIterations
        If the active set cycles (numerically degenerate columns).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[1] < 1 or b.shape != (A.shape[0],):
        raise ValidationError(f"incompatible shapes A{A.shape}, b{b.shape}")
    n = A.shape[1]
    if tol is None:
        scale = max(1.0, np.abs(A).max(initial=0.0)) * max(1.0, np.abs(b).max(initial=0.0))
        tol = 10 * np.finfo(float).eps * max(A.shape) * scale
    x = _active_set(
        n,
        lambda x: A.T @ (b - A @ x),
        lambda P: np.linalg.lstsq(A[:, P], b, rcond=None)[0],
        tol,
        maxiter or 30 * n,
    )
    r = A @ x - b
    return x, float(r @ r)


def nnls_gram(G, h, bb, maxiter=None, tol=None):
    """NNLS from the normal equations.

    Parameters
    ----------
    G : (n, n) array, ``A.T @ A``
    h : (n,) array, ``A.T @ b``
    bb : float, ``b @ b``

    Returns
    -------
    x : (n,) ndarray
    rss : float
        ``bb - 2 x.h + x.G.x``, floored at zero.
    """
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    n = len(h)
    if tol is None:
        tol = 1e3 * np.finfo(float).eps * max(1.0, np.abs(G).max(initial=0.0), np.abs(h).max(initial=0.0))

    def solve(P):
        GP = G[np.ix_(P, P)]
        try:
            return np.linalg.solve(GP, h[P])
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(GP, h[P], rcond=None)[0]

    x = _active_set(n, lambda x: h - G @ x, solve, tol, maxiter or 30 * n)
    rss = bb - 2.0 * (x @ h) + x @ G @ x
    return x, max(float(rss), 0.0)
