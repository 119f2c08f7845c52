"""Diagnostics for fitted direction models."""

from __future__ import annotations

import numpy as np

from ..errors import TooFewRows
from ..extraction import DesignRows


def fisher_lee(a, b) -> float:
    """Fisher-Lee circular-circular correlation of paired angle samples.

    Uses the O(n) closed form of the pairwise definition
    ``sum_{i<j} sin(a_i - a_j) sin(b_i - b_j)`` normalised by the
    corresponding sums of squares.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    num = 4.0 * (np.sum(ca * cb) * np.sum(sa * sb) - np.sum(ca * sb) * np.sum(sa * cb))
    den_a = n * n - np.sum(np.cos(2 * a)) ** 2 - np.sum(np.sin(2 * a)) ** 2
    den_b = n * n - np.sum(np.cos(2 * b)) ** 2 - np.sum(np.sin(2 * b)) ** 2
    den = np.sqrt(den_a * den_b)
    return float(num / den) if den > 0 else float("nan")


def cm_direction_correlation(rows: DesignRows, associate_id) -> float:
    """Circular correlation between the group's mean direction and the
    direction to one associate, over rows where both are defined."""
    j = rows.associate_ids.index(str(associate_id))
    a, b = rows.cm, rows.assoc_dir[:, j]
    ok = np.isfinite(a) & np.isfinite(b)
    if ok.sum() < 3:
        raise TooFewRows(f"only {int(ok.sum())} rows with both directions defined; need 3")
    return fisher_lee(a[ok], b[ok])
