"""Synthetic design rows with a known generating model."""

import numpy as np

from forcematch import DesignRows


def make_rows(n=400, m=4, seed=0, alpha_iid=60.0, alpha_da=0.5, beta_prev=1.0, beta_cm=1.5,
              beta_assoc=None, alpha_sd=5.0, noise=0.05, focal="f"):
    """Rows whose observed heading follows the gated model plus angular noise.

    Associates sit at random ranges (1-40 m) in a direction cone whose
    width varies per row, so DA and IID span the gate values.
    """
    rng = np.random.default_rng(seed)
    ids = [str(j + 1) for j in range(m)]
    centre = rng.uniform(-np.pi, np.pi, size=(n, 1))
    spread = rng.uniform(0.1, np.pi, size=(n, 1))
    dirs = np.angle(np.exp(1j * (centre + rng.uniform(-1, 1, size=(n, m)) * spread)))
    dist = rng.uniform(1.0, 40.0, size=(n, m))
    previous = rng.uniform(-np.pi, np.pi, size=n)
    rows = DesignRows(focal, ids, t=np.arange(n, dtype=float), observed=np.zeros(n), previous=previous,
                      dt_next=np.ones(n), dt_prev=np.ones(n), da=np.zeros(n), iid=np.zeros(n),
                      cm=np.zeros(n), assoc_dir=dirs, assoc_dist=dist)
    da, total, cm = rows.recompute_geometry()
    rows.da, rows.iid, rows.cm = da, total, cm
    vx = beta_prev * np.cos(previous)
    vy = beta_prev * np.sin(previous)
    on = (total > alpha_iid) & (da > alpha_da)
    vx = vx + on * beta_cm * np.cos(cm)
    vy = vy + on * beta_cm * np.sin(cm)
    for j, b in enumerate(beta_assoc or []):
        near = dist[:, j] > alpha_sd
        vx = vx + near * b * np.cos(dirs[:, j])
        vy = vy + near * b * np.sin(dirs[:, j])
    rows.observed = np.angle(np.exp(1j * (np.arctan2(vy, vx) + noise * rng.normal(size=n))))
    return rows


def scaled(rows, c):
    """Copy of ``rows`` with every distance multiplied by ``c``."""
    out = rows.take(np.arange(len(rows)))
    out.iid = rows.iid * c
    out.assoc_dist = rows.assoc_dist * c
    return out
