"""Rademacher-average machinery and the R-bound estimator.

With exponent p = 2 fixed (licensed by the Kahane equivalence of
exponents), the squared Rademacher average of sums of Hilbert-space
vectors has the closed form sum ||v_j||^2; the exact enumeration over
sign vectors is kept as an independently computable path and the two are
cross-checked in the tests.

The estimated bounds are finite-grid regression baselines: the discrete
norms live on a periodic half-box, not the continuum half-space, so the
numbers are internal references, not the paper-level constants.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import StepOutsideSector, ZeroDenominator
from .model import DerivedConstants, MaterialParams, Sector, derive_constants
from .resolvent import (FullData, HalfGeometry, random_full_data,
                        solve_gamma_zero)

FAMILIES = ("S_A", "T_B", "S_A_dlambda", "T_B_dlambda")


def worker_count() -> int:
    env = os.environ.get("KORTEWEG_THREADS", "1")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Rademacher averages
# ---------------------------------------------------------------------------

def _as_block_vector(x):
    """Flatten a field tuple/array into one complex vector."""
    if isinstance(x, (tuple, list)):
        return np.concatenate([np.asarray(b, dtype=complex).ravel()
                               for b in x])
    return np.asarray(x, dtype=complex).ravel()


def rademacher_mean_sq(vectors, weights=None, mode: str = "exact",
                       rng=None, draws: int = 10_000):
    """E || sum_j eps_j v_j ||^2 over uniform sign vectors.

    ``vectors`` is a list of equal-length 1-d arrays; ``weights`` an
    optional per-coordinate quadrature weight.  exact mode enumerates all
    2^m sign patterns (m <= 10); montecarlo averages over ``draws``
    random patterns.
    """
    m = len(vectors)
    stack = np.stack(vectors)
    w = np.ones(stack.shape[1]) if weights is None else weights
    if mode == "exact":
        if m > 10:
            raise ValueError("exact enumeration capped at m = 10")
        total = 0.0
        for signs in itertools.product((1.0, -1.0), repeat=m):
            s = np.asarray(signs) @ stack
            total += float(np.sum(np.abs(s) ** 2 * w))
        return total / 2 ** m
    if mode == "montecarlo":
        rng = np.random.default_rng(0) if rng is None else rng
        signs = rng.choice([1.0, -1.0], size=(draws, m))
        total = 0.0
        for chunk in np.array_split(signs, max(1, draws // 512)):
            s = chunk @ stack
            total += float(np.sum(np.abs(s) ** 2 * w))
        return total / draws
    raise ValueError(f"unknown mode {mode!r}")


def rademacher_closed_form(vectors, weights=None):
    """sum_j ||v_j||^2: the orthogonality value the average must match."""
    w = 1.0 if weights is None else weights
    return float(sum(np.sum(np.abs(v) ** 2 * w) for v in vectors))


def rademacher_ratio(outputs, inputs, out_weights=None, in_weights=None,
                     mode: str = "exact", rng=None, draws: int = 10_000):
    """Ratio of Rademacher-averaged norms, outputs over inputs.

    outputs[j] is the flattened weighted-block vector T_j f_j; inputs[j]
    the flattened data-block vector of f_j.  For m = 1 this reduces to a
    plain operator-norm sample.
    """
    denom = rademacher_mean_sq(inputs, in_weights, mode, rng, draws)
    if denom == 0.0:
        raise ZeroDenominator("all inputs vanish")
    numer = rademacher_mean_sq(outputs, out_weights, mode, rng, draws)
    return float(np.sqrt(numer / denom))


# ---------------------------------------------------------------------------
# operator families
# ---------------------------------------------------------------------------

def _solution_block_vector(sol, geometry: HalfGeometry):
    w = geometry.normal_weights()
    cell = geometry.tangential.cell_measure()
    blocks = list(sol.s_blocks()) + list(sol.t_blocks())
    flat = []
    wts = []
    for b in blocks:
        arr = np.asarray(b, dtype=complex)
        flat.append(arr.ravel())
        wts.append(np.broadcast_to(w * cell, arr.shape).ravel())
    return np.concatenate(flat), np.concatenate(wts)


def _data_block_vector(data: FullData, lam: complex):
    geo = data.geometry
    from .resolvent import data_blocks
    blocks = data_blocks(data, lam)
    w = geo.normal_weights()
    cell = geo.tangential.cell_measure()
    flat, wts = [], []
    for b in blocks:
        arr = np.asarray(b, dtype=complex)
        flat.append(arr.ravel())
        wts.append(np.broadcast_to(w * cell, arr.shape).ravel())
    return np.concatenate(flat), np.concatenate(wts)


def lambda_derivative_family(apply_op, lam: complex, sector: Sector | None
                             = None, rel_step: float = 1e-5):
    """lam d/dlam of an operator value by radial central differences.

    ``apply_op`` maps lam to a flat complex vector; Richardson
    extrapolation once.  The step direction lam/(|lam|) keeps the
    perturbed points at the same argument, so only the modulus floor can
    be violated.
    """
    def check(z):
        if sector is not None and not sector.contains(z):
            raise StepOutsideSector(f"{z} leaves the sector")
        return z

    def d(eps):
        up = apply_op(check(lam * (1 + eps)))
        dn = apply_op(check(lam * (1 - eps)))
        return (up - dn) / (2 * eps)

    return (4.0 * d(rel_step / 2) - d(rel_step)) / 3.0


def family_apply(family_id: str, data: FullData, lam: complex,
                 p: MaterialParams, dc: DerivedConstants,
                 sector: Sector | None = None):
    """Evaluate one family member on one datum; returns (vec, weights).

    S_A collects the density blocks, T_B the velocity blocks; the
    dlambda variants apply the radial derivative to the end-to-end map.
    """
    geo = data.geometry
    if family_id in ("S_A", "T_B"):
        sol = solve_gamma_zero(data, lam, p, dc)
        blocks = sol.s_blocks() if family_id == "S_A" else sol.t_blocks()
        w = geo.normal_weights()
        cell = geo.tangential.cell_measure()
        flat, wts = [], []
        for b in blocks:
            arr = np.asarray(b, dtype=complex)
            flat.append(arr.ravel())
            wts.append(np.broadcast_to(w * cell, arr.shape).ravel())
        return np.concatenate(flat), np.concatenate(wts)
    if family_id in ("S_A_dlambda", "T_B_dlambda"):
        which = "S_A" if family_id.startswith("S_A") else "T_B"

        def apply_op(z):
            vec, _ = family_apply(which, data, z, p, dc)
            return vec

        vec = lambda_derivative_family(apply_op, lam, sector)
        return vec, family_weights(which, geo)
    raise ValueError(f"unknown family {family_id!r}")


def family_weights(family_id: str, geometry: HalfGeometry):
    """Quadrature weights of the flattened output blocks (no solve)."""
    n = geometry.dim
    if family_id in ("S_A", "S_A_dlambda"):
        counts = [n ** 3, n ** 2, 1]
    else:
        counts = [n ** 3, n ** 2, n]
    w = geometry.normal_weights()
    cell = geometry.tangential.cell_measure()
    base = np.broadcast_to(w * cell, geometry.half_shape).ravel()
    return np.concatenate([np.tile(base, c) for c in counts])


@dataclass(frozen=True)
class RBoundEstimate:
    family_id: str
    p_exponent: int
    m_max: int
    trials: int
    estimated_bound: float
    sigma: float
    delta: float
    seed: int

    def to_json(self):
        return {"family_id": self.family_id, "p": self.p_exponent,
                "m_max": self.m_max, "trials": self.trials,
                "estimated_bound": self.estimated_bound,
                "sigma": self.sigma, "delta": self.delta, "seed": self.seed}


def estimate_rbound(family_id: str, sector: Sector, p: MaterialParams,
                    geometry: HalfGeometry, m_max: int = 8,
                    trials: int = 200, seed: int = 0,
                    dc: DerivedConstants | None = None,
                    lam_hi: float | None = None,
                    threads: int | None = None,
                    return_ratios: bool = False):
    """Max over trials of the Rademacher ratio on random sector draws.

    Each trial draws m <= m_max sector points and data; trial t uses the
    RNG seeded by (seed, t), so the estimate is reproducible under any
    execution schedule and monotone nondecreasing in ``trials``.
    """
    dc = derive_constants(p) if dc is None else dc
    hi = lam_hi if lam_hi is not None else max(100.0 * max(sector.delta,
                                                           1.0), 1e3)

    def one_trial(t: int) -> float:
        rng = np.random.default_rng((seed, t))
        m = int(rng.integers(1, m_max + 1))
        lams = sector.sample(rng, m, lam_hi=hi)
        outs, ins = [], []
        out_w = in_w = None
        for lam in lams:
            data = random_full_data(geometry, rng)
            vec, out_w = family_apply(family_id, data, complex(lam), p, dc,
                                      sector)
            outs.append(vec)
            dvec, in_w = _data_block_vector(data, complex(lam))
            ins.append(dvec)
        # p = 2 with Hilbert norms: the exact average is the closed form
        numer = sum(float(np.sum(np.abs(v) ** 2 * out_w)) for v in outs)
        denom = sum(float(np.sum(np.abs(v) ** 2 * in_w)) for v in ins)
        if denom == 0.0:
            raise ZeroDenominator("all trial inputs vanish")
        return float(np.sqrt(numer / denom))

    n_workers = worker_count() if threads is None else threads
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            ratios = list(pool.map(one_trial, range(trials)))
    else:
        ratios = [one_trial(t) for t in range(trials)]
    est = RBoundEstimate(family_id=family_id, p_exponent=2, m_max=m_max,
                         trials=trials, estimated_bound=float(max(ratios)),
                         sigma=sector.sigma, delta=sector.delta, seed=seed)
    if return_ratios:
        return est, ratios
    return est


def spearman_rho(xs, ys) -> float:
    """Spearman rank correlation (ties broken by order; none expected)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    rx = np.argsort(np.argsort(xs)).astype(float)
    ry = np.argsort(np.argsort(ys)).astype(float)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.sum(rx * ry) / np.sqrt(np.sum(rx ** 2) * np.sum(ry ** 2)))
