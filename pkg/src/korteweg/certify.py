"""Lower-bound scans and multiplier-class certification.

A scan samples a sector grid (log-spaced moduli times angles), evaluates a
target quantity and reports the infimum of ``|target| / scaling``.  The
scaling encodes the claimed homogeneous lower bound; a strictly positive,
refinement-stable infimum is the numerical certificate.

Multiplier certification checks the derivative bounds defining the order-s
classes (type 1: (|lam|^{1/2}+|xi'|)^{s-|a|}; type 2: the same power of s
with |xi'|^{-|a|}) by nested Richardson-extrapolated central differences in
xi' and a relative central difference for the lam d/dlam factor.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DerivativeStepUnderflow, EmptyGrid
from .model import DerivedConstants, MaterialParams, Sector, derive_constants
from .symbols import frak_symbols, lopatinskii, roots_t, whole_space_symbol_P

SCAN_TARGETS = ("P", "l1", "l2", "re_omega", "re_t1", "re_t2", "detL")


@dataclass(frozen=True)
class GridSpec:
    """Sector sampling density: moduli are log-spaced, angles uniform."""

    n_lambda: int = 40
    n_theta: int = 9
    n_xi: int = 40
    lam_hi: float = 1e6
    xi_lo: float = 1e-3
    xi_hi: float = 1e3

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.n_lambda * factor, self.n_theta * factor,
                        self.n_xi * factor, self.lam_hi, self.xi_lo,
                        self.xi_hi)

    def points(self, sector: Sector):
        """Cartesian (xi, lam) samples; xi are moduli of the frequency."""
        if min(self.n_lambda, self.n_theta, self.n_xi) <= 0:
            raise EmptyGrid("grid axis with zero samples")
        lam_lo = sector.delta if sector.delta > 0 else 1e-3
        mods = np.logspace(math.log10(lam_lo), math.log10(self.lam_hi),
                           self.n_lambda)
        amax = (math.pi - sector.sigma) * (1.0 - 1e-9)
        thetas = np.linspace(-amax, amax, self.n_theta)
        lam = (mods[:, None] * np.exp(1j * thetas)[None, :]).ravel()
        xi = np.logspace(math.log10(self.xi_lo), math.log10(self.xi_hi),
                         self.n_xi)
        lam_grid = np.repeat(lam, xi.size)
        xi_grid = np.tile(xi, lam.size)
        return xi_grid, lam_grid

    def to_json(self) -> dict:
        return {"n_lambda": self.n_lambda, "n_theta": self.n_theta,
                "n_xi": self.n_xi, "lam_hi": self.lam_hi,
                "xi_lo": self.xi_lo, "xi_hi": self.xi_hi}


@dataclass(frozen=True)
class ScanResult:
    target: str
    sigma: float
    delta: float
    constant: float
    grid: GridSpec
    argmin_xi: float
    argmin_lambda: complex

    def to_json(self) -> dict:
        return {"target": self.target, "sigma": self.sigma,
                "delta": self.delta, "C": self.constant,
                "grid": self.grid.to_json(),
                "argmin_xi": self.argmin_xi,
                "argmin_lambda": [self.argmin_lambda.real,
                                  self.argmin_lambda.imag]}


def _scan_values(target: str, xi, lam, p: MaterialParams,
                 dc: DerivedConstants):
    xi2 = xi ** 2
    denom = (np.sqrt(np.abs(lam)) + xi)
    if target == "P":
        return np.abs(whole_space_symbol_P(xi2, lam, p)) / denom ** 4
    roots = roots_t(xi2, lam, dc, p.mu)
    if target == "re_omega":
        return roots.omega.real / denom
    if target == "re_t1":
        return roots.t1.real / denom
    if target == "re_t2":
        return roots.t2.real / denom
    if target in ("l1", "l2"):
        fr = frak_symbols(xi2, lam, dc, p, roots)
        val = fr.l1 if target == "l1" else fr.l2
        return np.abs(val) / denom ** 6
    if target == "detL":
        # report through the factorization: |detL| t1 |t1+omega| /
        # (|lam| |t2-t1|) recovers |l1|, scaled like the l-scan
        L = lopatinskii(xi2, lam, dc, p, roots)
        num = np.abs(L.det_factored) * np.abs(roots.t1) * np.abs(
            roots.t1 + roots.omega)
        den = np.abs(lam) * np.abs(roots.t2 - roots.t1)
        return num / den / denom ** 6
    raise ValueError(f"unknown scan target {target!r}")


def scan_lower_bound(target: str, sector: Sector, grid: GridSpec,
                     p: MaterialParams,
                     dc: DerivedConstants | None = None,
                     return_points: bool = False):
    """Infimum over the grid of |target| / (|lam|^{1/2}+|xi|)^power.

    With return_points=True also returns the per-point (xi, lam, ratio)
    arrays for CSV emission.
    """
    dc = derive_constants(p) if dc is None else dc
    xi, lam = grid.points(sector)
    vals = _scan_values(target, xi, lam, p, dc)
    k = int(np.argmin(vals))
    result = ScanResult(target=target, sigma=sector.sigma,
                        delta=sector.delta, constant=float(vals[k]),
                        grid=grid, argmin_xi=float(xi[k]),
                        argmin_lambda=complex(lam[k]))
    if return_points:
        return result, (xi, lam, vals)
    return result


def empirical_sigma_star(p: MaterialParams, target: str = "l1",
                         grid: GridSpec | None = None, frac: float = 1e-3,
                         n_bisect: int = 24,
                         dc: DerivedConstants | None = None) -> float:
    """Bisect the sector angle down to where the lower-bound scan degenerates.

    The true threshold angle comes from a compactness argument and is not
    constructive; this reports the smallest sampled angle at which the
    scan constant still exceeds ``frac`` times its wide-angle reference.
    """
    dc = derive_constants(p) if dc is None else dc
    grid = grid or GridSpec(24, 9, 24)
    hi = math.pi / 2 - 1e-3
    lo = dc.sigma_w + 1e-4
    c_ref = scan_lower_bound(target, Sector(hi, 0.0), grid, p, dc).constant
    thresh = frac * c_ref

    def healthy(sigma):
        return scan_lower_bound(target, Sector(sigma, 0.0), grid, p,
                                dc).constant > thresh

    if healthy(lo):
        return lo
    a, b = lo, hi
    for _ in range(n_bisect):
        mid = 0.5 * (a + b)
        if healthy(mid):
            b = mid
        else:
            a = mid
    return b


# ---------------------------------------------------------------------------
# multiplier certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    symbol_id: str
    claimed_order: float
    claimed_type: int
    sector: Sector
    grid_spec: GridSpec
    estimated_constant: float
    max_alpha: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"symbol_id": self.symbol_id, "s": self.claimed_order,
                "type": self.claimed_type, "sigma": self.sector.sigma,
                "delta": self.sector.delta, "C": self.estimated_constant,
                "grid": self.grid_spec.to_json(),
                "max_alpha": self.max_alpha}

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _step_sizes(xi_vec, lam, factor: float = 1e-4):
    """Per-axis finite-difference step; guards the underflow floor.

    The step is ``factor`` times the homogeneous scale |lam|^{1/2} +
    |xi'|, the variation scale of every symbol in play.  A smaller step
    makes the second differences rounding-dominated at lam-dominated
    grid corners.
    """
    xi_norm = np.sqrt(np.sum(xi_vec ** 2, axis=0))
    h = factor * np.maximum(xi_norm, np.sqrt(np.abs(lam)) + xi_norm)
    floor = 1e3 * np.finfo(float).eps * xi_norm
    if np.any(h <= floor):
        raise DerivativeStepUnderflow("finite-difference step below "
                                      "resolvable scale")
    return h


def _partial_xi(f, xi_vec, lam, alpha, h):
    """Nested central differences in xi', Richardson-extrapolated once."""
    if not any(alpha):
        return f(xi_vec, lam)
    axis = next(i for i, a in enumerate(alpha) if a)
    rest = tuple(a - (1 if i == axis else 0) for i, a in enumerate(alpha))

    def d(step):
        up = xi_vec.copy()
        dn = xi_vec.copy()
        up[axis] = up[axis] + step
        dn[axis] = dn[axis] - step
        return (_partial_xi(f, up, lam, rest, h)
                - _partial_xi(f, dn, lam, rest, h)) / (2.0 * step)

    coarse = d(h)
    fine = d(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _lambda_dilation(f, rel_step: float = 1e-5):
    """Return the closure (xi, lam) -> lam d/dlam f, Richardson once."""

    def g(xi_vec, lam):
        def d(eps):
            return (f(xi_vec, lam * (1 + eps))
                    - f(xi_vec, lam * (1 - eps))) / (2 * eps)

        return (4.0 * d(rel_step / 2) - d(rel_step)) / 3.0

    return g


def _alphas(dim: int, max_alpha: int):
    out = []
    for total in range(max_alpha + 1):
        for combo in itertools.product(range(total + 1), repeat=dim):
            if sum(combo) == total:
                out.append(combo)
    return out


def certify_multiplier(symbol, symbol_id: str, claimed_order: float,
                       claimed_type: int, sector: Sector,
                       p: MaterialParams, grid: GridSpec | None = None,
                       max_alpha: int = 2, dim: int = 1,
                       lam_rel_step: float = 1e-5) -> Certificate:
    """Estimate the multiplier constant of a symbol closure on a grid.

    ``symbol`` takes (xi_vec, lam) with xi_vec of shape (dim, npts) and
    returns complex values of shape (npts,).  The certificate constant is
    the max over the grid, |alpha| <= max_alpha and n in {0, 1} of
    |d^alpha (lam d/dlam)^n symbol| / bound.
    """
    if claimed_type not in (1, 2):
        raise ValueError("claimed_type must be 1 or 2")
    grid = grid or GridSpec(20, 7, 20)
    xi_mod, lam = grid.points(sector)
    # place xi along the first tangential axis; symbols see the vector
    xi_vec = np.zeros((dim, xi_mod.size))
    xi_vec[0] = xi_mod
    h = _step_sizes(xi_vec, lam)
    denom_base = np.sqrt(np.abs(lam)) + xi_mod

    worst = 0.0
    detail = {}
    for n in (0, 1):
        f = symbol if n == 0 else _lambda_dilation(symbol, lam_rel_step)
        for alpha in _alphas(dim, max_alpha):
            val = np.abs(_partial_xi(f, xi_vec, lam, alpha, h))
            na = sum(alpha)
            if claimed_type == 1:
                bound = denom_base ** (claimed_order - na)
            else:
                bound = denom_base ** claimed_order * xi_mod ** (-float(na))
            ratio = float(np.max(val / bound))
            detail[f"n={n},alpha={alpha}"] = ratio
            worst = max(worst, ratio)
    return Certificate(symbol_id=symbol_id, claimed_order=claimed_order,
                       claimed_type=claimed_type, sector=sector,
                       grid_spec=grid, estimated_constant=worst,
                       max_alpha=max_alpha, detail=detail)


def symbol_registry(p: MaterialParams, dc: DerivedConstants | None = None):
    """Closures for every certifiable symbol, keyed by id.

    Values are (closure, claimed_order, claimed_type).  Closures accept
    (xi_vec, lam) and tolerate array lam; roots are evaluated without the
    branch-cut check because finite-difference stencils may momentarily
    leave the open sector at its rim.
    """
    dc = derive_constants(p) if dc is None else dc

    def with_roots(fn):
        def closure(xi_vec, lam):
            xi2 = np.sum(np.asarray(xi_vec) ** 2, axis=0)
            roots = roots_t(xi2, lam, dc, p.mu, check=False)
            return fn(xi2, lam, roots)

        return closure

    def frak(name):
        def fn(xi2, lam, roots):
            fr = frak_symbols(xi2, lam, dc, p, roots)
            return getattr(fr, name)

        return with_roots(fn)

    def frak_inv(name):
        def fn(xi2, lam, roots):
            fr = frak_symbols(xi2, lam, dc, p, roots)
            return 1.0 / getattr(fr, name)

        return with_roots(fn)

    reg = {
        "xi_j": (lambda xi_vec, lam: xi_vec[0] + 0.0 * lam, 1.0, 1),
        "sqrt_lambda": (lambda xi_vec, lam:
                        np.sqrt(lam) + 0.0 * xi_vec[0], 1.0, 1),
        "xi_sq": (lambda xi_vec, lam:
                  np.sum(np.asarray(xi_vec) ** 2, axis=0) + 0.0 * lam, 2.0, 1),
        "lambda": (lambda xi_vec, lam: lam + 0.0 * xi_vec[0], 2.0, 1),
        "xi_over_abs": (lambda xi_vec, lam:
                        xi_vec[0] / np.sqrt(np.sum(np.asarray(xi_vec) ** 2,
                                                   axis=0)) + 0.0 * lam,
                        0.0, 2),
        "t1": (with_roots(lambda xi2, lam, r: r.t1), 1.0, 1),
        "t2": (with_roots(lambda xi2, lam, r: r.t2), 1.0, 1),
        "t1+omega": (with_roots(lambda xi2, lam, r: r.t1 + r.omega), 1.0, 1),
        "t2+omega": (with_roots(lambda xi2, lam, r: r.t2 + r.omega), 1.0, 1),
        "m1": (frak("m1"), 3.0, 1), "m2": (frak("m2"), 3.0, 1),
        "p1": (frak("p1"), 1.0, 1), "p2": (frak("p2"), 1.0, 1),
        "q1": (frak("q1"), 1.0, 1), "q2": (frak("q2"), 1.0, 1),
        "a": (frak("a"), 1.0, 1), "b": (frak("b"), 1.0, 1),
        "r1": (frak("r1"), 0.0, 1), "r2": (frak("r2"), 0.0, 1),
        "l1": (frak("l1"), 6.0, 1), "l2": (frak("l2"), 6.0, 1),
        "l1_inv": (frak_inv("l1"), -6.0, 1),
        "l2_inv": (frak_inv("l2"), -6.0, 1),
    }
    for s in (-2, -1, 1, 2):
        reg[f"omega^{s}"] = (
            with_roots(lambda xi2, lam, r, s=s: r.omega ** s), float(s), 1)
    return reg
