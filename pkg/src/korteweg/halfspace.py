"""Half-space solver for the reduced boundary-value problem.

Per tangential mode the solution is a sum of decaying exponentials in the
normal coordinate.  Two coefficient paths exist:

* ``coefficients_direct`` solves the assembled 2x2 boundary system by a
  stacked linear solve (the oracle path);
* ``coefficients_closed_form`` uses the explicit cofactor/determinant
  quotients with the factored determinant.

Field assembly in production goes through the eliminated operator
formulas (``s6_profiles``): every coefficient is a ratio of the
eliminated symbols with no explicit 1/lam or 1/(t2-t1), and the
near-coincident kernel channels are evaluated stably.

Profiles are stored per channel (exp(-omega x), exp(-t1 x), exp(-t2 x),
M0, M1, M2) so normal derivatives are exact recurrences, never finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, LambdaOutsideSector, SingularLopatinskii
from .model import DerivedConstants, MaterialParams, Sector, derive_constants
from .symbols import (FrakSymbols, RootSet, frak_symbols, kernel_M,
                      lopatinskii, roots_t)

SINGULAR_TOL = 1e-13

CHANNELS = ("exp_omega", "exp_t1", "exp_t2", "M0", "M1", "M2")


@dataclass(frozen=True)
class TangentialGrid:
    """Periodic tangential lattice: dim_t axes, modes_per_axis, period."""

    dim_t: int = 1
    modes_per_axis: int = 256
    period: float = 2.0 * np.pi

    @property
    def shape(self):
        return (self.modes_per_axis,) * self.dim_t

    @property
    def axes_range(self):
        return tuple(range(-self.dim_t, 0))

    def axes(self):
        m = self.modes_per_axis
        return np.arange(m) * (self.period / m)

    def xi_mesh(self):
        m = self.modes_per_axis
        f = (2.0 * np.pi / self.period) * np.fft.fftfreq(m, d=1.0 / m)
        return np.meshgrid(*([f] * self.dim_t), indexing="ij")

    def xi_sq(self):
        return sum(x * x for x in self.xi_mesh())

    def cell_measure(self):
        return (self.period / self.modes_per_axis) ** self.dim_t

    def fft(self, arr):
        return np.fft.fftn(arr, axes=tuple(range(-self.dim_t, 0)))

    def ifft(self, arr):
        return np.fft.ifftn(arr, axes=tuple(range(-self.dim_t, 0)))


@dataclass(frozen=True)
class NormalSamples:
    """Strictly increasing normal coordinates starting at the boundary."""

    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x[0] != 0.0:
            raise ValueError("first normal sample must be the boundary 0")
        if np.any(np.diff(x) <= 0):
            raise ValueError("normal samples must be strictly increasing")
        object.__setattr__(self, "x", x)

    @classmethod
    def chebyshev(cls, n: int = 129, height: float = 10.0) -> "NormalSamples":
        k = np.arange(n)
        return cls(height * (1.0 - np.cos(0.5 * np.pi * k / (n - 1))))

    @classmethod
    def uniform(cls, n: int, height: float) -> "NormalSamples":
        return cls(np.linspace(0.0, height, n))

    def trapezoid_weights(self):
        x = self.x
        w = np.zeros_like(x)
        w[:-1] += 0.5 * np.diff(x)
        w[1:] += 0.5 * np.diff(x)
        return w


class ChannelProfile:
    """A per-mode normal profile: sum of coefficient * channel(x_N).

    Coefficients are arrays over the tangential modes.  Differentiation is
    exact: exponential channels multiply by their exponent; the divided
    kernels follow their recurrences, feeding back into the exponential
    channels.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = dict(coeffs or {})

    def add(self, channel: str, coeff):
        if channel not in CHANNELS:
            raise KeyError(channel)
        if channel in self.coeffs:
            self.coeffs[channel] = self.coeffs[channel] + coeff
        else:
            self.coeffs[channel] = +np.asarray(coeff, dtype=complex)
        return self

    def __add__(self, other: "ChannelProfile") -> "ChannelProfile":
        out = ChannelProfile(self.coeffs)
        for ch, c in other.coeffs.items():
            out.add(ch, c)
        return out

    def scaled(self, factor) -> "ChannelProfile":
        return ChannelProfile({ch: c * factor for ch, c in self.coeffs.items()})

    def derivative(self, roots: RootSet) -> "ChannelProfile":
        out = ChannelProfile()
        for ch, c in self.coeffs.items():
            if ch == "exp_omega":
                out.add(ch, -roots.omega * c)
            elif ch == "exp_t1":
                out.add(ch, -roots.t1 * c)
            elif ch == "exp_t2":
                out.add(ch, -roots.t2 * c)
            elif ch == "M0":
                out.add("M0", -roots.t2 * c)
                out.add("exp_t1", -c)
            elif ch == "M1":
                out.add("M1", -roots.t1 * c)
                out.add("exp_omega", -roots.r_frak(1) * c)
            elif ch == "M2":
                out.add("M2", -roots.t2 * c)
                out.add("exp_omega", -roots.r_frak(2) * c)
        return out

    def evaluate(self, roots: RootSet, x) -> np.ndarray:
        """Sample the profile at normal coordinates x (trailing axis)."""
        return self.evaluate_with(channel_table(roots, x), x)

    def evaluate_with(self, table: dict, x) -> np.ndarray:
        """Sample against a precomputed channel-value table."""
        total = None
        for ch, c in self.coeffs.items():
            term = _expand(c, x) * table[ch]
            total = term if total is None else total + term
        if total is None:
            raise ValueError("empty profile")
        return total

    def trace0(self) -> np.ndarray:
        """Boundary value: exponentials are 1, kernels vanish at x = 0."""
        total = None
        for ch, c in self.coeffs.items():
            if ch.startswith("exp"):
                total = +np.asarray(c) if total is None else total + c
        if total is None:
            raise ValueError("empty profile")
        return np.asarray(total, dtype=complex)


def _expand(arr, x):
    arr = np.asarray(arr)
    x = np.asarray(x)
    if arr.ndim and x.ndim:
        return arr.reshape(arr.shape + (1,) * x.ndim)
    return arr


def channel_table(roots: RootSet, x) -> dict:
    """All six channel values at the normal samples, computed once."""
    x = np.asarray(x, dtype=float)
    return {"exp_omega": np.exp(-_expand(roots.omega, x) * x),
            "exp_t1": np.exp(-_expand(roots.t1, x) * x),
            "exp_t2": np.exp(-_expand(roots.t2, x) * x),
            "M0": kernel_M(0, x, roots),
            "M1": kernel_M(1, x, roots),
            "M2": kernel_M(2, x, roots)}


@dataclass
class ModeSolution:
    """Exponential-representation amplitudes at every tangential mode.

    ``alpha``, ``beta``, ``gamma`` have the component axis first
    (length N = dim_t + 1, normal component last); ``rho1``, ``rho2``
    multiply exp(-t1 x) and exp(-t2 x) in the density.
    """

    xi: tuple
    lam: complex
    roots: RootSet
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray

    @property
    def n_components(self):
        return self.alpha.shape[0]

    def u_profile(self, comp: int) -> ChannelProfile:
        a, b, g = self.alpha[comp], self.beta[comp], self.gamma[comp]
        return ChannelProfile({"exp_omega": a - b - g,
                               "exp_t1": b, "exp_t2": g})

    def rho_profile(self) -> ChannelProfile:
        return ChannelProfile({"exp_t1": self.rho1, "exp_t2": self.rho2})

    def phi_profile(self) -> ChannelProfile:
        """div u in transform space: the omega channel cancels."""
        xi = self.xi
        n = self.n_components
        ixi_beta = sum(1j * xi[j] * self.beta[j] for j in range(n - 1))
        ixi_gamma = sum(1j * xi[j] * self.gamma[j] for j in range(n - 1))
        return ChannelProfile({
            "exp_t1": ixi_beta - self.roots.t1 * self.beta[n - 1],
            "exp_t2": ixi_gamma - self.roots.t2 * self.gamma[n - 1]})

    def to_json(self) -> dict:
        def pack(a):
            return {"re": np.asarray(a).real.tolist(),
                    "im": np.asarray(a).imag.tolist()}

        return {"lambda": [self.lam.real, self.lam.imag],
                "omega": pack(self.roots.omega),
                "t1": pack(self.roots.t1), "t2": pack(self.roots.t2),
                "alpha": pack(self.alpha), "beta": pack(self.beta),
                "gamma": pack(self.gamma),
                "rho1": pack(self.rho1), "rho2": pack(self.rho2)}


def _lopatinskii_rhs(xi, xi2, roots, g_hat0, h_hat0, lam, p):
    om, t1, t2 = roots.omega, roots.t1, roots.t2
    n = len(xi) + 1
    ixi_g = sum(1j * xi[j] * g_hat0[j] for j in range(n - 1))
    rhs1 = (-2.0 / p.mu * t1 * t2 * om * ixi_g
            + t1 * t2 * (om * om + xi2) / p.mu * g_hat0[n - 1])
    rhs2 = lam * h_hat0
    return rhs1, rhs2, ixi_g


def _amplitudes_from_bn_gn(xi, xi2, roots, g_hat0, beta_n, gamma_n, p):
    """alpha from the boundary rows, tangential beta/gamma by proportion."""
    om, t1, t2 = roots.omega, roots.t1, roots.t2
    n = len(xi) + 1
    alpha = np.empty((n,) + np.shape(beta_n), dtype=complex)
    beta = np.empty_like(alpha)
    gamma = np.empty_like(alpha)
    beta[n - 1] = beta_n
    gamma[n - 1] = gamma_n
    for j in range(n - 1):
        beta[j] = -1j * xi[j] / t1 * beta_n
        gamma[j] = -1j * xi[j] / t2 * gamma_n
    alpha[n - 1] = (g_hat0[n - 1] * t1 * t2 / p.mu
                    + t2 * (2 * t1 * om - om * om - xi2) * beta_n
                    + t1 * (2 * t2 * om - om * om - xi2) * gamma_n) \
        / (2.0 * t1 * t2 * om)
    for j in range(n - 1):
        alpha[j] = (g_hat0[j] / p.mu
                    + 1j * xi[j] / (2 * p.mu * om) * g_hat0[n - 1]
                    + 1j * xi[j] * (4 * t1 * om - 3 * om * om - xi2)
                    / (2 * t1 * om) * beta_n
                    + 1j * xi[j] * (4 * t2 * om - 3 * om * om - xi2)
                    / (2 * t2 * om) * gamma_n) / om
    return alpha, beta, gamma


def _check_singular(fr: FrakSymbols, xi2, lam):
    scale = (np.sqrt(np.abs(lam)) + np.sqrt(xi2)) ** 6
    bad = (np.abs(fr.l1) < SINGULAR_TOL * scale) \
        | (np.abs(fr.l2) < SINGULAR_TOL * scale)
    if np.any(bad):
        raise SingularLopatinskii("boundary system numerically singular "
                                  f"at {int(np.sum(bad))} mode(s)")


def coefficients_direct(xi, lam, g_hat0, h_hat0, dc: DerivedConstants,
                        p: MaterialParams) -> ModeSolution:
    """Stacked 2x2 linear solve for (beta_N, gamma_N); oracle path."""
    xi = tuple(np.asarray(c) for c in xi)
    xi2 = sum(c * c for c in xi)
    roots = roots_t(xi2, lam, dc, p.mu)
    L = lopatinskii(xi2, lam, dc, p, roots)
    fr = frak_symbols(xi2, lam, dc, p, roots)
    _check_singular(fr, xi2, lam)
    rhs1, rhs2, _ = _lopatinskii_rhs(xi, xi2, roots, g_hat0, h_hat0, lam, p)
    rhs = np.stack([np.broadcast_to(rhs1, np.shape(L.det_direct)),
                    np.broadcast_to(rhs2, np.shape(L.det_direct))], axis=-1)
    sol = np.linalg.solve(L.matrix, rhs[..., None])[..., 0]
    beta_n, gamma_n = sol[..., 0], sol[..., 1]
    alpha, beta, gamma = _amplitudes_from_bn_gn(xi, xi2, roots, g_hat0,
                                                beta_n, gamma_n, p)
    rho1 = (roots.t1 ** 2 - xi2) / (lam * roots.t1) * beta_n
    rho2 = (roots.t2 ** 2 - xi2) / (lam * roots.t2) * gamma_n
    return ModeSolution(xi=xi, lam=lam, roots=roots, alpha=alpha, beta=beta,
                        gamma=gamma, rho1=rho1, rho2=rho2)


def coefficients_closed_form(xi, lam, g_hat0, h_hat0, dc: DerivedConstants,
                             p: MaterialParams) -> ModeSolution:
    """Cofactor/determinant quotients with the factored determinant."""
    xi = tuple(np.asarray(c) for c in xi)
    xi2 = sum(c * c for c in xi)
    roots = roots_t(xi2, lam, dc, p.mu)
    L = lopatinskii(xi2, lam, dc, p, roots)
    fr = frak_symbols(xi2, lam, dc, p, roots)
    _check_singular(fr, xi2, lam)
    om, t1, t2 = roots.omega, roots.t1, roots.t2
    n = len(xi) + 1
    ixi_g = sum(1j * xi[j] * g_hat0[j] for j in range(n - 1))
    det = L.det_factored
    beta_n = (-2 * t1 * t2 * om * L.L11 / (p.mu * det) * ixi_g
              + t1 * t2 * (om * om + xi2) * L.L11 / (p.mu * det)
              * g_hat0[n - 1]
              + lam * L.L12 / det * h_hat0)
    gamma_n = (-2 * t1 * t2 * om * L.L21 / (p.mu * det) * ixi_g
               + t1 * t2 * (om * om + xi2) * L.L21 / (p.mu * det)
               * g_hat0[n - 1]
               + lam * L.L22 / det * h_hat0)
    alpha, beta, gamma = _amplitudes_from_bn_gn(xi, xi2, roots, g_hat0,
                                                beta_n, gamma_n, p)
    # t_j^2 - |xi|^2 = s_j lam exactly, so the density amplitudes are
    # s_j / t_j times the channel amplitude: no explicit 1/lam
    rho1 = dc.s1 / t1 * beta_n
    rho2 = dc.s2 / t2 * gamma_n
    return ModeSolution(xi=xi, lam=lam, roots=roots, alpha=alpha, beta=beta,
                        gamma=gamma, rho1=rho1, rho2=rho2)


def s6_profiles(xi, lam, g_hat0, h_hat0, dc: DerivedConstants,
                p: MaterialParams):
    """Field profiles via the eliminated operator formulas.

    Returns (rho_profile, [u_1 .. u_N profiles], roots).  Coefficients
    contain only the eliminated symbols; kernels M0/M1/M2 absorb every
    root-difference quotient.
    """
    xi = tuple(np.asarray(c) for c in xi)
    xi2 = sum(c * c for c in xi)
    roots = roots_t(xi2, lam, dc, p.mu)
    fr = frak_symbols(xi2, lam, dc, p, roots)
    _check_singular(fr, xi2, lam)
    om, t1, t2 = roots.omega, roots.t1, roots.t2
    s1, s2 = dc.s1, dc.s2
    mu = p.mu
    n = len(xi) + 1
    gN = g_hat0[n - 1]
    opx = om * om + xi2
    t_of = {1: t1, 2: t2}
    s_of = {1: s1, 2: s2}
    l_of = {1: fr.l1, 2: fr.l2}
    m_of = {1: fr.m1, 2: fr.m2}
    p_of = {1: fr.p1, 2: fr.p2}
    q_of = {1: fr.q1, 2: fr.q2}
    sign = {1: 1.0, 2: -1.0}
    pairs = ((1, 2), (2, 1))

    # density
    rho = ChannelProfile()
    c_t1 = (t1 * s1 * s2 * (t1 + om) / (mu * fr.l1)
            * (-2.0 * om * sum(1j * xi[k] * g_hat0[k] for k in range(n - 1))
               + opx * gN))
    c_t1 = c_t1 + sum(sign[l] * fr.a * t_of[l] * m_of[l]
                      / (s_of[l] * l_of[l]) for l in (1, 2)) * h_hat0
    rho.add("exp_t1", c_t1)
    c_m0 = (s1 * s2 * t1 ** 2 * (t1 + om) / (mu * fr.l1)
            * (2.0 * om * sum(1j * xi[k] * g_hat0[k] for k in range(n - 1))
               - opx * gN))
    c_m0 = c_m0 + lam * s2 * t1 * fr.m1 / fr.l1 * h_hat0
    rho.add("M0", c_m0)

    # tangential velocity components
    u_profiles = []
    for j in range(n - 1):
        prof = ChannelProfile()
        c_om = g_hat0[j] / (mu * om) + 1j * xi[j] / (2 * mu * om * om) * gN
        for l in (1, 2):
            c_om = c_om + (sign[l] * xi[j] * t1 * t2 * fr.a * p_of[l]
                           / (mu * om * s_of[l] * l_of[l])
                           * sum(xi[k] * g_hat0[k] for k in range(n - 1)))
            c_om = c_om + (sign[l] * 1j * xi[j] * t1 * t2 * opx * fr.a
                           * p_of[l] / (2 * mu * om * om * s_of[l] * l_of[l])
                           * gN)
        for l, m in pairs:
            c_om = c_om + (sign[l] * lam * 1j * xi[j] * fr.b * t_of[l]
                           * m_of[l] * p_of[m]
                           / (2 * om * om * l_of[l] * (t_of[m] + om))
                           * h_hat0)
        prof.add("exp_omega", c_om)
        for l in (1, 2):
            c_ml = -(sign[l] * 2 * xi[j] * om * t1 * t2 * s1 * s2
                     * (t_of[l] + om) / (mu * s_of[l] * l_of[l])
                     * sum(xi[k] * g_hat0[k] for k in range(n - 1)))
            c_ml = c_ml - (sign[l] * 1j * xi[j] * t1 * t2 * opx * s1 * s2
                           * (t_of[l] + om) / (mu * s_of[l] * l_of[l]) * gN)
            prof.add(f"M{l}", c_ml)
        for l, m in pairs:
            prof.add(f"M{m}", -(sign[l] * lam * 1j * xi[j] * t_of[l]
                                * m_of[l] / l_of[l]) * h_hat0)
        u_profiles.append(prof)

    # normal velocity component
    prof = ChannelProfile()
    c_om = gN / (2 * mu * om)
    for l in (1, 2):
        c_om = c_om - (sign[l] * t1 * t2 * fr.a * q_of[l]
                       / (mu * s_of[l] * l_of[l])
                       * sum(1j * xi[k] * g_hat0[k] for k in range(n - 1)))
        c_om = c_om + (sign[l] * t1 * t2 * opx * fr.a * q_of[l]
                       / (2 * mu * om * s_of[l] * l_of[l]) * gN)
    for l, m in pairs:
        c_om = c_om + (sign[l] * lam * fr.b * t_of[l] * m_of[l] * q_of[m]
                       / (2 * om * l_of[l] * (t_of[m] + om)) * h_hat0)
    prof.add("exp_omega", c_om)
    for l in (1, 2):
        c_ml = -(sign[l] * 2 * t1 * t2 * om * s1 * s2 * t_of[l]
                 * (t_of[l] + om) / (mu * s_of[l] * l_of[l])
                 * sum(1j * xi[k] * g_hat0[k] for k in range(n - 1)))
        c_ml = c_ml + (sign[l] * t1 * t2 * opx * s1 * s2 * t_of[l]
                       * (t_of[l] + om) / (mu * s_of[l] * l_of[l]) * gN)
        prof.add(f"M{l}", c_ml)
    for l, m in pairs:
        prof.add(f"M{m}", sign[l] * lam * t1 * t2 * m_of[l] / l_of[l]
                 * h_hat0)
    u_profiles.append(prof)

    return rho, u_profiles, roots


@dataclass
class ReducedSolution:
    """Solution of the reduced problem, carried per mode.

    ``rho_prof`` and ``u_profs`` hold the production (eliminated-form)
    representation; ``modes`` lazily computes the closed-form amplitudes
    for diagnostics and the representation-level invariants.
    """

    grid: TangentialGrid
    normal: NormalSamples
    lam: complex
    params: MaterialParams
    dc: DerivedConstants
    roots: RootSet
    g_hat0: np.ndarray
    h_hat0: np.ndarray
    rho_prof: ChannelProfile
    u_profs: list
    _modes: ModeSolution | None = None
    _cache: dict = field(default_factory=dict)

    @property
    def modes(self) -> ModeSolution:
        if self._modes is None:
            xi = tuple(self.grid.xi_mesh())
            self._modes = coefficients_closed_form(
                xi, self.lam, self.g_hat0, self.h_hat0, self.dc, self.params)
        return self._modes

    @property
    def n_components(self):
        return self.grid.dim_t + 1

    def rho_hat(self, x=None):
        x = self.normal.x if x is None else x
        return self.rho_prof.evaluate(self.roots, x)

    def u_hat(self, x=None):
        x = self.normal.x if x is None else x
        return np.stack([prof.evaluate(self.roots, x)
                         for prof in self.u_profs])

    def rho(self, x=None):
        return self._ifft_profile(self.rho_hat(x))

    def u(self, x=None):
        return np.stack([self._ifft_profile(prof.evaluate(self.roots, x
                         if x is not None else self.normal.x))
                         for prof in self.u_profs])

    def _ifft_profile(self, arr):
        axes = tuple(range(-self.grid.dim_t - 1, -1))
        return np.fft.ifftn(arr, axes=axes)


def solve_reduced_hat(g_hat0, h_hat0, lam: complex, grid: TangentialGrid,
                      normal: NormalSamples, p: MaterialParams,
                      dc: DerivedConstants | None = None,
                      sector: Sector | None = None) -> ReducedSolution:
    """Same as solve_reduced, from tangential trace coefficients."""
    dc = derive_constants(p) if dc is None else dc
    if sector is not None and not sector.contains(lam):
        raise LambdaOutsideSector(f"lambda {lam} outside sector")
    xi = tuple(grid.xi_mesh())
    rho_prof, u_profs, roots = s6_profiles(xi, lam, g_hat0, h_hat0, dc, p)
    return ReducedSolution(grid=grid, normal=normal, lam=lam, params=p,
                           dc=dc, roots=roots, g_hat0=g_hat0, h_hat0=h_hat0,
                           rho_prof=rho_prof, u_profs=u_profs)


def solve_reduced(g_trace, h_trace, lam: complex, grid: TangentialGrid,
                  normal: NormalSamples, p: MaterialParams,
                  dc: DerivedConstants | None = None,
                  sector: Sector | None = None) -> ReducedSolution:
    """Solve the homogeneous-interior problem with boundary data (g, h).

    ``g_trace`` has shape (N, tangential shape) and ``h_trace``
    (tangential shape); both are physical boundary samples.
    """
    g_trace = np.asarray(g_trace, dtype=complex)
    h_trace = np.asarray(h_trace, dtype=complex)
    n = grid.dim_t + 1
    if g_trace.shape != (n,) + grid.shape or h_trace.shape != grid.shape:
        raise GridMismatch("boundary data shapes do not match grid")
    return solve_reduced_hat(grid.fft(g_trace), grid.fft(h_trace), lam,
                             grid, normal, p, dc, sector)


@dataclass(frozen=True)
class ReducedResidual:
    """Max moduli of the interior rows and boundary rows."""

    interior_mass: float
    interior_momentum: float
    boundary_stress: float
    boundary_neumann: float

    def max_all(self):
        return max(self.interior_mass, self.interior_momentum,
                   self.boundary_stress, self.boundary_neumann)

    def to_json(self):
        return {"interior_mass": self.interior_mass,
                "interior_momentum": self.interior_momentum,
                "boundary_stress": self.boundary_stress,
                "boundary_neumann": self.boundary_neumann}


def residual_reduced(sol: ReducedSolution, g_trace, h_trace) -> ReducedResidual:
    """Evaluate interior and boundary rows of the reduced system.

    The normal derivatives come from the channel recurrences, so the
    reported numbers reflect only the coefficient algebra.
    """
    grid, p, lam = sol.grid, sol.params, sol.lam
    roots = sol.roots
    xi = tuple(grid.xi_mesh())
    xi2 = grid.xi_sq()
    x = sol.normal.x
    n = sol.n_components

    rho0 = sol.rho_prof
    rho1 = rho0.derivative(roots)
    rho2 = rho1.derivative(roots)
    rho3 = rho2.derivative(roots)
    u0 = sol.u_profs
    u1 = [prof.derivative(roots) for prof in u0]
    u2 = [prof.derivative(roots) for prof in u1]

    table = channel_table(roots, x)

    def ev(prof):
        return prof.evaluate_with(table, x)

    phi0 = ChannelProfile()  # transform of div u, assembled symbolically
    for j in range(n - 1):
        phi0 = phi0 + u0[j].scaled(1j * xi[j])
    phi0 = phi0 + u1[n - 1]
    phi1 = phi0.derivative(roots)

    # interior mass row: lam rho + div u
    mass = lam * ev(rho0) + ev(phi0)

    # interior momentum rows
    mom_max = 0.0
    lap = lambda v0, v2: v2 - _expand(xi2, x) * v0  # noqa: E731
    rho_lap = lap(ev(rho0), ev(rho2))
    rho_lap_d = ev(rho3) - _expand(xi2, x) * ev(rho1)
    phi_v = ev(phi0)
    phi_d = ev(phi1)
    for j in range(n - 1):
        row = (lam * ev(u0[j]) - p.mu * lap(ev(u0[j]), ev(u2[j]))
               - p.nu * 1j * _expand(xi[j], x) * phi_v
               - p.kappa * 1j * _expand(xi[j], x) * rho_lap)
        mom_max = max(mom_max,
                      float(np.max(np.abs(sol._ifft_profile(row)))))
    row = (lam * ev(u0[n - 1]) - p.mu * lap(ev(u0[n - 1]), ev(u2[n - 1]))
           - p.nu * phi_d - p.kappa * rho_lap_d)
    mom_max = max(mom_max, float(np.max(np.abs(sol._ifft_profile(row)))))

    # boundary rows, evaluated at x = 0 through the traces
    g_hat0 = grid.fft(np.asarray(g_trace, dtype=complex))
    h_hat0 = grid.fft(np.asarray(h_trace, dtype=complex))
    uN0 = u0[n - 1].trace0()
    duj0 = [u1[j].trace0() for j in range(n)]
    stress = 0.0
    for j in range(n - 1):
        row = -p.mu * (1j * xi[j] * uN0 + duj0[j]) - g_hat0[j]
        stress = max(stress, _phys_max(grid, row))
    lap_rho0 = rho2.trace0() - xi2 * rho0.trace0()
    row_n = -(2 * p.mu * duj0[n - 1] + (p.nu - p.mu) * phi0.trace0()
              + p.kappa * lap_rho0) - g_hat0[n - 1]
    stress = max(stress, _phys_max(grid, row_n))
    neumann = _phys_max(grid, -rho1.trace0() - h_hat0)

    mass_phys = sol._ifft_profile(mass)
    return ReducedResidual(
        interior_mass=float(np.max(np.abs(mass_phys))),
        interior_momentum=mom_max,
        boundary_stress=stress,
        boundary_neumann=neumann)


def _phys_max(grid: TangentialGrid, mode_row) -> float:
    return float(np.max(np.abs(np.fft.ifftn(mode_row,
                                            axes=grid.axes_range))))
