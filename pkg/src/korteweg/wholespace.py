"""Whole-space resolvent solver on a periodic box via Fourier multipliers.

The periodic box stands in for free space: the acceptance data are
band-limited and box-scale-separated, so the multiplier formulas are exact
on the frequency lattice and any defect is an implementation defect.

All fields are complex arrays; the velocity carries its component axis
first, i.e. shape (N, M, ..., M).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, LambdaOutsideSector
from .model import MaterialParams, Sector
from .symbols import whole_space_symbol_P


@dataclass(frozen=True)
class BoxGrid:
    """Periodic box [0, L)^dim sampled with points_per_axis per axis."""

    dim: int = 2
    points_per_axis: int = 256
    period: float = 2.0 * np.pi

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        m = self.points_per_axis
        if m < 2 or (m & (m - 1)) != 0:
            raise ValueError("points_per_axis must be a power of two")

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    def axes(self):
        return np.arange(self.points_per_axis) * (self.period
                                                  / self.points_per_axis)

    def freq_1d(self):
        """The lattice xi_k = (2 pi / L) k along one axis, fft ordering."""
        m = self.points_per_axis
        k = np.fft.fftfreq(m, d=1.0 / m)
        return (2.0 * np.pi / self.period) * k

    def freq_mesh(self):
        """dim arrays of lattice frequencies broadcast over the box shape."""
        f = self.freq_1d()
        return np.meshgrid(*([f] * self.dim), indexing="ij")

    def xi_sq(self):
        mesh = self.freq_mesh()
        return sum(x * x for x in mesh)

    def cell_volume(self):
        return (self.period / self.points_per_axis) ** self.dim


@dataclass
class WholeField:
    """Density and velocity samples on a BoxGrid."""

    grid: BoxGrid
    rho: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        if self.rho.shape != self.grid.shape:
            raise GridMismatch("rho shape does not match grid")
        if self.u.shape != (self.grid.dim,) + self.grid.shape:
            raise GridMismatch("u shape does not match grid")


def l2_norm(grid: BoxGrid, arr) -> float:
    """Discrete L2 norm over the box (all leading axes are components)."""
    return float(np.sqrt(np.sum(np.abs(arr) ** 2) * grid.cell_volume()))


def solve_whole(d, f, lam: complex, p: MaterialParams, grid: BoxGrid,
                sector: Sector | None = None) -> WholeField:
    """Apply the resolvent multipliers to data (d, f) on the box.

    rho-hat picks up (lam + (mu+nu)|xi|^2)/P from d and -i xi_j / P from
    f_j; u-hat picks up -kappa i xi |xi|^2 / P from d, 1/(lam + mu |xi|^2)
    from f, and the -xi_j xi (nu lam + kappa |xi|^2) coupling.  At xi = 0
    the formulas reduce to rho = d/lam, u = f/lam since P(0, lam) = lam^2.
    """
    if sector is not None and not sector.contains(lam):
        raise LambdaOutsideSector(f"lambda {lam} outside sector")
    d = np.asarray(d, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if d.shape != grid.shape or f.shape != (grid.dim,) + grid.shape:
        raise GridMismatch("data shapes do not match grid")

    mesh = grid.freq_mesh()
    xi_sq = sum(x * x for x in mesh)
    pp = whole_space_symbol_P(xi_sq, lam, p)
    visc = lam + p.mu * xi_sq
    if np.min(np.abs(pp)) == 0.0 or np.min(np.abs(visc)) == 0.0:
        raise LambdaOutsideSector("multiplier denominator vanishes on "
                                  "the lattice")

    d_hat = np.fft.fftn(d)
    f_hat = np.fft.fftn(f, axes=tuple(range(1, grid.dim + 1)))
    ixi_dot_f = sum(1j * mesh[j] * f_hat[j] for j in range(grid.dim))

    rho_hat = ((lam + (p.mu + p.nu) * xi_sq) / pp) * d_hat - ixi_dot_f / pp
    # component c of the coupling: -xi_j xi_c (nu lam + kappa |xi|^2) /
    # ((lam + mu |xi|^2) P) f_j summed over j; with sum_j xi_j f_j written
    # through i xi . f this flips to +i xi_c (...) (i xi . f)
    coupling = (p.nu * lam + p.kappa * xi_sq) / (visc * pp)
    u_hat = np.empty_like(f_hat)
    for j in range(grid.dim):
        u_hat[j] = (-p.kappa * 1j * mesh[j] * xi_sq / pp * d_hat
                    + f_hat[j] / visc + 1j * mesh[j] * coupling * ixi_dot_f)

    rho = np.fft.ifftn(rho_hat)
    u = np.fft.ifftn(u_hat, axes=tuple(range(1, grid.dim + 1)))
    return WholeField(grid=grid, rho=rho, u=u)


def apply_lhs(field: WholeField, lam: complex, p: MaterialParams):
    """Spectral evaluation of the resolvent left-hand side.

    Returns (lam rho + div u, lam u - mu Lap u - nu grad div u
    - kappa Lap grad rho).
    """
    grid = field.grid
    mesh = grid.freq_mesh()
    xi_sq = sum(x * x for x in mesh)
    axes = tuple(range(1, grid.dim + 1))
    rho_hat = np.fft.fftn(field.rho)
    u_hat = np.fft.fftn(field.u, axes=axes)
    div_hat = sum(1j * mesh[j] * u_hat[j] for j in range(grid.dim))

    row1_hat = lam * rho_hat + div_hat
    row2_hat = np.empty_like(u_hat)
    for j in range(grid.dim):
        row2_hat[j] = (lam * u_hat[j] + p.mu * xi_sq * u_hat[j]
                       - p.nu * 1j * mesh[j] * div_hat
                       + p.kappa * 1j * mesh[j] * xi_sq * rho_hat)
    return (np.fft.ifftn(row1_hat),
            np.fft.ifftn(row2_hat, axes=axes))


@dataclass(frozen=True)
class ResidualReport:
    """Max and L2 norms of each residual row."""

    row_max: tuple
    row_l2: tuple

    def to_json(self) -> dict:
        return {"row_max": list(self.row_max), "row_l2": list(self.row_l2)}


def residual_whole(sol: WholeField, d, f, lam: complex,
                   p: MaterialParams) -> ResidualReport:
    """Residual of the two resolvent rows against the data, spectrally."""
    grid = sol.grid
    d = np.asarray(d, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if d.shape != grid.shape:
        raise GridMismatch("data shapes do not match solution grid")
    row1, row2 = apply_lhs(sol, lam, p)
    r1 = row1 - d
    r2 = row2 - f
    return ResidualReport(
        row_max=(float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))),
        row_l2=(l2_norm(grid, r1), l2_norm(grid, r2)))


def derivative_families(sol: WholeField, lam: complex):
    """The weighted derivative tuples of the solution.

    S: (third gradient of rho, lam^{1/2} second gradient, lam rho);
    T: (second gradient of u, lam^{1/2} gradient, lam u).
    All derivatives spectral; lam^{1/2} is the principal root.
    """
    grid = sol.grid
    n = grid.dim
    mesh = grid.freq_mesh()
    sqrt_lam = np.sqrt(complex(lam))
    axes_u = tuple(range(1, n + 1))

    rho_hat = np.fft.fftn(sol.rho)
    u_hat = np.fft.fftn(sol.u, axes=axes_u)

    grad3 = np.empty((n, n, n) + grid.shape, dtype=complex)
    grad2 = np.empty((n, n) + grid.shape, dtype=complex)
    for j in range(n):
        for k in range(n):
            grad2[j, k] = np.fft.ifftn(-mesh[j] * mesh[k] * rho_hat)
            for m in range(n):
                grad3[j, k, m] = np.fft.ifftn(
                    -1j * mesh[j] * mesh[k] * mesh[m] * rho_hat)

    ugrad2 = np.empty((n, n, n) + grid.shape, dtype=complex)
    ugrad1 = np.empty((n, n) + grid.shape, dtype=complex)
    for c in range(n):
        for j in range(n):
            ugrad1[c, j] = np.fft.ifftn(1j * mesh[j] * u_hat[c])
            for k in range(n):
                ugrad2[c, j, k] = np.fft.ifftn(-mesh[j] * mesh[k] * u_hat[c])

    s_family = (grad3, sqrt_lam * grad2, lam * sol.rho)
    t_family = (ugrad2, sqrt_lam * ugrad1, lam * sol.u)
    return s_family, t_family


def family_norm(grid: BoxGrid, family) -> float:
    """Hilbert norm of a derivative tuple: RSS of the block L2 norms."""
    return float(np.sqrt(sum(l2_norm(grid, block) ** 2 for block in family)))


def band_limited_field(grid: BoxGrid, rng, kmax: int, components: int = 0):
    """Random smooth field with lattice support |k_i| <= kmax per axis."""
    m = grid.points_per_axis
    if kmax >= m // 2:
        raise ValueError("kmax must stay below the Nyquist mode")
    shape = grid.shape if components == 0 else (components,) + grid.shape
    coeffs = np.zeros(shape, dtype=complex)
    k = np.fft.fftfreq(m, d=1.0 / m).astype(int)
    mask = np.abs(k) <= kmax
    idx = np.ix_(*([np.where(mask)[0]] * grid.dim))
    sub_shape = (mask.sum(),) * grid.dim
    if components == 0:
        coeffs[idx] = (rng.standard_normal(sub_shape)
                       + 1j * rng.standard_normal(sub_shape))
    else:
        for c in range(components):
            coeffs[(c,) + idx] = (rng.standard_normal(sub_shape)
                                  + 1j * rng.standard_normal(sub_shape))
    axes = tuple(range(len(shape) - grid.dim, len(shape)))
    return np.fft.ifftn(coeffs, axes=axes)
