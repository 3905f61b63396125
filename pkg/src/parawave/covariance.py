"""Transverse covariance kernels of the limiting white-noise field.

The limiting Brownian driver has spatial covariance

    gamma(x, y) = pi * int cos((x - y) . p) Phi(0, p) dp

over the transverse wavevectors p (1D or 2D).  Three regimes:

* FINITE        k_outer > 0, k_inner < inf: everything converges.
* RHO_INFINITE  k_outer > 0, no inner cutoff: the kernel limit still exists.
* ORIGIN_PINNED k_outer = 0, k_inner = inf: the variance diverges at large
  scales; only increments against the origin are meaningful.  The object is
  then the structure function

      D(r) = 2 pi * int (1 - cos(x . p)) Phi(0, p) dp,     |x| = r,

  which exists only for hurst < 1/2 and is an exact power law
  D(r) = const * r^(2*hurst + 1).  Cross values follow from the
  polarization identity gamma'(x, y) = (D(|x|) + D(|y|) - D(|x-y|)) / 2.

Kernels are tabulated once on a radial grid (Bessel-lobe quadrature, cubic
interpolation between samples) and are immutable afterwards; sharing one
kernel across threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import j0

from .errors import ConfigError, DivergenceError, NumericsError
from .quadrature import (euler_limit, fourier_cos, fourier_cos_table,
                         hankel_j0, hankel_j0_table, _j0_zeros)
from .spectra import SpectrumParams, spectrum_radial


class KernelMode(str, Enum):
    FINITE = "finite"
    RHO_INFINITE = "rho_infinite"
    ORIGIN_PINNED = "origin_pinned"


PSD_TOLERANCE = 1e-8  # smallest eigenvalue >= -PSD_TOLERANCE * ||matrix||


def kernel_mode_of(params: SpectrumParams) -> KernelMode:
    """Classify parameters into a kernel regime, rejecting degenerate ones."""
    if params.k_outer > 0.0:
        return KernelMode.FINITE if np.isfinite(params.k_inner) else KernelMode.RHO_INFINITE
    if np.isfinite(params.k_inner):
        raise ConfigError(
            "k_outer = 0 with a finite k_inner is not a supported regime; "
            "remove the inner cutoff (k_inner=inf) for the origin-pinned mode")
    if params.hurst >= 0.5:
        raise DivergenceError(
            f"origin-pinned kernel integral converges only for hurst < 1/2 "
            f"(got hurst={params.hurst})")
    return KernelMode.ORIGIN_PINNED


def gamma1_radial(params: SpectrumParams, r, dim_t: int = 2):
    """Covariance gamma(r) = pi * int cos(r . p) Phi(0, p) dp at lag |r|.

    At r = 0 this is the on-diagonal value gamma0.  Requires k_outer > 0;
    otherwise the integral diverges at small wavenumbers and the caller
    should switch to the origin-pinned structure function.
    """
    if params.k_outer == 0.0:
        raise DivergenceError(
            "gamma(r) diverges for k_outer = 0; use the origin-pinned mode "
            "(gamma_prime_structure / gamma_prime_cross)")
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise ConfigError("lag must be >= 0")
    out = np.empty(r_arr.shape, dtype=float)
    for i, ri in enumerate(r_arr.ravel()):
        if dim_t == 2:
            out.ravel()[i] = 2.0 * math.pi ** 2 * hankel_j0(
                lambda s: s * spectrum_radial(params, s), ri)
        elif dim_t == 1:
            out.ravel()[i] = 2.0 * math.pi * fourier_cos(
                lambda s: spectrum_radial(params, s), ri)
        else:
            raise ConfigError(f"dim_t must be 1 or 2, got {dim_t}")
    return out[0] if np.isscalar(r) or np.asarray(r).ndim == 0 else out


def _structure_constant(hurst: float) -> float:
    """c(H) with D(r) = amplitude * c(H) * r^(2H+1), by lobe quadrature.

    c(H) = 4 pi^2 * int_0^inf (1 - J0(u)) u^(-2H-2) du, split into the first
    Bessel lobe, the analytic algebraic tail, and an Euler-accelerated
    alternating remainder.
    """
    a = 2.0 * hurst + 2.0
    zeros = _j0_zeros(64)
    head, _ = integrate.quad(lambda u: (1.0 - j0(u)) * u ** (-a),
                             0.0, zeros[0], epsrel=1e-10, epsabs=1e-14, limit=200)
    tail_plain = zeros[0] ** (1.0 - a) / (a - 1.0)
    sums = []
    total = 0.0
    for i in range(len(zeros) - 1):
        lobe, _ = integrate.quad(lambda u: j0(u) * u ** (-a),
                                 zeros[i], zeros[i + 1],
                                 epsrel=1e-10, epsabs=1e-14, limit=50)
        total += lobe
        sums.append(total)
    osc, err = euler_limit(np.array(sums[-24:]))
    if err > 1e-10 * max(abs(head + tail_plain - osc), 1e-30):
        raise NumericsError(f"structure-function constant did not converge ({err:.2e})")
    return 4.0 * math.pi ** 2 * (head + tail_plain - osc)


_STRUCTURE_CONSTANTS: dict[float, float] = {}


def gamma_prime_structure(params: SpectrumParams, r):
    """Structure function D(r) of the origin-pinned field (2D transverse).

    Exact power law amplitude * c(hurst) * r^(2*hurst+1); hence the log-log
    slope is 2*hurst + 1 (5/3 at hurst = 1/3).  Raises for hurst >= 1/2,
    where the defining integral diverges.
    """
    mode = kernel_mode_of(params)
    if mode is not KernelMode.ORIGIN_PINNED:
        raise ConfigError(
            "structure function is defined for the origin-pinned regime "
            "(k_outer = 0, k_inner = inf)")
    c = _STRUCTURE_CONSTANTS.get(params.hurst)
    if c is None:
        c = _structure_constant(params.hurst)
        _STRUCTURE_CONSTANTS[params.hurst] = c
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ConfigError("lag must be >= 0")
    return params.amplitude * c * r_arr ** (2.0 * params.hurst + 1.0)


def gamma_prime_cross(params: SpectrumParams, x, y) -> float:
    """Origin-pinned cross covariance gamma'(x, y) for 2D transverse points.

    Computed through the polarization identity
    gamma'(x, y) = (D(|x|) + D(|y|) - D(|x - y|)) / 2, which pins the value
    to 0 whenever either argument is the origin.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (2,) or y.shape != (2,):
        raise ConfigError("origin-pinned cross covariance takes 2D points")
    dx = float(np.linalg.norm(x))
    dy = float(np.linalg.norm(y))
    dxy = float(np.linalg.norm(x - y))
    d = gamma_prime_structure(params, np.array([dx, dy, dxy]))
    return 0.5 * float(d[0] + d[1] - d[2])


@dataclass
class CovarianceKernel:
    """Tabulated transverse kernel, plus optional dense grid matrix.

    ``table`` holds gamma(r) samples for the stationary modes and D(r)
    samples for the origin-pinned mode, on the uniform grid ``r_table``.
    """

    mode: KernelMode
    params: SpectrumParams
    dim_t: int
    gamma0: float | None
    r_table: np.ndarray
    table: np.ndarray
    grid_coords: np.ndarray | None = None
    grid_matrix: np.ndarray | None = None
    _spline: CubicSpline = field(default=None, repr=False)
    _factors: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self._spline is None:
            self._spline = CubicSpline(self.r_table, self.table)
        if self.mode is not KernelMode.ORIGIN_PINNED:
            if abs(self.table[0] - self.gamma0) > 1e-12 * abs(self.gamma0):
                raise NumericsError("radial table does not start at gamma0")
            bound = self.gamma0 * (1.0 + 1e-9) + 1e-12
            if np.any(np.abs(self.table) > bound):
                raise NumericsError(
                    "tabulated |gamma(r)| exceeds gamma0; kernel is not "
                    "positive definite")

    # -- radial evaluations ------------------------------------------------

    def _interp(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rmax = self.r_table[-1]
        if np.any(r > rmax * (1.0 + 1e-9)) or np.any(r < 0):
            raise ConfigError(
                f"lag outside tabulated range [0, {rmax:g}]")
        return self._spline(np.clip(r, 0.0, rmax))

    def gamma(self, r):
        """gamma(r) for the stationary modes (cubic-interpolated table)."""
        if self.mode is KernelMode.ORIGIN_PINNED:
            raise ConfigError("origin-pinned kernel has no stationary gamma(r); "
                              "use structure()/cross()")
        return self._interp(r)

    def structure(self, r):
        """D(r) for the origin-pinned mode."""
        if self.mode is not KernelMode.ORIGIN_PINNED:
            raise ConfigError("structure function is origin-pinned only")
        return self._interp(r)

    def cross(self, x, y) -> float:
        """Kernel value between two points (any mode)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if self.mode is KernelMode.ORIGIN_PINNED:
            dx = np.linalg.norm(x)
            dy = np.linalg.norm(y)
            dxy = np.linalg.norm(x - y)
            vals = self._interp(np.array([dx, dy, dxy]))
            return 0.5 * float(vals[0] + vals[1] - vals[2])
        return float(self._interp(np.linalg.norm(x - y)))

    def diagonal(self, coords: np.ndarray) -> np.ndarray:
        """Kernel diagonal gamma(x, x) at the given points.

        Constant gamma0 for the stationary modes, D(|x|) when pinned.
        ``coords`` has shape (npoints, dim_t).
        """
        coords = np.asarray(coords, dtype=float)
        radii = np.sqrt(np.sum(coords * coords, axis=-1))
        if self.mode is KernelMode.ORIGIN_PINNED:
            return self._interp(radii)
        return np.full(radii.shape, self.gamma0)

    # -- dense grid machinery ---------------------------------------------

    def matrix(self, coords: np.ndarray) -> np.ndarray:
        """Dense kernel matrix on points of shape (npoints, dim_t)."""
        coords = np.asarray(coords, dtype=float)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        if self.mode is KernelMode.ORIGIN_PINNED:
            d_self = self._interp(np.sqrt(np.sum(coords * coords, axis=-1)))
            m = 0.5 * (d_self[:, None] + d_self[None, :] - self._interp(dist))
        else:
            m = self._interp(dist)
        check_psd(m)
        return m

    def factor(self, coords: np.ndarray, cache_key=None) -> np.ndarray:
        """Square root F of the kernel matrix (M = F F^T), eigendecomposed.

        Negative roundoff eigenvalues are clipped at zero; for the pinned
        mode the origin row is forced to exact zero (it is analytically
        zero, so any residual is factorization noise).
        """
        if cache_key is not None and cache_key in self._factors:
            return self._factors[cache_key]
        m = self.matrix(coords)
        vals, vecs = np.linalg.eigh(m)
        fac = vecs * np.sqrt(np.clip(vals, 0.0, None))
        if self.mode is KernelMode.ORIGIN_PINNED:
            origin = np.flatnonzero(np.all(np.asarray(coords) == 0.0, axis=-1))
            fac[origin, :] = 0.0
        if cache_key is not None:
            self._factors[cache_key] = fac
        return fac

    def to_csv(self, path) -> None:
        """Write the radial table as ``r,gamma`` rows."""
        header = "r,structure" if self.mode is KernelMode.ORIGIN_PINNED else "r,gamma"
        data = np.column_stack([self.r_table, self.table])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


def check_psd(matrix: np.ndarray, tolerance: float = PSD_TOLERANCE) -> float:
    """Assert matrix is PSD up to -tolerance * ||matrix||; return min eig."""
    vals = np.linalg.eigvalsh(matrix)
    norm = float(np.max(np.abs(vals)))
    smallest = float(vals[0])
    if smallest < -tolerance * norm:
        raise NumericsError(
            f"kernel matrix is not positive semidefinite: smallest "
            f"eigenvalue {smallest:.3e} below -{tolerance:g} * {norm:.3e}")
    return smallest


def grid_points(grid) -> np.ndarray:
    """Transverse grid coordinates as (npoints, dim_t), origin included."""
    axes = [(np.arange(grid.n) - grid.n // 2) * grid.dx for _ in range(grid.dim_t)]
    if grid.dim_t == 1:
        return axes[0][:, None]
    xx = np.meshgrid(*axes, indexing="ij")
    return np.stack([c.ravel() for c in xx], axis=-1)


def build_kernel_grid(params: SpectrumParams, grid, with_matrix: bool = False,
                      table_points_min: int = 400) -> CovarianceKernel:
    """Tabulate the kernel for a transverse grid and optionally assemble
    the dense matrix used for exact screen synthesis.

    The radial table is sampled at spacing <= dx/2 out to the largest
    pairwise distance on the grid, then interpolated cubically.
    """
    mode = kernel_mode_of(params)
    if mode is KernelMode.ORIGIN_PINNED and grid.dim_t != 2:
        raise ConfigError(
            "origin-pinned kernels exist only for 2 transverse dimensions: "
            "in 1D the pinned integral diverges at small wavenumbers for "
            "every hurst in (0, 1)")
    r_max = (grid.n - 1) * grid.dx * math.sqrt(grid.dim_t)
    n_pts = max(table_points_min, int(math.ceil(2.0 * r_max / grid.dx)) + 1)
    r_tab = np.linspace(0.0, r_max, n_pts)

    if mode is KernelMode.ORIGIN_PINNED:
        table = np.asarray(gamma_prime_structure(params, r_tab), dtype=float)
        gamma0 = None
    elif grid.dim_t == 2:
        table = 2.0 * math.pi ** 2 * hankel_j0_table(
            lambda s: s * spectrum_radial(params, s), r_tab, n_lobes=120)
        gamma0 = float(table[0])
    else:
        table = 2.0 * math.pi * fourier_cos_table(
            lambda s: spectrum_radial(params, s), r_tab, n_lobes=120)
        gamma0 = float(table[0])

    kernel = CovarianceKernel(mode=mode, params=params, dim_t=grid.dim_t,
                              gamma0=gamma0, r_table=r_tab, table=table)
    if with_matrix:
        coords = grid_points(grid)
        kernel.grid_coords = coords
        kernel.grid_matrix = kernel.matrix(coords)
    return kernel
