"""Turbulence spectral densities and their diagnostic integrals.

The spectra are isotropic densities Phi(kappa) on R^(1+d) wavevectors
kappa = (xi, p), where xi is conjugate to the propagation coordinate and p
to the d transverse coordinates (d = 1 or 2).  Everything is expressed in
non-dimensional units: ``k_outer`` is the wavenumber of outer-scale
saturation, ``k_inner`` the inverse inner scale, and ``amplitude`` the
overall constant (the normalization is a free choice, so it is exposed as
a parameter rather than pinned to a physical value).

Three variants:

* ``BOUNDED_POWER_LAW``:   A (k_outer^2 + |kappa|^2)^(-hurst-3/2)
                             * (1 + |kappa|^2/k_inner^2)^(-2)
* ``VON_KARMAN``:          A (k_outer^2 + |kappa|^2)^(-11/6)
                             * exp(-|kappa|^2 / (5.92 k_inner)^2)
* ``HILL``:                von Karman times the high-wavenumber bump factor
                           1 + 1.802 q - 0.254 q^(7/6), q = |kappa|/(3.3 k_inner),
                           with cutoff 3.3 k_inner.

The Hill bump factor eventually goes negative (far beyond the exponential
cutoff); it is clamped to zero there so the density stays admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import sici, itj0y0

from .errors import ConfigError, DivergenceError
from .quadrature import fourier_sin, hankel_j0, radial_integral


class Variant(str, Enum):
    VON_KARMAN = "von_karman"
    HILL = "hill"
    BOUNDED_POWER_LAW = "bounded_power_law"


VON_KARMAN_CUTOFF = 5.92  # exponential cutoff wavenumber, in units of k_inner
HILL_CUTOFF = 3.3


@dataclass(frozen=True)
class SpectrumParams:
    """Parameters of one spectral density.

    k_inner may be ``inf`` (no inner-scale cutoff).  k_outer == 0 removes
    the outer-scale saturation; several integrals then only exist in the
    origin-pinned sense (see the covariance module).
    """

    variant: Variant = Variant.BOUNDED_POWER_LAW
    amplitude: float = 1.0
    hurst: float = 1.0 / 3.0
    k_outer: float = 1.0
    k_inner: float = math.inf

    def __post_init__(self):
        if not (0.0 < self.hurst < 1.0):
            raise ConfigError(f"hurst exponent must lie in (0, 1), got {self.hurst}")
        if self.amplitude <= 0.0 or not np.isfinite(self.amplitude):
            raise ConfigError(f"amplitude must be positive and finite, got {self.amplitude}")
        if self.k_outer < 0.0 or not np.isfinite(self.k_outer):
            raise ConfigError(f"k_outer must be finite and >= 0, got {self.k_outer}")
        if self.k_inner <= 0.0:
            raise ConfigError(f"k_inner must be positive, got {self.k_inner}")
        if self.variant is not Variant.BOUNDED_POWER_LAW and self.hurst != 1.0 / 3.0:
            raise ConfigError(
                f"{self.variant.value} fixes the spectral exponent to hurst=1/3")
        if np.isfinite(self.k_inner) and self.k_outer >= self.k_inner:
            raise ConfigError(
                f"scale separation requires k_outer < k_inner "
                f"(got {self.k_outer} >= {self.k_inner})")

    @classmethod
    def bounded_power_law(cls, amplitude=1.0, hurst=1.0 / 3.0, k_outer=1.0,
                          k_inner=math.inf) -> "SpectrumParams":
        return cls(Variant.BOUNDED_POWER_LAW, amplitude, hurst, k_outer, k_inner)

    @classmethod
    def von_karman(cls, cn2=1.0, outer_scale=math.inf, inner_scale=0.0,
                   fresnel_length=1.0) -> "SpectrumParams":
        """Von Karman spectrum from physical scales, non-dimensionalized once.

        Wavenumbers are rescaled by the Fresnel length: the saturation
        wavenumber 2*pi/outer_scale and the inverse inner scale both get a
        factor fresnel_length.
        """
        k_outer = 2.0 * math.pi * fresnel_length / outer_scale
        k_inner = fresnel_length / inner_scale if inner_scale > 0 else math.inf
        return cls(Variant.VON_KARMAN, 0.033 * cn2, 1.0 / 3.0, k_outer, k_inner)

    @classmethod
    def hill(cls, cn2=1.0, outer_scale=math.inf, inner_scale=0.0,
             fresnel_length=1.0) -> "SpectrumParams":
        if inner_scale <= 0:
            raise ConfigError("Hill spectrum requires a positive inner scale")
        k_outer = 2.0 * math.pi * fresnel_length / outer_scale
        k_inner = fresnel_length / inner_scale
        return cls(Variant.HILL, 0.033 * cn2, 1.0 / 3.0, k_outer, k_inner)

    def with_amplitude(self, amplitude: float) -> "SpectrumParams":
        return replace(self, amplitude=amplitude)


def hill_bump(params: SpectrumParams, k) -> np.ndarray:
    """Hill bump factor before clamping (negative far past the cutoff)."""
    q = np.asarray(k, dtype=float) / (HILL_CUTOFF * params.k_inner)
    return 1.0 + 1.802 * q - 0.254 * q ** (7.0 / 6.0)


def spectrum_radial(params: SpectrumParams, k) -> np.ndarray:
    """Phi as a function of |kappa| (the spectra are isotropic)."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    with np.errstate(divide="ignore"):
        base = params.amplitude * (params.k_outer ** 2 + k2) ** (-params.hurst - 1.5)
    if params.variant is Variant.BOUNDED_POWER_LAW:
        if np.isfinite(params.k_inner):
            base = base * (1.0 + k2 / params.k_inner ** 2) ** (-2.0)
        return base
    cutoff = VON_KARMAN_CUTOFF if params.variant is Variant.VON_KARMAN else HILL_CUTOFF
    if np.isfinite(params.k_inner):
        base = base * np.exp(-k2 / (cutoff * params.k_inner) ** 2)
    if params.variant is Variant.HILL:
        base = base * np.clip(hill_bump(params, k), 0.0, None)
    return base


def eval_spectrum(params: SpectrumParams, kappa) -> np.ndarray:
    """Phi(kappa) for wavevectors with components (xi, p); p has 1 or 2 axes.

    ``kappa`` is an array whose last axis holds the 2 or 3 components.
    """
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape[-1] not in (2, 3):
        raise ConfigError(
            f"wavevector needs 2 or 3 components, got {kappa.shape[-1]}")
    if not np.all(np.isfinite(kappa)):
        raise ConfigError("non-finite wavevector")
    return spectrum_radial(params, np.sqrt(np.sum(kappa * kappa, axis=-1)))


def eval_transverse(params: SpectrumParams, p) -> np.ndarray:
    """Phi(0, p): the xi = 0 slice entering every transverse covariance.

    ``p`` is a single transverse wavevector (scalar or length-1/2 vector)
    or an array of them with the components on the last axis.
    """
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ConfigError("non-finite wavevector")
    if p.ndim == 0:
        k = np.abs(p)
    elif p.ndim == 1 and p.size in (1, 2):
        k = np.linalg.norm(p)
    elif p.shape[-1] in (1, 2):
        k = np.sqrt(np.sum(p * p, axis=-1))
    else:
        raise ConfigError("transverse wavevectors need 1 or 2 components")
    return spectrum_radial(params, k)


def _integral_scales(params: SpectrumParams) -> list[float]:
    scales = []
    if params.k_outer > 0:
        scales.append(params.k_outer)
    if np.isfinite(params.k_inner):
        scales.append(params.k_inner)
        if params.variant is not Variant.BOUNDED_POWER_LAW:
            cutoff = VON_KARMAN_CUTOFF if params.variant is Variant.VON_KARMAN else HILL_CUTOFF
            scales.append(cutoff * params.k_inner)
    return scales


def laplacian_moment(params: SpectrumParams) -> float:
    """int |p|^4 Phi(xi, p) dxi dp over R^3 (transverse-Laplacian variance).

    Reduces to (32 pi / 15) int k^6 Phi(k) dk.  Grows like
    k_inner^(4 - 2 hurst), which is what makes it diverge without an
    inner-scale cutoff.
    """
    if not np.isfinite(params.k_inner):
        raise DivergenceError(
            "laplacian moment diverges without an inner-scale cutoff "
            "(k_inner=inf): integrand ~ k^(3-2*hurst) at large k")

    def f(k):
        return k ** 6 * spectrum_radial(params, k)

    return 32.0 * math.pi / 15.0 * radial_integral(f, _integral_scales(params))


def _require_finite_variance(params: SpectrumParams) -> None:
    if params.k_outer == 0.0:
        raise DivergenceError(
            "total variance diverges when the outer-scale saturation is "
            "removed (k_outer=0): integrand ~ k^(-2*hurst-1) at small k; "
            "use the origin-pinned construction instead")


def total_variance(params: SpectrumParams, dim_t: int = 2) -> float:
    """int Phi(kappa) dkappa over R^(1+dim_t)."""
    _require_finite_variance(params)
    scales = _integral_scales(params)
    if dim_t == 2:
        return 4.0 * math.pi * radial_integral(
            lambda k: k * k * spectrum_radial(params, k), scales)
    if dim_t == 1:
        return 2.0 * math.pi * radial_integral(
            lambda k: k * spectrum_radial(params, k), scales)
    raise ConfigError(f"dim_t must be 1 or 2, got {dim_t}")


def longitudinal_corr(params: SpectrumParams, t: float, dim_t: int = 2) -> float:
    """R(t) = int e^(i t xi) Phi(xi, p) dxi dp (real: Phi is even in xi).

    R(0) is the total variance; integrability of R(t)/R(0) over t is the
    mixing diagnostic used to justify the white-noise limit.
    """
    if t < 0:
        raise ConfigError(f"lag must be >= 0, got {t}")
    _require_finite_variance(params)
    if t == 0.0:
        return total_variance(params, dim_t)
    if dim_t == 2:
        # spherical angular average of cos(t*xi) is sinc(t*k)
        return 4.0 * math.pi / t * fourier_sin(
            lambda k: k * spectrum_radial(params, k), t)
    if dim_t == 1:
        return 2.0 * math.pi * hankel_j0(
            lambda k: k * spectrum_radial(params, k), t)
    raise ConfigError(f"dim_t must be 1 or 2, got {dim_t}")


def longitudinal_corr_integral(params: SpectrumParams, t_max: float | None = None,
                               dim_t: int = 2) -> float:
    """int_0^T R(t)/R(0) dt; T=None takes the full half-line.

    Finite output certifies the integrable-correlation assumption for these
    parameters.  The t-integral is folded into the radial quadrature
    analytically (Si for dim_t=2, the J0 antiderivative for dim_t=1), so no
    oscillatory t-grid is needed.
    """
    _require_finite_variance(params)
    r0 = total_variance(params, dim_t)
    scales = _integral_scales(params)
    if dim_t == 2:
        if t_max is None:
            val = 2.0 * math.pi ** 2 * radial_integral(
                lambda k: k * spectrum_radial(params, k), scales)
        else:
            def f(k):
                si = sici(t_max * k)[0]
                return si * k * spectrum_radial(params, k)
            val = 4.0 * math.pi * radial_integral(f, scales)
    elif dim_t == 1:
        if t_max is None:
            val = 2.0 * math.pi * radial_integral(
                lambda k: spectrum_radial(params, k), scales)
        else:
            def f(k):
                return itj0y0(t_max * k)[0] * spectrum_radial(params, k)
            val = 2.0 * math.pi * radial_integral(f, scales)
    else:
        raise ConfigError(f"dim_t must be 1 or 2, got {dim_t}")
    return val / r0
