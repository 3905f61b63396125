"""Oscillatory and radial quadrature helpers.

Every kernel and diagnostic integral in this package reduces, by isotropy,
to one of three one-dimensional forms:

* a plain radial integral  int_0^inf f(s) ds,
* a Fourier transform      int_0^inf cos(r s) f(s) ds  (or the sin analogue),
* a Hankel transform       int_0^inf J0(r s) f(s) ds.

The Hankel transforms are computed by splitting the axis at the zeros of
J0(r s), integrating lobe by lobe, and accelerating the alternating lobe
series by repeated averaging (Euler transform).  Tails of the spectra decay
only algebraically, so the acceleration is what makes 1e-8 tolerances
affordable.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate
from scipy.special import j0, jn_zeros

from .errors import NumericsError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)

# cache of the first K zeros of J0
_J0_ZEROS: np.ndarray = jn_zeros(0, 64)


def _j0_zeros(count: int) -> np.ndarray:
    global _J0_ZEROS
    if count > _J0_ZEROS.size:
        _J0_ZEROS = jn_zeros(0, count)
    return _J0_ZEROS[:count]


def euler_limit(partial_sums: np.ndarray) -> tuple[float, float]:
    """Limit of an alternating-tail sequence by repeated adjacent averaging.

    Returns (limit, error_estimate).
    """
    t = np.asarray(partial_sums, dtype=float)
    if t.size == 0:
        raise ValueError("no partial sums")
    if t.size == 1:
        return float(t[0]), np.inf
    prev = t[-1]
    while t.size > 1:
        t = 0.5 * (t[1:] + t[:-1])
        prev = t[-1]
    return float(t[0]), abs(float(t[0]) - float(prev))


def radial_integral(f, scales=(), rel_tol: float = 1e-8, abs_tol: float = 1e-14) -> float:
    """Adaptive int_0^inf f(s) ds with break points at the given scales."""
    pts = sorted(s for s in scales if np.isfinite(s) and s > 0)
    cut = pts[-1] * 4.0 if pts else 1.0
    inner, _ = integrate.quad(f, 0.0, cut, points=pts or None,
                              epsrel=rel_tol, epsabs=abs_tol, limit=200)
    outer, _ = integrate.quad(f, cut, np.inf, epsrel=rel_tol, epsabs=abs_tol, limit=200)
    return inner + outer


def fourier_cos(f, r: float, rel_tol: float = 1e-8, abs_tol: float = 1e-14) -> float:
    """int_0^inf cos(r s) f(s) ds for decaying f (QAWF)."""
    if r == 0.0:
        return radial_integral(f, rel_tol=rel_tol, abs_tol=abs_tol)
    val, _ = integrate.quad(f, 0.0, np.inf, weight="cos", wvar=r,
                            epsabs=max(abs_tol, 1e-12), limit=300, maxp1=300)
    return val


def fourier_sin(f, r: float, rel_tol: float = 1e-8, abs_tol: float = 1e-14) -> float:
    """int_0^inf sin(r s) f(s) ds for decaying f (QAWF)."""
    if r == 0.0:
        return 0.0
    val, _ = integrate.quad(f, 0.0, np.inf, weight="sin", wvar=r,
                            epsabs=max(abs_tol, 1e-12), limit=300, maxp1=300)
    return val


def hankel_j0(f, r: float, rel_tol: float = 1e-8, abs_tol: float = 1e-14,
              max_lobes: int = 512) -> float:
    """int_0^inf J0(r s) f(s) ds by adaptive per-lobe quadrature.

    ``f`` must be integrable at 0 and decay at infinity.  For r == 0 this is
    a plain radial integral.
    """
    if r == 0.0:
        return radial_integral(f, rel_tol=rel_tol, abs_tol=abs_tol)

    def g(s):
        return j0(r * s) * f(s)

    n = 48
    zeros = _j0_zeros(n) / r
    total, _ = integrate.quad(g, 0.0, zeros[0], epsrel=rel_tol, epsabs=abs_tol, limit=200)
    sums = []
    k = 0
    while True:
        for i in range(k, n - 1):
            lobe, _ = integrate.quad(g, zeros[i], zeros[i + 1],
                                     epsrel=rel_tol, epsabs=abs_tol, limit=50)
            total += lobe
            sums.append(total)
        limit, err = euler_limit(np.array(sums[-24:]))
        scale = max(abs(limit), abs_tol / rel_tol)
        if err <= max(abs_tol, rel_tol * scale):
            return limit
        if n >= max_lobes:
            raise NumericsError(
                f"Hankel transform did not converge within {max_lobes} lobes "
                f"(residual {err:.3e})")
        k = n - 1
        n = min(2 * n, max_lobes)
        zeros = _j0_zeros(n) / r


def _oscillatory_table(f, radii: np.ndarray, oscillator, zeros: np.ndarray,
                       head_panels: int = 28, chunk: int = 256) -> np.ndarray:
    """Shared panel scheme for cos/J0 transforms of a smooth profile.

    Panels follow the oscillator's zeros; the first (non-oscillatory) panel
    is subdivided geometrically so that spectra whose structure sits far
    inside the first lobe at small radii are still resolved.  The
    alternating lobe series is Euler-averaged over its last 24 terms.
    """
    radii = np.asarray(radii, dtype=float)
    out = np.empty(radii.shape, dtype=float)
    zero_mask = radii == 0.0
    if np.any(zero_mask):
        out[zero_mask] = radial_integral(f)
    rs = radii[~zero_mask]
    if rs.size == 0:
        return out

    # head-panel edges as fractions of the first zero: 0, 2^-27, ..., 1/2, 1
    fractions = np.concatenate([[0.0], 2.0 ** np.arange(-(head_panels - 1), 1.0)])
    vals = np.empty(rs.shape, dtype=float)
    for lo in range(0, rs.size, chunk):
        r = rs[lo:lo + chunk, None]
        edges = np.concatenate([fractions * zeros[0], zeros[1:]]) / r  # (m, ne)
        a = edges[:, :-1, None]
        b = edges[:, 1:, None]
        half = 0.5 * (b - a)
        nodes = 0.5 * (a + b) + half * _GL_NODES[None, None, :]
        g = oscillator(r[:, :, None] * nodes) * f(nodes)
        panels = np.sum(g * _GL_WEIGHTS[None, None, :], axis=2) * half[:, :, 0]
        head = np.sum(panels[:, :head_panels], axis=1)
        partial = head[:, None] + np.cumsum(panels[:, head_panels:], axis=1)
        tail = partial[:, -24:]
        while tail.shape[1] > 1:
            tail = 0.5 * (tail[:, 1:] + tail[:, :-1])
        vals[lo:lo + chunk] = tail[:, 0]
    out[~zero_mask] = vals
    return out


def fourier_cos_table(f, radii: np.ndarray, n_lobes: int = 80) -> np.ndarray:
    """Vectorized int_0^inf cos(r s) f(s) ds at many radii (smooth f)."""
    zeros = (np.arange(1, n_lobes + 1) - 0.5) * np.pi
    return _oscillatory_table(f, radii, np.cos, zeros)


def hankel_j0_table(f, radii: np.ndarray, n_lobes: int = 80) -> np.ndarray:
    """Vectorized int_0^inf J0(r s) f(s) ds at many radii (smooth f).

    Fixed-order Gauss-Legendre panels on each J0 lobe, Euler-accelerated;
    meant for kernel tabulation where the per-point cost of
    :func:`hankel_j0` would dominate.
    """
    return _oscillatory_table(f, radii, j0, _j0_zeros(n_lobes))
