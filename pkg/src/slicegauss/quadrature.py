"""Deterministic sphere and slice integrals via disintegration.

A sphere integral over S^{N-1}(a) factors through the ball B_k(a) with
weight a / a_x, a_x = sqrt(a^2 - ||x||^2); the boundary singularity is
absorbed by the substitution (radius) = a sin(phi).  For great-circle
slices with eventually-zero constraint vectors, the same reduction yields
an integral of g(y) against the kernel (1 - ||y||^2/n)^((n-k-2)/2) over
B_{k-gamma}(sqrt(n)), with Gamma-function prefactors evaluated in log
space (the raw factors overflow near n = 350).
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import (InvalidDimensions, QuadratureNonConvergent,
                     UnsupportedFamily)
from .vectors import gram_schmidt

# radial cutoff for the effectively-Gaussian kernel: beyond |y| = 12 the
# e^{-y^2/4} envelope is below 3e-16
_KERNEL_CUTOFF = 12.0
_MAX_ORDER = 4096
_MAX_QUAD_DIM = 3


@dataclass(frozen=True)
class DisintegrationCoefficients:
    n: int
    k: int
    gamma: int
    log_a: float
    log_b: float

    @property
    def a_nk(self):
        return float(np.exp(self.log_a))

    @property
    def b_nk(self):
        return float(np.exp(self.log_b))


def disintegration_coefficients(n, k, gamma):
    """Log-space a_{n,k} and b_{n,k}; both tend to 1 as n grows."""
    if not (n > k >= gamma >= 0):
        raise InvalidDimensions(f"need n > k >= gamma >= 0, got {(n, k, gamma)}")
    half_nk = 0.5 * (n - k)
    expo = 0.5 * (k - gamma)
    log_a = gammaln(half_nk + expo) - gammaln(half_nk) - expo * math.log(half_nk)
    log_b = expo * math.log1p(-k / n)
    return DisintegrationCoefficients(n=n, k=k, gamma=gamma,
                                      log_a=float(log_a), log_b=float(log_b))


def _refine(estimate, tol, label):
    """Run ``estimate(order)`` with order doubling until stable."""
    order = 32
    prev = estimate(order)
    while order <= _MAX_ORDER:
        order *= 2
        cur = estimate(order)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureNonConvergent(
        f"{label}: last refinement moved by {abs(cur - prev):.3e}"
    )


def _ball_quadrature(dim, limit, weight, integrand, tol, label):
    """Integral over the ball of radius ``limit`` in ``dim`` <= 3 dimensions.

    ``weight(r)`` is a radial factor (vectorized); ``integrand`` maps an
    (m, dim) batch of points to values.  Polar/spherical coordinates keep
    the domain a product of intervals, so tensor rules apply; the radial
    substitution r = limit * sin(phi) is used where a 1/sqrt boundary
    factor can appear upstream.
    """
    if dim == 1:
        def estimate(order):
            t, w = leggauss(order)
            y = limit * t
            vals = integrand(y[:, None]) * weight(np.abs(y))
            return limit * float(w @ vals)
        return _refine(estimate, tol, label)

    if dim == 2:
        def estimate(order):
            t, w = leggauss(order)
            r = 0.5 * limit * (t + 1.0)
            wr = 0.5 * limit * w
            m = 2 * order
            theta = 2.0 * np.pi * np.arange(m) / m
            pts = np.empty((r.size * m, 2))
            pts[:, 0] = np.outer(r, np.cos(theta)).ravel()
            pts[:, 1] = np.outer(r, np.sin(theta)).ravel()
            vals = integrand(pts).reshape(r.size, m).sum(axis=1) * (2.0 * np.pi / m)
            return float((wr * r * weight(r)) @ vals)
        return _refine(estimate, tol, label)

    if dim == 3:
        def estimate(order):
            t, w = leggauss(order)
            r = 0.5 * limit * (t + 1.0)
            wr = 0.5 * limit * w
            c, wc = leggauss(order)
            s = np.sqrt(1.0 - c * c)
            m = 2 * order
            phi = 2.0 * np.pi * np.arange(m) / m
            # angular grid on the unit sphere, weights wc * 2pi/m
            dirs = np.empty((c.size * m, 3))
            dirs[:, 0] = np.outer(s, np.cos(phi)).ravel()
            dirs[:, 1] = np.outer(s, np.sin(phi)).ravel()
            dirs[:, 2] = np.repeat(c, m)
            wang = np.repeat(wc, m) * (2.0 * np.pi / m)
            pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
            vals = integrand(pts).reshape(r.size, dirs.shape[0]) @ wang
            return float((wr * r * r * weight(r)) @ vals)
        return _refine(estimate, tol, label)

    raise InvalidDimensions(f"ball quadrature supports dim <= {_MAX_QUAD_DIM}")


def disintegrate_sphere_integral(n, k, a, inner, tol=1e-9):
    """Integral over B_k(a) of inner(x) * a / sqrt(a^2 - ||x||^2).

    This is the ball side of the sphere disintegration: with
    inner(x) = integral of f over the fiber sphere S^{n-k-1}(a_x), the
    result is the surface integral of f over S^{n-1}(a).  The boundary
    singularity is removed by the substitution (radius) = a sin(phi).
    """
    if not (n > k >= 1):
        raise InvalidDimensions(f"need n > k >= 1, got {(n, k)}")
    if k > _MAX_QUAD_DIM:
        raise InvalidDimensions(f"tensor quadrature capped at k = {_MAX_QUAD_DIM}")

    if k == 1:
        def estimate(order):
            t, w = leggauss(order)
            phi = 0.5 * np.pi * t  # (-pi/2, pi/2)
            x = a * np.sin(phi)
            return 0.5 * np.pi * a * float(w @ inner(x[:, None]))
        return _refine(estimate, tol, "sphere disintegration k=1")

    # k = 2, 3: radial substitution r = a sin(phi), phi in (0, pi/2);
    # r^{k-1} (a/a_x) dr = a (a sin phi)^{k-1} dphi
    def estimate(order):
        t, w = leggauss(order)
        phi = 0.25 * np.pi * (t + 1.0)
        r = a * np.sin(phi)
        wr = 0.25 * np.pi * a * w * r ** (k - 1)
        if k == 2:
            m = 2 * order
            theta = 2.0 * np.pi * np.arange(m) / m
            pts = np.empty((r.size * m, 2))
            pts[:, 0] = np.outer(r, np.cos(theta)).ravel()
            pts[:, 1] = np.outer(r, np.sin(theta)).ravel()
            vals = inner(pts).reshape(r.size, m).sum(axis=1) * (2.0 * np.pi / m)
            return float(wr @ vals)
        c, wc = leggauss(order)
        s = np.sqrt(1.0 - c * c)
        m = 2 * order
        ang = 2.0 * np.pi * np.arange(m) / m
        dirs = np.empty((c.size * m, 3))
        dirs[:, 0] = np.outer(s, np.cos(ang)).ravel()
        dirs[:, 1] = np.outer(s, np.sin(ang)).ravel()
        dirs[:, 2] = np.repeat(c, m)
        wang = np.repeat(wc, m) * (2.0 * np.pi / m)
        pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        vals = inner(pts).reshape(r.size, dirs.shape[0]) @ wang
        return float(wr @ vals)

    return _refine(estimate, tol, f"sphere disintegration k={k}")


def log_kernel(y_sq, n, k):
    """log of (1 - ||y||^2 / n)^((n-k-2)/2), -inf outside the ball."""
    out = np.full_like(y_sq, -np.inf)
    inside = y_sq < n
    out[inside] = 0.5 * (n - k - 2) * np.log1p(-y_sq[inside] / n)
    return out


def great_circle_integral_quadrature(n, family, f, tol=1e-9):
    """Normalized slice integral for p = 0 and support-<=k families.

    Every family member must be supported in the first k coordinates of
    f's domain.  Builds the orthonormal complement z of span(u) in R^k,
    sets g(y) = f(Z y), and evaluates

        (a_nk b_nk / (2 pi)^((k-gamma)/2))
            * int_{B_{k-gamma}(sqrt n)} g(y) (1 - ||y||^2/n)^((n-k-2)/2) dy
    """
    k = f.k
    members = list(family.members)
    gamma = len(members)
    if not (gamma <= k < n):
        raise InvalidDimensions(f"need gamma <= k < n, got {(gamma, k, n)}")
    cols = []
    for vec in members:
        if vec.support is None or vec.support > k:
            raise UnsupportedFamily("member support extends beyond the first "
                                    f"{k} coordinates")
        cols.append(vec.truncate(k)[0])
    dim = k - gamma
    if dim == 0:
        # family spans R^k: the limiting measure is the point mass at 0
        return float(f(np.zeros(k)))
    if dim > _MAX_QUAD_DIM:
        raise InvalidDimensions(f"k - gamma capped at {_MAX_QUAD_DIM}")

    if gamma == 0:
        z = np.eye(k)
    else:
        u = np.column_stack(cols)
        full = gram_schmidt(_complete_basis(u))
        z = full[:, gamma:]

    coef = disintegration_coefficients(n, k, gamma)
    prefactor = math.exp(coef.log_a + coef.log_b
                         - 0.5 * dim * math.log(2.0 * math.pi))

    def integrand(y):
        y_sq = np.einsum("ij,ij->i", y, y)
        return f(y @ z.T) * np.exp(log_kernel(y_sq, n, k))

    limit = min(math.sqrt(n), _KERNEL_CUTOFF)
    value = _ball_quadrature(dim, limit, lambda r: np.ones_like(r),
                             integrand, tol, "great-circle slice")
    return prefactor * value


def _complete_basis(u):
    """Columns of u followed by the identity, pruned to a full-rank set."""
    k, gamma = u.shape
    cols = [u[:, i] for i in range(gamma)]
    for i in range(k):
        cand = np.zeros(k)
        cand[i] = 1.0
        trial = np.column_stack(cols + [cand])
        s = np.linalg.svd(trial, compute_uv=False)
        if s[-1] > 1e-8 * s[0]:
            cols.append(cand)
        if len(cols) == k:
            break
    return np.column_stack(cols)
