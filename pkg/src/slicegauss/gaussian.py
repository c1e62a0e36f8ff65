"""Possibly rank-deficient Gaussian measures on R^k.

The covariance of the limiting measure for an orthonormal constraint
family u^(1), ..., u^(gamma) is

    L = I_k - sum_i ||u^(i)_(k)||^2 P(u^(i)_(k)) = I_k - U_k U_k^T,

where U_k stacks the length-k truncations; the mean is U_k p.  L can have
nontrivial kernel (exactly zero eigenvalues when a truncation has unit
norm), so sampling and quadrature work inside the eigenspace of positive
eigenvalues only.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss

from . import rng
from .errors import RankTooHighForQuadrature, UnsupportedClosedForm
from .integrands import AffineCombination, CosLinear, GaussBump, Product

EIGENVALUE_FLOOR = 1e-10
QUADRATURE_MAX_RANK = 3
QUADRATURE_ORDER = 64


@dataclass(frozen=True)
class GaussianSpec:
    mean: np.ndarray
    covariance: np.ndarray
    eigenvalues: np.ndarray = field(init=False)   # descending, clipped at 0
    eigenvectors: np.ndarray = field(init=False)  # columns match eigenvalues

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise ValueError("covariance shape does not match mean length")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ValueError("covariance is not symmetric to 1e-12")
        lam, vec = np.linalg.eigh(cov)
        if lam.min() < -EIGENVALUE_FLOOR:
            raise ValueError(f"covariance has eigenvalue {lam.min():.3e} < -1e-10")
        order = np.argsort(lam)[::-1]
        lam = np.clip(lam[order], 0.0, None)
        lam[lam <= EIGENVALUE_FLOOR] = 0.0
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", vec[:, order])

    @property
    def k(self):
        return self.mean.size

    @property
    def rank(self):
        return int(np.count_nonzero(self.eigenvalues))


def covariance_from_family(family, k, p):
    """GaussianSpec with mean U_k p and covariance I_k - U_k U_k^T."""
    p = np.asarray(p, dtype=float)
    if p.size != family.gamma:
        raise ValueError("p must have one entry per family member")
    u = family.truncation_matrix(k)
    mean = u @ p
    cov = np.eye(k) - u @ u.T
    return GaussianSpec(mean=mean, covariance=cov)


def marginal_covariance(sigma, k):
    """Top-left k x k block of a PSD covariance (marginal onto R^k)."""
    sigma = np.asarray(sigma, dtype=float)
    return sigma[:k, :k].copy()


def gaussian_sample(spec, count, seed, start=0):
    """Draw ``count`` points; sample i is a pure function of (seed, start+i)."""
    r = spec.rank
    if r == 0:
        return np.tile(spec.mean, (count, 1))
    xi = rng.normal_block(seed, start, count, r)
    scaled = spec.eigenvectors[:, :r] * np.sqrt(spec.eigenvalues[:r])
    return spec.mean + xi @ scaled.T


def _closed_form(spec, f):
    if isinstance(f, CosLinear):
        a, b = f.a, f.b
        return float(np.cos(a @ spec.mean + b) * np.exp(-0.5 * a @ spec.covariance @ a))
    if isinstance(f, GaussBump):
        # E exp(-c||x-m||^2) = exp(-c d^T (I+2cL)^{-1} d) / sqrt(det(I+2cL))
        k = spec.k
        a = np.eye(k) + 2.0 * f.c * spec.covariance
        d = spec.mean - f.m
        sol = np.linalg.solve(a, d)
        sign, logdet = np.linalg.slogdet(a)
        return float(np.exp(-f.c * d @ sol - 0.5 * logdet))
    if isinstance(f, AffineCombination):
        return float(sum(w * _closed_form(spec, m)
                         for w, m in zip(f.weights, f.members)))
    if isinstance(f, Product):
        if all(isinstance(m, CosLinear) for m in f.members):
            # prod cos(t_i) = 2^-m sum over sign patterns of cos(sum s_i t_i)
            n = len(f.members)
            total = 0.0
            for bits in range(2 ** n):
                signs = [1.0 if bits >> i & 1 else -1.0 for i in range(n)]
                a = sum(s * m.a for s, m in zip(signs, f.members))
                b = sum(s * m.b for s, m in zip(signs, f.members))
                total += _closed_form(spec, CosLinear(a, b))
            return total / 2 ** n
        if all(isinstance(m, GaussBump) for m in f.members):
            # merge into one bump: sum_i c_i ||x-m_i||^2 = S||x-mbar||^2 + K
            s = sum(m.c for m in f.members)
            mbar = sum(m.c * m.m for m in f.members) / s
            const = sum(m.c * m.m @ m.m for m in f.members) - s * mbar @ mbar
            return float(np.exp(-const) * _closed_form(spec, GaussBump(s, mbar)))
    raise UnsupportedClosedForm(f"no closed form for kind {f.kind!r}")


def _quadrature(spec, f):
    r = spec.rank
    if r > QUADRATURE_MAX_RANK:
        raise RankTooHighForQuadrature(f"rank {r} exceeds {QUADRATURE_MAX_RANK}")
    if r == 0:
        return float(f(spec.mean))
    nodes, weights = hermgauss(QUADRATURE_ORDER)
    axes = spec.eigenvectors[:, :r] * np.sqrt(2.0 * spec.eigenvalues[:r])
    grids = np.meshgrid(*([nodes] * r), indexing="ij")
    t = np.stack([g.ravel() for g in grids], axis=1)
    w = np.ones(t.shape[0])
    for g in np.meshgrid(*([weights] * r), indexing="ij"):
        w *= g.ravel()
    x = spec.mean + t @ axes.T
    return float(w @ f(x) / np.pi ** (r / 2.0))


def gaussian_expectation(spec, f, method="closed_form", count=None, seed=None):
    """Expectation of f under the Gaussian measure.

    method 'closed_form' and 'quadrature' return a float; 'monte_carlo'
    (requires count and seed) returns (estimate, standard_error).
    """
    if method == "closed_form":
        return _closed_form(spec, f)
    if method == "quadrature":
        return _quadrature(spec, f)
    if method == "monte_carlo":
        if count is None or seed is None:
            raise ValueError("monte_carlo needs count and seed")
        values = f(gaussian_sample(spec, count, seed))
        est = float(np.sum(values) / count)
        se = float(np.std(values, ddof=1) / np.sqrt(count)) if count > 1 else 0.0
        return est, se
    raise ValueError(f"unknown method {method!r}")
