"""Geometry of sphere-affine slices and uniform sampling on them.

The slice is S^{n-1}(sqrt(n)) intersected with the affine subspace
A_n = {x : <x, u^(i)_(n)> = p_i}.  Its exact center theta* is the
least-norm solution of the constraints; the slice is the sphere of radius
sqrt(n - ||theta*||^2) around theta* inside theta* + span(z)^perp, where
z is the orthonormalized frame of the truncations.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import rng
from .errors import DegenerateFrame, EmptySlice, ZeroTruncation
from .vectors import FiniteFrame, separation

SEPARATION_FLOOR = 1e-10
MAX_DIMENSION = 2 ** 20
# per-chunk sample budget for the MC driver, in doubles
_CHUNK_DOUBLES = 2 ** 22


@dataclass(frozen=True)
class SliceSpec:
    family: object   # OrthonormalFamily (gamma may be 0)
    p: tuple
    n: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if len(self.p) != self.family.gamma:
            raise ValueError("p must have one entry per family member")
        if not self.family.gamma < self.n:
            raise ValueError("need gamma < n")
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if self.n > MAX_DIMENSION:
            raise ValueError(f"n capped at {MAX_DIMENSION}")


@dataclass(frozen=True)
class SliceGeometry:
    n: int
    gamma: int
    frame: FiniteFrame       # truncation columns + orthonormal basis z
    center: np.ndarray       # theta*, least-norm point of A_n
    q: np.ndarray            # <theta*, z^(i)>
    radius: float
    scale_ratio: float       # r_n = radius / sqrt(n)

    @property
    def basis(self):
        return self.frame.basis


def build_geometry(spec):
    """Exact slice geometry from a SliceSpec; raises if infeasible."""
    n, g = spec.n, spec.family.gamma
    u = spec.family.truncation_matrix(n)
    p = np.asarray(spec.p)
    if g == 0:
        frame = FiniteFrame(dimension=n, columns=u, basis=u)
        center = np.zeros(n)
        q = np.zeros(0)
    else:
        if separation([u[:, i] for i in range(g)]) < SEPARATION_FLOOR:
            raise DegenerateFrame(
                f"truncations at n={n} have separation below {SEPARATION_FLOOR}"
            )
        frame = FiniteFrame.from_columns(u)
        gram = u.T @ u
        center = u @ np.linalg.solve(gram, p)
        q = frame.basis.T @ center
    center_sq = float(center @ center)
    if center_sq >= n:
        raise EmptySlice(f"||theta*||^2 = {center_sq:.6g} >= n = {n}")
    radius = math.sqrt(n - center_sq)
    return SliceGeometry(n=n, gamma=g, frame=frame, center=center, q=q,
                         radius=radius, scale_ratio=radius / math.sqrt(n))


def paper_center(spec):
    """Diagnostic center sum_i (p_i / ||u^(i)_(n)||^2) u^(i)_(n).

    Coincides with the exact least-norm center when the truncations are
    exactly orthogonal; in general the gap shrinks as n grows.
    """
    n = spec.n
    out = np.zeros(n)
    for pi, vec in zip(spec.p, spec.family.members):
        col, _ = vec.truncate(n)
        nsq = float(col @ col)
        if nsq == 0.0:
            raise ZeroTruncation(f"member truncates to zero at n={n}")
        out += (pi / nsq) * col
    return out


def sample_slice(geometry, count, seed, start=0):
    """Uniform points on the slice; sample i depends only on (seed, start+i).

    Each point is theta* + radius * w/||w|| with w standard normal in
    span(z)^perp (normals with the frame component projected out).
    """
    n = geometry.n
    w = rng.normal_block(seed, start, count, n)
    if geometry.gamma > 0:
        z = geometry.basis
        w -= (w @ z) @ z.T
    norms = np.linalg.norm(w, axis=1)
    return geometry.center + (geometry.radius / norms)[:, None] * w


def sphere_surface_area(d, a=1.0, log=False):
    """Surface area of S^d(a): c_d * a^d with c_d = 2 pi^((d+1)/2) / Gamma((d+1)/2).

    Computed in log space, so it neither overflows nor underflows out to
    d = 10^6; pass log=True for the log-value.
    """
    if a <= 0:
        raise ValueError("radius must be positive")
    log_area = (math.log(2.0) + 0.5 * (d + 1) * math.log(math.pi)
                - gammaln(0.5 * (d + 1)) + d * math.log(a))
    return log_area if log else float(np.exp(log_area))


def slice_values(geometry, f, count, seed, k, start=0, threads=1):
    """f applied to the first k coordinates of ``count`` slice samples.

    Chunked so the (chunk x n) sample block stays at desk scale; the value
    array is identical for any chunking or thread count because the sample
    stream is counter-based.
    """
    chunk = max(1, _CHUNK_DOUBLES // geometry.n)
    values = np.empty(count)

    def fill(lo):
        hi = min(lo + chunk, count)
        x = sample_slice(geometry, hi - lo, seed, start=start + lo)
        values[lo:hi] = f(x[:, :k])

    offsets = range(0, count, chunk)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, offsets))
    else:
        for lo in offsets:
            fill(lo)
    return values


def slice_integral_mc(spec, f, count, seed, threads=1):
    """Monte Carlo estimate of the slice average of f, with standard error."""
    geometry = build_geometry(spec)
    values = slice_values(geometry, f, count, seed, spec.k, threads=threads)
    est = float(np.sum(values) / count)
    se = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return est, se
