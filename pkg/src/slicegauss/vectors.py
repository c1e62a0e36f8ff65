"""Square-summable sequence vectors, truncation, and orthonormalization.

A ``SequenceVector`` is either finitely supported (an explicit coordinate
prefix) or carries a geometric tail: coordinate j equals
``scale * ratio**j`` for every j beyond the prefix (1-based j, |ratio| < 1).
The geometric rule keeps every inner product and tail norm in closed form,
so orthonormality of infinite-support families can be validated exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFamily, InvalidFamily, TruncationDepthNotFound


@dataclass(frozen=True)
class SequenceVector:
    prefix: tuple = ()
    scale: float = 0.0
    ratio: float = 0.0
    norm_sq: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(c) for c in self.prefix))
        if self.scale != 0.0 and not abs(self.ratio) < 1.0:
            raise ValueError(f"geometric tail needs |ratio| < 1, got {self.ratio}")
        object.__setattr__(self, "norm_sq", self.tail_norm_sq(0) )

    @classmethod
    def explicit(cls, coords):
        return cls(prefix=tuple(coords))

    @classmethod
    def geometric(cls, prefix, scale, ratio):
        return cls(prefix=tuple(prefix), scale=float(scale), ratio=float(ratio))

    @property
    def has_tail(self):
        return self.scale != 0.0

    @property
    def support(self):
        """Length of the explicit part; None if the tail is infinite."""
        return None if self.has_tail else len(self.prefix)

    def coordinate(self, j):
        """1-based coordinate j."""
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        if self.has_tail:
            return self.scale * self.ratio ** j
        return 0.0

    def truncate(self, n):
        """First n coordinates as an array, plus the exact tail norm."""
        if n < 1:
            raise ValueError("truncation length must be >= 1")
        m = len(self.prefix)
        out = np.zeros(n)
        out[: min(m, n)] = self.prefix[: min(m, n)]
        if self.has_tail and n > m:
            j = np.arange(m + 1, n + 1)
            out[m:n] = self.scale * self.ratio ** j
        return out, math.sqrt(self.tail_norm_sq(n))

    def tail_norm_sq(self, n):
        """Exact squared norm of the coordinates beyond index n."""
        m = len(self.prefix)
        total = sum(c * c for c in self.prefix[n:]) if n < m else 0.0
        if self.has_tail:
            start = max(n, m) + 1
            r2 = self.ratio * self.ratio
            total += self.scale ** 2 * self.ratio ** (2 * start) / (1.0 - r2)
        return total

    def inner(self, other):
        """Exact l2 inner product with another SequenceVector."""
        m = max(len(self.prefix), len(other.prefix))
        total = sum(self.coordinate(j) * other.coordinate(j) for j in range(1, m + 1))
        if self.has_tail and other.has_tail:
            rr = self.ratio * other.ratio
            total += self.scale * other.scale * rr ** (m + 1) / (1.0 - rr)
        return total


@dataclass(frozen=True)
class OrthonormalFamily:
    members: tuple
    tolerance: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        for i, u in enumerate(self.members):
            for j, v in enumerate(self.members[: i + 1]):
                target = 1.0 if i == j else 0.0
                err = abs(u.inner(v) - target)
                if err > self.tolerance:
                    raise InvalidFamily(
                        f"<u[{i}], u[{j}]> off by {err:.3e} (tolerance {self.tolerance:.1e})"
                    )

    @property
    def gamma(self):
        return len(self.members)

    def truncation_matrix(self, n):
        """n x gamma matrix whose columns are the truncations."""
        cols = [u.truncate(n)[0] for u in self.members]
        return np.column_stack(cols) if cols else np.zeros((n, 0))


@dataclass(frozen=True)
class FiniteFrame:
    dimension: int
    columns: np.ndarray  # n x gamma truncations
    basis: np.ndarray    # n x gamma orthonormalized

    @classmethod
    def from_columns(cls, columns):
        columns = np.asarray(columns, dtype=float)
        basis = gram_schmidt(columns)
        return cls(dimension=columns.shape[0], columns=columns, basis=basis)


def gram_schmidt(columns, rcond=1e-10):
    """Orthonormalize the columns of a matrix, preserving prefix spans.

    Modified Gram-Schmidt with one re-orthogonalization pass; matches the
    classical formulas to well below 1e-10 on separated inputs.
    """
    a = np.array(columns, dtype=float)
    if a.ndim != 2:
        a = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    n, g = a.shape
    if g == 0:
        return a
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] < rcond * s[0]:
        raise DegenerateFamily(
            f"singular value ratio {s[-1] / s[0]:.3e} below {rcond:.1e}"
        )
    q = np.empty_like(a)
    for i in range(g):
        v = a[:, i].copy()
        for _ in range(2):
            for j in range(i):
                v -= (q[:, j] @ v) * q[:, j]
        q[:, i] = v / np.linalg.norm(v)
    return q


def separation(vectors):
    """Min over i of the distance from vector i to the span of the rest.

    A single vector's separation is its norm; an empty family has
    separation +inf (min over an empty set).
    """
    cols = [np.asarray(v, dtype=float) for v in vectors]
    if not cols:
        return math.inf
    if len(cols) == 1:
        return float(np.linalg.norm(cols[0]))
    best = math.inf
    for i, v in enumerate(cols):
        rest = np.column_stack([c for j, c in enumerate(cols) if j != i])
        coef, *_ = np.linalg.lstsq(rest, v, rcond=None)
        best = min(best, float(np.linalg.norm(v - rest @ coef)))
    return best


def min_independent_truncation(family, tau, m_max):
    """Smallest m <= m_max whose truncations have separation >= tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    for m in range(1, m_max + 1):
        trunc = [u.truncate(m)[0] for u in family]
        if separation(trunc) >= tau:
            return m
    raise TruncationDepthNotFound(
        f"no truncation depth <= {m_max} reaches separation {tau}"
    )
