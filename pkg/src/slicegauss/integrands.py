"""Catalog of bounded continuous test functions on R^k.

Each kind carries a certified sup bound and translates by parameter
rewriting, so shifted copies stay inside the catalog.  Evaluation is
vectorized: ``f(x)`` accepts a single point of length k or a batch of
shape (m, k).
"""

import numpy as np

from .errors import DimensionMismatch

_KINDS = {}


def _register(cls):
    _KINDS[cls.kind] = cls
    return cls


class Integrand:
    """Base class; concrete kinds implement _evaluate and translate."""

    kind = None
    uniformly_continuous = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.k:
            raise DimensionMismatch(f"expected dimension {self.k}, got {x.shape[1]}")
        out = self._evaluate(x)
        return float(out[0]) if single else out

    def translate(self, shift):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


@_register
class CosLinear(Integrand):
    """cos(<a, x> + b); sup bound 1."""

    kind = "cos_linear"
    sup_bound = 1.0

    def __init__(self, a, b=0.0):
        self.a = np.asarray(a, dtype=float)
        self.b = float(b)
        self.k = self.a.size

    def _evaluate(self, x):
        return np.cos(x @ self.a + self.b)

    def translate(self, shift):
        shift = np.asarray(shift, dtype=float)
        return CosLinear(self.a, self.b + self.a @ shift)

    def to_dict(self):
        return {"kind": self.kind, "a": self.a.tolist(), "b": self.b}


@_register
class GaussBump(Integrand):
    """exp(-c * ||x - m||^2); sup bound 1."""

    kind = "gauss_bump"
    sup_bound = 1.0

    def __init__(self, c, m):
        if c <= 0:
            raise ValueError("c must be positive")
        self.c = float(c)
        self.m = np.asarray(m, dtype=float)
        self.k = self.m.size

    def _evaluate(self, x):
        d = x - self.m
        return np.exp(-self.c * np.einsum("ij,ij->i", d, d))

    def translate(self, shift):
        return GaussBump(self.c, self.m - np.asarray(shift, dtype=float))

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "m": self.m.tolist()}


@_register
class RampIndicator(Integrand):
    """Piecewise-linear plateau in one coordinate.

    Equals 1 on (-m+1, m-1), 0 outside (-m, m), linear in between; applied
    to coordinate ``axis`` after an optional shift of that coordinate.
    """

    kind = "ramp_indicator"
    sup_bound = 1.0

    def __init__(self, m, axis=0, k=1, shift=0.0):
        if m < 1:
            raise ValueError("m must be >= 1")
        if not 0 <= axis < k:
            raise ValueError("axis out of range")
        self.m = float(m)
        self.axis = int(axis)
        self.k = int(k)
        self.shift = float(shift)

    def _evaluate(self, x):
        t = np.abs(x[:, self.axis] + self.shift)
        return np.clip(self.m - t, 0.0, 1.0)

    def translate(self, shift):
        shift = np.asarray(shift, dtype=float)
        return RampIndicator(self.m, self.axis, self.k, self.shift + shift[self.axis])

    def to_dict(self):
        return {"kind": self.kind, "m": self.m, "axis": self.axis,
                "k": self.k, "shift": self.shift}


@_register
class TanhPoly(Integrand):
    """tanh(q(x)) for a polynomial q of degree <= 2; sup bound 1."""

    kind = "tanh_poly"
    sup_bound = 1.0
    uniformly_continuous = True

    def __init__(self, const, linear, quad=None):
        self.const = float(const)
        self.linear = np.asarray(linear, dtype=float)
        self.k = self.linear.size
        if quad is None:
            quad = np.zeros((self.k, self.k))
        self.quad = np.asarray(quad, dtype=float)
        if self.quad.shape != (self.k, self.k):
            raise DimensionMismatch("quadratic coefficient shape mismatch")

    def _evaluate(self, x):
        q = self.const + x @ self.linear + np.einsum("ij,jk,ik->i", x, self.quad, x)
        return np.tanh(q)

    def translate(self, shift):
        s = np.asarray(shift, dtype=float)
        sym = self.quad + self.quad.T
        return TanhPoly(
            self.const + self.linear @ s + s @ self.quad @ s,
            self.linear + sym @ s,
            self.quad,
        )

    def to_dict(self):
        return {"kind": self.kind, "const": self.const,
                "linear": self.linear.tolist(), "quad": self.quad.tolist()}


@_register
class Product(Integrand):
    """Pointwise product; sup bound is the product of member bounds."""

    kind = "product"

    def __init__(self, members):
        members = tuple(members)
        if not members:
            raise ValueError("product needs at least one member")
        self.members = members
        self.k = members[0].k
        if any(m.k != self.k for m in members):
            raise DimensionMismatch("product members disagree on dimension")
        self.sup_bound = float(np.prod([m.sup_bound for m in members]))
        self.uniformly_continuous = all(m.uniformly_continuous for m in members)

    def _evaluate(self, x):
        out = np.ones(x.shape[0])
        for m in self.members:
            out *= m._evaluate(x)
        return out

    def translate(self, shift):
        return Product([m.translate(shift) for m in self.members])

    def to_dict(self):
        return {"kind": self.kind, "members": [m.to_dict() for m in self.members]}


@_register
class AffineCombination(Integrand):
    """Weighted sum; sup bound is sum of |w_i| * bound_i."""

    kind = "affine_combination"

    def __init__(self, weights, members):
        self.weights = np.asarray(weights, dtype=float)
        self.members = tuple(members)
        if self.weights.size != len(self.members):
            raise DimensionMismatch("one weight per member required")
        self.k = self.members[0].k
        if any(m.k != self.k for m in self.members):
            raise DimensionMismatch("members disagree on dimension")
        self.sup_bound = float(
            np.sum(np.abs(self.weights) * [m.sup_bound for m in self.members])
        )
        self.uniformly_continuous = all(m.uniformly_continuous for m in self.members)

    def _evaluate(self, x):
        out = np.zeros(x.shape[0])
        for w, m in zip(self.weights, self.members):
            out += w * m._evaluate(x)
        return out

    def translate(self, shift):
        return AffineCombination(self.weights,
                                 [m.translate(shift) for m in self.members])

    def to_dict(self):
        return {"kind": self.kind, "weights": self.weights.tolist(),
                "members": [m.to_dict() for m in self.members]}


def constant_one(k):
    """f identically 1 on R^k (cos of the zero functional)."""
    return CosLinear(np.zeros(k), 0.0)


def from_dict(d):
    """Build an integrand from its JSON descriptor."""
    kind = d.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown integrand kind {kind!r}")
    d = dict(d)
    d.pop("kind")
    if kind == "product":
        return Product([from_dict(m) for m in d["members"]])
    if kind == "affine_combination":
        return AffineCombination(d["weights"], [from_dict(m) for m in d["members"]])
    if kind == "tanh_poly":
        return TanhPoly(d.get("const", 0.0), d["linear"], d.get("quad"))
    return _KINDS[kind](**d)
