"""Counter-based random streams.

Every draw is a pure function of (seed, sample index), so disjoint index
ranges of the same logical stream can be generated on different workers and
concatenate to the single-threaded sequence bit for bit.

Philox is used as the counter-based generator.  ``Philox.advance(delta)``
skips ``4 * delta`` 64-bit outputs (one block of four words per step), and
``Generator.random`` consumes exactly one word per double, so per-sample
word budgets are padded to a multiple of four.
"""

import hashlib

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

# Smallest uniform fed to the inverse normal CDF; Generator.random can
# return exactly 0.0, which ndtri maps to -inf.
_MIN_UNIFORM = 2.0 ** -54


def _stride(dim):
    return ((dim + 3) // 4) * 4


def derive_seed(seed, tag):
    """Derive an independent 64-bit substream seed from (seed, tag)."""
    h = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def uniform_block(seed, start, count, dim):
    """Uniforms in [0,1) for samples [start, start+count), dim per sample."""
    stride = _stride(dim)
    bg = Philox(key=seed).advance(start * stride // 4)
    u = Generator(bg).random((count, stride))
    return np.ascontiguousarray(u[:, :dim])


def normal_block(seed, start, count, dim):
    """Standard normals for samples [start, start+count), dim per sample."""
    u = uniform_block(seed, start, count, dim)
    np.maximum(u, _MIN_UNIFORM, out=u)
    return ndtri(u)
