import math

import numpy as np
import pytest

from slicegauss import OrthonormalFamily, SequenceVector
from slicegauss.rng import normal_block


def random_orthonormal_columns(m, gamma, seed):
    a = normal_block(seed, 0, gamma, m).T
    q, _ = np.linalg.qr(a)
    return np.ascontiguousarray(q[:, :gamma])


def explicit_family(columns):
    return OrthonormalFamily([SequenceVector.explicit(columns[:, i])
                              for i in range(columns.shape[1])])


@pytest.fixture
def geometric_pair():
    """Two exactly orthonormal sequence vectors with infinite support.

    u1: coordinate j = sqrt(3) / 2^j.
    u2: first coordinate -1/2, then coordinate j = 3 / 2^j for j >= 2.
    Both are unit vectors and <u1, u2> = 0 in l2, but every finite
    truncation pair has a nonzero inner product.
    """
    u1 = SequenceVector.geometric((), math.sqrt(3.0), 0.5)
    u2 = SequenceVector.geometric((-0.5,), 3.0, 0.5)
    return u1, u2
