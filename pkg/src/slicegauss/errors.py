"""Exception types shared across the package."""


class SliceGaussError(Exception):
    """Base class for all slicegauss errors."""


class DegenerateFamily(SliceGaussError):
    """Input vectors are numerically linearly dependent."""


class InvalidFamily(SliceGaussError):
    """Family fails the orthonormality tolerance."""


class TruncationDepthNotFound(SliceGaussError):
    """No truncation depth up to m_max reaches the requested separation."""


class UnsupportedClosedForm(SliceGaussError):
    """No closed-form Gaussian expectation for this integrand."""


class RankTooHighForQuadrature(SliceGaussError):
    """Covariance rank exceeds the tensor-quadrature cap."""


class DegenerateFrame(SliceGaussError):
    """Truncated constraint vectors are nearly dependent at this dimension."""


class EmptySlice(SliceGaussError):
    """The sphere does not meet the affine subspace."""


class ZeroTruncation(SliceGaussError):
    """A constraint vector truncates to zero."""


class QuadratureNonConvergent(SliceGaussError):
    """Successive quadrature refinements failed to settle within tolerance."""


class UnsupportedFamily(SliceGaussError):
    """Family violates the support restriction of the requested routine."""


class SeparationLost(SliceGaussError):
    """A perturbation pushed the family below its separation floor."""


class DimensionMismatch(SliceGaussError):
    """Vector length does not match the expected dimension."""


class InvalidDimensions(SliceGaussError):
    """Dimension parameters violate the routine's preconditions."""


class ConfigError(SliceGaussError):
    """Experiment configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"invalid config field '{field}': {message}")
