"""Uniform integrals over sphere-affine slices and their Gaussian limits."""

from .errors import (ConfigError, DegenerateFamily, DegenerateFrame,
                     DimensionMismatch, EmptySlice, InvalidDimensions,
                     InvalidFamily, QuadratureNonConvergent,
                     RankTooHighForQuadrature, SeparationLost, SliceGaussError,
                     TruncationDepthNotFound, UnsupportedClosedForm,
                     UnsupportedFamily, ZeroTruncation)
from .gaussian import (GaussianSpec, covariance_from_family,
                       gaussian_expectation, gaussian_sample,
                       marginal_covariance)
from .harness import (ConvergenceReport, Report, convergence_sweep, emit_csv,
                      emit_svg, gs_perturbation_study,
                      rotation_stability_study, tail_study)
from .integrands import (AffineCombination, CosLinear, GaussBump, Integrand,
                         Product, RampIndicator, TanhPoly, constant_one)
from .quadrature import (DisintegrationCoefficients,
                         disintegration_coefficients,
                         disintegrate_sphere_integral,
                         great_circle_integral_quadrature)
from .slice_geometry import (SliceGeometry, SliceSpec, build_geometry,
                             paper_center, sample_slice, slice_integral_mc,
                             sphere_surface_area)
from .vectors import (FiniteFrame, OrthonormalFamily, SequenceVector,
                      gram_schmidt, min_independent_truncation, separation)

__version__ = "0.1.0"
