"""Self-contained invariant suite behind the ``check`` subcommand.

Each check prints one PASS/FAIL line; the suite is seeded and finishes in
well under five minutes on a laptop.
"""

import math

import numpy as np

from . import rng
from .gaussian import (covariance_from_family, gaussian_expectation,
                       gaussian_sample, marginal_covariance)
from .harness import gs_perturbation_study, rotation_stability_study
from .integrands import CosLinear, GaussBump, constant_one
from .quadrature import (disintegration_coefficients,
                         disintegrate_sphere_integral,
                         great_circle_integral_quadrature, log_kernel)
from .slice_geometry import (SliceSpec, build_geometry, sample_slice,
                             slice_integral_mc, sphere_surface_area)
from .vectors import OrthonormalFamily, SequenceVector, gram_schmidt, separation

_SEED = 20240817


def random_orthonormal_columns(m, gamma, stream):
    a = rng.normal_block(stream, 0, gamma, m).T
    q, _ = np.linalg.qr(a)
    return q[:, :gamma]


def random_explicit_family(m, gamma, stream):
    q = random_orthonormal_columns(m, gamma, stream)
    return OrthonormalFamily([SequenceVector.explicit(q[:, i])
                              for i in range(gamma)])


def check_gram_schmidt():
    q = random_orthonormal_columns(8, 4, rng.derive_seed(_SEED, "gs"))
    again = gram_schmidt(q)
    if np.max(np.abs(again - q)) > 1e-12:
        return False
    a = rng.normal_block(rng.derive_seed(_SEED, "gs2"), 0, 3, 5).T
    out = gram_schmidt(a)
    return np.max(np.abs(out.T @ out - np.eye(3))) <= 1e-10


def check_separation():
    e = np.eye(3)
    ok = abs(separation([e[:, 0], e[:, 1]]) - 1.0) < 1e-12
    ok &= separation([e[:, 0], e[:, 0]]) < 1e-12
    theta = math.pi / 6
    ok &= abs(separation([np.array([1.0, 0.0]),
                          np.array([math.cos(theta), math.sin(theta)])])
              - math.sin(theta)) < 1e-12
    return ok


def check_covariance_psd():
    for trial in range(100):
        stream = rng.derive_seed(_SEED, f"psd{trial}")
        gamma = 1 + trial % 5
        m = gamma + 1 + trial % 6
        family = random_explicit_family(m, gamma, stream)
        k = 1 + trial % min(m, 10)
        spec = covariance_from_family(family, k, np.zeros(gamma))
        if np.linalg.eigvalsh(spec.covariance).min() < -1e-10:
            return False
    return True


def check_marginal_identity():
    for trial in range(20):
        stream = rng.derive_seed(_SEED, f"marg{trial}")
        gamma = 1 + trial % 3
        m = gamma + 2 + trial % 5
        q = random_orthonormal_columns(m, gamma, stream)
        family = OrthonormalFamily([SequenceVector.explicit(q[:, i])
                                    for i in range(gamma)])
        sigma = np.eye(m) - q @ q.T
        for k in (1, m // 2, m):
            block = marginal_covariance(sigma, k)
            direct = covariance_from_family(family, k, np.zeros(gamma)).covariance
            if np.max(np.abs(block - direct)) > 1e-12:
                return False
    return True


def check_disintegration_normalization():
    family = OrthonormalFamily([SequenceVector.explicit([1.0, 0.0, 0.0])])
    value = great_circle_integral_quadrature(256, family, constant_one(3))
    return abs(value - 1.0) <= 1e-8


def check_sphere_disintegration():
    def inner(x):
        a_x = np.sqrt(np.clip(1.0 - np.einsum("ij,ij->i", x, x), 0.0, None))
        return np.array([sphere_surface_area(1, max(v, 1e-300)) for v in a_x])
    total = disintegrate_sphere_integral(3, 1, 1.0, inner)
    return abs(total - sphere_surface_area(2, 1.0)) <= 1e-6 * 4 * math.pi


def check_coefficient_limits():
    c = disintegration_coefficients(10 ** 4, 3, 1)
    return abs(c.a_nk * c.b_nk - 1.0) <= 1e-3


def check_kernel_domination():
    n, k = 2 * (3 + 2), 3
    y = np.linspace(0.0, math.sqrt(n) - 1e-9, 200)
    lk = log_kernel(y * y, n, k)
    return bool(np.all(lk <= -y * y / 4.0 + 1e-12))


def check_sampler_residuals():
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    spec = SliceSpec(family=family, p=(1.0,), n=64, k=2)
    geom = build_geometry(spec)
    x = sample_slice(geom, 2000, rng.derive_seed(_SEED, "resid"))
    u, _ = family.members[0].truncate(64)
    on_sphere = np.abs(np.linalg.norm(x - geom.center, axis=1) - geom.radius)
    on_plane = np.abs(x @ u - 1.0)
    tol = 1e-8 * math.sqrt(64)
    return bool(np.all(on_sphere <= tol) and np.all(on_plane <= tol))


def check_scale_translate():
    # sampling the great circle and mapping x -> r_n x + theta* lands on
    # the p-slice within on-slice residual tolerance
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    n = 64
    p_spec = SliceSpec(family=family, p=(1.0,), n=n, k=2)
    h_spec = SliceSpec(family=family, p=(0.0,), n=n, k=2)
    pg = build_geometry(p_spec)
    hg = build_geometry(h_spec)
    x = sample_slice(hg, 2000, rng.derive_seed(_SEED, "sln"))
    mapped = pg.scale_ratio * x + pg.center
    u, _ = family.members[0].truncate(n)
    tol = 1e-8 * math.sqrt(n)
    on_sphere = np.abs(np.linalg.norm(mapped - pg.center, axis=1) - pg.radius)
    on_plane = np.abs(mapped @ u - 1.0)
    return bool(np.all(on_sphere <= tol) and np.all(on_plane <= tol))


def check_closed_form_vs_mc():
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    spec = covariance_from_family(family, 2, (1.0,))
    f = CosLinear([1.0, 0.0])
    cf = gaussian_expectation(spec, f, "closed_form")
    est, se = gaussian_expectation(spec, f, "monte_carlo", count=40000,
                                   seed=rng.derive_seed(_SEED, "cfmc"))
    return abs(est - cf) <= 4.0 * max(se, 1e-12)


def check_quadrature_vs_closed_form():
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    spec = covariance_from_family(family, 2, (0.5,))
    f = GaussBump(1.0, np.zeros(2))
    cf = gaussian_expectation(spec, f, "closed_form")
    quad = gaussian_expectation(spec, f, "quadrature")
    return abs(cf - quad) <= 1e-10


def check_mc_vs_quadrature_slice():
    family = OrthonormalFamily([SequenceVector.explicit([1.0, 0.0])])
    f = CosLinear([0.0, 1.0])
    spec = SliceSpec(family=family, p=(0.0,), n=256, k=2)
    est, se = slice_integral_mc(spec, f, 20000, rng.derive_seed(_SEED, "mcq"))
    quad = great_circle_integral_quadrature(256, family, f)
    return abs(est - quad) <= 3.0 * se + 1e-6


def check_determinism():
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    spec = SliceSpec(family=family, p=(1.0,), n=128, k=2)
    f = CosLinear([1.0, 0.0])
    a = slice_integral_mc(spec, f, 5000, 7, threads=1)
    b = slice_integral_mc(spec, f, 5000, 7, threads=4)
    return a == b


def check_rotation_zero_epsilon():
    family = OrthonormalFamily([SequenceVector.explicit([0.6, 0.8])])
    spec = SliceSpec(family=family, p=(1.0,), n=64, k=2)
    report = rotation_stability_study(spec, CosLinear([1.0, 0.0]), [0.0],
                                      2000, _SEED)
    return report.rows[0][1] == 0.0


def check_gs_stability():
    base = random_orthonormal_columns(16, 3, rng.derive_seed(_SEED, "gsp"))
    report = gs_perturbation_study(base, [1e-2, 1e-4, 1e-6], _SEED)
    ratios = [row[2] for row in report.rows]
    return max(ratios) / min(ratios) <= 4.0


def check_gaussian_sample_support():
    family = OrthonormalFamily([SequenceVector.explicit([1.0, 0.0])])
    spec = covariance_from_family(family, 2, (0.0,))
    x = gaussian_sample(spec, 1000, rng.derive_seed(_SEED, "supp"))
    return bool(np.all(x[:, 0] == 0.0))


CHECKS = [
    ("gram_schmidt idempotent and orthonormal", check_gram_schmidt),
    ("separation measure on reference families", check_separation),
    ("covariance PSD on 100 random families", check_covariance_psd),
    ("marginal identity entrywise to 1e-12", check_marginal_identity),
    ("great-circle quadrature normalization", check_disintegration_normalization),
    ("sphere disintegration recovers surface area", check_sphere_disintegration),
    ("disintegration coefficients tend to one", check_coefficient_limits),
    ("kernel dominated by exp(-|y|^2/4)", check_kernel_domination),
    ("slice sampler on-slice residuals", check_sampler_residuals),
    ("scale-translate identity at sampler level", check_scale_translate),
    ("closed form agrees with Monte Carlo", check_closed_form_vs_mc),
    ("closed form agrees with Gauss-Hermite quadrature",
     check_quadrature_vs_closed_form),
    ("slice MC agrees with slice quadrature", check_mc_vs_quadrature_slice),
    ("thread-count independent estimates", check_determinism),
    ("rotation study exact zero at epsilon=0", check_rotation_zero_epsilon),
    ("Gram-Schmidt perturbation ratio band", check_gs_stability),
    ("degenerate direction pinned in samples", check_gaussian_sample_support),
]


def run_all():
    failures = 0
    for name, fn in CHECKS:
        try:
            ok = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return 0 if failures == 0 else 3
