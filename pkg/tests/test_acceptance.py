"""Acceptance gate: one test (and one pass/fail line) per criterion."""

import json
import math
import time

import numpy as np
import pytest

from slicegauss import (CosLinear, GaussBump, OrthonormalFamily,
                        SeparationLost, SequenceVector, SliceSpec,
                        convergence_sweep, covariance_from_family,
                        disintegrate_sphere_integral,
                        disintegration_coefficients, gaussian_expectation,
                        great_circle_integral_quadrature,
                        gs_perturbation_study, marginal_covariance,
                        rotation_stability_study, slice_integral_mc,
                        sphere_surface_area, tail_study)
from slicegauss.cli import main as cli_main
from conftest import explicit_family, random_orthonormal_columns
from test_quadrature import lanczos_lgamma

SCHEDULE = [64, 256, 1024, 4096]
SAMPLES = 200_000


def report(num, detail):
    print(f"[criterion {num:02d}] PASS — {detail}")


def degenerate_family():
    return explicit_family(np.array([[0.6], [0.8]]))


class TestAcceptance:
    def test_criterion_01_degenerate_convergence(self):
        start = time.perf_counter()
        sweep = convergence_sweep(degenerate_family(), (1.0,), 2,
                                  CosLinear([1.0, 0.0]), SCHEDULE, SAMPLES,
                                  seed=42, threads=1)
        elapsed = time.perf_counter() - start
        ref = math.cos(0.6) * math.exp(-0.32)
        assert sweep.ref_method == "closed_form"
        assert sweep.gaussian_ref == pytest.approx(ref, abs=1e-12)
        n, est, se, _, _, abs_err = sweep.rows[-1]
        assert n == 4096
        assert abs_err <= 3 * se + 0.01
        assert elapsed <= 120.0
        report(1, f"n=4096 abs_error={abs_err:.2e} <= 3*SE+0.01="
                  f"{3 * se + 0.01:.2e}; single-threaded {elapsed:.1f}s")

    def test_criterion_02_classical_base_case(self):
        fam = OrthonormalFamily(())
        spec = SliceSpec(family=fam, p=(), n=4096, k=1)
        est, se = slice_integral_mc(spec, CosLinear([1.0]), SAMPLES, seed=42)
        err = abs(est - math.exp(-0.5))
        assert err <= 3 * se + 0.01
        report(2, f"gamma=0, n=4096: |est - e^-1/2|={err:.2e} "
                  f"<= {3 * se + 0.01:.2e}")

    def test_criterion_03_infinite_support_family(self):
        fam = OrthonormalFamily(
            [SequenceVector.geometric((), math.sqrt(3.0), 0.5)])
        f = GaussBump(1.0, np.zeros(2))
        spec = SliceSpec(family=fam, p=(0.0,), n=4096, k=2)
        est, se = slice_integral_mc(spec, f, SAMPLES, seed=42)
        gspec = covariance_from_family(fam, 2, (0.0,))
        ref = gaussian_expectation(gspec, f, "quadrature")
        err = abs(est - ref)
        assert err <= 3 * se + 0.01
        report(3, f"geometric u, n=4096: |est - quad ref|={err:.2e} "
                  f"<= {3 * se + 0.01:.2e}")

    def test_criterion_04_marginal_identity(self):
        worst = 0.0
        for trial in range(100):
            gamma = 1 + trial % 3
            m = max(gamma + 1, 2 + trial % 11)
            q = random_orthonormal_columns(m, gamma, 4000 + trial)
            fam = explicit_family(q)
            sigma = np.eye(m) - q @ q.T
            k = 1 + trial % m
            block = marginal_covariance(sigma, k)
            direct = covariance_from_family(fam, k, np.zeros(gamma)).covariance
            worst = max(worst, float(np.max(np.abs(block - direct))))
        assert worst <= 1e-12
        report(4, f"100 families: max entrywise gap {worst:.2e} <= 1e-12")

    def test_criterion_05_psd(self):
        worst = math.inf
        for trial in range(500):
            gamma = 1 + trial % 5
            m = gamma + 1 + trial % 7
            q = random_orthonormal_columns(m, gamma, 10_000 + trial)
            k = 1 + trial % 9
            cov = covariance_from_family(explicit_family(q), k,
                                         np.zeros(gamma)).covariance
            worst = min(worst, float(np.linalg.eigvalsh(cov).min()))
        assert worst >= -1e-10
        report(5, f"500 families: min eigenvalue {worst:.2e} >= -1e-10")

    def test_criterion_06_disintegration_identity(self):
        def fiber_area(n, k, a):
            def inner(x):
                a_x_sq = np.clip(a * a - np.einsum("ij,ij->i", x, x),
                                 0.0, None)
                d = n - 1 - k
                return sphere_surface_area(d, 1.0) * a_x_sq ** (d / 2.0)
            return inner

        worst = 0.0
        for n in range(3, 13):
            for k in (1, 2, 3):
                if k >= n - 1:
                    continue
                for a in (1.0, math.sqrt(n)):
                    got = disintegrate_sphere_integral(n, k, a,
                                                       fiber_area(n, k, a))
                    want = sphere_surface_area(n - 1, a)
                    worst = max(worst, abs(got / want - 1.0))
        base = disintegrate_sphere_integral(3, 1, 1.0, fiber_area(3, 1, 1.0))
        assert base == pytest.approx(4 * math.pi, rel=1e-9)
        assert worst <= 1e-6
        report(6, f"sigma(S^(N-1)(a)) recovered, worst rel error "
                  f"{worst:.2e} <= 1e-6; N=3,k=1 gives 4*pi")

    def test_criterion_07_quadrature_mc_agreement(self):
        n = 512
        configs = [
            (OrthonormalFamily(()), 1, CosLinear([1.0])),
            (OrthonormalFamily(()), 2, GaussBump(0.5, np.array([0.2, -0.1]))),
            (explicit_family(np.eye(2)[:, :1]), 2, GaussBump(1.0, np.zeros(2))),
            (explicit_family(np.array([[0.6], [0.8]])), 2,
             CosLinear([1.0, 0.5])),
            (explicit_family(np.eye(3)[:, :2]), 3, CosLinear([0.0, 0.0, 1.0],
                                                             0.3)),
        ]
        for i, (fam, k, f) in enumerate(configs):
            quad_val = great_circle_integral_quadrature(n, fam, f)
            spec = SliceSpec(family=fam, p=(0.0,) * fam.gamma, n=n, k=k)
            est, se = slice_integral_mc(spec, f, 100_000, seed=100 + i)
            assert abs(quad_val - est) <= 3 * se, (i, quad_val, est, se)
        report(7, "5 eventually-zero configs at n=512 within 3*SE")

    def test_criterion_08_coefficient_limits(self):
        n = 10_000
        worst = 0.0
        for k in (1, 2, 3, 4):
            for gamma in range(0, min(k, 2) + 1):
                c = disintegration_coefficients(n, k, gamma)
                worst = max(worst, abs(c.a_nk * c.b_nk - 1.0))
                half, expo = (n - k) / 2.0, (k - gamma) / 2.0
                oracle = math.exp(lanczos_lgamma(half + expo)
                                  - lanczos_lgamma(half)
                                  - expo * math.log(half))
                assert c.a_nk == pytest.approx(oracle, rel=1e-9)
        assert worst <= 0.01
        report(8, f"n=1e4, k<=4, gamma<=2: max |a*b - 1| = {worst:.2e} "
                  f"<= 0.01; a_nk matches log-Gamma oracle")

    def test_criterion_09_gram_schmidt_stability(self):
        base = random_orthonormal_columns(8, 3, 2024)
        study = gs_perturbation_study(base, [1e-2, 1e-4, 1e-6], seed=21)
        ratios = [row[2] for row in study.rows]
        band = max(ratios) / min(ratios)
        assert band <= 4.0
        angle = 1e-9
        parallel = np.array([[1.0, math.cos(angle)], [0.0, math.sin(angle)]])
        with pytest.raises(SeparationLost):
            gs_perturbation_study(parallel, [1e-2], seed=22)
        report(9, f"ratio band factor {band:.2f} <= 4; negative control "
                  f"raised SeparationLost")

    def test_criterion_10_rotation_stability(self):
        spec = SliceSpec(family=degenerate_family(), p=(1.0,), n=1024, k=2)
        f = CosLinear([1.0, 0.0])
        zero = rotation_stability_study(spec, f, [0.0], 5000, seed=30)
        assert zero.rows[0][1] == 0.0
        study = rotation_stability_study(spec, f, [1e-1, 1e-2, 1e-3],
                                         40_000, seed=30)
        rows = study.rows
        for prev, cur in zip(rows, rows[1:]):
            assert cur[1] <= prev[1] + 2 * (prev[2] + cur[2])
        report(10, "differences decrease monotonically within 2*SE; "
                   "epsilon=0 is bitwise 0")

    def test_criterion_11_tail_finiteness(self):
        spec = SliceSpec(family=degenerate_family(), p=(1.0,), n=4096, k=2)
        study = tail_study(spec, [6.0], SAMPLES, seed=40)
        _, frac, se = study.rows[0]
        assert frac <= 1e-4 + 5 * se
        report(11, f"P(|x1| > 6) = {frac:.2e} <= 1e-4 + 5*SE "
                   f"= {1e-4 + 5 * se:.2e} at n=4096")

    def test_criterion_12_determinism(self, tmp_path):
        base = {
            "family": [{"kind": "explicit", "coords": [0.6, 0.8]}],
            "p": [1.0], "k": 2, "seed": 7,
            "integrand": {"kind": "cos_linear", "a": [1.0, 0.0], "b": 0.0},
        }
        commands = {
            "geometry": dict(base, n=64),
            "integrate": dict(base, n=64, samples=2000),
            "converge": dict(base, n_schedule=[16, 64], samples=2000),
            "tails": dict(base, n=64, thresholds=[1.0, 2.0], samples=2000),
            "perturb": dict(base, n=16, epsilons=[1e-2, 1e-4]),
            "rotate": dict(base, n=64, epsilons=[0.1, 0.01], samples=2000),
        }
        for name, cfg_body in commands.items():
            outputs = []
            for threads in (1, 4):
                out = tmp_path / f"{name}_{threads}.csv"
                cfg_body["output"] = str(out)
                cfg = tmp_path / f"{name}_{threads}.json"
                cfg.write_text(json.dumps(cfg_body))
                code = cli_main([name, "--config", str(cfg),
                                 "--threads", str(threads)])
                assert code == 0, name
                outputs.append(out.read_bytes())
            assert outputs[0] == outputs[1], name
        report(12, "all 6 commands byte-identical across threads in {1, 4}")
