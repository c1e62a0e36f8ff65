"""Experiment drivers: convergence sweeps, stability studies, tail studies.

Each driver is a pure function of (configuration, seed) and produces a
small report object with a fixed CSV schema, so re-runs and re-emissions
are byte identical regardless of thread count.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import (DegenerateFrame, EmptySlice, RankTooHighForQuadrature,
                     SeparationLost, UnsupportedClosedForm)
from .gaussian import covariance_from_family, gaussian_expectation
from .slice_geometry import (SEPARATION_FLOOR, SliceGeometry, SliceSpec,
                             build_geometry, slice_values)
from .vectors import FiniteFrame, gram_schmidt, separation

DEFAULT_BIAS_BUDGET = 0.01
GAUSSIAN_MC_COUNT = 10 ** 6

CONVERGENCE_HEADER = ("n", "estimate", "std_error", "gaussian_ref",
                      "ref_method", "abs_error")


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def config_fingerprint(config):
    """Stable hash of a JSON-serializable configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Report:
    header: tuple
    rows: tuple
    fingerprint: str
    seed: int
    passed: bool = True
    notes: tuple = ()

    def to_csv(self):
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConvergenceReport(Report):
    gaussian_ref: float = math.nan
    ref_method: str = ""
    final_abs_error: float = math.nan
    final_tolerance: float = math.nan


def gaussian_reference(family, k, p, f, seed):
    """Limit-measure expectation: closed form, else quadrature, else MC."""
    spec = covariance_from_family(family, k, p)
    try:
        return gaussian_expectation(spec, f, "closed_form"), "closed_form"
    except UnsupportedClosedForm:
        pass
    try:
        return gaussian_expectation(spec, f, "quadrature"), "quadrature"
    except RankTooHighForQuadrature:
        pass
    est, _ = gaussian_expectation(spec, f, "monte_carlo",
                                  count=GAUSSIAN_MC_COUNT,
                                  seed=rng.derive_seed(seed, "gaussian-ref"))
    return est, "monte_carlo"


def convergence_sweep(family, p, k, f, n_schedule, count, seed, threads=1,
                      bias_budget=DEFAULT_BIAS_BUDGET, config=None):
    """Per-n slice MC estimates against the n-independent Gaussian reference."""
    if list(n_schedule) != sorted(set(n_schedule)):
        raise ValueError("n_schedule must be strictly increasing")
    ref, ref_method = gaussian_reference(family, k, p, f, seed)
    rows = []
    notes = []
    last_se = math.nan
    for n in n_schedule:
        try:
            spec = SliceSpec(family=family, p=p, n=n, k=k)
            geometry = build_geometry(spec)
        except (EmptySlice, DegenerateFrame) as exc:
            notes.append(f"n={n}: {type(exc).__name__}: {exc}")
            rows.append((n, math.nan, math.nan, ref, ref_method, math.nan))
            continue
        values = slice_values(geometry, f, count, seed, k, threads=threads)
        est = float(np.sum(values) / count)
        se = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
        rows.append((n, est, se, ref, ref_method, abs(est - ref)))
        last_se = se
    final_err = rows[-1][5]
    tolerance = 3.0 * last_se + bias_budget
    passed = bool(final_err <= tolerance) if math.isfinite(final_err) else False
    fingerprint = config_fingerprint(config) if config is not None else ""
    return ConvergenceReport(header=CONVERGENCE_HEADER, rows=tuple(rows),
                             fingerprint=fingerprint, seed=seed, passed=passed,
                             notes=tuple(notes), gaussian_ref=ref,
                             ref_method=ref_method, final_abs_error=final_err,
                             final_tolerance=tolerance)


def _perturbation_directions(shape, seed):
    d = rng.normal_block(rng.derive_seed(seed, "perturb"), 0, shape[1], shape[0]).T
    return d / np.linalg.norm(d, axis=0)


def _paired_difference(geom_a, geom_b, f, count, seed, k, threads=1):
    """Common-random-number estimate of |mean f on A - mean f on B|."""
    va = slice_values(geom_a, f, count, seed, k, threads=threads)
    vb = slice_values(geom_b, f, count, seed, k, threads=threads)
    diffs = va - vb
    est = float(np.sum(diffs) / count)
    se = float(np.std(diffs, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return abs(est), se


def rotation_stability_study(spec, f, epsilon_list, count, seed, threads=1,
                             config=None):
    """Integral change under epsilon-perturbations of the constraint vectors.

    Both slices are integrated with the same sample stream, so the
    difference at epsilon = 0 is exactly zero and the differences shrink
    toward the noise floor as epsilon does.
    """
    if not f.uniformly_continuous:
        raise ValueError("rotation study requires a uniformly continuous integrand")
    n, g = spec.n, spec.family.gamma
    if g == 0:
        raise ValueError("rotation study needs at least one constraint vector")
    u = spec.family.truncation_matrix(n)
    base_sep = separation([u[:, i] for i in range(g)])
    dirs = _perturbation_directions((n, g), seed)
    base_geom = build_geometry(spec)
    mc_seed = rng.derive_seed(seed, "rotation-mc")
    rows = []
    for eps in epsilon_list:
        pert = u + eps * dirs
        if separation([pert[:, i] for i in range(g)]) < 0.5 * base_sep:
            raise SeparationLost(f"epsilon={eps} halves the separation")
        geom = _geometry_from_columns(pert, spec.p, n)
        diff, se = _paired_difference(base_geom, geom, f, count, mc_seed,
                                      spec.k, threads=threads)
        rows.append((eps, diff, se))
    fingerprint = config_fingerprint(config) if config is not None else ""
    return Report(header=("epsilon", "abs_difference", "std_error"),
                  rows=tuple(rows), fingerprint=fingerprint, seed=seed)


def _geometry_from_columns(columns, p, n):
    """Build geometry for raw constraint columns (used by perturbed slices)."""
    g = columns.shape[1]
    if separation([columns[:, i] for i in range(g)]) < SEPARATION_FLOOR:
        raise DegenerateFrame("perturbed columns nearly dependent")
    frame = FiniteFrame.from_columns(columns)
    gram = columns.T @ columns
    center = columns @ np.linalg.solve(gram, np.asarray(p, dtype=float))
    center_sq = float(center @ center)
    if center_sq >= n:
        raise EmptySlice(f"||theta*||^2 = {center_sq:.6g} >= n = {n}")
    radius = math.sqrt(n - center_sq)
    return SliceGeometry(n=n, gamma=g, frame=frame, center=center,
                         q=frame.basis.T @ center, radius=radius,
                         scale_ratio=radius / math.sqrt(n))


def gs_perturbation_study(base, epsilon_list, seed, enforce_separation=True,
                          config=None):
    """Gram-Schmidt output change per unit of input perturbation.

    For a well-separated base the ratio max_i ||w_i - z_i|| / epsilon is
    stable (Lipschitz-like) as epsilon shrinks; without the separation
    floor it is not, which is why the floor is enforced by default.
    """
    base = np.asarray(base, dtype=float)
    g = base.shape[1]
    base_sep = separation([base[:, i] for i in range(g)])
    if enforce_separation and base_sep < 1e-3:
        raise SeparationLost(f"base separation {base_sep:.3e} below 1e-3")
    dirs = _perturbation_directions(base.shape, seed)
    w = gram_schmidt(base)
    rows = []
    for eps in epsilon_list:
        pert = base + eps * dirs
        if enforce_separation:
            if separation([pert[:, i] for i in range(g)]) < 0.5 * base_sep:
                raise SeparationLost(f"epsilon={eps} halves the separation")
        z = gram_schmidt(pert)
        max_diff = float(np.max(np.linalg.norm(w - z, axis=0)))
        ratio = max_diff / eps if eps > 0 else math.nan
        rows.append((eps, max_diff, ratio))
    fingerprint = config_fingerprint(config) if config is not None else ""
    return Report(header=("epsilon", "max_gs_diff", "ratio"),
                  rows=tuple(rows), fingerprint=fingerprint, seed=seed)


def tail_study(spec, thresholds, count, seed, threads=1, config=None):
    """Empirical P(|x_1| > t) on the slice for each threshold t."""
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be increasing")
    geometry = build_geometry(spec)
    first = lambda x: np.abs(x[:, 0])
    magnitudes = slice_values(geometry, first, count, seed, spec.k,
                              threads=threads)
    rows = []
    for t in thresholds:
        frac = float(np.count_nonzero(magnitudes > t)) / count
        se = math.sqrt(frac * (1.0 - frac) / count)
        rows.append((t, frac, se))
    fingerprint = config_fingerprint(config) if config is not None else ""
    return Report(header=("t", "tail_fraction", "std_error"),
                  rows=tuple(rows), fingerprint=fingerprint, seed=seed)


def emit_csv(report, path):
    """Write the report as CSV: LF endings, 17-significant-digit floats."""
    with open(path, "w", newline="\n") as fh:
        fh.write(report.to_csv())


def emit_svg(report, path):
    """Log-log line chart of abs_error vs n for a convergence report."""
    width, height, margin = 640, 440, 60
    pts = [(row[0], row[5]) for row in report.rows
           if math.isfinite(row[5]) and row[5] > 0]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
             f'y2="{height - margin}" stroke="black"/>',
             f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
             f'y2="{height - margin}" stroke="black"/>',
             f'<text x="{width // 2}" y="{height - 15}" '
             f'text-anchor="middle">n (log scale)</text>',
             f'<text x="18" y="{height // 2}" text-anchor="middle" '
             f'transform="rotate(-90 18 {height // 2})">abs_error (log scale)</text>']
    if pts:
        xs = [math.log10(p[0]) for p in pts]
        ys = [math.log10(p[1]) for p in pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        xspan = (x1 - x0) or 1.0
        yspan = (y1 - y0) or 1.0
        coords = []
        for x, y in zip(xs, ys):
            px = margin + (x - x0) / xspan * (width - 2 * margin)
            py = height - margin - (y - y0) / yspan * (height - 2 * margin)
            coords.append(f"{px:.2f},{py:.2f}")
        parts.append(f'<polyline points="{" ".join(coords)}" fill="none" '
                     f'stroke="steelblue" stroke-width="2"/>')
        for c in coords:
            px, py = c.split(",")
            parts.append(f'<circle cx="{px}" cy="{py}" r="3" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
