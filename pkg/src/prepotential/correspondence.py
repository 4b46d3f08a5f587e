"""Match the O(hbar) part of quantum levels to normal-mode frequencies.

Each level is followed across several values of hbar, the fit
``E_n(hbar) = a hbar + b hbar^2`` gives ``a``, and ``a`` is written as a
non-negative integer combination of the frequencies at the classical
equilibrium.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .equilibrium import find_equilibrium
from .errors import IllFitWarning, PrepotentialError, PreconditionError, ValidationError
from .quantum_1d import GridSpec, converge_spectrum, default_grid
from .systems import level_vectors

DEFAULT_SWEEP = (0.4, 0.2, 0.1, 0.05)
MATCHED = "matched"
UNMATCHED = "unmatched"
FLAGGED = "flagged"


@dataclass(frozen=True)
class Match:
    vector: tuple  # None when unmatched
    residual: float
    degeneracy: int

    @property
    def matched(self):
        return self.vector is not None


@dataclass(frozen=True)
class CorrespondenceReport:
    level_index: int
    calE: float
    fit_residual: float
    match_vector: tuple
    match_residual: float
    degeneracy: int = 0
    status: str = MATCHED
    level_label: tuple = None

    def as_dict(self):
        return {
            "level": self.level_index,
            "label": None if self.level_label is None else list(self.level_label),
            "calE": self.calE,
            "fit_residual": self.fit_residual,
            "match_vector": "unmatched" if self.match_vector is None else list(self.match_vector),
            "match_residual": self.match_residual,
            "degeneracy": self.degeneracy,
            "status": self.status,
        }


def fit_linear_quadratic(hbars, energies):
    """Least-squares ``E = a hbar + b hbar^2``; returns ``(a, b, rms)``."""
    h = np.asarray(hbars, dtype=float)
    E = np.asarray(energies, dtype=float)
    A = np.column_stack([h, h**2])
    coef, *_ = np.linalg.lstsq(A, E, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - E) ** 2)))
    return float(coef[0]), float(coef[1]), rms


def extrapolate_calE(tables, level):
    """O(hbar) coefficient of level ``level`` from spectra at >= 3 distinct hbar.

    Returns ``(calE, fit_residual)``. Warns with :class:`IllFitWarning` when
    the fit residual exceeds ten times the discretization error estimate.
    """
    hbars = [t.hbar for t in tables]
    if len(set(hbars)) < 3:
        raise ValidationError("need spectra at three or more distinct hbar values")
    for t in tables:
        if not t.trusted(level):
            raise PreconditionError(f"level {level} is missing or flagged at hbar={t.hbar}")
    energies = [t.energies[level] for t in tables]
    a, _, rms = fit_linear_quadratic(hbars, energies)
    expected = 0.0
    for t in tables:
        if t.error_estimate is not None:
            expected = max(expected, float(t.error_estimate[level]))
    expected = max(expected, 1e-12 * max(1.0, max(abs(e) for e in energies)))
    if rms > 10 * expected and rms > 1e-10:
        warnings.warn(
            f"level {level}: fit residual {rms:.2e} exceeds 10x the discretization estimate",
            IllFitWarning,
            stacklevel=2,
        )
    return a, rms


def decompose(calE, frequencies, tol=None, max_total=12, tie_tol=None):
    """Nearest non-negative integer combination of ``frequencies`` to ``calE``.

    All vectors with ``sum(n) <= max_total`` are searched, pruning partial sums
    that already overshoot by more than ``tol``. Residuals within ``tie_tol``
    of the best count as ties, which go to the smallest ``sum(n)`` and then to
    the lexicographically largest vector (weight on earlier frequencies).
    ``degeneracy`` counts every vector within ``tol``.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.size == 0 or np.any(freqs <= 0):
        raise PreconditionError("frequencies must be positive")
    if max_total < 1:
        raise ValidationError("max_total must be >= 1")
    fmax = float(np.max(freqs))
    if tol is None:
        tol = 1e-3 * fmax
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if tie_tol is None:
        tie_tol = 1e-9 * max(1.0, fmax)
    r = freqs.size
    found = []
    vec = [0] * r

    def search(i, budget, partial):
        if partial - calE > tol:
            return
        if i == r:
            found.append((abs(calE - partial), tuple(vec)))
            return
        for k in range(budget + 1):
            s = partial + k * freqs[i]
            if s - calE > tol:
                break
            vec[i] = k
            search(i + 1, budget - k, s)
        vec[i] = 0

    search(0, int(max_total), 0.0)
    within = [c for c in found if c[0] <= tol]
    if not within:
        best = min((c[0] for c in found), default=abs(calE))
        return Match(vector=None, residual=float(best), degeneracy=0)
    best = min(c[0] for c in within)
    ties = [c for c in within if c[0] <= best + tie_tol]
    ties.sort(key=lambda c: (sum(c[1]), tuple(-x for x in c[1])))
    residual, vector = ties[0]
    return Match(vector=vector, residual=float(residual), degeneracy=len(within))


def default_sweep(system, levels):
    """The default hbar sweep, halved until the highest level is bound."""
    sweep = list(DEFAULT_SWEEP)
    top = levels - 1
    if system.bound_state_count is not None:
        while system.bound_state_count(max(sweep)) <= top:
            sweep = [h / 2 for h in sweep]
    return sweep


def reference_slopes_check(system, report, hbar_list):
    """Max deviation between elementary reference-spectrum slopes and the frequencies.

    The O(hbar) slope of each single-quantum level of the reference spectrum
    is fitted and compared with the sorted normal-mode frequencies.
    """
    r = system.dimension
    slopes = []
    for j in range(r):
        n = tuple(1 if k == j else 0 for k in range(r))
        energies = [system.reference_spectrum(n, h) for h in hbar_list]
        slopes.append(fit_linear_quadratic(hbar_list, energies)[0])
    return float(np.max(np.abs(np.sort(slopes) - np.sort(report.frequencies))))


def _match_report(index, calE, rms, freqs, tol, max_total, label=None):
    m = decompose(calE, freqs, tol=tol, max_total=max_total)
    return CorrespondenceReport(
        level_index=index,
        calE=calE,
        fit_residual=rms,
        match_vector=m.vector,
        match_residual=m.residual,
        degeneracy=m.degeneracy,
        status=MATCHED if m.matched else UNMATCHED,
        level_label=label,
    )


def run_correspondence(
    system,
    hbar_list=None,
    grid=None,
    levels=6,
    *,
    tol=None,
    max_total=12,
    max_quanta=None,
    use_reference=None,
    report=None,
    rel_tol=1e-8,
):
    """Equilibrium, frequencies, spectra, fit and decomposition, per level.

    One-dimensional systems are solved on a grid (levels ``0..levels-1``).
    Systems with a ``reference_spectrum`` and no grid route use it instead:
    every quantum-number vector with at most ``max_quanta`` total quanta
    (default ``levels - 1``) is a level, after the reference slopes have been
    checked against the frequencies.
    """
    if report is None:
        report = find_equilibrium(system)
    freqs = report.frequencies
    if use_reference is None:
        use_reference = system.dimension != 1
    if use_reference and system.reference_spectrum is None:
        raise PreconditionError(f"{system.name}: no grid route and no reference spectrum")
    if hbar_list is None:
        hbar_list = default_sweep(system, levels)
    hbar_list = [float(h) for h in hbar_list]
    if any(h <= 0 for h in hbar_list) or len(set(hbar_list)) != len(hbar_list):
        raise ValidationError("hbar values must be positive and distinct")
    if len(hbar_list) < 3:
        raise ValidationError("need three or more hbar values")
    if tol is None:
        tol = 1e-3 * float(np.max(freqs))

    out = []
    if use_reference:
        deviation = reference_slopes_check(system, report, hbar_list)
        if deviation > 1e-6 * max(1.0, float(np.max(freqs))):
            raise PrepotentialError(
                f"reference spectrum slopes disagree with the frequencies by {deviation:.2e}"
            )
        quanta = levels - 1 if max_quanta is None else max_quanta
        for index, n in enumerate(level_vectors(system.dimension, quanta)):
            energies = [system.reference_spectrum(n, h) for h in hbar_list]
            calE, _, rms = fit_linear_quadratic(hbar_list, energies)
            out.append(_match_report(index, calE, rms, freqs, tol, max_total, label=n))
        return out

    tables = []
    center = float(report.qbar[0])
    for h in hbar_list:
        base = grid if grid is not None else default_grid(system, h, levels, center=center)
        if base.levels != levels:
            base = GridSpec(half_width=base.half_width, points=max(base.points, 16 * levels), levels=levels)
        tables.append(converge_spectrum(system, h, base, rel_tol=rel_tol, center=center))
    for n in range(levels):
        if not all(t.trusted(n) for t in tables):
            out.append(
                CorrespondenceReport(
                    level_index=n,
                    calE=math.nan,
                    fit_residual=math.nan,
                    match_vector=None,
                    match_residual=math.nan,
                    status=FLAGGED,
                )
            )
            continue
        calE, rms = extrapolate_calE(tables, n)
        out.append(_match_report(n, calE, rms, freqs, tol, max_total))
    return out
