"""Classical equilibrium and normal modes.

The equilibrium is the maximum of the ground-state wavefunction, i.e. a
stationary point of ``W`` with ``-hess W`` positive semi-definite. The
normal-mode frequencies are the eigenvalues of ``-hess W`` there; their squares
are the eigenvalues of the Hessian of the classical potential.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _numdiff
from .errors import DomainError, PreconditionError, SolverError

PSD_TOL = 1e-10
STATIONARY_TOL = 1e-8
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumReport:
    qbar: np.ndarray
    grad_norm: float
    hessian: np.ndarray
    frequencies: np.ndarray
    modes: np.ndarray  # row j is the unit eigenvector for frequencies[j]
    vc_hessian_eigenvalues: np.ndarray
    iterations: int = 0

    @property
    def dimension(self):
        return self.qbar.size

    def as_dict(self):
        return {
            "qbar": self.qbar.tolist(),
            "frequencies": self.frequencies.tolist(),
            "modes": self.modes.tolist(),
            "grad_norm": float(self.grad_norm),
        }


def _canonical_modes(evals, evecs):
    """Ascending frequencies with a deterministic eigenvector convention.

    Each vector gets its first non-negligible component positive; within a
    degenerate group vectors are ordered lexicographically descending.
    """
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    vecs = evecs[:, order].T.copy()
    for v in vecs:
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size and v[nz[0]] < 0:
            v *= -1.0
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    start = 0
    n = evals.size
    while start < n:
        stop = start + 1
        while stop < n and evals[stop] - evals[start] <= DEGENERACY_TOL * scale:
            stop += 1
        if stop - start > 1:
            group = vecs[start:stop]
            keys = sorted(range(len(group)), key=lambda i: tuple(-group[i]))
            vecs[start:stop] = group[keys]
        start = stop
    return evals, vecs


def _vc_gradient(system):
    def grad_vc(q):
        return system.hessW(q) @ system.gradW(q)

    return grad_vc


def normal_modes(system, qbar):
    """Frequencies and modes at a stationary point of ``W``.

    Also differences the gradient of ``V_C`` and checks that its Hessian
    spectrum equals the squared frequencies.
    """
    q = system.check(np.asarray(qbar, dtype=float).reshape(-1))
    g = np.asarray(system.gradW(q), dtype=float)
    gnorm = float(np.linalg.norm(g))
    if not gnorm < STATIONARY_TOL:
        raise PreconditionError(f"qbar is not stationary: |grad W| = {gnorm:.3e}")
    H = np.asarray(system.hessW(q), dtype=float)
    H = 0.5 * (H + H.T)
    evals, evecs = np.linalg.eigh(-H)
    freqs, modes = _canonical_modes(evals, evecs)

    vc_hess = _numdiff.jacobian(_vc_gradient(system), q)
    vc_evals = np.sort(np.linalg.eigvalsh(vc_hess))
    expected = np.sort(freqs**2)
    scale = max(1.0, float(np.max(np.abs(expected))))
    if np.max(np.abs(vc_evals - expected)) > 1e-6 * scale:
        raise SolverError(
            "Hessian of V_C does not match the squared frequencies "
            f"({vc_evals.tolist()} vs {expected.tolist()})",
            best=q,
            grad_norm=gnorm,
        )
    return EquilibriumReport(
        qbar=q.copy(),
        grad_norm=gnorm,
        hessian=H,
        frequencies=freqs,
        modes=modes,
        vc_hessian_eigenvalues=vc_evals,
    )


def find_equilibrium(system, initial_guess=None, tol=1e-12, max_iter=200):
    """Locate the maximum of ``W`` reachable from ``initial_guess``.

    Damped Newton on ``grad W = 0`` with backtracking on ``|grad W|^2``. Steps
    are clipped to half the distance to the domain boundary when the system
    provides a ``step_limit`` and halved until they land inside the domain
    otherwise. Where ``-hess W`` is not positive definite the step falls back
    to gradient ascent on ``W``.

    Raises
    ------
    DomainError
        The initial guess is outside the domain.
    SolverError
        No convergence within ``max_iter`` iterations, or the stationary point
        found is not a maximum. ``err.best`` holds the best iterate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    guess = system.default_guess if initial_guess is None else initial_guess
    q = np.array(system.points(guess), dtype=float).reshape(-1)
    if not bool(system.contains(q)):
        raise DomainError(f"initial guess {q.tolist()} is outside the domain of {system.name}")

    def merit(x):
        g = system.gradW(x)
        return float(g @ g)

    g = np.asarray(system.gradW(q), dtype=float)
    best_q, best_g = q.copy(), float(np.linalg.norm(g))
    it = 0
    while best_g > tol:
        if it >= max_iter:
            raise SolverError(
                f"no convergence after {max_iter} iterations (|grad W| = {best_g:.3e})",
                best=best_q,
                grad_norm=best_g,
            )
        it += 1
        negH = -np.asarray(system.hessW(q), dtype=float)
        negH = 0.5 * (negH + negH.T)
        try:
            L = np.linalg.cholesky(negH)
            s = np.linalg.solve(L.T, np.linalg.solve(L, g))
            newton = True
        except np.linalg.LinAlgError:
            s = g / max(1.0, float(np.linalg.norm(g)))
            newton = False

        alpha = 1.0
        if system.step_limit is not None:
            alpha = min(alpha, 0.5 * system.step_limit(q, s))
        f0 = merit(q)
        W0 = float(system.W(q))
        accepted = False
        while alpha > 1e-16:
            trial = q + alpha * s
            if bool(system.contains(trial)):
                if newton:
                    ok = merit(trial) <= (1.0 - 1e-4 * alpha) * f0
                else:
                    ok = float(system.W(trial)) >= W0 + 1e-4 * alpha * float(g @ s)
                if ok:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            raise SolverError(
                f"line search stalled at |grad W| = {best_g:.3e}", best=best_q, grad_norm=best_g
            )
        q = trial
        g = np.asarray(system.gradW(q), dtype=float)
        gn = float(np.linalg.norm(g))
        if gn < best_g:
            best_q, best_g = q.copy(), gn

    report = normal_modes(system, best_q)
    if report.frequencies.size and report.frequencies[0] < -PSD_TOL:
        raise SolverError(
            "stationary point is not a maximum of W "
            f"(lowest eigenvalue of -hess W = {report.frequencies[0]:.3e})",
            best=best_q,
            grad_norm=best_g,
        )
    return EquilibriumReport(
        qbar=report.qbar,
        grad_norm=best_g,
        hessian=report.hessian,
        frequencies=report.frequencies,
        modes=report.modes,
        vc_hessian_eigenvalues=report.vc_hessian_eigenvalues,
        iterations=it,
    )


def hermite_equilibrium(N, omega=1.0, g=1.0):
    """Closed-form Calogero equilibrium: ``sqrt(g/omega)`` times the zeros of ``H_N``."""
    from numpy.polynomial import hermite

    coeffs = np.zeros(N + 1)
    coeffs[-1] = 1.0
    roots = np.sort(np.real(hermite.hermroots(coeffs)))
    return math.sqrt(g / omega) * roots
