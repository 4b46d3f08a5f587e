"""The classical eigenvalue operator ``D phi = -grad W . grad phi`` and checks on it.

Classical eigenfunctions (solutions of ``D phi = E phi``) multiply with their
eigenvalues adding, vanish at the equilibrium, and, when their gradient there
is non-zero, that gradient is an eigenvector of ``-hess W`` with eigenvalue
``E``. Everything here verifies these facts numerically by sampling.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .equilibrium import find_equilibrium
from .errors import PrepotentialError
from .systems import ClassicalEigenfunction

NON_ELEMENTARY = -1.0
GRADIENT_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class OperatorResidual:
    max_abs_residual: float
    sample_points: np.ndarray
    normalization: float

    @property
    def relative(self):
        return self.max_abs_residual / self.normalization if self.normalization > 0 else 0.0


def apply_operator(system, f, q):
    """Evaluate ``-grad W(q) . grad phi(q)``."""
    arr = system.check(q)
    value = -np.sum(system.gradW(arr) * f.grad_phi(arr), axis=-1)
    return float(value) if arr.ndim == 1 else value


def constant_eigenfunction(dimension):
    """``phi = 1`` with eigenvalue 0, the identity for :func:`product`."""
    return ClassicalEigenfunction(
        phi=lambda q: np.ones(np.shape(q)[:-1]),
        grad_phi=lambda q: np.zeros(np.shape(q)),
        eigenvalue=0.0,
        label=(0,) * dimension,
    )


def sample_points(system, report, samples, seed):
    """Scrambled Halton points in the mode-scaled box around the equilibrium.

    The box is ``qbar + sum_j u_j v_j / sqrt(E_j)`` with ``u`` in ``[-1, 1]^r``;
    points outside the domain are dropped and more are drawn.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    r = report.dimension
    freqs = np.asarray(report.frequencies, dtype=float)
    widths = np.where(freqs > 1e-12, 1.0 / np.sqrt(np.abs(freqs)), 1.0)
    sampler = qmc.Halton(d=r, scramble=True, seed=seed)
    kept = []
    drawn = 0
    while sum(len(k) for k in kept) < samples:
        batch = max(samples, 16)
        u = 2.0 * sampler.random(batch) - 1.0
        pts = report.qbar + (u * widths) @ report.modes
        drawn += batch
        inside = system.contains(pts)
        kept.append(pts[inside])
        n_kept = sum(len(k) for k in kept)
        if drawn >= 100 * samples and n_kept < 0.01 * drawn:
            raise PrepotentialError(
                f"sample rejection rate above 99% ({n_kept} of {drawn} points in the domain)"
            )
    return np.concatenate(kept)[:samples]


def verify_eigenfunction(system, f, samples=64, seed=0, report=None):
    """Sampled residual of ``D phi = E phi``; deterministic for a fixed seed."""
    if report is None:
        report = find_equilibrium(system)
    pts = sample_points(system, report, samples, seed)
    phi = f.phi(pts)
    resid = apply_operator(system, f, pts) - f.eigenvalue * phi
    return OperatorResidual(
        max_abs_residual=float(np.max(np.abs(resid))),
        sample_points=pts,
        normalization=float(np.max(np.abs(phi))),
    )


def _combine_labels(a, b):
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b):
        return tuple(x + y for x, y in zip(a, b))
    return f"{a}*{b}"


def product(f, g):
    """Product eigenfunction: values multiply, eigenvalues add."""

    def phi(q):
        return f.phi(q) * g.phi(q)

    def grad_phi(q):
        return f.grad_phi(q) * g.phi(q)[..., None] + g.grad_phi(q) * f.phi(q)[..., None]

    return ClassicalEigenfunction(
        phi=phi,
        grad_phi=grad_phi,
        eigenvalue=f.eigenvalue + g.eigenvalue,
        label=_combine_labels(f.label, g.label),
        approximate=f.approximate or g.approximate,
    )


def check_vanishing(f, qbar):
    """``|phi(qbar)|``; small for every eigenfunction with positive eigenvalue."""
    q = np.atleast_1d(np.asarray(qbar, dtype=float))
    return float(abs(f.phi(q)))


def check_gradient_eigenvector(system, f, report, normalization=None):
    """Residual ``|(-W~) v - E v| / |v|`` for ``v = grad phi(qbar)``.

    Returns :data:`NON_ELEMENTARY` (-1) when ``v`` vanishes, judged after
    scaling ``phi`` so that its maximum over the sample box is 1.
    """
    if normalization is None:
        pts = sample_points(system, report, 64, 0)
        normalization = float(np.max(np.abs(f.phi(pts))))
    v = np.asarray(f.grad_phi(report.qbar), dtype=float).reshape(-1)
    vnorm = float(np.linalg.norm(v))
    if normalization <= 0 or vnorm / normalization < GRADIENT_ZERO_TOL:
        return NON_ELEMENTARY
    resid = -report.hessian @ v - f.eigenvalue * v
    return float(np.linalg.norm(resid) / vnorm)


def elementary_candidates(report):
    """Linearized elementary excitations ``phi_j(q) = v_j . (q - qbar)``.

    These are eigenfunctions only to first order around ``qbar`` (exact for a
    quadratic prepotential) and are flagged ``approximate``.
    """
    out = []
    r = report.dimension
    for j, (freq, v) in enumerate(zip(report.frequencies, report.modes)):
        v = np.array(v)
        qbar = report.qbar

        def phi(q, v=v):
            return (np.asarray(q) - qbar) @ v

        def grad_phi(q, v=v):
            return np.broadcast_to(v, np.shape(q)).copy()

        label = tuple(1 if k == j else 0 for k in range(r))
        out.append(
            ClassicalEigenfunction(
                phi=phi,
                grad_phi=grad_phi,
                eigenvalue=max(float(freq), 0.0),
                label=label,
                approximate=True,
            )
        )
    return out


def verification_records(system, report, functions, samples=64, seed=0):
    """One record per function: eigen-equation residual and the equilibrium checks."""
    records = []
    for f in functions:
        res = verify_eigenfunction(system, f, samples=samples, seed=seed, report=report)
        hess = check_gradient_eigenvector(system, f, report, normalization=res.normalization)
        label = list(f.label) if isinstance(f.label, tuple) else f.label
        records.append(
            {
                "label": label,
                "eigenvalue": float(f.eigenvalue),
                "residual": res.max_abs_residual,
                "vanishing": check_vanishing(f, report.qbar),
                "hessian_residual": hess,
                "approximate": bool(f.approximate),
            }
        )
    return records
