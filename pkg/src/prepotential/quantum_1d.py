"""Quantum spectra of one-dimensional systems on a uniform grid.

The Hamiltonian ``-(hbar^2/2) d^2/dq^2 + V(q)`` uses the potential built from
the prepotential, so the exact ground-state energy is zero and no zero-point
shift is applied to the reported energies. Second-order central differences
with Dirichlet walls give a symmetric tridiagonal matrix whose lowest
eigenpairs are computed with LAPACK's selected-eigenvalue driver.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .equilibrium import find_equilibrium
from .errors import ConvergenceError, ConvergenceWarning, PreconditionError, ValidationError
from .systems import quantum_potential

BOUNDARY_GROUND_TOL = 1e-12
BOUNDARY_STATE_TOL = 1e-10
OK = "ok"
CONTINUUM = "continuum"


@dataclass(frozen=True)
class GridSpec:
    half_width: float
    points: int
    levels: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValidationError(f"half_width must be positive, got {self.half_width}")
        if self.levels < 1:
            raise ValidationError("levels must be >= 1")
        if self.points < 16 * self.levels:
            raise ValidationError(
                f"points={self.points} is below the resolution floor 16*levels={16 * self.levels}"
            )

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.points + 1)

    def refined(self):
        """Nested grid with half the spacing (``M -> 2M + 1``)."""
        return replace(self, points=2 * self.points + 1)


@dataclass(frozen=True)
class SpectrumTable:
    hbar: float
    energies: np.ndarray
    ground_state_overlap: float
    flags: tuple
    grid: GridSpec
    center: float = 0.0
    boundary_amplitude: np.ndarray = field(default_factory=lambda: np.zeros(0))
    error_estimate: np.ndarray = None
    extrapolated: bool = False

    def trusted(self, n):
        return 0 <= n < len(self.energies) and self.flags[n] == OK

    def as_dict(self):
        return {
            "hbar": self.hbar,
            "energies": [float(e) for e in self.energies],
            "flags": list(self.flags),
            "ground_state_overlap": self.ground_state_overlap,
            "grid": {
                "half_width": self.grid.half_width,
                "points": self.grid.points,
                "levels": self.grid.levels,
            },
            "extrapolated": self.extrapolated,
        }

    def csv_rows(self):
        return [(self.hbar, n, float(e), f) for n, (e, f) in enumerate(zip(self.energies, self.flags))]


def _center(system, center):
    if center is not None:
        return float(center)
    return float(find_equilibrium(system).qbar[0])


def solve_spectrum(system, hbar, grid, center=None):
    """Lowest ``grid.levels`` eigenvalues on ``[center - L, center + L]``.

    Levels at or above the bound-state count of the system, or at or above the
    potential at the box walls, are flagged ``"continuum"``: a finite box
    cannot represent them.
    """
    if system.dimension != 1:
        raise PreconditionError("grid solving is one-dimensional only")
    if not hbar > 0:
        raise ValidationError(f"hbar must be positive, got {hbar}")
    c = _center(system, center)
    M, k = grid.points, grid.levels
    x = np.linspace(c - grid.half_width, c + grid.half_width, M + 2)[1:-1]
    h = x[1] - x[0]
    V = np.asarray(quantum_potential(system, x, hbar))
    kin = hbar**2 / (2.0 * h**2)
    diag = 2.0 * kin + V
    off = np.full(M - 1, -kin)
    E, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))

    # ground state from the prepotential, up to normalization
    Wx = np.asarray(system.W(x[:, None]))
    psi0 = np.exp((Wx - np.max(Wx)) / hbar)
    edge_ground = max(psi0[0], psi0[-1]) / np.max(psi0)
    if edge_ground > BOUNDARY_GROUND_TOL:
        warnings.warn(
            f"box half-width {grid.half_width} truncates exp(W/hbar): "
            f"boundary amplitude {edge_ground:.2e}",
            ConvergenceWarning,
            stacklevel=2,
        )
    v0 = vecs[:, 0]
    overlap = float(abs(v0 @ psi0) / (np.linalg.norm(v0) * np.linalg.norm(psi0)))

    amp = np.max(np.abs(vecs[[0, 1, -2, -1], :]), axis=0) / np.max(np.abs(vecs), axis=0)
    n_bound = system.bound_state_count(hbar) if system.bound_state_count else math.inf
    wall = min(V[0], V[-1])
    flags = tuple(CONTINUUM if (n >= n_bound or E[n] >= wall) else OK for n in range(k))
    return SpectrumTable(
        hbar=float(hbar),
        energies=E,
        ground_state_overlap=overlap,
        flags=flags,
        grid=grid,
        center=c,
        boundary_amplitude=amp,
    )


def default_grid(system, hbar, levels, center=0.0, points=None):
    """Box wide enough that ``exp(W/hbar)`` has decayed by 1e-12 at the walls."""
    target = hbar * math.log(BOUNDARY_GROUND_TOL)
    W0 = float(system.W(np.array([center])))
    L = 1.0
    while L < 1e4:
        edge = max(float(system.W(np.array([center - L]))), float(system.W(np.array([center + L]))))
        if edge - W0 < target:
            break
        L *= 1.25
    if points is None:
        points = max(16 * levels, 1024) - 1
    return GridSpec(half_width=L, points=points, levels=levels)


def _richardson(coarse, fine):
    ratio = (coarse.grid.spacing / fine.grid.spacing) ** 2
    return (ratio * fine.energies - coarse.energies) / (ratio - 1.0)


def converge_spectrum(system, hbar, base_grid=None, rel_tol=1e-8, max_doublings=6, center=None):
    """Refine until Richardson-extrapolated energies stop changing.

    The grid is doubled (nested, so the spacing halves exactly) and each pair
    of successive solves is combined into an extrapolated estimate, cancelling
    the ``h^2`` error of the stencil. Convergence means two successive
    estimates of every trusted level differ by less than ``rel_tol`` times an
    energy scale, the larger of the biggest trusted energy and
    ``hbar * |W''(center)|`` (absolute floor 1e-12). If any trusted eigenvector has
    amplitude above 1e-10 at the walls, the box grows by 1.5x at fixed spacing
    and refinement restarts; growths do not count as doublings.
    """
    if not rel_tol > 0:
        raise ValidationError("rel_tol must be positive")
    c = _center(system, center)
    grid = base_grid if base_grid is not None else default_grid(system, hbar, 6, center=c)
    quantum_scale = hbar * abs(float(np.asarray(system.hessW(np.array([c]))).reshape(-1)[0]))
    history = []
    growths = 0
    while True:
        tables = []
        estimates = []
        restart = False
        for doubling in range(max_doublings + 1):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                table = solve_spectrum(system, hbar, grid, center=c)
            ok = np.array([f == OK for f in table.flags])
            if ok.any() and np.max(table.boundary_amplitude[ok]) > BOUNDARY_STATE_TOL and growths < 8:
                growths += 1
                history.append({"points": grid.points, "half_width": grid.half_width, "grow": True})
                new_L = 1.5 * grid.half_width
                new_M = int(round((grid.points + 1) * 1.5)) - 1
                grid = GridSpec(half_width=new_L, points=new_M, levels=grid.levels)
                restart = True
                break
            tables.append(table)
            if len(tables) >= 2:
                estimates.append(_richardson(tables[-2], tables[-1]))
            if len(estimates) >= 2:
                change = np.abs(estimates[-1] - estimates[-2])
                scale = np.max(np.abs(estimates[-1][ok])) if ok.any() else 0.0
                scale = max(scale, quantum_scale)
                tol = max(rel_tol * scale, 1e-12)
                worst = float(np.max(change[ok])) if ok.any() else 0.0
                history.append({"points": grid.points, "half_width": grid.half_width, "change": worst})
                if worst <= tol:
                    return replace(
                        table,
                        energies=estimates[-1],
                        error_estimate=change,
                        extrapolated=True,
                    )
            grid = grid.refined()
        if not restart:
            raise ConvergenceError(
                f"spectrum at hbar={hbar} did not converge within {max_doublings} doublings",
                diagnostics=history,
            )
