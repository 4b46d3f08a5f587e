"""Prepotential systems and the potentials derived from them.

A system is fully specified by its prepotential ``W(q)``: the ground state is
``exp(W/hbar)``, the quantum potential is

    V(q) = 1/2 sum_j [(dW/dq_j)^2 + hbar d^2W/dq_j^2]

(which puts the ground state at zero energy) and the classical potential is the
hbar-free part ``V_C = |grad W|^2 / 2``.

All evaluators on a :class:`PrepotentialSystem` are vectorized over leading
axes: a batch of points has shape ``(..., r)``.
"""

import inspect
import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Optional

import numpy as np

from . import _numdiff
from .errors import CatalogError, DomainError, ValidationError

CATALOG = ("harmonic", "poschl_teller", "calogero_a")

_HBAR_NAMES = {"hbar", "h_bar", "ħ", "planck"}


@dataclass(frozen=True)
class ClassicalEigenfunction:
    """A scalar field ``phi`` claimed to satisfy ``-grad W . grad phi = E phi``.

    ``label`` is either a tuple of non-negative monomial exponents in the
    elementary excitations or a string such as ``"elementary-2"``.
    ``approximate`` marks fields that are eigenfunctions only to first order
    around the equilibrium.
    """

    phi: Callable
    grad_phi: Callable
    eigenvalue: float
    label: object = ()
    approximate: bool = False

    def __post_init__(self):
        if not self.eigenvalue >= 0:
            raise ValidationError(f"eigenvalue must be non-negative, got {self.eigenvalue}")


@dataclass(frozen=True)
class PrepotentialSystem:
    """Immutable description of a system through its prepotential.

    ``gradW`` and ``hessW`` are always callable; when the user supplied only
    ``W`` they are central-difference fallbacks and ``analytic_hessian`` is
    False.
    """

    name: str
    dimension: int
    params: Mapping[str, float]
    W: Callable
    gradW: Callable
    hessW: Callable
    domain: Callable
    default_guess: np.ndarray
    reference_spectrum: Optional[Callable] = None
    reference_classical_eigenfunctions: tuple = ()
    bound_state_count: Optional[Callable] = None
    step_limit: Optional[Callable] = None
    analytic_gradient: bool = True
    analytic_hessian: bool = True
    vectorized: bool = field(default=True, repr=False)

    def points(self, q):
        """Coerce ``q`` to shape ``(..., r)``; scalars are 1D points."""
        arr = np.asarray(q, dtype=float)
        if self.dimension == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
            arr = arr[..., None]
        if arr.ndim == 0 or arr.shape[-1] != self.dimension:
            raise ValidationError(
                f"expected points with last axis {self.dimension}, got shape {arr.shape}"
            )
        return arr

    def contains(self, q):
        arr = self.points(q)
        return np.asarray(self.domain(arr), dtype=bool) & np.all(np.isfinite(arr), axis=-1)

    def check(self, q):
        """Return ``q`` as points, raising :class:`DomainError` if any is outside."""
        arr = self.points(q)
        inside = self.contains(arr)
        if not np.all(inside):
            bad = arr[~inside] if arr.ndim > 1 else arr
            raise DomainError(f"{self.name}: point(s) outside the domain: {np.asarray(bad)[:3].tolist()}")
        return arr


# --- catalog -----------------------------------------------------------------


def _everywhere(q):
    return np.ones(np.shape(q)[:-1], dtype=bool)


def _harmonic(omega):
    def W(q):
        return -0.5 * omega * np.sum(q**2, axis=-1)

    def gradW(q):
        return -omega * q

    def hessW(q):
        return np.broadcast_to(-omega * np.eye(1), q.shape[:-1] + (1, 1)).copy()

    def reference(n, hbar):
        (n,) = np.atleast_1d(n)
        return n * hbar * omega

    registry = tuple(_power_eigenfunction(k, omega) for k in range(1, 5))
    return dict(
        dimension=1,
        W=W,
        gradW=gradW,
        hessW=hessW,
        default_guess=np.zeros(1),
        reference_spectrum=reference,
        reference_classical_eigenfunctions=registry,
    )


def _power_eigenfunction(n, omega):
    c = omega ** (n / 2)
    return ClassicalEigenfunction(
        phi=lambda q: c * q[..., 0] ** n,
        grad_phi=lambda q: (c * n * q**(n - 1)),
        eigenvalue=n * omega,
        label=(n,),
    )


def _log_cosh(x):
    a = np.abs(x)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def _sech2(x):
    t = np.exp(-2.0 * np.abs(x))
    return 4.0 * t / (1.0 + t) ** 2


def _poschl_teller(g):
    def W(q):
        return -g * np.sum(_log_cosh(q), axis=-1)

    def gradW(q):
        return -g * np.tanh(q)

    def hessW(q):
        return (-g * _sech2(q))[..., None]

    def bound_states(hbar):
        # levels n >= 0 with g/hbar - n > 0
        return max(0, math.ceil(g / hbar))

    def reference(n, hbar):
        (n,) = np.atleast_1d(n)
        if not n < g / hbar:
            raise ValidationError(f"level {n} is not bound for g/hbar = {g / hbar}")
        return g * n * hbar - n**2 * hbar**2 / 2

    registry = tuple(_sinh_eigenfunction(k, g) for k in range(1, 5))
    return dict(
        dimension=1,
        W=W,
        gradW=gradW,
        hessW=hessW,
        default_guess=np.zeros(1),
        reference_spectrum=reference,
        reference_classical_eigenfunctions=registry,
        bound_state_count=bound_states,
    )


def _sinh_eigenfunction(n, g):
    c = g**n
    return ClassicalEigenfunction(
        phi=lambda q: c * np.sinh(q[..., 0]) ** n,
        grad_phi=lambda q: c * n * np.sinh(q) ** (n - 1) * np.cosh(q),
        eigenvalue=n * g,
        label=(n,),
    )


def _calogero_a(N, omega, g):
    iu = np.triu_indices(N, 1)
    eye = np.eye(N, dtype=bool)

    def _inv_diffs(q):
        d = q[..., :, None] - q[..., None, :]
        with np.errstate(divide="ignore"):
            inv = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, d))
        return inv

    def W(q):
        d = q[..., None, :] - q[..., :, None]
        return -0.5 * omega * np.sum(q**2, axis=-1) + g * np.sum(
            np.log(np.abs(d[..., iu[0], iu[1]])), axis=-1
        )

    def gradW(q):
        return -omega * q + g * np.sum(_inv_diffs(q), axis=-1)

    def hessW(q):
        inv2 = _inv_diffs(q) ** 2
        H = g * inv2
        diag = -omega - g * np.sum(inv2, axis=-1)
        H[..., np.arange(N), np.arange(N)] = diag
        return H

    def domain(q):
        return np.all(np.diff(q, axis=-1) > 0, axis=-1)

    def step_limit(q, s):
        # largest alpha keeping q + alpha*s in the ordered sector
        gaps = np.diff(q)
        closing = -np.diff(s)
        mask = closing > 0
        if not np.any(mask):
            return math.inf
        return float(np.min(gaps[mask] / closing[mask]))

    weights = np.arange(1, N + 1)

    def reference(n, hbar):
        n = np.asarray(n)
        if n.shape != (N,) or np.any(n < 0):
            raise ValidationError(f"level vector must be {N} non-negative integers")
        return hbar * omega * float(np.dot(weights, n))

    guess = np.linspace(-(N - 1) / 2, (N - 1) / 2, N) * math.sqrt(g / omega)
    return dict(
        dimension=N,
        W=W,
        gradW=gradW,
        hessW=hessW,
        domain=domain,
        default_guess=guess,
        reference_spectrum=reference,
        step_limit=step_limit,
    )


_REQUIRED = {
    "harmonic": ("omega",),
    "poschl_teller": ("g",),
    "calogero_a": ("N", "omega", "g"),
}


def _validate_params(name, params):
    required = _REQUIRED[name]
    for key in params:
        if key.lower() in _HBAR_NAMES:
            raise ValidationError(
                "prepotentials must not depend on hbar; the classical limit of W is required"
            )
    missing = [k for k in required if k not in params]
    extra = [k for k in params if k not in required]
    if missing:
        raise ValidationError(f"{name}: missing parameter(s) {missing}")
    if extra:
        raise ValidationError(f"{name}: unknown parameter(s) {extra}")
    out = {}
    for key in required:
        value = params[key]
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name}: parameter {key} must be a number") from None
        if not math.isfinite(value) or value <= 0:
            raise ValidationError(f"{name}: parameter {key} must be positive, got {value}")
        out[key] = value
    if name == "calogero_a":
        if out["N"] != int(out["N"]) or out["N"] < 2:
            raise ValidationError(f"calogero_a: N must be an integer >= 2, got {params['N']}")
        out["N"] = int(out["N"])
    return out


def make_system(name, params=None, **kwargs):
    """Build a catalog system.

    Parameters
    ----------
    name : {"harmonic", "poschl_teller", "calogero_a"}
    params : mapping, optional
        ``omega`` for harmonic, ``g`` for poschl_teller, ``N``, ``omega``,
        ``g`` for calogero_a. Keyword arguments are merged in.

    Examples
    --------
    >>> make_system("harmonic", omega=1.0).W(np.array([2.0]))
    -2.0
    """
    if name not in _REQUIRED:
        raise CatalogError(f"unknown system {name!r}; known: {', '.join(CATALOG)}")
    merged = dict(params or {})
    merged.update(kwargs)
    p = _validate_params(name, merged)
    if name == "harmonic":
        fields = _harmonic(p["omega"])
    elif name == "poschl_teller":
        fields = _poschl_teller(p["g"])
    else:
        fields = _calogero_a(p["N"], p["omega"], p["g"])
    fields.setdefault("domain", _everywhere)
    return PrepotentialSystem(name=name, params=MappingProxyType(p), **fields)


def _pointwise(f, out_shape):
    """Lift a single-point callable to batches of shape ``(..., r)``."""

    def wrapped(q):
        q = np.asarray(q, dtype=float)
        if q.ndim == 1:
            return np.asarray(f(q), dtype=float).reshape(out_shape)
        flat = q.reshape(-1, q.shape[-1])
        res = np.array([np.asarray(f(x), dtype=float).reshape(out_shape) for x in flat])
        return res.reshape(q.shape[:-1] + out_shape)

    return wrapped


def custom_system(
    W,
    dimension,
    gradW=None,
    hessW=None,
    domain=None,
    *,
    name="custom",
    params=None,
    default_guess=None,
    reference_spectrum=None,
    reference_classical_eigenfunctions=(),
    vectorized=False,
):
    """Wrap a user-supplied prepotential.

    ``W`` (and ``gradW``/``hessW`` when given) take a point of shape ``(r,)``
    unless ``vectorized`` is set. Missing derivatives fall back to central
    differences. A callable with an ``hbar`` argument is rejected: the
    prepotential has to be hbar-independent.
    """
    r = int(dimension)
    if r < 1:
        raise ValidationError("dimension must be a positive integer")
    for fn in (W, gradW, hessW):
        if fn is None:
            continue
        try:
            names = set(inspect.signature(fn).parameters)
        except (TypeError, ValueError):
            continue
        if names & _HBAR_NAMES:
            raise ValidationError("prepotentials must not depend on hbar")
    params = dict(params or {})
    for key in params:
        if key.lower() in _HBAR_NAMES:
            raise ValidationError("prepotentials must not depend on hbar")

    if vectorized:
        W_v, grad_v, hess_v = W, gradW, hessW
    else:
        W_v = _pointwise(W, ())
        grad_v = _pointwise(gradW, (r,)) if gradW is not None else None
        hess_v = _pointwise(hessW, (r, r)) if hessW is not None else None

    def W_scalar(x):
        return float(W_v(x))

    analytic_gradient = grad_v is not None
    if grad_v is None:
        grad_v = _pointwise(lambda x: _numdiff.gradient(W_scalar, x), (r,))
    analytic_hessian = hess_v is not None
    if hess_v is None:
        g_single = grad_v
        hess_v = _pointwise(lambda x: _numdiff.jacobian(g_single, x), (r, r))

    if domain is None:
        dom = _everywhere
    elif vectorized:
        dom = domain
    else:
        dom = _pointwise_bool(domain)

    guess = np.zeros(r) if default_guess is None else np.asarray(default_guess, dtype=float)
    return PrepotentialSystem(
        name=name,
        dimension=r,
        params=MappingProxyType(params),
        W=W_v,
        gradW=grad_v,
        hessW=hess_v,
        domain=dom,
        default_guess=guess,
        reference_spectrum=reference_spectrum,
        reference_classical_eigenfunctions=tuple(reference_classical_eigenfunctions),
        analytic_gradient=analytic_gradient,
        analytic_hessian=analytic_hessian,
        vectorized=vectorized,
    )


def _pointwise_bool(pred):
    def wrapped(q):
        q = np.asarray(q, dtype=float)
        if q.ndim == 1:
            return bool(pred(q))
        flat = q.reshape(-1, q.shape[-1])
        return np.array([bool(pred(x)) for x in flat]).reshape(q.shape[:-1])

    return wrapped


def _squeeze(value, arr):
    return float(value) if arr.ndim == 1 else value


def classical_potential(system, q):
    """``V_C(q) = |grad W(q)|^2 / 2``; non-negative, zero at equilibrium."""
    arr = system.check(q)
    g = system.gradW(arr)
    return _squeeze(0.5 * np.sum(g**2, axis=-1), arr)


def quantum_potential(system, q, hbar):
    """``V(q) = V_C(q) + (hbar/2) tr hess W(q)``, the potential whose ground state is exp(W/hbar) at E=0."""
    if not hbar > 0:
        raise ValidationError(f"hbar must be positive, got {hbar}")
    arr = system.check(q)
    g = system.gradW(arr)
    lap = np.trace(system.hessW(arr), axis1=-2, axis2=-1)
    return _squeeze(0.5 * np.sum(g**2, axis=-1) + 0.5 * hbar * lap, arr)


def level_vectors(dimension, max_total):
    """All non-negative integer vectors of length ``dimension`` with sum <= ``max_total``.

    Ordered by total, then lexicographically descending.
    """
    out = []
    for total in range(max_total + 1):
        for combo in itertools.combinations_with_replacement(range(dimension), total):
            v = [0] * dimension
            for j in combo:
                v[j] += 1
            out.append(tuple(v))
    return sorted(set(out), key=lambda v: (sum(v), [-x for x in v]))

