"""Unitary generators: exact Jaynes-Cummings propagator, its dispersive limit,
the conditional photon-number phase, field displacement and Ramsey rotations.

Couplings are dimensionless throughout: only the products g*t and the ratio
delta/g enter, so recipes fix g = 1 and quote interaction times as ``gt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .backend import kernels
from .errors import (
    InvalidPhotonNumber,
    NonUnitaryRotation,
    TailMassExceeded,
    ValidationError,
    WrongLevelPair,
)
from .hilbert import (
    DEFAULT_TAIL_TOL,
    LEVELS_AB,
    LEVELS_FG,
    CompositeState,
    FieldState,
)


@dataclass(frozen=True)
class JcParams:
    """Coupling g, interaction time t and detuning delta of one cavity pass."""

    g: float
    t: float
    delta: float = 0.0

    def __post_init__(self):
        if self.g < 0 or self.t < 0:
            raise ValidationError("g and t must be non-negative")


_ROTATION_TAGS = ("R", "K", "R5", "custom")


@dataclass(frozen=True)
class Rotation2:
    """2x2 unitary acting on the (first level, second level) coefficient pair."""

    matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        if self.name not in _ROTATION_TAGS:
            raise ValidationError(f"rotation name must be one of {_ROTATION_TAGS}")
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.shape != (2, 2):
            raise ValidationError("rotation must be a 2x2 matrix")
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > 1e-10:
            raise NonUnitaryRotation(f"matrix for {self.name!r} is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


_SQ2 = 1.0 / math.sqrt(2.0)

# Ramsey pulse used in every preparation stage: |g> -> (|f>+|g>)/sqrt(2).
ROTATION_R = Rotation2(np.array([[_SQ2, _SQ2], [-_SQ2, _SQ2]]), "R")
# Analyzer pulse of the GHZ test: |f> -> (|f>+|g>)/sqrt(2), |g> -> (-|f>+|g>)/sqrt(2).
ROTATION_K = Rotation2(np.array([[_SQ2, -_SQ2], [_SQ2, _SQ2]]), "K")
# Level exchange with a sign: |f> -> |g>, |g> -> -|f>; turns Phi states into Psi states.
ROTATION_R5 = Rotation2(np.array([[0.0, -1.0], [1.0, 0.0]]), "R5")
# Sign flip on |g>; used to switch the hybrid three-party state between signs.
ROTATION_Z = Rotation2(np.diag([1.0, -1.0]), "custom")


def rotate(state: CompositeState, atom: str, rot: Rotation2) -> CompositeState:
    """Apply a 2x2 unitary to one atom across all field indices."""
    pre, mid, dim = state.strides_for(atom)
    work = state.scratch()
    u = rot.matrix
    kernels.apply_two_level(work, pre, mid * dim, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
    return CompositeState(state.atoms, state.dim, work)


def apply_conditional_phase(state: CompositeState, atom: str, phi: float) -> CompositeState:
    """Photon-number phase e^{i phi n} on the f component; g is untouched.

    At phi = pi this sends |f>|alpha> to |f>|-alpha>, the entangling step of
    every preparation pipeline.
    """
    if state.atom_levels(atom) != LEVELS_FG:
        raise WrongLevelPair(f"atom {atom!r} is a resonant probe, not an f/g atom")
    pre, mid, dim = state.strides_for(atom)
    work = state.scratch()
    phases = np.exp(1j * phi * np.arange(dim))
    kernels.apply_photon_phase(work, pre, mid, dim, 0, phases)
    return CompositeState(state.atoms, state.dim, work)


def apply_dispersive(state: CompositeState, atom: str, phi: float) -> CompositeState:
    """Large-detuning propagator: e^{-i phi (n+1)} on the upper level,
    e^{+i phi n} on the lower level, with phi = g^2 t / delta."""
    if state.atom_levels(atom) != LEVELS_AB:
        raise WrongLevelPair(f"atom {atom!r} has no upper/lower pair")
    pre, mid, dim = state.strides_for(atom)
    work = state.scratch()
    n = np.arange(dim)
    kernels.apply_photon_phase(work, pre, mid, dim, 0, np.exp(-1j * phi * (n + 1)))
    kernels.apply_photon_phase(work, pre, mid, dim, 1, np.exp(1j * phi * n))
    return CompositeState(state.atoms, state.dim, work)


def _jc_block_coefficients(params: JcParams, dim: int):
    """2x2 block entries for the excitation manifolds n = 1 .. dim-1.

    Block n couples (upper, n-1) with (lower, n) and rotates by the exact
    propagator with Rabi splitting mu_n = sqrt(g^2 n + delta^2/4).  Arrays are
    indexed by j = n - 1.
    """
    n = np.arange(1, dim, dtype=float)
    g, t, delta = params.g, params.t, params.delta
    mu = np.sqrt(g * g * n + 0.25 * delta * delta)
    # sin(mu t)/mu with the mu -> 0 limit t (only reachable at g = 0)
    safe = np.where(mu > 0, mu, 1.0)
    sinod = np.where(mu > 0, np.sin(safe * t) / safe, t)
    cosp = np.cos(mu * t)
    half_phase = np.exp(0.5j * delta * t)
    uaa = half_phase * (cosp - 0.5j * delta * sinod)
    uab = -1j * g * np.sqrt(n) * half_phase * sinod
    uba = -1j * g * np.sqrt(n) * np.conj(half_phase) * sinod
    ubb = np.conj(half_phase) * (cosp + 0.5j * delta * sinod)
    return uaa, uab, uba, ubb


def apply_jc(state: CompositeState, atom: str, params: JcParams) -> CompositeState:
    """Exact interaction-picture Jaynes-Cummings propagator on a probe atom.

    Block-diagonal over the pairs {(a, n-1), (b, n)}; (b, 0) is invariant for
    any detuning.  The partnerless top rung (a, dim-1) is left untouched so the
    truncated propagator stays exactly unitary; tail-mass checks elsewhere keep
    its population negligible.
    """
    if state.atom_levels(atom) != LEVELS_AB:
        raise WrongLevelPair(f"atom {atom!r} has no upper/lower pair")
    pre, mid, dim = state.strides_for(atom)
    work = state.scratch()
    uaa, uab, uba, ubb = _jc_block_coefficients(params, dim)
    kernels.apply_jc_pair(work, pre, mid, dim, uaa, uab, uba, ubb)
    return CompositeState(state.atoms, state.dim, work)


def jc_propagator_matrix(params: JcParams, dim: int) -> np.ndarray:
    """Dense 2*dim x 2*dim matrix of :func:`apply_jc`, basis (level, n)."""
    u = np.eye(2 * dim, dtype=np.complex128)
    uaa, uab, uba, ubb = _jc_block_coefficients(params, dim)
    for j in range(dim - 1):
        a, b = j, dim + j + 1
        u[a, a] = uaa[j]
        u[a, b] = uab[j]
        u[b, a] = uba[j]
        u[b, b] = ubb[j]
    return u


def dispersive_propagator_matrix(phi: float, dim: int) -> np.ndarray:
    """Dense matrix of :func:`apply_dispersive`, same basis ordering."""
    n = np.arange(dim)
    return np.diag(np.concatenate([np.exp(-1j * phi * (n + 1)), np.exp(1j * phi * n)]))


def dispersive_distance(phi: float, delta_over_g: float, dim: int) -> float:
    """Frobenius distance between the exact and dispersive propagators.

    Compares at fixed accumulated phase phi = g^2 t / delta, i.e. t grows with
    the detuning.  The partnerless (a, dim-1) truncation rung is excluded from
    the comparison: its exact-propagator treatment is a boundary convention,
    not physics.
    """
    g = 1.0
    delta = float(delta_over_g)
    t = phi * delta / (g * g)
    exact = jc_propagator_matrix(JcParams(g, t, delta), dim)
    disp = dispersive_propagator_matrix(phi, dim)
    cut = dim - 1  # flat index of (a, dim-1)
    diff = exact - disp
    diff = np.delete(np.delete(diff, cut, axis=0), cut, axis=1)
    return float(np.linalg.norm(diff))


def probe_branches(field: FieldState, gt: float):
    """Raw upper/lower branch states after a resonant probe crosses the field.

    For a probe entering in the lower level, the field component at photon
    number n feeds cos(gt sqrt(n)) into the lower branch and
    -i sin(gt sqrt(n)) (one rung down) into the upper branch.  Returns
    ``(chi_a, chi_b, p_a, p_b)`` with the branch squared norms summing to 1.
    """
    c = field.amplitudes
    dim = field.dim
    n = np.arange(dim, dtype=float)
    chi_b = c * np.cos(gt * np.sqrt(n))
    chi_a = np.zeros(dim, dtype=np.complex128)
    chi_a[: dim - 1] = -1j * c[1:] * np.sin(gt * np.sqrt(n[1:]))
    p_a = float(np.sum(np.abs(chi_a) ** 2))
    p_b = float(np.sum(np.abs(chi_b) ** 2))
    return (
        FieldState(chi_a, normalized=False, raw_norm=p_a),
        FieldState(chi_b, normalized=False, raw_norm=p_b),
        p_a,
        p_b,
    )


def optimal_probe_time(nbar: float, g: float = 1.0) -> float:
    """Probe time tau with sqrt(nbar) g tau = pi/2, nbar rounded to an integer."""
    if nbar <= 0:
        raise InvalidPhotonNumber(f"mean photon number must be positive, got {nbar}")
    rounded = round(nbar)
    if rounded < 1:
        raise InvalidPhotonNumber(f"mean photon number {nbar} rounds to zero")
    return math.pi / (2.0 * g * math.sqrt(rounded))


@lru_cache(maxsize=64)
def _displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    # D(beta) = exp(beta a+ - beta* a) = exp(-i H) with Hermitian
    # H = i(beta* a - beta a+); the eigendecomposition keeps D unitary to
    # machine precision at any truncation.
    h = np.zeros((dim, dim), dtype=np.complex128)
    k = np.arange(1, dim)
    root = np.sqrt(k)
    h[k, k - 1] = 1j * beta * root
    h[k - 1, k] = -1j * np.conj(beta) * root
    w, v = np.linalg.eigh(h)
    d = (v * np.exp(-1j * w)) @ v.conj().T
    d.setflags(write=False)
    return d


def displace(state, beta, tail_tol: float = DEFAULT_TAIL_TOL):
    """Exact truncated displacement of the field by ``beta``.

    Accepts a :class:`FieldState` or a :class:`CompositeState` and returns the
    same shape.  Raises ``TailMassExceeded`` when the displaced state puts more
    than ``tail_tol`` probability on the topmost Fock level.
    """
    beta = complex(beta)
    if isinstance(state, FieldState):
        d = _displacement_matrix(beta, state.dim)
        new = d @ state.amplitudes
        tail = float(abs(new[-1]) ** 2)
        if tail > tail_tol:
            raise TailMassExceeded(
                f"displacement by {beta} leaves {tail:.3e} at the truncation edge"
            )
        return FieldState(new, tail_mass=tail)
    if isinstance(state, CompositeState):
        d = _displacement_matrix(beta, state.dim)
        resh = state.amplitudes.reshape(-1, state.dim)
        new = resh @ d.T
        tail = float(np.sum(np.abs(new[:, -1]) ** 2))
        if tail > tail_tol:
            raise TailMassExceeded(
                f"displacement by {beta} leaves {tail:.3e} at the truncation edge"
            )
        return CompositeState(state.atoms, state.dim, new.reshape(-1))
    raise ValidationError(f"cannot displace {type(state).__name__}")
