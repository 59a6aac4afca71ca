"""States of the atoms-plus-cavity system in a truncated Fock basis.

Conventions fixed here and relied on everywhere else:

* A composite state orders subsystems as (atom 1, ..., atom m, field) with the
  Fock index varying fastest, so the flat amplitude vector reshapes to
  ``(2,) * m + (dim,)``.
* For each atom the first-listed level has index 0: ``f`` before ``g`` for
  dispersive atoms, ``a`` (upper) before ``b`` (lower) for resonant probes.
* States are immutable values; every operation returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .backend import kernels
from .errors import (
    DegenerateCat,
    DimensionMismatch,
    TailMassExceeded,
    UnknownAtom,
    ValidationError,
    ZeroProbabilityBranch,
)

DEFAULT_TAIL_TOL = 1e-12
ZERO_PROB_TOL = 1e-14

LEVELS_FG = ("f", "g")
LEVELS_AB = ("a", "b")
_ALLOWED_LEVELS = (LEVELS_FG, LEVELS_AB)


def parse_sign(sign) -> int:
    """Normalize a sign given as +/-1 or '+'/'-' to an int."""
    if sign in (1, +1.0, "+", "plus"):
        return 1
    if sign in (-1, -1.0, "-", "minus"):
        return -1
    raise ValidationError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


def _frozen_complex(values, length=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True).ravel()
    if length is not None and arr.size != length:
        raise ValidationError(f"expected {length} amplitudes, got {arr.size}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FieldState:
    """Cavity mode in the first ``dim`` Fock levels.

    ``tail_mass`` is the pre-normalization probability of the topmost retained
    level for states built from a coherent amplitude; ``raw_norm`` carries the
    squared norm before normalization for states (cats, probe branches) that
    are naturally defined unnormalized.
    """

    amplitudes: np.ndarray
    normalized: bool = True
    tail_mass: float = 0.0
    raw_norm: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen_complex(self.amplitudes))
        if self.dim < 1:
            raise ValidationError("field needs at least one Fock level")
        if self.normalized and abs(self.norm_squared() - 1.0) > 1e-6:
            raise ValidationError("state flagged normalized is far from unit norm")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class AtomState:
    """Standalone two-level atom used as protocol input."""

    label: str
    levels: tuple[str, str]
    amplitudes: np.ndarray

    def __post_init__(self):
        if tuple(self.levels) not in _ALLOWED_LEVELS:
            raise ValidationError(
                f"levels must be {LEVELS_FG} or {LEVELS_AB}, got {self.levels!r}"
            )
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "amplitudes", _frozen_complex(self.amplitudes, 2))
        if abs(np.sum(np.abs(self.amplitudes) ** 2) - 1.0) > 1e-12:
            raise ValidationError(f"atom {self.label!r} amplitudes are not normalized")

    @classmethod
    def basis(cls, label: str, levels: Sequence[str], level: str) -> "AtomState":
        levels = tuple(levels)
        if level not in levels:
            raise ValidationError(f"level {level!r} not in {levels}")
        amps = (1.0, 0.0) if level == levels[0] else (0.0, 1.0)
        return cls(label, levels, amps)


@dataclass(frozen=True)
class AtomRef:
    """Identity and level pair of one atom inside a composite state."""

    label: str
    levels: tuple[str, str]


@dataclass(frozen=True)
class CompositeState:
    """Normalized joint state of m atoms and the cavity mode."""

    atoms: tuple[AtomRef, ...]
    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        expected = (2 ** len(self.atoms)) * self.dim
        object.__setattr__(
            self, "amplitudes", _frozen_complex(self.amplitudes, expected)
        )
        labels = [a.label for a in self.atoms]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate atom labels: {labels}")
        if abs(self.norm_squared() - 1.0) > 1e-6:
            raise ValidationError("composite state is far from unit norm")

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    def atom_index(self, label: str) -> int:
        for i, ref in enumerate(self.atoms):
            if ref.label == label:
                return i
        raise UnknownAtom(f"no atom labelled {label!r}")

    def atom_levels(self, label: str) -> tuple[str, str]:
        return self.atoms[self.atom_index(label)].levels

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def field_probabilities(self) -> np.ndarray:
        """Marginal photon-number distribution."""
        resh = self.amplitudes.reshape(-1, self.dim)
        return np.sum(np.abs(resh) ** 2, axis=0)

    def scratch(self) -> np.ndarray:
        """Writable copy of the amplitudes for kernel updates."""
        return np.array(self.amplitudes, dtype=np.complex128)

    def strides_for(self, label: str) -> tuple[int, int, int]:
        """(pre, mid, dim) axis sizes for kernel calls targeting one atom."""
        idx = self.atom_index(label)
        pre = 2**idx
        mid = 2 ** (self.atom_count - 1 - idx)
        return pre, mid, self.dim


def flatten_index(bits: Sequence[int], n: int, dim: int) -> int:
    """Flat amplitude index of basis state (bits, photon number n)."""
    i = 0
    for b in bits:
        i = 2 * i + b
    return i * dim + n


def unflatten_index(i: int, atom_count: int, dim: int) -> tuple[tuple[int, ...], int]:
    """Inverse of :func:`flatten_index`."""
    n = i % dim
    rest = i // dim
    bits = []
    for _ in range(atom_count):
        bits.append(rest % 2)
        rest //= 2
    return tuple(reversed(bits)), n


def make_coherent(alpha, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> FieldState:
    """Coherent state of amplitude ``alpha``, renormalized over the truncation.

    Raises ``TailMassExceeded`` when the pre-normalization weight of the last
    retained Fock level exceeds ``tail_tol``.
    """
    if dim < 1:
        raise ValidationError("dim must be at least 1")
    alpha = complex(alpha)
    amps = np.zeros(dim, dtype=np.complex128)
    # c_{n+1} = c_n * alpha / sqrt(n+1), stable for the amplitudes used here
    c = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(dim):
        amps[n] = c
        c = c * alpha / math.sqrt(n + 1)
    tail = float(abs(amps[dim - 1]) ** 2)
    if tail > tail_tol:
        raise TailMassExceeded(
            f"|c_{dim - 1}|^2 = {tail:.3e} exceeds tail tolerance {tail_tol:.1e} "
            f"for alpha = {alpha}"
        )
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return FieldState(amps, tail_mass=tail)


def inner(x: FieldState, y: FieldState) -> complex:
    """Inner product <x|y> over the shared truncated basis."""
    if x.dim != y.dim:
        raise DimensionMismatch(f"dims differ: {x.dim} vs {y.dim}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def cat_state(
    alpha,
    sign,
    dim: int,
    normalize: bool = True,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> FieldState:
    """Even (+) or odd (-) superposition of |alpha> and |-alpha>.

    The returned state is normalized unless ``normalize`` is false; the raw
    squared norm 2(1 +/- e^{-2|alpha|^2}) is reported as ``raw_norm`` either
    way.
    """
    s = parse_sign(sign)
    alpha = complex(alpha)
    if s < 0 and alpha == 0:
        raise DegenerateCat("odd cat at alpha = 0 is the zero vector")
    plus = make_coherent(alpha, dim, tail_tol)
    minus = make_coherent(-alpha, dim, tail_tol)
    raw = plus.amplitudes + s * minus.amplitudes
    raw_norm = float(np.sum(np.abs(raw) ** 2))
    if raw_norm < 1e-280:
        raise DegenerateCat("cat state has vanishing norm")
    if normalize:
        return FieldState(raw / math.sqrt(raw_norm), raw_norm=raw_norm)
    return FieldState(raw, normalized=False, raw_norm=raw_norm)


def compose(atoms: Sequence[AtomState], field: FieldState) -> CompositeState:
    """Tensor product of standalone atoms (in order) with the field."""
    if not field.normalized:
        raise ValidationError("compose requires a normalized field state")
    amps = np.ones(1, dtype=np.complex128)
    for atom in atoms:
        amps = np.kron(amps, atom.amplitudes)
    amps = np.kron(amps, field.amplitudes)
    refs = tuple(AtomRef(a.label, a.levels) for a in atoms)
    return CompositeState(refs, field.dim, amps)


def append_atom(state: CompositeState, atom: AtomState) -> CompositeState:
    """Adjoin a fresh atom after the existing ones (field stays last)."""
    if any(ref.label == atom.label for ref in state.atoms):
        raise ValidationError(f"atom label {atom.label!r} already present")
    old = state.amplitudes.reshape(-1, state.dim)
    new = np.einsum("in,b->ibn", old, atom.amplitudes).reshape(-1)
    return CompositeState(state.atoms + (AtomRef(atom.label, atom.levels),), state.dim, new)


def measure_atom(
    state: CompositeState,
    atom: str,
    basis: Sequence[str] | None = None,
    rng: np.random.Generator | None = None,
    force: str | None = None,
) -> tuple[str, float, CompositeState]:
    """Projective measurement of one atom in its own level basis.

    Returns ``(outcome, probability, collapsed)`` where ``probability`` is the
    exact pre-collapse Born probability of the realized outcome.  ``force``
    post-selects an outcome instead of sampling from ``rng``; forcing an
    outcome with probability below 1e-14 raises ``ZeroProbabilityBranch``.
    """
    levels = state.atom_levels(atom)
    if basis is not None and tuple(basis) != levels:
        raise ValidationError(f"basis {tuple(basis)} does not match levels {levels}")
    pre, mid, dim = state.strides_for(atom)
    half = mid * dim
    work = state.scratch()
    p0 = min(max(kernels.branch_probability(work, pre, half, 0), 0.0), 1.0)
    if force is not None:
        if force not in levels:
            raise ValidationError(f"outcome {force!r} not in levels {levels}")
        idx = levels.index(force)
    else:
        if rng is None:
            raise ValidationError("sampling a measurement requires an rng")
        idx = 0 if rng.random() < p0 else 1
    prob = p0 if idx == 0 else 1.0 - p0
    if force is not None and prob < ZERO_PROB_TOL:
        raise ZeroProbabilityBranch(
            f"post-selected outcome {force!r} on atom {atom!r} has probability {prob:.3e}"
        )
    kernels.collapse_two_level(work, pre, half, idx, 1.0 / math.sqrt(prob))
    return levels[idx], prob, CompositeState(state.atoms, state.dim, work)


@dataclass(frozen=True)
class DensityBlock:
    """Reduced density matrix over a retained subset of subsystems."""

    mask: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("density block must be a square matrix")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValidationError("density block is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValidationError("density block trace differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "mask", tuple(self.mask))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


FIELD = "field"


def reduce(state: CompositeState, keep: Sequence[str]) -> DensityBlock:
    """Partial trace keeping the named atoms (and optionally ``FIELD``).

    Kept subsystems stay in their original relative order regardless of the
    order given in ``keep``.
    """
    keep = list(keep)
    if not keep:
        raise ValidationError("keep mask must name at least one subsystem")
    m = state.atom_count
    axes = []
    mask = []
    for i, ref in enumerate(state.atoms):
        if ref.label in keep:
            axes.append(i)
            mask.append(ref.label)
    if FIELD in keep:
        axes.append(m)
        mask.append(FIELD)
    unknown = set(keep) - set(mask)
    if unknown:
        raise UnknownAtom(f"unknown subsystems in keep mask: {sorted(unknown)}")
    shape = (2,) * m + (state.dim,)
    tensor = state.amplitudes.reshape(shape)
    traced = [i for i in range(m + 1) if i not in axes]
    moved = np.transpose(tensor, axes + traced)
    kept_size = int(np.prod([shape[i] for i in axes]))
    flat = moved.reshape(kept_size, -1)
    rho = flat @ flat.conj().T
    return DensityBlock(tuple(mask), rho)


def fidelity(state, target) -> float:
    """Squared overlap with a pure target state.

    ``|<target|state>|^2`` when ``state`` is a :class:`CompositeState`;
    ``<target|rho|target>`` when it is a :class:`DensityBlock`.  The target is
    a matching :class:`CompositeState` or a flat amplitude vector.
    """
    tvec = target.amplitudes if isinstance(target, CompositeState) else np.asarray(target)
    tvec = tvec.astype(np.complex128).ravel()
    if isinstance(state, CompositeState):
        if isinstance(target, CompositeState) and (
            target.atoms != state.atoms or target.dim != state.dim
        ):
            raise DimensionMismatch("states live on different composite spaces")
        if tvec.size != state.amplitudes.size:
            raise DimensionMismatch(
                f"target length {tvec.size} != state length {state.amplitudes.size}"
            )
        value = float(abs(np.vdot(tvec, state.amplitudes)) ** 2)
    elif isinstance(state, DensityBlock):
        if tvec.size != state.size:
            raise DimensionMismatch(
                f"target length {tvec.size} != block size {state.size}"
            )
        value = float(np.real(np.vdot(tvec, state.matrix @ tvec)))
    else:
        raise ValidationError(f"cannot score fidelity of {type(state).__name__}")
    if value > 1.0 + 1e-12:
        raise ValidationError(f"fidelity {value} exceeds 1 beyond tolerance")
    return value
