"""Shared helpers for the test suite."""

import numpy as np

from cavityghz import AtomRef, CompositeState, Rotation2

FG = ("f", "g")
AB = ("a", "b")


def pair_state(vec4, field=None) -> CompositeState:
    """Two f/g atoms in the given 4-vector, with a trivial (or given) field."""
    field = np.ones(1) if field is None else np.asarray(field)
    amps = np.kron(np.asarray(vec4, dtype=complex), field)
    return CompositeState((AtomRef("A1", FG), AtomRef("A2", FG)), field.size, amps)


def triple_state(vec8) -> CompositeState:
    """Three f/g atoms in the given 8-vector over a trivial field."""
    refs = tuple(AtomRef(f"A{k}", FG) for k in (1, 2, 3))
    return CompositeState(refs, 1, np.asarray(vec8, dtype=complex))


def random_state(rng, atom_count: int, dim: int) -> np.ndarray:
    """Haar-ish random normalized amplitude vector."""
    n = (2**atom_count) * dim
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return vec / np.linalg.norm(vec)


def random_unitary2(rng) -> Rotation2:
    """Haar-random 2x2 unitary."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Rotation2(q, "custom")
