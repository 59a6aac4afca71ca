"""Pure-numpy fallback for the compiled inner-loop kernels.

All functions mutate the flat amplitude array in place and mirror the
signatures of the Cython module ``cavityghz._kernels``.  The layout is the
composite-state convention: axes ``(pre, 2, mid, dim)`` where ``pre`` runs over
atoms created before the target atom, the axis of length 2 is the target
atom's level, ``mid`` runs over later atoms and ``dim`` is the Fock index
(fastest varying).  Two-level-only kernels take the merged ``half = mid*dim``.
"""

import numpy as np


def apply_two_level(amps, pre, half, u00, u01, u10, u11):
    """Apply a 2x2 matrix to one atom across all other indices."""
    view = amps.reshape(pre, 2, half)
    x = view[:, 0, :].copy()
    y = view[:, 1, :]
    view[:, 0, :] = u00 * x + u01 * y
    view[:, 1, :] = u10 * x + u11 * y


def apply_photon_phase(amps, pre, mid, dim, level, phases):
    """Multiply amplitudes on one atom level by a per-photon-number phase."""
    view = amps.reshape(pre, 2, mid, dim)
    view[:, level, :, :] *= phases


def apply_jc_pair(amps, pre, mid, dim, uaa, uab, uba, ubb):
    """Apply excitation-ladder 2x2 blocks coupling (upper, n) with (lower, n+1).

    The coefficient arrays have length ``dim - 1`` and are indexed by the
    upper-level photon number n.  (lower, 0) and (upper, dim-1) are untouched.
    """
    view = amps.reshape(pre, 2, mid, dim)
    x = view[:, 0, :, : dim - 1].copy()
    y = view[:, 1, :, 1:]
    view[:, 0, :, : dim - 1] = uaa * x + uab * y
    view[:, 1, :, 1:] = uba * x + ubb * y


def branch_probability(amps, pre, half, level):
    """Total probability of finding one atom in the given level index."""
    view = amps.reshape(pre, 2, half)[:, level, :]
    return float(np.sum(view.real**2 + view.imag**2))


def collapse_two_level(amps, pre, half, level, scale):
    """Project one atom onto a level and rescale the surviving branch."""
    view = amps.reshape(pre, 2, half)
    view[:, 1 - level, :] = 0.0
    view[:, level, :] *= scale
