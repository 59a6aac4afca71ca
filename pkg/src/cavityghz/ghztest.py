"""Mermin-style GHZ test: observables, the local-hidden-variable
counter-prediction, exact branch tables and seeded Monte Carlo shots.

The test rotates each party with the analyzer pulse K and detects in the f/g
basis; detecting g corresponds to the +1 eigenvalue of that party's sigma_x.
In hybrid mode the third party is the cavity itself, read out by sending a
fresh atom through the cavity, injecting alpha and post-selecting a resonant
probe, after which detecting the atom in g (f) signals that the cavity held
|alpha> (|-alpha>).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product

import numpy as np

from .dynamics import (
    ROTATION_K,
    ROTATION_R,
    JcParams,
    apply_conditional_phase,
    apply_jc,
    displace,
    optimal_probe_time,
    rotate,
)
from .errors import (
    DimensionMismatch,
    UnknownAtom,
    ValidationError,
    WrongAtomCount,
    ZeroProbabilityBranch,
)
from .hilbert import (
    LEVELS_AB,
    LEVELS_FG,
    AtomState,
    CompositeState,
    append_atom,
    cat_state,
    measure_atom,
    parse_sign,
)
from .protocol import prepare_ghz

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
}

# Allowed detection triples (A1, A2, third party) per sign; anything else has
# zero Born probability for an ideal GHZ state.
ALLOWED_BRANCHES = {
    1: (("g", "g", "g"), ("g", "f", "f"), ("f", "f", "g"), ("f", "g", "f")),
    -1: (("g", "g", "f"), ("g", "f", "g"), ("f", "f", "f"), ("f", "g", "g")),
}

EIGENVALUE = {"g": 1, "f": -1}


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix on the composite space (or an atom/field factor)."""

    label: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("observable must be a square matrix")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValidationError(f"observable {self.label!r} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _atom_slot(space, atom) -> tuple[int, int]:
    """(atom count, target index) for a CompositeState or a bare atom count."""
    if isinstance(space, CompositeState):
        return space.atom_count, space.atom_index(atom)
    count = int(space)
    idx = int(atom)
    if not 0 <= idx < count:
        raise UnknownAtom(f"atom index {atom!r} outside 0..{count - 1}")
    return count, idx


def build_pauli(axis: str, atom, space) -> Observable:
    """sigma_x or sigma_y on one atom, identity on the other atoms."""
    if axis not in _PAULI:
        raise ValidationError(f"axis must be 'x' or 'y', got {axis!r}")
    count, idx = _atom_slot(space, atom)
    matrix = np.ones((1, 1), dtype=np.complex128)
    for k in range(count):
        matrix = np.kron(matrix, _PAULI[axis] if k == idx else np.eye(2))
    return Observable(f"sigma_{axis}^{atom}", matrix)


_MERMIN_AXES = {"A": "xyy", "B": "yxy", "C": "yyx", "D": "xxx"}


def build_mermin(which: str, space) -> Observable:
    """One of the four triple products of single-atom Pauli operators."""
    if which not in _MERMIN_AXES:
        raise ValidationError(f"which must be one of ABCD, got {which!r}")
    count = space.atom_count if isinstance(space, CompositeState) else int(space)
    if count != 3:
        raise WrongAtomCount(f"Mermin operators need exactly 3 atoms, got {count}")
    matrix = np.ones((1, 1), dtype=np.complex128)
    for axis in _MERMIN_AXES[which]:
        matrix = np.kron(matrix, _PAULI[axis])
    return Observable(which, matrix)


def build_cavity_sigma_x(alpha, dim: int) -> Observable:
    """Ladder operator |cat+><cat-| + h.c. built from normalized cat states.

    Coherent states |+/-alpha> are its eigenvectors only up to
    O(e^{-2|alpha|^2}) corrections, which the tests bound explicitly.
    """
    plus = cat_state(alpha, "+", dim).amplitudes
    minus = cat_state(alpha, "-", dim).amplitudes
    return Observable("sigma_x^C", np.outer(plus, minus.conj()) + np.outer(minus, plus.conj()))


def expectation(obs: Observable, state: CompositeState) -> float:
    """Real expectation value <psi|O|psi>.

    The observable may live on the full composite space, on the atoms only, or
    on the field only; identity factors are implied on the rest.
    """
    atoms_size = 2**state.atom_count
    resh = state.amplitudes.reshape(atoms_size, state.dim)
    if obs.size == atoms_size * state.dim:
        value = np.vdot(state.amplitudes, obs.matrix @ state.amplitudes)
    elif obs.size == atoms_size:
        value = np.vdot(resh, obs.matrix @ resh)
    elif obs.size == state.dim:
        value = np.vdot(resh, resh @ obs.matrix.T)
    else:
        raise DimensionMismatch(
            f"observable size {obs.size} fits neither atoms ({atoms_size}), "
            f"field ({state.dim}) nor the full space"
        )
    return float(value.real)


def lhv_prediction(sign) -> int:
    """Product of the three sigma_x elements of reality: -sign."""
    return -parse_sign(sign)


def lhv_exhaustive_check(sign) -> bool:
    """Scan all 64 element-of-reality assignments for the given sign.

    Confirms that at least one assignment satisfies the three constraints
    a = b = c = -sign and that every such assignment forces the sigma_x
    product to -sign, never to the quantum value +sign.
    """
    s = parse_sign(sign)
    satisfying = 0
    for mx1, mx2, mx3, my1, my2, my3 in product((1, -1), repeat=6):
        a = mx1 * my2 * my3
        b = my1 * mx2 * my3
        c = my1 * my2 * mx3
        if (a, b, c) != (-s, -s, -s):
            continue
        satisfying += 1
        if mx1 * mx2 * mx3 != -s:
            return False
    return satisfying > 0


@dataclass(frozen=True)
class GhzTestResult:
    """Outcome record of a seeded multi-shot GHZ test."""

    sign: int
    mode: str
    shots: int
    branch_counts: dict[tuple[str, str, str], int]
    products: tuple[int, ...]
    qm_prediction: int
    lhv_prediction: int
    mean_postselect_probability: float | None = None

    def all_match_qm(self) -> bool:
        return all(p == self.qm_prediction for p in self.products)

    def as_dict(self) -> dict:
        """Report form with stable, JSON-friendly keys."""
        counts = {",".join(k): v for k, v in sorted(self.branch_counts.items())}
        histogram = dict(sorted(Counter(map(str, self.products)).items()))
        if self.all_match_qm():
            verdict = "QM"
        elif all(p == self.lhv_prediction for p in self.products):
            verdict = "LHV"
        else:
            verdict = "MIXED"
        out = {
            "sign": self.sign,
            "mode": self.mode,
            "shots": self.shots,
            "branch_counts": counts,
            "product_histogram": histogram,
            "qm_prediction": self.qm_prediction,
            "lhv_prediction": self.lhv_prediction,
            "all_match_qm": self.all_match_qm(),
            "verdict": verdict,
        }
        if self.mean_postselect_probability is not None:
            out["mean_postselect_probability"] = self.mean_postselect_probability
        return out


def _probe_time_for(alpha, gt_probe) -> float:
    if gt_probe is not None:
        return gt_probe
    return optimal_probe_time(abs(2 * complex(alpha)) ** 2)


def _hybrid_readout(state, alpha, gt, phi, rng, force_third=None):
    """Close the hybrid test: convert the cavity sign into an atomic detection.

    Sends atom A3 in (|f>+|g>)/sqrt(2) through the cavity, injects alpha,
    post-selects the resonant probe A4 in its upper level, then measures A3.
    Returns (third outcome, probe probability, A3 probability).
    """
    state = append_atom(state, AtomState.basis("A3", LEVELS_FG, "g"))
    state = rotate(state, "A3", ROTATION_R)
    state = apply_conditional_phase(state, "A3", phi)
    state = displace(state, alpha)
    state = append_atom(state, AtomState.basis("A4", LEVELS_AB, "b"))
    state = apply_jc(state, "A4", JcParams(1.0, gt))
    _, probe_prob, state = measure_atom(state, "A4", force="a")
    outcome, third_prob, _ = measure_atom(state, "A3", rng=rng, force=force_third)
    return outcome, probe_prob, third_prob


def run_ghz_test(
    sign,
    mode: str = "atomic",
    shots: int = 1,
    alpha=2.0,
    dim: int = 64,
    gt_probe: float | None = None,
    seed: int = 0,
) -> GhzTestResult:
    """Run the single-run GHZ test ``shots`` times with per-shot seeds.

    The deterministic, post-selected preparation is computed once and reused;
    randomness enters only at the analyzer detections (stream derived from
    ``(seed, shot index)``, so results are reproducible and order-independent).
    """
    s = parse_sign(sign)
    if shots < 1:
        raise ValidationError(f"shots must be at least 1, got {shots}")
    if mode not in ("atomic", "hybrid"):
        raise ValidationError(f"mode must be 'atomic' or 'hybrid', got {mode!r}")
    gt = _probe_time_for(alpha, gt_probe)
    phi = math.pi
    base = prepare_ghz(s, mode, alpha, dim, gt_probe=gt).final_state
    counts: Counter = Counter()
    products: list[int] = []
    probe_probs: list[float] = []
    for shot in range(shots):
        rng = np.random.default_rng([seed, shot])
        st = base
        outcomes: list[str] = []
        for label in ("A1", "A2"):
            st = rotate(st, label, ROTATION_K)
            o, _, st = measure_atom(st, label, rng=rng)
            outcomes.append(o)
        if mode == "atomic":
            st = rotate(st, "A3", ROTATION_K)
            o, _, st = measure_atom(st, "A3", rng=rng)
            outcomes.append(o)
        else:
            o, probe_prob, _ = _hybrid_readout(st, alpha, gt, phi, rng)
            probe_probs.append(probe_prob)
            outcomes.append(o)
        branch = tuple(outcomes)
        counts[branch] += 1
        products.append(EIGENVALUE[branch[0]] * EIGENVALUE[branch[1]] * EIGENVALUE[branch[2]])
    return GhzTestResult(
        sign=s,
        mode=mode,
        shots=shots,
        branch_counts=dict(counts),
        products=tuple(products),
        qm_prediction=s,
        lhv_prediction=-s,
        mean_postselect_probability=(
            float(np.mean(probe_probs)) if probe_probs else None
        ),
    )


def exact_branch_probabilities(
    sign,
    mode: str = "atomic",
    alpha=2.0,
    dim: int = 64,
    gt_probe: float | None = None,
) -> dict[tuple[str, str, str], float]:
    """Born probabilities of all eight detection triples, from the amplitudes.

    In hybrid mode the probabilities are conditioned on the probe
    post-selection (normalized over the eight branches).
    """
    s = parse_sign(sign)
    gt = _probe_time_for(alpha, gt_probe)
    phi = math.pi
    base = prepare_ghz(s, mode, alpha, dim, gt_probe=gt).final_state
    probs: dict[tuple[str, str, str], float] = {}
    for branch in product("gf", repeat=3):
        st = base
        p = 1.0
        try:
            for label, outcome in zip(("A1", "A2"), branch):
                st = rotate(st, label, ROTATION_K)
                _, q, st = measure_atom(st, label, force=outcome)
                p *= q
            if mode == "atomic":
                st = rotate(st, "A3", ROTATION_K)
                _, q, _ = measure_atom(st, "A3", force=branch[2])
                p *= q
            else:
                _, probe_prob, third_prob = _hybrid_readout(
                    st, alpha, gt, phi, rng=None, force_third=branch[2]
                )
                p *= probe_prob * third_prob
        except ZeroProbabilityBranch:
            p = 0.0
        probs[branch] = p
    if mode == "hybrid":
        total = sum(probs.values())
        probs = {k: v / total for k, v in probs.items()}
    return probs
