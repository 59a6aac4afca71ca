"""Declarative step sequencer for the Bell and GHZ preparation pipelines.

A pipeline is a list of steps executed against a cavity that starts in a
coherent state.  The canned recipes reproduce the published sequences: Ramsey
rotation, pi conditional phase, second Ramsey rotation per dispersive atom,
then a coherent injection and a resonant probe whose upper-level detection
disentangles the atoms from the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .dynamics import (
    ROTATION_R,
    ROTATION_R5,
    ROTATION_Z,
    JcParams,
    Rotation2,
    apply_conditional_phase,
    apply_jc,
    displace,
    optimal_probe_time,
    rotate,
)
from .errors import ValidationError, ZeroProbabilityBranch
from .hilbert import (
    DEFAULT_TAIL_TOL,
    LEVELS_AB,
    LEVELS_FG,
    AtomState,
    CompositeState,
    append_atom,
    cat_state,
    compose,
    make_coherent,
    measure_atom,
    parse_sign,
)


@dataclass(frozen=True)
class AddAtom:
    """Send a fresh atom into the beam; label defaults to A1, A2, ..."""

    levels: tuple[str, str]
    initial: str
    label: str | None = None


@dataclass(frozen=True)
class Rotate:
    """Ramsey-zone rotation of one atom."""

    atom: str
    rotation: Rotation2


@dataclass(frozen=True)
class ConditionalPhase:
    """Dispersive cavity pass: photon-number phase on the f component."""

    atom: str
    phi: float


@dataclass(frozen=True)
class ResonantProbe:
    """Resonant cavity pass of an upper/lower probe atom."""

    atom: str
    gt: float
    delta: float = 0.0


@dataclass(frozen=True)
class Inject:
    """Displace the cavity field by a coherent amplitude."""

    beta: complex


@dataclass(frozen=True)
class Measure:
    """Detect one atom; ``post_select`` forces the outcome instead of sampling."""

    atom: str
    basis: tuple[str, str] | None = None
    post_select: str | None = None


ProtocolStep = Union[AddAtom, Rotate, ConditionalPhase, ResonantProbe, Inject, Measure]


@dataclass(frozen=True)
class MeasurementRecord:
    atom: str
    outcome: str
    probability: float
    post_selected: bool


@dataclass(frozen=True)
class ProtocolRun:
    """Final state plus the measurement trace of one execution."""

    final_state: CompositeState
    records: tuple[MeasurementRecord, ...]
    branch_probability: float


def _as_rng(rng) -> np.random.Generator | None:
    if rng is None or isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def run_protocol(
    steps: Sequence[ProtocolStep],
    dim: int,
    alpha,
    rng=None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ProtocolRun:
    """Execute steps in order against a cavity prepared in |alpha>.

    Sampled measurement outcomes are drawn from ``rng`` (a seed or Generator);
    post-selected ones are forced and their Born probability recorded.  The
    returned ``branch_probability`` is the product of all realized outcome
    probabilities.
    """
    rng = _as_rng(rng)
    state = compose([], make_coherent(alpha, dim, tail_tol))
    records: list[MeasurementRecord] = []
    branch_probability = 1.0
    measured: set[str] = set()
    created = 0
    for step in steps:
        if isinstance(step, AddAtom):
            created += 1
            label = step.label if step.label is not None else f"A{created}"
            state = append_atom(state, AtomState.basis(label, step.levels, step.initial))
        elif isinstance(step, Rotate):
            state = rotate(state, step.atom, step.rotation)
        elif isinstance(step, ConditionalPhase):
            state = apply_conditional_phase(state, step.atom, step.phi)
        elif isinstance(step, ResonantProbe):
            state = apply_jc(state, step.atom, JcParams(1.0, step.gt, step.delta))
        elif isinstance(step, Inject):
            state = displace(state, step.beta, tail_tol)
        elif isinstance(step, Measure):
            if step.atom in measured:
                raise ValidationError(f"atom {step.atom!r} was already measured")
            state.atom_index(step.atom)  # raises UnknownAtom early
            outcome, prob, state = measure_atom(
                state, step.atom, basis=step.basis, rng=rng, force=step.post_select
            )
            measured.add(step.atom)
            records.append(
                MeasurementRecord(step.atom, outcome, prob, step.post_select is not None)
            )
            branch_probability *= prob
        else:
            raise ValidationError(f"unknown protocol step {step!r}")
    return ProtocolRun(state, tuple(records), branch_probability)


def success_probability_report(run: ProtocolRun) -> float:
    """Product of the post-selected outcome probabilities (1 if none)."""
    prob = 1.0
    for record in run.records:
        if record.post_selected:
            prob *= record.probability
    return prob


def _dispersive_pipeline(phi: float, count: int) -> list[ProtocolStep]:
    steps: list[ProtocolStep] = []
    for k in range(1, count + 1):
        label = f"A{k}"
        steps += [
            AddAtom(LEVELS_FG, "g"),
            Rotate(label, ROTATION_R),
            ConditionalPhase(label, phi),
            Rotate(label, ROTATION_R),
        ]
    return steps


def _probe_steps(label: str, gt: float) -> list[ProtocolStep]:
    return [
        AddAtom(LEVELS_AB, "b"),
        ResonantProbe(label, gt),
        Measure(label, post_select="a"),
    ]


def _probe_time(alpha, gt_probe) -> float:
    if gt_probe is not None:
        return gt_probe
    return optimal_probe_time(abs(2 * complex(alpha)) ** 2)


def _require_positive_real(alpha) -> float:
    alpha = complex(alpha)
    if alpha.imag != 0 or alpha.real <= 0:
        raise ValidationError(f"recipes need a real positive alpha, got {alpha}")
    return alpha.real


EPR_VARIANTS = ("phi+", "phi-", "psi+", "psi-")
# injection sign and whether the extra exchange rotation runs afterwards
_EPR_RECIPES = {
    "phi+": (1, False),
    "phi-": (-1, False),
    "psi-": (1, True),
    "psi+": (-1, True),
}


def prepare_epr(
    variant: str,
    alpha,
    dim: int = 64,
    gt_probe: float | None = None,
    rng=None,
    phi: float = math.pi,
) -> ProtocolRun:
    """Prepare one of the four Bell states of atoms A1 and A2.

    Runs both dispersive pipelines, injects +alpha (phi+/psi-) or -alpha
    (phi-/psi+), post-selects the probe A3 in its upper level and, for the psi
    variants, applies the exchange rotation to A2.
    """
    key = str(variant).lower()
    if key not in _EPR_RECIPES:
        raise ValidationError(f"variant must be one of {EPR_VARIANTS}, got {variant!r}")
    alpha = _require_positive_real(alpha)
    inject_sign, exchange = _EPR_RECIPES[key]
    gt = _probe_time(alpha, gt_probe)
    steps = _dispersive_pipeline(phi, 2)
    steps.append(Inject(inject_sign * alpha))
    steps += _probe_steps("A3", gt)
    if exchange:
        steps.append(Rotate("A2", ROTATION_R5))
    return run_protocol(steps, dim, alpha, rng)


def prepare_ghz(
    sign,
    mode: str = "atomic",
    alpha=2.0,
    dim: int = 64,
    gt_probe: float | None = None,
    rng=None,
    phi: float = math.pi,
) -> ProtocolRun:
    """Prepare a three-party GHZ state of the given sign.

    ``atomic`` mode runs three dispersive pipelines, injects sign*alpha and
    post-selects the probe A4, leaving (|fff> + sign |ggg>)/sqrt(2).
    ``hybrid`` mode stops after two pipelines, leaving the atoms A1, A2
    entangled with the even/odd cavity cat states; the minus sign is produced
    by a trailing sign-flip Ramsey pulse on A2.
    """
    s = parse_sign(sign)
    if mode not in ("atomic", "hybrid"):
        raise ValidationError(f"mode must be 'atomic' or 'hybrid', got {mode!r}")
    alpha = _require_positive_real(alpha)
    if mode == "hybrid":
        steps = _dispersive_pipeline(phi, 2)
        if s < 0:
            steps.append(Rotate("A2", ROTATION_Z))
        return run_protocol(steps, dim, alpha, rng)
    gt = _probe_time(alpha, gt_probe)
    steps = _dispersive_pipeline(phi, 3)
    steps.append(Inject(s * alpha))
    steps += _probe_steps("A4", gt)
    return run_protocol(steps, dim, alpha, rng)


def bell_pair(variant: str) -> np.ndarray:
    """Ideal Bell state on (A1, A2) in the basis ff, fg, gf, gg."""
    key = str(variant).lower()
    vecs = {
        "phi+": [1, 0, 0, 1],
        "phi-": [1, 0, 0, -1],
        "psi+": [0, 1, 1, 0],
        "psi-": [0, 1, -1, 0],
    }
    if key not in vecs:
        raise ValidationError(f"variant must be one of {EPR_VARIANTS}, got {variant!r}")
    return np.array(vecs[key], dtype=np.complex128) / math.sqrt(2.0)


def ghz_triple(sign) -> np.ndarray:
    """Ideal GHZ state (|fff> + sign |ggg>)/sqrt(2) as an 8-vector."""
    s = parse_sign(sign)
    vec = np.zeros(8, dtype=np.complex128)
    vec[0] = 1.0
    vec[7] = s
    return vec / math.sqrt(2.0)


def hybrid_ghz_target(sign, alpha, dim: int) -> np.ndarray:
    """Ideal hybrid state on (A1, A2, field) built from normalized cats.

    The even/odd raw norms weight the two branches, i.e. the state is
    (sqrt(N+)|ff>|cat+> + sign sqrt(N-)|gg>|cat->)/2 with unit-norm cats.
    """
    s = parse_sign(sign)
    plus = cat_state(alpha, "+", dim)
    minus = cat_state(alpha, "-", dim)
    target = np.zeros(4 * dim, dtype=np.complex128)
    target[:dim] = 0.5 * math.sqrt(plus.raw_norm) * plus.amplitudes
    target[3 * dim :] = 0.5 * s * math.sqrt(minus.raw_norm) * minus.amplitudes
    return target


def enumerate_branches(
    steps: Sequence[ProtocolStep],
    dim: int,
    alpha,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> list[tuple[tuple[MeasurementRecord, ...], float, CompositeState | None]]:
    """All measurement branches of a pipeline with their probabilities.

    Every measurement (including post-selected ones) is branched over both
    outcomes.  Branches whose running probability falls below 1e-14 are pruned
    as terminal leaves with a ``None`` state, so the probabilities still sum
    to 1 within roundoff.
    """
    results: list[tuple[tuple[MeasurementRecord, ...], float, CompositeState | None]] = []

    def walk(state: CompositeState, remaining, records, probability, created):
        for i, step in enumerate(remaining):
            if isinstance(step, Measure):
                levels = state.atoms[state.atom_index(step.atom)].levels
                for outcome in levels:
                    try:
                        _, prob, collapsed = measure_atom(state, step.atom, force=outcome)
                    except ZeroProbabilityBranch:
                        prob, collapsed = 0.0, None
                    new_records = records + [
                        MeasurementRecord(step.atom, outcome, prob, True)
                    ]
                    new_prob = probability * prob
                    if collapsed is None or new_prob < 1e-14:
                        results.append((tuple(new_records), new_prob, None))
                    else:
                        walk(collapsed, remaining[i + 1 :], new_records, new_prob, created)
                return
            if isinstance(step, AddAtom):
                created[0] += 1
                label = step.label if step.label is not None else f"A{created[0]}"
                state = append_atom(state, AtomState.basis(label, step.levels, step.initial))
            elif isinstance(step, Rotate):
                state = rotate(state, step.atom, step.rotation)
            elif isinstance(step, ConditionalPhase):
                state = apply_conditional_phase(state, step.atom, step.phi)
            elif isinstance(step, ResonantProbe):
                state = apply_jc(state, step.atom, JcParams(1.0, step.gt, step.delta))
            elif isinstance(step, Inject):
                state = displace(state, step.beta, tail_tol)
            else:
                raise ValidationError(f"unknown protocol step {step!r}")
        results.append((tuple(records), probability, state))

    initial = compose([], make_coherent(alpha, dim, tail_tol))
    walk(initial, list(steps), [], 1.0, [0])
    return results
