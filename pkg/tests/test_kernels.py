"""Equivalence of the compiled kernels and the pure-numpy fallback."""

import numpy as np
import pytest

from cavityghz import _kernels_py
from cavityghz.backend import backend_name

try:
    from cavityghz import _kernels
except ImportError:
    _kernels = None

BACKENDS = [_kernels_py] if _kernels is None else [_kernels_py, _kernels]


def random_amps(rng, size):
    vec = rng.normal(size=size) + 1j * rng.normal(size=size)
    return (vec / np.linalg.norm(vec)).astype(np.complex128)


def run_everything(kernels, amps, rng):
    pre, mid, dim = 2, 2, 8
    work = amps.copy()
    kernels.apply_two_level(work, pre, mid * dim, 0.6, 0.8j, 0.8j, 0.6)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, dim)).astype(np.complex128)
    kernels.apply_photon_phase(work, pre, mid, dim, 1, phases)
    theta = rng.uniform(0, 2 * np.pi, dim - 1)
    uaa = np.cos(theta).astype(np.complex128)
    uab = (-1j * np.sin(theta)).astype(np.complex128)
    kernels.apply_jc_pair(work, pre, mid, dim, uaa, uab, uab, uaa)
    p0 = kernels.branch_probability(work, pre, mid * dim, 0)
    kernels.collapse_two_level(work, pre, mid * dim, 0, 1.0 / np.sqrt(p0))
    return work, p0


def test_backends_agree():
    rng = np.random.default_rng(0)
    amps = random_amps(rng, 2 * 2 * 2 * 8)
    reference, p_ref = run_everything(_kernels_py, amps, np.random.default_rng(1))
    if _kernels is None:
        pytest.skip("compiled kernels not built")
    compiled, p_c = run_everything(_kernels, amps, np.random.default_rng(1))
    assert abs(p_ref - p_c) < 1e-13
    assert np.max(np.abs(reference - compiled)) < 1e-13


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.__name__.rsplit(".", 1)[-1])
class TestKernelContracts:
    def test_two_level_unitary_preserves_norm(self, kernels):
        rng = np.random.default_rng(2)
        work = random_amps(rng, 4 * 2 * 24)
        s = 1 / np.sqrt(2)
        kernels.apply_two_level(work, 4, 24, s, s, -s, s)
        assert abs(np.linalg.norm(work) - 1.0) < 1e-12

    def test_phase_preserves_magnitudes(self, kernels):
        rng = np.random.default_rng(3)
        work = random_amps(rng, 1 * 2 * 3 * 5)
        before = np.abs(work.copy())
        phases = np.exp(1j * np.arange(5)).astype(np.complex128)
        kernels.apply_photon_phase(work, 1, 3, 5, 0, phases)
        assert np.max(np.abs(np.abs(work) - before)) < 1e-13

    def test_jc_pair_leaves_edges(self, kernels):
        rng = np.random.default_rng(4)
        dim = 6
        work = random_amps(rng, 2 * dim)
        lower_vac = work[dim]
        upper_top = work[dim - 1]
        zero = np.zeros(dim - 1, dtype=np.complex128)
        one = np.ones(dim - 1, dtype=np.complex128)
        kernels.apply_jc_pair(work, 1, 1, dim, zero, one, one, zero)
        assert work[dim] == lower_vac
        assert work[dim - 1] == upper_top

    def test_probability_and_collapse(self, kernels):
        rng = np.random.default_rng(5)
        work = random_amps(rng, 2 * 2 * 12)
        p0 = kernels.branch_probability(work, 2, 12, 0)
        p1 = kernels.branch_probability(work, 2, 12, 1)
        assert abs(p0 + p1 - 1.0) < 1e-12
        kernels.collapse_two_level(work, 2, 12, 1, 1.0 / np.sqrt(p1))
        assert abs(np.linalg.norm(work) - 1.0) < 1e-12
        assert kernels.branch_probability(work, 2, 12, 0) < 1e-30


def test_backend_name_reports_selection():
    assert backend_name() in ("compiled", "python")
