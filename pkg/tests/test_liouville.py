import numpy as np
import pytest
from numpy.testing import assert_allclose

from rcfcs.fcs import affinity
from rcfcs.hilbert import Truncation, embed, thermal_state
from rcfcs.liouville import (
    jump_channels,
    rc_lme_generator,
    tilted_generator_dcut,
    tilted_generator_hcut,
    unvectorize,
    vectorize,
    weak_coupling_generator,
    weak_coupling_rates,
    weak_jump_channels,
)
from rcfcs.model import ModelParams, drude_lorentz
from rcfcs.spectral import leading_eigenvalue, steady_state


def make_params(**kw):
    base = dict(omega_rabi=0.005, lambda_coupling=0.03, alpha=0.04, n_bath=0.01)
    base.update(kw)
    return ModelParams(**base)


def test_vectorize_identity():
    v = vectorize(np.eye(2))
    assert_allclose(v, [1, 0, 0, 1])


def test_vectorize_roundtrip():
    rng = np.random.default_rng(0)
    rho = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert_allclose(unvectorize(vectorize(rho)), rho)


def test_vectorize_sandwich_convention():
    # vec(A rho B) = (B^T kron A) vec(rho) on random 3x3 triples.
    rng = np.random.default_rng(1)
    for _ in range(5):
        a, rho, b = rng.normal(size=(3, 3, 3)) + 1j * rng.normal(size=(3, 3, 3))
        lhs = vectorize(a @ rho @ b)
        rhs = np.kron(b.T, a) @ vectorize(rho)
        assert_allclose(lhs, rhs, atol=1e-13)


def test_vectorize_rejects_nonsquare():
    with pytest.raises(ValueError):
        vectorize(np.ones((2, 3)))
    with pytest.raises(ValueError):
        unvectorize(np.ones(5))


def test_trace_preservation():
    g = rc_lme_generator(make_params(), Truncation(6))
    left_identity = vectorize(np.eye(12))
    assert_allclose(left_identity @ g.matrix, np.zeros(144), atol=1e-14)


def test_hermiticity_preservation():
    g = rc_lme_generator(make_params(), Truncation(5))
    rng = np.random.default_rng(2)
    for _ in range(4):
        rho = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        out_of_adjoint = unvectorize(g.matrix @ vectorize(rho.conj().T))
        adjoint_of_out = unvectorize(g.matrix @ vectorize(rho)).conj().T
        assert_allclose(out_of_adjoint, adjoint_of_out, atol=1e-12)


def test_decoupled_thermal_state_is_stationary():
    # lambda = Omega = 0: (diagonal qubit) x (truncated thermal mode) is an
    # exact fixed point once the geometric weights are renormalized over the
    # kept levels.
    p = make_params(omega_rabi=0.0, lambda_coupling=0.0, n_bath=0.01, delta_q=0.2)
    trunc = Truncation(10)
    g = rc_lme_generator(p, trunc)
    rho_q = np.diag([0.3, 0.7]).astype(complex)
    rho = embed(rho_q, thermal_state(trunc, p.n_bath))
    assert np.linalg.norm(g.matrix @ vectorize(rho)) < 1e-10


def test_spectrum_in_left_half_plane():
    g = rc_lme_generator(make_params(), Truncation(6))
    evals = np.linalg.eigvals(g.matrix)
    assert evals.real.max() <= 1e-10


def test_hcut_reduces_to_untilted_bitwise():
    p = make_params()
    trunc = Truncation(6)
    g0 = rc_lme_generator(p, trunc)
    gh = tilted_generator_hcut(p, trunc, 0.0)
    gd = tilted_generator_dcut(p, trunc, 0.0)
    assert np.array_equal(g0.matrix, gh.matrix)
    assert np.array_equal(g0.matrix, gd.matrix)


def test_hcut_period_4pi():
    p = make_params()
    trunc = Truncation(4)
    g0 = tilted_generator_hcut(p, trunc, 0.0)
    g2pi = tilted_generator_hcut(p, trunc, 2 * np.pi)
    g4pi = tilted_generator_hcut(p, trunc, 4 * np.pi)
    # the half-angle phases flip the coupling sign at 2*pi and return at 4*pi
    assert np.abs(g2pi.matrix - g0.matrix).max() > 1e-3
    assert_allclose(g4pi.matrix, g0.matrix, atol=1e-13)


def test_dcut_period_2pi():
    p = make_params()
    trunc = Truncation(4)
    g0 = tilted_generator_dcut(p, trunc, 0.4)
    g1 = tilted_generator_dcut(p, trunc, 0.4 + 2 * np.pi)
    assert_allclose(g1.matrix, g0.matrix, atol=1e-13)


def test_leading_eigenvalue_vanishes_untilted():
    g = rc_lme_generator(make_params(), Truncation(6))
    assert abs(leading_eigenvalue(g)) < 1e-10


def test_cut_equivalence_of_leading_eigenvalue():
    p = make_params(lambda_coupling=0.02, omega_rabi=0.01, delta_q=0.003, delta_c=-0.002)
    trunc = Truncation(8)
    for chi in (0.1, 0.5, 1.0):
        th = leading_eigenvalue(tilted_generator_hcut(p, trunc, chi))
        td = leading_eigenvalue(tilted_generator_dcut(p, trunc, chi))
        assert abs(th - td) < 1e-10


def test_gallavotti_cohen_symmetry():
    # theta_0(chi) = theta_0(-chi + iA) with A the affinity; evaluated on the
    # dissipator cut at complex counting field.
    p = make_params()
    trunc = Truncation(8)
    aff = affinity(p)
    for chi in (0.2, 0.7):
        theta = leading_eigenvalue(tilted_generator_dcut(p, trunc, chi))
        mirrored = leading_eigenvalue(tilted_generator_dcut(p, trunc, -chi + 1j * aff))
        assert abs(theta - mirrored) < 1e-8


def test_cumulant_reality_symmetry():
    p = make_params()
    trunc = Truncation(6)
    for chi in (0.3, 1.1):
        theta = leading_eigenvalue(tilted_generator_dcut(p, trunc, chi))
        mirrored = leading_eigenvalue(tilted_generator_dcut(p, trunc, -chi))
        assert abs(np.conj(theta) - mirrored) < 1e-12


def test_jump_channel_structure():
    p = make_params()
    channels = jump_channels(p, Truncation(5))
    emission, absorption = channels
    assert emission.weight == +1 and absorption.weight == -1
    assert emission.rate == pytest.approx(p.gamma * (p.n_bath + 1))
    assert absorption.rate == pytest.approx(p.gamma * p.n_bath)
    assert_allclose(absorption.operator, emission.operator.conj().T)


def test_weak_coupling_rates_on_resonance():
    p = make_params(alpha=1.0, lambda_coupling=0.02)
    gamma_q, n_q = weak_coupling_rates(p)
    assert gamma_q == pytest.approx(drude_lorentz(1.0, p))
    assert n_q == p.n_bath


def test_weak_coupling_detailed_balance_steady_state():
    # Omega = 0: populations follow two-level detailed balance,
    # p_excited = n / (2n + 1).
    p = make_params(alpha=1.0, omega_rabi=0.0, n_bath=0.3)
    g = weak_coupling_generator(p)
    ss = steady_state(g)
    p_exc = p.n_bath / (2 * p.n_bath + 1)
    assert_allclose(np.diag(ss.rho).real, [1 - p_exc, p_exc], atol=1e-12)


def test_weak_coupling_zero_drive_zero_current():
    from rcfcs.fcs import average_current

    p = make_params(alpha=1.0, omega_rabi=0.0, n_bath=0.2)
    ss = steady_state(weak_coupling_generator(p))
    assert abs(average_current(ss, weak_jump_channels(p))) < 1e-14


def test_weak_coupling_monotone_in_lambda():
    # alpha = 1 benchmark: both cumulants grow monotonically with lambda.
    from rcfcs.fcs import average_current, noise_drazin

    lams = np.linspace(0.0, 0.1, 11)[1:]
    currents, noises = [], []
    for lam in lams:
        p = make_params(alpha=1.0, lambda_coupling=float(lam))
        g = weak_coupling_generator(p)
        ss = steady_state(g)
        ch = weak_jump_channels(p)
        currents.append(average_current(ss, ch))
        noises.append(noise_drazin(ss, ch, g))
    assert np.all(np.diff(currents) > 0)
    assert np.all(np.diff(noises) > 0)
