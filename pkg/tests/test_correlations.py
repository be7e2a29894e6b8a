import numpy as np
import pytest
import scipy.linalg as sla
from scipy.integrate import simpson

from rcfcs.correlations import correlation_function, d_minus_k, default_tau_grid
from rcfcs.fcs import apply_current_superop, average_current, dynamical_activity, noise_drazin
from rcfcs.hilbert import Truncation
from rcfcs.liouville import jump_channels, rc_lme_generator, vectorize
from rcfcs.model import ModelParams
from rcfcs.spectral import steady_state


def make_params(**kw):
    base = dict(omega_rabi=0.01, lambda_coupling=0.017, alpha=0.04, n_bath=0.01)
    base.update(kw)
    return ModelParams(**base)


def setup_point(p, n_max=12):
    trunc = Truncation(n_max)
    g = rc_lme_generator(p, trunc)
    ss = steady_state(g)
    channels = jump_channels(p, trunc)
    return trunc, g, ss, channels


def correlation_quadrature(p, g, ss, channels, t_max, n_steps=6000):
    """Independent time-domain oracle: uniform expm stepping plus Simpson."""
    dt = t_max / n_steps
    u = sla.expm(g.matrix * dt)
    vec = vectorize(apply_current_superop(channels, ss.rho))
    j = average_current(ss, channels)
    d = g.hilbert_dim
    values = np.empty(n_steps + 1)
    cur = vec.copy()
    for i in range(n_steps + 1):
        state = cur.reshape((d, d), order="F")
        values[i] = np.trace(apply_current_superop(channels, state)).real - j * j
        cur = u @ cur
    return simpson(values, dx=dt)


def test_default_grid_shape():
    grid = default_tau_grid(0.04)
    assert grid.size == 400
    assert grid[0] == 0.0
    assert np.all(np.diff(grid) > 0)
    assert grid[-1] == pytest.approx(50.0 / 0.04)


def test_correlation_requires_sorted_grid():
    p = make_params()
    trunc, g, ss, channels = setup_point(p, n_max=8)
    with pytest.raises(ValueError):
        correlation_function(g, ss, channels, np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        correlation_function(g, ss, channels, np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        correlation_function(g, ss, channels, None)


def test_thermal_mode_zero_delay_closed_form():
    # Undriven near-thermal mode.  Thermal moments give
    # C(0) = g1^2 <a'a'aa> + g2^2 <aa a'a'> - g1 g2 [<N^2> + <(N+1)^2>] - J^2
    #      = -gamma^2 n (n+1):
    # the net-current record anticorrelates absorb/emit pairs even though the
    # emission record alone is bunched (g2(0) = 2).
    p = make_params(omega_rabi=0.0, lambda_coupling=1e-3, n_bath=0.5)
    trunc, g, ss, channels = setup_point(p, n_max=20)
    taus = default_tau_grid(p.gamma, n_points=50)
    trace = correlation_function(g, ss, channels, taus)
    expected = -p.gamma**2 * p.n_bath * (p.n_bath + 1)
    assert trace.values[0] == pytest.approx(expected, rel=1e-3)


def test_trough_anticorrelation():
    # at the noise trough the correlation starts negative and decays to zero
    p = make_params()
    trunc, g, ss, channels = setup_point(p)
    taus = default_tau_grid(p.gamma)
    trace = correlation_function(g, ss, channels, taus)
    assert trace.values[0] < 0
    assert abs(trace.values[-1]) < 1e-3 * abs(trace.values[0])
    assert np.isfinite(trace.tail_bound)


def test_spectral_envelope_bounds_decay():
    # |C(tau)| decays at least as fast as the slowest nonzero mode allows
    from rcfcs.spectral import spectrum_top

    p = make_params()
    trunc, g, ss, channels = setup_point(p)
    slowest = spectrum_top(g, 1).eigenvalues[1].real
    taus = np.linspace(0.0, 30.0 / p.gamma, 400)
    trace = correlation_function(g, ss, channels, taus)
    c0 = abs(trace.values[0])
    late = taus > 5.0 / p.gamma
    envelope = 20.0 * c0 * np.exp(slowest * taus[late])
    assert np.all(np.abs(trace.values[late]) <= envelope)


def test_quadrature_identity_against_drazin():
    # D = K + 2 int_0^T C dtau, with the integral from the independent
    # expm-step + Simpson oracle, at/below/above the noise trough
    for lam in (0.010, 0.017, 0.028):
        p = make_params(lambda_coupling=lam)
        trunc, g, ss, channels = setup_point(p)
        k = dynamical_activity(ss, channels)
        d = noise_drazin(ss, channels, g)
        integral = correlation_quadrature(p, g, ss, channels, t_max=50.0 / p.gamma)
        assert abs((k + 2 * integral) - d) / d < 1e-4


def test_trace_integral_converges_to_drazin_value():
    # the trapezoid on a dense caller grid approaches the closed form
    p = make_params()
    trunc, g, ss, channels = setup_point(p)
    k = dynamical_activity(ss, channels)
    d = noise_drazin(ss, channels, g)
    t_max = 50.0 / p.gamma
    taus = np.concatenate([[0.0], np.geomspace(1e-4 / p.gamma, t_max, 14999)])
    trace = correlation_function(g, ss, channels, taus)
    assert abs((k + 2 * trace.integral) - d) / d < 1e-4


def test_d_minus_k_consistency():
    p = make_params()
    trunc, g, ss, channels = setup_point(p)
    k = dynamical_activity(ss, channels)
    d = noise_drazin(ss, channels, g)
    dk = d_minus_k(g, ss, channels)
    assert dk == pytest.approx(d - k, rel=1e-10)


def test_d_minus_k_sign_matches_quadrature():
    # Equilibrium mode at moderate coupling (no slow quasi-degenerate qubit
    # mode): the net transfer tracks the level excursion, so D -> 0 and
    # D - K -> -K < 0, with the sign and value confirmed by the time-domain
    # quadrature.
    p = make_params(omega_rabi=0.0, lambda_coupling=0.02, n_bath=0.5)
    trunc, g, ss, channels = setup_point(p, n_max=25)
    k = dynamical_activity(ss, channels)
    dk = d_minus_k(g, ss, channels)
    integral = correlation_quadrature(p, g, ss, channels, t_max=60.0 / p.gamma, n_steps=3000)
    assert dk < 0
    assert np.sign(dk) == np.sign(integral)
    assert dk == pytest.approx(2 * integral, rel=1e-3)
    assert dk == pytest.approx(-k, rel=1e-2)


def test_vanishing_correlations_give_zero():
    # with the absorption channel frozen out (n_B -> 0) and no drive, the
    # steady state is dark: jumps disappear and D - K -> 0 with them.
    p_small = make_params(omega_rabi=0.0, lambda_coupling=0.02, n_bath=1e-6)
    trunc, g, ss, channels = setup_point(p_small, n_max=6)
    dk = d_minus_k(g, ss, channels)
    assert abs(dk) < 1e-7


def test_oscillation_period_largest_at_trough():
    # the coherent qubit-mode exchange slows at the trough coupling: the
    # first zero crossing of C(tau) sits at later tau than for neighbors
    def first_zero_crossing(lam):
        p = make_params(lambda_coupling=lam)
        trunc, g, ss, channels = setup_point(p)
        taus = np.linspace(0.0, 20.0 / p.gamma, 2000)
        trace = correlation_function(g, ss, channels, taus)
        sign_change = np.flatnonzero(np.diff(np.sign(trace.values)) != 0)
        return taus[sign_change[0]]

    at_trough = first_zero_crossing(0.017)
    below = first_zero_crossing(0.010)
    above = first_zero_crossing(0.028)
    assert at_trough > below
    assert at_trough > above
