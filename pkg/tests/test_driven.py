import numpy as np
import pytest

from oscresp.driven import (DriveError, DriveScenario, OdeAccuracyError,
                            causal_window, classical_displacement,
                            ode_oscillator, sin_scenario, step_scenario,
                            verify_driven_factorization)
from oscresp.grids import SampledSignal, make_grid
from oscresp.kernels import OscillatorParams, osc_kernels

P = OscillatorParams()


def step_analytic(t, amp=1.0, p=P):
    out = -(amp / (p.mass * p.omega0 ** 2)) * (1.0 - np.cos(p.omega0 * t))
    return np.where(t >= 0, out, 0.0)


def resonant_analytic(t, amp=1.0, p=P):
    w = p.omega0
    out = -amp * (np.sin(w * t) - w * t * np.cos(w * t)) / (2.0 * p.mass * w ** 2)
    return np.where(t >= 0, out, 0.0)


def test_scenario_validation():
    g = make_grid(32, 0.1)
    t = g.times()
    with pytest.raises(DriveError):
        DriveScenario(params=P, grid=g, current=SampledSignal(g, 1j * np.ones(32)))
    with pytest.raises(DriveError):
        DriveScenario(params=P, grid=g, current=SampledSignal(g, np.ones(32)))
    # zero before onset is fine
    ok = np.where(t >= 0, 1.0, 0.0).astype(complex)
    DriveScenario(params=P, grid=g, current=SampledSignal(g, ok))


def test_step_scenario_samples_carry_half_at_the_jump():
    g = make_grid(32, 0.1)
    sc = step_scenario(P, g, 2.0)
    assert sc.current.value_at(0.0) == 1.0           # half of the jump
    assert sc.current.value_at(g.dt) == 2.0
    assert sc.current.value_at(-g.dt) == 0.0
    assert sc.current_fn(0.0) == 2.0                 # right-continuous
    assert sc.current_fn(-1e-12) == 0.0


def test_zero_current_radiates_nothing():
    g = make_grid(64, 0.1)
    kers = osc_kernels(P, g, loose=True)
    sc = DriveScenario(params=P, grid=g, current=SampledSignal(g, np.zeros(64)),
                       current_fn=lambda t: 0.0)
    assert np.max(np.abs(classical_displacement(sc, kers.d_r).values)) == 0.0
    assert np.max(np.abs(ode_oscillator(sc).values)) == 0.0


def test_spike_current_reads_back_the_kernel():
    g = make_grid(64, 0.1)
    kers = osc_kernels(P, g, loose=True)
    values = np.zeros(64, dtype=complex)
    values[g.index_of(0.0)] = 1.0
    sc = DriveScenario(params=P, grid=g, current=SampledSignal(g, values),
                       current_fn=lambda t: 0.0)
    q_j = classical_displacement(sc, kers.d_r)
    assert np.max(np.abs(q_j.values - g.dt * kers.d_r.values)) < 1e-14


def test_displacement_causality_and_linearity():
    g = make_grid(128, 0.1)
    kers = osc_kernels(P, g, loose=True)
    sc = step_scenario(P, g, 1.0)
    base = classical_displacement(sc, kers.d_r)

    t = g.times()
    t_probe = 2.0
    bumped = sc.current.values.copy()
    bumped[t > t_probe + 1e-9] += 0.5
    sc2 = DriveScenario(params=P, grid=g, current=SampledSignal(g, bumped))
    shifted = classical_displacement(sc2, kers.d_r)
    window = causal_window(g) & (t <= t_probe)
    assert np.max(np.abs((shifted.values - base.values)[window])) < 1e-14

    sc3 = sin_scenario(P, g, 1.0)
    combo = SampledSignal(g, 2.0 * sc.current.values - 0.5 * sc3.current.values)
    sc4 = DriveScenario(params=P, grid=g, current=combo)
    lhs = classical_displacement(sc4, kers.d_r).values
    rhs = (2.0 * base.values - 0.5 * classical_displacement(sc3, kers.d_r).values)
    assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_displacement_approaches_the_analytic_solution_at_second_order():
    # the rectangle-sum convolution is a second-order quadrature: its gap
    # to the continuum solution is dt^2 (1 - cos w0 t)/12 to leading order
    errors = {}
    for n, dt in [(512, 0.02), (1024, 0.01), (2048, 0.005)]:
        g = make_grid(n, dt)
        kers = osc_kernels(P, g, loose=True)
        sc = step_scenario(P, g, 1.0)
        q_j = classical_displacement(sc, kers.d_r)
        t = g.times()
        window = causal_window(g)
        gap = np.abs(q_j.values.real - step_analytic(t))[window]
        errors[dt] = np.max(gap)
        predicted = dt ** 2 * (1.0 - np.cos(t[window])) / 12.0
        assert np.max(np.abs(gap - predicted)) < 5.0 * dt ** 3
    assert errors[0.02] / errors[0.005] == pytest.approx(16.0, rel=0.05)


def test_ode_matches_analytic_step_solution():
    g = make_grid(2048, 0.005)
    sc = step_scenario(P, g, 1.0)
    q = ode_oscillator(sc, error_tol=1e-6)
    window = causal_window(g)
    gap = np.max(np.abs(q.values.real - step_analytic(g.times()))[window])
    assert gap < 1e-8


def test_ode_matches_resonant_secular_growth():
    g = make_grid(2048, 0.005)
    sc = sin_scenario(P, g, 1.0)
    q = ode_oscillator(sc, error_tol=1e-6)
    window = causal_window(g)
    gap = np.max(np.abs(q.values.real - resonant_analytic(g.times()))[window])
    assert gap < 1e-6


def test_ode_refuses_too_coarse_steps():
    g = make_grid(64, 0.5)
    sc = step_scenario(P, g, 1.0)
    with pytest.raises(OdeAccuracyError):
        ode_oscillator(sc, error_tol=1e-12)
    # without a bound the integration still runs
    ode_oscillator(sc, error_tol=None)
    bare = DriveScenario(params=P, grid=g, current=SampledSignal(g, np.zeros(64)))
    with pytest.raises(DriveError):
        ode_oscillator(bare)


def reference_grid(n=256, bin_index=8):
    return make_grid(n, 2.0 * np.pi * bin_index / n)


def test_factorization_trivial_current_reduces_to_free_case():
    g = reference_grid()
    kers = osc_kernels(P, g)
    sc = DriveScenario(params=P, grid=g, current=SampledSignal(g, np.zeros(g.n)),
                       state_kind="coherent", alpha=0.5, current_fn=lambda t: 0.0)
    residuals = verify_driven_factorization(sc, kers.d_r, dim=40)
    assert max(residuals.values()) < 1e-10


@pytest.mark.parametrize("build", [step_scenario, sin_scenario])
@pytest.mark.parametrize("kind,alpha", [("vacuum", 0.0), ("coherent", 0.5)])
def test_factorization_moments(build, kind, alpha):
    g = reference_grid()
    kers = osc_kernels(P, g)
    sc = build(P, g, 1.0, state_kind=kind, alpha=alpha)
    residuals = verify_driven_factorization(sc, kers.d_r, dim=40)
    assert set(residuals) == {
        "first_moment_forward", "first_moment_backward", "second_moment_forward",
        "second_moment_mixed", "second_moment_backward", "second_moment_symmetric",
        "second_moment_normal"}
    assert max(residuals.values()) < 1e-9


def test_first_moment_is_mean_path():
    # <q_j(t)> = initial-state mean + radiated displacement, exactly
    from oscresp import fock
    from oscresp.functionals import coherent_mean
    g = reference_grid()
    kers = osc_kernels(P, g)
    sc = step_scenario(P, g, 1.0, state_kind="coherent", alpha=0.5)
    q_j = classical_displacement(sc, kers.d_r)
    t1 = float(g.times()[np.flatnonzero(causal_window(g))[20]])
    state = fock.make_state("coherent", 40, alpha=0.5)
    measured = fock.ordered_average(
        state, fock.OrderedProductSpec(
            factors=(("q", t1, "plus"),), ordering="double_time", shift=q_j), P)
    expected = coherent_mean(0.5, P)(t1) + q_j.value_at(t1)
    assert abs(measured - expected) < 1e-12
