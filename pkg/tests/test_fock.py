import numpy as np
import pytest

from oscresp import fock
from oscresp.fock import (Factor, FockError, OrderedProductSpec,
                          TruncationError, heisenberg_p, heisenberg_q, ladder,
                          make_state, ordered_average, reality_check)
from oscresp.grids import SampledSignal, make_grid
from oscresp.kernels import OscillatorParams, osc_d_value, osc_df_value

P = OscillatorParams()


def test_ladder_matrix_elements():
    a, adag = ladder(2)
    assert a[0, 1] == 1.0 and np.count_nonzero(a) == 1
    a, adag = ladder(10)
    comm = a @ adag - adag @ a
    assert np.max(np.abs(comm[:9, :9] - np.eye(9))) < 1e-14
    assert np.allclose(np.diag(adag @ a), np.arange(10))
    with pytest.raises(FockError):
        ladder(1)


def test_heisenberg_operators():
    dim = 12
    a, adag = ladder(dim)
    q0 = heisenberg_q(P, 0.0, dim)
    assert np.max(np.abs(q0 - (P.q0 / np.sqrt(2)) * (a + adag))) < 1e-15
    for t in (0.0, 0.9, -2.3):
        q = heisenberg_q(P, t, dim)
        p = heisenberg_p(P, t, dim)
        assert np.max(np.abs(q - q.conj().T)) < 1e-14
        assert np.max(np.abs(p - p.conj().T)) < 1e-14


def test_vacuum_two_point_equals_plain_contraction():
    dim = 8
    vac = make_state("vacuum", dim)
    for t1, t2 in [(0.3, -0.7), (1.9, 0.2)]:
        q1, q2 = heisenberg_q(P, t1, dim), heisenberg_q(P, t2, dim)
        value = fock.expectation(vac, q1 @ q2)
        expected = P.hbar * np.exp(-1j * P.omega0 * (t1 - t2)) / (2 * P.mass * P.omega0)
        assert abs(value - expected) < 1e-15
        assert abs(value - 1j * P.hbar * osc_d_value(t1 - t2, P)) < 1e-15


def test_momentum_is_mass_times_velocity():
    dim = 16
    h = 1e-5
    for t in (0.0, 0.8):
        fd = P.mass * (heisenberg_q(P, t + h, dim) - heisenberg_q(P, t - h, dim)) / (2 * h)
        assert np.max(np.abs(heisenberg_p(P, t, dim) - fd)) < 1e-8


def test_make_state_families():
    vac = make_state("vacuum", 5)
    assert np.allclose(np.diag(vac.rho), [1, 0, 0, 0, 0])

    coh = make_state("coherent", 40, alpha=1.0)
    a, _ = ladder(40)
    assert abs(fock.expectation(coh, a) - 1.0) < 1e-10
    assert coh.norm_deficit < 1e-10

    f2 = make_state("fock", 5, n=2)
    _, adag = ladder(5)
    a, _ = ladder(5)
    assert fock.expectation(f2, adag @ a) == pytest.approx(2.0)

    th = make_state("thermal", 40, nbar=0.5)
    a, adag = ladder(40)
    assert abs(fock.expectation(th, adag @ a) - 0.5) < 1e-10
    assert abs(np.trace(th.rho) - 1.0) < 1e-12

    with pytest.raises(TruncationError):
        make_state("coherent", 4, alpha=2.0)
    with pytest.raises(TruncationError):
        make_state("fock", 4, n=7)
    with pytest.raises(FockError):
        make_state("squeezed", 4)


def test_double_time_two_point_orderings():
    dim = 20
    vac = make_state("vacuum", dim)
    rng = np.random.default_rng(0)
    for _ in range(10):
        t1, t2 = rng.uniform(-4, 4, size=2)
        tau = t1 - t2
        fwd = ordered_average(vac, OrderedProductSpec(
            factors=(("q", t1, "plus"), ("q", t2, "plus")), ordering="double_time"), P)
        assert abs(fwd - 1j * P.hbar * osc_df_value(tau, P)) < 1e-12
        plain = ordered_average(vac, OrderedProductSpec(
            factors=(("q", t1, None), ("q", t2, None)), ordering="plain"), P)
        assert abs(plain - 1j * P.hbar * osc_d_value(tau, P)) < 1e-12
        bwd = ordered_average(vac, OrderedProductSpec(
            factors=(("q", t1, "minus"), ("q", t2, "minus")), ordering="double_time"), P)
        assert abs(bwd + 1j * P.hbar * np.conj(osc_df_value(tau, P))) < 1e-12


def test_mixed_branch_pair_is_a_plain_product():
    # one backward and one forward factor: backward stands left regardless
    dim = 12
    coh = make_state("coherent", 30, alpha=0.7)
    t1, t2 = 0.4, 1.6
    mixed = ordered_average(coh, OrderedProductSpec(
        factors=(("q", t2, "plus"), ("q", t1, "minus")), ordering="double_time"), P)
    q1 = heisenberg_q(P, t1, 30)
    q2 = heisenberg_q(P, t2, 30)
    assert abs(mixed - fock.expectation(coh, q1 @ q2)) < 1e-13


def test_equal_time_ties_are_order_independent():
    # position factors at the same time commute, so the stable input order
    # a tie happens to keep cannot change the ordered average
    state = make_state("coherent", 40, alpha=0.3)
    f1 = (("q", 0.5, "plus"), ("q", 1.2, "plus"), ("q", 0.5, "plus"))
    f2 = (("q", 1.2, "plus"), ("q", 0.5, "plus"), ("q", 0.5, "plus"))
    v1 = ordered_average(state, OrderedProductSpec(factors=f1, ordering="double_time"), P)
    v2 = ordered_average(state, OrderedProductSpec(factors=f2, ordering="double_time"), P)
    assert abs(v1 - v2) < 1e-12

    f3 = (("q", 0.5, "minus"), ("q", 0.5, "plus"), ("q", 0.5, "minus"))
    f4 = (("q", 0.5, "minus"), ("q", 0.5, "minus"), ("q", 0.5, "plus"))
    v3 = ordered_average(state, OrderedProductSpec(factors=f3, ordering="double_time"), P)
    v4 = ordered_average(state, OrderedProductSpec(factors=f4, ordering="double_time"), P)
    assert abs(v3 - v4) < 1e-12


def test_normal_ordering_annihilates_vacuum():
    vac = make_state("vacuum", 12)
    for factors in [
        (("q", 0.3, None),),
        (("q", 0.3, None), ("q", 1.1, None)),
        (("q", 0.3, None), ("p", 1.1, None), ("q", -0.4, None)),
    ]:
        value = ordered_average(vac, OrderedProductSpec(factors=factors, ordering="normal"), P)
        assert abs(value) < 1e-15


def test_weyl_two_point_is_symmetrized_product():
    dim = 25
    state = make_state("coherent", dim, alpha=0.4)
    t1, t2 = 0.3, 1.4
    weyl = ordered_average(state, OrderedProductSpec(
        factors=(("q", t1, None), ("q", t2, None)), ordering="weyl"), P)
    q1, q2 = heisenberg_q(P, t1, dim), heisenberg_q(P, t2, dim)
    sym = 0.5 * fock.expectation(state, q1 @ q2 + q2 @ q1)
    assert abs(weyl - sym) < 1e-13

    vac = make_state("vacuum", 8)
    equal = ordered_average(vac, OrderedProductSpec(
        factors=(("q", 0.7, None), ("q", 0.7, None)), ordering="weyl"), P)
    assert equal == pytest.approx(0.5, abs=1e-13)   # hbar/(2 m omega0)


def test_antinormal_two_point():
    # <a adag> = <adag a> + 1 shifts the plain value by the commutator part
    dim = 20
    vac = make_state("vacuum", dim)
    t1, t2 = 0.2, 1.0
    anti = ordered_average(vac, OrderedProductSpec(
        factors=(("q", t1, None), ("q", t2, None)), ordering="antinormal"), P)
    expected = (P.q0 ** 2 / 2) * (np.exp(-1j * (t1 - t2)) + np.exp(1j * (t1 - t2)))
    assert abs(anti - expected) < 1e-13


def test_shift_enters_every_q_factor():
    dim = 20
    vac = make_state("vacuum", dim)
    g = make_grid(8, 0.5)
    shift = SampledSignal(g, (0.3 + 0.0j) * np.ones(8))
    one = ordered_average(vac, OrderedProductSpec(
        factors=(("q", 0.5, "plus"),), ordering="double_time", shift=shift), P)
    assert one == pytest.approx(0.3, abs=1e-14)
    # callable shifts work the same way
    two = ordered_average(vac, OrderedProductSpec(
        factors=(("q", 0.5, "plus"),), ordering="double_time", shift=lambda t: 0.3), P)
    assert two == pytest.approx(0.3, abs=1e-14)
    # momentum factors take no shift
    pval = ordered_average(vac, OrderedProductSpec(
        factors=(("p", 0.5, None),), ordering="plain", shift=lambda t: 0.3), P)
    assert abs(pval) < 1e-15


def test_spec_validation():
    with pytest.raises(FockError):
        OrderedProductSpec(factors=(("q", 0.0, None),), ordering="double_time")
    with pytest.raises(FockError):
        OrderedProductSpec(factors=(("q", 0.0, "plus"),) * 9, ordering="plain")
    with pytest.raises(FockError):
        OrderedProductSpec(factors=(("x", 0.0, None),), ordering="plain")
    with pytest.raises(FockError):
        Factor("q", 0.0, "sideways")


def test_reality_check_examples():
    vac = make_state("vacuum", 25)
    assert reality_check(vac, [], [], P, order=4) == 0.0
    assert reality_check(vac, [(0.0, 0.5)], [(0.7, 0.3)], P, order=4) < 1e-12
    coh = make_state("coherent", 40, alpha=0.5)
    assert reality_check(coh, [(0.4, 0.3)], [(1.1, 0.2)], P, order=4) < 1e-10
    cplx = reality_check(coh, [(0.4, 0.3 + 0.2j)], [(1.1, 0.2 - 0.1j)], P, order=5)
    assert cplx < 1e-10
    with pytest.raises(FockError):
        reality_check(vac, [], [], P, order=7)


def test_empty_product_is_the_trace():
    coh = make_state("coherent", 30, alpha=0.2)
    value = ordered_average(coh, OrderedProductSpec(factors=(), ordering="plain"), P)
    assert value == pytest.approx(1.0, abs=1e-12)
