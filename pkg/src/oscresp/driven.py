"""Classical driven-oscillator dynamics and the drive factorization checks.

The displacement radiated by a causal current is a retarded-kernel
convolution; an independent fixed-step fourth-order integration of the
equation of motion cross-checks it on the causal window (the half of the
periodic grid following drive onset, where the circular convolution
coincides with the true causal integral).  The driven quantum system
differs from the free one only by this c-number displacement, so ordered
moments of the shifted operators must factorize; those checks compare the
matrix oracle with the functional predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import fock
from .functionals import (coherent_mean, predicted_double_time_moment,
                          predicted_normal_moment, predicted_weyl_moment)
from .grids import Kernel, SampledSignal, TimeGrid, circular_convolve
from .kernels import OscillatorParams


class DriveError(ValueError):
    """Invalid drive scenario."""


class OdeAccuracyError(RuntimeError):
    """The fixed integration step is too coarse for the requested accuracy."""


@dataclass(frozen=True)
class DriveScenario:
    """A causal current driving the oscillator from a given initial state.

    current holds the grid samples (zero before onset, jump samples at
    half value); current_fn is the continuum evaluation used by the ODE
    integrator, right-continuous at the onset.
    """

    params: OscillatorParams
    grid: TimeGrid
    current: SampledSignal
    state_kind: str = "vacuum"
    alpha: complex = 0.0
    current_fn: Optional[Callable[[float], float]] = None
    t_on: float = 0.0

    def __post_init__(self):
        if np.max(np.abs(self.current.values.imag)) > 1e-12:
            raise DriveError("drive current must be real")
        times = self.grid.times()
        before = times < self.t_on - 1e-12 * max(1.0, abs(self.t_on))
        if np.max(np.abs(self.current.values[before]), initial=0.0) > 0.0:
            raise DriveError("drive current must vanish before onset")


def step_scenario(params: OscillatorParams, grid: TimeGrid, amplitude: float = 1.0,
                  t_on: float = 0.0, state_kind: str = "vacuum",
                  alpha: complex = 0.0) -> DriveScenario:
    """Constant current switched on at t_on; the onset sample carries half."""
    times = grid.times()
    values = np.where(times > t_on, amplitude, 0.0).astype(complex)
    on_grid = np.isclose(times, t_on, rtol=0.0, atol=1e-9 * grid.dt)
    values[on_grid] = amplitude / 2.0

    def fn(t: float) -> float:
        return amplitude if t >= t_on else 0.0

    return DriveScenario(params=params, grid=grid, current=SampledSignal(grid, values),
                         state_kind=state_kind, alpha=alpha, current_fn=fn, t_on=t_on)


def sin_scenario(params: OscillatorParams, grid: TimeGrid, amplitude: float = 1.0,
                 omega: Optional[float] = None, t_on: float = 0.0,
                 state_kind: str = "vacuum", alpha: complex = 0.0) -> DriveScenario:
    """Sinusoidal current from t_on on (continuous at onset)."""
    w = params.omega0 if omega is None else float(omega)
    times = grid.times()
    values = np.where(times >= t_on, amplitude * np.sin(w * (times - t_on)), 0.0)

    def fn(t: float) -> float:
        return amplitude * math.sin(w * (t - t_on)) if t >= t_on else 0.0

    return DriveScenario(params=params, grid=grid,
                         current=SampledSignal(grid, values.astype(complex)),
                         state_kind=state_kind, alpha=alpha, current_fn=fn, t_on=t_on)


def causal_window(grid: TimeGrid, t_on: float = 0.0) -> np.ndarray:
    """Samples in [t_on, t_on + period/2): where the wrap cannot reach."""
    times = grid.times()
    eps = 1e-9 * grid.dt
    return (times >= t_on - eps) & (times < t_on + grid.period / 2.0 - eps)


def classical_displacement(sc: DriveScenario, d_r: Kernel) -> SampledSignal:
    """Displacement radiated by the current: retarded convolution."""
    out = circular_convolve(d_r, sc.current)
    if np.max(np.abs(out.values.imag)) > 1e-12 * max(1.0, np.max(np.abs(out.values))):
        raise DriveError("displacement of a real current came out complex")
    return out


def _rk4(sc: DriveScenario, h: float, steps: int):
    """Fixed-step integration of q'' + w0^2 q = -j/m from rest at the grid start.

    Stage times are nudged strictly inside each step so that a current
    jump sitting exactly on a step boundary is read from the correct side.
    """
    if sc.current_fn is None:
        raise DriveError("scenario carries no continuum current for the integrator")
    p = sc.params
    w2 = p.omega0 ** 2
    inv_m = 1.0 / p.mass
    eps = 1e-9 * h
    fn = sc.current_fn

    def accel(t: float, q: float) -> float:
        return -fn(t) * inv_m - w2 * q

    t = sc.grid.t0
    q = v = 0.0
    out = np.empty(steps + 1)
    out[0] = 0.0
    for k in range(steps):
        lo, hi = t + eps, t + h - eps
        k1q = v
        k1v = accel(lo, q)
        k2q = v + 0.5 * h * k1v
        k2v = accel(t + 0.5 * h, q + 0.5 * h * k1q)
        k3q = v + 0.5 * h * k2v
        k3v = accel(t + 0.5 * h, q + 0.5 * h * k2q)
        k4q = v + h * k3v
        k4v = accel(hi, q + h * k3q)
        q += h * (k1q + 2 * k2q + 2 * k3q + k4q) / 6.0
        v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        t += h
        out[k + 1] = q
    return out


def ode_oscillator(sc: DriveScenario, error_tol: Optional[float] = 1e-6) -> SampledSignal:
    """Integrate the driven equation of motion on the grid from rest.

    A half-step rerun provides a Richardson error estimate; if it exceeds
    error_tol the step is considered too coarse and the run is refused.
    """
    n, h = sc.grid.n, sc.grid.dt
    coarse = _rk4(sc, h, n - 1)
    if error_tol is not None:
        fine = _rk4(sc, h / 2.0, 2 * (n - 1))[::2]
        estimate = float(np.max(np.abs(coarse - fine))) / 15.0
        if estimate > error_tol:
            raise OdeAccuracyError(
                f"estimated integration error {estimate:.3e} exceeds {error_tol:.3e}")
    return SampledSignal(sc.grid, coarse.astype(complex))


def scenario_state(sc: DriveScenario, dim: int) -> fock.FockState:
    return fock.make_state(sc.state_kind, dim, alpha=sc.alpha)


def scenario_mean(sc: DriveScenario, q_j: SampledSignal) -> Callable[[float], complex]:
    """c-number mean path: initial-state mean plus classical displacement."""
    base = coherent_mean(sc.alpha, sc.params) if sc.state_kind == "coherent" else None

    def mean(t: float) -> complex:
        out = q_j.value_at(t)
        if base is not None:
            out += base(t)
        return out

    return mean


def verify_driven_factorization(sc: DriveScenario, d_r: Kernel, times=None,
                                dim: int = 40) -> dict:
    """Moment residuals of the drive factorization, by check name.

    Matrix-oracle averages of the shifted operators are compared against
    the functional predictions (linear part = mean path, quadratic part =
    contraction kernels) for first and second moments under the branch
    orderings and for symmetric and normal second moments.  The c-number
    shift must drop out of every ordering simultaneously.
    """
    q_j = classical_displacement(sc, d_r)
    state = scenario_state(sc, dim)
    mean = scenario_mean(sc, q_j)
    if times is None:
        window = np.flatnonzero(causal_window(sc.grid, sc.t_on))
        grid_times = sc.grid.times()
        t1 = float(grid_times[window[len(window) // 4]])
        t2 = float(grid_times[window[(3 * len(window)) // 5]])
    else:
        t1, t2 = times
    p = sc.params

    def dt_avg(factors):
        return fock.ordered_average(
            state,
            fock.OrderedProductSpec(
                factors=tuple(("q", t, branch) for branch, t in factors),
                ordering="double_time",
                shift=q_j,
            ),
            p,
        )

    residuals = {}
    for name, factors in [
        ("first_moment_forward", [("plus", t1)]),
        ("first_moment_backward", [("minus", t2)]),
        ("second_moment_forward", [("plus", t1), ("plus", t2)]),
        ("second_moment_mixed", [("minus", t1), ("plus", t2)]),
        ("second_moment_backward", [("minus", t1), ("minus", t2)]),
    ]:
        predicted = predicted_double_time_moment(factors, p, mean)
        residuals[name] = abs(dt_avg(factors) - predicted)

    weyl_measured = fock.ordered_average(
        state,
        fock.OrderedProductSpec(
            factors=(("q", t1, None), ("q", t2, None)), ordering="weyl", shift=q_j),
        p,
    )
    residuals["second_moment_symmetric"] = abs(
        weyl_measured - predicted_weyl_moment([t1, t2], p, mean))

    normal_measured = fock.ordered_average(
        state,
        fock.OrderedProductSpec(
            factors=(("q", t1, None), ("q", t2, None)), ordering="normal", shift=q_j),
        p,
    )
    residuals["second_moment_normal"] = abs(
        normal_measured - predicted_normal_moment([t1, t2], mean))
    return residuals
