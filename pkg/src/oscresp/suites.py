"""Named verification suites and their reports.

Each suite runs a fixed list of residual checks at pinned tolerances and
returns a self-describing report: one row per check with its identity
tag, residual, tolerance and pass flag.  Runs are deterministic for a
given seed.  Conjecture-level checks (the higher-order symmetric-ordering
functional) are reported but do not gate.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import driven, fock, functionals, wick
from .grids import (Kernel, SampledSignal, TimeGrid, circular_convolve,
                    frequency_split, kernel_adjoint, make_grid,
                    reflect_values, without_zero_nyquist)
from .kernels import (ChargedModeSet, ModeSet, OscillatorParams,
                      charged_field_kernels, charged_identity_residuals,
                      commutator_kernel, contraction_from_retarded,
                      feynman_conj_from_retarded, feynman_from_retarded,
                      neutral_field_kernels, neutral_identity_residuals,
                      osc_d_value, osc_df_value, osc_kernels,
                      qp_commutator_kernel, retarded_from_contractions,
                      theta_samples)

SCHEMA_VERSION = 1
SUITES = ("spectral", "kernels", "wick", "functional", "driven", "charged", "field")


class ConfigError(ValueError):
    """Malformed run configuration."""


@dataclass
class Config:
    """Run configuration: physics parameters, grid, sizes, seed, overrides."""

    mass: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    n: int = 256
    bin_index: int = 8
    dt: Optional[float] = None
    dim: int = 40
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f for f in cls.__dataclass_fields__}
        params = dict(data.get("params", {}))
        grid = dict(data.get("grid", {}))
        flat = {k: v for k, v in data.items() if k not in ("params", "grid")}
        merged = {}
        merged.update({k: params[k] for k in ("mass", "omega0", "hbar") if k in params})
        merged.update({k: grid[k] for k in ("n", "bin_index", "dt") if k in grid})
        merged.update(flat)
        unknown = set(merged) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "Config":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)

    def params(self) -> OscillatorParams:
        return OscillatorParams(mass=self.mass, omega0=self.omega0, hbar=self.hbar)

    def grid(self) -> TimeGrid:
        dt = self.dt
        if dt is None:
            dt = 2.0 * np.pi * self.bin_index / (self.n * self.omega0)
        return make_grid(self.n, dt)

    def to_dict(self) -> dict:
        return {
            "params": {"mass": self.mass, "omega0": self.omega0, "hbar": self.hbar},
            "grid": {"n": self.n, "bin_index": self.bin_index, "dt": self.dt},
            "dim": self.dim,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
        }


@dataclass(frozen=True)
class CheckRow:
    id: str
    tag: str
    residual: float
    tolerance: float
    gating: bool = True

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class SuiteReport:
    suite: str
    rows: list
    config: dict
    wall_time_s: float
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows if row.gating)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "suite": self.suite,
            "passed": self.passed,
            "wall_time_s": self.wall_time_s,
            "config": self.config,
            "checks": [
                {
                    "id": r.id,
                    "tag": r.tag,
                    "residual": r.residual,
                    "tolerance": r.tolerance,
                    "passed": r.passed,
                    "gating": r.gating,
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteReport":
        rows = [
            CheckRow(
                id=row["id"],
                tag=row["tag"],
                residual=float(row["residual"]),
                tolerance=float(row["tolerance"]),
                gating=bool(row["gating"]),
            )
            for row in data["checks"]
        ]
        return cls(
            suite=data["suite"],
            rows=rows,
            config=data["config"],
            wall_time_s=float(data["wall_time_s"]),
            schema_version=int(data["schema_version"]),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SuiteReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class _Rows:
    """Accumulator applying per-check tolerance overrides."""

    def __init__(self, cfg: Config):
        self.cfg = cfg
        self.rows = []

    def add(self, check_id, tag, residual, tolerance, gating=True):
        tol = float(self.cfg.tolerances.get(check_id, tolerance))
        self.rows.append(CheckRow(id=check_id, tag=tag, residual=float(residual),
                                  tolerance=tol, gating=gating))


def _random_signal(grid: TimeGrid, rng, scale=1.0, clean=True) -> SampledSignal:
    values = scale * (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    sig = SampledSignal(grid, values)
    return without_zero_nyquist(sig) if clean else sig


# -- spectral ------------------------------------------------------------------

def suite_spectral(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    grid = cfg.grid()
    rows = _Rows(cfg)

    res = 0.0
    for _ in range(5):
        s = _random_signal(grid, rng, clean=False)
        plus, minus = frequency_split(s)
        res = max(res, float(np.max(np.abs(plus.values + minus.values - s.values))))
    rows.add("split-additivity", "plus and minus parts re-add to the signal", res, 1e-14)

    s = _random_signal(grid, rng, clean=True)
    plus, _ = frequency_split(s)
    pp, _ = frequency_split(plus)
    rows.add("split-projection", "taking the plus part twice is idempotent",
             float(np.max(np.abs(pp.values - plus.values))), 1e-14)

    s = _random_signal(grid, rng, clean=False)
    plus, minus = frequency_split(s)
    rs = SampledSignal(grid, reflect_values(s.values))
    rplus, rminus = frequency_split(rs)
    res = max(
        float(np.max(np.abs(rplus.values - reflect_values(minus.values)))),
        float(np.max(np.abs(rminus.values - reflect_values(plus.values)))),
    )
    rows.add("split-time-inversion", "time inversion swaps the frequency halves", res, 1e-13)

    s = SampledSignal(grid, rng.standard_normal(grid.n).astype(complex))
    plus, minus = frequency_split(s)
    rows.add("split-conjugation", "conjugating a real signal swaps the halves",
             float(np.max(np.abs(np.conj(plus.values) - minus.values))), 1e-13)

    s = _random_signal(grid, rng, clean=False)
    plus, minus = frequency_split(s)
    spec = np.fft.fft(s.values)
    edge = 0.5 * (abs(spec[0]) ** 2 + abs(spec[grid.n // 2]) ** 2) / grid.n
    lhs = float(np.sum(np.abs(s.values) ** 2))
    rhs = float(np.sum(np.abs(plus.values) ** 2) + np.sum(np.abs(minus.values) ** 2) + edge)
    rows.add("split-parseval", "energy splits across halves plus shared edge bins",
             abs(lhs - rhs) / max(lhs, 1.0), 1e-13)

    delta = np.zeros(grid.n, dtype=complex)
    delta[grid.n // 2] = 1.0 / grid.dt
    k = Kernel(grid, delta)
    s = _random_signal(grid, rng, clean=False)
    out = circular_convolve(k, s)
    rows.add("conv-identity-kernel", "the unit spike kernel convolves to the identity",
             float(np.max(np.abs(out.values - s.values))), 1e-12)

    k = Kernel(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    s = _random_signal(grid, rng, clean=False)
    lhs_sig = circular_convolve(frequency_split(k)[0], s)
    rhs_sig = circular_convolve(k, frequency_split(s)[0])
    scale = max(float(np.max(np.abs(lhs_sig.values))), 1e-30)
    rows.add("conv-split-shift", "frequency halves shift across a convolution",
             float(np.max(np.abs(lhs_sig.values - rhs_sig.values))) / scale, 1e-12)

    k = Kernel(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    twice = kernel_adjoint(kernel_adjoint(k))
    rows.add("adjoint-involution", "kernel conjugation is an involution",
             float(np.max(np.abs(twice.values - k.values))), 0.0)
    return rows.rows


# -- kernels -------------------------------------------------------------------

def suite_kernels(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    p = cfg.params()
    grid = cfg.grid()
    kers = osc_kernels(p, grid)
    rows = _Rows(cfg)

    rebuilt = retarded_from_contractions(kers.d_f, kers.d)
    rows.add("dr-from-contractions", "retarded kernel from the two contractions",
             float(np.max(np.abs(rebuilt.values - kers.d_r.values))), 1e-10)

    lhs = kers.d_r.values - reflect_values(kers.d_r.values)
    rhs = kers.d.values - reflect_values(kers.d.values)
    rows.add("dr-antisymmetrized", "antisymmetrized retarded equals antisymmetrized plain",
             float(np.max(np.abs(lhs - rhs))), 1e-10)

    rows.add("d-from-dr", "plain contraction from half the retarded spectrum",
             float(np.max(np.abs(contraction_from_retarded(kers.d_r).values - kers.d.values))),
             1e-10)
    rows.add("df-from-dr", "time-ordered contraction from the retarded plus half",
             float(np.max(np.abs(feynman_from_retarded(kers.d_r).values - kers.d_f.values))),
             1e-10)
    rows.add("dfconj-from-dr", "conjugate time-ordered kernel from the minus half",
             float(np.max(np.abs(feynman_conj_from_retarded(kers.d_r).values
                                 - np.conj(kers.d_f.values)))), 1e-10)

    _, d_minus = frequency_split(kers.d)
    rows.add("d-frequency-positive", "plain contraction has no negative frequencies",
             float(np.max(np.abs(d_minus.values))), 1e-12)
    rows.add("dr-real", "retarded kernel is real",
             float(np.max(np.abs(kers.d_r.values.imag))), 1e-14)
    dr_p, dr_m = frequency_split(kers.d_r)
    rows.add("dr-conjugation-swap", "conjugation swaps the retarded kernel halves",
             float(np.max(np.abs(np.conj(dr_p.values) - dr_m.values))), 1e-13)

    # matrix-oracle agreement for the three vacuum two-point orderings
    dim = 20
    vac = fock.make_state("vacuum", dim)
    res_f = res_p = res_b = 0.0
    for _ in range(10):
        t1, t2 = rng.uniform(-4.0, 4.0, size=2)
        tau = t1 - t2
        forward = fock.ordered_average(
            vac, fock.OrderedProductSpec(
                factors=(("q", t1, "plus"), ("q", t2, "plus")), ordering="double_time"), p)
        res_f = max(res_f, abs(forward - 1j * p.hbar * osc_df_value(tau, p)))
        plain = fock.ordered_average(
            vac, fock.OrderedProductSpec(
                factors=(("q", t1, None), ("q", t2, None)), ordering="plain"), p)
        res_p = max(res_p, abs(plain - 1j * p.hbar * osc_d_value(tau, p)))
        backward = fock.ordered_average(
            vac, fock.OrderedProductSpec(
                factors=(("q", t1, "minus"), ("q", t2, "minus")), ordering="double_time"), p)
        res_b = max(res_b, abs(backward + 1j * p.hbar * np.conj(osc_df_value(tau, p))))
    rows.add("two-point-forward", "forward-ordered vacuum pair equals the F kernel",
             res_f, 1e-12)
    rows.add("two-point-plain", "plain vacuum pair equals the plain kernel", res_p, 1e-12)
    rows.add("two-point-backward", "backward-ordered vacuum pair equals the conjugate kernel",
             res_b, 1e-12)

    # commutators rebuilt from the response kernel, in three states
    dim = cfg.dim
    comm = commutator_kernel(kers.d_r, p.hbar)
    res = 0.0
    for kind, kw in [("vacuum", {}), ("coherent", {"alpha": 1.0}), ("fock", {"n": 2})]:
        state = fock.make_state(kind, dim, **kw)
        for _ in range(4):
            i1, i2 = rng.integers(0, grid.n, size=2)
            t1, t2 = grid.times()[[i1, i2]]
            q1 = fock.heisenberg_q(p, t1, dim)
            q2 = fock.heisenberg_q(p, t2, dim)
            measured = fock.expectation(state, q1 @ q2 - q2 @ q1)
            tau_idx = (int(i1 - i2) + grid.n // 2) % grid.n
            res = max(res, abs(measured - comm.values[tau_idx]))
    rows.add("commutator-reconstruction",
             "two-time commutator equals the response-kernel difference in any state",
             res, 1e-10)

    qp = qp_commutator_kernel(p, grid)
    res = 0.0
    for _ in range(4):
        i1, i2 = rng.integers(0, grid.n, size=2)
        t1, t2 = grid.times()[[i1, i2]]
        q1 = fock.heisenberg_q(p, t1, dim)
        p2 = fock.heisenberg_p(p, t2, dim)
        block = (q1 @ p2 - p2 @ q1)[: dim - 1, : dim - 1]
        tau_idx = (int(i1 - i2) + grid.n // 2) % grid.n
        res = max(res, float(np.max(np.abs(block - qp.values[tau_idx] * np.eye(dim - 1)))))
    rows.add("qp-commutator", "position-momentum commutator from the response kernel",
             res, 1e-10)

    q0 = fock.heisenberg_q(p, 0.7, dim)
    p0 = fock.heisenberg_p(p, 0.7, dim)
    block = (q0 @ p0 - p0 @ q0)[: dim - 1, : dim - 1]
    rows.add("canonical-commutator", "equal-time commutator is i*hbar",
             float(np.max(np.abs(block - 1j * p.hbar * np.eye(dim - 1)))), 1e-10)
    return rows.rows


# -- wick ----------------------------------------------------------------------

def suite_wick(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    p = cfg.params()
    rows = _Rows(cfg)

    def double_factorial(k):
        out = 1
        while k > 1:
            out *= k
            k -= 2
        return out

    res = 0.0
    for m in (2, 4, 6, 8):
        perfect = sum(1 for pairs, rest in wick.enumerate_pairings(m) if not rest)
        res = max(res, abs(perfect - double_factorial(m - 1)))
    counts = wick.enumerate_pairings(3)
    res = max(res, abs(len(counts) - 4))
    rows.add("pairing-counts", "pairing enumeration has the right cardinalities", res, 0.0)

    res = 0.0
    for m, napply in [(4, 2), (6, 3)]:
        counts = wick.pair_operator_counts(m, napply)
        expected = float(math.factorial(napply))
        res = max(res, max(abs(c - expected) for c in counts.values()))
    rows.add("pair-operator-counts",
             "n applications of the pairing operator make each n-pair pattern n! times",
             res, 0.0)

    terms = wick.hori_expand([("plus", 0.1), ("plus", 0.7), ("minus", 0.4)])
    res = max(abs(t.coefficient - 1) for t in terms)
    rows.add("unit-coefficients", "every expansion term carries coefficient one", res, 0.0)

    vac = fock.make_state("vacuum", cfg.dim)
    times = [0.3, 0.9, 1.7, 2.2]
    res = wick.verify_wick(vac, [("plus", t) for t in times], p)
    rows.add("four-point-forward", "forward four-point product equals the three-pairing sum",
             res, 1e-11)

    states = [fock.make_state("vacuum", cfg.dim),
              fock.make_state("coherent", cfg.dim, alpha=1.0),
              fock.make_state("fock", cfg.dim, n=2)]
    res = 0.0
    for _ in range(20):
        state = states[rng.integers(0, len(states))]
        m = int(rng.integers(2, 5))
        factors = [("plus" if rng.random() < 0.5 else "minus",
                    float(rng.uniform(-2.0, 2.0))) for _ in range(m)]
        res = max(res, wick.verify_wick(state, factors, p))
    rows.add("randomized-expansion", "pair expansion holds for random branches and states",
             res, 1e-9)
    return rows.rows


# -- functional ------------------------------------------------------------------

def suite_functional(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    p = cfg.params()
    grid = cfg.grid()
    kers = osc_kernels(p, grid)
    rows = _Rows(cfg)

    res = 0.0
    for _ in range(5):
        ep = _random_signal(grid, rng, scale=0.3, clean=False)
        em = _random_signal(grid, rng, scale=0.3, clean=False)
        eta, sigma = functionals.response_substitution(ep, em, p.hbar)
        ep2, em2 = functionals.inverse_substitution(eta, sigma, p.hbar)
        res = max(res, float(np.max(np.abs(ep2.values - ep.values))),
                  float(np.max(np.abs(em2.values - em.values))))
    rows.add("substitution-roundtrip", "probe substitution inverts exactly", res, 1e-12)

    res = 0.0
    flagged = 0.0
    for _ in range(10):
        ps = functionals.ProbeSet(
            _random_signal(grid, rng, scale=0.15), _random_signal(grid, rng, scale=0.15),
            hbar=p.hbar)
        flagged = max(flagged, ps.edge_bin_fraction())
        quad = functionals.phi_vac_quadratic(ps, kers)
        resp = functionals.phi_vac_response(ps, kers.d_r)
        res = max(res, abs(quad - resp) / max(abs(quad), 1e-300))
    rows.add("vacuum-emission-form", "quadratic vacuum functional equals its emission form",
             res, 1e-10)
    rows.add("probe-edge-content", "probe sets stay clear of the shared edge bins",
             flagged, 1e-10)

    ep = _random_signal(grid, rng, scale=0.2, clean=False)
    ps = functionals.ProbeSet(ep, ep.conj(), hbar=p.hbar)
    phi = functionals.phi_vac_quadratic(ps, kers)
    rows.add("vacuum-reality", "conjugate probe pairs give a real functional",
             abs(phi.imag) / max(abs(phi), 1e-300), 1e-12)

    state = fock.make_state("coherent", cfg.dim, alpha=0.5)
    res = fock.reality_check(state, [(0.4, 0.3)], [(1.1, 0.2)], p, order=4)
    rows.add("taylor-reality", "truncated functional obeys the conjugation symmetry",
             res, 1e-10)

    jp = _random_signal(grid, rng, scale=0.4, clean=False)
    jm = _random_signal(grid, rng, scale=0.4, clean=False)
    cp = functionals.CurrentPair(jp, jm, variant="normal")
    eta_c, kubo = functionals.schwinger_map(cp, p.hbar)
    eta_s, sigma = functionals.response_substitution(
        (1.0 / p.hbar) * jp, (1.0 / p.hbar) * jm, p.hbar)
    res = max(float(np.max(np.abs(eta_c.values - eta_s.values))),
              float(np.max(np.abs(kubo.values - sigma.values))))
    rows.add("current-map-normal", "normal current map matches the probe substitution",
             res, 1e-12)

    eta = _random_signal(grid, rng, scale=0.3)
    rows.add("weyl-kernel-rearrangement",
             "symmetric Gaussian factor rewrites through the retarded kernel",
             functionals.weyl_kernel_identity_residual(eta, kers.d, kers.d_r), 1e-10)

    res = max(
        functionals.weyl_moment_check([0.0, 0.0], p, "vacuum", dim=cfg.dim),
        functionals.weyl_moment_check([0.3, 1.1], p, "vacuum", dim=cfg.dim),
        functionals.weyl_moment_check([0.3, 1.1], p, "coherent", alpha=1.0, dim=cfg.dim),
    )
    rows.add("weyl-two-point", "symmetric two-point average matches the Gaussian factor",
             res, 1e-10)

    res = max(
        functionals.weyl_moment_check([0.2, 0.7, 1.3, 1.9], p, "vacuum", dim=cfg.dim),
        functionals.weyl_moment_check([0.2, 0.7, 1.3, 1.9], p, "coherent", alpha=0.5,
                                      dim=cfg.dim),
    )
    rows.add("weyl-four-point",
             "conjecture-level: four-point symmetric average matches the Gaussian factor",
             res, 1e-9, gating=False)
    return rows.rows


# -- driven ----------------------------------------------------------------------

def suite_driven(cfg: Config):
    p = cfg.params()
    rows = _Rows(cfg)

    # continuum cross-check at the pinned fine step
    fine_grid = make_grid(2048, 0.005)
    for name, build in [("step", driven.step_scenario), ("sin", driven.sin_scenario)]:
        sc = build(p, fine_grid, 1.0)
        kers = osc_kernels(p, fine_grid, loose=True)
        q_conv = driven.classical_displacement(sc, kers.d_r)
        q_ode = driven.ode_oscillator(sc, error_tol=1e-6)
        window = driven.causal_window(fine_grid, sc.t_on)
        res = float(np.max(np.abs(q_conv.values.real - q_ode.values.real)[window]))
        rows.add(f"displacement-vs-ode-{name}",
                 f"convolved displacement tracks the integrated motion ({name} drive)",
                 res, 1e-6)

    grid = cfg.grid()
    kers = osc_kernels(p, grid)

    sc = driven.step_scenario(p, grid, 1.0)
    q_j = driven.classical_displacement(sc, kers.d_r)
    times = grid.times()
    window = driven.causal_window(grid)
    probe_idx = np.flatnonzero(window)[len(np.flatnonzero(window)) // 3]
    t_probe = float(times[probe_idx])
    bumped = sc.current.values.copy()
    later = times > t_probe + 1e-9
    bumped[later] += 0.8
    sc_bumped = driven.DriveScenario(
        params=p, grid=grid, current=SampledSignal(grid, bumped),
        state_kind=sc.state_kind, alpha=sc.alpha, current_fn=sc.current_fn, t_on=sc.t_on)
    q_j2 = driven.classical_displacement(sc_bumped, kers.d_r)
    rows.add("displacement-causality",
             "displacement before a current change is untouched by it",
             float(np.max(np.abs((q_j2.values - q_j.values)[window & (times <= t_probe)]))),
             1e-14)

    sc1 = driven.step_scenario(p, grid, 0.7)
    sc2 = driven.sin_scenario(p, grid, 0.4)
    mixed = SampledSignal(grid, 2.0 * sc1.current.values - 3.0 * sc2.current.values)
    sc_mix = driven.DriveScenario(params=p, grid=grid, current=mixed,
                                  current_fn=lambda t: 0.0)
    lhs = driven.classical_displacement(sc_mix, kers.d_r).values
    rhs = (2.0 * driven.classical_displacement(sc1, kers.d_r).values
           - 3.0 * driven.classical_displacement(sc2, kers.d_r).values)
    rows.add("displacement-linearity", "displacement is linear in the current",
             float(np.max(np.abs(lhs - rhs))), 1e-13)

    for current_name, build in [("step", driven.step_scenario), ("sin", driven.sin_scenario)]:
        for kind, alpha in [("vacuum", 0.0), ("coherent", 0.5)]:
            sc = build(p, grid, 1.0, state_kind=kind, alpha=alpha)
            residuals = driven.verify_driven_factorization(sc, kers.d_r, dim=cfg.dim)
            for check, res in residuals.items():
                rows.add(f"factorization-{current_name}-{kind}-{check}",
                         f"drive factorization: {check} ({current_name}, {kind})",
                         res, 1e-9)
    return rows.rows


# -- charged ---------------------------------------------------------------------

def _demo_charged_modes(grid: TimeGrid) -> ChargedModeSet:
    scale = 2.0 * np.pi / grid.period
    return ChargedModeSet(
        omegas_a=np.array([5, 9, 14]) * scale,
        weights_a=np.array([0.7, 1.1, 0.4]),
        omegas_b=np.array([6, 11]) * scale,
        weights_b=np.array([0.9, 0.6]),
    )


def suite_charged(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    p = cfg.params()
    grid = cfg.grid()
    ck = charged_field_kernels(_demo_charged_modes(grid), grid)
    rows = _Rows(cfg)

    ident = charged_identity_residuals(ck)
    rows.add("charged-dr-two-defs", "the two retarded combinations coincide",
             ident["d_r_two_defs"], 1e-12)
    rows.add("charged-da-from-dr", "particle kernel from the retarded halves",
             ident["d_a"], 1e-10)
    rows.add("charged-db-from-dr", "antiparticle kernel from the retarded halves",
             ident["d_b"], 1e-10)
    rows.add("charged-df-from-dr", "time-ordered kernel from the retarded halves",
             ident["d_f"], 1e-10)
    rows.add("charged-dfdag-from-dr", "adjoint time-ordered kernel from the retarded halves",
             ident["d_f_dag"], 1e-10)

    res = max(
        float(np.max(np.abs(kernel_adjoint(ck.d_a).values + ck.d_a.values))),
        float(np.max(np.abs(kernel_adjoint(ck.d_b).values + ck.d_b.values))),
    )
    rows.add("charged-anti-hermitian", "species kernels are anti-Hermitian", res, 1e-14)

    _, da_minus = frequency_split(ck.d_a)
    db_plus, _ = frequency_split(ck.d_b)
    rows.add("charged-frequency-signs",
             "particle kernel is frequency-positive, antiparticle negative",
             max(float(np.max(np.abs(da_minus.values))),
                 float(np.max(np.abs(db_plus.values)))), 1e-12)

    res = 0.0
    for _ in range(5):
        bar = functionals.ProbeSet(_random_signal(grid, rng, scale=0.3),
                                   _random_signal(grid, rng, scale=0.3), hbar=p.hbar)
        plain = functionals.ProbeSet(_random_signal(grid, rng, scale=0.3),
                                     _random_signal(grid, rng, scale=0.3), hbar=p.hbar)
        res = max(res, functionals.charged_substitution_residual(bar, plain, ck))
    rows.add("charged-substitution", "doubled substitution collapses the four-block form",
             res, 1e-10)

    single = ChargedModeSet(
        omegas_a=np.array([9 * 2.0 * np.pi / grid.period]), weights_a=np.array([1.0]),
        omegas_b=np.array([], dtype=float), weights_b=np.array([], dtype=float))
    ck1 = charged_field_kernels(single, grid)
    theta = theta_samples(grid)
    res = max(
        float(np.max(np.abs(ck1.d_b.values))),
        float(np.max(np.abs(ck1.d_r.values - theta * ck1.d_a.values))),
    )
    rows.add("charged-single-species", "with no antiparticle modes the retarded kernel is the stepped particle kernel",
             res, 1e-14)
    return rows.rows


# -- neutral field -----------------------------------------------------------------

def _demo_mode_set(grid: TimeGrid, rng) -> ModeSet:
    scale = 2.0 * np.pi / grid.period
    freqs = np.array([4, 7, 12]) * scale
    amps = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
    return ModeSet(frequencies=freqs, amplitudes=amps)


def suite_field(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    grid = cfg.grid()
    p = cfg.params()
    rows = _Rows(cfg)

    nk = neutral_field_kernels(_demo_mode_set(grid, rng), grid)
    ident = neutral_identity_residuals(nk)
    rows.add("field-d-from-dr", "field contraction from the retarded halves",
             ident["d"], 1e-10)
    rows.add("field-df-from-dr", "field time-ordered kernel from the retarded halves",
             ident["d_f"], 1e-10)

    swapped = np.transpose(nk.d, (2, 3, 0, 1, 4))
    reflected = np.roll(swapped[..., ::-1], 1, axis=-1)
    rows.add("field-swap-reflection", "label swap with time inversion conjugates and flips sign",
             float(np.max(np.abs(reflected + np.conj(nk.d)))), 1e-13)

    single = ModeSet(
        frequencies=np.array([p.omega0]),
        amplitudes=np.ones((1, 1, 1), dtype=complex))
    nk1 = neutral_field_kernels(single, cfg.grid())
    kers = osc_kernels(p, cfg.grid())
    res = float(np.max(np.abs(
        nk1.d[0, 0, 0, 0] / (2.0 * p.mass * p.omega0) - kers.d.values)))
    rows.add("field-oscillator-reduction",
             "a single unit mode reduces to the oscillator contraction",
             res, 1e-14)
    return rows.rows


_SUITE_FUNCS = {
    "spectral": suite_spectral,
    "kernels": suite_kernels,
    "wick": suite_wick,
    "functional": suite_functional,
    "driven": suite_driven,
    "charged": suite_charged,
    "field": suite_field,
}


def run_suite(name: str, cfg: Optional[Config] = None) -> SuiteReport:
    """Run one named suite (or 'all') and assemble its report."""
    cfg = cfg or Config()
    if name != "all" and name not in _SUITE_FUNCS:
        raise ConfigError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    start = time.perf_counter()
    rows = []
    if name == "all":
        for suite_name in SUITES:
            rows.extend(_SUITE_FUNCS[suite_name](cfg))
    else:
        rows = _SUITE_FUNCS[name](cfg)
    wall = time.perf_counter() - start
    return SuiteReport(suite=name, rows=rows, config=cfg.to_dict(), wall_time_s=wall)
