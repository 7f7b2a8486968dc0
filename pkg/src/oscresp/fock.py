"""Truncated number-basis oracle for operator products and orderings.

Dense matrices in a truncated Fock basis provide the brute-force side of
every identity check: Heisenberg-picture position/momentum operators,
density matrices for the standard state families, and averages of
operator products under the orderings used throughout (forward/backward
time ordering on the two contour branches, normal, antinormal, symmetric,
or none).  The driven system enters exactly through a c-number shift of
the position factors, so no time-dependent integration is ever needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .grids import SampledSignal
from .kernels import OscillatorParams

MAX_FACTORS = 8
NORM_DEFICIT_LIMIT = 1e-10

ORDERINGS = ("double_time", "normal", "weyl", "antinormal", "plain")


class FockError(ValueError):
    """Invalid Fock-space request."""


class TruncationError(FockError):
    """The truncated basis cannot represent the requested state."""


def ladder(dim: int):
    """Annihilation and creation matrices; a[n-1, n] = sqrt(n)."""
    if dim < 2:
        raise FockError("need dim >= 2 for a ladder pair")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    return a, a.conj().T


def heisenberg_q(p: OscillatorParams, t: float, dim: int) -> np.ndarray:
    """q(t) = (q0/sqrt 2) [a e^{-i w0 t} + a^dag e^{+i w0 t}]."""
    a, adag = ladder(dim)
    phase = np.exp(-1j * p.omega0 * t)
    return (p.q0 / math.sqrt(2.0)) * (a * phase + adag * np.conj(phase))


def heisenberg_p(p: OscillatorParams, t: float, dim: int) -> np.ndarray:
    """p(t) = (i p0/sqrt 2) [a^dag e^{+i w0 t} - a e^{-i w0 t}].

    This is mass times the velocity of q(t); together with [a, a^dag] = 1
    it reproduces the canonical equal-time commutator i*hbar.
    """
    a, adag = ladder(dim)
    phase = np.exp(-1j * p.omega0 * t)
    return (1j * p.p0 / math.sqrt(2.0)) * (adag * np.conj(phase) - a * phase)


@dataclass(frozen=True)
class FockState:
    """Density matrix in the truncated basis, with its truncation deficit."""

    rho: np.ndarray
    norm_deficit: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise FockError("density matrix must be square")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def make_state(kind: str, dim: int, *, alpha: complex = 0.0, n: int = 0,
               nbar: float = 0.0) -> FockState:
    """Build vacuum, coherent(alpha), fock(n) or thermal(nbar) states.

    States that lose weight to truncation are renormalised; if the lost
    weight exceeds 1e-10 the truncation is refused rather than silently
    degraded.
    """
    if dim < 2:
        raise FockError("need dim >= 2")
    if kind == "vacuum":
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
        return FockState(np.outer(psi, psi.conj()), 0.0)
    if kind == "fock":
        if not 0 <= n < dim:
            raise TruncationError(f"fock level {n} outside truncated basis of {dim}")
        psi = np.zeros(dim, dtype=complex)
        psi[n] = 1.0
        return FockState(np.outer(psi, psi.conj()), 0.0)
    if kind == "coherent":
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        for k in range(1, dim):
            amps[k] = amps[k - 1] * alpha / math.sqrt(k)
        amps *= np.exp(-abs(alpha) ** 2 / 2.0)
        norm2 = float(np.vdot(amps, amps).real)
        deficit = 1.0 - norm2
        if deficit > NORM_DEFICIT_LIMIT:
            raise TruncationError(
                f"coherent(alpha={alpha}) loses {deficit:.3e} of its norm at dim={dim}")
        psi = amps / math.sqrt(norm2)
        return FockState(np.outer(psi, psi.conj()), deficit)
    if kind == "thermal":
        if nbar < 0:
            raise FockError("thermal occupation must be nonnegative")
        if nbar == 0:
            return make_state("vacuum", dim)
        ratio = nbar / (nbar + 1.0)
        weights = ratio ** np.arange(dim) / (nbar + 1.0)
        deficit = 1.0 - float(weights.sum())
        if deficit > NORM_DEFICIT_LIMIT:
            raise TruncationError(
                f"thermal(nbar={nbar}) loses {deficit:.3e} of its norm at dim={dim}")
        return FockState(np.diag(weights / weights.sum()).astype(complex), deficit)
    raise FockError(f"unknown state kind {kind!r}")


def expectation(state: FockState, op: np.ndarray) -> complex:
    return complex(np.trace(state.rho @ op))


# -- ordered products -----------------------------------------------------------

Shift = Union[SampledSignal, Callable[[float], complex], None]


@dataclass(frozen=True)
class Factor:
    observable: str            # 'q' or 'p'
    time: float
    branch: Optional[str] = None   # 'plus', 'minus' or None

    def __post_init__(self):
        if self.observable not in ("q", "p"):
            raise FockError(f"unknown observable {self.observable!r}")
        if self.branch not in ("plus", "minus", None):
            raise FockError(f"unknown branch {self.branch!r}")


@dataclass(frozen=True)
class OrderedProductSpec:
    """An ordered product: factors, an ordering rule, optional c-number shift.

    The shift is the classical displacement added to every q factor; it is
    evaluated at the factor times either from grid samples or a callable.
    """

    factors: tuple
    ordering: str
    shift: Shift = None

    def __post_init__(self):
        factors = tuple(
            f if isinstance(f, Factor) else Factor(*f) for f in self.factors
        )
        object.__setattr__(self, "factors", factors)
        if self.ordering not in ORDERINGS:
            raise FockError(f"unknown ordering {self.ordering!r}")
        if len(factors) > MAX_FACTORS:
            raise FockError(f"at most {MAX_FACTORS} factors supported")
        if self.ordering == "double_time":
            if any(f.branch is None for f in factors):
                raise FockError("double_time ordering needs a branch on every factor")


def _shift_value(shift: Shift, t: float) -> complex:
    if shift is None:
        return 0.0
    if isinstance(shift, SampledSignal):
        return shift.value_at(t)
    return complex(shift(t))


def _factor_matrix(f: Factor, p: OscillatorParams, dim: int, shift: Shift) -> np.ndarray:
    op = heisenberg_q(p, f.time, dim) if f.observable == "q" else heisenberg_p(p, f.time, dim)
    if f.observable == "q" and shift is not None:
        op = op + _shift_value(shift, f.time) * np.eye(dim)
    return op


def _factor_parts(f: Factor, p: OscillatorParams, shift: Shift):
    """Split a factor into (coefficient, symbol) parts over {a, adag, id}."""
    phase = np.exp(-1j * p.omega0 * f.time)
    if f.observable == "q":
        scale = p.q0 / math.sqrt(2.0)
        parts = [(scale * phase, "a"), (scale * np.conj(phase), "adag")]
        if shift is not None:
            parts.append((_shift_value(shift, f.time), "id"))
    else:
        scale = 1j * p.p0 / math.sqrt(2.0)
        parts = [(-scale * phase, "a"), (scale * np.conj(phase), "adag")]
    return parts


def ordered_average(state: FockState, spec: OrderedProductSpec,
                    p: OscillatorParams) -> complex:
    """Tr[rho O] with O assembled according to the requested ordering.

    double_time: all backward-branch factors stand left of all
    forward-branch factors; within the backward branch time increases to
    the right, within the forward branch it decreases to the right
    (contour-earlier operators go right).  Equal times on one branch
    commute under the ordering, so the stable input order is kept.
    normal/antinormal split every factor into its a / a^dag parts and
    reorder those; weyl averages over all factor permutations with equal
    weight.
    """
    dim = state.dim
    factors = spec.factors
    if not factors:
        return complex(np.trace(state.rho))

    if spec.ordering in ("plain", "double_time", "weyl"):
        mats = [_factor_matrix(f, p, dim, spec.shift) for f in factors]
        if spec.ordering == "plain":
            orderings = [mats]
        elif spec.ordering == "double_time":
            minus = [i for i, f in enumerate(factors) if f.branch == "minus"]
            plus = [i for i, f in enumerate(factors) if f.branch == "plus"]
            minus.sort(key=lambda i: factors[i].time)            # earliest leftmost
            plus.sort(key=lambda i: -factors[i].time)            # latest leftmost
            orderings = [[mats[i] for i in minus + plus]]
        else:
            orderings = [list(seq) for seq in permutations(mats)]
        total = 0.0j
        for seq in orderings:
            op = seq[0].copy()
            for m in seq[1:]:
                op = op @ m
            total += expectation(state, op)
        return total / len(orderings)

    # normal / antinormal: expand over a / adag / id parts of every factor
    a, adag = ladder(dim)
    max_pow = len(factors)
    a_pows = [np.eye(dim, dtype=complex)]
    adag_pows = [np.eye(dim, dtype=complex)]
    for _ in range(max_pow):
        a_pows.append(a_pows[-1] @ a)
        adag_pows.append(adag_pows[-1] @ adag)
    moments = np.empty((max_pow + 1, max_pow + 1), dtype=complex)
    for j in range(max_pow + 1):
        for k in range(max_pow + 1):
            if spec.ordering == "normal":
                moments[j, k] = expectation(state, adag_pows[j] @ a_pows[k])
            else:
                moments[j, k] = expectation(state, a_pows[k] @ adag_pows[j])
    part_lists = [_factor_parts(f, p, spec.shift) for f in factors]
    total = 0.0j
    for choice in product(*part_lists):
        coeff = 1.0 + 0.0j
        n_a = n_dag = 0
        for c, sym in choice:
            coeff *= c
            if sym == "a":
                n_a += 1
            elif sym == "adag":
                n_dag += 1
        if coeff != 0.0:
            total += coeff * moments[n_dag, n_a]
    return total


# -- double-time characteristic functional, truncated in the probe amplitude ----

Probe = Sequence[tuple]          # sequence of (time, weight)


def _poly_scale_exp(m: np.ndarray, order: int):
    """[I, m, m^2/2!, ...]: exp(m) as a polynomial list up to `order`."""
    dim = m.shape[0]
    out = [np.eye(dim, dtype=complex)]
    for k in range(1, order + 1):
        out.append(out[-1] @ m / k)
    return out


def _poly_mul(a, b, order: int):
    dim = a[0].shape[0]
    out = [np.zeros((dim, dim), dtype=complex) for _ in range(order + 1)]
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if i + j <= order:
                out[i + j] += ai @ bj
    return out


def _phi_taylor(state: FockState, minus_probe: Probe, plus_probe: Probe,
                p: OscillatorParams, order: int) -> complex:
    dim = state.dim
    poly = [np.eye(dim, dtype=complex)]
    # backward branch: exponentials of +i w q(t), earliest time leftmost
    for t, w in sorted(minus_probe, key=lambda tw: tw[0]):
        poly = _poly_mul(poly, _poly_scale_exp(1j * w * heisenberg_q(p, t, dim), order), order)
    # forward branch: exponentials of -i w q(t), latest time leftmost
    for t, w in sorted(plus_probe, key=lambda tw: -tw[0]):
        poly = _poly_mul(poly, _poly_scale_exp(-1j * w * heisenberg_q(p, t, dim), order), order)
    return sum(expectation(state, term) for term in poly)


def reality_check(state: FockState, plus_probe: Probe, minus_probe: Probe,
                  p: OscillatorParams, order: int = 4) -> float:
    """Residual of conj(Phi(eta-, eta+)) = Phi(conj eta+, conj eta-).

    Both sides are evaluated by Taylor expansion of the double-ordered
    exponential pair, truncated at the given total order in the probe
    weights (order <= 6).
    """
    if order > 6:
        raise FockError("truncated-exponential evaluation is capped at order 6")
    phi = _phi_taylor(state, minus_probe, plus_probe, p, order)
    swapped = _phi_taylor(
        state,
        [(t, np.conj(w)) for t, w in plus_probe],
        [(t, np.conj(w)) for t, w in minus_probe],
        p,
        order,
    )
    return abs(np.conj(phi) - swapped)
