"""Contraction combinatorics and Fock-space verification of pair expansion.

A product of branch-labelled position factors expands into a sum over all
ways of replacing disjoint factor pairs by c-number contractions, the kind
of each contraction being fixed by the branch labels of its two factors:
both forward -> time-ordered kernel, both backward -> its conjugate, mixed
-> the plain kernel with the backward time first.  The expansion carries
every term with coefficient one; applying the generating quadratic
derivative operator n times produces each n-pair pattern n! times, and
the 1/n! of the exponential restores unit coefficients.  Contractions are
evaluated from the analytic closed forms at exact time differences, so
none of this inherits grid error.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import fock
from .kernels import OscillatorParams, osc_d_value, osc_df_value

MAX_PAIRING_FACTORS = 10
MAX_EXPANSION_FACTORS = 8
MAX_VERIFY_FACTORS = 6

KINDS = ("F", "Fstar", "cross")


class WickError(ValueError):
    """Invalid expansion request."""


@dataclass(frozen=True)
class WickTerm:
    """One contraction pattern: index pairs with kinds, and the leftovers."""

    pairs: tuple          # ((i, j), ...) with i < j
    kinds: tuple          # one of KINDS per pair
    rest: tuple           # uncontracted factor indices, ascending
    coefficient: int = 1


def enumerate_pairings(m: int):
    """All sets of disjoint index pairs of range(m), with their leftovers.

    Includes the empty pairing.  Returned as (pairs, rest) tuples; for
    even m the number of perfect pairings is (m-1)!!.
    """
    if m > MAX_PAIRING_FACTORS:
        raise WickError(f"pairing enumeration capped at {MAX_PAIRING_FACTORS} factors")
    if m < 0:
        raise WickError("factor count must be nonnegative")

    def recurse(indices):
        if not indices:
            return [((), ())]
        first, remainder = indices[0], indices[1:]
        out = []
        for pairs, rest in recurse(remainder):
            out.append((pairs, (first,) + rest))
        for j in range(len(remainder)):
            partner = remainder[j]
            others = remainder[:j] + remainder[j + 1:]
            for pairs, rest in recurse(others):
                out.append((((first, partner),) + pairs, rest))
        return out

    return recurse(tuple(range(m)))


def _pair_kind(branch_i: str, branch_j: str) -> str:
    if branch_i == "plus" and branch_j == "plus":
        return "F"
    if branch_i == "minus" and branch_j == "minus":
        return "Fstar"
    return "cross"


def hori_expand(factors) -> list:
    """Expand branch-labelled factors into WickTerms with kinds assigned.

    factors: sequence of (branch, time) with branch 'plus' or 'minus'.
    Mixed pairs are normalised so the kernel argument is the backward
    time minus the forward time.
    """
    factors = list(factors)
    if len(factors) > MAX_EXPANSION_FACTORS:
        raise WickError(f"expansion capped at {MAX_EXPANSION_FACTORS} factors")
    for branch, _ in factors:
        if branch not in ("plus", "minus"):
            raise WickError(f"factor branch must be 'plus' or 'minus', got {branch!r}")
    terms = []
    for pairs, rest in enumerate_pairings(len(factors)):
        kinds = tuple(_pair_kind(factors[i][0], factors[j][0]) for i, j in pairs)
        terms.append(WickTerm(pairs=pairs, kinds=kinds, rest=rest))
    return terms


def contraction_value(kind: str, t_i: float, branch_i: str, t_j: float,
                      branch_j: str, p: OscillatorParams) -> complex:
    """c-number value of one contracted pair, with its i*hbar prefactor."""
    if kind == "F":
        return 1j * p.hbar * osc_df_value(t_i - t_j, p)
    if kind == "Fstar":
        return -1j * p.hbar * np.conj(osc_df_value(t_i - t_j, p))
    if kind == "cross":
        t_minus, t_plus = (t_i, t_j) if branch_i == "minus" else (t_j, t_i)
        return 1j * p.hbar * osc_d_value(t_minus - t_plus, p)
    raise WickError(f"unknown contraction kind {kind!r}")


def verify_wick(state: fock.FockState, factors, p: OscillatorParams) -> float:
    """|double-ordered average - pair expansion| for the given factors.

    The left side is the matrix-product average of the branch-ordered
    position factors; the right side sums, over all contraction patterns,
    the product of contraction values times the normally ordered average
    of the leftover factors.
    """
    factors = list(factors)
    if len(factors) > MAX_VERIFY_FACTORS:
        raise WickError(f"verification capped at {MAX_VERIFY_FACTORS} factors")
    lhs = fock.ordered_average(
        state,
        fock.OrderedProductSpec(
            factors=tuple(("q", t, branch) for branch, t in factors),
            ordering="double_time",
        ),
        p,
    )
    rhs = 0.0j
    for term in hori_expand(factors):
        weight = complex(term.coefficient)
        for (i, j), kind in zip(term.pairs, term.kinds):
            weight *= contraction_value(
                kind, factors[i][1], factors[i][0], factors[j][1], factors[j][0], p)
        rest_avg = fock.ordered_average(
            state,
            fock.OrderedProductSpec(
                factors=tuple(("q", factors[k][1], None) for k in term.rest),
                ordering="normal",
            ),
            p,
        )
        rhs += weight * rest_avg
    return abs(lhs - rhs)


def pair_operator_counts(m: int, applications: int) -> dict:
    """Multiset count of pair patterns after repeated pairing applications.

    Starting from m free indices, apply `applications` times the operation
    "contract one not-yet-paired index pair" in every possible way, and
    count how often each final pattern of pairs occurs.  Each pattern with
    k pairs is produced exactly k! times by k applications, which is what
    the 1/n! of the exponential generating operator divides out.
    """
    counts = {frozenset(): 1}
    for _ in range(applications):
        new_counts = {}
        for pattern, count in counts.items():
            used = {idx for pair in pattern for idx in pair}
            free = [i for i in range(m) if i not in used]
            for i, j in combinations(free, 2):
                key = pattern | {(i, j)}
                new_counts[key] = new_counts.get(key, 0) + count
        counts = new_counts
    return counts
