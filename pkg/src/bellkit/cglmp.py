"""CGLMP constructions for qutrits and their three-party generalization.

The probability form of the CGLMP inequality aggregates coincidence
probabilities with outcome offsets; rewriting those aggregates through the
qutrit Fourier components E_xy = <alpha^(a-b)> turns it into a correlation
inequality whose coefficients expand in the two-setting conjugate basis.  A
second, independent generalization to three parties rests on the product
identity obeyed by root-of-unity value assignments: three of the four
deterministic correlations fix the fourth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConjugationMask,
    CorrelationTensor,
    DeterministicStrategy,
    ProbabilityTable,
    Scenario,
    correlation_from_probabilities,
    root_of_unity,
)
from .bases import (
    BellFunctional,
    FunctionalForm,
    GTable,
    Pairing,
    apply_form,
    build_functional,
    k2_conjugate_basis,
)
from .lhv import classical_bound, facet_check, strategy_functional_value
from .multiport import QuantumSetup
from .optimize import OptimizationConfig, maximize_violation, quantum_functional_value

__all__ = [
    "CGLMP_SCENARIO",
    "I323_SCENARIO",
    "PROBABILITY_TO_CORRELATION_SCALE",
    "CglmpTerms",
    "MaskedFunctionalTerm",
    "MaskedFunctional",
    "cglmp_probability_value",
    "equality_probability",
    "correlation_from_equality_probs",
    "equality_probs_from_correlation",
    "cglmp_correlation_functional",
    "cglmp_conjugate_expansion_g",
    "cglmp_correlation_value",
    "cglmp_starred_functional",
    "bell_numbers_identity_check",
    "i323_functional",
    "i323_value",
    "TIGHT_323_G_TABLES",
    "three_party_tight_functional",
    "three_party_tight_family",
]

CGLMP_SCENARIO = Scenario(2, 2, 3)
I323_SCENARIO = Scenario(3, 2, 3)

ALPHA = root_of_unity(3, 1)

# The probability form equals this multiple of the correlation form on every
# probability table; derived once by expanding the aggregates through the
# Fourier components and frozen here (regression-tested exhaustively).
PROBABILITY_TO_CORRELATION_SCALE = 2.0 / 3.0


@dataclass(frozen=True)
class CglmpTerms:
    """The eight coincidence aggregates entering the probability form.

    Names follow the settings pair (1-based) and the outcome offset: e.g.
    p_equal_21 is P(a = b | x=2, y=1) and p_minus_11 is P(a = b - 1 | 11).
    """

    p_equal_11: float
    p_minus_21: float
    p_equal_22: float
    p_equal_12: float
    p_minus_11: float
    p_equal_21: float
    p_minus_22: float
    p_plus_12: float

    @classmethod
    def from_table(cls, table: ProbabilityTable) -> "CglmpTerms":
        if table.scenario != CGLMP_SCENARIO:
            raise ValueError("CGLMP aggregates need the two-setting qutrit scenario")
        return cls(
            p_equal_11=equality_probability(table, 0, 0, 0),
            p_minus_21=equality_probability(table, 1, 0, -1),
            p_equal_22=equality_probability(table, 1, 1, 0),
            p_equal_12=equality_probability(table, 0, 1, 0),
            p_minus_11=equality_probability(table, 0, 0, -1),
            p_equal_21=equality_probability(table, 1, 0, 0),
            p_minus_22=equality_probability(table, 1, 1, -1),
            p_plus_12=equality_probability(table, 0, 1, 1),
        )

    def value(self) -> float:
        plus = self.p_equal_11 + self.p_minus_21 + self.p_equal_22 + self.p_equal_12
        minus = self.p_minus_11 + self.p_equal_21 + self.p_minus_22 + self.p_plus_12
        return plus - minus


def equality_probability(table: ProbabilityTable, x: int, y: int, offset: int) -> float:
    """P(a = b + offset mod 3 | x, y) for 0-based settings."""
    values = table.slice_for((x, y))
    total = 0.0
    for b in range(3):
        total += values[(b + offset) % 3, b]
    return float(total)


def cglmp_probability_value(table: ProbabilityTable) -> float:
    """The probability-form combination; at most 2 for every LHV model."""
    return CglmpTerms.from_table(table).value()


def correlation_from_equality_probs(p_equal: float, p_plus: float, p_minus: float) -> complex:
    """E = P(a=b) + alpha P(a=b+1) + alpha^2 P(a=b-1), i.e. <alpha^(a-b)>."""
    return p_equal + ALPHA * p_plus + ALPHA**2 * p_minus


def equality_probs_from_correlation(value: complex) -> tuple[float, float, float]:
    """Invert the qutrit Fourier component back to the three aggregates.

    Uses sum-to-one of the aggregates; the round trip is exact.
    """
    probs = tuple(
        float((1 + 2 * np.real(ALPHA ** (-c) * value)) / 3.0) for c in range(3)
    )
    return probs  # (P(a=b), P(a=b+1), P(a=b-1))


CGLMP_MASK = (1, 2)  # a enters plainly, b conjugated: <alpha^(a-b)>


def _cglmp_coefficients() -> np.ndarray:
    return np.array(
        [[1 - ALPHA, 1 - ALPHA**2], [ALPHA - 1, 1 - ALPHA]], dtype=complex
    )


def cglmp_correlation_functional() -> BellFunctional:
    """The correlation form: Re of the coefficient pairing, bound 3."""
    return BellFunctional(
        CGLMP_SCENARIO,
        _cglmp_coefficients(),
        FunctionalForm.REAL_PART,
        ConjugationMask(CGLMP_MASK, 3),
        cached_bound=3.0,
    )


def cglmp_conjugate_expansion_g() -> GTable:
    """Exponent table whose conjugate-basis expansion yields the correlation form.

    With the dual order v_0 = (-a,1)/(1-a), v_1 = (1,-1)/(1-a) and bilinear
    probes, the table is the party-swapped image of the usual presentation;
    three times the expansion reproduces the coefficients exactly.
    """
    return GTable(CGLMP_SCENARIO, np.array([[0, 1], [0, 2]], dtype=np.int64))


def cglmp_correlation_value(tensor: CorrelationTensor) -> float:
    """Evaluate the correlation form on an <alpha^(a-b)> tensor."""
    if tensor.scenario != CGLMP_SCENARIO:
        raise ValueError("the correlation form needs the two-setting qutrit scenario")
    if tensor.mask.entries != CGLMP_MASK:
        raise ValueError(f"expected mask {CGLMP_MASK}, got {tensor.mask.entries}")
    total = complex(np.sum(_cglmp_coefficients() * tensor.values))
    return float(total.real)


@dataclass(frozen=True)
class MaskedFunctionalTerm:
    """One weighted correlation with its own per-party conjugation pattern."""

    settings: tuple[int, ...]
    mask: tuple[int, ...]
    weight: complex

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(int(v) for v in self.settings))
        object.__setattr__(self, "mask", tuple(int(v) for v in self.mask))
        object.__setattr__(self, "weight", complex(self.weight))


@dataclass(frozen=True)
class MaskedFunctional:
    """Sum of correlations with per-term masks, read through Re or modulus.

    Generalizes BellFunctional to expressions that mix a correlation with the
    conjugate of another, as the starred three-party construction requires.
    """

    scenario: Scenario
    term_list: tuple[MaskedFunctionalTerm, ...]
    form: FunctionalForm = FunctionalForm.REAL_PART
    cached_bound: float | None = None

    def __post_init__(self):
        if not self.term_list:
            raise ValueError("need at least one term")
        for term in self.term_list:
            if len(term.settings) != self.scenario.parties or len(term.mask) != self.scenario.parties:
                raise ValueError("term arity does not match the scenario")
            if any(not 0 <= s < self.scenario.settings for s in term.settings):
                raise ValueError(f"settings {term.settings} out of range")
            if any(not 0 <= r < self.scenario.outcomes for r in term.mask):
                raise ValueError(f"mask {term.mask} out of range")
        object.__setattr__(self, "term_list", tuple(self.term_list))

    def terms(self) -> list[tuple[tuple[int, ...], tuple[int, ...], complex]]:
        return [(t.settings, t.mask, t.weight) for t in self.term_list]

    def value_on_table(self, table: ProbabilityTable) -> float:
        total = 0j
        cache = {}
        for x, mask, weight in self.terms():
            if mask not in cache:
                cache[mask] = correlation_from_probabilities(table, mask)
            total += weight * cache[mask][x]
        return apply_form(self.form, total)


def cglmp_starred_functional() -> MaskedFunctional:
    """The rewriting that conjugates the cross term: same values, bound 3.

    Identical to the correlation form because the conjugated term's weight is
    the conjugate-rotated coefficient.
    """
    return MaskedFunctional(
        CGLMP_SCENARIO,
        (
            MaskedFunctionalTerm((0, 0), CGLMP_MASK, 1 - ALPHA),
            MaskedFunctionalTerm((1, 0), (2, 1), ALPHA**2 * (1 - ALPHA)),
            MaskedFunctionalTerm((1, 1), CGLMP_MASK, 1 - ALPHA),
            MaskedFunctionalTerm((0, 1), CGLMP_MASK, 1 - ALPHA**2),
        ),
        FunctionalForm.REAL_PART,
        cached_bound=3.0,
    )


def bell_numbers_identity_check(strategy: DeterministicStrategy) -> bool:
    """Exact product identity for root-of-unity value assignments.

    Two parties: e11 e21* e22 = e12.  Three parties: the starred triple
    product reproduces a1 b1* c1.  Verified in integer arithmetic mod 3.
    """
    scenario = strategy.scenario
    if scenario.outcomes != 3 or scenario.settings != 2:
        raise ValueError("the identity is defined for two-setting qutrit strategies")
    a = strategy.assignments
    if scenario.parties == 2:
        lhs = (a[0, 0] + a[1, 0]) - (a[0, 1] + a[1, 0]) + (a[0, 1] + a[1, 1])
        rhs = a[0, 0] + a[1, 1]
        return (lhs - rhs) % 3 == 0
    if scenario.parties == 3:
        lhs = (
            (a[0, 0] - a[1, 1] + a[2, 1])
            + (-a[0, 1] - a[1, 0] - a[2, 1])
            + (a[0, 1] + a[1, 1] + a[2, 0])
        )
        rhs = a[0, 0] - a[1, 0] + a[2, 0]
        return (lhs - rhs) % 3 == 0
    raise ValueError("the identity is defined for two or three parties")


def i323_functional() -> MaskedFunctional:
    """Three-party CGLMP generalization; a star conjugates that party's factor."""
    w1 = 1 - ALPHA
    return MaskedFunctional(
        I323_SCENARIO,
        (
            MaskedFunctionalTerm((0, 1, 1), (1, 2, 1), w1),
            MaskedFunctionalTerm((1, 0, 1), (2, 2, 2), ALPHA**2 * w1),
            MaskedFunctionalTerm((1, 1, 0), (1, 1, 1), w1),
            MaskedFunctionalTerm((0, 0, 0), (1, 2, 1), 1 - ALPHA**2),
        ),
        FunctionalForm.REAL_PART,
        cached_bound=3.0,
    )


def i323_value(target) -> float:
    """Evaluate the three-party functional on a strategy, setup, or table."""
    functional = i323_functional()
    if isinstance(target, DeterministicStrategy):
        return strategy_functional_value(functional, target)
    if isinstance(target, QuantumSetup):
        return quantum_functional_value(functional, target, path="born")
    if isinstance(target, ProbabilityTable):
        return functional.value_on_table(target)
    raise TypeError(f"cannot evaluate on {type(target).__name__}")


# Exponent tables for the tight three-party conjugate-basis family, 0-based,
# exposed in listing order as g1, g2, g3.
TIGHT_323_G_TABLES: dict[str, np.ndarray] = {
    "g1": np.array(
        [[[0, 0], [0, 0]], [[0, 1], [0, 0]]], dtype=np.int64
    ),  # delta(k,1) delta(l,0) delta(m,1)
    "g2": np.array(
        [[[0, 0], [1, 0]], [[2, 2], [2, 0]]], dtype=np.int64
    ),  # delta(k,0)d(l,1)d(m,0) + 2 d(k,1)d(l,0) + 2 d(k,1)d(l,1)d(m,0)
    "g3": np.array(
        [[[0, 0], [0, 0]], [[0, 0], [1, 1]]], dtype=np.int64
    ),  # delta(k,1) delta(l,1)
}


def three_party_tight_functional(g, pairing: Pairing = Pairing.BILINEAR) -> BellFunctional:
    """Conjugate-basis functional on three qutrits with two settings each."""
    if isinstance(g, str):
        g = TIGHT_323_G_TABLES[g]
    table = GTable(I323_SCENARIO, np.asarray(g, dtype=np.int64))
    return build_functional(
        I323_SCENARIO, k2_conjugate_basis(3), table, FunctionalForm.REAL_PART, pairing
    )


def three_party_tight_family(g, config: OptimizationConfig | None = None,
                             pairing: Pairing = Pairing.BILINEAR):
    """Build one family member, certify tightness, and maximize its violation."""
    functional = three_party_tight_functional(g, pairing)
    bound = classical_bound(functional)
    certified = BellFunctional(
        functional.scenario,
        functional.coefficients,
        functional.form,
        functional.mask,
        provenance=functional.provenance,
        cached_bound=bound.bound,
    )
    report = facet_check(certified)
    result = maximize_violation(certified, config, beta=bound.bound)
    return certified, report, result
