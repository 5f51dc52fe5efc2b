"""Core Bell-scenario types and correlation-function algebra.

Outcomes are valued on the d-th roots of unity alpha_d^a.  A correlation
tensor collects, for every joint choice of measurement settings, one Fourier
component of the outcome distribution; which component is selected per party
is recorded in a conjugation mask.  All tensors are flattened lexicographically
with party 0 slowest; settings and outcomes are 0-based throughout.

Every type here is immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "Scenario",
    "RootOfUnity",
    "unit_roots",
    "ConjugationMask",
    "ProbabilityTable",
    "CorrelationTensor",
    "DeterministicStrategy",
    "root_of_unity",
    "settings_tuples",
    "outcome_tuples",
    "correlation_from_probabilities",
    "strategy_value",
    "strategy_correlation_tensor",
    "point_mass_table",
]

# Probabilities this far below zero are treated as round-off and clamped.
NEGATIVITY_CLAMP = 1e-15
# Larger negativity means the input is not a probability table.
NEGATIVITY_ERROR = 1e-12


@dataclass(frozen=True)
class Scenario:
    """A Bell scenario: N parties, k settings per party, d outcomes per measurement."""

    parties: int
    settings: int
    outcomes: int

    def __post_init__(self):
        if self.parties < 1:
            raise ValueError(f"need at least one party, got {self.parties}")
        if self.settings < 1:
            raise ValueError(f"need at least one setting, got {self.settings}")
        if self.outcomes < 2:
            raise ValueError(f"need at least two outcomes, got {self.outcomes}")

    @property
    def n_setting_tuples(self) -> int:
        return self.settings**self.parties

    @property
    def n_outcome_tuples(self) -> int:
        return self.outcomes**self.parties

    @property
    def n_strategies(self) -> int:
        return self.outcomes ** (self.parties * self.settings)

    @property
    def alpha(self) -> complex:
        """Primitive d-th root of unity."""
        return np.exp(2j * np.pi / self.outcomes)

    def settings_shape(self) -> tuple[int, ...]:
        return (self.settings,) * self.parties

    def outcomes_shape(self) -> tuple[int, ...]:
        return (self.outcomes,) * self.parties


from functools import lru_cache


@lru_cache(maxsize=None)
def unit_roots(order: int) -> np.ndarray:
    """The `order` roots of unity with exact +-1, +-i, 0 components.

    exp() puts round-off on the axis-aligned roots (e.g. exp(i*pi) has a
    1e-16 imaginary part); snapping keeps two-outcome arithmetic exact.
    """
    roots = np.exp(2j * np.pi * np.arange(order) / order)
    real, imag = roots.real.copy(), roots.imag.copy()
    for target in (-1.0, 0.0, 1.0):
        real[np.abs(real - target) < 1e-15] = target
        imag[np.abs(imag - target) < 1e-15] = target
    snapped = real + 1j * imag
    snapped.setflags(write=False)
    return snapped


def root_of_unity(order: int, exponent: int) -> complex:
    """alpha_order^exponent, reduced mod order."""
    return complex(unit_roots(order)[exponent % order])


@dataclass(frozen=True)
class RootOfUnity:
    """A d-th root of unity alpha_d^h."""

    order: int
    exponent: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "exponent", self.exponent % self.order)

    @property
    def value(self) -> complex:
        return root_of_unity(self.order, self.exponent)


@dataclass(frozen=True)
class ConjugationMask:
    """Per-party Fourier exponents: party p contributes alpha^(r_p * a_p).

    An entry of 1 is the plain assignment, d-1 the conjugated one; 0 drops
    the party from the correlation altogether.
    """

    entries: tuple[int, ...]
    order: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(r) for r in self.entries))
        if any(not 0 <= r < self.order for r in self.entries):
            raise ValueError(f"mask entries must lie in [0, {self.order}), got {self.entries}")

    @classmethod
    def all_ones(cls, scenario: Scenario) -> "ConjugationMask":
        return cls((1,) * scenario.parties, scenario.outcomes)

    @classmethod
    def all_zeros(cls, scenario: Scenario) -> "ConjugationMask":
        return cls((0,) * scenario.parties, scenario.outcomes)

    def conjugated(self) -> "ConjugationMask":
        """Componentwise r -> (d - r) mod d; maps E to its complex conjugate."""
        return ConjugationMask(tuple((self.order - r) % self.order for r in self.entries), self.order)

    def __len__(self) -> int:
        return len(self.entries)


def as_mask(scenario: Scenario, mask) -> ConjugationMask:
    """Coerce a tuple/list/None into a validated mask for the scenario."""
    if mask is None:
        return ConjugationMask.all_ones(scenario)
    if not isinstance(mask, ConjugationMask):
        mask = ConjugationMask(tuple(mask), scenario.outcomes)
    if len(mask) != scenario.parties:
        raise ValueError(f"mask has {len(mask)} entries for {scenario.parties} parties")
    if mask.order != scenario.outcomes:
        raise ValueError(f"mask order {mask.order} does not match d={scenario.outcomes}")
    return mask


def settings_tuples(scenario: Scenario) -> list[tuple[int, ...]]:
    """All joint settings in lexicographic order, party 0 slowest.

    This order is the canonical flattening of every tensor in the package.
    """
    return list(itertools.product(range(scenario.settings), repeat=scenario.parties))


def outcome_tuples(scenario: Scenario) -> list[tuple[int, ...]]:
    """All joint outcomes in lexicographic order, party 0 slowest."""
    return list(itertools.product(range(scenario.outcomes), repeat=scenario.parties))


@dataclass(frozen=True)
class ProbabilityTable:
    """p(a|x) indexed by outcome tuple then settings tuple.

    values has shape (d,)*N + (k,)*N.  Each settings slice must be normalized
    within 1e-12; negative round-off down to -1e-15 is clamped to zero.
    """

    scenario: Scenario
    values: np.ndarray

    def __post_init__(self):
        n, k, d = self.scenario.parties, self.scenario.settings, self.scenario.outcomes
        arr = np.asarray(self.values, dtype=float)
        expected = (d,) * n + (k,) * n
        if arr.shape != expected:
            raise ValueError(f"expected shape {expected}, got {arr.shape}")
        if arr.min() < -NEGATIVITY_ERROR:
            raise ValueError(f"probability {arr.min():.3e} is too negative to be round-off")
        arr = np.where(arr < 0, 0.0, arr)
        totals = arr.sum(axis=tuple(range(n)))
        if not np.allclose(totals, 1.0, atol=1e-12, rtol=0.0):
            worst = np.abs(totals - 1.0).max()
            raise ValueError(f"settings slices must sum to 1 (worst deviation {worst:.3e})")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def slice_for(self, x: tuple[int, ...]) -> np.ndarray:
        """The outcome distribution p(.|x), shape (d,)*N."""
        n = self.scenario.parties
        index = (slice(None),) * n + tuple(x)
        return self.values[index]


@dataclass(frozen=True)
class CorrelationTensor:
    """One Fourier component E_x of the outcome distribution, per settings tuple."""

    scenario: Scenario
    mask: ConjugationMask
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", as_mask(self.scenario, self.mask))
        arr = np.asarray(self.values, dtype=complex)
        if arr.shape != self.scenario.settings_shape():
            raise ValueError(f"expected shape {self.scenario.settings_shape()}, got {arr.shape}")
        if np.abs(arr).max() > 1 + 1e-12:
            raise ValueError(f"|E| = {np.abs(arr).max():.15f} exceeds 1; not a correlation")
        if self.scenario.outcomes == 2 and all(r == 1 for r in self.mask.entries):
            if np.abs(arr.imag).max() > 1e-12:
                raise ValueError("two-outcome correlations with the plain mask must be real")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __getitem__(self, x: tuple[int, ...]) -> complex:
        return complex(self.values[tuple(x)])

    def conjugated(self) -> "CorrelationTensor":
        return CorrelationTensor(self.scenario, self.mask.conjugated(), self.values.conj())


@dataclass(frozen=True)
class DeterministicStrategy:
    """A fixed outcome for every (party, setting) pair; a vertex generator of the LHV polytope."""

    scenario: Scenario
    assignments: np.ndarray  # shape (N, k), entries in [0, d)

    def __post_init__(self):
        arr = np.asarray(self.assignments, dtype=np.int64)
        n, k, d = self.scenario.parties, self.scenario.settings, self.scenario.outcomes
        if arr.shape != (n, k):
            raise ValueError(f"expected shape {(n, k)}, got {arr.shape}")
        if arr.min() < 0 or arr.max() >= d:
            raise ValueError(f"outcomes must lie in [0, {d})")
        arr.setflags(write=False)
        object.__setattr__(self, "assignments", arr)

    def outcome(self, party: int, setting: int) -> int:
        return int(self.assignments[party, setting])

    def flat_index(self) -> int:
        """Position in the lexicographic enumeration (party 0, setting 0 most significant)."""
        d = self.scenario.outcomes
        index = 0
        for digit in self.assignments.ravel():
            index = index * d + int(digit)
        return index

    @classmethod
    def from_flat_index(cls, scenario: Scenario, index: int) -> "DeterministicStrategy":
        n, k, d = scenario.parties, scenario.settings, scenario.outcomes
        digits = np.empty(n * k, dtype=np.int64)
        for pos in range(n * k - 1, -1, -1):
            index, digits[pos] = divmod(index, d)
        return cls(scenario, digits.reshape(n, k))


def _mask_weight_tensor(scenario: Scenario, mask: ConjugationMask) -> np.ndarray:
    """W[a] = alpha^(sum_p r_p a_p), shape (d,)*N."""
    d = scenario.outcomes
    outcomes = np.arange(d)
    factors = [unit_roots(d)[(r * outcomes) % d] for r in mask.entries]
    return reduce(np.multiply.outer, factors)


def correlation_from_probabilities(table: ProbabilityTable, mask) -> CorrelationTensor:
    """E_x = sum_a alpha^(mask . a) p(a|x) for every settings tuple x."""
    scenario = table.scenario
    mask = as_mask(scenario, mask)
    weights = _mask_weight_tensor(scenario, mask)
    n = scenario.parties
    values = np.tensordot(weights, table.values, axes=(tuple(range(n)), tuple(range(n))))
    return CorrelationTensor(scenario, mask, values)


def strategy_value(strategy: DeterministicStrategy, x: tuple[int, ...], mask) -> complex:
    """The d-th root of unity alpha^(sum_p r_p a_p(x_p)) this strategy assigns to settings x."""
    scenario = strategy.scenario
    mask = as_mask(scenario, mask)
    d = scenario.outcomes
    exponent = sum(r * strategy.outcome(p, xp) for p, (r, xp) in enumerate(zip(mask.entries, x)))
    return root_of_unity(d, exponent)


def strategy_correlation_tensor(strategy: DeterministicStrategy, mask) -> CorrelationTensor:
    """The correlation tensor of a deterministic strategy; every entry has unit modulus."""
    scenario = strategy.scenario
    mask = as_mask(scenario, mask)
    d = scenario.outcomes
    factors = [
        unit_roots(d)[(r * strategy.assignments[p]) % d]
        for p, r in enumerate(mask.entries)
    ]
    return CorrelationTensor(scenario, mask, reduce(np.multiply.outer, factors))


def point_mass_table(strategy: DeterministicStrategy) -> ProbabilityTable:
    """The probability table that plays the strategy with certainty."""
    scenario = strategy.scenario
    n, k, d = scenario.parties, scenario.settings, scenario.outcomes
    values = np.zeros((d,) * n + (k,) * n)
    for x in settings_tuples(scenario):
        a = tuple(strategy.outcome(p, xp) for p, xp in enumerate(x))
        values[a + x] = 1.0
    return ProbabilityTable(scenario, values)
