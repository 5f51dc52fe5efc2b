import numpy as np
import pytest

from bellkit import (
    DeterministicStrategy,
    FunctionalForm,
    Pairing,
    Scenario,
    build_functional,
    classical_bound,
    enumerate_strategies,
    k2_conjugate_basis,
    point_mass_table,
    root_of_unity,
    strategy_correlation_tensor,
)
from bellkit.core import ProbabilityTable
from bellkit.lhv import strategy_functional_value
from bellkit.cglmp import (
    CGLMP_SCENARIO,
    I323_SCENARIO,
    PROBABILITY_TO_CORRELATION_SCALE,
    CglmpTerms,
    MaskedFunctional,
    MaskedFunctionalTerm,
    bell_numbers_identity_check,
    cglmp_conjugate_expansion_g,
    cglmp_correlation_functional,
    cglmp_correlation_value,
    cglmp_probability_value,
    cglmp_starred_functional,
    correlation_from_equality_probs,
    equality_probs_from_correlation,
    i323_functional,
    i323_value,
    three_party_tight_functional,
)
from bellkit.multiport import QuantumSetup
from bellkit.optimize import quantum_functional_value

ALPHA = root_of_unity(3, 1)


def zero_strategy(scenario):
    return DeterministicStrategy(
        scenario, np.zeros((scenario.parties, scenario.settings), dtype=int)
    )


def random_setup(scenario, rng):
    n, k, d = scenario.parties, scenario.settings, scenario.outcomes
    amps = rng.normal(size=(d,) * n) + 1j * rng.normal(size=(d,) * n)
    phases = rng.uniform(0, 2 * np.pi, size=(n, k, d))
    return QuantumSetup.normalized(scenario, amps, phases)


def test_probability_form_examples():
    assert cglmp_probability_value(point_mass_table(zero_strategy(CGLMP_SCENARIO))) == 2.0
    uniform = ProbabilityTable(CGLMP_SCENARIO, np.full((3, 3, 2, 2), 1 / 9))
    assert cglmp_probability_value(uniform) == pytest.approx(0.0, abs=1e-15)
    best = max(
        cglmp_probability_value(point_mass_table(s))
        for s in enumerate_strategies(CGLMP_SCENARIO)
    )
    assert best == pytest.approx(2.0, abs=1e-12)


def test_probability_form_wrong_scenario():
    table = ProbabilityTable(Scenario(2, 2, 2), np.full((2, 2, 2, 2), 1 / 4))
    with pytest.raises(ValueError):
        cglmp_probability_value(table)


def test_correlation_conversion_roundtrip():
    assert correlation_from_equality_probs(1.0, 0.0, 0.0) == pytest.approx(1.0)
    assert correlation_from_equality_probs(0.0, 1.0, 0.0) == pytest.approx(ALPHA)
    rng = np.random.default_rng(7)
    for _ in range(50):
        probs = rng.dirichlet(np.ones(3))
        value = correlation_from_equality_probs(*probs)
        back = equality_probs_from_correlation(value)
        assert np.allclose(back, probs, atol=1e-12)


def test_correlation_form_examples():
    tensor = strategy_correlation_tensor(zero_strategy(CGLMP_SCENARIO), (1, 2))
    assert cglmp_correlation_value(tensor) == pytest.approx(3.0, abs=1e-12)
    functional = cglmp_correlation_functional()
    assert classical_bound(functional).bound == pytest.approx(3.0, abs=1e-10)


def test_conjugate_basis_expansion_matches_correlation_form():
    functional = build_functional(
        CGLMP_SCENARIO,
        k2_conjugate_basis(3),
        cglmp_conjugate_expansion_g(),
        FunctionalForm.REAL_PART,
        Pairing.BILINEAR,
    )
    assert np.allclose(
        3 * functional.coefficients, cglmp_correlation_functional().coefficients, atol=1e-12
    )


def test_probability_correlation_affine_relation_exhaustive():
    for s in enumerate_strategies(CGLMP_SCENARIO):
        prob = cglmp_probability_value(point_mass_table(s))
        corr = cglmp_correlation_value(strategy_correlation_tensor(s, (1, 2)))
        assert prob == pytest.approx(PROBABILITY_TO_CORRELATION_SCALE * corr, abs=1e-12)


def test_starred_rewriting_matches_plain_form():
    plain = cglmp_correlation_functional()
    starred = cglmp_starred_functional()
    for s in enumerate_strategies(CGLMP_SCENARIO):
        assert strategy_functional_value(starred, s) == pytest.approx(
            strategy_functional_value(plain, s), abs=1e-10
        )
    rng = np.random.default_rng(3)
    for _ in range(10):
        setup = random_setup(CGLMP_SCENARIO, rng)
        assert quantum_functional_value(starred, setup) == pytest.approx(
            quantum_functional_value(plain, setup), abs=1e-10
        )


def test_bell_numbers_identities_exhaustive():
    assert all(bell_numbers_identity_check(s) for s in enumerate_strategies(CGLMP_SCENARIO))
    assert all(bell_numbers_identity_check(s) for s in enumerate_strategies(I323_SCENARIO))


def test_bell_numbers_identity_needs_the_conjugation():
    # without conjugating the cross term, the product identity fails somewhere
    def naive_identity(s):
        a = s.assignments
        lhs = (a[0, 0] + a[1, 0]) + (a[0, 1] + a[1, 0]) + (a[0, 1] + a[1, 1])
        rhs = a[0, 0] + a[1, 1]
        return (lhs - rhs) % 3 == 0

    assert not all(naive_identity(s) for s in enumerate_strategies(CGLMP_SCENARIO))


def test_i323_bound_and_dispatch():
    functional = i323_functional()
    result = classical_bound(functional)
    assert result.bound == pytest.approx(3.0, abs=1e-10)
    assert result.examined == 729

    strategy = zero_strategy(I323_SCENARIO)
    assert i323_value(strategy) == pytest.approx(3.0, abs=1e-12)
    assert i323_value(point_mass_table(strategy)) == pytest.approx(3.0, abs=1e-12)
    rng = np.random.default_rng(5)
    setup = random_setup(I323_SCENARIO, rng)
    born = i323_value(setup)
    assert born == pytest.approx(quantum_functional_value(functional, setup), abs=1e-12)
    with pytest.raises(TypeError):
        i323_value(42)


def test_masked_functional_validation():
    with pytest.raises(ValueError):
        MaskedFunctional(I323_SCENARIO, ())
    with pytest.raises(ValueError):
        MaskedFunctional(
            I323_SCENARIO,
            (MaskedFunctionalTerm((0, 0), (1, 1), 1.0),),
        )
    with pytest.raises(ValueError):
        MaskedFunctional(
            I323_SCENARIO,
            (MaskedFunctionalTerm((0, 0, 5), (1, 1, 1), 1.0),),
        )


def test_cglmp_terms_fields():
    terms = CglmpTerms.from_table(point_mass_table(zero_strategy(CGLMP_SCENARIO)))
    assert terms.p_equal_11 == 1.0
    assert terms.p_minus_21 == 0.0
    assert terms.p_equal_21 == 1.0
    assert terms.value() == 2.0


def test_tight_family_functionals_build():
    for name in ("g1", "g2", "g3"):
        functional = three_party_tight_functional(name)
        assert functional.coefficients.shape == (2, 2, 2)
        assert np.abs(functional.coefficients).max() > 0.1
        assert functional.form is FunctionalForm.REAL_PART
