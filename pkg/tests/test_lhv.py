import numpy as np
import pytest

from bellkit import (
    BellFunctional,
    DeterministicStrategy,
    FunctionalForm,
    Scenario,
    point_mass_table,
    root_of_unity,
    strategy_correlation_tensor,
)
from bellkit.bases import evaluate_functional
from bellkit.core import ConjugationMask, CorrelationTensor
from bellkit.lhv import (
    BudgetExceededError,
    UnsupportedFormError,
    classical_bound,
    enumerate_strategies,
    facet_check,
    linearize_modulus,
    polytope_dimension,
    strategy_functional_value,
)


def chsh_functional():
    sc = Scenario(2, 2, 2)
    return BellFunctional(
        sc, np.array([[1.0, 1.0], [1.0, -1.0]]), FunctionalForm.REAL_PART
    )


def cglmp_coefficients():
    a = root_of_unity(3, 1)
    return np.array([[1 - a, 1 - a**2], [a - 1, 1 - a]])


def test_enumeration_counts_and_order():
    assert sum(1 for _ in enumerate_strategies(Scenario(2, 2, 2))) == 16
    assert sum(1 for _ in enumerate_strategies(Scenario(2, 2, 3))) == 81
    assert sum(1 for _ in enumerate_strategies(Scenario(5, 2, 3))) == 59049

    listed = list(enumerate_strategies(Scenario(2, 2, 3)))
    for i, s in enumerate(listed):
        assert s.flat_index() == i


def test_budget_guard():
    with pytest.raises(BudgetExceededError) as err:
        list(enumerate_strategies(Scenario(4, 4, 4), budget=1000))
    assert err.value.required == 4**16


def test_chsh_bound_is_two():
    result = classical_bound(chsh_functional())
    assert result.bound == pytest.approx(2.0, abs=1e-12)
    assert result.examined == 16
    for s in result.argmax:
        tensor = strategy_correlation_tensor(s, (1, 1))
        assert evaluate_functional(chsh_functional(), tensor) == pytest.approx(2.0, abs=1e-12)


def test_cglmp_bound_is_three_for_both_mask_conventions():
    sc = Scenario(2, 2, 3)
    for mask in [(1, 2), (1, 1)]:
        functional = BellFunctional(
            sc, cglmp_coefficients(), FunctionalForm.REAL_PART, ConjugationMask(mask, 3)
        )
        result = classical_bound(functional)
        assert result.bound == pytest.approx(3.0, abs=1e-10)
        assert result.examined == 81


def test_strategy_functional_value_matches_tensor_path():
    sc = Scenario(2, 2, 3)
    functional = BellFunctional(
        sc, cglmp_coefficients(), FunctionalForm.REAL_PART, ConjugationMask((1, 2), 3)
    )
    for s in enumerate_strategies(sc):
        direct = strategy_functional_value(functional, s)
        tensor = strategy_correlation_tensor(s, functional.mask)
        assert direct == pytest.approx(evaluate_functional(functional, tensor), abs=1e-12)


def test_classical_bound_chunking_and_threads_are_invisible():
    sc = Scenario(2, 2, 3)
    functional = BellFunctional(
        sc, cglmp_coefficients(), FunctionalForm.MODULUS, ConjugationMask((1, 2), 3)
    )
    baseline = classical_bound(functional)
    for kwargs in [dict(chunk=7), dict(chunk=13, threads=3)]:
        other = classical_bound(functional, **kwargs)
        assert other.bound == baseline.bound
        assert [s.flat_index() for s in other.argmax] == [
            s.flat_index() for s in baseline.argmax
        ]


def test_scale_covariance():
    functional = chsh_functional()
    scaled = functional.rescaled(2.5)
    r1 = classical_bound(functional)
    r2 = classical_bound(scaled)
    assert r2.bound == pytest.approx(2.5 * r1.bound, rel=1e-12)
    assert [s.flat_index() for s in r1.argmax] == [s.flat_index() for s in r2.argmax]


def test_vertex_optimality_random_mixtures():
    sc = Scenario(2, 2, 3)
    functional = BellFunctional(
        sc, cglmp_coefficients(), FunctionalForm.REAL_PART, ConjugationMask((1, 2), 3)
    )
    bound = classical_bound(functional).bound
    rng = np.random.default_rng(31)
    strategies = list(enumerate_strategies(sc))
    for _ in range(100):
        weights = rng.dirichlet(np.ones(6))
        picks = rng.choice(len(strategies), size=6, replace=False)
        mixed = sum(
            w * strategy_correlation_tensor(strategies[i], functional.mask).values
            for w, i in zip(weights, picks)
        )
        tensor = CorrelationTensor(sc, functional.mask, mixed)
        assert evaluate_functional(functional, tensor) <= bound + 1e-9


def test_enumeration_completeness_reconstructs_uniform():
    sc = Scenario(2, 2, 2)
    strategies = list(enumerate_strategies(sc))
    average = sum(point_mass_table(s).values for s in strategies) / len(strategies)
    assert np.allclose(average, 0.25, atol=1e-15)


def test_polytope_dimensions():
    assert polytope_dimension(Scenario(2, 2, 2), (1, 1)) == 4
    assert polytope_dimension(Scenario(1, 1, 2), (1,)) == 1
    # recorded, not asserted a priori: the two-setting qutrit polytope dimension
    d223 = polytope_dimension(Scenario(2, 2, 3), (1, 1))
    assert 4 <= d223 <= 8


def test_chsh_is_a_facet():
    report = facet_check(chsh_functional())
    assert report.is_facet
    assert report.is_valid
    assert report.polytope_dimension == 4
    assert report.saturating_rank == 3
    assert report.saturating_count >= report.polytope_dimension


def test_single_coefficient_functional_is_not_a_facet_for_qutrits():
    sc = Scenario(2, 2, 3)
    coeff = np.zeros((2, 2), dtype=complex)
    coeff[0, 0] = 1.0
    functional = BellFunctional(sc, coeff, FunctionalForm.REAL_PART, ConjugationMask((1, 1), 3))
    report = facet_check(functional)
    assert report.bound == pytest.approx(1.0, abs=1e-12)
    assert not report.is_facet
    assert report.saturating_rank < report.polytope_dimension - 1


def test_facet_check_refuses_modulus():
    sc = Scenario(2, 2, 2)
    functional = BellFunctional(sc, np.array([[1.0, 1.0], [1.0, -1.0]]), FunctionalForm.MODULUS)
    with pytest.raises(UnsupportedFormError):
        facet_check(functional)


def test_linearize_modulus():
    sc = Scenario(2, 2, 2)
    modulus = BellFunctional(sc, np.array([[1.0, 1.0], [1.0, -1.0]]), FunctionalForm.MODULUS)
    flat = linearize_modulus(modulus, 0.0)
    assert flat.form is FunctionalForm.REAL_PART

    tensor = CorrelationTensor(sc, ConjugationMask((1, 1), 2), np.array([[1.0, 1.0], [1.0, 1.0]]))
    # real, nonnegative pairing: the zero-phase slice already matches
    assert evaluate_functional(flat, tensor) == pytest.approx(
        evaluate_functional(modulus, tensor), abs=1e-12
    )

    sc3 = Scenario(2, 2, 3)
    functional = BellFunctional(
        sc3, cglmp_coefficients(), FunctionalForm.MODULUS, ConjugationMask((1, 2), 3)
    )
    rng = np.random.default_rng(5)
    raw = 0.5 * (rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2)))
    tensor = CorrelationTensor(sc3, ConjugationMask((1, 2), 3), raw)
    target = evaluate_functional(functional, tensor)
    sweep = max(
        evaluate_functional(linearize_modulus(functional, 2 * np.pi * j / 360), tensor)
        for j in range(360)
    )
    assert sweep <= target + 1e-12
    assert sweep == pytest.approx(target, abs=1e-4)

    # every slice's classical bound sits below the modulus bound
    modulus_bound = classical_bound(functional).bound
    for j in range(0, 360, 45):
        slice_bound = classical_bound(
            linearize_modulus(functional, 2 * np.pi * j / 360)
        ).bound
        assert slice_bound <= modulus_bound + 1e-9


def test_linearize_refuses_real_part():
    with pytest.raises(UnsupportedFormError):
        linearize_modulus(chsh_functional(), 0.0)


def test_facet_chunk_counts():
    # saturating count for CHSH: 8 of 16 strategies reach the bound
    result = classical_bound(chsh_functional())
    assert len(result.argmax) == 8
    assert result.witness.flat_index() == min(s.flat_index() for s in result.argmax)
