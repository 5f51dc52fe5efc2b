import itertools

import numpy as np
import pytest

from bellkit import (
    BellFunctional,
    DeterministicStrategy,
    FunctionalForm,
    GTable,
    Pairing,
    Scenario,
    build_functional,
    evaluate_functional,
    fourier_party_basis,
    k2_conjugate_basis,
    root_of_unity,
    settings_tuples,
    strategy_correlation_tensor,
    ww_coefficients,
    wwzb_nonlinear,
)
from bellkit.core import ConjugationMask, CorrelationTensor


def all_strategies(scenario):
    for index in range(scenario.n_strategies):
        yield DeterministicStrategy.from_flat_index(scenario, index)


def test_fourier_basis_d2():
    basis = fourier_party_basis(2)
    assert np.allclose(basis.vectors[0], np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(basis.vectors[1], np.array([1, -1]) / np.sqrt(2))


def test_fourier_basis_orthonormal_and_self_conjugate():
    for d in (2, 3, 5):
        basis = fourier_party_basis(d)
        gram = basis.vectors @ basis.vectors.conj().T
        assert np.allclose(gram, np.eye(d), atol=1e-12)
        assert np.allclose(basis.vectors[0], np.full(d, d**-0.5))
        # conjugating v_h lands on v_(-h mod d)
        for h in range(d):
            assert np.allclose(basis.vectors[h].conj(), basis.vectors[(-h) % d], atol=1e-14)


def test_fourier_parseval():
    rng = np.random.default_rng(5)
    for d in (2, 3, 4):
        basis = fourier_party_basis(d)
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        coeffs = basis.vectors.conj() @ u
        assert abs(np.sum(np.abs(coeffs) ** 2) - np.linalg.norm(u) ** 2) < 1e-12


def test_k2_conjugate_basis_duality():
    for d in (3, 4, 5, 7, 14):
        basis = k2_conjugate_basis(d)
        pairing = basis.deterministic @ basis.vectors.conj().T
        assert np.allclose(pairing, np.eye(2), atol=1e-12)
        alpha = root_of_unity(d, 1)
        assert np.allclose(basis.deterministic[0], [1, 1])
        assert np.allclose(basis.deterministic[1], [1, alpha ** (d - 1)])
    with pytest.raises(ValueError):
        k2_conjugate_basis(2)


def test_k2_deterministic_vectors_never_orthogonal():
    # bilinear products of root-of-unity pairs cannot vanish for d=3
    d = 3
    alpha = root_of_unity(d, 1)
    for h1, h2, g1, g2 in itertools.product(range(d), repeat=4):
        v = np.array([alpha**h1, alpha**h2])
        w = np.array([alpha**g1, alpha**g2])
        assert abs(np.dot(v, w)) > 1e-12


def test_chsh_coefficients_from_fourier_basis():
    sc = Scenario(2, 2, 2)
    g = GTable.from_function(sc, lambda l, n: l * n)
    functional = build_functional(sc, fourier_party_basis(2), g, FunctionalForm.REAL_PART)
    expected = np.array([[1.0, 1.0], [1.0, -1.0]])
    assert np.allclose(functional.coefficients, expected, atol=1e-14)
    pr_box = CorrelationTensor(sc, ConjugationMask((1, 1), 2), expected)
    assert abs(evaluate_functional(functional, pr_box) - 4.0) < 1e-12


def test_cglmp_coefficients_from_conjugate_basis():
    # The correlation-form CGLMP coefficients arise from the dual basis with
    # exponents {(0,0):0,(0,1):1,(1,0):0,(1,1):2} under bilinear pairing; the
    # opposite index orientation gives the party-swapped functional.
    sc = Scenario(2, 2, 3)
    a = root_of_unity(3, 1)
    target = {(0, 0): 1 - a, (0, 1): 1 - a**2, (1, 0): a - 1, (1, 1): 1 - a}
    g = GTable(sc, np.array([[0, 1], [0, 2]]))
    functional = build_functional(sc, k2_conjugate_basis(3), g, FunctionalForm.REAL_PART)
    for x, value in target.items():
        assert abs(3 * functional.coefficients[x] - value) < 1e-12

    swapped = GTable(sc, np.array([[0, 0], [1, 2]]))
    party_swapped = build_functional(sc, k2_conjugate_basis(3), swapped, FunctionalForm.REAL_PART)
    for (x1, x2), value in target.items():
        assert abs(3 * party_swapped.coefficients[(x2, x1)] - value) < 1e-12


def test_constant_g_factorizes():
    sc = Scenario(2, 3, 3)
    g = GTable(sc, np.zeros((3, 3), dtype=int))
    functional = build_functional(sc, fourier_party_basis(3), g, FunctionalForm.REAL_PART)
    # rank-one coefficient tensor
    mat = functional.coefficients.reshape(3, 3)
    assert np.linalg.matrix_rank(mat, tol=1e-10) == 1


def test_ww_coefficients_examples():
    q = ww_coefficients({(0,): 1, (1,): 1})
    assert np.allclose(q, [1.0, 0.0])

    f = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}
    q = ww_coefficients(f)
    assert np.allclose(q, np.array([[1, 1], [1, -1]]) / 2)

    # brute-force oracle over the r-tuples
    for x in itertools.product(range(2), repeat=2):
        expected = sum(
            f[r] * (-1) ** (r[0] * x[0] + r[1] * x[1]) for r in itertools.product(range(2), repeat=2)
        ) / 4
        assert abs(q[x] - expected) < 1e-15

    assert len(list(itertools.product([1, -1], repeat=4))) == 16


def test_ww_requires_sign_values():
    with pytest.raises(ValueError):
        ww_coefficients({(0,): 1, (1,): 0})


def test_ww_reconstruction_from_fourier_basis():
    # f(r) = (-1)^g(r) turns the basis construction into the q family, up to
    # the positive scale 2^(N/2), for every choice of g and N <= 3.
    for n in (1, 2, 3):
        sc = Scenario(n, 2, 2)
        for bits in itertools.product(range(2), repeat=2**n):
            g_arr = np.array(bits, dtype=int).reshape((2,) * n)
            g = GTable(sc, g_arr)
            functional = build_functional(sc, fourier_party_basis(2), g, FunctionalForm.REAL_PART)
            q = ww_coefficients((-1.0) ** g_arr)
            assert np.allclose(functional.coefficients, 2 ** (n / 2) * q, atol=1e-12)


def test_wwzb_nonlinear_values():
    sc = Scenario(2, 2, 2)
    basis = fourier_party_basis(2)
    ones = strategy_correlation_tensor(
        DeterministicStrategy(sc, np.zeros((2, 2), dtype=int)), (1, 1)
    )
    assert abs(wwzb_nonlinear(ones, basis) - 2.0) < 1e-12

    values = [
        wwzb_nonlinear(strategy_correlation_tensor(s, (1, 1)), basis) for s in all_strategies(sc)
    ]
    assert max(values) <= 2 + 1e-12
    assert abs(max(values) - 2.0) < 1e-12

    zero = CorrelationTensor(sc, ConjugationMask((1, 1), 2), np.zeros((2, 2)))
    assert wwzb_nonlinear(zero, basis) == 0.0


def test_wwzb_dominates_every_linearization():
    sc = Scenario(2, 2, 2)
    basis = fourier_party_basis(2)
    rng = np.random.default_rng(19)
    for _ in range(50):
        tensor = CorrelationTensor(
            sc, ConjugationMask((1, 1), 2), rng.uniform(-1, 1, size=(2, 2))
        )
        envelope = wwzb_nonlinear(tensor, basis)
        for bits in itertools.product(range(2), repeat=4):
            g = GTable(sc, np.array(bits).reshape(2, 2))
            functional = build_functional(sc, basis, g, FunctionalForm.MODULUS)
            assert evaluate_functional(functional, tensor) <= envelope + 1e-9


def test_wwzb_dominates_linearizations_for_qutrits():
    sc = Scenario(2, 3, 3)
    basis = fourier_party_basis(3)
    rng = np.random.default_rng(29)
    for _ in range(10):
        raw = 0.5 * (rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)))
        tensor = CorrelationTensor(sc, ConjugationMask((1, 1), 3), raw)
        envelope = wwzb_nonlinear(tensor, basis)
        for _ in range(20):
            g = GTable(sc, rng.integers(0, 3, size=(3, 3)))
            functional = build_functional(sc, basis, g, FunctionalForm.MODULUS)
            assert evaluate_functional(functional, tensor) <= envelope + 1e-9


def test_modulus_gauge_invariance():
    sc = Scenario(2, 3, 3)
    basis = fourier_party_basis(3)
    rng = np.random.default_rng(23)
    g_arr = rng.integers(0, 3, size=(3, 3))
    tensor = CorrelationTensor(
        sc,
        ConjugationMask((1, 1), 3),
        0.5 * (rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))),
    )
    base = evaluate_functional(
        build_functional(sc, basis, GTable(sc, g_arr), FunctionalForm.MODULUS), tensor
    )
    for shift in (1, 2):
        shifted = evaluate_functional(
            build_functional(sc, basis, GTable(sc, g_arr).shifted(shift), FunctionalForm.MODULUS),
            tensor,
        )
        assert abs(base - shifted) < 1e-12


def test_evaluate_functional_checks_masks_and_scenario():
    sc = Scenario(2, 2, 3)
    g = GTable(sc, np.zeros((2, 2), dtype=int))
    functional = build_functional(sc, k2_conjugate_basis(3), g, FunctionalForm.REAL_PART)
    tensor = CorrelationTensor(sc, ConjugationMask((1, 2), 3), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        evaluate_functional(functional, tensor)
    zero = CorrelationTensor(sc, ConjugationMask((1, 1), 3), np.zeros((2, 2)))
    modulus = build_functional(sc, k2_conjugate_basis(3), g, FunctionalForm.MODULUS)
    assert evaluate_functional(modulus, zero) == 0.0


def test_gtable_validation():
    sc = Scenario(2, 2, 3)
    with pytest.raises(ValueError):
        GTable(sc, np.array([[0, 3], [0, 0]]))
    with pytest.raises(ValueError):
        GTable(sc, np.zeros((3, 3), dtype=int))


def test_functional_requires_nonzero_coefficients():
    sc = Scenario(2, 2, 2)
    with pytest.raises(ValueError):
        BellFunctional(sc, np.zeros((2, 2)), FunctionalForm.REAL_PART)
