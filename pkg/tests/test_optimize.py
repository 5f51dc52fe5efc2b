import numpy as np
import pytest

from bellkit import (
    BellFunctional,
    FunctionalForm,
    GTable,
    OptimizationConfig,
    Pairing,
    Scenario,
    build_functional,
    classical_bound,
    fourier_party_basis,
    maximize_violation,
    maximize_with_fixed_state,
    product_g_functional,
    quantum_functional_value,
)
from bellkit.cglmp import cglmp_correlation_functional
from bellkit.optimize import ScanRow, _child_seed, g_orbit, scan_product_g, symmetric_g_tables


def chsh():
    sc = Scenario(2, 2, 2)
    return BellFunctional(
        sc, np.array([[1.0, 1.0], [1.0, -1.0]]), FunctionalForm.REAL_PART, cached_bound=2.0
    )


def test_chsh_reaches_tsirelson():
    result = maximize_violation(chsh(), OptimizationConfig(restarts=8, seed=1))
    assert result.quantum_value == pytest.approx(2 * np.sqrt(2), abs=1e-6)
    assert result.ratio == pytest.approx(np.sqrt(2), abs=1e-6)


def test_product_g_223_has_no_violation():
    for form in (FunctionalForm.REAL_PART, FunctionalForm.MODULUS):
        functional = product_g_functional(2, 3, form)
        result = maximize_violation(functional, OptimizationConfig(restarts=8, seed=2))
        assert result.ratio == pytest.approx(1.0, abs=1e-3)


def test_reported_value_reproducible_from_setup():
    functional = cglmp_correlation_functional()
    result = maximize_violation(functional, OptimizationConfig(restarts=8, seed=3))
    replayed = quantum_functional_value(functional, result.setup, path="born")
    assert abs(replayed - result.quantum_value) < 1e-9
    fast = quantum_functional_value(functional, result.setup, path="fast")
    assert abs(fast - result.quantum_value) < 1e-9
    # the qutrit correlation functional is violated up to about 1.436 * 3
    assert result.quantum_value > 3.0 + 0.1


def test_determinism_and_thread_independence():
    functional = cglmp_correlation_functional()
    base = OptimizationConfig(restarts=6, seed=11)
    first = maximize_violation(functional, base)
    second = maximize_violation(functional, base)
    threaded = maximize_violation(functional, OptimizationConfig(restarts=6, seed=11, threads=3))
    for other in (second, threaded):
        assert other.quantum_value == first.quantum_value
        assert other.restart_index == first.restart_index
        assert other.restart_values == first.restart_values
        assert np.array_equal(other.setup.amplitudes, first.setup.amplitudes)
        assert np.array_equal(other.setup.phases, first.setup.phases)


def test_restart_prefix_monotonicity():
    functional = cglmp_correlation_functional()
    small = maximize_violation(functional, OptimizationConfig(restarts=3, seed=5, polish=False))
    large = maximize_violation(functional, OptimizationConfig(restarts=6, seed=5, polish=False))
    assert large.restart_values[:3] == small.restart_values
    assert large.quantum_value >= small.quantum_value - 1e-12


def test_never_below_classical():
    for functional in (chsh(), cglmp_correlation_functional()):
        result = maximize_violation(functional, OptimizationConfig(restarts=6, seed=7))
        assert result.quantum_value >= result.classical_bound - 1e-6


def test_absent_ratio_for_zero_bound():
    sc = Scenario(1, 1, 2)
    functional = BellFunctional(sc, np.array([1j]), FunctionalForm.REAL_PART)
    assert classical_bound(functional).bound == pytest.approx(0.0, abs=1e-12)
    result = maximize_violation(functional, OptimizationConfig(restarts=3, seed=1))
    assert result.ratio is None
    assert result.quantum_value == pytest.approx(0.0, abs=1e-9)


def test_fixed_state_chsh():
    sc = Scenario(2, 2, 2)
    bell_state = np.array([[1.0, 0.0], [0.0, 1.0]]) / np.sqrt(2)
    result = maximize_with_fixed_state(chsh(), bell_state, OptimizationConfig(restarts=6, seed=9))
    assert result.quantum_value == pytest.approx(2 * np.sqrt(2), abs=1e-6)
    assert np.allclose(np.abs(result.setup.amplitudes), np.abs(bell_state) , atol=1e-12)


def test_symmetric_g_single_target():
    # the best-known real-part table on two qutrits with three settings
    sc = Scenario(2, 3, 3)
    g = GTable.from_function(sc, lambda x, y: int(x != 0) * int(y != 0))
    functional = build_functional(sc, fourier_party_basis(3), g, FunctionalForm.REAL_PART)
    beta = classical_bound(functional).bound
    result = maximize_violation(functional, OptimizationConfig(restarts=16, seed=13), beta=beta)
    assert result.ratio == pytest.approx(1.167, abs=0.006)


def test_g_orbit_members_share_classical_bounds():
    sc = Scenario(2, 3, 3)
    basis = fourier_party_basis(3)
    rng = np.random.default_rng(3)
    tables = symmetric_g_tables()
    for _ in range(6):
        table = tables[rng.integers(0, len(tables))]
        for form in (FunctionalForm.REAL_PART, FunctionalForm.MODULUS):
            orbit = g_orbit(table, form)
            bounds = set()
            for member in list(orbit)[:8]:
                g = GTable(sc, np.asarray(member).reshape(3, 3))
                functional = build_functional(sc, basis, g, form)
                bounds.add(round(classical_bound(functional).bound, 9))
            assert len(bounds) == 1, f"orbit of {table.ravel().tolist()} mixes bounds {bounds}"


def test_scan_handles_bad_rows_and_continues():
    rows = scan_product_g(
        [(2, 3, 3), (2, 2, 2)], OptimizationConfig(restarts=4, seed=1)
    )
    assert rows[0].error is not None
    assert rows[1].error is None
    assert rows[1].ratio_re == pytest.approx(np.sqrt(2), abs=1e-3)


def test_child_seed_stability():
    assert _child_seed(0, 1) == _child_seed(0, 1)
    assert _child_seed(0, 1) != _child_seed(0, 2)
