"""Maximize quantum values of Bell functionals over multiport setups.

For fixed phase-shifter settings the pairing sum_x c_x E_x is a quadratic form
s* G(phi) s in the input state, so the best state for given phases is the top
eigenvector of the Hermitian part of G (rotated by exp(i*theta) for modulus
forms, whose optimum over theta is the numerical radius).  Each restart runs a
monotone alternating ascent: with the state held fixed, every free phase has a
sinusoidal objective and is maximized exactly from three probes; the state is
then refreshed by an eigensolve.  An optional central finite-difference
quasi-Newton polish tightens the best restart.

Every reported quantum value is re-evaluated through the Born-rule path on the
returned setup, so results are reproducible from the setup alone.  Fixed seeds
give identical results regardless of thread count: restarts draw from disjoint
rows of one Sobol stream and the reduction breaks ties by restart index.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize as sciopt
from scipy.stats import qmc

from .core import Scenario, correlation_from_probabilities
from .bases import (
    BellFunctional,
    FunctionalForm,
    GTable,
    Pairing,
    apply_form,
    build_functional,
    fourier_party_basis,
    k2_conjugate_basis,
)
from .lhv import classical_bound
from .multiport import QuantumSetup, probability_table, quantum_correlation_tensor

__all__ = [
    "OptimizationConfig",
    "OptResult",
    "ScanRow",
    "SymmetricSearchResult",
    "quantum_functional_value",
    "maximize_violation",
    "maximize_with_fixed_state",
    "maximize_restricted_ghz",
    "product_g_functional",
    "scan_product_g",
    "symmetric_g_search",
    "symmetric_g_tables",
    "g_orbit",
]

BETA_CUTOFF = 1e-9  # below this the ratio R is reported as absent


@dataclass(frozen=True)
class OptimizationConfig:
    """Search budget and reproducibility knobs.

    The search space is the free port phases (ports 1..d-1 of every party and
    setting; port 0 is gauge-fixed) plus one rotation angle for modulus forms;
    the state itself is resolved exactly per iteration by an eigensolve.
    max_iterations caps the alternating sweeps of a single restart.
    """

    restarts: int = 200
    max_iterations: int = 2000
    tolerance: float = 1e-8
    seed: int = 0
    threads: int = 1
    polish: bool = True
    polish_iterations: int = 60
    polish_step: float = 1e-5

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class OptResult:
    """Best quantum value found, with the setup that realizes it."""

    quantum_value: float
    classical_bound: float
    ratio: float | None
    setup: QuantumSetup
    restart_index: int
    iterations: int
    restart_values: tuple[float, ...]


def quantum_functional_value(functional, setup: QuantumSetup, path: str = "born") -> float:
    """Evaluate a functional on a multiport setup.

    path="born" goes through output probabilities (the authoritative route);
    path="fast" uses the shift-product correlations.
    """
    scenario = functional.scenario
    if setup.scenario != scenario:
        raise ValueError("setup belongs to a different scenario")
    masks = {}
    if path == "born":
        table = probability_table(setup)
        getter = lambda mask: correlation_from_probabilities(table, mask)
    elif path == "fast":
        getter = lambda mask: quantum_correlation_tensor(setup, mask)
    else:
        raise ValueError(f"unknown path {path!r}")
    total = 0j
    for x, mask_entries, weight in functional.terms():
        if mask_entries not in masks:
            masks[mask_entries] = getter(mask_entries)
        total += weight * masks[mask_entries][x]
    return apply_form(functional.form, total)


class _MultiportObjective:
    """Pairing totals, G(phi) assembly, and eigen-resolved states for one functional."""

    def __init__(self, functional, subspace: np.ndarray | None = None,
                 fixed_state: np.ndarray | None = None):
        self.functional = functional
        scenario: Scenario = functional.scenario
        self.scenario = scenario
        n, k, d = scenario.parties, scenario.settings, scenario.outcomes
        self.dim = d**n
        terms = functional.terms()
        self.xs = np.array([t[0] for t in terms], dtype=np.int64)          # (T, n)
        self.rs = np.array([t[1] for t in terms], dtype=np.int64)          # (T, n)
        self.weights = np.array([t[2] for t in terms], dtype=complex)      # (T,)
        grid = np.indices((d,) * n).reshape(n, self.dim)
        self.cols = np.arange(self.dim)
        # rows[t, j] = flat index of (j + r_t) mod d
        shifted = (grid[None, :, :] + self.rs[:, :, None]) % d
        self.rows = np.array(
            [np.ravel_multi_index(shifted[t], (d,) * n) for t in range(len(terms))]
        )
        # port index matrix for rolling each term's phase row by its mask entry
        ports = np.arange(d)
        self.roll_idx = (ports[None, None, :] + self.rs[:, :, None]) % d   # (T, n, d)
        self.subspace = subspace
        self.fixed_state = None if fixed_state is None else fixed_state.ravel()
        self.is_modulus = functional.form is FunctionalForm.MODULUS
        self.needs_theta = self.is_modulus and self.fixed_state is None
        self.n_phases = n * k * (d - 1)
        self.n_params = self.n_phases + (1 if self.needs_theta else 0)

    # -- parameter packing -------------------------------------------------
    def unpack(self, params: np.ndarray) -> tuple[np.ndarray, float]:
        n, k, d = self.scenario.parties, self.scenario.settings, self.scenario.outcomes
        phases = np.zeros((n, k, d))
        phases[:, :, 1:] = np.asarray(params)[: self.n_phases].reshape(n, k, d - 1)
        theta = float(params[self.n_phases]) if self.needs_theta else 0.0
        return phases, theta

    def pack(self, phases: np.ndarray, theta: float) -> np.ndarray:
        parts = [phases[:, :, 1:].ravel()]
        if self.needs_theta:
            parts.append([theta])
        return np.concatenate(parts) if self.needs_theta else parts[0]

    # -- core algebra -------------------------------------------------------
    def phase_factors(self, phases: np.ndarray) -> np.ndarray:
        """u[t, p, j] = exp(i(phi[p][x_t_p][j] - phi[p][x_t_p][j + r_t_p]))."""
        n = self.scenario.parties
        rows = np.empty((len(self.xs), n, self.scenario.outcomes))
        for p in range(n):
            chosen = phases[p, self.xs[:, p], :]                   # (T, d)
            rolled = np.take_along_axis(chosen, self.roll_idx[:, p, :], axis=1)
            rows[:, p, :] = chosen - rolled
        return np.exp(1j * rows)

    def state_products(self, state: np.ndarray) -> np.ndarray:
        """B[t, j] = s_j * conj(s_(j + r_t)), stacked over terms."""
        flat = state.ravel()
        return flat[None, :] * flat.conj()[self.rows]

    def pair_total(self, phases: np.ndarray, products: np.ndarray) -> complex:
        """sum_t w_t sum_j u_t(j) B_t(j), contracted party by party."""
        n, d = self.scenario.parties, self.scenario.outcomes
        u = self.phase_factors(phases)
        z = products.reshape((len(self.xs),) + (d,) * n)
        for p in range(n):
            z = (z * u[:, p][(...,) + (None,) * (n - 1 - p)]).sum(axis=1)
        return complex(self.weights @ z)

    def g_matrix(self, phases: np.ndarray) -> np.ndarray:
        u = self.phase_factors(phases)
        n = self.scenario.parties
        g = np.zeros((self.dim, self.dim), dtype=complex)
        for t in range(len(self.xs)):
            factor = u[t, 0]
            for p in range(1, n):
                factor = np.multiply.outer(factor, u[t, p])
            g[self.rows[t], self.cols] += self.weights[t] * factor.ravel()
        return g

    # -- eigen-resolved objective -------------------------------------------
    def _hermitian(self, g: np.ndarray, theta: float) -> np.ndarray:
        rotated = g * np.exp(1j * theta) if self.is_modulus else g
        h = 0.5 * (rotated + rotated.conj().T)
        if self.subspace is not None:
            h = self.subspace.conj().T @ h @ self.subspace
        return h

    def value(self, params: np.ndarray) -> float:
        phases, theta = self.unpack(params)
        if self.fixed_state is not None:
            total = self.pair_total(phases, self.state_products(self.fixed_state))
            return apply_form(self.functional.form, total)
        h = self._hermitian(self.g_matrix(phases), theta)
        return float(np.linalg.eigvalsh(h)[-1])

    def top_state(self, g: np.ndarray, theta: float) -> np.ndarray:
        if self.fixed_state is not None:
            return self.fixed_state
        h = self._hermitian(g, theta)
        _, vecs = np.linalg.eigh(h)
        state = vecs[:, -1]
        if self.subspace is not None:
            state = self.subspace @ state
        return state

    def refreshed_state(self, phases: np.ndarray, state: np.ndarray, theta: float):
        """Eigen state update; for modulus forms also re-center the rotation."""
        g = self.g_matrix(phases)
        if not self.is_modulus:
            new = self.top_state(g, 0.0)
            return new, 0.0, float(np.real(new.conj() @ (g @ new)))
        if state is None:
            state = self.top_state(g, theta)
        total = complex(state.conj() @ (g @ state))
        theta = -np.angle(total) if abs(total) > 0 else theta
        for _ in range(8):
            new = self.top_state(g, theta)
            total = complex(new.conj() @ (g @ new))
            if abs(total) == 0:
                break
            next_theta = -np.angle(total)
            if abs((next_theta - theta + np.pi) % (2 * np.pi) - np.pi) < 1e-12:
                theta = next_theta
                break
            theta = next_theta
            state = new
        return new, theta, float(abs(total))

    def setup_at(self, phases: np.ndarray, state: np.ndarray) -> QuantumSetup:
        # fix the state's arbitrary global phase for reproducible output
        anchor = np.argmax(np.abs(state))
        state = state * np.exp(-1j * np.angle(state[anchor]))
        d = self.scenario.outcomes
        shape = (d,) * self.scenario.parties
        return QuantumSetup.normalized(self.scenario, state.reshape(shape), phases)


def _sweep_phases(objective: _MultiportObjective, phases: np.ndarray,
                  products: np.ndarray, theta: float) -> tuple[float, float]:
    """One pass of exact single-phase updates with the state held fixed.

    With everything else frozen, the pairing total is A e^(i*phi) + B e^(-i*phi)
    + C in any single phase, so three probes determine the exact maximizer of
    Re[e^(i*theta) * total].  Returns the final real value and rotation.
    """
    n, k, d = (objective.scenario.parties, objective.scenario.settings,
               objective.scenario.outcomes)
    probe = np.array([0.0, np.pi / 2, np.pi])
    value = None
    for p in range(n):
        for x in range(k):
            for t in range(1, d):
                original = phases[p, x, t]
                totals = np.empty(3, dtype=complex)
                for i, offset in enumerate(probe):
                    phases[p, x, t] = offset
                    totals[i] = objective.pair_total(phases, products)
                const = 0.5 * (totals[0] + totals[2])
                a = 0.5 * ((totals[0] - const) + (totals[1] - const) / 1j)
                b = 0.5 * ((totals[0] - const) - (totals[1] - const) / 1j)
                z = np.exp(1j * theta) * a + np.conj(np.exp(1j * theta) * b)
                best = -np.angle(z) if abs(z) > 0 else original
                phases[p, x, t] = best
                total = a * np.exp(1j * best) + b * np.exp(-1j * best) + const
                if objective.is_modulus:
                    if abs(total) > 0:
                        theta = -np.angle(total)
                    value = abs(total)
                else:
                    value = total.real
    if value is None:  # no free phases (d = 1 cannot happen; defensive)
        total = objective.pair_total(phases, products)
        value = apply_form(objective.functional.form, total)
    return float(value), theta


def _seesaw(objective: _MultiportObjective, start_phases: np.ndarray,
            config: OptimizationConfig):
    """Alternate exact phase sweeps and eigen state updates until stationary."""
    phases = start_phases.copy()
    phases[:, :, 0] = 0.0
    if objective.fixed_state is not None:
        state = objective.fixed_state
        theta = 0.0
        value = -np.inf
    else:
        state, theta, value = objective.refreshed_state(phases, None, 0.0)
    iterations = 0
    for _ in range(max(1, config.max_iterations)):
        iterations += 1
        products = objective.state_products(state)
        swept, theta = _sweep_phases(objective, phases, products, theta)
        if objective.fixed_state is not None:
            new_value = swept
        else:
            state, theta, new_value = objective.refreshed_state(phases, state, theta)
        if new_value <= value + config.tolerance:
            value = max(value, new_value)
            break
        value = new_value
    return value, phases, theta, state, iterations


def _sobol_points(seed: int, count: int, dims: int) -> np.ndarray:
    sampler = qmc.Sobol(d=dims, scramble=True, seed=seed)
    size = 1 << max(0, math.ceil(math.log2(max(count, 1))))
    return sampler.random(size)[:count] * 2 * np.pi


def _central_difference_gradient(fun, x: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty_like(x)
    for i in range(len(x)):
        offset = np.zeros_like(x)
        offset[i] = step
        grad[i] = (fun(x + offset) - fun(x - offset)) / (2 * step)
    return grad


def _optimize_objective(objective: _MultiportObjective, config: OptimizationConfig):
    n, k, d = (objective.scenario.parties, objective.scenario.settings,
               objective.scenario.outcomes)
    starts = _sobol_points(config.seed, config.restarts, objective.n_phases)

    def run_restart(index: int):
        phases = np.zeros((n, k, d))
        phases[:, :, 1:] = starts[index].reshape(n, k, d - 1)
        value, final_phases, theta, state, iterations = _seesaw(objective, phases, config)
        return value, index, final_phases, theta, state, iterations

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(run_restart, range(config.restarts)))
    else:
        outcomes = [run_restart(i) for i in range(config.restarts)]

    best = max(outcomes, key=lambda item: (item[0], -item[1]))
    value, index, phases, theta, state, iterations = best

    if config.polish and config.polish_iterations > 0:
        negative = lambda params: -objective.value(params)
        packed = objective.pack(phases, theta)
        polished = sciopt.minimize(
            negative,
            packed,
            method="L-BFGS-B",
            jac=lambda x: _central_difference_gradient(negative, x, config.polish_step),
            options=dict(maxiter=config.polish_iterations),
        )
        if -polished.fun > value:
            value = -float(polished.fun)
            phases, theta = objective.unpack(polished.x)
            if objective.fixed_state is None:
                state = objective.top_state(objective.g_matrix(phases), theta)
            iterations += int(polished.nit)

    restart_values = tuple(item[0] for item in outcomes)
    return value, index, phases, state, iterations, restart_values


def _finish(functional, objective, config, beta, search_output) -> OptResult:
    _, index, phases, state, iterations, restart_values = search_output
    setup = objective.setup_at(phases, state)
    born_value = quantum_functional_value(functional, setup, path="born")
    ratio = born_value / beta if abs(beta) > BETA_CUTOFF else None
    return OptResult(
        quantum_value=float(born_value),
        classical_bound=float(beta),
        ratio=ratio,
        setup=setup,
        restart_index=index,
        iterations=iterations,
        restart_values=restart_values,
    )


def _resolve_bound(functional, budget=None) -> float:
    if getattr(functional, "cached_bound", None) is not None:
        return float(functional.cached_bound)
    kwargs = {} if budget is None else {"budget": budget}
    return classical_bound(functional, **kwargs).bound


def maximize_violation(functional, config: OptimizationConfig | None = None,
                       beta: float | None = None) -> OptResult:
    """Multi-start search for the largest quantum value of the functional."""
    config = config or OptimizationConfig()
    if beta is None:
        beta = _resolve_bound(functional)
    objective = _MultiportObjective(functional)
    return _finish(functional, objective, config, beta, _optimize_objective(objective, config))


def maximize_with_fixed_state(functional, amplitudes, config: OptimizationConfig | None = None,
                              beta: float | None = None) -> OptResult:
    """Optimize the phases only, holding the input state fixed."""
    config = config or OptimizationConfig()
    if beta is None:
        beta = _resolve_bound(functional)
    amps = np.asarray(amplitudes, dtype=complex)
    amps = amps / np.linalg.norm(amps.ravel())
    objective = _MultiportObjective(functional, fixed_state=amps)
    return _finish(functional, objective, config, beta, _optimize_objective(objective, config))


def _ghz_subspace(scenario: Scenario) -> np.ndarray:
    d = scenario.outcomes
    dim = d**scenario.parties
    basis = np.zeros((dim, d))
    for j in range(d):
        flat = np.ravel_multi_index((j,) * scenario.parties, (d,) * scenario.parties)
        basis[flat, j] = 1.0
    return basis


def maximize_restricted_ghz(functional, config: OptimizationConfig | None = None,
                            beta: float | None = None) -> OptResult:
    """Optimization with amplitudes confined to span{|00..0>, |11..1>, ...}."""
    scenario = functional.scenario
    if scenario.parties != 3 or scenario.outcomes != 3:
        raise ValueError("the GHZ-family restriction is defined for three qutrits")
    config = config or OptimizationConfig()
    if beta is None:
        beta = _resolve_bound(functional)
    objective = _MultiportObjective(functional, subspace=_ghz_subspace(scenario))
    return _finish(functional, objective, config, beta, _optimize_objective(objective, config))


def product_g_functional(parties: int, outcomes: int, form: FunctionalForm,
                         pairing: Pairing = Pairing.SESQUILINEAR) -> BellFunctional:
    """Two-setting functional with g(h) = prod_p (h_p + 1) over h in {0,1}^N.

    The exponent is the product of the basis labels counted from 1.  Uses the
    Fourier basis for d = 2 (where settings match outcomes) and the
    deterministic/dual pair otherwise; the dual vectors probe through their
    conjugates, which pins the two-party, four-outcome ratios.
    """
    scenario = Scenario(parties, 2, outcomes)
    table = np.ones((2,) * parties, dtype=np.int64)
    for h in np.ndindex(*(2,) * parties):
        product = 1
        for value in h:
            product *= value + 1
        table[h] = product % outcomes
    basis = fourier_party_basis(2) if outcomes == 2 else k2_conjugate_basis(outcomes)
    return build_functional(scenario, basis, GTable(scenario, table), form, pairing)


@dataclass(frozen=True)
class ScanRow:
    """One (N, 2, d) scan entry: bounds, optima and ratios for both forms."""

    parties: int
    settings: int
    outcomes: int
    beta_re: float | None = None
    quantum_re: float | None = None
    ratio_re: float | None = None
    beta_abs: float | None = None
    quantum_abs: float | None = None
    ratio_abs: float | None = None
    seed: int | None = None
    error: str | None = None


def _child_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)).generate_state(1)[0])


def scan_product_g(
    scenarios: Sequence[tuple[int, int, int]],
    config: OptimizationConfig | None = None,
    forms: Iterable[FunctionalForm] = (FunctionalForm.REAL_PART, FunctionalForm.MODULUS),
    budget: int | None = None,
) -> list[ScanRow]:
    """Product-g scan over (N, 2, d) scenarios; per-row failures are annotated."""
    config = config or OptimizationConfig()
    rows = []
    forms = tuple(forms)
    for row_index, (n, k, d) in enumerate(scenarios):
        if k != 2:
            rows.append(ScanRow(n, k, d, error="the product-g scan needs k = 2"))
            continue
        seed = _child_seed(config.seed, row_index)
        fields: dict = {"seed": seed}
        try:
            for form in forms:
                functional = product_g_functional(n, d, form)
                beta = _resolve_bound(functional, budget)
                result = maximize_violation(
                    functional, replace(config, seed=seed), beta=beta
                )
                tag = "re" if form is FunctionalForm.REAL_PART else "abs"
                fields[f"beta_{tag}"] = beta
                fields[f"quantum_{tag}"] = result.quantum_value
                fields[f"ratio_{tag}"] = result.ratio
            rows.append(ScanRow(n, k, d, **fields))
        except Exception as exc:  # noqa: BLE001 - scans must survive bad rows
            rows.append(ScanRow(n, k, d, seed=seed, error=str(exc)))
    return rows


def symmetric_g_tables(settings: int = 3, outcomes: int = 3) -> list[np.ndarray]:
    """All symmetric exponent tables g(h1, h2) = g(h2, h1) for two parties."""
    pairs = [(i, j) for i in range(settings) for j in range(i, settings)]
    tables = []
    values = np.zeros((settings, settings), dtype=np.int64)

    def fill(slot: int):
        if slot == len(pairs):
            tables.append(values.copy())
            return
        i, j = pairs[slot]
        for v in range(outcomes):
            values[i, j] = values[j, i] = v
            fill(slot + 1)

    fill(0)
    return tables


def g_orbit(table: np.ndarray, form: FunctionalForm, outcomes: int = 3) -> set[tuple[int, ...]]:
    """Exponent tables with provably identical bounds and optima.

    For the self-conjugate basis, uniform index translations and the joint
    (h -> -h, g -> -g) flip are local outcome relabelings the multiport family
    absorbs into its phases; constant shifts of g rescale a modulus form by a
    phase.  (A pure index flip alone is not an equivalence: it corresponds to
    switching the pairing convention, which lands on the value-negated table.)
    """
    d = outcomes
    seen: set[tuple[int, ...]] = set()
    frontier = [np.asarray(table) % d]
    while frontier:
        current = frontier.pop()
        key = tuple(current.ravel().tolist())
        if key in seen:
            continue
        seen.add(key)
        images = []
        for c in range(1, current.shape[0]):
            images.append(np.roll(np.roll(current, c, axis=0), c, axis=1))
        reversed_idx = current[np.ix_(*[(-np.arange(s)) % s for s in current.shape])]
        images.append((-reversed_idx) % d)
        if form is FunctionalForm.MODULUS:
            images.extend((current + c) % d for c in range(1, d))
        frontier.extend(images)
    return seen


@dataclass(frozen=True)
class SymmetricSearchResult:
    """Outcome of the symmetric-g sweep on the two-party, k = d = 3 scenario."""

    form: FunctionalForm
    pairing: Pairing
    best_g: GTable
    best: OptResult
    ranking: tuple[tuple[tuple[int, ...], float], ...]  # (flat g, ratio), best first


def symmetric_g_search(
    form: FunctionalForm,
    config: OptimizationConfig | None = None,
    pairing: Pairing = Pairing.BILINEAR,
    coarse_restarts: int = 6,
    refine_top: int = 40,
) -> SymmetricSearchResult:
    """Sweep all 3^6 symmetric exponent tables on (2, 3, 3) and rank by ratio.

    Tables are grouped into relabeling orbits (see g_orbit) and one
    representative per orbit is optimized: a coarse pass over every orbit, then
    a refined pass with the full restart budget on the leading candidates.
    """
    config = config or OptimizationConfig()
    scenario = Scenario(2, 3, 3)
    basis = fourier_party_basis(3)
    tables = symmetric_g_tables()

    representatives: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    assigned: dict[tuple[int, ...], tuple[int, ...]] = {}
    for table in tables:
        key = tuple(table.ravel().tolist())
        if key in assigned:
            continue
        orbit = g_orbit(table, form)
        rep = min(orbit)
        members = sorted(orbit)
        bucket = representatives.setdefault(rep, [])
        for member in members:
            assigned[member] = rep
            if member not in bucket:
                bucket.append(member)

    def functional_for(key: tuple[int, ...]) -> BellFunctional:
        g = GTable(scenario, np.asarray(key, dtype=np.int64).reshape(3, 3))
        return build_functional(scenario, basis, g, form, pairing)

    def optimize_rep(index: int, key: tuple[int, ...], restarts: int):
        functional = functional_for(key)
        beta = classical_bound(functional).bound
        local = replace(config, restarts=restarts, seed=_child_seed(config.seed, index))
        result = maximize_violation(functional, local, beta=beta)
        ratio = result.ratio if result.ratio is not None else float("-inf")
        return ratio, result

    reps = sorted(representatives)
    scored: dict[tuple[int, ...], tuple[float, OptResult]] = {}
    for index, key in enumerate(reps):
        scored[key] = optimize_rep(index, key, min(coarse_restarts, config.restarts))

    leaders = sorted(scored, key=lambda key: (-scored[key][0], key))[:refine_top]
    for index, key in enumerate(leaders):
        candidate = optimize_rep(len(reps) + index, key, config.restarts)
        if candidate[0] > scored[key][0]:
            scored[key] = candidate

    ranking = sorted(
        ((member, scored[assigned[member]][0]) for member in assigned),
        key=lambda item: (-item[1], item[0]),
    )
    best_rep = max(scored, key=lambda key: (scored[key][0], [-v for v in key]))
    best_ratio, best_result = scored[best_rep]
    best_member = min(representatives[best_rep])
    best_g = GTable(scenario, np.asarray(best_member, dtype=np.int64).reshape(3, 3))
    return SymmetricSearchResult(
        form=form,
        pairing=pairing,
        best_g=best_g,
        best=best_result,
        ranking=tuple(ranking),
    )
