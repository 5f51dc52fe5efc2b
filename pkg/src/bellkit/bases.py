"""Party-local bases and the Bell functionals built from them.

Two basis families are supported.  When the number of settings matches the
number of outcomes (k = d) the Fourier vectors form an orthonormal basis that
is its own conjugate.  When k = 2 and d >= 3 no orthonormal basis of
deterministic-outcome vectors exists, so a deterministic pair (1,1),
(1, alpha^(d-1)) is stored together with its dual basis under the sesquilinear
product.

A functional is assembled by weighting tensor products of basis vectors with
root-of-unity exponents g(h) and reading the result either through its real
part or through its modulus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ConjugationMask,
    CorrelationTensor,
    Scenario,
    as_mask,
    root_of_unity,
    settings_tuples,
    unit_roots,
)

__all__ = [
    "BasisKind",
    "Pairing",
    "FunctionalForm",
    "PartyBasis",
    "GTable",
    "BellFunctional",
    "fourier_party_basis",
    "k2_conjugate_basis",
    "build_functional",
    "ww_coefficients",
    "wwzb_nonlinear",
    "evaluate_functional",
    "apply_form",
]


class BasisKind(enum.Enum):
    SELF_CONJUGATE = "self-conjugate"
    DETERMINISTIC_WITH_DUAL = "deterministic-with-dual"


class Pairing(enum.Enum):
    BILINEAR = "bilinear"
    SESQUILINEAR = "sesquilinear"


class FunctionalForm(enum.Enum):
    REAL_PART = "real-part"
    MODULUS = "modulus"


@dataclass(frozen=True)
class PartyBasis:
    """k vectors of length k used to probe one party's correlations.

    `vectors` are the probe vectors v_h entering the functionals.  For the
    deterministic/dual pair, `deterministic` holds the root-of-unity vectors
    w_r satisfying (w_r, v_s) = delta_rs under the sesquilinear product.
    """

    kind: BasisKind
    order: int  # d, the root-of-unity order of the entries
    vectors: np.ndarray  # shape (k, k), row h is v_h
    deterministic: np.ndarray | None = None

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise ValueError(f"need a square vector array, got shape {vecs.shape}")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        if self.kind is BasisKind.SELF_CONJUGATE:
            gram = vecs @ vecs.conj().T
            if not np.allclose(gram, np.eye(len(vecs)), atol=1e-12):
                raise ValueError("self-conjugate basis must be orthonormal")
        elif self.kind is BasisKind.DETERMINISTIC_WITH_DUAL:
            if self.deterministic is None:
                raise ValueError("deterministic-with-dual basis needs the w vectors")
            w = np.asarray(self.deterministic, dtype=complex)
            if w.shape != vecs.shape:
                raise ValueError("w and v arrays must have matching shape")
            if not np.allclose(np.abs(w), 1.0, atol=1e-12):
                raise ValueError("deterministic vectors must have root-of-unity entries")
            pairing = w @ vecs.conj().T
            if not np.allclose(pairing, np.eye(len(w)), atol=1e-12):
                raise ValueError("duality (w_r, v_s) = delta_rs violated")
            w.setflags(write=False)
            object.__setattr__(self, "deterministic", w)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


def fourier_party_basis(d: int) -> PartyBasis:
    """The self-conjugate orthonormal basis v_h = d^(-1/2) (1, a^h, ..., a^((d-1)h)).

    Its vectors are rescaled deterministic outcome assignments; usable whenever
    the number of settings equals the number of outcomes.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    grid = np.outer(np.arange(d), np.arange(d)) % d
    vectors = unit_roots(d)[grid] / np.sqrt(d)
    return PartyBasis(BasisKind.SELF_CONJUGATE, d, vectors)


def k2_conjugate_basis(d: int) -> PartyBasis:
    """Deterministic pair w_0=(1,1), w_1=(1,a^(d-1)) with its sesquilinear dual.

    The duals are v_0 = (-a, 1)/(1-a) and v_1 = (1, -1)/(1-a); the index order
    pairs v_r with w_r.  For d = 2 use fourier_party_basis instead.
    """
    if d < 3:
        raise ValueError("k2_conjugate_basis needs d >= 3; for d = 2 the Fourier basis applies")
    alpha = root_of_unity(d, 1)
    w = np.array([[1.0, 1.0], [1.0, root_of_unity(d, d - 1)]], dtype=complex)
    v = np.array([[-alpha, 1.0], [1.0, -1.0]], dtype=complex) / (1.0 - alpha)
    return PartyBasis(BasisKind.DETERMINISTIC_WITH_DUAL, d, v, deterministic=w)


@dataclass(frozen=True)
class GTable:
    """Exponent table g: basis-index tuples h -> Z_d, stored dense with shape (k,)*N."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.int64)
        if arr.shape != self.scenario.settings_shape():
            raise ValueError(f"expected shape {self.scenario.settings_shape()}, got {arr.shape}")
        if arr.min() < 0 or arr.max() >= self.scenario.outcomes:
            raise ValueError(f"g values must lie in [0, {self.scenario.outcomes})")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    @classmethod
    def from_function(cls, scenario: Scenario, fn) -> "GTable":
        arr = np.empty(scenario.settings_shape(), dtype=np.int64)
        for h in settings_tuples(scenario):
            arr[h] = fn(*h) % scenario.outcomes
        return cls(scenario, arr)

    def shifted(self, constant: int) -> "GTable":
        return GTable(self.scenario, (self.table + constant) % self.scenario.outcomes)


@dataclass(frozen=True)
class FunctionalProvenance:
    """How a functional's coefficients were produced (for result documents)."""

    basis_kind: str | None = None
    pairing: str | None = None
    g: tuple | None = None


@dataclass(frozen=True)
class BellFunctional:
    """Complex coefficients over settings tuples plus a form tag.

    The value on a correlation tensor E is Re[sum_x c_x E_x] for REAL_PART or
    |sum_x c_x E_x| for MODULUS.  Coefficients are never normalized implicitly;
    the classical bound carries all scale.
    """

    scenario: Scenario
    coefficients: np.ndarray
    form: FunctionalForm
    mask: ConjugationMask | None = None
    provenance: FunctionalProvenance | None = None
    cached_bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mask", as_mask(self.scenario, self.mask))
        arr = np.asarray(self.coefficients, dtype=complex)
        if arr.shape != self.scenario.settings_shape():
            raise ValueError(f"expected shape {self.scenario.settings_shape()}, got {arr.shape}")
        if not np.any(arr):
            raise ValueError("coefficient tensor is identically zero")
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)

    def terms(self) -> list[tuple[tuple[int, ...], tuple[int, ...], complex]]:
        """(settings tuple, mask entries, weight) for every nonzero coefficient."""
        out = []
        for x in settings_tuples(self.scenario):
            c = complex(self.coefficients[x])
            if c != 0:
                out.append((x, self.mask.entries, c))
        return out

    def rescaled(self, factor: complex) -> "BellFunctional":
        bound = None
        if self.cached_bound is not None and factor.imag == 0 and factor.real > 0:
            bound = self.cached_bound * factor.real
        return BellFunctional(
            self.scenario, self.coefficients * factor, self.form, self.mask,
            provenance=self.provenance, cached_bound=bound,
        )


def apply_form(form: FunctionalForm, total: complex) -> float:
    """Collapse the complex pairing sum_x c_x E_x to the functional's real value."""
    if form is FunctionalForm.REAL_PART:
        return float(total.real)
    return float(abs(total))


def _probe_matrices(
    scenario: Scenario, bases, pairing: Pairing
) -> tuple[list[np.ndarray], float]:
    """Probe matrices per party plus a deferred common scale.

    For the self-conjugate basis the d^(-1/2) normalization is factored out so
    the contraction runs on exact roots of unity (two-outcome coefficients
    then come out exact); the scale is reapplied once by the caller.
    """
    if isinstance(bases, PartyBasis):
        bases = [bases] * scenario.parties
    bases = list(bases)
    if len(bases) != scenario.parties:
        raise ValueError(f"got {len(bases)} bases for {scenario.parties} parties")
    mats = []
    norm_radicand = 1
    for basis in bases:
        if basis.size != scenario.settings:
            raise ValueError(f"basis size {basis.size} does not match k={scenario.settings}")
        if basis.order != scenario.outcomes:
            raise ValueError(f"basis order {basis.order} does not match d={scenario.outcomes}")
        u = basis.vectors
        if basis.kind is BasisKind.SELF_CONJUGATE:
            exact = unit_roots(basis.order)[
                np.outer(np.arange(basis.size), np.arange(basis.size)) % basis.order
            ]
            if np.allclose(u * np.sqrt(basis.order), exact, atol=1e-12):
                u = exact
                norm_radicand *= basis.order
        mats.append(u.conj() if pairing is Pairing.SESQUILINEAR else u)
    return mats, 1.0 / np.sqrt(norm_radicand)


def build_functional(
    scenario: Scenario,
    bases: PartyBasis | Sequence[PartyBasis],
    g: GTable,
    form: FunctionalForm,
    pairing: Pairing = Pairing.BILINEAR,
    mask=None,
) -> BellFunctional:
    """Coefficients c_x = sum_h alpha^g(h) prod_p u_(h_p)[x_p].

    The h-axis of the g table pairs with parties in order: axis p indexes the
    basis vector probing party p.  Under BILINEAR pairing the probe vectors are
    the basis vectors themselves; under SESQUILINEAR their conjugates.
    """
    if g.scenario != scenario:
        raise ValueError("g table was built for a different scenario")
    mats, scale = _probe_matrices(scenario, bases, pairing)
    coeff = unit_roots(scenario.outcomes)[g.table]
    for u in mats:
        # consume the leading h-axis, appending the matching x-axis at the end
        coeff = np.tensordot(coeff, u, axes=([0], [0]))
    if scale != 1.0:
        coeff = coeff * scale
    provenance = FunctionalProvenance(
        basis_kind=(bases.kind.value if isinstance(bases, PartyBasis) else None),
        pairing=pairing.value,
        g=tuple(g.table.ravel().tolist()),
    )
    return BellFunctional(scenario, coeff, form, mask, provenance=provenance)


def ww_coefficients(f) -> np.ndarray:
    """Two-outcome coefficient family q(x) = 2^-N sum_r f(r) (-1)^(r.x), f = +/-1.

    `f` is a dict keyed by r-tuples or an ndarray of shape (2,)*N.  The
    resulting functionals satisfy sum_x q(x) E_x <= 1 for every LHV model.
    """
    if isinstance(f, dict):
        n = len(next(iter(f)))
        arr = np.empty((2,) * n)
        for r, value in f.items():
            arr[tuple(r)] = value
    else:
        arr = np.asarray(f, dtype=float)
        n = arr.ndim
    if arr.shape != (2,) * n:
        raise ValueError(f"f must cover all of {{0,1}}^{n}")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("f must take values +1 or -1")
    sign = np.array([[1.0, 1.0], [1.0, -1.0]])
    coeff = arr.copy()
    for _ in range(n):
        coeff = np.tensordot(coeff, sign, axes=([0], [0]))
    return coeff / 2**n


def wwzb_nonlinear(
    tensor: CorrelationTensor,
    bases: PartyBasis | Sequence[PartyBasis],
    pairing: Pairing = Pairing.BILINEAR,
) -> float:
    """sum_h |(E, v_h1 x ... x v_hN)|, the nonlinear envelope of the linear family.

    It dominates |sum_h alpha^g(h) (E, V_h)| for every exponent table g.
    """
    scenario = tensor.scenario
    mats, scale = _probe_matrices(scenario, bases, pairing)
    probe = tensor.values
    for u in mats:
        # contract the leading x-axis against the vector components
        probe = np.tensordot(probe, u, axes=([0], [1]))
    return float(np.abs(probe).sum() * scale)


def evaluate_functional(functional: BellFunctional, tensor: CorrelationTensor) -> float:
    """Re[sum_x c_x E_x] or |sum_x c_x E_x| according to the form tag."""
    if tensor.scenario != functional.scenario:
        raise ValueError("correlation tensor belongs to a different scenario")
    if tensor.mask.entries != functional.mask.entries:
        raise ValueError(
            f"mask mismatch: functional {functional.mask.entries}, tensor {tensor.mask.entries}"
        )
    total = complex(np.sum(functional.coefficients * tensor.values))
    return apply_form(functional.form, total)
