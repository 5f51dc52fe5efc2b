"""Functional and setup documents: the CLI's input and output contracts.

A functional document is a JSON object with a scenario, a form tag, and
exactly one coefficient route:

  construction: {"basis": "fourier"|"k2-conjugate", "pairing": ..., "g": nested ints}
  coefficients: nested [re, im] over settings tuples (optional "mask")
  terms:        [{"settings": [...], "mask": [...], "weight": [re, im]}, ...]

A setup document carries amplitudes as [re, im] pairs in canonical mode order
(party 0 slowest) and phases as nested [party][setting][port] arrays.

All numbers in result documents are rounded to 12 significant digits and
complex values serialize as [re, im]; serialization is canonical so identical
results produce byte-identical documents.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .core import ConjugationMask, Scenario
from .bases import (
    BellFunctional,
    FunctionalForm,
    GTable,
    Pairing,
    build_functional,
    fourier_party_basis,
    k2_conjugate_basis,
)
from .cglmp import MaskedFunctional, MaskedFunctionalTerm
from .lhv import ClassicalBoundResult, FacetReport
from .multiport import QuantumSetup
from .optimize import OptResult, ScanRow

__all__ = [
    "SpecParseError",
    "parse_functional_document",
    "parse_setup_document",
    "functional_from_source",
    "round_floats",
    "complex_pair",
    "canonical_json",
    "document_digest",
    "serialize_setup",
    "serialize_strategy",
    "serialize_bound_result",
    "serialize_facet_report",
    "serialize_opt_result",
    "serialize_scan_rows",
    "scan_rows_csv",
]


class SpecParseError(ValueError):
    """A malformed document; the message carries the offending location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _need(doc: dict, key: str, location: str):
    if key not in doc:
        raise SpecParseError(f"{location}.{key}", "missing required field")
    return doc[key]


def _parse_scenario(doc: Any, location: str) -> Scenario:
    if not isinstance(doc, dict):
        raise SpecParseError(location, "scenario must be an object")
    try:
        return Scenario(
            int(_need(doc, "parties", location)),
            int(_need(doc, "settings", location)),
            int(_need(doc, "outcomes", location)),
        )
    except SpecParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecParseError(location, str(exc)) from exc


def _parse_complex(value: Any, location: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError) as exc:
            raise SpecParseError(location, f"bad complex pair {value!r}") from exc
    raise SpecParseError(location, f"expected a number or [re, im] pair, got {value!r}")


def _parse_form(value: Any, location: str) -> FunctionalForm:
    try:
        return FunctionalForm(value)
    except ValueError as exc:
        options = ", ".join(f.value for f in FunctionalForm)
        raise SpecParseError(location, f"form must be one of {options}") from exc


def _parse_pairing(value: Any, location: str) -> Pairing:
    try:
        return Pairing(value)
    except ValueError as exc:
        options = ", ".join(p.value for p in Pairing)
        raise SpecParseError(location, f"pairing must be one of {options}") from exc


def _nested_to_array(data: Any, scenario: Scenario, location: str, parse_leaf):
    arr = np.empty(scenario.settings_shape(), dtype=complex)
    def fill(node, index, loc):
        depth = len(index)
        if depth == scenario.parties:
            arr[index] = parse_leaf(node, loc)
            return
        if not isinstance(node, list) or len(node) != scenario.settings:
            raise SpecParseError(loc, f"expected a list of length {scenario.settings}")
        for i, child in enumerate(node):
            fill(child, index + (i,), f"{loc}[{i}]")
    fill(data, (), location)
    return arr


def parse_functional_document(doc: dict, location: str = "spec",
                              pairing_override: Pairing | None = None):
    """Build a BellFunctional or MaskedFunctional from a parsed JSON object."""
    if not isinstance(doc, dict):
        raise SpecParseError(location, "document must be a JSON object")
    scenario = _parse_scenario(_need(doc, "scenario", location), f"{location}.scenario")
    form = _parse_form(_need(doc, "form", location), f"{location}.form")
    routes = [key for key in ("construction", "coefficients", "terms") if key in doc]
    if len(routes) != 1:
        raise SpecParseError(
            location, "exactly one of construction/coefficients/terms is required"
        )
    bound = doc.get("bound")
    if bound is not None:
        bound = float(bound)

    if routes[0] == "terms":
        loc = f"{location}.terms"
        raw = doc["terms"]
        if not isinstance(raw, list) or not raw:
            raise SpecParseError(loc, "terms must be a nonempty list")
        parsed = []
        for i, item in enumerate(raw):
            tloc = f"{loc}[{i}]"
            if not isinstance(item, dict):
                raise SpecParseError(tloc, "term must be an object")
            try:
                term = MaskedFunctionalTerm(
                    tuple(int(v) for v in _need(item, "settings", tloc)),
                    tuple(int(v) for v in _need(item, "mask", tloc)),
                    _parse_complex(_need(item, "weight", tloc), f"{tloc}.weight"),
                )
            except SpecParseError:
                raise
            except (TypeError, ValueError) as exc:
                raise SpecParseError(tloc, str(exc)) from exc
            parsed.append(term)
        try:
            return MaskedFunctional(scenario, tuple(parsed), form, cached_bound=bound)
        except ValueError as exc:
            raise SpecParseError(loc, str(exc)) from exc

    mask = doc.get("mask")
    if mask is not None:
        try:
            mask = ConjugationMask(tuple(int(v) for v in mask), scenario.outcomes)
        except (TypeError, ValueError) as exc:
            raise SpecParseError(f"{location}.mask", str(exc)) from exc

    if routes[0] == "coefficients":
        loc = f"{location}.coefficients"
        coeff = _nested_to_array(doc["coefficients"], scenario, loc, _parse_complex)
        try:
            return BellFunctional(scenario, coeff, form, mask, cached_bound=bound)
        except ValueError as exc:
            raise SpecParseError(loc, str(exc)) from exc

    loc = f"{location}.construction"
    spec = doc["construction"]
    if not isinstance(spec, dict):
        raise SpecParseError(loc, "construction must be an object")
    basis_name = _need(spec, "basis", loc)
    if basis_name == "fourier":
        if scenario.settings != scenario.outcomes:
            raise SpecParseError(
                f"{loc}.basis", "the fourier basis needs settings = outcomes"
            )
        basis = fourier_party_basis(scenario.outcomes)
    elif basis_name == "k2-conjugate":
        if scenario.settings != 2:
            raise SpecParseError(f"{loc}.basis", "the k2-conjugate basis needs settings = 2")
        basis = k2_conjugate_basis(scenario.outcomes)
    else:
        raise SpecParseError(f"{loc}.basis", f"unknown basis {basis_name!r}")
    pairing = _parse_pairing(spec.get("pairing", "bilinear"), f"{loc}.pairing")
    if pairing_override is not None:
        pairing = pairing_override
    g_loc = f"{loc}.g"
    g_raw = _nested_to_array(_need(spec, "g", loc), scenario, g_loc,
                             lambda v, l: _parse_int_exponent(v, l, scenario.outcomes))
    g = GTable(scenario, g_raw.real.astype(np.int64))
    functional = build_functional(scenario, basis, g, form, pairing, mask)
    if bound is not None:
        functional = BellFunctional(
            scenario, functional.coefficients, form, functional.mask,
            provenance=functional.provenance, cached_bound=bound,
        )
    return functional


def _parse_int_exponent(value: Any, location: str, outcomes: int) -> complex:
    if not isinstance(value, int):
        raise SpecParseError(location, f"g entries must be integers, got {value!r}")
    if not 0 <= value < outcomes:
        raise SpecParseError(location, f"g entry {value} outside [0, {outcomes})")
    return complex(value)


def parse_setup_document(doc: dict, location: str = "setup") -> QuantumSetup:
    """Build a QuantumSetup from a parsed JSON object."""
    if not isinstance(doc, dict):
        raise SpecParseError(location, "document must be a JSON object")
    scenario = _parse_scenario(_need(doc, "scenario", location), f"{location}.scenario")
    n, k, d = scenario.parties, scenario.settings, scenario.outcomes
    raw_amps = _need(doc, "amplitudes", location)
    if not isinstance(raw_amps, list) or len(raw_amps) != d**n:
        raise SpecParseError(
            f"{location}.amplitudes", f"expected {d**n} amplitudes in canonical order"
        )
    amps = np.array(
        [_parse_complex(v, f"{location}.amplitudes[{i}]") for i, v in enumerate(raw_amps)]
    ).reshape((d,) * n)
    phases = np.asarray(_need(doc, "phases", location), dtype=float)
    if phases.shape != (n, k, d):
        raise SpecParseError(
            f"{location}.phases", f"expected shape {(n, k, d)}, got {phases.shape}"
        )
    try:
        return QuantumSetup.normalized(scenario, amps, phases)
    except ValueError as exc:
        raise SpecParseError(location, str(exc)) from exc


def functional_from_source(text: str, name: str = "spec",
                           pairing_override: Pairing | None = None):
    """Parse a functional document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{name}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return parse_functional_document(doc, name, pairing_override)


# -- result serialization ----------------------------------------------------

def round_floats(value, digits: int = 12):
    """Round every float in a JSON-ready structure to `digits` significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, complex):
        return complex_pair(value, digits)
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return round_floats(float(value), digits)
    if isinstance(value, np.ndarray):
        return round_floats(value.tolist(), digits)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def complex_pair(value: complex, digits: int = 12) -> list[float]:
    return [float(f"{value.real:.{digits}g}"), float(f"{value.imag:.{digits}g}")]


def canonical_json(doc) -> str:
    return json.dumps(round_floats(doc), sort_keys=True, separators=(",", ":"))


def document_digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def serialize_setup(setup: QuantumSetup) -> dict:
    return {
        "scenario": {
            "parties": setup.scenario.parties,
            "settings": setup.scenario.settings,
            "outcomes": setup.scenario.outcomes,
        },
        "amplitudes": [complex_pair(complex(v)) for v in setup.amplitudes.ravel()],
        "phases": round_floats(setup.phases),
    }


def serialize_strategy(strategy) -> list[list[int]]:
    return strategy.assignments.tolist()


def serialize_bound_result(result: ClassicalBoundResult, max_strategies: int = 256) -> dict:
    doc = {
        "bound": round_floats(result.bound),
        "strategies_examined": result.examined,
        "saturating_count": len(result.argmax),
        "witness": serialize_strategy(result.witness),
        "saturating": [serialize_strategy(s) for s in result.argmax[:max_strategies]],
    }
    if len(result.argmax) > max_strategies:
        doc["saturating_truncated"] = True
    return doc


def serialize_facet_report(report: FacetReport) -> dict:
    return {
        "bound": round_floats(report.bound),
        "polytope_dimension": report.polytope_dimension,
        "saturating_count": report.saturating_count,
        "saturating_rank": report.saturating_rank,
        "is_facet": report.is_facet,
        "is_valid": report.is_valid,
    }


def serialize_opt_result(result: OptResult) -> dict:
    return {
        "quantum_value": round_floats(result.quantum_value),
        "classical_bound": round_floats(result.classical_bound),
        "ratio": round_floats(result.ratio) if result.ratio is not None else None,
        "ratio_defined": result.ratio is not None,
        "setup": serialize_setup(result.setup),
        "restart_index": result.restart_index,
        "iterations": result.iterations,
        "restart_values": round_floats(list(result.restart_values)),
    }


SCAN_COLUMNS = [
    "parties", "settings", "outcomes",
    "beta_re", "quantum_re", "ratio_re",
    "beta_abs", "quantum_abs", "ratio_abs",
    "seed", "error",
]


def serialize_scan_rows(rows: list[ScanRow]) -> list[dict]:
    return [
        {column: round_floats(getattr(row, column)) for column in SCAN_COLUMNS}
        for row in rows
    ]


def scan_rows_csv(rows: list[ScanRow]) -> str:
    lines = [",".join(SCAN_COLUMNS)]
    for row in serialize_scan_rows(rows):
        cells = []
        for column in SCAN_COLUMNS:
            value = row[column]
            cells.append("" if value is None else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
