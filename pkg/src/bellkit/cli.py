"""Command-line front end: bound, optimize, table, facet, and ww subcommands.

Result documents are JSON on standard output (CSV where requested); logs and
diagnostics go to standard error.  Exit codes: 0 success, 2 parse or usage
error, 3 enumeration budget exceeded, 4 unsupported functional form.  Every
run emits a manifest (inputs, seed, configuration, result digest) from which
it can be replayed; replays produce byte-identical result documents.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .core import Scenario
from .bases import Pairing
from .lhv import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    UnsupportedFormError,
    classical_bound,
    correlation_vertex_matrix,
    facet_check,
)
from .optimize import (
    OptimizationConfig,
    maximize_restricted_ghz,
    maximize_violation,
    maximize_with_fixed_state,
    quantum_functional_value,
    scan_product_g,
)
from .presets import PRESETS, preset_names
from .specdoc import (
    SpecParseError,
    canonical_json,
    document_digest,
    parse_functional_document,
    parse_setup_document,
    round_floats,
    scan_rows_csv,
    serialize_bound_result,
    serialize_facet_report,
    serialize_opt_result,
    serialize_scan_rows,
    serialize_setup,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_FORM = 4

TABLE_SCENARIOS: list[tuple[int, int, int]] = (
    [(2, 2, d) for d in range(2, 15)]
    + [(3, 2, d) for d in range(2, 6)]
    + [(4, 2, d) for d in range(2, 5)]
    + [(5, 2, d) for d in range(2, 4)]
)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to replay a run and check its output."""

    command: list[str]
    inputs: dict
    seed: int | None
    config: dict
    wall_clock_s: float
    version: str
    result_digest: str


def _log(message: str):
    print(message, file=sys.stderr)


def _load_spec(value: str, pairing_override: Pairing | None):
    path = Path(value)
    if path.is_file():
        doc = json.loads(path.read_text())  # JSONDecodeError wrapped by caller
        source = str(path)
    elif value in PRESETS:
        doc = PRESETS[value]
        source = f"preset:{value}"
    else:
        raise SpecParseError(
            "spec", f"{value!r} is neither a file nor a preset ({', '.join(preset_names())})"
        )
    functional = parse_functional_document(doc, source, pairing_override)
    return functional, {"source": source, "digest": document_digest(doc)}


def _emit(result, command: list[str], inputs: dict, seed, config: dict,
          started: float, fmt: str = "json", csv_text: str | None = None) -> int:
    digest = document_digest(result)
    manifest = RunManifest(
        command=command,
        inputs=inputs,
        seed=seed,
        config=config,
        wall_clock_s=time.time() - started,
        version=__version__,
        result_digest=digest,
    )
    if fmt == "csv":
        sys.stdout.write(csv_text if csv_text is not None else "")
        _log(canonical_json({"manifest": asdict(manifest)}))
    else:
        doc = {"result": round_floats(result), "manifest": round_floats(asdict(manifest))}
        print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def _config_from_args(args) -> OptimizationConfig:
    return OptimizationConfig(
        restarts=args.restarts,
        seed=args.seed,
        threads=args.threads,
        tolerance=args.tolerance,
    )


def _pairing_from_args(args) -> Pairing | None:
    if getattr(args, "pairing", None) is None:
        return None
    return Pairing(args.pairing)


def cmd_bound(args, argv) -> int:
    started = time.time()
    functional, spec_info = _load_spec(args.spec, _pairing_from_args(args))
    result = classical_bound(functional, budget=args.budget, threads=args.threads)
    doc = serialize_bound_result(result)
    doc["form"] = functional.form.value
    return _emit(doc, argv, {"spec": spec_info}, None,
                 {"budget": args.budget, "threads": args.threads}, started)


def cmd_optimize(args, argv) -> int:
    started = time.time()
    functional, spec_info = _load_spec(args.spec, _pairing_from_args(args))
    config = _config_from_args(args)
    inputs = {"spec": spec_info}
    bound = classical_bound(functional, budget=args.budget, threads=args.threads).bound

    if args.setup is not None:
        setup_doc = json.loads(Path(args.setup).read_text())
        setup = parse_setup_document(setup_doc, args.setup)
        inputs["setup"] = {"source": args.setup, "digest": document_digest(setup_doc)}
        if setup.scenario != functional.scenario:
            raise SpecParseError("setup.scenario", "setup and functional scenarios differ")
        if args.optimize_phases:
            result = maximize_with_fixed_state(
                functional, setup.amplitudes, config, beta=bound
            )
        else:
            value = quantum_functional_value(functional, setup, path="born")
            doc = {
                "quantum_value": round_floats(value),
                "classical_bound": round_floats(bound),
                "ratio": round_floats(value / bound) if abs(bound) > 1e-9 else None,
                "ratio_defined": abs(bound) > 1e-9,
                "setup": serialize_setup(setup),
                "form": functional.form.value,
                "evaluated_only": True,
            }
            return _emit(doc, argv, inputs, args.seed,
                         {"budget": args.budget, "threads": args.threads}, started)
    elif args.ghz_family:
        scenario = functional.scenario
        if scenario.parties != 3 or scenario.outcomes != 3:
            raise SpecParseError(
                "spec.scenario", "--ghz-family needs a three-party, three-outcome functional"
            )
        result = maximize_restricted_ghz(functional, config, beta=bound)
    else:
        result = maximize_violation(functional, config, beta=bound)
    doc = serialize_opt_result(result)
    doc["form"] = functional.form.value
    doc["ghz_family"] = bool(args.ghz_family)
    if result.ratio is None:
        doc["ratio_note"] = "classical bound is numerically zero; the ratio is undefined"
    return _emit(doc, argv, inputs, args.seed,
                 {"restarts": args.restarts, "threads": args.threads,
                  "budget": args.budget, "tolerance": args.tolerance}, started)


def _parse_scenarios(text: str) -> list[tuple[int, int, int]]:
    if text is None:
        return TABLE_SCENARIOS
    entries = [chunk for chunk in text.replace(" ", "").split(";") if chunk]
    out = []
    for i, chunk in enumerate(entries):
        parts = chunk.split(",")
        if len(parts) != 3:
            raise SpecParseError(f"scenarios[{i}]", f"expected N,k,d, got {chunk!r}")
        try:
            out.append(tuple(int(v) for v in parts))
        except ValueError as exc:
            raise SpecParseError(f"scenarios[{i}]", str(exc)) from exc
    return out


def cmd_table(args, argv) -> int:
    started = time.time()
    scenarios = _parse_scenarios(args.scenarios)
    config = _config_from_args(args)
    rows = []
    for index, scenario in enumerate(scenarios):
        _log(f"table: scenario {scenario} ({index + 1}/{len(scenarios)})")
        rows.extend(scan_product_g([scenario], config, budget=args.budget))
    result = {"rows": serialize_scan_rows(rows)}
    csv_text = scan_rows_csv(rows)
    return _emit(result, argv, {"scenarios": [list(s) for s in scenarios]}, args.seed,
                 {"restarts": args.restarts, "threads": args.threads,
                  "budget": args.budget, "tolerance": args.tolerance},
                 started, fmt=args.format, csv_text=csv_text)


def cmd_facet(args, argv) -> int:
    started = time.time()
    functional, spec_info = _load_spec(args.spec, _pairing_from_args(args))
    report = facet_check(functional, budget=args.budget)
    doc = serialize_facet_report(report)
    return _emit(doc, argv, {"spec": spec_info}, None, {"budget": args.budget}, started)


def _ww_rows(parties: int) -> list[dict]:
    """All sign choices f on {0,1}^N with their normalized coefficient families."""
    n = parties
    r_tuples = list(itertools.product(range(2), repeat=n))
    count = 2 ** len(r_tuples)
    signs = np.empty((count, len(r_tuples)))
    for col in range(len(r_tuples)):
        period = 2 ** (len(r_tuples) - 1 - col)
        pattern = np.arange(count) // period % 2
        signs[:, col] = 1.0 - 2.0 * pattern
    walsh = np.array(
        [[(-1.0) ** sum(r[p] * x[p] for p in range(n)) for x in r_tuples] for r in r_tuples]
    )
    q = signs @ walsh / 2**n

    scenario = Scenario(n, 2, 2)
    vertices = correlation_vertex_matrix(scenario, (1,) * n).real
    values = q @ vertices.T
    bounds = values.max(axis=1)

    # f factorizes (trivial inequality) iff f(r) = f(0) prod_p (f(0) f(e_p))^(r_p)
    index_of = {r: i for i, r in enumerate(r_tuples)}
    basis_cols = [index_of[tuple(1 if q_ == p else 0 for q_ in range(n))] for p in range(n)]
    f0 = signs[:, index_of[(0,) * n]]
    predicted = np.tile(f0[:, None], (1, len(r_tuples)))
    for col, r in enumerate(r_tuples):
        for p in range(n):
            if r[p]:
                predicted[:, col] *= f0 * signs[:, basis_cols[p]]
    factorizes = np.all(predicted == signs, axis=1)

    rows = []
    for i in range(count):
        rows.append(
            {
                "f": [int(v) for v in signs[i]],
                "coefficients": round_floats(q[i].tolist()),
                "bound": round_floats(float(bounds[i])),
                "bound_is_one": bool(abs(bounds[i] - 1.0) < 1e-9),
                "nontrivial": bool(not factorizes[i]),
            }
        )
    return rows


def cmd_ww(args, argv) -> int:
    started = time.time()
    if args.parties < 1 or args.parties > 4:
        raise SpecParseError("parties", "the family is enumerable for 1 <= N <= 4")
    rows = _ww_rows(args.parties)
    result = {
        "parties": args.parties,
        "count": len(rows),
        "nontrivial_count": sum(1 for r in rows if r["nontrivial"]),
        "all_bounds_one": all(r["bound_is_one"] for r in rows),
        "functionals": rows,
    }
    csv_lines = ["f,bound,nontrivial"]
    for row in rows:
        csv_lines.append(
            ";".join(str(v) for v in row["f"]) + f",{row['bound']},{int(row['nontrivial'])}"
        )
    return _emit(result, argv, {"parties": args.parties}, None, {}, started,
                 fmt=args.format, csv_text="\n".join(csv_lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellkit",
        description="Bell functionals on roots of unity: exact LHV bounds, facet "
        "certification, and multiport violation search.",
    )
    parser.add_argument("--version", action="version", version=f"bellkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True, optimizer=False, fmt=False):
        if spec:
            p.add_argument("--spec", required=True,
                           help="functional document path or preset name "
                                f"({', '.join(preset_names())})")
            p.add_argument("--pairing", choices=[x.value for x in Pairing], default=None,
                           help="override the construction pairing")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="max deterministic strategies to enumerate")
        p.add_argument("--threads", type=int, default=1, help="worker cap")
        if optimizer:
            p.add_argument("--restarts", type=int, default=200)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--tolerance", type=float, default=1e-8)
        if fmt:
            p.add_argument("--format", choices=["json", "csv"], default="json")

    p_bound = sub.add_parser("bound", help="exact classical bound by enumeration")
    common(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_opt = sub.add_parser("optimize", help="maximize the quantum value over multiport setups")
    common(p_opt, optimizer=True)
    p_opt.add_argument("--ghz-family", action="store_true",
                       help="restrict amplitudes to a|000> + b|111> + c|222>")
    p_opt.add_argument("--setup", default=None,
                       help="setup document to evaluate instead of searching")
    p_opt.add_argument("--optimize-phases", action="store_true",
                       help="with --setup: keep its amplitudes, re-optimize the phases")
    p_opt.set_defaults(func=cmd_optimize)

    p_table = sub.add_parser("table", help="product-exponent scan over (N,2,d) scenarios")
    common(p_table, spec=False, optimizer=True, fmt=True)
    p_table.add_argument("--scenarios", default=None,
                         help='semicolon-separated N,k,d triples, e.g. "2,2,2;3,2,3" '
                              "(default: the full 22-row list)")
    p_table.set_defaults(func=cmd_table)

    p_facet = sub.add_parser("facet", help="rank-certify tightness of a real-part functional")
    common(p_facet)
    p_facet.set_defaults(func=cmd_facet)

    p_ww = sub.add_parser("ww", help="enumerate the two-outcome sign-family functionals")
    p_ww.add_argument("--parties", type=int, required=True)
    p_ww.add_argument("--format", choices=["json", "csv"], default="json")
    p_ww.set_defaults(func=cmd_ww)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except SpecParseError as exc:
        _log(f"parse error: {exc}")
        return EXIT_PARSE
    except json.JSONDecodeError as exc:
        _log(f"parse error: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
        return EXIT_PARSE
    except BudgetExceededError as exc:
        _log(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except UnsupportedFormError as exc:
        _log(f"unsupported form: {exc}")
        return EXIT_FORM


if __name__ == "__main__":
    sys.exit(main())
