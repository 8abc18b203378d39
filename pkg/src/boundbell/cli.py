"""Command-line front end producing reproducible JSON/CSV reports.

Commands: ``state`` (serialize a family member), ``scan`` (PPT bipartition
scan), ``bell`` (Bell expectation with fixed, file, or optimized settings),
``extract`` (run the pair-extraction protocol), ``sweep`` (bell+scan
threshold table over a range of N).

Exit codes: 0 ok, 2 usage/range errors, 3 not entangled, 4 requested pair
unavailable, 5 numeric degeneracy.  ``BOUNDBELL_TOL`` overrides the default
tolerance of each command.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import asdict, dataclass
from itertools import combinations
from pathlib import Path

from .bell import BellSettings, bell_value, optimize_settings
from .extraction import (
    NotEntangledError,
    NumericDegeneracyError,
    PairUnavailableError,
    extract,
)
from .ppt import NOT_PSD, PSD, ppt_check, scan
from .serialize import (
    canonical_dumps,
    dump_json,
    extraction_to_obj,
    load_json,
    operator_from_obj,
    operator_to_obj,
    settings_from_obj,
    settings_to_obj,
    state_from_obj,
    state_to_obj,
)
from .states import RhoFamilySpec, default_alpha, ghz, random_pure, rho_family
from .tensor import PartyLayout

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_ENTANGLED = 3
EXIT_PAIR_UNAVAILABLE = 4
EXIT_NUMERIC_DEGENERACY = 5

_TOL_ENV = "BOUNDBELL_TOL"


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration echoed into every report."""

    command: str
    n: int | None = None
    alpha: float | None = None
    tol: float | None = None
    seed: int | None = None
    restarts: int | None = None
    settings: str | None = None
    pair: tuple[int, int] | None = None
    dims: tuple[int, ...] | None = None
    input: str | None = None
    out: str | None = None
    format: str | None = None
    n_min: int | None = None
    n_max: int | None = None
    scan_max: int | None = None

    def to_obj(self) -> dict:
        obj = asdict(self)
        if self.pair is not None:
            obj["pair"] = list(self.pair)
        if self.dims is not None:
            obj["dims"] = list(self.dims)
        return obj


def _default_tol(fallback: float) -> float:
    env = os.environ.get(_TOL_ENV)
    if env is None:
        return fallback
    return float(env)


def _resolve_alpha(text: str, n: int) -> float:
    if text == "auto":
        return default_alpha(n)
    return float(text)


def _emit(report: dict, out: str | None) -> None:
    if out is None:
        sys.stdout.write(canonical_dumps(report))
    else:
        dump_json(report, out)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_operator_source(args) -> tuple:
    """Operator plus (n, alpha) metadata from --input or --n/--alpha."""
    if args.input is not None:
        rho = operator_from_obj(load_json(args.input))
        return rho, rho.layout.num_parties, None
    if args.n is None:
        raise ValueError("provide either --input or --n")
    if not 2 <= args.n <= 12:
        raise ValueError(f"--n must be in 2..12, got {args.n}")
    alpha = _resolve_alpha(args.alpha, args.n)
    return rho_family(RhoFamilySpec(args.n, alpha)), args.n, alpha


def cmd_state(args) -> int:
    if args.n is None or not 2 <= args.n <= 12:
        raise ValueError(f"--n must be in 2..12, got {args.n}")
    alpha = _resolve_alpha(args.alpha, args.n)
    rho = rho_family(RhoFamilySpec(args.n, alpha))
    psi = ghz(args.n, alpha)

    out = Path(args.out)
    ghz_out = Path(args.ghz_out) if args.ghz_out else out.with_suffix(".ghz.json")
    dump_json(operator_to_obj(rho), out)
    dump_json(state_to_obj(psi), ghz_out)

    config = RunConfig(
        "state", n=args.n, alpha=alpha, out=str(out)
    )
    report = {
        "config": config.to_obj(),
        "operator_file": str(out),
        "ghz_file": str(ghz_out),
        "nonzero_entries": len(operator_to_obj(rho)["entries"]),
    }
    sys.stdout.write(canonical_dumps(report))
    return EXIT_OK


def _scan_summary(reports) -> dict:
    singles = [r for r in reports if len(r.subset) == 1]
    pairs = [r for r in reports if len(r.subset) == 2]
    ppt_single = all(r.verdict == PSD for r in singles)
    npt_pairs = all(r.verdict == NOT_PSD for r in pairs) if pairs else None
    return {
        "ppt_single": ppt_single,
        "npt_pairs": npt_pairs,
        "bound_entangled_claim": bool(ppt_single and npt_pairs),
    }


def cmd_scan(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol(1e-9)
    rho, n, alpha = _load_operator_source(args)
    result = scan(rho, tol)
    summary = _scan_summary(result.reports)

    config = RunConfig(
        "scan",
        n=n,
        alpha=alpha,
        tol=tol,
        input=args.input,
        out=args.out,
        format=args.format,
    )
    report = {
        "config": config.to_obj(),
        "N": n,
        "alpha": alpha,
        "reports": [
            {
                "subset": list(r.subset),
                "min_eig": r.min_eigenvalue,
                "verdict": r.verdict,
            }
            for r in result.reports
        ],
        "all_ppt": result.all_ppt,
        "summary": summary,
    }
    sys.stderr.write(
        "ppt_single={ppt_single} npt_pairs={npt_pairs} "
        "bound_entangled_claim={bound_entangled_claim}\n".format(**summary)
    )
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["subset", "min_eigenvalue", "verdict"])
        for r in result.reports:
            writer.writerow([" ".join(map(str, r.subset)), repr(r.min_eigenvalue), r.verdict])
        _emit_text(buf.getvalue(), args.out)
    else:
        _emit(report, args.out)
    return EXIT_OK


def cmd_bell(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol(1e-10)
    rho, n, alpha = _load_operator_source(args)
    if any(d != 2 for d in rho.layout.dims):
        raise ValueError("bell evaluation requires an all-qubit operator")

    optimized = False
    if args.settings == "xy":
        settings = BellSettings.xy(rho.layout.num_parties)
        value = bell_value(rho, settings)
    elif args.settings == "optimize":
        optimized = True
        settings, value = optimize_settings(
            rho, restarts=args.restarts, tol=tol, seed=args.seed
        )
    else:
        settings = settings_from_obj(load_json(args.settings))
        value = bell_value(rho, settings)

    config = RunConfig(
        "bell",
        n=n,
        alpha=alpha,
        tol=tol,
        seed=args.seed if optimized else None,
        restarts=args.restarts if optimized else None,
        settings=args.settings,
        input=args.input,
        out=args.out,
    )
    report = {
        "config": config.to_obj(),
        "value": value,
        "bound": 1.0,
        "violation": bool(abs(value) > 1.0),
        "settings": settings_to_obj(settings),
    }
    sys.stderr.write(f"value={value!r} bound=1.0 violation={report['violation']}\n")
    if optimized and args.settings_out:
        dump_json(settings_to_obj(settings), args.settings_out)
    _emit(report, args.out)
    return EXIT_OK


def _parse_pair(text: str) -> tuple[int, int]:
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"--pair expects two comma-separated indices, got {text!r}")
    return parts[0], parts[1]


def cmd_extract(args) -> int:
    sources = [args.input is not None, args.ghz is not None, args.random is not None]
    if sum(sources) != 1:
        raise ValueError("provide exactly one of --input, --ghz, --random")
    dims = None
    if args.input is not None:
        psi = state_from_obj(load_json(args.input))
    elif args.ghz is not None:
        if args.ghz < 2:
            raise ValueError("--ghz needs at least two parties")
        psi = ghz(args.ghz, _resolve_alpha(args.alpha, args.ghz))
    else:
        dims = tuple(int(d) for d in args.random.split(","))
        psi = random_pure(PartyLayout(dims), args.seed)

    pair = _parse_pair(args.pair) if args.pair else None
    result = extract(psi, pair)

    config = RunConfig(
        "extract",
        n=psi.layout.num_parties,
        seed=args.seed if args.random is not None else None,
        pair=pair,
        dims=dims,
        input=args.input,
        out=args.out,
    )
    report = {"config": config.to_obj(), **extraction_to_obj(result)}
    sys.stderr.write(
        f"pair={result.pair} probability={result.probability!r} "
        f"schmidt_coeffs={result.schmidt_coeffs!r}\n"
    )
    _emit(report, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol(1e-9)
    if not (2 <= args.n_min <= args.n_max <= 12):
        raise ValueError("need 2 <= --n-min <= --n-max <= 12")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        alpha = _resolve_alpha(args.alpha, n)
        rho = rho_family(RhoFamilySpec(n, alpha))
        value = bell_value(rho, BellSettings.xy(n))
        row = {
            "n": n,
            "alpha": alpha,
            "bell_xy": value,
            "violation": bool(abs(value) > 1.0),
            "ppt_single": None,
            "npt_pairs": None,
            "bound_entangled_claim": None,
        }
        if n <= args.scan_max:
            singles = [ppt_check(rho, (k,), tol) for k in range(1, n + 1)]
            row["ppt_single"] = all(r.verdict == PSD for r in singles)
            if n >= 3:
                pairs = [
                    ppt_check(rho, pair, tol)
                    for pair in combinations(range(1, n + 1), 2)
                ]
                row["npt_pairs"] = all(r.verdict == NOT_PSD for r in pairs)
            row["bound_entangled_claim"] = bool(
                row["ppt_single"] and row["npt_pairs"]
            )
        rows.append(row)
        sys.stderr.write(
            f"n={n} bell_xy={row['bell_xy']!r} violation={row['violation']}\n"
        )

    config = RunConfig(
        "sweep",
        alpha=None if args.alpha == "auto" else float(args.alpha),
        tol=tol,
        n_min=args.n_min,
        n_max=args.n_max,
        scan_max=args.scan_max,
        out=args.out,
        format=args.format,
    )
    report = {"config": config.to_obj(), "rows": rows}
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        header = [
            "n",
            "alpha",
            "bell_xy",
            "violation",
            "ppt_single",
            "npt_pairs",
            "bound_entangled_claim",
        ]
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    row["n"],
                    repr(row["alpha"]),
                    repr(row["bell_xy"]),
                    row["violation"],
                    row["ppt_single"],
                    row["npt_pairs"],
                    row["bound_entangled_claim"],
                ]
            )
        _emit_text(buf.getvalue(), args.out)
    else:
        _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundbell",
        description="Bound-entangled state family: PPT scans, Bell violation, pair extraction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="serialize a family member and its GHZ component")
    p_state.add_argument("--n", type=int, required=True)
    p_state.add_argument("--alpha", default="auto")
    p_state.add_argument("--out", required=True)
    p_state.add_argument("--ghz-out", dest="ghz_out", default=None)
    p_state.set_defaults(func=cmd_state)

    p_scan = sub.add_parser("scan", help="PPT-check all bipartitions up to size N/2")
    p_scan.add_argument("--input", default=None, help="operator JSON file")
    p_scan.add_argument("--n", type=int, default=None)
    p_scan.add_argument("--alpha", default="auto")
    p_scan.add_argument("--tol", type=float, default=None)
    p_scan.add_argument("--format", choices=("json", "csv"), default="json")
    p_scan.add_argument("--out", default=None)
    p_scan.set_defaults(func=cmd_scan)

    p_bell = sub.add_parser("bell", help="Bell expectation for xy/file/optimized settings")
    p_bell.add_argument("--input", default=None)
    p_bell.add_argument("--n", type=int, default=None)
    p_bell.add_argument("--alpha", default="auto")
    p_bell.add_argument("--settings", default="xy", help="'xy', 'optimize', or a settings JSON path")
    p_bell.add_argument("--restarts", type=int, default=16)
    p_bell.add_argument("--tol", type=float, default=None)
    p_bell.add_argument("--seed", type=int, default=0)
    p_bell.add_argument("--out", default=None)
    p_bell.add_argument("--settings-out", dest="settings_out", default=None)
    p_bell.set_defaults(func=cmd_bell)

    p_extract = sub.add_parser("extract", help="extract a maximally entangled pair")
    p_extract.add_argument("--input", default=None, help="pure-state JSON file")
    p_extract.add_argument("--ghz", type=int, default=None)
    p_extract.add_argument("--alpha", default="0.0")
    p_extract.add_argument("--random", default=None, help="comma-separated local dims")
    p_extract.add_argument("--seed", type=int, default=0)
    p_extract.add_argument("--pair", default=None)
    p_extract.add_argument("--out", default=None)
    p_extract.set_defaults(func=cmd_extract)

    p_sweep = sub.add_parser("sweep", help="bell+scan threshold table over a range of N")
    p_sweep.add_argument("--n-min", dest="n_min", type=int, default=2)
    p_sweep.add_argument("--n-max", dest="n_max", type=int, default=8)
    p_sweep.add_argument("--alpha", default="auto")
    p_sweep.add_argument("--scan-max", dest="scan_max", type=int, default=8,
                         help="largest N to include in the PPT part")
    p_sweep.add_argument("--tol", type=float, default=None)
    p_sweep.add_argument("--format", choices=("json", "csv"), default="json")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotEntangledError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_ENTANGLED
    except PairUnavailableError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PAIR_UNAVAILABLE
    except NumericDegeneracyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC_DEGENERACY
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
