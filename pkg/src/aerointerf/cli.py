"""Command-line interface: ``aerointerf {simulate,fit,transfer,metrics,validate}``.

Exit status is 0 on success, 1 when validation fails, 2 on usage or input
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .campaigns import campaign_fit
from .config import load_config
from .errors import AeroInterfError, ValidationFailure
from .model import LosTransition, ModelParams, activity_from_normalized
from .reports import fit_table, transfer_table
from .store import UNITS, ingest_profiles, load_fits, save_fits
from .workbench import cmd_fit, cmd_metrics, cmd_simulate, cmd_transfer, cmd_validate

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON run config (default: $AEROINTERF_CONFIG or built-ins)")
    p.add_argument("--seed", type=int, help="override simulation.rng_seed (unsigned 64-bit)")


def _model_args(p: argparse.ArgumentParser):
    p.add_argument("--preset", metavar="YEAR:BAND",
                   help="take beta, h0 and C~ from a published campaign row, e.g. '2025:CBRS'")
    p.add_argument("--beta", type=float)
    p.add_argument("--h0", type=float)
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--c-tilde", type=float, help="frequency-normalized activity index")
    scale.add_argument("--c-eff", type=float, help="effective activity constant (linear)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aerointerf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic profile CSV plus JSON sidecar")
    _common(p)
    _model_args(p)
    p.add_argument("--out", required=True, help="output CSV path (sidecar: same stem, .json)")
    p.add_argument("--unit", choices=UNITS, default="linear", help="unit of written powers")
    p.add_argument("--band", default="synthetic")
    p.add_argument("--year", default="0")
    p.add_argument("--jitter-db", type=float, default=0.0, help="i.i.d. Gaussian dB jitter")
    p.add_argument("--noise-floor", type=float, help="constant additive linear power")
    p.add_argument("--monte-carlo", action="store_true",
                   help="bin means from Poisson-field sampling instead of the closed form")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fit", help="fit (beta, h0, C_eff) per profile")
    _common(p)
    p.add_argument("profiles", help="profile CSV")
    p.add_argument("--unit", choices=UNITS, required=True, help="unit of mean_power in the CSV")
    p.add_argument("--band")
    p.add_argument("--year")
    p.add_argument("--out", help="write the text table here instead of stdout")
    p.add_argument("--json", help="machine-readable fits (default: OUT with .json suffix)")

    p = sub.add_parser("transfer", help="two-point transfer from a reference year")
    _common(p)
    p.add_argument("profiles", help="profile CSV")
    p.add_argument("--unit", choices=UNITS, required=True)
    p.add_argument("--band", required=True)
    p.add_argument("--reference-year", required=True)
    p.add_argument("--target-year", required=True)
    p.add_argument("--reference-fits", help="fits JSON from 'fit --json' to take h0 from")
    p.add_argument("--h1", type=float, help="first calibration altitude [m]")
    p.add_argument("--h2", type=float, help="second calibration altitude [m]")
    p.add_argument("--out")
    p.add_argument("--json")

    p = sub.add_parser("metrics", help="score a given parameter set against a profile")
    _common(p)
    _model_args(p)
    p.add_argument("profiles")
    p.add_argument("--unit", choices=UNITS, required=True)
    p.add_argument("--band", required=True)
    p.add_argument("--year", required=True)

    p = sub.add_parser("validate", help="closed form vs quadrature and Monte Carlo oracles")
    _common(p)
    p.add_argument("--realizations", type=int, help="override simulation.realizations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="also write the report here")
    return parser


def _config(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _params(args, config) -> ModelParams:
    beta, h0, c_tilde, c_eff = args.beta, args.h0, args.c_tilde, args.c_eff
    if args.preset:
        year, _, band = args.preset.partition(":")
        try:
            row = campaign_fit(year, band)
        except KeyError:
            raise AeroInterfError(f"unknown preset {args.preset!r}") from None
        beta = row.beta if beta is None else beta
        h0 = row.h0 if h0 is None else h0
        if c_tilde is None and c_eff is None:
            c_tilde = row.c_tilde
    if beta is None or h0 is None or (c_tilde is None and c_eff is None):
        raise AeroInterfError("need --beta, --h0 and one of --c-tilde/--c-eff (or --preset)")
    if c_eff is None:
        c_eff = activity_from_normalized(c_tilde, config.environment)
    return ModelParams(LosTransition(beta, h0), c_eff, config.pathloss)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_path(args):
    if args.json:
        return args.json
    return str(Path(args.out).with_suffix(".json")) if args.out else None


def _run(args) -> int:
    config = _config(args)
    if args.command == "simulate":
        params = _params(args, config)
        csv_path, side = cmd_simulate(config, params, args.out, band=args.band, year=args.year,
                                      unit=args.unit, jitter_db=args.jitter_db,
                                      noise_floor=args.noise_floor, monte_carlo=args.monte_carlo,
                                      workers=args.workers)
        print(f"wrote {csv_path} and {side}")
        return EXIT_OK

    if args.command == "validate":
        if args.realizations is not None:
            config = replace(config, simulation=replace(config.simulation,
                                                        realizations=args.realizations))
        lines = []

        def report(line):
            lines.append(line)
            print(line)

        try:
            cmd_validate(config, workers=args.workers, report=report)
        finally:
            if args.out:
                Path(args.out).write_text("\n".join(lines) + "\n")
        return EXIT_OK

    store = ingest_profiles(args.profiles, args.unit, config.grid)

    if args.command == "fit":
        keys = [k for k in store.keys()
                if (args.band is None or k[0] == args.band) and (args.year is None or k[1] == args.year)]
        if not keys:
            raise AeroInterfError("no profiles match the requested band/year")
        fits = [cmd_fit(config, store, band, year) for band, year in keys]
        _emit(fit_table(fits), args.out)
        path = _json_path(args)
        if path:
            save_fits(fits, path)
        return EXIT_OK

    if args.command == "transfer":
        if args.h1 is not None or args.h2 is not None:
            bins = replace(config.transfer, **{k: v for k, v in
                                               (("h1", args.h1), ("h2", args.h2)) if v is not None})
            config = replace(config, transfer=bins)
        if args.reference_fits:
            for fit in load_fits(args.reference_fits):
                store.add_reference_fit(fit)
        res = cmd_transfer(config, store, args.band, args.reference_year, args.target_year)
        _emit(transfer_table([res]), args.out)
        path = _json_path(args)
        if path:
            Path(path).write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    if args.command == "metrics":
        params = _params(args, config)
        m = cmd_metrics(config, store, args.band, args.year, params)
        print(json.dumps(m, indent=2, sort_keys=True))
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AeroInterfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
