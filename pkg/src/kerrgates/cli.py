"""Command-line front end.

    kerrgates run --gate fredkin --feedforward --input bell-control-superposition
    kerrgates sweep --gate cnot --param T --grid 0,0.25,0.5,0.75,1 --format csv
    kerrgates truth-table --gate cnot --feedforward
    kerrgates verify --seed 7

Exit codes: 0 success, 2 parse error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import CircuitError, SimulationError
from .runner import (
    DEFAULT_ALPHA,
    DEFAULT_THETA,
    InputError,
    RunConfig,
    format_report,
    format_table,
    run,
    sweep,
    truth_table_rows,
    verify,
)

log = logging.getLogger("kerrgates")

EXIT_OK, EXIT_PARSE, EXIT_VERIFY = 0, 2, 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, circuit: bool = False) -> None:
    p.add_argument("--gate", choices=("cpath", "povm", "cnot", "fredkin", "toffoli", "cu", "mcu"))
    if circuit:
        p.add_argument("--circuit", type=Path, help="JSON circuit file")
    p.add_argument("--T", dest="T", type=_floats, default=(), help="transmissivities a,b[,c,d]")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument(
        "--feedforward",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="apply feedforward corrections (default: on for cnot and mcu, off otherwise)",
    )
    p.add_argument("--p", dest="p", type=float, default=1.0, help="inner gate success 1/p (cu)")
    p.add_argument("--controls", type=int, default=2, help="number of controls (mcu)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrgates", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one gate or circuit on one input")
    _common(p, circuit=True)
    p.add_argument("--input", default=None, help="e.g. VH, bell:psi-minus, random:3, amp:...")

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _common(p)
    p.add_argument("--param", required=True, help="T, T1..T4, p, alpha or theta")
    p.add_argument("--grid", type=_floats, required=True)

    p = sub.add_parser("truth-table", help="all computational-basis inputs of a gate")
    _common(p)

    p = sub.add_parser("verify", help="oracle equivalence suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inputs", type=int, default=10)
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--out", type=Path)
    return parser


def _config(args, default_format: str) -> RunConfig:
    circuit = None
    if getattr(args, "circuit", None):
        try:
            circuit = json.loads(args.circuit.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.circuit}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        except OSError as exc:
            raise InputError(str(exc)) from None
    if args.gate is None and circuit is None:
        raise InputError("one of --gate or --circuit is required")
    inp = getattr(args, "input", None) or f"random:{args.seed}"
    return RunConfig(
        gate=args.gate,
        circuit=circuit,
        transmissivities=args.T,
        theta=args.theta,
        alpha=args.alpha,
        feedforward=args.feedforward,
        input=inp,
        format=args.format or default_format,
        seed=args.seed,
        inner_success=1.0 / args.p if args.p else 1.0,
        n_controls=args.controls,
    )


def _emit(text: str, out: Path | None) -> None:
    if out:
        out.write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "verify":
            results = verify(args.inputs, args.seed)
            rows = [{"gate": r.gate, "inputs": r.inputs, "ok": r.ok, "problems": len(r.problems)} for r in results]
            _emit(format_table(rows, args.format), args.out)
            for r in results:
                for prob in r.problems[:5]:
                    log.error("%s: %s", r.gate, prob)
            return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY
        if args.command == "run":
            config = _config(args, "json")
            _emit(format_report(run(config), config.format), args.out)
        elif args.command == "sweep":
            config = _config(args, "csv") if args.param not in ("alpha", "theta", "p") or args.gate else None
            if config is None:
                config = RunConfig(gate="cu", theta=args.theta, alpha=args.alpha,
                                   feedforward=args.feedforward, format=args.format or "csv")
            _emit(format_table(sweep(config, args.param, args.grid), config.format), args.out)
        elif args.command == "truth-table":
            config = _config(args, "text")
            _emit(format_table(truth_table_rows(config), config.format), args.out)
    except (InputError, CircuitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
