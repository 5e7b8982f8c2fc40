#!/usr/bin/env python3
# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Command line front end: forward, inverse, verify, monodromy, periods and table."""

import argparse
import csv
import io
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Union

import monodromy
from config import RunConfig, build_config
from errors import ConfigError, DomainError, SchwarzError
from hypergeo import DomainPoint
from periods import periods
from schwarz import (
    SchwarzImage,
    chamber_grid,
    forward,
    forward_grid,
    image_residual,
    inverse,
    modified_solution_vector,
)
from verify import SUITES, run_suites

logger = logging.getLogger(__name__)

Record = Dict[str, Any]


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError instead of exiting."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def _pair(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


def _json_value(value: Any) -> Any:
    if isinstance(value, complex):
        return _pair(value)
    if isinstance(value, dict):
        return {key: _json_value(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def _csv_row(record: Record) -> Record:
    """Complex values become <key>_re and <key>_im columns; nested values become JSON."""
    row: Record = {}
    for key, value in record.items():
        if isinstance(value, complex):
            row[f"{key}_re"], row[f"{key}_im"] = value.real, value.imag
        elif isinstance(value, (dict, list, tuple)):
            row[key] = json.dumps(_json_value(value), sort_keys=True)
        else:
            row[key] = value
    return row


def render(result: Union[Record, List[Record]], fmt: str) -> str:
    """Serialize a command result; floats keep their shortest round-trip representation."""
    if fmt == "json":
        return json.dumps(_json_value(result), sort_keys=True)
    records = result if isinstance(result, list) else [result]
    rows = [_csv_row(record) for record in records]
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _domain_point(x1: float, x2: float, config: RunConfig) -> DomainPoint:
    x = DomainPoint(x1, x2)
    if not x.real_chamber and not config.unvalidated:
        raise DomainError(
            f"({x1}, {x2}) is outside 0 < x1, x2 and x1 + x2 < 1; pass --unvalidated to allow it"
        )
    return x


def _image_record(x: DomainPoint, image: SchwarzImage, config: RunConfig) -> Record:
    return {
        "y1": image.y1,
        "y2": image.y2,
        "tau": image.tau,
        "z": x.z,
        "image_residual": image_residual(image, config.tolerance),
    }


def cmd_forward(args: argparse.Namespace, config: RunConfig) -> Record:
    x = _domain_point(args.x1, args.x2, config)
    return _image_record(x, forward(x, config.tolerance), config)


def cmd_inverse(args: argparse.Namespace, config: RunConfig) -> Record:
    image = SchwarzImage(
        complex(args.y1_re, args.y1_im),
        complex(args.y2_re, args.y2_im),
        complex(args.tau_re, args.tau_im),
    )
    x = inverse(image, config.tolerance)
    return {"x1": x.x1, "x2": x.x2}


def cmd_periods(args: argparse.Namespace, config: RunConfig) -> Record:
    x = _domain_point(args.x1, args.x2, config)
    values = periods(x, config.tolerance).as_array()
    modified = modified_solution_vector(x, config.tolerance)
    record: Record = {f"f{k + 1}": complex(v) for k, v in enumerate(values)}
    record.update({f"q_f{k + 1}": complex(v) for k, v in enumerate(modified)})
    return record


def cmd_table(args: argparse.Namespace, config: RunConfig) -> List[Record]:
    config.check_grid()
    points = chamber_grid(config.grid.values(), chamber_only=not config.unvalidated)
    rows = []
    for x, image in forward_grid(points, config.tolerance, config.workers):
        rows.append({"x1": x.x1.real, "x2": x.x2.real, **_image_record(x, image, config)})
    return rows


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> List[Record]:
    return [result.as_dict() for result in run_suites([args.suite], config.tolerance)]


def _matrix_argument(args: argparse.Namespace) -> monodromy.GaussianMatrix:
    if args.word is not None:
        return monodromy.evaluate(monodromy.parse_word(args.word))
    if args.matrix is None:
        raise ConfigError("a matrix JSON document or --word is required")
    text = args.matrix
    if text.startswith("@"):
        try:
            with open(text[1:]) as stream:
                text = stream.read()
        except OSError as e:
            raise ConfigError(f"cannot read matrix file {text[1:]}: {e}") from e
    return monodromy.from_json(text)


def cmd_monodromy(args: argparse.Namespace, config: RunConfig) -> Record:
    g = _matrix_argument(args)
    if args.action == "check":
        result = monodromy.is_in_M(g)
        witness = None
        if result.member:
            witness = {"n1": result.n1, "n2": result.n2, "G": result.G, "L": result.L}
        return {"member": result.member, "witness": witness, "reason": result.reason}
    if args.action == "decompose":
        word = monodromy.decompose(g, extended=args.extended)
        return {"word": word, "length": len(word)}
    return json.loads(monodromy.to_json(g))


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--abs-eps", type=float, help="absolute error target")
    parser.add_argument("--rel-eps", type=float, help="relative error target")
    parser.add_argument("--quad-levels", type=int, help="maximum quadrature levels")
    parser.add_argument("--theta-trunc-eps", type=float, help="series truncation target")
    parser.add_argument("--format", choices=("json", "csv"), help="output format")
    parser.add_argument("--grid", help="grid as start:stop:step")
    parser.add_argument("--workers", type=int, help="threads for grid sweeps")
    parser.add_argument(
        "--unvalidated",
        action="store_true",
        default=None,
        help="allow points outside the real chamber",
    )
    parser.add_argument("--config", help="key=value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="schwarz-map", description=__doc__)
    _add_config_flags(parser)
    parser.add_argument("--emit-table", action="store_true", help="same as the table command")
    commands = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)

    forward_parser = commands.add_parser("forward", help="evaluate the Schwarz map at x")
    forward_parser.add_argument("x1", type=float)
    forward_parser.add_argument("x2", type=float)
    forward_parser.set_defaults(handler=cmd_forward)

    inverse_parser = commands.add_parser("inverse", help="recover x from (y1, y2, tau)")
    for name in ("y1_re", "y1_im", "y2_re", "y2_im", "tau_re", "tau_im"):
        inverse_parser.add_argument(name, type=float)
    inverse_parser.set_defaults(handler=cmd_inverse)

    verify_parser = commands.add_parser("verify", help="run numerical verification suites")
    verify_parser.add_argument("suite", choices=["all", *SUITES])
    verify_parser.set_defaults(handler=cmd_verify)

    monodromy_parser = commands.add_parser("monodromy", help="monodromy group membership")
    monodromy_parser.add_argument("action", choices=("check", "decompose", "evaluate"))
    monodromy_parser.add_argument(
        "matrix", nargs="?", help="matrix JSON document, or @path to read one from a file"
    )
    monodromy_parser.add_argument("--word", help='word such as "M3 M5^-1 M1" instead of a matrix')
    monodromy_parser.add_argument(
        "--extended", action="store_true", help="also decompose elements of -M as -E4 w"
    )
    monodromy_parser.set_defaults(handler=cmd_monodromy)

    periods_parser = commands.add_parser("periods", help="solutions f1..f4 and Q f at x")
    periods_parser.add_argument("x1", type=float)
    periods_parser.add_argument("x2", type=float)
    periods_parser.set_defaults(handler=cmd_periods)

    table_parser = commands.add_parser("table", help="forward over the configured grid")
    table_parser.set_defaults(handler=cmd_table)
    return parser


def _configure_logging() -> None:
    log_level = os.getenv("LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    _configure_logging()
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.emit_table and args.command not in (None, "table"):
            parser.error(f"--emit-table cannot be combined with {args.command}")
        if args.command is None:
            if not args.emit_table:
                parser.error("a command or --emit-table is required")
            args.command, args.handler = "table", cmd_table
        flags = {
            "abs-eps": args.abs_eps,
            "rel-eps": args.rel_eps,
            "quad-levels": args.quad_levels,
            "theta-trunc-eps": args.theta_trunc_eps,
            "format": args.format,
            "grid": args.grid,
            "workers": args.workers,
            "unvalidated": args.unvalidated,
        }
        config = build_config(flags, args.config)
        result = args.handler(args, config)
    except SchwarzError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    print(render(result, config.format))
    if args.command == "verify" and not all(record["pass"] for record in result):
        return 1
    return 0


if __name__ == "__main__":  # pragma: nocover
    sys.exit(main())
