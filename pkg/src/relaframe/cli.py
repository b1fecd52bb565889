"""Command line entry point: ``relaframe run|validate|list-experiments``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import parse_config
from .errors import ParseError, RelaframeError, ValidationError
from .tables import FORMATS, emit

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_DOMAIN = 5


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _cmd_run(args) -> int:
    from .experiments import run
    cfg = parse_config(_read(args.config))
    fmt = args.format or cfg.output.format
    out = args.out or cfg.output.path
    data = emit(run(cfg), fmt)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = parse_config(_read(args.config))
    print(f"{args.config}: ok ({cfg.experiment})")
    return EXIT_OK


def _cmd_list(args) -> int:
    from .experiments import REGISTRY
    for name, (_, desc) in REGISTRY.items():
        print(f"{name:18s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaframe",
        description="Quantum reference frame experiments on truncated Hilbert spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment described by a config file")
    p.add_argument("config")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="output path (default: config output.path or stdout)")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("list-experiments", help="list registered experiment ids")
    p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False)
                        else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RelaframeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
