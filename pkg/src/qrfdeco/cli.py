"""Command line: ``qrf run <config> [--out DIR]``, ``qrf check``, ``qrf fig2 [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant
violation (or a failed acceptance criterion), 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, InvariantError, QRFError

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qrf", description="Relational decoherence under a quantum Galilean frame change.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario document")
    run.add_argument("config", help="path to the INI scenario document")
    run.add_argument("--out", help="output directory (overrides [output] dir)")
    sub.add_parser("check", help="run the acceptance criteria")
    fig = sub.add_parser("fig2", help="write the SI-unit |Gamma(t)| reference curve")
    fig.add_argument("--out", help="output directory (default fig2_out)")
    return ap


def _run(config_path, out) -> int:
    from .config import parse_config
    from .runner import run_scenario

    with open(config_path, encoding="utf-8") as fh:
        text = fh.read()
    s = parse_config(text)
    for path in run_scenario(s, out):
        print(path)
    return EXIT_OK


def _fig2(out) -> int:
    from .config import parse_config
    from .runner import run_scenario
    from .scenarios import FIG2_CONFIG

    s = parse_config(FIG2_CONFIG)
    for path in run_scenario(s, out):
        print(path)
    return EXIT_OK


def _check() -> int:
    from .acceptance import run_all

    results = run_all()
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_INVARIANT if failed else EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args.config, args.out)
        if args.command == "fig2":
            return _fig2(args.out)
        return _check()
    except ConfigurationError as e:
        print(f"qrf: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantError, QRFError, ValueError) as e:
        where = f" in module {e.module}" if getattr(e, "module", None) else ""
        print(f"qrf: numerical error{where}: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as e:
        print(f"qrf: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
