"""Command-line entry point: ``flatflow <kind> --config cfg.json`` and ``flatflow verify report.json``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .pipeline import BUDGET, KINDS, STAGE_FAILED, VERIFIED, ConfigError, run, verify_report
from .quadratic import DEFAULT_PRECISION

EXIT_OK, EXIT_UNVERIFIED, EXIT_SCHEMA, EXIT_BUDGET, EXIT_STAGE = 0, 1, 2, 3, 4
_EXIT = {VERIFIED: EXIT_OK, BUDGET: EXIT_BUDGET, STAGE_FAILED: EXIT_STAGE}

log = logging.getLogger("flatflow")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatflow", description=__doc__)
    ap.add_argument("--version", action="version", version=f"flatflow {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, type=Path, help="JSON file with the parameters")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="interval precision in bits")
        sp.add_argument("--out", type=Path, default=Path("."), help="directory for report.json and artefacts")
    vp = sub.add_parser("verify", help="re-check the certificates embedded in a report")
    vp.add_argument("report", type=Path)
    return ap


def _load_config(path: Path, kind: str) -> dict:
    data = json.loads(path.read_text())
    # accept either the bare parameter object or {"kind": ..., "params": {...}}
    if isinstance(data, dict) and "params" in data and set(data) <= {"kind", "params", "seed", "precision_bits"}:
        if data.get("kind", kind) != kind:
            raise ConfigError(f"config is for kind {data['kind']!r}, not {kind!r}")
        data = data["params"]
    return data


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _parser().parse_args(argv)
    if args.command == "verify":
        try:
            report = json.loads(args.report.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            log.error("cannot read report: %s", exc)
            return EXIT_SCHEMA
        problems = verify_report(report)
        for p in problems:
            print(f"FAIL {p}")
        print(f"checked {verify_report.last_count} certificate(s): {'ok' if not problems else 'problems found'}")
        return EXIT_OK if not problems else EXIT_UNVERIFIED
    try:
        params = _load_config(args.config, args.command)
        args.out.mkdir(parents=True, exist_ok=True)
        report = run(args.command, params, seed=args.seed, bits=args.precision, out=args.out)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_SCHEMA
    except Exception as exc:  # a stage raised: report it instead of a traceback
        log.error("stage failure: %s: %s", type(exc).__name__, exc)
        return EXIT_STAGE
    path = args.out / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    log.info("%s: %s (%s)", args.command, report["status"], path)
    return _EXIT.get(report["status"], EXIT_UNVERIFIED)


if __name__ == "__main__":
    sys.exit(main())
