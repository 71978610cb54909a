"""``thz-turb`` command line.

    thz-turb <computation|preset> [--config PATH] [--out PATH] [--format csv|json] [--seed N]

Exit status: 0 success, 1 invalid configuration or input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from typing import List, Optional

from ..errors import DomainError, NumericalError
from .config import COMPUTATIONS, ConfigError, load_config, validate_config
from .emit import emit
from .runner import run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


def preset_names() -> List[str]:
    folder = resources.files("thzturb.cli") / "presets"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".toml"))


def preset_text(name: str) -> str:
    return (resources.files("thzturb.cli") / "presets" / f"{name}.toml").read_text(encoding="utf-8")


def _parser():
    ap = argparse.ArgumentParser(
        prog="thz-turb",
        description="THz turbulence channel scenarios: sweep a parameter and tabulate one computation.",
    )
    ap.add_argument("target", help=f"computation ({', '.join(COMPUTATIONS)}) or figure preset name")
    ap.add_argument("--config", help="TOML scenario file (optional for presets)")
    ap.add_argument("--out", help="output file; stdout when omitted or '-'")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--check", action="store_true",
                    help="validate only and print the canonical configuration")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    err = sys.stderr
    presets = preset_names()
    try:
        if args.target in COMPUTATIONS:
            if args.config is None:
                err.write("error: --config is required for a bare computation\n")
                return EXIT_INVALID
            cfg = load_config(args.config)
            if cfg.computation not in (None, args.target):
                err.write(f"error: config names computation {cfg.computation!r} "
                          f"but {args.target!r} was requested\n")
                return EXIT_INVALID
            computation = args.target
        elif args.target in presets:
            cfg = load_config(args.config) if args.config else validate_config(preset_text(args.target))
            computation = cfg.computation
            if computation is None:
                err.write(f"error: preset {args.target!r} does not name a computation\n")
                return EXIT_INVALID
        else:
            err.write(f"error: unknown computation or preset {args.target!r}\n"
                      f"computations: {', '.join(COMPUTATIONS)}\npresets: {', '.join(presets)}\n")
            return EXIT_INVALID
        if args.seed is not None and args.seed < 0:
            err.write("error: --seed must be >= 0\n")
            return EXIT_INVALID
        cfg = cfg.with_overrides(computation=computation, seed=args.seed,
                                 output_path=args.out, output_format=args.format)
    except ConfigError as exc:
        for issue in exc.issues:
            err.write(f"config error: {issue}\n")
        return EXIT_INVALID
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID

    if args.check:
        sys.stdout.write(cfg.canonical())
        return EXIT_OK

    try:
        table = run_scenario(cfg, computation)
        emit(table, cfg.output_format, cfg.output_path)
    except NumericalError as exc:
        err.write(f"numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except DomainError as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
