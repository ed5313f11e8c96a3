"""Command-line front end.

Exit codes: 0 full success, 2 partial backend failures (failed prompts are
recorded with an error field), 64 usage errors, 66 unreadable or empty
input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .core import DaedalConfig
from .errors import BackendUnavailable, ProtocolError
from .harness import diagnose_eos_signal, load_prompts, make_backend, run_suite, run_sweep

EX_OK = 0
EX_PARTIAL = 2
EX_USAGE = 64
EX_NOINPUT = 66

_CONFIG_FIELDS = ("l_init", "l_max", "tau_eos", "tau_high", "tau_low",
                  "tau_expand", "e_factor", "w_eos", "stage1_increment",
                  "baseline_steps")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is 64
        raise UsageError(message)


_GENERAL_DEFAULTS = {"mode": None, "prompts": None, "out": None, "backend": None,
                     "lengths": None, "concurrency": 1, "resume": False, "seed": 0}

_MODES = ("daedal", "baseline", "sweep", "diagnose")


def build_parser() -> _Parser:
    p = _Parser(prog="daedal", description=__doc__)
    p.add_argument("--mode", choices=_MODES)
    p.add_argument("--prompts", help="JSONL prompt file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--backend", help="scripted:PATH or remote:URL")
    p.add_argument("--config",
                   help="TOML or JSON file mirroring every flag; flags override it")
    p.add_argument("--l-init", type=int, dest="l_init")
    p.add_argument("--l-max", type=int, dest="l_max")
    p.add_argument("--tau-eos", type=float, dest="tau_eos")
    p.add_argument("--tau-high", type=float, dest="tau_high")
    p.add_argument("--tau-low", type=float, dest="tau_low")
    p.add_argument("--tau-expand", type=float, dest="tau_expand")
    p.add_argument("--e-factor", type=int, dest="e_factor")
    p.add_argument("--w-eos", type=int, dest="w_eos")
    p.add_argument("--stage1-increment", type=int, dest="stage1_increment")
    p.add_argument("--baseline-steps", type=int, dest="baseline_steps")
    p.add_argument("--lengths", help="comma list of lengths (sweep mode)")
    p.add_argument("--concurrency", type=int)
    p.add_argument("--resume", action="store_const", const=True)
    p.add_argument("--seed", type=int)
    return p


def _load_config_file(path) -> dict:
    with open(path, "rb") as fh:
        if str(path).endswith(".toml"):
            try:
                import tomllib
            except ImportError:  # Python 3.10
                import tomli as tomllib
            return tomllib.load(fh)
        return json.load(fh)


def resolve_options(args: argparse.Namespace) -> tuple[argparse.Namespace, DaedalConfig]:
    """Merge defaults < config file < explicit flags; validate the result."""
    file_values = _load_config_file(args.config) if args.config else {}

    for key, default in _GENERAL_DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, file_values.get(key, default))

    for key in ("mode", "prompts", "out", "backend"):
        if getattr(args, key) is None:
            raise UsageError(f"--{key} is required (flag or config file)")
    if args.mode not in _MODES:
        raise UsageError(f"mode must be one of {', '.join(_MODES)}")
    if args.mode == "sweep" and not args.lengths:
        raise UsageError("sweep mode requires --lengths")

    values: dict = {}
    for key in _CONFIG_FIELDS:
        if key in file_values:
            values[key] = file_values[key]
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return args, DaedalConfig(**values)


def _write_meta(out_dir, args: argparse.Namespace, config: DaedalConfig) -> None:
    os.makedirs(out_dir, exist_ok=True)
    meta = {
        "mode": args.mode,
        "backend": args.backend,
        "seed": args.seed,
        "concurrency": args.concurrency,
        "config": config.to_dict(),
    }
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args, config = resolve_options(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (ValueError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NOINPUT

    try:
        prompts = load_prompts(args.prompts)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot read prompts: {exc}", file=sys.stderr)
        return EX_NOINPUT

    try:
        backend = make_backend(args.backend)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot initialize backend: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except (BackendUnavailable, ProtocolError) as exc:
        print(f"error: backend unavailable: {exc}", file=sys.stderr)
        return EX_PARTIAL

    _write_meta(args.out, args, config)

    if args.mode in ("daedal", "baseline"):
        result = run_suite(prompts, args.mode, config, backend, args.out,
                           backend_descriptor=args.backend,
                           concurrency=args.concurrency, resume=args.resume)
        for prompt_id, error in result.failures:
            print(f"FAILED {prompt_id}: {error}", file=sys.stderr)
        print(f"{len(result.records)} runs recorded, "
              f"{len(result.failures)} failures -> {args.out}")
        return EX_PARTIAL if result.failures else EX_OK

    if args.mode == "sweep":
        try:
            if isinstance(args.lengths, str):
                lengths = [int(part) for part in args.lengths.split(",") if part]
            else:
                lengths = [int(x) for x in args.lengths]
        except (TypeError, ValueError):
            print(f"error: bad --lengths value {args.lengths!r}", file=sys.stderr)
            return EX_USAGE
        if not lengths:
            print("error: --lengths is empty", file=sys.stderr)
            return EX_USAGE
        results = run_sweep(prompts, config, backend, lengths, args.out,
                            backend_descriptor=args.backend,
                            concurrency=args.concurrency, resume=args.resume)
        failures = sum(len(r.failures) for r in results.values())
        print(f"sweep over {len(lengths)} lengths -> {args.out}")
        return EX_PARTIAL if failures else EX_OK

    # diagnose
    try:
        report = diagnose_eos_signal(prompts, config.l_init, backend, config.w_eos)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NOINPUT
    path = os.path.join(args.out, "diagnosis.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    means = report["mean_terminal_eos"]
    print(f"terminal EOS confidence: sufficient={means['sufficient']:.4f} "
          f"insufficient={means['insufficient']:.4f} -> {path}")
    return EX_OK


if __name__ == "__main__":
    sys.exit(main())
