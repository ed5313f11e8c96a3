"""Serve a model descriptor: ``scripted:SUITE.json`` or ``toy:SEED``."""

from __future__ import annotations

import argparse
import sys

from daedal import Vocab

from .app import ModelService, make_server
from .models import LogitsModel, PassthroughModel, ToyDiffusionModel


def build_model(descriptor: str, vocab_size: int = 1000, mask_id: int = 0,
                eos_id: int = 1):
    kind, sep, arg = descriptor.partition(":")
    if kind == "scripted" and sep:
        return PassthroughModel.from_file(arg)
    if kind == "toy":
        vocab = Vocab(vocab_size, mask_id, eos_id)
        seed = int(arg) if arg else 0
        return LogitsModel(ToyDiffusionModel(vocab, seed=seed), vocab,
                           descriptor=f"toy:{seed}")
    raise ValueError(f"unknown model descriptor {descriptor!r}")


def serve(model_descriptor: str, host: str, port: int, **vocab_kwargs) -> None:
    model = build_model(model_descriptor, **vocab_kwargs)
    service = ModelService(model, ready=True)
    server = make_server(service, host, port)
    bound = server.server_address
    print(f"serving {model.descriptor} on http://{bound[0]}:{bound[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="daedal-server", description=__doc__)
    parser.add_argument("--model", required=True,
                        help="scripted:SUITE.json or toy:SEED")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8731)
    parser.add_argument("--vocab-size", type=int, default=1000,
                        help="toy model only; scripted suites carry their vocab")
    parser.add_argument("--mask-id", type=int, default=0)
    parser.add_argument("--eos-id", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        serve(args.model, args.host, args.port, vocab_size=args.vocab_size,
              mask_id=args.mask_id, eos_id=args.eos_id)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
