"""HTTP layer: the predict wire protocol plus tokenizer and health helpers.

Routes:
  POST /v1/predict     {"prompt": [int], "cells": [{"id", "token"}], "vocab": {...}}
                       -> {"stats": [{"id", "predicted", "confidence", "eos_prob"}]}
  POST /v1/tokenize    {"text": str}     -> {"tokens": [int]}
  POST /v1/detokenize  {"tokens": [int]} -> {"text": str}
  GET  /v1/vocab       -> {"vocab_size", "mask_id", "eos_id"}
  GET  /healthz        -> 200 once the model is ready, 503 before

Malformed requests get 400 with {"error": ...}; unknown request fields are
ignored for forward compatibility. Model invocations are serialized through
a single executor lock; the HTTP layer accepts concurrently.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from daedal import Canvas
from daedal.harness import identity_detokenize, identity_tokenize

from .models import Model


class BadRequest(Exception):
    pass


class ModelService:
    """Protocol-level request handling, independent of the HTTP plumbing."""

    def __init__(self, model: Model, ready: bool = True,
                 tokenize=identity_tokenize, detokenize=identity_detokenize):
        self.model = model
        self.ready = ready
        self._tokenize = tokenize
        self._detokenize = detokenize
        self._executor_lock = threading.Lock()

    def vocab_payload(self) -> dict:
        v = self.model.vocab
        return {"vocab_size": v.vocab_size, "mask_id": v.mask_id, "eos_id": v.eos_id}

    def predict(self, request: dict) -> dict:
        vocab = self.model.vocab
        if not isinstance(request, dict):
            raise BadRequest("request body must be a JSON object")
        if "prompt" not in request or "cells" not in request:
            raise BadRequest("request needs 'prompt' and 'cells'")
        declared = request.get("vocab")
        if isinstance(declared, dict):
            if (declared.get("mask_id") != vocab.mask_id
                    or declared.get("eos_id") != vocab.eos_id):
                raise BadRequest(
                    f"client vocab {declared} does not match served vocab "
                    f"(mask_id={vocab.mask_id}, eos_id={vocab.eos_id})")
        try:
            canvas = Canvas.from_wire({"prompt": request["prompt"],
                                       "cells": request["cells"]})
        except (KeyError, TypeError, ValueError) as exc:
            raise BadRequest(f"bad canvas payload: {exc}") from exc
        for tok in canvas.prompt:
            if not 0 <= tok < vocab.vocab_size:
                raise BadRequest(f"prompt token {tok} outside vocabulary")
        for cell in canvas.cells:
            if cell.token is not None and not 0 <= cell.token < vocab.vocab_size:
                raise BadRequest(f"cell token {cell.token} outside vocabulary")
        if canvas.mask_count() == 0:
            raise BadRequest("canvas has no masked cells")
        with self._executor_lock:
            stats = self.model.stats_for(canvas)
        return {"stats": [{"id": s.cell_id, "predicted": s.predicted_token,
                           "confidence": s.confidence, "eos_prob": s.eos_prob}
                          for s in stats]}

    def tokenize(self, request: dict) -> dict:
        if not isinstance(request, dict) or not isinstance(request.get("text"), str):
            raise BadRequest("tokenize needs {'text': str}")
        try:
            tokens = self._tokenize(request["text"])
        except ValueError as exc:
            raise BadRequest(str(exc)) from exc
        bad = [t for t in tokens if not 0 <= t < self.model.vocab.vocab_size]
        if bad:
            raise BadRequest(f"tokens outside vocabulary: {bad}")
        return {"tokens": tokens}

    def detokenize(self, request: dict) -> dict:
        tokens = request.get("tokens") if isinstance(request, dict) else None
        if not isinstance(tokens, list) or not all(isinstance(t, int) for t in tokens):
            raise BadRequest("detokenize needs {'tokens': [int]}")
        return {"text": self._detokenize(tokens)}


def make_server(service: ModelService, host: str = "127.0.0.1",
                port: int = 0) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send(self, code: int, payload: dict):
            blob = json.dumps(payload).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(blob)))
            self.end_headers()
            self.wfile.write(blob)

        def do_GET(self):
            if self.path == "/healthz":
                if service.ready:
                    self._send(200, {"status": "ok",
                                     "model": service.model.descriptor})
                else:
                    self._send(503, {"error": "model not ready"})
            elif self.path == "/v1/vocab":
                self._send(200, service.vocab_payload())
            else:
                self._send(404, {"error": f"no route {self.path}"})

        def do_POST(self):
            routes = {"/v1/predict": service.predict,
                      "/v1/tokenize": service.tokenize,
                      "/v1/detokenize": service.detokenize}
            handler = routes.get(self.path)
            if handler is None:
                self._send(404, {"error": f"no route {self.path}"})
                return
            if not service.ready:
                self._send(503, {"error": "model not ready"})
                return
            try:
                length = int(self.headers.get("Content-Length", 0))
                request = json.loads(self.rfile.read(length) or b"null")
            except (ValueError, json.JSONDecodeError):
                self._send(400, {"error": "body is not valid JSON"})
                return
            try:
                self._send(200, handler(request))
            except BadRequest as exc:
                self._send(400, {"error": str(exc)})
            except Exception as exc:  # defensive: never kill the connection thread
                self._send(500, {"error": f"{type(exc).__name__}: {exc}"})

    return ThreadingHTTPServer((host, port), Handler)


class ServerThread:
    """Run a service on a background thread; handy for tests and demos."""

    def __init__(self, service: ModelService, host: str = "127.0.0.1", port: int = 0):
        self.server = make_server(service, host, port)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "ServerThread":
        self.thread.start()
        return self

    def __exit__(self, *exc_info):
        self.server.shutdown()
        self.server.server_close()
