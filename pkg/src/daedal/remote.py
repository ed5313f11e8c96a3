"""HTTP client for the model-server wire protocol.

One canvas per POST to ``/v1/predict``; the response carries the per-masked-
cell sufficient statistics. Transport failures surface as
:class:`BackendUnavailable` (retryable); contract violations as
:class:`ProtocolError`.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request

from .backend import BackendResponse
from .core import Canvas, PositionStats, Vocab
from .errors import BackendUnavailable, ProtocolError

DEFAULT_TIMEOUT = 30.0


def _post_json(url: str, payload: dict, timeout: float) -> dict:
    body = json.dumps(payload).encode("utf-8")
    req = urllib.request.Request(url, data=body,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            raw = resp.read()
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", "replace")
        if exc.code == 503:
            raise BackendUnavailable(f"server not ready: {detail}") from exc
        raise ProtocolError(f"HTTP {exc.code}: {detail}") from exc
    except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
        raise BackendUnavailable(f"cannot reach {url}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON body from {url}") from exc


def _get_json(url: str, timeout: float) -> dict:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        raise BackendUnavailable(f"HTTP {exc.code} from {url}") from exc
    except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
        raise BackendUnavailable(f"cannot reach {url}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON body from {url}") from exc


def fetch_vocab(endpoint: str, timeout: float = DEFAULT_TIMEOUT) -> Vocab:
    """Read the server's vocabulary constants so ids are never hard-coded."""
    payload = _get_json(endpoint.rstrip("/") + "/v1/vocab", timeout)
    try:
        return Vocab(int(payload["vocab_size"]), int(payload["mask_id"]),
                     int(payload["eos_id"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"invalid vocab payload: {payload!r}") from exc


def remote_predict(endpoint: str, canvas: Canvas, vocab: Vocab,
                   timeout: float = DEFAULT_TIMEOUT) -> BackendResponse:
    masked_ids = [c.cell_id for c in canvas.cells if c.token is None]
    if not masked_ids:
        raise ValueError("predict requires a canvas with at least one masked cell")
    request = {
        **canvas.to_wire(),
        "vocab": {"mask_id": vocab.mask_id, "eos_id": vocab.eos_id},
    }
    payload = _post_json(endpoint.rstrip("/") + "/v1/predict", request, timeout)
    try:
        entries = payload["stats"]
        stats = [PositionStats(cell_id=int(e["id"]),
                               predicted_token=int(e["predicted"]),
                               confidence=float(e["confidence"]),
                               eos_prob=float(e["eos_prob"]))
                 for e in entries]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"invalid stats payload: {exc}") from exc
    if [s.cell_id for s in stats] != masked_ids:
        raise ProtocolError(
            f"stats cover cells {[s.cell_id for s in stats]}, "
            f"expected the {len(masked_ids)} masked cells {masked_ids}")
    for s in stats:
        if s.predicted_token == vocab.mask_id:
            raise ProtocolError(f"cell {s.cell_id} predicted the mask token")
    return BackendResponse(stats=stats)


class RemoteBackend:
    """Backend talking to a model server over the wire protocol."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT,
                 vocab: Vocab | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._vocab = vocab if vocab is not None else fetch_vocab(endpoint, timeout)

    @property
    def vocab(self) -> Vocab:
        return self._vocab

    def predict(self, canvas: Canvas) -> BackendResponse:
        return remote_predict(self.endpoint, canvas, self._vocab, self.timeout)
