"""Adaptive-length decoding engine for masked-diffusion language models.

The engine denoises a masked response region either at a fixed preset length
(the classic baseline) or adaptively: a short response grows until the
model's own end-of-sequence signal says the length suffices, and keeps
growing locally wherever predictions stay too uncertain to commit.
"""

__version__ = "0.1.0"

from .backend import (
    Backend,
    BackendResponse,
    ScriptedBackend,
    ScriptedScenario,
    load_scripted_backend,
    save_scripted_backend,
    scripted_predict,
)
from .controller import backend_call_bound, run_daedal, stage1_adjust, stage2_decode
from .core import (
    Canvas,
    Cell,
    DaedalConfig,
    PositionStats,
    RunRecord,
    StepEvent,
    TokenId,
    Vocab,
    append_masks,
    new_canvas,
    replace_with_masks,
    structurally_equal,
)
from .decode import (
    baseline_decode,
    commit_fills,
    compute_eos_confidence,
    select_candidates,
    select_fill_set,
)
from .errors import BackendUnavailable, ProtocolError, TraceParseError
from .masking import forward_mask
from .metrics import Summary, aggregate, e_ratio, effective_tokens, length_histogram
from .reference import reference_interpret
from .remote import RemoteBackend, fetch_vocab, remote_predict
from .tracing import (
    TraceFile,
    TraceHeader,
    read_trace,
    replay_final_tokens,
    run_record_digest,
    trace_body_hash,
    write_trace,
)

__all__ = [
    "Backend", "BackendResponse", "BackendUnavailable", "Canvas", "Cell",
    "DaedalConfig", "PositionStats", "ProtocolError", "RemoteBackend",
    "RunRecord", "ScriptedBackend", "ScriptedScenario", "StepEvent", "Summary",
    "TokenId", "TraceFile", "TraceHeader", "TraceParseError", "Vocab",
    "aggregate", "append_masks", "backend_call_bound", "baseline_decode",
    "commit_fills", "compute_eos_confidence", "e_ratio", "effective_tokens",
    "fetch_vocab", "forward_mask", "length_histogram", "load_scripted_backend",
    "new_canvas", "read_trace", "reference_interpret", "remote_predict",
    "replace_with_masks", "replay_final_tokens", "run_daedal",
    "run_record_digest", "save_scripted_backend", "scripted_predict",
    "select_candidates", "select_fill_set", "stage1_adjust", "stage2_decode",
    "structurally_equal", "trace_body_hash", "write_trace",
]
