"""Append-only run traces: line-delimited JSON, one event per line.

The first line is the header, the last the footer; everything after the
header is the "body". Wall-clock data lives only in the header, so bodies of
two runs over the same scenario and configuration are byte-identical and can
be compared by hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backend import ScriptedScenario
from .core import DaedalConfig, RunRecord, StepEvent, TokenId, Vocab
from .errors import TraceParseError

TRACE_SUFFIX = ".trace.jsonl"


def _dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def run_record_digest(final_tokens: Sequence[TokenId], config: DaedalConfig) -> str:
    """Content digest over the run outcome; recomputable from tokens + config."""
    blob = _dumps({"config": config.to_dict(), "final_tokens": list(final_tokens)})
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(slots=True)
class TraceHeader:
    config: DaedalConfig
    backend_descriptor: str
    engine_version: str
    created_at: Optional[str] = None  # only timestamp field anywhere in a trace


@dataclass(slots=True)
class TraceFile:
    header: TraceHeader
    events: list[StepEvent] = field(default_factory=list)
    run_record_digest: str = ""

    @classmethod
    def for_run(cls, record: RunRecord, config: DaedalConfig,
                backend_descriptor: str, engine_version: str,
                created_at: Optional[str] = None) -> "TraceFile":
        return cls(
            header=TraceHeader(config, backend_descriptor, engine_version, created_at),
            events=list(record.trace),
            run_record_digest=run_record_digest(record.final_tokens, config),
        )


def write_trace(path, trace: TraceFile) -> None:
    header_line = _dumps({
        "kind": "header",
        "config": trace.header.config.to_dict(),
        "backend_descriptor": trace.header.backend_descriptor,
        "engine_version": trace.header.engine_version,
        "created_at": trace.header.created_at,
    })
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header_line + "\n")
        for ev in trace.events:
            fh.write(_dumps({"kind": "event", **ev.to_dict()}) + "\n")
        fh.write(_dumps({"kind": "footer",
                         "run_record_digest": trace.run_record_digest}) + "\n")


def read_trace(path) -> TraceFile:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceParseError("empty trace file", 1)
    records = []
    for lineno, line in enumerate(lines, start=1):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"invalid JSON: {exc.msg}", lineno) from exc
    if records[0].get("kind") != "header":
        raise TraceParseError("first line is not a header", 1)
    if records[-1].get("kind") != "footer":
        raise TraceParseError("missing footer; file truncated", len(lines))
    header = TraceHeader(
        config=DaedalConfig.from_dict(records[0]["config"]),
        backend_descriptor=records[0]["backend_descriptor"],
        engine_version=records[0]["engine_version"],
        created_at=records[0].get("created_at"),
    )
    events = []
    for lineno, rec in enumerate(records[1:-1], start=2):
        if rec.get("kind") != "event":
            raise TraceParseError(f"expected an event record, got {rec.get('kind')!r}", lineno)
        try:
            events.append(StepEvent.from_dict(rec))
        except KeyError as exc:
            raise TraceParseError(f"event missing field {exc}", lineno) from exc
    return TraceFile(header=header, events=events,
                     run_record_digest=records[-1]["run_record_digest"])


def trace_body_bytes(path) -> bytes:
    """Everything after the header line; the content-addressable portion."""
    with open(path, "rb") as fh:
        blob = fh.read()
    cut = blob.find(b"\n")
    if cut < 0:
        raise TraceParseError("missing header line", 1)
    return blob[cut + 1:]


def trace_body_hash(path) -> str:
    return hashlib.sha256(trace_body_bytes(path)).hexdigest()


def replay_final_tokens(trace: TraceFile, scenario: ScriptedScenario,
                        vocab: Vocab) -> list[TokenId]:
    """Reconstruct the final token sequence from a trace without a backend.

    Cell ids are minted deterministically, so the event log plus the
    scenario's prediction rule pins down every commit: a cell filled at
    ordinal k takes the scenario's prediction for ordinal k at that moment.
    """
    config = trace.header.config
    cells: list[list] = [[i, None] for i in range(config.l_init)]
    next_id = config.l_init
    for ev in trace.events:
        if ev.phase == "stage1":
            for _ in range(ev.length_after - ev.length_before):
                cells.append([next_id, None])
                next_id += 1
            continue
        ordinal_of = {cid: k for k, (cid, _) in enumerate(cells)}
        for cid in ev.filled_cell_ids:
            k = ordinal_of[cid]
            cells[k][1] = scenario.predicted_token_at(k, vocab)
        if ev.expansion_cell_id is not None:
            count = ev.length_after - ev.length_before + 1
            at = ordinal_of[ev.expansion_cell_id]
            cells[at:at + 1] = [[next_id + j, None] for j in range(count)]
            next_id += count
    if any(tok is None for _, tok in cells):
        raise ValueError("trace does not cover a completed run")
    return [tok for _, tok in cells]
