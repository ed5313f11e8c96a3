"""Benchmark orchestration: prompt ingestion, run execution, persistence.

Prompts arrive as JSON lines carrying either pre-tokenized ids or raw text
(tokenized by a pluggable codec; the identity codec reads whitespace-
separated ids). Runs execute in a thread pool, one in-flight backend call
per run, and results land as a records file, one trace file per prompt and
an aggregate summary.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__ as engine_version
from .backend import Backend, load_scripted_backend
from .controller import run_daedal
from .core import DaedalConfig, RunRecord, TokenId, new_canvas
from .decode import baseline_decode
from .errors import BackendUnavailable, ProtocolError
from .metrics import Summary, aggregate
from .remote import RemoteBackend
from .tracing import TRACE_SUFFIX, TraceFile, write_trace

Tokenizer = Callable[[str], list[int]]


def identity_tokenize(text: str) -> list[int]:
    """Whitespace-separated token ids; the codec used for scripted suites."""
    try:
        return [int(part) for part in text.split()]
    except ValueError as exc:
        raise ValueError(f"identity tokenizer expects integer tokens: {text!r}") from exc


def identity_detokenize(tokens: Sequence[int]) -> str:
    return " ".join(str(t) for t in tokens)


@dataclass(slots=True)
class PromptEntry:
    prompt_id: str
    tokens: list[TokenId]
    group: Optional[str] = None


def load_prompts(path, tokenizer: Tokenizer = identity_tokenize) -> list[PromptEntry]:
    entries: list[PromptEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "id" not in row:
                raise ValueError(f"{path}:{lineno}: prompt entry missing 'id'")
            if "tokens" in row:
                tokens = [int(t) for t in row["tokens"]]
            elif "text" in row:
                tokens = tokenizer(row["text"])
            else:
                raise ValueError(f"{path}:{lineno}: entry needs 'tokens' or 'text'")
            entries.append(PromptEntry(str(row["id"]), tokens, row.get("group")))
    if not entries:
        raise ValueError(f"{path}: no prompts found")
    return entries


def make_backend(descriptor: str) -> Backend:
    """Build a backend from ``scripted:PATH`` or ``remote:URL``."""
    kind, sep, arg = descriptor.partition(":")
    if not sep or not arg:
        raise ValueError(f"backend descriptor {descriptor!r} must look like kind:arg")
    if kind == "scripted":
        return load_scripted_backend(arg)
    if kind == "remote":
        return RemoteBackend(arg)
    raise ValueError(f"unknown backend kind {kind!r}")


def _baseline_config(config: DaedalConfig, length: int, steps: int) -> DaedalConfig:
    """Configuration snapshot a fixed-length run is traced under."""
    return replace(config, l_init=length, l_max=length,
                   w_eos=min(config.w_eos, length), baseline_steps=steps)


def execute_prompt(entry: PromptEntry, mode: str, config: DaedalConfig,
                   backend: Backend) -> tuple[RunRecord, DaedalConfig]:
    """Run one prompt; returns the record and the config it ran under."""
    if mode == "daedal":
        return run_daedal(entry.tokens, config, backend, prompt_id=entry.prompt_id), config
    if mode == "baseline":
        length = config.l_init
        steps = config.baseline_steps if config.baseline_steps is not None else length
        run_cfg = _baseline_config(config, length, steps)
        record = baseline_decode(entry.tokens, length, steps, backend,
                                 prompt_id=entry.prompt_id)
        return record, run_cfg
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(slots=True)
class SuiteResult:
    records: list[RunRecord]
    failures: list[tuple[str, str]]  # (prompt_id, error)
    summary: Optional[Summary]


def run_suite(prompts: Sequence[PromptEntry], mode: str, config: DaedalConfig,
              backend: Backend, out_dir, backend_descriptor: str = "",
              concurrency: int = 1, resume: bool = False,
              bin_width: int = 64) -> SuiteResult:
    """Execute a prompt suite and persist records, traces and the summary.

    With ``resume``, prompts that already have a successful record are
    skipped and prior records fold into the aggregate unchanged.
    """
    os.makedirs(out_dir, exist_ok=True)
    traces_dir = os.path.join(out_dir, "traces")
    os.makedirs(traces_dir, exist_ok=True)
    records_path = os.path.join(out_dir, "records.jsonl")

    prior_rows: list[dict] = []
    done_ids: set[str] = set()
    if resume and os.path.exists(records_path):
        with open(records_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                if "error" not in row:
                    prior_rows.append(row)
                    done_ids.add(row["prompt_id"])
    todo = [e for e in prompts if e.prompt_id not in done_ids]

    def _one(entry: PromptEntry):
        try:
            record, run_cfg = execute_prompt(entry, mode, config, backend)
            return entry.prompt_id, record, run_cfg, None
        except (BackendUnavailable, ProtocolError, ValueError) as exc:
            return entry.prompt_id, None, None, f"{type(exc).__name__}: {exc}"

    if concurrency > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            outcomes = list(pool.map(_one, todo))
    else:
        outcomes = [_one(e) for e in todo]

    records: list[RunRecord] = []
    failures: list[tuple[str, str]] = []
    new_rows: list[dict] = []
    for prompt_id, record, run_cfg, error in outcomes:
        if error is not None:
            failures.append((prompt_id, error))
            new_rows.append({"prompt_id": prompt_id, "error": error})
            continue
        trace_name = f"{prompt_id}{TRACE_SUFFIX}"
        trace = TraceFile.for_run(record, run_cfg, backend_descriptor, engine_version,
                                  created_at=datetime.now(timezone.utc).isoformat())
        write_trace(os.path.join(traces_dir, trace_name), trace)
        records.append(record)
        new_rows.append(record.to_dict(trace_ref=f"traces/{trace_name}"))

    with open(records_path, "w", encoding="utf-8") as fh:
        for row in prior_rows + new_rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    all_rows = prior_rows + [r for r in new_rows if "error" not in r]
    summary = None
    if all_rows:
        restored = [RunRecord(prompt_id=r["prompt_id"], final_tokens=r["final_tokens"],
                              n_token=r["n_token"], e_token=r["e_token"],
                              e_ratio=r["e_ratio"], iterations=r["iterations"],
                              expansions=r["expansions"], trace=[])
                    for r in all_rows]
        summary = aggregate(restored, bin_width=bin_width)
        with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return SuiteResult(records=records, failures=failures, summary=summary)


def run_sweep(prompts: Sequence[PromptEntry], config: DaedalConfig, backend: Backend,
              lengths: Sequence[int], out_dir, backend_descriptor: str = "",
              concurrency: int = 1, resume: bool = False) -> dict[int, SuiteResult]:
    """Fixed-length baseline at each requested length, one summary per column."""
    os.makedirs(out_dir, exist_ok=True)
    results: dict[int, SuiteResult] = {}
    for length in lengths:
        sub_cfg = replace(config, l_init=length, l_max=max(config.l_max, length),
                          w_eos=min(config.w_eos, length))
        results[length] = run_suite(
            prompts, "baseline", sub_cfg, backend,
            os.path.join(out_dir, f"L{length}"), backend_descriptor,
            concurrency=concurrency, resume=resume,
        )
    combined = {
        str(length): (res.summary.to_dict() if res.summary else None)
        for length, res in results.items()
    }
    with open(os.path.join(out_dir, "sweep.json"), "w", encoding="utf-8") as fh:
        json.dump(combined, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return results


def diagnose_eos_signal(prompts: Sequence[PromptEntry], length: int,
                        backend: Backend, w_eos: int) -> dict:
    """Terminal EOS probability of the first prediction, by sufficiency group.

    Each prompt gets exactly one backend pass on a fully masked canvas of the
    given length; the report contains per-group means over the last ``w_eos``
    positions and the sufficient-minus-insufficient difference per position.
    """
    if w_eos < 1 or w_eos > length:
        raise ValueError(f"w_eos={w_eos} must lie in [1, length={length}]")
    groups: dict[str, list[PromptEntry]] = {"sufficient": [], "insufficient": []}
    for entry in prompts:
        if entry.group not in groups:
            raise ValueError(
                f"prompt {entry.prompt_id!r} needs group sufficient/insufficient, "
                f"got {entry.group!r}")
        groups[entry.group].append(entry)
    for name, members in groups.items():
        if not members:
            raise ValueError(f"group {name!r} is empty")

    window_means: dict[str, np.ndarray] = {}
    for name, members in groups.items():
        rows = []
        for entry in members:
            canvas = new_canvas(entry.tokens, length, backend.vocab)
            stats = backend.predict(canvas)
            rows.append([s.eos_prob for s in stats.stats[length - w_eos:]])
        window_means[name] = np.asarray(rows, dtype=np.float64).mean(axis=0)

    sufficient = window_means["sufficient"]
    insufficient = window_means["insufficient"]
    difference = sufficient - insufficient
    per_position = [
        {"ordinal": length - w_eos + k,
         "sufficient": float(sufficient[k]),
         "insufficient": float(insufficient[k]),
         "difference": float(difference[k])}
        for k in range(w_eos)
    ]
    return {
        "length": length,
        "w_eos": w_eos,
        "group_sizes": {name: len(members) for name, members in groups.items()},
        "mean_terminal_eos": {
            "sufficient": float(sufficient.mean()),
            "insufficient": float(insufficient.mean()),
        },
        "difference": [float(d) for d in difference],
        "per_position": per_position,
    }
