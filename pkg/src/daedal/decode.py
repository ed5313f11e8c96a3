"""Shared denoising machinery: selection rules and the fixed-length baseline.

Thresholds are strict everywhere: a cell fills when its confidence is
strictly above ``tau_high``, is an expansion candidate strictly below
``tau_low``, and length grows only while the EOS confidence is strictly
below its threshold. Confidence ties break toward the smallest cell ordinal
so runs are fully deterministic.
"""

from __future__ import annotations

import math
from typing import Sequence

from .backend import Backend, BackendResponse
from .core import Canvas, Cell, RunRecord, StepEvent, TokenId, Vocab, new_canvas
from .metrics import effective_tokens, e_ratio


def compute_eos_confidence(cells: Sequence[Cell], stats: BackendResponse,
                           w_eos: int, vocab: Vocab) -> float:
    """Mean EOS probability over the last ``w_eos`` response cells.

    Masked cells contribute the model's EOS probability; committed cells
    contribute 1.0 when they hold EOS and 0.0 otherwise — a committed EOS is
    maximal evidence of termination.
    """
    if w_eos < 1:
        raise ValueError(f"w_eos must be >= 1, got {w_eos}")
    if w_eos > len(cells):
        raise ValueError(f"w_eos={w_eos} exceeds response length {len(cells)}")
    eos_by_id = {s.cell_id: s.eos_prob for s in stats.stats}
    total = 0.0
    for cell in cells[len(cells) - w_eos:]:
        if cell.token is None:
            total += eos_by_id[cell.cell_id]
        elif cell.token == vocab.eos_id:
            total += 1.0
    return total / w_eos


def select_fill_set(stats: BackendResponse, tau_high: float) -> list[int]:
    """Cell ids with confidence above ``tau_high``, in canvas order.

    When nothing clears the threshold the single highest-confidence cell is
    returned instead (first one on ties), guaranteeing at least one commit
    per pass.
    """
    if not stats.stats:
        raise ValueError("select_fill_set requires non-empty stats")
    chosen = [s.cell_id for s in stats.stats if s.confidence > tau_high]
    if chosen:
        return chosen
    best = stats.stats[0]
    for s in stats.stats[1:]:
        if s.confidence > best.confidence:
            best = s
    return [best.cell_id]


def select_candidates(stats: BackendResponse, tau_low: float) -> list[int]:
    """Cell ids with confidence strictly below ``tau_low``, in canvas order."""
    if not stats.stats:
        raise ValueError("select_candidates requires non-empty stats")
    return [s.cell_id for s in stats.stats if s.confidence < tau_low]


def commit_fills(canvas: Canvas, stats: BackendResponse, fill_set: Sequence[int]) -> Canvas:
    """Commit each selected masked cell to its predicted token, in place."""
    preds = {s.cell_id: s.predicted_token for s in stats.stats}
    cells_by_id = {c.cell_id: c for c in canvas.cells}
    for cid in fill_set:
        cell = cells_by_id.get(cid)
        if cell is None:
            raise ValueError(f"fill_set cell_id {cid} not present in canvas")
        if cell.token is not None:
            raise ValueError(f"fill_set cell_id {cid} is already committed")
        if cid not in preds:
            raise ValueError(f"fill_set cell_id {cid} has no stats entry")
        cell.token = preds[cid]
    return canvas


def baseline_decode(prompt: Sequence[TokenId], length: int, steps: int,
                    backend: Backend, prompt_id: str = "") -> RunRecord:
    """Fixed-length denoising: commit a token-budget quota per step.

    With M masks remaining and R steps left, the ceil(M / R) highest-
    confidence masked cells commit, so exactly ``length`` tokens commit over
    at most ``steps`` backend passes and the response never grows.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    canvas = new_canvas(prompt, length, backend.vocab)
    events: list[StepEvent] = []
    for step in range(1, steps + 1):
        remaining = canvas.mask_count()
        if remaining == 0:
            break
        quota = math.ceil(remaining / (steps - step + 1))
        stats = backend.predict(canvas)
        ranked = sorted(range(len(stats.stats)),
                        key=lambda i: (-stats.stats[i].confidence, i))
        fill = sorted(ranked[:quota])
        fill_ids = [stats.stats[i].cell_id for i in fill]
        commit_fills(canvas, stats, fill_ids)
        events.append(StepEvent(
            phase="baseline", iteration=step, eos_confidence=None,
            filled_cell_ids=fill_ids, expansion_cell_id=None,
            length_before=length, length_after=length,
        ))
    final = canvas.final_tokens()
    e_tok = effective_tokens(final, backend.vocab)
    return RunRecord(
        prompt_id=prompt_id, final_tokens=final, n_token=length, e_token=e_tok,
        e_ratio=e_ratio(e_tok, length), iterations=len(events), expansions=0,
        trace=events,
    )
