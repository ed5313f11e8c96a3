"""Two-stage adaptive-length decoding.

Stage 1 grows a fully masked response until the model's mean EOS probability
over the terminal window clears ``tau_eos`` (or the hard length cap is hit).
Stage 2 is the denoising loop: each pass commits every high-confidence
prediction, then — while the terminal EOS confidence stays low and room
remains — replaces the single lowest-confidence masked cell with a block of
fresh masks, giving the model more room exactly where it is struggling.

One backend pass per loop iteration; the expansion decision reuses that
pass's statistics against the post-fill cell states. Expansion blocks are
clamped so the response never exceeds ``l_max``.
"""

from __future__ import annotations

from typing import Sequence

from .backend import Backend
from .core import (
    Canvas, DaedalConfig, RunRecord, StepEvent, TokenId,
    append_masks, new_canvas, replace_with_masks,
)
from .decode import (
    commit_fills, compute_eos_confidence, select_candidates, select_fill_set,
)
from .metrics import effective_tokens, e_ratio


def stage1_adjust(prompt: Sequence[TokenId], config: DaedalConfig,
                  backend: Backend) -> tuple[Canvas, list[StepEvent]]:
    """Initial length adjustment: append masks until EOS confidence clears.

    Returns the still fully masked canvas plus one event per estimation pass.
    The loop is bounded: each pass either grows the response or breaks.
    """
    canvas = new_canvas(prompt, config.l_init, backend.vocab)
    events: list[StepEvent] = []
    iteration = 0
    while len(canvas) < config.l_max:
        iteration += 1
        stats = backend.predict(canvas)
        conf_eos = compute_eos_confidence(canvas.cells, stats, config.w_eos, backend.vocab)
        length_before = len(canvas)
        grow = conf_eos < config.tau_eos
        if grow:
            append_masks(canvas, min(config.stage1_increment, config.l_max - len(canvas)))
        events.append(StepEvent(
            phase="stage1", iteration=iteration, eos_confidence=conf_eos,
            filled_cell_ids=[], expansion_cell_id=None,
            length_before=length_before, length_after=len(canvas),
        ))
        if not grow:
            break
    return canvas, events


def stage2_decode(canvas: Canvas, config: DaedalConfig,
                  backend: Backend) -> tuple[Canvas, list[StepEvent]]:
    """Iterative denoising with on-demand mask insertion.

    Fills at least one cell per pass, so the loop terminates within
    ``l_max`` iterations.
    """
    if canvas.mask_count() == 0:
        raise ValueError("stage2_decode requires at least one masked cell")
    events: list[StepEvent] = []
    iteration = 0
    while canvas.mask_count() > 0:
        iteration += 1
        stats = backend.predict(canvas)
        fill_ids = select_fill_set(stats, config.tau_high)
        commit_fills(canvas, stats, fill_ids)
        conf_eos = compute_eos_confidence(canvas.cells, stats, config.w_eos, backend.vocab)
        length_before = len(canvas)
        expansion_id = None
        if conf_eos < config.tau_expand and len(canvas) < config.l_max:
            still_masked = {c.cell_id for c in canvas.cells if c.token is None}
            candidates = [cid for cid in select_candidates(stats, config.tau_low)
                          if cid in still_masked]
            if candidates:
                conf = stats.by_cell_id()
                expansion_id = candidates[0]
                for cid in candidates[1:]:
                    if conf[cid].confidence < conf[expansion_id].confidence:
                        expansion_id = cid
                count = min(config.e_factor, config.l_max - len(canvas) + 1)
                replace_with_masks(canvas, expansion_id, count)
        events.append(StepEvent(
            phase="stage2", iteration=iteration, eos_confidence=conf_eos,
            filled_cell_ids=fill_ids, expansion_cell_id=expansion_id,
            length_before=length_before, length_after=len(canvas),
        ))
    return canvas, events


def run_daedal(prompt: Sequence[TokenId], config: DaedalConfig,
               backend: Backend, prompt_id: str = "") -> RunRecord:
    """Full two-stage run: length adjustment, then denoising to completion."""
    canvas, events = stage1_adjust(prompt, config, backend)
    canvas, stage2_events = stage2_decode(canvas, config, backend)
    events.extend(stage2_events)
    final = canvas.final_tokens()
    e_tok = effective_tokens(final, backend.vocab)
    return RunRecord(
        prompt_id=prompt_id,
        final_tokens=final,
        n_token=len(final),
        e_token=e_tok,
        e_ratio=e_ratio(e_tok, len(final)),
        iterations=len(events),
        expansions=sum(1 for ev in events if ev.expansion_cell_id is not None),
        trace=events,
    )


def backend_call_bound(config: DaedalConfig) -> int:
    """Worst-case backend passes for one run under this configuration."""
    stage1_passes = -(-(config.l_max - config.l_init) // config.stage1_increment) + 1
    return config.l_max + stage1_passes
