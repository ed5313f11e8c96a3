"""Straight-line reference decoder used as an equivalence oracle in tests.

This module re-derives the whole two-stage procedure over plain
``(cell_id, token)`` pairs without importing any of the selection helpers or
the controller, so tests can demand field-identical run records from two
implementations that share only the data types and the backend. Keep it
naive; clarity over speed, and no refactoring toward the production path.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .backend import Backend
from .core import Canvas, Cell, DaedalConfig, RunRecord, StepEvent, TokenId


def _as_canvas(prompt: Sequence[TokenId], pairs: list[list], next_id: int) -> Canvas:
    return Canvas(prompt=tuple(prompt),
                  cells=[Cell(cid, tok) for cid, tok in pairs],
                  next_cell_id=next_id)


def _window_eos(pairs: list[list], eos_by_id: dict[int, float],
                w_eos: int, eos_id: int) -> float:
    vals = []
    for cid, tok in pairs[len(pairs) - w_eos:]:
        if tok is None:
            vals.append(eos_by_id[cid])
        elif tok == eos_id:
            vals.append(1.0)
        else:
            vals.append(0.0)
    return sum(vals) / w_eos


def reference_interpret(prompt: Sequence[TokenId], config: DaedalConfig,
                        backend: Backend, prompt_id: str = "") -> RunRecord:
    """Run the two-stage procedure naively; observably equal to the engine."""
    vocab = backend.vocab
    pairs: list[list] = [[i, None] for i in range(config.l_init)]
    next_id = config.l_init
    events: list[StepEvent] = []

    # stage 1: grow while the terminal window looks non-final
    passes = 0
    while len(pairs) < config.l_max:
        passes += 1
        response = backend.predict(_as_canvas(prompt, pairs, next_id))
        eos_by_id = {s.cell_id: s.eos_prob for s in response.stats}
        conf_eos = _window_eos(pairs, eos_by_id, config.w_eos, vocab.eos_id)
        before = len(pairs)
        grow = conf_eos < config.tau_eos
        if grow:
            for _ in range(min(config.stage1_increment, config.l_max - len(pairs))):
                pairs.append([next_id, None])
                next_id += 1
        events.append(StepEvent("stage1", passes, conf_eos, [], None, before, len(pairs)))
        if not grow:
            break

    # stage 2: fill high-confidence cells, insert masks at the weakest spot
    passes = 0
    while any(tok is None for _, tok in pairs):
        passes += 1
        response = backend.predict(_as_canvas(prompt, pairs, next_id))
        conf_by_id = {s.cell_id: s.confidence for s in response.stats}
        pred_by_id = {s.cell_id: s.predicted_token for s in response.stats}
        eos_by_id = {s.cell_id: s.eos_prob for s in response.stats}

        masked_ids = [cid for cid, tok in pairs if tok is None]
        fill = [cid for cid in masked_ids if conf_by_id[cid] > config.tau_high]
        if not fill:
            best = masked_ids[0]
            for cid in masked_ids[1:]:
                if conf_by_id[cid] > conf_by_id[best]:
                    best = cid
            fill = [best]
        for pair in pairs:
            if pair[0] in fill:
                pair[1] = pred_by_id[pair[0]]

        conf_eos = _window_eos(pairs, eos_by_id, config.w_eos, vocab.eos_id)
        before = len(pairs)
        expansion: Optional[int] = None
        if conf_eos < config.tau_expand and len(pairs) < config.l_max:
            candidates = [cid for cid, tok in pairs
                          if tok is None and conf_by_id[cid] < config.tau_low]
            if candidates:
                expansion = candidates[0]
                for cid in candidates[1:]:
                    if conf_by_id[cid] < conf_by_id[expansion]:
                        expansion = cid
                count = min(config.e_factor, config.l_max - len(pairs) + 1)
                at = next(i for i, p in enumerate(pairs) if p[0] == expansion)
                pairs[at:at + 1] = [[next_id + j, None] for j in range(count)]
                next_id += count
        events.append(StepEvent("stage2", passes, conf_eos, fill, expansion,
                                before, len(pairs)))

    final = [tok for _, tok in pairs]
    e_tok = len(final)
    while e_tok > 0 and final[e_tok - 1] == vocab.eos_id:
        e_tok -= 1
    return RunRecord(
        prompt_id=prompt_id,
        final_tokens=final,
        n_token=len(final),
        e_token=e_tok,
        e_ratio=e_tok / len(final),
        iterations=len(events),
        expansions=sum(1 for ev in events if ev.expansion_cell_id is not None),
        trace=events,
    )
