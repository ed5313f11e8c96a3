"""Domain types for the decoding engine.

A token is a plain non-negative ``int`` below the vocabulary size. The
response under construction is a :class:`Canvas`: an ordered list of cells,
each either masked or committed to a token. Cells carry stable ids minted
from a per-canvas counter, so positions can be referenced across the mask
insertions that shift raw indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

TokenId = int


@dataclass(frozen=True)
class Vocab:
    """Vocabulary constants the engine needs: size plus the two special ids."""

    vocab_size: int
    mask_id: TokenId
    eos_id: TokenId

    def __post_init__(self):
        if self.vocab_size <= 0:
            raise ValueError(f"vocab_size must be positive, got {self.vocab_size}")
        for name, tok in (("mask_id", self.mask_id), ("eos_id", self.eos_id)):
            if not 0 <= tok < self.vocab_size:
                raise ValueError(f"{name}={tok} outside [0, {self.vocab_size})")
        if self.mask_id == self.eos_id:
            raise ValueError("mask_id and eos_id must differ")


@dataclass(slots=True)
class Cell:
    """One response position. ``token is None`` means masked."""

    cell_id: int
    token: Optional[TokenId] = None

    @property
    def masked(self) -> bool:
        return self.token is None


@dataclass(slots=True)
class Canvas:
    """Prompt plus the evolving response region.

    The prompt is immutable for the lifetime of a run. ``next_cell_id`` is the
    id allocator: every fresh cell takes the counter's current value, so cell
    ids within one canvas are unique, monotone and never reused.
    """

    prompt: tuple[TokenId, ...]
    cells: list[Cell]
    next_cell_id: int

    def __len__(self) -> int:
        return len(self.cells)

    def masked_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.token is None]

    def mask_count(self) -> int:
        return sum(1 for c in self.cells if c.token is None)

    def cell_index(self, cell_id: int) -> int:
        for i, c in enumerate(self.cells):
            if c.cell_id == cell_id:
                return i
        raise ValueError(f"cell_id {cell_id} not present in canvas")

    def final_tokens(self) -> list[TokenId]:
        toks = []
        for c in self.cells:
            if c.token is None:
                raise ValueError("canvas still contains masked cells")
            toks.append(c.token)
        return toks

    def to_wire(self) -> dict:
        """Serialize to the flat record used by traces and the wire protocol."""
        return {
            "prompt": list(self.prompt),
            "cells": [{"id": c.cell_id, "token": c.token} for c in self.cells],
        }

    @classmethod
    def from_wire(cls, payload: dict) -> "Canvas":
        prompt = tuple(int(t) for t in payload["prompt"])
        cells = [Cell(int(c["id"]), None if c["token"] is None else int(c["token"]))
                 for c in payload["cells"]]
        next_id = max((c.cell_id for c in cells), default=-1) + 1
        return cls(prompt=prompt, cells=cells, next_cell_id=next_id)


def new_canvas(prompt: Sequence[TokenId], length: int, vocab: Vocab) -> Canvas:
    """Create a canvas of ``length`` masked cells with ids ``0..length-1``."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    for tok in prompt:
        if not 0 <= tok < vocab.vocab_size:
            raise ValueError(f"prompt token {tok} outside [0, {vocab.vocab_size})")
    return Canvas(
        prompt=tuple(prompt),
        cells=[Cell(i, None) for i in range(length)],
        next_cell_id=length,
    )


def append_masks(canvas: Canvas, count: int) -> Canvas:
    """Append ``count`` fresh masked cells at the response end."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    base = canvas.next_cell_id
    canvas.cells.extend(Cell(base + j, None) for j in range(count))
    canvas.next_cell_id = base + count
    return canvas


def replace_with_masks(canvas: Canvas, cell_id: int, count: int) -> Canvas:
    """Replace one masked cell with ``count`` fresh masked cells in place.

    Every other cell keeps its id and relative order; response length grows
    by ``count - 1``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    idx = canvas.cell_index(cell_id)
    if canvas.cells[idx].token is not None:
        raise ValueError(f"cell_id {cell_id} is committed; only masked cells expand")
    base = canvas.next_cell_id
    canvas.cells[idx:idx + 1] = [Cell(base + j, None) for j in range(count)]
    canvas.next_cell_id = base + count
    return canvas


@dataclass(slots=True)
class DaedalConfig:
    """Every tunable of the adaptive-length decoder.

    ``stage1_increment`` defaults to ``e_factor`` (the same block of masks is
    appended during length estimation as is inserted at an expansion point)
    but can be set independently, e.g. to coarsen the estimation grid.
    ``baseline_steps`` only matters for fixed-length baseline runs; ``None``
    means one step per token of requested length.
    """

    l_init: int = 64
    l_max: int = 2048
    tau_eos: float = 0.9
    tau_high: float = 0.9
    tau_low: float = 0.1
    tau_expand: float = 0.9
    e_factor: int = 8
    w_eos: int = 32
    stage1_increment: Optional[int] = None
    baseline_steps: Optional[int] = None

    def __post_init__(self):
        if self.stage1_increment is None:
            self.stage1_increment = self.e_factor
        if self.l_init < 1:
            raise ValueError(f"l_init must be positive, got {self.l_init}")
        if self.l_init > self.l_max:
            raise ValueError(f"l_init={self.l_init} exceeds l_max={self.l_max}")
        if self.e_factor < 2:
            raise ValueError(f"e_factor must be >= 2, got {self.e_factor}")
        if self.w_eos < 1 or self.w_eos > self.l_init:
            raise ValueError(f"w_eos must lie in [1, l_init], got {self.w_eos}")
        if self.stage1_increment < 1:
            raise ValueError("stage1_increment must be positive")
        if not 0.0 <= self.tau_eos <= 1.0:
            raise ValueError("tau_eos must lie in [0, 1]")
        if not 0.0 <= self.tau_high <= 1.0:
            raise ValueError("tau_high must lie in [0, 1]")
        if not 0.0 <= self.tau_low <= 1.0:
            raise ValueError("tau_low must lie in [0, 1]")
        if not 0.0 <= self.tau_expand <= 1.0:
            raise ValueError("tau_expand must lie in [0, 1]")
        if self.tau_low > self.tau_high:
            raise ValueError(f"tau_low={self.tau_low} exceeds tau_high={self.tau_high}")
        if self.baseline_steps is not None and self.baseline_steps < 1:
            raise ValueError("baseline_steps must be positive when set")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DaedalConfig":
        return cls(**d)


@dataclass(slots=True)
class PositionStats:
    """Per-position sufficient statistics from the model.

    ``confidence`` is the probability of ``predicted_token`` under the model's
    distribution at that position; ``eos_prob`` the probability of the EOS
    token there.
    """

    cell_id: int
    predicted_token: TokenId
    confidence: float
    eos_prob: float


@dataclass(slots=True)
class StepEvent:
    """One trace entry: a single backend pass plus its commit/expand outcome.

    ``phase`` is ``"stage1"``, ``"stage2"`` or ``"baseline"``; baseline events
    carry no EOS confidence (``None``) and never expand.
    """

    phase: str
    iteration: int
    eos_confidence: Optional[float]
    filled_cell_ids: list[int]
    expansion_cell_id: Optional[int]
    length_before: int
    length_after: int

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "iteration": self.iteration,
            "eos_confidence": self.eos_confidence,
            "filled_cell_ids": list(self.filled_cell_ids),
            "expansion_cell_id": self.expansion_cell_id,
            "length_before": self.length_before,
            "length_after": self.length_after,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StepEvent":
        return cls(
            phase=d["phase"],
            iteration=d["iteration"],
            eos_confidence=d["eos_confidence"],
            filled_cell_ids=list(d["filled_cell_ids"]),
            expansion_cell_id=d["expansion_cell_id"],
            length_before=d["length_before"],
            length_after=d["length_after"],
        )


@dataclass(slots=True)
class RunRecord:
    """Per-prompt output of a decode run."""

    prompt_id: str
    final_tokens: list[TokenId]
    n_token: int
    e_token: int
    e_ratio: float
    iterations: int
    expansions: int
    trace: list[StepEvent] = field(default_factory=list)

    def to_dict(self, trace_ref: Optional[str] = None) -> dict:
        """Flat record for results files; the trace is referenced, not inlined."""
        return {
            "prompt_id": self.prompt_id,
            "final_tokens": list(self.final_tokens),
            "n_token": self.n_token,
            "e_token": self.e_token,
            "e_ratio": self.e_ratio,
            "iterations": self.iterations,
            "expansions": self.expansions,
            "trace": trace_ref,
        }


def structurally_equal(a: Canvas, b: Canvas, ignore_cell_ids: bool = False) -> bool:
    """Compare two canvases; with ``ignore_cell_ids`` only states and order count."""
    if a.prompt != b.prompt or len(a.cells) != len(b.cells):
        return False
    for ca, cb in zip(a.cells, b.cells):
        if ca.token != cb.token:
            return False
        if not ignore_cell_ids and ca.cell_id != cb.cell_id:
            return False
    return True
