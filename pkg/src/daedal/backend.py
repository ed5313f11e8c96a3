"""The model abstraction and its scripted implementation.

A backend answers one question: for every masked cell of a canvas, what
token would the model place there, with what probability, and how likely is
EOS at that position. That triple is everything the decoding loops consume,
so the contract transports it directly instead of full-vocabulary logits.

The scripted backend is a deterministic stand-in for a real model. Each
scenario drives predictions from a ground-truth target sequence and reports
high terminal EOS probability only once the response region is long enough,
which lets tests steer every branch of the decoders without a neural net.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Protocol, runtime_checkable

from .core import Canvas, PositionStats, TokenId, Vocab


@dataclass(slots=True)
class BackendResponse:
    """One :class:`PositionStats` per masked cell, in canvas order."""

    stats: list[PositionStats]

    def by_cell_id(self) -> dict[int, PositionStats]:
        return {s.cell_id: s for s in self.stats}


@runtime_checkable
class Backend(Protocol):
    """What the decoding loops require of a model."""

    @property
    def vocab(self) -> Vocab: ...

    def predict(self, canvas: Canvas) -> BackendResponse: ...


@dataclass
class ScriptedScenario:
    """Deterministic response script for one prompt.

    ``target`` is the full response the oracle intends: the k-th response
    cell predicts ``target[k]``, or EOS once the target is exhausted.
    ``confidence_profile`` maps cell ordinals to confidences (default 1.0).
    ``sufficiency_threshold`` is the ordinal where EOS padding begins: cells
    past it report EOS probability 1.0 once the response is at least that
    long, and ``insufficient_eos_prob`` (default 0.0) otherwise, emulating
    the length-sufficient / length-insufficient regimes of a real model.
    ``slack`` relaxes the threshold-vs-target validation for scenarios whose
    padding deliberately starts beyond the target.
    """

    target: list[TokenId]
    noise_seed: int = 0
    confidence_profile: dict[int, float] = field(default_factory=dict)
    sufficiency_threshold: int = 0
    insufficient_eos_prob: float = 0.0
    slack: int = 0

    def validate(self, vocab: Vocab) -> None:
        for tok in self.target:
            if tok == vocab.mask_id:
                raise ValueError("scenario target must not contain the mask token")
            if not 0 <= tok < vocab.vocab_size:
                raise ValueError(f"scenario target token {tok} outside vocabulary")
        if self.sufficiency_threshold < 0:
            raise ValueError("sufficiency_threshold must be non-negative")
        if self.sufficiency_threshold > len(self.target) + self.slack:
            raise ValueError(
                f"sufficiency_threshold {self.sufficiency_threshold} exceeds "
                f"|target| + slack = {len(self.target) + self.slack}"
            )
        for k, c in self.confidence_profile.items():
            if k < 0 or not 0.0 <= c <= 1.0:
                raise ValueError(f"confidence_profile entry {k}: {c} out of range")
        if not 0.0 <= self.insufficient_eos_prob <= 1.0:
            raise ValueError("insufficient_eos_prob must lie in [0, 1]")

    def predicted_token_at(self, ordinal: int, vocab: Vocab) -> TokenId:
        if ordinal < len(self.target):
            return self.target[ordinal]
        return vocab.eos_id

    def eos_prob_at(self, ordinal: int, response_length: int) -> float:
        if (response_length >= self.sufficiency_threshold
                and ordinal >= self.sufficiency_threshold):
            return 1.0
        return self.insufficient_eos_prob

    def confidence_at(self, ordinal: int) -> float:
        return self.confidence_profile.get(ordinal, 1.0)

    def to_dict(self) -> dict:
        return {
            "target": list(self.target),
            "noise_seed": self.noise_seed,
            "confidence_profile": {str(k): v for k, v in self.confidence_profile.items()},
            "sufficiency_threshold": self.sufficiency_threshold,
            "insufficient_eos_prob": self.insufficient_eos_prob,
            "slack": self.slack,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScriptedScenario":
        return cls(
            target=[int(t) for t in d["target"]],
            noise_seed=int(d.get("noise_seed", 0)),
            confidence_profile={int(k): float(v)
                                for k, v in d.get("confidence_profile", {}).items()},
            sufficiency_threshold=int(d.get("sufficiency_threshold", 0)),
            insufficient_eos_prob=float(d.get("insufficient_eos_prob", 0.0)),
            slack=int(d.get("slack", 0)),
        )


def scripted_predict(scenario: ScriptedScenario, canvas: Canvas, vocab: Vocab) -> BackendResponse:
    """Pure function of (scenario, canvas): stats for every masked cell."""
    length = len(canvas.cells)
    if length == 0 or canvas.mask_count() == 0:
        raise ValueError("predict requires a canvas with at least one masked cell")
    stats = []
    for ordinal, cell in enumerate(canvas.cells):
        if cell.token is not None:
            continue
        stats.append(PositionStats(
            cell_id=cell.cell_id,
            predicted_token=scenario.predicted_token_at(ordinal, vocab),
            confidence=scenario.confidence_at(ordinal),
            eos_prob=scenario.eos_prob_at(ordinal, length),
        ))
    return BackendResponse(stats=stats)


class ScriptedBackend:
    """Backend serving one scenario per prompt (or one default for all).

    Prompts are matched by their exact token tuple. Pure and therefore safe
    to share across concurrent runs.
    """

    def __init__(self, vocab: Vocab,
                 scenarios: Optional[dict[tuple[TokenId, ...], ScriptedScenario]] = None,
                 default: Optional[ScriptedScenario] = None):
        self._vocab = vocab
        self._scenarios = dict(scenarios or {})
        self._default = default
        for scn in self._scenarios.values():
            scn.validate(vocab)
        if default is not None:
            default.validate(vocab)

    @property
    def vocab(self) -> Vocab:
        return self._vocab

    def scenario_for(self, prompt: tuple[TokenId, ...]) -> ScriptedScenario:
        scn = self._scenarios.get(tuple(prompt), self._default)
        if scn is None:
            raise ValueError(f"no scenario scripted for prompt {list(prompt)!r}")
        return scn

    def predict(self, canvas: Canvas) -> BackendResponse:
        return scripted_predict(self.scenario_for(canvas.prompt), canvas, self._vocab)

    def to_dict(self) -> dict:
        out: dict = {"vocab": {"vocab_size": self._vocab.vocab_size,
                               "mask_id": self._vocab.mask_id,
                               "eos_id": self._vocab.eos_id}}
        if self._default is not None:
            out["default"] = self._default.to_dict()
        if self._scenarios:
            out["prompts"] = [{"tokens": list(p), "scenario": s.to_dict()}
                              for p, s in self._scenarios.items()]
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "ScriptedBackend":
        v = payload["vocab"]
        vocab = Vocab(int(v["vocab_size"]), int(v["mask_id"]), int(v["eos_id"]))
        default = (ScriptedScenario.from_dict(payload["default"])
                   if "default" in payload else None)
        scenarios = {}
        for entry in payload.get("prompts", []):
            key = tuple(int(t) for t in entry["tokens"])
            scenarios[key] = ScriptedScenario.from_dict(entry["scenario"])
        return cls(vocab, scenarios, default)


def save_scripted_backend(backend: ScriptedBackend, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(backend.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_scripted_backend(path) -> ScriptedBackend:
    with open(path, "r", encoding="utf-8") as fh:
        return ScriptedBackend.from_dict(json.load(fh))
