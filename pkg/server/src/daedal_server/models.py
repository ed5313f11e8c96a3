"""Model adapters: anything that yields per-masked-cell statistics.

Two families: passthrough (a scripted suite answered directly, for
deterministic testing and cross-process fidelity checks) and logits-backed
(one forward pass, softmax at masked positions, reduced to the argmax token,
its probability and the EOS probability). The mask token is never a valid
output, so it is excluded from the served distribution.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np

from daedal import Canvas, PositionStats, ScriptedBackend, Vocab, load_scripted_backend


class Model(Protocol):
    """What the HTTP layer needs from a model."""

    @property
    def vocab(self) -> Vocab: ...

    @property
    def descriptor(self) -> str: ...

    def stats_for(self, canvas: Canvas) -> list[PositionStats]: ...


class PassthroughModel:
    """Serves a scripted suite; responses match the in-process backend exactly."""

    def __init__(self, backend: ScriptedBackend, descriptor: str = "scripted"):
        self._backend = backend
        self._descriptor = descriptor

    @classmethod
    def from_file(cls, path) -> "PassthroughModel":
        return cls(load_scripted_backend(path), descriptor=f"scripted:{path}")

    @property
    def vocab(self) -> Vocab:
        return self._backend.vocab

    @property
    def descriptor(self) -> str:
        return self._descriptor

    def stats_for(self, canvas: Canvas) -> list[PositionStats]:
        return self._backend.predict(canvas).stats


def reduce_logits_row(row: np.ndarray, vocab: Vocab) -> tuple[int, float, float]:
    """Softmax one position at temperature 1.0 and keep the decisive numbers.

    Returns (argmax token, its probability, EOS probability) with the mask
    token removed from the distribution.
    """
    z = np.asarray(row, dtype=np.float64).copy()
    z[vocab.mask_id] = -np.inf
    z -= z.max()
    p = np.exp(z)
    p /= p.sum()
    pred = int(p.argmax())
    return pred, float(p[pred]), float(p[vocab.eos_id])


class LogitsModel:
    """Reduces full-vocabulary logits to sufficient statistics.

    ``logits_fn(tokens, response_start)`` must return an array of shape
    ``(len(tokens), vocab_size)`` for the assembled sequence (prompt followed
    by the response cells, masked cells encoded as the mask id).
    """

    def __init__(self, logits_fn, vocab: Vocab, descriptor: str = "logits"):
        self._logits_fn = logits_fn
        self._vocab = vocab
        self._descriptor = descriptor

    @property
    def vocab(self) -> Vocab:
        return self._vocab

    @property
    def descriptor(self) -> str:
        return self._descriptor

    def assemble(self, canvas: Canvas) -> list[int]:
        mask = self._vocab.mask_id
        return list(canvas.prompt) + [mask if c.token is None else c.token
                                      for c in canvas.cells]

    def stats_for(self, canvas: Canvas) -> list[PositionStats]:
        tokens = self.assemble(canvas)
        response_start = len(canvas.prompt)
        logits = np.asarray(self._logits_fn(tokens, response_start), dtype=np.float64)
        if logits.shape != (len(tokens), self._vocab.vocab_size):
            raise ValueError(
                f"logits shape {logits.shape} != ({len(tokens)}, "
                f"{self._vocab.vocab_size})")
        stats = []
        for offset, cell in enumerate(canvas.cells):
            if cell.token is not None:
                continue
            pred, conf, eos = reduce_logits_row(logits[response_start + offset],
                                                self._vocab)
            stats.append(PositionStats(cell_id=cell.cell_id, predicted_token=pred,
                                       confidence=conf, eos_prob=eos))
        return stats


class ToyDiffusionModel:
    """Deterministic synthetic logits with a prompt-dependent answer length.

    Stands in for a real masked-diffusion LM in smoke tests: content logits
    dominate up to a boundary derived from the prompt, EOS logits dominate
    beyond it, plus small seeded noise. Different prompts therefore want
    different lengths, which is exactly what adaptive decoding should find.
    """

    def __init__(self, vocab: Vocab, seed: int = 0,
                 min_answer: int = 20, answer_spread: int = 60):
        self.vocab = vocab
        self.seed = seed
        self.min_answer = min_answer
        self.answer_spread = answer_spread

    def answer_length(self, prompt: Sequence[int]) -> int:
        mix = (sum((i + 1) * (t + 7) for i, t in enumerate(prompt)) + self.seed) % 1009
        return self.min_answer + mix % self.answer_spread

    def __call__(self, tokens: Sequence[int], response_start: int) -> np.ndarray:
        prompt = tokens[:response_start]
        boundary = response_start + self.answer_length(prompt)
        n, v = len(tokens), self.vocab.vocab_size
        rng = np.random.default_rng(
            (self.seed * 1_000_003 + sum(tokens) + 31 * len(tokens)) % (2**63))
        logits = rng.normal(0.0, 0.05, size=(n, v))
        for pos in range(response_start, n):
            if pos >= boundary:
                logits[pos, self.vocab.eos_id] += 12.0
            else:
                content = 2 + (pos * 131 + sum(prompt)) % (v - 2)
                while content in (self.vocab.mask_id, self.vocab.eos_id):
                    content = (content + 1) % v
                logits[pos, content] += 10.0
        return logits
