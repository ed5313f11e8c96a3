"""Constructors for scripted scenarios and benchmark suites.

These are the building blocks used by the demos and the test suites: a
scenario that becomes "length-sufficient" at an exact response length, and
multi-prompt suites with heterogeneous target lengths for contrasting
adaptive runs against fixed-length baselines.
"""

from __future__ import annotations

import random
from typing import Optional

from .backend import ScriptedBackend, ScriptedScenario
from .core import TokenId, Vocab

DEFAULT_VOCAB = Vocab(vocab_size=1000, mask_id=0, eos_id=1)


def plain_target(length: int, vocab: Vocab, seed: int = 0) -> list[TokenId]:
    """Random target tokens avoiding both special ids (no interior EOS)."""
    rng = random.Random(seed)
    out = []
    while len(out) < length:
        tok = rng.randrange(vocab.vocab_size)
        if tok != vocab.mask_id and tok != vocab.eos_id:
            out.append(tok)
    return out


def sufficient_at(length_needed: int, w_eos: int, vocab: Vocab,
                  target_length: Optional[int] = None, seed: int = 0) -> ScriptedScenario:
    """Scenario whose terminal EOS window saturates exactly at ``length_needed``.

    EOS padding begins at ordinal ``length_needed - w_eos``, so the mean EOS
    probability over the last ``w_eos`` cells is 1.0 for any response of at
    least ``length_needed`` cells and strictly lower before that.
    """
    if length_needed < w_eos:
        raise ValueError("length_needed must be at least the window size")
    threshold = length_needed - w_eos
    if target_length is None:
        target_length = threshold
    return ScriptedScenario(
        target=plain_target(target_length, vocab, seed=seed),
        noise_seed=seed,
        sufficiency_threshold=threshold,
        slack=max(0, threshold - target_length),
    )


def answer_scenario(answer_length: int, vocab: Vocab, seed: int = 0) -> ScriptedScenario:
    """Scenario behaving like a model with a definite answer of given length.

    The target ends where EOS padding begins, so a completed run's effective
    token count equals ``answer_length``.
    """
    return ScriptedScenario(
        target=plain_target(answer_length, vocab, seed=seed),
        noise_seed=seed,
        sufficiency_threshold=answer_length,
    )


def heterogeneous_suite(count: int, vocab: Vocab,
                        min_answer: int = 40, max_answer: int = 600,
                        seed: int = 0) -> tuple[ScriptedBackend, list[tuple[str, list[TokenId]]]]:
    """A suite of prompts whose required answer lengths span a wide range.

    Returns the backend plus ``(prompt_id, prompt_tokens)`` pairs. Prompt i
    is the two-token sequence ``[2, 3 + i]`` so prompts stay distinct.
    """
    rng = random.Random(seed)
    scenarios = {}
    prompts = []
    for i in range(count):
        answer = rng.randrange(min_answer, max_answer + 1)
        prompt = (2, 3 + i)
        scenarios[prompt] = answer_scenario(answer, vocab, seed=seed * 100003 + i)
        prompts.append((f"p{i:04d}", list(prompt)))
    return ScriptedBackend(vocab, scenarios), prompts
