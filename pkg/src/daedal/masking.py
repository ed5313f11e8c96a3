"""Forward masking process, kept as a simulation/testing utility.

Each token is independently replaced by the mask token with probability
``t``; at ``t=0`` the sequence is untouched and at ``t=1`` fully masked.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import TokenId, Vocab


def forward_mask(tokens: Sequence[TokenId], t: float, vocab: Vocab,
                 rng: np.random.Generator) -> list[TokenId]:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    draws = rng.random(len(tokens))
    return [vocab.mask_id if d < t else tok for tok, d in zip(tokens, draws)]
