"""Token-economy metrics and their aggregation over a run suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import RunRecord, TokenId, Vocab


def effective_tokens(final_tokens: Sequence[TokenId], vocab: Vocab) -> int:
    """Net response length: strip the trailing EOS run, keep interior EOS."""
    n = len(final_tokens)
    while n > 0 and final_tokens[n - 1] == vocab.eos_id:
        n -= 1
    return n


def e_ratio(e_token: int, n_token: int) -> float:
    """Effective token ratio e_token / n_token."""
    if n_token <= 0:
        raise ValueError(f"n_token must be positive, got {n_token}")
    if not 0 <= e_token <= n_token:
        raise ValueError(f"e_token={e_token} outside [0, n_token={n_token}]")
    return e_token / n_token


@dataclass(slots=True)
class HistogramBin:
    lo: int
    hi: int
    count: int

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "count": self.count}


@dataclass(slots=True)
class Summary:
    """Arithmetic means over a record set plus the total-length histogram.

    The mean ratio is the mean of per-record ratios, not the ratio of the
    mean token counts.
    """

    mean_n_token: float
    mean_e_token: float
    mean_e_ratio: float
    histogram: list[HistogramBin]

    def occupied_bins(self) -> int:
        return len(self.histogram)

    def to_dict(self) -> dict:
        return {
            "mean_n_token": self.mean_n_token,
            "mean_e_token": self.mean_e_token,
            "mean_e_ratio": self.mean_e_ratio,
            "histogram": [b.to_dict() for b in self.histogram],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Summary":
        return cls(
            mean_n_token=d["mean_n_token"],
            mean_e_token=d["mean_e_token"],
            mean_e_ratio=d["mean_e_ratio"],
            histogram=[HistogramBin(b["lo"], b["hi"], b["count"]) for b in d["histogram"]],
        )


def length_histogram(n_tokens: Sequence[int], bin_width: int = 64) -> list[HistogramBin]:
    """Occupied fixed-width bins [lo, lo + width) over total token counts."""
    if bin_width < 1:
        raise ValueError("bin_width must be positive")
    values = np.asarray(n_tokens, dtype=np.int64)
    bins: dict[int, int] = {}
    for idx in values // bin_width:
        bins[int(idx)] = bins.get(int(idx), 0) + 1
    return [HistogramBin(lo=i * bin_width, hi=(i + 1) * bin_width, count=c)
            for i, c in sorted(bins.items())]


def aggregate(records: Sequence[RunRecord], bin_width: int = 64) -> Summary:
    """Summarize a non-empty record list."""
    if not records:
        raise ValueError("aggregate requires at least one record")
    n = np.array([r.n_token for r in records], dtype=np.float64)
    e = np.array([r.e_token for r in records], dtype=np.float64)
    ratios = np.array([r.e_ratio for r in records], dtype=np.float64)
    return Summary(
        mean_n_token=float(n.mean()),
        mean_e_token=float(e.mean()),
        mean_e_ratio=float(ratios.mean()),
        histogram=length_histogram([r.n_token for r in records], bin_width),
    )
