"""Walkthrough: token economy of adaptive vs fixed decoding over a suite.

Two hundred prompts need anywhere from 40 to 600 answer tokens. Every fixed
budget is wrong for most of them: short budgets truncate, long budgets pad.
The adaptive decoder gives each prompt its own length, visible as a spread
of histogram bins and a far higher effective-token ratio.
"""

from daedal import DaedalConfig, aggregate, baseline_decode, run_daedal
from daedal.scenarios import DEFAULT_VOCAB, heterogeneous_suite

vocab = DEFAULT_VOCAB
backend, prompts = heterogeneous_suite(200, vocab, min_answer=40, max_answer=600,
                                       seed=11)


def ascii_histogram(summary, width=40):
    peak = max(b.count for b in summary.histogram)
    for b in summary.histogram:
        bar = "#" * max(1, round(b.count / peak * width))
        print(f"  [{b.lo:4d},{b.hi:4d}) {bar} {b.count}")


cfg = DaedalConfig(l_init=64, l_max=2048, w_eos=32)
adaptive = aggregate([run_daedal(toks, cfg, backend, prompt_id=pid)
                      for pid, toks in prompts])

print("adaptive decoding, total tokens per prompt:")
ascii_histogram(adaptive)

print(f"\n{'setting':>14} {'mean total':>11} {'mean effective':>15} {'ratio':>7}")
for length in (64, 128, 256, 512, 1024):
    summary = aggregate([baseline_decode(toks, length, 16, backend, prompt_id=pid)
                         for pid, toks in prompts])
    print(f"{'fixed ' + str(length):>14} {summary.mean_n_token:>11.1f} "
          f"{summary.mean_e_token:>15.1f} {summary.mean_e_ratio:>7.1%}"
          f"   (histogram: {summary.occupied_bins()} bin)")
print(f"{'adaptive':>14} {adaptive.mean_n_token:>11.1f} "
      f"{adaptive.mean_e_token:>15.1f} {adaptive.mean_e_ratio:>7.1%}"
      f"   (histogram: {adaptive.occupied_bins()} bins)")
