"""Walkthrough: the length-estimation loop lands on a closed-form grid.

Starting from 64 masks and appending 8 per pass, the loop should stop at the
first grid point whose terminal window reads as finished. For an oracle that
becomes length-sufficient at T, that point is
64 + 8 * ceil(max(0, T - 64) / 8), capped at the hard limit.
"""

from daedal import DaedalConfig, ScriptedBackend, stage1_adjust
from daedal.scenarios import DEFAULT_VOCAB, sufficient_at

vocab = DEFAULT_VOCAB
cfg = DaedalConfig(l_init=64, l_max=2048, w_eos=32, stage1_increment=8)

print(f"start {cfg.l_init}, append {cfg.stage1_increment}, window {cfg.w_eos}, "
      f"cap {cfg.l_max}\n")
print(f"{'needed':>8} {'reached':>8} {'closed form':>12} {'passes':>7}")
for needed in (64, 70, 96, 200, 500, 3000):
    backend = ScriptedBackend(vocab, default=sufficient_at(needed, cfg.w_eos, vocab))
    canvas, events = stage1_adjust([2], cfg, backend)
    over = max(0, needed - cfg.l_init)
    grid = min(cfg.l_max,
               cfg.l_init + cfg.stage1_increment * -(-over // cfg.stage1_increment))
    status = "ok" if len(canvas) == grid else "MISMATCH"
    print(f"{needed:>8} {len(canvas):>8} {grid:>12} {len(events):>7}  {status}")

print("\nA coarser increment reaches far targets in fewer forward passes:")
for inc in (8, 32, 128):
    cfg_inc = DaedalConfig(l_init=64, l_max=2048, w_eos=32, stage1_increment=inc)
    backend = ScriptedBackend(vocab, default=sufficient_at(500, 32, vocab))
    canvas, events = stage1_adjust([2], cfg_inc, backend)
    print(f"  increment {inc:>3}: reached {len(canvas):>4} in {len(events):>3} passes")
