"""Walkthrough: low-confidence cells become insertion points mid-decode.

Two cells are scripted to stay stubbornly uncertain. While the terminal
window still looks unfinished, the decoder replaces the weakest such cell
with a block of fresh masks, buying the model room exactly where it
struggles; the hard length cap bounds the growth.
"""

from daedal import DaedalConfig, ScriptedBackend, ScriptedScenario, run_daedal
from daedal.scenarios import DEFAULT_VOCAB, plain_target

vocab = DEFAULT_VOCAB
scenario = ScriptedScenario(
    target=plain_target(120, vocab, seed=5),
    confidence_profile={20: 0.02, 90: 0.05},
    sufficiency_threshold=64,
)
backend = ScriptedBackend(vocab, default=scenario)
cfg = DaedalConfig(l_init=64, l_max=110, w_eos=32, e_factor=8)

rec = run_daedal([2], cfg, backend)

print(f"final length {rec.n_token} after {rec.expansions} insertions "
      f"(cap {cfg.l_max}, block size {cfg.e_factor})\n")
for ev in rec.trace:
    if ev.phase == "stage1":
        continue
    line = (f"pass {ev.iteration}: filled {len(ev.filled_cell_ids):>2} cells, "
            f"terminal EOS {ev.eos_confidence:.2f}")
    if ev.expansion_cell_id is not None:
        line += (f"  -> replaced cell {ev.expansion_cell_id} with "
                 f"{ev.length_after - ev.length_before + 1} masks "
                 f"({ev.length_before} -> {ev.length_after})")
    print(line)

print("\nCommitments never retract: every cell is written exactly once.")
filled = [cid for ev in rec.trace for cid in ev.filled_cell_ids]
print(f"  {len(filled)} commits, {len(set(filled))} distinct cells, "
      f"{rec.n_token} final cells")
