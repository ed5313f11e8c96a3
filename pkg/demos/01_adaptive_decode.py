"""Walkthrough: one prompt, fixed-length baseline vs adaptive decoding.

The scripted oracle knows a 150-token answer. A fixed 64-token run truncates
the sequence it was asked to produce; a fixed 1024-token run wastes most of
its budget on EOS padding; the adaptive decoder grows the canvas until the
model's own end-of-sequence signal says the length fits.
"""

from daedal import DaedalConfig, ScriptedBackend, baseline_decode, run_daedal
from daedal.scenarios import DEFAULT_VOCAB, answer_scenario

vocab = DEFAULT_VOCAB
backend = ScriptedBackend(vocab, default=answer_scenario(150, vocab, seed=42))
prompt = [2, 3]

print("The oracle's intended answer is 150 tokens long.\n")

for length in (64, 1024):
    rec = baseline_decode(prompt, length, steps=16, backend=backend)
    note = "  <- truncated mid-answer" if rec.n_token < 150 else ""
    print(f"fixed length {length:4d}: produced {rec.n_token} tokens, "
          f"{rec.e_token} effective ({rec.e_ratio:.1%} useful){note}")

cfg = DaedalConfig(l_init=64, l_max=2048, w_eos=32)
rec = run_daedal(prompt, cfg, backend)
print(f"adaptive from  64: produced {rec.n_token} tokens, "
      f"{rec.e_token} effective ({rec.e_ratio:.1%} useful)")

print("\nhow the adaptive run unfolded:")
for ev in rec.trace:
    if ev.phase == "stage1":
        action = (f"grew {ev.length_before} -> {ev.length_after}"
                  if ev.length_after > ev.length_before else "length accepted")
        print(f"  estimation pass {ev.iteration}: terminal EOS confidence "
              f"{ev.eos_confidence:.2f} -> {action}")
    else:
        extra = (f", inserted masks at cell {ev.expansion_cell_id}"
                 if ev.expansion_cell_id is not None else "")
        print(f"  denoise pass {ev.iteration}: committed "
              f"{len(ev.filled_cell_ids)} cells{extra}")
