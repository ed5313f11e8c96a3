"""Walkthrough: the end-of-sequence signal separates length regimes.

One fully masked forward pass on a 128-cell canvas is enough to see whether
the model believes the space suffices: prompts whose answers fit under 128
tokens put high EOS probability on the terminal window, prompts that need
more space do not. The per-position difference should be positive across
the entire window.
"""

from daedal import ScriptedBackend, ScriptedScenario
from daedal.harness import PromptEntry, diagnose_eos_signal
from daedal.scenarios import DEFAULT_VOCAB, plain_target

vocab = DEFAULT_VOCAB
length, window = 128, 32

scenarios, prompts = {}, []
for i, answer in enumerate((60, 72, 80, 88, 96)):  # fits within 128
    key = (100 + i,)
    scenarios[key] = ScriptedScenario(target=plain_target(answer, vocab, seed=i),
                                      sufficiency_threshold=answer)
    prompts.append(PromptEntry(f"fits{i}", list(key), "sufficient"))
for i, low in enumerate((0.0, 0.02, 0.05)):  # would need far more than 128
    key = (200 + i,)
    scenarios[key] = ScriptedScenario(
        target=plain_target(length, vocab, seed=50 + i),
        sufficiency_threshold=length * 6, slack=length * 6,
        insufficient_eos_prob=low)
    prompts.append(PromptEntry(f"needsmore{i}", list(key), "insufficient"))

backend = ScriptedBackend(vocab, scenarios)
report = diagnose_eos_signal(prompts, length, backend, window)

means = report["mean_terminal_eos"]
print(f"mean terminal EOS confidence, answers that fit:      "
      f"{means['sufficient']:.3f}")
print(f"mean terminal EOS confidence, answers that overflow: "
      f"{means['insufficient']:.3f}\n")

print("difference per terminal position (positive everywhere = the signal):")
row = ""
for entry in report["per_position"]:
    row += " +" if entry["difference"] > 0 else " -"
print(f"  positions {length - window}..{length - 1}:{row}")
worst = min(report["difference"])
print(f"  smallest difference in the window: {worst:+.3f}")
