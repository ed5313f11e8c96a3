"""Walkthrough: the command-line harness and the trace files it writes.

Builds a scripted suite plus a prompt file in a scratch directory, runs the
adaptive and sweep modes through the CLI entry point, then replays one trace
to recover the final tokens without touching the backend.
"""

import json
import os
import tempfile

from daedal import read_trace, replay_final_tokens, save_scripted_backend
from daedal.cli import main
from daedal.scenarios import DEFAULT_VOCAB, heterogeneous_suite

workdir = tempfile.mkdtemp(prefix="daedal_demo_")
vocab = DEFAULT_VOCAB

backend, prompts = heterogeneous_suite(12, vocab, min_answer=20, max_answer=200,
                                       seed=3)
suite_path = os.path.join(workdir, "suite.json")
save_scripted_backend(backend, suite_path)
prompts_path = os.path.join(workdir, "prompts.jsonl")
with open(prompts_path, "w") as fh:
    for pid, toks in prompts:
        fh.write(json.dumps({"id": pid, "tokens": toks}) + "\n")

out = os.path.join(workdir, "adaptive")
code = main(["--mode", "daedal", "--prompts", prompts_path, "--out", out,
             "--backend", f"scripted:{suite_path}",
             "--l-init", "32", "--l-max", "512", "--w-eos", "16"])
print(f"daedal mode exited {code}; outputs under {out}")
summary = json.load(open(os.path.join(out, "summary.json")))
print(f"  mean total {summary['mean_n_token']:.1f}, "
      f"mean effective {summary['mean_e_token']:.1f}, "
      f"mean ratio {summary['mean_e_ratio']:.1%}")

sweep_out = os.path.join(workdir, "sweep")
code = main(["--mode", "sweep", "--prompts", prompts_path, "--out", sweep_out,
             "--backend", f"scripted:{suite_path}",
             "--lengths", "64,128,256", "--baseline-steps", "8", "--w-eos", "16"])
sweep = json.load(open(os.path.join(sweep_out, "sweep.json")))
print(f"\nsweep mode exited {code}; one summary per fixed length:")
for length in sorted(sweep, key=int):
    print(f"  L={length:>4}: mean ratio {sweep[length]['mean_e_ratio']:.1%}")

first_id = prompts[0][0]
trace_path = os.path.join(out, "traces", f"{first_id}.trace.jsonl")
trace = read_trace(trace_path)
scenario = backend.scenario_for(tuple(prompts[0][1]))
tokens = replay_final_tokens(trace, scenario, vocab)
record = next(json.loads(line) for line in open(os.path.join(out, "records.jsonl"))
              if json.loads(line)["prompt_id"] == first_id)
print(f"\nreplayed {trace_path}")
print(f"  replay matches recorded final tokens: {tokens == record['final_tokens']}")
print(f"  events: {len(trace.events)}, recorded digest "
      f"{trace.run_record_digest[:12]}…")
