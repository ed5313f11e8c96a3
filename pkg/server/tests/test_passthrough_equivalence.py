"""Cross-process fidelity: the HTTP round trip must not perturb a run.

Ten scripted scenarios decode once against the in-process backend and once
through the server in passthrough mode; the trace bodies must hash
identically, byte for byte.
"""

import random

from daedal import (
    DaedalConfig, RemoteBackend, ScriptedBackend, ScriptedScenario, TraceFile,
    Vocab, run_daedal, trace_body_hash, write_trace,
)
from daedal.scenarios import plain_target
from daedal_server import ModelService, PassthroughModel, ServerThread

VOCAB = Vocab(vocab_size=700, mask_id=0, eos_id=1)


def make_scenarios():
    rng = random.Random(77)
    scenarios = []
    for i in range(10):
        answer = rng.randint(12, 90)
        profile = {rng.randrange(answer + 40): rng.random() for _ in range(6)}
        scenarios.append(ScriptedScenario(
            target=plain_target(answer, VOCAB, seed=i),
            confidence_profile=profile,
            sufficiency_threshold=answer,
        ))
    return scenarios


def trace_hash_for(record, cfg, tmp_path, tag):
    path = tmp_path / f"{tag}.trace.jsonl"
    write_trace(path, TraceFile.for_run(record, cfg, "equivalence", "0.1.0"))
    return trace_body_hash(path)


def test_cross_process_trace_hashes_match(tmp_path):
    cfg = DaedalConfig(l_init=24, l_max=200, w_eos=12)
    prompt = [2, 3]
    matches = 0
    for i, scn in enumerate(make_scenarios()):
        in_process = ScriptedBackend(VOCAB, default=scn)
        local_record = run_daedal(prompt, cfg, in_process, prompt_id=f"x{i}")
        local_hash = trace_hash_for(local_record, cfg, tmp_path, f"local{i}")

        service = ModelService(PassthroughModel(in_process, "scripted:mem"))
        with ServerThread(service) as srv:
            remote = RemoteBackend(srv.url)
            assert remote.vocab == VOCAB  # served from /v1/vocab
            remote_record = run_daedal(prompt, cfg, remote, prompt_id=f"x{i}")
        remote_hash = trace_hash_for(remote_record, cfg, tmp_path, f"remote{i}")

        assert remote_record == local_record, f"scenario {i} diverged"
        assert remote_hash == local_hash, f"scenario {i} hash diverged"
        matches += 1
    print(f"[acceptance] cross-process-fidelity: PASS ({matches}/10 trace "
          f"hashes identical)")
    assert matches == 10
