"""Walkthrough: the same engine, driven over HTTP.

A model server reduces whatever it wraps to per-position sufficient
statistics behind POST /v1/predict. Here it wraps a synthetic
diffusion-style model whose preferred answer length depends on the prompt;
the engine only ever sees the wire protocol, including the vocabulary
constants it fetches from /v1/vocab.
"""

import json
import urllib.request

from daedal import DaedalConfig, RemoteBackend, Vocab, run_daedal
from daedal_server import LogitsModel, ModelService, ServerThread, ToyDiffusionModel

vocab = Vocab(vocab_size=1000, mask_id=0, eos_id=1)
toy = ToyDiffusionModel(vocab, seed=7)
model = LogitsModel(toy, vocab, descriptor="toy:7")

with ServerThread(ModelService(model)) as server:
    print(f"server listening at {server.url}")
    with urllib.request.urlopen(server.url + "/healthz") as resp:
        print(f"  /healthz  -> {json.loads(resp.read())}")
    with urllib.request.urlopen(server.url + "/v1/vocab") as resp:
        print(f"  /v1/vocab -> {json.loads(resp.read())}\n")

    backend = RemoteBackend(server.url)
    cfg = DaedalConfig(l_init=64, l_max=512, w_eos=32)
    print("adaptive decoding over the wire:")
    for i in range(6):
        prompt = [3 + i, 17, 4 * i + 2]
        rec = run_daedal(prompt, cfg, backend, prompt_id=f"wire{i}")
        wanted = toy.answer_length(prompt)
        print(f"  prompt {i}: model wants ~{wanted:>3} tokens -> "
              f"decoded {rec.n_token:>3} total, {rec.e_token:>3} effective, "
              f"{rec.iterations} passes")

print("\nserver stopped.")
