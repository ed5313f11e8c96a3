import json
import os

import pytest

from daedal import Vocab, save_scripted_backend, ScriptedBackend, ScriptedScenario
from daedal.cli import main
from daedal.harness import (
    diagnose_eos_signal, identity_detokenize, identity_tokenize, load_prompts,
    make_backend,
)
from daedal.scenarios import answer_scenario, heterogeneous_suite, plain_target

VOCAB = Vocab(vocab_size=1000, mask_id=0, eos_id=1)


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


@pytest.fixture()
def small_suite(tmp_path):
    backend, prompts = heterogeneous_suite(6, VOCAB, min_answer=10, max_answer=60,
                                           seed=5)
    suite_path = tmp_path / "suite.json"
    save_scripted_backend(backend, suite_path)
    prompts_path = tmp_path / "prompts.jsonl"
    write_jsonl(prompts_path, [{"id": pid, "tokens": toks} for pid, toks in prompts])
    return str(suite_path), str(prompts_path)


def read_records(out_dir):
    with open(os.path.join(out_dir, "records.jsonl"), "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def read_summary(out_dir):
    with open(os.path.join(out_dir, "summary.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestPromptLoading:
    def test_tokens_and_text_entries(self, tmp_path):
        path = tmp_path / "p.jsonl"
        write_jsonl(path, [{"id": "a", "tokens": [1, 2]},
                           {"id": "b", "text": "3 4 5"}])
        entries = load_prompts(path)
        assert [(e.prompt_id, e.tokens) for e in entries] == [("a", [1, 2]),
                                                              ("b", [3, 4, 5])]

    def test_identity_codec_round_trip(self):
        assert identity_tokenize(identity_detokenize([9, 10, 11])) == [9, 10, 11]

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ValueError):
            load_prompts(path)

    def test_missing_id_rejected(self, tmp_path):
        path = tmp_path / "p.jsonl"
        write_jsonl(path, [{"tokens": [1]}])
        with pytest.raises(ValueError):
            load_prompts(path)

    def test_backend_descriptor_errors(self):
        with pytest.raises(ValueError):
            make_backend("nonsense")
        with pytest.raises(ValueError):
            make_backend("teapot:x")


class TestCliRuns:
    def test_daedal_mode_end_to_end(self, tmp_path, small_suite, capsys):
        suite, prompts = small_suite
        out = str(tmp_path / "out")
        code = main(["--mode", "daedal", "--prompts", prompts, "--out", out,
                     "--backend", f"scripted:{suite}",
                     "--l-init", "16", "--l-max", "256", "--w-eos", "8"])
        assert code == 0
        records = read_records(out)
        assert len(records) == 6
        for row in records:
            assert row["e_token"] <= row["n_token"]
            trace_path = os.path.join(out, row["trace"])
            assert os.path.exists(trace_path)
        summary = read_summary(out)
        assert set(summary) == {"mean_n_token", "mean_e_token", "mean_e_ratio",
                                "histogram"}

    def test_baseline_mode_fixed_length(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out = str(tmp_path / "out")
        code = main(["--mode", "baseline", "--prompts", prompts, "--out", out,
                     "--backend", f"scripted:{suite}",
                     "--l-init", "32", "--baseline-steps", "4", "--w-eos", "8"])
        assert code == 0
        records = read_records(out)
        assert {row["n_token"] for row in records} == {32}
        assert len(read_summary(out)["histogram"]) == 1

    def test_adaptive_varies_while_baseline_does_not(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        assert main(["--mode", "daedal", "--prompts", prompts, "--out", out_a,
                     "--backend", f"scripted:{suite}", "--l-init", "16",
                     "--l-max", "256", "--w-eos", "8"]) == 0
        assert main(["--mode", "baseline", "--prompts", prompts, "--out", out_b,
                     "--backend", f"scripted:{suite}", "--l-init", "64",
                     "--baseline-steps", "4", "--w-eos", "8"]) == 0
        adaptive = {row["n_token"] for row in read_records(out_a)}
        fixed = {row["n_token"] for row in read_records(out_b)}
        assert len(adaptive) > 1
        assert len(fixed) == 1

    def test_sweep_writes_summary_per_length(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out = str(tmp_path / "out")
        lengths = "64,128,256,512,1024,2048"
        code = main(["--mode", "sweep", "--prompts", prompts, "--out", out,
                     "--backend", f"scripted:{suite}", "--lengths", lengths,
                     "--baseline-steps", "4", "--w-eos", "8"])
        assert code == 0
        with open(os.path.join(out, "sweep.json")) as fh:
            sweep = json.load(fh)
        assert sorted(sweep, key=int) == ["64", "128", "256", "512", "1024", "2048"]
        for length in (64, 128, 256, 512, 1024, 2048):
            assert read_summary(os.path.join(out, f"L{length}"))["mean_n_token"] == length

    def test_concurrency_matches_serial(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out1 = str(tmp_path / "serial")
        out4 = str(tmp_path / "parallel")
        base = ["--mode", "daedal", "--prompts", prompts,
                "--backend", f"scripted:{suite}", "--l-init", "16",
                "--l-max", "256", "--w-eos", "8"]
        assert main(base + ["--out", out1, "--concurrency", "1"]) == 0
        assert main(base + ["--out", out4, "--concurrency", "4"]) == 0
        assert read_records(out1) == read_records(out4)
        assert read_summary(out1) == read_summary(out4)

    def test_resume_skips_done_and_keeps_aggregate(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out = str(tmp_path / "out")
        base = ["--mode", "daedal", "--prompts", prompts, "--out", out,
                "--backend", f"scripted:{suite}", "--l-init", "16",
                "--l-max", "256", "--w-eos", "8"]
        assert main(base) == 0
        first = read_summary(out)
        records_before = read_records(out)
        assert main(base + ["--resume"]) == 0
        assert read_summary(out) == first
        assert read_records(out) == records_before

    def test_partial_failure_exit_code(self, tmp_path, small_suite):
        suite, prompts_path = small_suite
        rows = [json.loads(line) for line in open(prompts_path)]
        rows.append({"id": "zz", "tokens": [999, 999]})  # no scenario scripted
        write_jsonl(prompts_path, rows)
        out = str(tmp_path / "out")
        code = main(["--mode", "daedal", "--prompts", prompts_path, "--out", out,
                     "--backend", f"scripted:{suite}", "--l-init", "16",
                     "--l-max", "256", "--w-eos", "8"])
        assert code == 2
        failed = [r for r in read_records(out) if "error" in r]
        assert len(failed) == 1 and failed[0]["prompt_id"] == "zz"

    def test_empty_prompts_exit_66(self, tmp_path, small_suite):
        suite, _ = small_suite
        empty = tmp_path / "none.jsonl"
        empty.write_text("")
        assert main(["--mode", "daedal", "--prompts", str(empty),
                     "--out", str(tmp_path / "o"),
                     "--backend", f"scripted:{suite}"]) == 66

    def test_missing_prompts_exit_66(self, tmp_path, small_suite):
        suite, _ = small_suite
        assert main(["--mode", "daedal", "--prompts", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "o"),
                     "--backend", f"scripted:{suite}"]) == 66

    def test_bad_flags_exit_64(self, tmp_path, small_suite):
        suite, prompts = small_suite
        assert main(["--mode", "sideways", "--prompts", prompts,
                     "--out", str(tmp_path / "o"),
                     "--backend", f"scripted:{suite}"]) == 64
        assert main(["--mode", "sweep", "--prompts", prompts,
                     "--out", str(tmp_path / "o"),
                     "--backend", f"scripted:{suite}"]) == 64  # missing --lengths

    def test_config_file_with_flag_override(self, tmp_path, small_suite):
        suite, prompts = small_suite
        cfg = tmp_path / "run.toml"
        cfg.write_text('l_init = 16\nl_max = 256\nw_eos = 8\ntau_eos = 0.9\n')
        out = str(tmp_path / "out")
        code = main(["--mode", "baseline", "--prompts", prompts, "--out", out,
                     "--backend", f"scripted:{suite}", "--config", str(cfg),
                     "--l-init", "24", "--baseline-steps", "2"])
        assert code == 0
        assert {row["n_token"] for row in read_records(out)} == {24}
        meta = json.load(open(os.path.join(out, "meta.json")))
        assert meta["config"]["l_init"] == 24  # flag beat the file
        assert meta["config"]["w_eos"] == 8    # file value survived

    def test_config_file_can_carry_every_flag(self, tmp_path, small_suite):
        suite, prompts = small_suite
        out = str(tmp_path / "out")
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "mode": "sweep", "prompts": prompts, "out": out,
            "backend": f"scripted:{suite}", "lengths": [32, 64],
            "baseline_steps": 2, "w_eos": 8, "concurrency": 2, "seed": 7,
        }))
        assert main(["--config", str(cfg)]) == 0
        with open(os.path.join(out, "sweep.json")) as fh:
            assert sorted(json.load(fh), key=int) == ["32", "64"]
        # a flag still overrides the file
        out2 = str(tmp_path / "out2")
        assert main(["--config", str(cfg), "--out", out2,
                     "--lengths", "16"]) == 0
        with open(os.path.join(out2, "sweep.json")) as fh:
            assert list(json.load(fh)) == ["16"]

    def test_missing_required_option_exits_64(self, tmp_path, small_suite):
        suite, prompts = small_suite
        assert main(["--mode", "daedal", "--prompts", prompts,
                     "--backend", f"scripted:{suite}"]) == 64  # no --out


class TestDiagnose:
    def build_groups(self, tmp_path, length=64, w=16):
        # sufficient: EOS padding covers the terminal window at this length;
        # insufficient: padding would begin far beyond it
        suff = {(10 + i,): ScriptedScenario(
            target=plain_target(length - w, VOCAB, seed=i),
            sufficiency_threshold=length - w) for i in range(3)}
        insuff = {(20 + i,): ScriptedScenario(
            target=plain_target(length, VOCAB, seed=50 + i),
            sufficiency_threshold=length * 4, slack=length * 4,
            insufficient_eos_prob=0.02) for i in range(3)}
        backend = ScriptedBackend(VOCAB, {**suff, **insuff})
        suite = tmp_path / "diag_suite.json"
        save_scripted_backend(backend, suite)
        rows = [{"id": f"s{i}", "tokens": [10 + i], "group": "sufficient"}
                for i in range(3)]
        rows += [{"id": f"i{i}", "tokens": [20 + i], "group": "insufficient"}
                 for i in range(3)]
        prompts = tmp_path / "diag_prompts.jsonl"
        write_jsonl(prompts, rows)
        return backend, str(suite), str(prompts)

    def test_report_shape_and_sign(self, tmp_path):
        backend, _, _ = self.build_groups(tmp_path)
        entries = load_prompts(tmp_path / "diag_prompts.jsonl")
        report = diagnose_eos_signal(entries, 64, backend, 16)
        assert len(report["per_position"]) == 16
        assert len(report["difference"]) == 16
        assert all(d > 0 for d in report["difference"])
        assert report["mean_terminal_eos"]["sufficient"] > \
            report["mean_terminal_eos"]["insufficient"]

    def test_identical_groups_zero_difference(self, tmp_path):
        scn = ScriptedScenario(target=plain_target(32, VOCAB),
                               sufficiency_threshold=32)
        backend = ScriptedBackend(VOCAB, default=scn)
        from daedal.harness import PromptEntry
        prompts = [PromptEntry("a", [5], "sufficient"),
                   PromptEntry("b", [5], "insufficient")]
        report = diagnose_eos_signal(prompts, 48, backend, 8)
        assert all(d == 0.0 for d in report["difference"])

    def test_empty_group_rejected(self, tmp_path):
        from daedal.harness import PromptEntry
        backend = ScriptedBackend(VOCAB, default=answer_scenario(8, VOCAB))
        with pytest.raises(ValueError):
            diagnose_eos_signal([PromptEntry("a", [5], "sufficient")], 16, backend, 8)

    def test_cli_diagnose_writes_report(self, tmp_path):
        _, suite, prompts = self.build_groups(tmp_path)
        out = str(tmp_path / "out")
        code = main(["--mode", "diagnose", "--prompts", prompts, "--out", out,
                     "--backend", f"scripted:{suite}",
                     "--l-init", "64", "--w-eos", "16"])
        assert code == 0
        report = json.load(open(os.path.join(out, "diagnosis.json")))
        assert report["length"] == 64 and report["w_eos"] == 16
