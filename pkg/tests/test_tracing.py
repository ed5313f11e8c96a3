import pytest

from daedal import (
    DaedalConfig, ScriptedBackend, ScriptedScenario, TraceFile, TraceHeader,
    TraceParseError, Vocab, read_trace, replay_final_tokens, run_daedal,
    run_record_digest, trace_body_hash, write_trace,
)
from daedal.scenarios import plain_target

VOCAB = Vocab(vocab_size=300, mask_id=0, eos_id=1)
CFG = DaedalConfig(l_init=16, l_max=48, w_eos=8)


def sample_scenario():
    return ScriptedScenario(
        target=plain_target(30, VOCAB, seed=4),
        confidence_profile={5: 0.04, 12: 0.08},
        sufficiency_threshold=30,
    )


def run_and_trace(tmp_path, name="run", created_at=None):
    backend = ScriptedBackend(VOCAB, default=sample_scenario())
    record = run_daedal([2, 3], CFG, backend)
    trace = TraceFile.for_run(record, CFG, "scripted:test", "0.1.0",
                              created_at=created_at)
    path = tmp_path / f"{name}.trace.jsonl"
    write_trace(path, trace)
    return record, trace, path


class TestRoundTrip:
    def test_read_write_identity(self, tmp_path):
        _, trace, path = run_and_trace(tmp_path, created_at="2026-08-08T00:00:00Z")
        assert read_trace(path) == trace

    def test_three_event_round_trip(self, tmp_path):
        header = TraceHeader(CFG, "scripted:x", "0.1.0")
        from daedal import StepEvent
        events = [
            StepEvent("stage1", 1, 0.25, [], None, 16, 24),
            StepEvent("stage1", 2, 0.95, [], None, 24, 24),
            StepEvent("stage2", 1, 0.5, [0, 3], 5, 24, 31),
        ]
        trace = TraceFile(header, events, run_record_digest([1, 2], CFG))
        path = tmp_path / "t.trace.jsonl"
        write_trace(path, trace)
        assert read_trace(path) == trace

    def test_events_ordered_by_phase_iteration(self, tmp_path):
        _, trace, _ = run_and_trace(tmp_path)
        keys = [(ev.phase, ev.iteration) for ev in trace.events]
        assert keys == sorted(keys)


class TestDeterminism:
    def test_same_run_twice_byte_identical_bodies(self, tmp_path):
        _, _, p1 = run_and_trace(tmp_path, "a", created_at="2026-01-01T00:00:00Z")
        _, _, p2 = run_and_trace(tmp_path, "b", created_at="2026-02-02T00:00:00Z")
        assert trace_body_hash(p1) == trace_body_hash(p2)
        # timestamps differ, so whole files differ while bodies match
        assert p1.read_bytes() != p2.read_bytes()

    def test_digest_recomputable(self, tmp_path):
        record, trace, _ = run_and_trace(tmp_path)
        assert trace.run_record_digest == run_record_digest(record.final_tokens, CFG)


class TestCorruption:
    def test_truncated_file_names_last_good_line(self, tmp_path):
        _, _, path = run_and_trace(tmp_path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")  # drop the footer
        with pytest.raises(TraceParseError) as err:
            read_trace(path)
        assert err.value.line_number == len(lines) - 1

    def test_malformed_line_number_reported(self, tmp_path):
        _, _, path = run_and_trace(tmp_path)
        lines = path.read_text().splitlines()
        lines[1] = "{not json"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(TraceParseError) as err:
            read_trace(path)
        assert err.value.line_number == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.trace.jsonl"
        path.write_text("")
        with pytest.raises(TraceParseError):
            read_trace(path)


class TestReplay:
    def test_replay_reconstructs_final_tokens_without_backend(self, tmp_path):
        record, _, path = run_and_trace(tmp_path)
        trace = read_trace(path)
        tokens = replay_final_tokens(trace, sample_scenario(), VOCAB)
        assert tokens == record.final_tokens
        assert run_record_digest(tokens, trace.header.config) == trace.run_record_digest

    def test_replay_covers_expansions(self, tmp_path):
        # stage 1 stops at 24, then stubborn low-confidence cells force
        # insertions until l_max caps the growth
        scn = ScriptedScenario(
            target=plain_target(60, VOCAB, seed=8),
            confidence_profile={3: 0.02, 19: 0.05},
            sufficiency_threshold=16, slack=0,
        )
        backend = ScriptedBackend(VOCAB, default=scn)
        cfg = DaedalConfig(l_init=16, l_max=40, w_eos=8)
        record = run_daedal([4], cfg, backend)
        assert record.expansions > 0
        trace = TraceFile.for_run(record, cfg, "scripted:test", "0.1.0")
        path = tmp_path / "exp.trace.jsonl"
        write_trace(path, trace)
        assert replay_final_tokens(read_trace(path), scn, VOCAB) == record.final_tokens
