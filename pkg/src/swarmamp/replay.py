"""Trace replay: re-run a recorded episode and compare byte-for-byte."""

from __future__ import annotations

from pathlib import Path

from .harness import ExperimentConfig, run_one_episode
from .trace_io import read_trace, trace_to_string


def replay_trace(config: ExperimentConfig, path: str | Path, arm: str) -> tuple[bool, str]:
    """Re-execute the episode recorded at path under the given arm's policies.

    Returns (matched, message); a mismatch means the build is no longer
    deterministic or the config drifted from the one that wrote the trace.
    """
    original_text = Path(path).read_text()
    recorded = read_trace(original_text.splitlines())
    if arm not in config.arms:
        return False, f"unknown arm {arm!r}"
    rerun = run_one_episode(config, arm, recorded.situation, recorded.seed)
    rerun_text = trace_to_string(rerun)
    if rerun_text == original_text:
        return True, (
            f"replay ok: {path} ({len(recorded.states)} states, outcome {recorded.outcome.value})"
        )
    return False, f"replay mismatch: {path} diverged from the recorded trace"
