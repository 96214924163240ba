"""tccp simulator: parse, check, run and measure tccp programs."""

import json

from ._core import Simulation, TccpError, check, declarations, pretty, run_jsonl, stats

__all__ = ["Simulation", "TccpError", "check", "declarations", "pretty", "run", "run_jsonl", "stats"]


def run(text, entry="skip", steps=30, policy="first", seed=None, dump_every=0):
    """Trace as a list of dicts, one per instant (see docs/trace.md)."""
    return [json.loads(line) for line in run_jsonl(text, entry, steps, policy, seed, dump_every)]
