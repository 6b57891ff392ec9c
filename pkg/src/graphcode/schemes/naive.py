from __future__ import annotations

import numpy as np

from ..channels import ChannelKind, ChannelSpec, TrialRng, repeat_erasure, repeat_majority
from ..gf2 import ERASED
from ..graphs import Network
from .common import SchemeResult, check_message


def run_naive(net: Network, x, j: int, channel: ChannelSpec, rng: TrialRng) -> SchemeResult:
    """Every node repeats its bit ``j`` times straight to the sink."""
    x = check_message(net, x)
    if j < 1:
        raise ValueError("repetition count must be at least 1")
    missing = [int(v) for v in net.nonsink if not net.has_edge(int(v), net.sink)]
    if missing:
        raise ValueError(f"nodes without a sink link: {missing[:10]}")
    at_sink = rng.for_node(net.sink)
    counts = np.zeros(net.size, dtype=np.int64)
    counts[net.nonsink] = j
    phases = {"direct": int(counts.sum())}
    if channel.kind is ChannelKind.BSC:
        return SchemeResult(repeat_majority(channel, x, j, at_sink), counts, phases)
    got = repeat_erasure(channel, x, j, at_sink)
    if np.any(got == ERASED):
        return SchemeResult(None, counts, phases, failure="ambiguous")
    return SchemeResult(got, counts, phases)
