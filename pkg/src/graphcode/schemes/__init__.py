"""Data-gathering protocols and their shared result/config types."""
from .common import SchemeConfig, SchemeResult, bit_positions
from .naive import run_naive
from .gc1 import gc1_lengths, run_gc1, run_gc1_bec
from .gc2 import gc2_audit, run_gc2, run_gc2_bec
from .gc3 import confusion_probability, erasure_masks, run_gc3, run_p2p_erasure

__all__ = [
    "SchemeConfig", "SchemeResult", "bit_positions",
    "run_naive", "run_gc1", "run_gc1_bec", "gc1_lengths",
    "run_gc2", "run_gc2_bec", "gc2_audit",
    "run_gc3", "run_p2p_erasure", "confusion_probability", "erasure_masks",
]
