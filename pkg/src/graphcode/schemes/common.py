from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import ChannelKind, ChannelSpec
from ..codes import K_MAX
from ..graphs import Network


@dataclass(frozen=True)
class SchemeConfig:
    channel: ChannelSpec
    gamma: float = 1.0
    rate: float = 0.5
    group_density: float = 1.0
    p_ch: float = 0.1
    er_density: float = 6.0
    delta: float = 0.01
    repetitions: int = 1
    k_max: int = K_MAX

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError("code rate must lie in (0, 1]")
        if not 0 < self.p_ch < 0.5:
            raise ValueError("p_ch must lie in (0, 1/2)")
        if self.gamma <= 0 or self.group_density <= 0 or self.er_density <= 0:
            raise ValueError("density constants must be positive")
        if self.repetitions < 1:
            raise ValueError("repetition count must be at least 1")

    @property
    def kind(self) -> ChannelKind:
        return self.channel.kind

    @property
    def epsilon(self) -> float:
        return self.channel.epsilon

    def params(self) -> dict:
        return {"gamma": self.gamma, "rate": self.rate, "group_density": self.group_density,
                "p_ch": self.p_ch, "er_density": self.er_density, "delta": self.delta,
                "repetitions": self.repetitions}


@dataclass
class SchemeResult:
    estimate: np.ndarray | None
    broadcasts_by_node: np.ndarray
    broadcasts_by_phase: dict
    failure: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def broadcasts_total(self) -> int:
        return int(self.broadcasts_by_node.sum())

    def recovered(self, x) -> bool:
        return self.estimate is not None and bool(np.array_equal(self.estimate, x))


def bit_positions(net: Network) -> np.ndarray:
    """Map node id -> index into the message vector (-1 for the sink)."""
    pos = np.full(net.size, -1, dtype=np.int64)
    pos[net.nonsink] = np.arange(net.n)
    return pos


def check_message(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (net.n,):
        raise ValueError(f"message must have one bit per non-sink node ({net.n}), got {x.shape}")
    return x
