"""Per-iteration run records shared by both optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


class TraceRecord(NamedTuple):
    loss_smooth: float
    loss_hard: float
    r: float
    tau: float


@dataclass
class RunTrace:
    """One record per completed gradient-descent iteration."""

    records: list[TraceRecord] = field(default_factory=list)

    def append(self, loss_smooth: float, loss_hard: float, r: float, tau: float) -> None:
        self.records.append(TraceRecord(loss_smooth, loss_hard, r, tau))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]


class DivergenceError(RuntimeError):
    """Optimization diverged; carries the trace accumulated so far."""

    def __init__(self, message: str, trace: RunTrace):
        super().__init__(message)
        self.trace = trace
