"""Wall-clock accounting per pipeline phase."""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List

PHASES = ("predict", "pca", "select", "augment", "fine_tune")


@dataclass
class PhaseTimer:
    """
    Accumulates elapsed seconds per named phase.

    Phases are recorded in first-entry order so the snapshot can assert that
    pool construction preceded fine-tuning.
    """
    seconds: Dict[str, float] = field(default_factory=dict)
    order: List[str] = field(default_factory=list)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        if name not in self.order:
            self.order.append(name)
        try:
            yield
        finally:
            self.seconds[name] = self.seconds.get(name, 0.0) + (time.perf_counter() - start)

    def total(self) -> float:
        return float(sum(self.seconds.values()))

    def merge(self, other: "PhaseTimer") -> None:
        for name in other.order:
            if name not in self.order:
                self.order.append(name)
        for name, value in other.seconds.items():
            self.seconds[name] = self.seconds.get(name, 0.0) + value

    def as_dict(self) -> Dict[str, float]:
        return {name: round(self.seconds.get(name, 0.0), 6) for name in self.order}
