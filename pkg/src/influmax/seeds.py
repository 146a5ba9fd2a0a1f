"""Seed-set container returned by every selector."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SeedSet:
    """Ordered seeds with the score each had when it was picked.

    ``iterations`` records rank-iteration sweeps per round for the
    iterative selectors and stays empty for the others.
    """

    seeds: list[int]
    scores: list[float] = field(default_factory=list)
    algorithm: str = ""
    iterations: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.seeds)

    def __iter__(self):
        return iter(self.seeds)
