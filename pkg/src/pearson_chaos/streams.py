"""Counter-based random streams and the sample container.

Every stream is a Philox generator seeded from ``(seed, *key)``.  Callers pick
a key per independent source (coordinate index, path block, ...), so results
do not depend on the order or concurrency in which streams are consumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

SEED_MASK = (1 << 64) - 1


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key...)``."""
    words = [int(seed) & SEED_MASK, *(int(k) & SEED_MASK for k in key)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Draws plus enough metadata to regenerate them.

    ``provenance`` is a plain dict whose ``kind`` is one of ``direct``,
    ``sde`` or ``chaos``; the remaining keys describe the sampler call.
    """

    values: np.ndarray
    seed: int
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def moments(self, pmax: int = 4) -> np.ndarray:
        """Raw empirical moments ``m_1 .. m_pmax``."""
        v = self.values.ravel()
        return np.array([np.mean(v**p) for p in range(1, pmax + 1)])

    def moment_se(self, p: int) -> float:
        """Standard error of the empirical ``p``-th raw moment (i.i.d. draws)."""
        v = self.values.ravel() ** p
        return float(np.std(v, ddof=1) / np.sqrt(v.size))
