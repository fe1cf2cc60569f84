"""Counter-based random streams keyed by integer tuples.

Every stream is a ``numpy.random.Generator`` backed by the Philox
counter-based bit generator. The key for a stream is built with
``numpy.random.SeedSequence(seed, spawn_key=(purpose, *ids))``, so
streams with different purposes or ids are statistically independent
while the same key always reproduces the same draw sequence.
"""

from dataclasses import dataclass

import numpy as np

# purpose codes (first element of the spawn key)
INIT = 1
SHOTS = 2
DATA = 3
SPLIT = 4

_PURPOSES = {"init": INIT, "shots": SHOTS, "data": DATA, "split": SPLIT}


@dataclass(frozen=True)
class RngStream:
    """Identity of one reproducible random stream."""

    seed: int
    stream_id: tuple = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed) & (2**64 - 1), spawn_key=tuple(int(i) for i in self.stream_id))
        return np.random.Generator(np.random.Philox(ss))


def stream(seed, purpose, *ids) -> np.random.Generator:
    """Return a fresh generator for ``(seed, purpose, *ids)``.

    ``purpose`` is one of ``"init"``, ``"shots"``, ``"data"``, ``"split"``
    or an integer code.
    """
    code = _PURPOSES[purpose] if isinstance(purpose, str) else int(purpose)
    return RngStream(seed, (code, *ids)).generator()
