"""Deterministic random streams.

Every replica owns one PCG64 generator seeded from ``(master_seed, replica)``
through :class:`numpy.random.SeedSequence`.  Scalar uniforms are served from
fixed-size blocks so that tight loops and the step-by-step API consume the
generator identically.
"""

import numpy as np

BLOCK = 4096


def derive_seed(master_seed, replica):
    """64-bit seed of replica ``replica`` under ``master_seed``."""
    if master_seed < 0 or replica < 0:
        raise ValueError("seeds and replica indices must be non-negative")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replica),))
    return int(ss.generate_state(1, np.uint64)[0])


class RandomSource:
    """PCG64 generator plus a block buffer of uniforms on [0, 1)."""

    def __init__(self, seed):
        self.seed = int(seed)
        self.gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf = []
        self._pos = 0

    @classmethod
    def for_replica(cls, master_seed, replica):
        return cls(derive_seed(master_seed, replica))

    def uniform(self):
        if self._pos == len(self._buf):
            self._buf = self.gen.random(BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def below(self, n):
        """Uniform integer in ``range(n)``."""
        return int(self.uniform() * n)
