import numpy as np
import pytest

from randsuite import BitSequence


@pytest.fixture
def bits():
    """Build a BitSequence from a '0101...' string."""
    def make(s: str, **kwargs) -> BitSequence:
        return BitSequence([int(c) for c in s], **kwargs)
    return make


@pytest.fixture
def random_bits():
    """Seeded random BitSequence factory (independent of the package's PRNG keying)."""
    def make(n: int, seed: int = 0, p1: float = 0.5) -> BitSequence:
        rng = np.random.Generator(np.random.PCG64(seed))
        return BitSequence((rng.random(n) < p1).astype(np.uint8))
    return make
