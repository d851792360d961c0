import numpy as np
import pytest

from toplag.ingest import AlignedPair


def random_pair(seed, n, scale=1.0):
    rng = np.random.default_rng(seed)
    return AlignedPair(x=scale * rng.normal(size=n), y=scale * rng.normal(size=n))


def integer_pair(seed, n, high=10):
    """Pair with small integer values; path energies become integers, so a
    unique minimum is automatically separated from the field by >= 1."""
    rng = np.random.default_rng(seed)
    x = rng.integers(0, high, size=n).astype(np.float64)
    y = rng.integers(0, high, size=n).astype(np.float64)
    return AlignedPair(x=x, y=y)


@pytest.fixture
def tmp_csv(tmp_path):
    def write(name, rows, header="time,value"):
        p = tmp_path / name
        p.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
        return str(p)

    return write
