import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from airmenu import Frame


@pytest.fixture
def rng():
    return np.random.default_rng(0xA1B2)


def constant_frame(width: int, height: int, rgb, timestamp_ms: float = 0.0) -> Frame:
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:, :] = rgb
    return Frame(px, timestamp_ms)


def random_frame(rng, width: int, height: int, timestamp_ms: float = 0.0) -> Frame:
    return Frame(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8), timestamp_ms)
