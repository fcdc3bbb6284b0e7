import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def toy_clip(tmp_path):
    """A 3-frame clip as a directory of small PNG images."""
    clip = tmp_path / "clip"
    clip.mkdir()
    rng = np.random.default_rng(0)
    for index in range(3):
        pixels = rng.integers(0, 256, size=(24, 32, 3), dtype=np.uint8)
        pixels[:, : 8 * (index + 1)] = (255, 0, 0)  # frame-dependent stripe
        Image.fromarray(pixels).save(clip / f"frame_{index:04d}.png")
    return clip
