"""Shared fixtures: a tiny two-class image corpus and one extraction run.

Images are synthetic textures (rings vs stripes) at slightly varied
sizes so resize and center-crop both do real work.  The shared
extraction uses random seeded weights at a small crop so the whole
suite stays fast and fully offline.
"""

import os

import numpy as np
import pytest
from PIL import Image, ImageDraw

from ifcm_extractor import ExtractorConfig, extract

PER_CLASS = 6


def _ring_image(rng: np.random.Generator, w: int, h: int) -> Image.Image:
    img = Image.new("RGB", (w, h), tuple(int(v) for v in rng.integers(0, 60, 3)))
    draw = ImageDraw.Draw(img)
    cx, cy = w // 2 + int(rng.integers(-6, 7)), h // 2 + int(rng.integers(-6, 7))
    r = int(min(w, h) * 0.3)
    draw.ellipse(
        [cx - r, cy - r, cx + r, cy + r],
        outline=(int(rng.integers(180, 256)), 80, 80),
        width=5,
    )
    return img


def _stripe_image(rng: np.random.Generator, w: int, h: int) -> Image.Image:
    img = Image.new("RGB", (w, h), tuple(int(v) for v in rng.integers(0, 60, 3)))
    draw = ImageDraw.Draw(img)
    for x in range(int(rng.integers(0, 8)), w, 12):
        draw.rectangle([x, 0, x + 5, h], fill=(80, int(rng.integers(180, 256)), 80))
    return img


@pytest.fixture(scope="session")
def image_root(tmp_path_factory) -> str:
    root = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(7)
    for cls, maker in (("cls-a", _ring_image), ("cls-b", _stripe_image)):
        d = root / cls
        d.mkdir()
        for i in range(PER_CLASS):
            w, h = 96 + 4 * i, 80 + 2 * i
            maker(rng, w, h).save(d / f"img{i}.png")
    (root / "notes.txt").write_text("not an image\n")
    return str(root)


@pytest.fixture(scope="session")
def manifest_path(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("manifest") / "classes.txt"
    path.write_text("# corpus classes\n1,cls-a\n2,cls-b\n")
    return str(path)


@pytest.fixture(scope="session")
def small_config() -> ExtractorConfig:
    return ExtractorConfig(weights="random", input_size=64, seed=0)


@pytest.fixture(scope="session")
def extracted(tmp_path_factory, image_root, manifest_path, small_config):
    """One shared extraction run: (out_dir, sorted pack paths)."""
    out = str(tmp_path_factory.mktemp("packs"))
    written = extract(
        image_root, out, config=small_config, manifest_path=manifest_path
    )
    assert len(written) == 2 * PER_CLASS
    return out, sorted(os.path.join(out, n) for n in os.listdir(out))
