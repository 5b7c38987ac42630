"""Synthetic feature-pack corpus shared by the demo scripts.

Each class owns two well-separated part prototypes in feature space; an
image is a 3x3 tile mosaic of noisy copies of those prototypes, shipped
with the tile grid as its region label map. Because the generator knows
the true class, it doubles as the ground-truth oracle.
"""
import numpy as np

from ifcm import FeaturePack

TILE = 2
GRID = 3


def part_template(class_id, part, n_classes=3):
    vec = np.zeros(n_classes + 1)
    vec[class_id - 1] = 5.0
    vec[n_classes] = 3.0 * part
    return vec


def make_pack(class_id, index, rng, n_classes=3, noise=0.3):
    delta = n_classes + 1
    side = GRID * TILE
    maps = np.zeros((delta, side, side))
    labels = np.zeros((side, side), dtype=np.int64)
    for ti in range(GRID):
        for tj in range(GRID):
            vec = part_template(class_id, int(rng.integers(2)), n_classes)
            vec = vec + rng.normal(0.0, noise, delta)
            block = (slice(ti * TILE, (ti + 1) * TILE),
                     slice(tj * TILE, (tj + 1) * TILE))
            maps[(slice(None),) + block] = vec[:, None, None]
            labels[block] = ti * GRID + tj
    return FeaturePack(image_id=f"c{class_id}-i{index}",
                       maps=maps.astype(np.float32).astype(float),
                       labels=labels, class_id=class_id)


def make_corpus(per_class, n_classes=3, seed=0, noise=0.3):
    rng = np.random.default_rng(seed)
    return [make_pack(c, k, rng, n_classes, noise)
            for c in range(1, n_classes + 1) for k in range(per_class)]
