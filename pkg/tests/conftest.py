"""Shared synthetic-data builders.

The blob fixture fabricates feature packs directly in feature space: each
class owns a small set of part prototypes (well-separated Gaussian blobs),
every image is a tile mosaic of noisy part vectors, and the tile grid is
shipped as the region label map. Ground truth is the generating class, which
makes the generator itself the classification oracle.
"""
import numpy as np

from ifcm.store import FeaturePack

TILE = 2  # pixels per tile side
GRID = 3  # tiles per image side


def part_template(class_id: int, part: int, n_classes: int = 3) -> np.ndarray:
    """Prototype vector: one-hot class block plus a part-offset channel."""
    vec = np.zeros(n_classes + 1)
    vec[class_id - 1] = 5.0
    vec[n_classes] = 3.0 * part
    return vec


def make_blob_pack(class_id: int, index: int, rng,
                   n_classes: int = 3, parts: int = 2,
                   noise: float = 0.3) -> FeaturePack:
    """One synthetic image: GRID x GRID tiles of noisy part vectors."""
    delta = n_classes + 1
    side = GRID * TILE
    maps = np.zeros((delta, side, side))
    labels = np.zeros((side, side), dtype=np.int64)
    for ti in range(GRID):
        for tj in range(GRID):
            part = int(rng.integers(parts))
            vec = part_template(class_id, part, n_classes)
            vec = vec + rng.normal(0.0, noise, delta)
            sl = (slice(ti * TILE, (ti + 1) * TILE),
                  slice(tj * TILE, (tj + 1) * TILE))
            maps[(slice(None),) + sl] = vec[:, None, None]
            labels[sl] = ti * GRID + tj
    return FeaturePack(image_id=f"c{class_id}-i{index}",
                       maps=maps.astype(np.float32).astype(float),
                       labels=labels, class_id=class_id)


def make_blob_packs(per_class: int, n_classes: int = 3, parts: int = 2,
                    seed: int = 0, noise: float = 0.3) -> list[FeaturePack]:
    rng = np.random.default_rng(seed)
    packs = []
    for class_id in range(1, n_classes + 1):
        for k in range(per_class):
            packs.append(make_blob_pack(class_id, k, rng, n_classes, parts,
                                        noise))
    return packs


def split_packs(packs, train_per_class: int, seed: int):
    """Deterministic stratified split into (train, test)."""
    rng = np.random.default_rng(seed)
    by_class: dict[int, list] = {}
    for p in packs:
        by_class.setdefault(p.class_id, []).append(p)
    train, test = [], []
    for cid in sorted(by_class):
        group = list(by_class[cid])
        order = rng.permutation(len(group))
        train += [group[i] for i in order[:train_per_class]]
        test += [group[i] for i in order[train_per_class:]]
    return train, test
