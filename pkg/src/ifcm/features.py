"""Region-level feature preparation.

Turns an image plus its feature maps into a short list of region feature
vectors: superpixel segmentation over the raster, bilinear rescaling of the
maps to the segmentation resolution, per-region average pooling, and a
selection step that keeps regions central in both image space and feature
space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

SLIC_ITERATIONS = 10
DEFAULT_COMPACTNESS = 10.0


class SegmentationError(ValueError):
    """Invalid segmentation request or malformed label map."""


@dataclass
class Raster:
    """Channel-first image with intensities normalized to [0, 1]."""
    data: np.ndarray  # (channels, height, width)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 3:
            raise ValueError("raster data must be (channels, height, width)")
        if self.data.shape[1] < 1 or self.data.shape[2] < 1:
            raise ValueError("raster must have positive height and width")
        if not np.isfinite(self.data).all():
            raise ValueError("raster intensities must be finite")
        if self.data.min() < -1e-9 or self.data.max() > 1 + 1e-9:
            raise ValueError("raster intensities must lie in [0, 1]")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass
class SuperpixelMap:
    """Dense label image; every label forms one 4-connected region."""
    labels: np.ndarray  # (height, width) ints in [0, n_labels)

    def __post_init__(self):
        self.labels = np.asarray(self.labels)
        if self.labels.ndim != 2 or not np.issubdtype(self.labels.dtype,
                                                      np.integer):
            raise SegmentationError("labels must be a 2-D integer array")
        self.labels = self.labels.astype(np.int64)
        n = int(self.labels.max()) + 1
        if self.labels.min() < 0:
            raise SegmentationError("labels must be non-negative")
        counts = np.bincount(self.labels.ravel(), minlength=n)
        if (counts == 0).any():
            raise SegmentationError("label ids must be dense (every id used)")
        for v in range(n):
            _, parts = ndimage.label(self.labels == v)
            if parts != 1:
                raise SegmentationError(f"label {v} splits into {parts} "
                                        "4-connected parts")

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def n_labels(self) -> int:
        return int(self.labels.max()) + 1


@dataclass
class FeatureMaps:
    """Stack of per-channel activation maps."""
    values: np.ndarray  # (delta, height, width)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3:
            raise ValueError("feature maps must be (delta, height, width)")
        if not np.isfinite(self.values).all():
            raise ValueError("feature maps must be finite")

    @property
    def delta(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class SuperpixelFeature:
    label: int
    centroid: tuple[float, float]  # (row, col) center of mass
    vector: np.ndarray  # length-delta pooled features


def _grid_centers(height: int, width: int, p_target: int):
    nrows = max(1, round(np.sqrt(p_target * height / width)))
    ncols = max(1, round(p_target / nrows))
    ys = (np.arange(nrows) + 0.5) * height / nrows
    xs = (np.arange(ncols) + 0.5) * width / ncols
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    radius = int(np.ceil(max(np.sqrt(height * width / p_target),
                             height / nrows, width / ncols)))
    return np.stack([yy.ravel(), xx.ravel()], axis=1), radius


def slic_segment(raster: Raster, p_target: int,
                 compactness: float = DEFAULT_COMPACTNESS) -> SuperpixelMap:
    """Grid-seeded local k-means over color+position, then fragment cleanup.

    Pixels compete for the nearest center under
        D^2 = d_color^2 + (compactness / S)^2 * d_spatial^2,  S = sqrt(HW/P).
    After the fixed iteration budget, every disconnected fragment (and every
    region smaller than a quarter of the expected superpixel area) is merged
    into its largest adjacent region, so each final label is one 4-connected
    component. The returned label count may differ slightly from `p_target`.
    """
    h, w = raster.height, raster.width
    if not 1 <= p_target <= h * w:
        raise SegmentationError(f"p_target must be in [1, {h * w}], "
                                f"got {p_target}")
    if not compactness > 0:
        raise SegmentationError("compactness must be positive")

    img = raster.data  # (c, h, w)
    centers_pos, radius = _grid_centers(h, w, p_target)
    k = centers_pos.shape[0]
    # sample initial center colors at the nearest pixel
    ri = np.clip(centers_pos[:, 0].astype(int), 0, h - 1)
    ci = np.clip(centers_pos[:, 1].astype(int), 0, w - 1)
    centers_col = img[:, ri, ci].T.copy()  # (k, c)

    spatial_scale = (compactness / np.sqrt(h * w / p_target)) ** 2
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]

    assign = np.zeros((h, w), dtype=np.int64)
    for _ in range(SLIC_ITERATIONS):
        best = np.full((h, w), np.inf)
        assign.fill(-1)
        for ki in range(k):
            cy, cx = centers_pos[ki]
            r0, r1 = max(0, int(cy) - radius), min(h, int(cy) + radius + 1)
            c0, c1 = max(0, int(cx) - radius), min(w, int(cx) + radius + 1)
            patch = img[:, r0:r1, c0:c1]
            d_col = np.sum((patch - centers_col[ki][:, None, None]) ** 2,
                           axis=0)
            d_sp = ((rows[r0:r1] - cy) ** 2 + (cols[:, c0:c1] - cx) ** 2)
            d = d_col + spatial_scale * d_sp
            better = d < best[r0:r1, c0:c1]
            best[r0:r1, c0:c1][better] = d[better]
            assign[r0:r1, c0:c1][better] = ki

        missed = assign < 0
        if missed.any():
            my, mx = np.nonzero(missed)
            pix = img[:, my, mx].T  # (miss, c)
            d_col = np.sum((pix[:, None, :] - centers_col[None]) ** 2, axis=2)
            d_sp = ((my[:, None] - centers_pos[None, :, 0]) ** 2
                    + (mx[:, None] - centers_pos[None, :, 1]) ** 2)
            assign[my, mx] = np.argmin(d_col + spatial_scale * d_sp, axis=1)

        flat = assign.ravel()
        counts = np.bincount(flat, minlength=k).astype(float)
        occupied = counts > 0
        ys = np.bincount(flat, weights=np.broadcast_to(rows, (h, w)).ravel(),
                         minlength=k)
        xs = np.bincount(flat, weights=np.broadcast_to(cols, (h, w)).ravel(),
                         minlength=k)
        centers_pos[occupied, 0] = ys[occupied] / counts[occupied]
        centers_pos[occupied, 1] = xs[occupied] / counts[occupied]
        for ch in range(img.shape[0]):
            sums = np.bincount(flat, weights=img[ch].ravel(), minlength=k)
            centers_col[occupied, ch] = sums[occupied] / counts[occupied]

    return SuperpixelMap(_enforce_connectivity(assign, h * w / p_target))


def _enforce_connectivity(assign: np.ndarray, expected_area: float) -> np.ndarray:
    """Merge stray fragments so every final label is one connected region.

    A fragment is any component that is not its label's largest, or whose
    area falls below a quarter of the expected superpixel area. Fragments
    merge (in raster-scan order) into the adjacent component of largest
    current area; adjacent unions keep regions connected.
    """
    h, w = assign.shape
    min_size = expected_area / 4.0

    comp = np.full((h, w), -1, dtype=np.int64)
    n_comp = 0
    comp_label: list[int] = []
    for v in np.unique(assign):
        cc, parts = ndimage.label(assign == v)
        for p in range(1, parts + 1):
            comp[cc == p] = n_comp
            comp_label.append(int(v))
            n_comp += 1
    sizes = np.bincount(comp.ravel(), minlength=n_comp).astype(float)

    # adjacency between components (4-neighborhood)
    neighbors: list[set] = [set() for _ in range(n_comp)]
    vert = comp[:-1, :] != comp[1:, :]
    for a, b in zip(comp[:-1, :][vert], comp[1:, :][vert]):
        neighbors[a].add(int(b))
        neighbors[b].add(int(a))
    horiz = comp[:, :-1] != comp[:, 1:]
    for a, b in zip(comp[:, :-1][horiz], comp[:, 1:][horiz]):
        neighbors[a].add(int(b))
        neighbors[b].add(int(a))

    anchor = {}
    for c in range(n_comp):
        lbl = comp_label[c]
        if lbl not in anchor or sizes[c] > sizes[anchor[lbl]]:
            anchor[lbl] = c
    doomed = [c for c in range(n_comp)
              if anchor[comp_label[c]] != c or sizes[c] < min_size]

    parent = list(range(n_comp))

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    order = {}  # component -> first raster index, for deterministic order
    flat_comp = comp.ravel()
    seen = np.zeros(n_comp, dtype=bool)
    for idx, c in enumerate(flat_comp):
        if not seen[c]:
            seen[c] = True
            order[int(c)] = idx
    for c in sorted(doomed, key=lambda c: order[c]):
        root = find(c)
        cands = {find(nb) for nb in neighbors[c]} - {root}
        if not cands:
            continue
        target = max(cands, key=lambda r: (sizes[r], -order.get(r, 0)))
        parent[root] = target
        sizes[target] += sizes[root]

    roots = np.array([find(c) for c in range(n_comp)])
    merged = roots[comp]
    # dense relabel by first appearance
    mapping: dict[int, int] = {}
    for r in merged.ravel():
        if int(r) not in mapping:
            mapping[int(r)] = len(mapping)
    lut = np.zeros(int(merged.max()) + 1, dtype=np.int64)
    for r, dense in mapping.items():
        lut[r] = dense
    return lut[merged]


def rescale_maps(maps: FeatureMaps, target_h: int, target_w: int) -> FeatureMaps:
    """Per-channel bilinear resampling with endpoint-aligned sample grids.

    Output pixel i samples source coordinate i*(in-1)/(out-1) (the center
    when out = 1), so a same-size target reproduces the input exactly and
    all outputs are convex combinations of inputs.
    """
    if target_h < 1 or target_w < 1:
        raise ValueError("target dimensions must be positive")
    src = maps.values
    in_h, in_w = maps.height, maps.width

    def axis_coords(n_in, n_out):
        if n_out == 1:
            return np.array([(n_in - 1) / 2.0])
        return np.arange(n_out) * (n_in - 1) / (n_out - 1)

    ry = axis_coords(in_h, target_h)
    rx = axis_coords(in_w, target_w)
    y0 = np.floor(ry).astype(int)
    x0 = np.floor(rx).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ry - y0)[None, :, None]
    fx = (rx - x0)[None, None, :]

    v00 = src[:, y0][:, :, x0]
    v01 = src[:, y0][:, :, x1]
    v10 = src[:, y1][:, :, x0]
    v11 = src[:, y1][:, :, x1]
    out = ((1 - fy) * (1 - fx) * v00 + (1 - fy) * fx * v01
           + fy * (1 - fx) * v10 + fy * fx * v11)
    return FeatureMaps(out)


def pool_superpixels(maps: FeatureMaps,
                     sp: SuperpixelMap) -> list[SuperpixelFeature]:
    """Average the maps over each region; centroid is the pixel center of mass."""
    if (maps.height, maps.width) != (sp.height, sp.width):
        raise ValueError(f"maps {maps.height}x{maps.width} do not match "
                         f"labels {sp.height}x{sp.width}")
    flat = sp.labels.ravel()
    n = sp.n_labels
    counts = np.bincount(flat, minlength=n).astype(float)
    rows = np.repeat(np.arange(sp.height), sp.width)
    cols = np.tile(np.arange(sp.width), sp.height)
    cy = np.bincount(flat, weights=rows, minlength=n) / counts
    cx = np.bincount(flat, weights=cols, minlength=n) / counts
    vectors = np.stack([np.bincount(flat, weights=ch.ravel(), minlength=n)
                        / counts for ch in maps.values], axis=1)
    return [SuperpixelFeature(label=i, centroid=(float(cy[i]), float(cx[i])),
                              vector=vectors[i]) for i in range(n)]


def select_informative(
        features: list[SuperpixelFeature]) -> list[SuperpixelFeature]:
    """Keep regions that sit centrally in both image space and feature space.

    A region qualifies when its mean distance to the other regions is
    strictly below the grand mean, in BOTH the centroid space and the
    feature space. Fewer than two qualifying regions means the criterion is
    degenerate; the full list is returned instead.
    """
    if not features:
        raise ValueError("select_informative needs at least one region")
    n = len(features)
    if n < 3:
        return list(features)
    pos = np.array([f.centroid for f in features])
    vec = np.array([np.asarray(f.vector, dtype=float) for f in features])
    d_pos = np.sqrt(np.sum((pos[:, None] - pos[None]) ** 2, axis=2))
    d_vec = np.sqrt(np.sum((vec[:, None] - vec[None]) ** 2, axis=2))
    mean_pos = d_pos.sum(axis=1) / (n - 1)
    mean_vec = d_vec.sum(axis=1) / (n - 1)
    keep = (mean_pos < mean_pos.mean()) & (mean_vec < mean_vec.mean())
    if keep.sum() < 2:
        return list(features)
    return [f for f, k in zip(features, keep) if k]
