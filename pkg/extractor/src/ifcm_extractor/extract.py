"""Extraction runs: images in, feature packs out.

Images are discovered under a root directory (sorted, recursive).  When
a class manifest is given, an image whose first path component under
the root matches a manifest class name gets that class id stamped into
its pack; other images yield unlabeled packs.  Each pack lands next to
its siblings in the output directory as ``<relative-path>.ifp`` with
path separators folded to ``-``, so reruns overwrite deterministically.

Unreadable or broken image files are skipped with a warning on stderr.
The run fails only when nothing at all could be extracted.
"""

from __future__ import annotations

import os
import sys

from PIL import Image

from .backbone import Backbone, ExtractorConfig
from .packio import read_class_manifest, write_pack

_IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".webp", ".tif", ".tiff"}


class ExtractionError(RuntimeError):
    """Raised when an extraction run produces no packs."""


def find_images(root: str) -> list[str]:
    """Image files under root, as sorted root-relative paths."""
    if not os.path.isdir(root):
        raise ExtractionError(f"image directory not found: {root}")
    found = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if os.path.splitext(name)[1].lower() in _IMAGE_SUFFIXES:
                rel = os.path.relpath(os.path.join(dirpath, name), root)
                found.append(rel)
    return sorted(found)


def class_for(rel_path: str, classes: dict[str, int] | None) -> int | None:
    if not classes:
        return None
    head = rel_path.replace(os.sep, "/").split("/", 1)[0]
    return classes.get(head)


def extract(
    image_dir: str,
    out_dir: str,
    config: ExtractorConfig | None = None,
    manifest_path: str | None = None,
) -> list[str]:
    """Run the backbone over every image under image_dir.

    Returns the paths of the packs written.  Raises ExtractionError if
    no image could be processed.
    """
    config = config or ExtractorConfig()
    classes = read_class_manifest(manifest_path) if manifest_path else None
    rel_paths = find_images(image_dir)
    if not rel_paths:
        raise ExtractionError(f"no image files under {image_dir}")

    os.makedirs(out_dir, exist_ok=True)
    backbone = Backbone(config)
    extra = {
        "backbone": config.describe_backbone(),
        "preprocess": config.describe_preprocess(),
    }

    written: list[str] = []
    for rel in rel_paths:
        src = os.path.join(image_dir, rel)
        try:
            with Image.open(src) as img:
                raster = backbone.prepare(img)
        except Exception as exc:
            print(f"warning: skipping {src}: {exc}", file=sys.stderr)
            continue
        maps = backbone.forward(raster)
        image_id = rel.replace(os.sep, "/")
        stem = image_id.replace("/", "-")
        if stem.lower().endswith(tuple(_IMAGE_SUFFIXES)):
            stem = os.path.splitext(stem)[0]
        dest = os.path.join(out_dir, stem + ".ifp")
        write_pack(
            dest,
            image_id=image_id,
            maps=maps,
            raster=raster.transpose(2, 0, 1),
            class_id=class_for(rel, classes),
            extra_header=extra,
        )
        written.append(dest)

    if not written:
        raise ExtractionError(
            f"all {len(rel_paths)} images under {image_dir} failed to load"
        )
    return written
