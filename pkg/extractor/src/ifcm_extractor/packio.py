"""Feature-pack output for the extractor.

Emits the IFP1 container: an ASCII header of ``key: value`` lines
terminated by a blank line, followed by raw little-endian payloads in
fixed order (raster as float32, feature maps as float32, labels as
int32, each row-major, maps channel-major).  Header keys are written in
canonical order so two writers producing the same content produce the
same bytes.  Extractor-specific provenance (``backbone``,
``preprocess``) goes after the standard keys; readers that do not know
them skip them.

Writes are atomic: payload goes to a temp file in the target directory
which is renamed over the destination, so a crash never leaves a
half-written pack behind.

``verify_pack`` inspects a file and returns a report.  It never raises:
unreadable, truncated, or inconsistent files come back as a report with
``ok`` False and one message per problem found.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

_MAGIC = b"IFP1"
_VERSION = 1

# canonical header order; class_id slots in after image_id when present
_STANDARD_KEYS = (
    "version",
    "image_id",
    "class_id",
    "height",
    "width",
    "channels",
    "delta",
    "map_height",
    "map_width",
    "has_raster",
    "has_labels",
)


def write_pack(
    path: str,
    image_id: str,
    maps: np.ndarray,
    raster: np.ndarray,
    class_id: int | None = None,
    extra_header: dict[str, str] | None = None,
) -> None:
    """Write one feature pack.

    maps is (delta, map_h, map_w) float; raster is channel-major
    (channels, height, width) float in [0, 1], matching the payload
    layout.  extra_header entries are appended after the standard keys
    in insertion order; values must be single-line ASCII.
    """
    if "\n" in image_id or not image_id.strip():
        raise ValueError("image_id must be a non-empty single line")
    maps = np.asarray(maps, dtype=np.float32)
    raster = np.asarray(raster, dtype=np.float32)
    if maps.ndim != 3:
        raise ValueError(f"maps must be 3-D, got shape {maps.shape}")
    if raster.ndim != 3:
        raise ValueError(f"raster must be 3-D, got shape {raster.shape}")
    if not np.isfinite(maps).all():
        raise ValueError("maps contain non-finite values")
    if raster.min() < -1e-9 or raster.max() > 1 + 1e-9:
        raise ValueError("raster values must lie in [0, 1]")
    raster = np.clip(raster, 0.0, 1.0)
    if class_id is not None and class_id < 1:
        raise ValueError(f"class_id must be >= 1, got {class_id}")

    delta, map_h, map_w = maps.shape
    channels, height, width = raster.shape
    lines = [_MAGIC.decode("ascii"), f"version: {_VERSION}", f"image_id: {image_id}"]
    if class_id is not None:
        lines.append(f"class_id: {class_id}")
    lines += [
        f"height: {height}",
        f"width: {width}",
        f"channels: {channels}",
        f"delta: {delta}",
        f"map_height: {map_h}",
        f"map_width: {map_w}",
        "has_raster: 1",
        "has_labels: 0",
    ]
    for key, value in (extra_header or {}).items():
        if key in _STANDARD_KEYS or "\n" in value or ": " in key:
            raise ValueError(f"bad extra header entry: {key!r}")
        lines.append(f"{key}: {value}")
    header = ("\n".join(lines) + "\n\n").encode("ascii")

    body = raster.astype("<f4").tobytes() + maps.astype("<f4").tobytes()
    _atomic_write(path, header + body)


def _atomic_write(path: str, blob: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class PackReport:
    """Outcome of verify_pack: ok flag plus human-readable problems."""

    path: str
    ok: bool = True
    messages: list[str] = field(default_factory=list)
    header: dict[str, str] = field(default_factory=dict)

    def problem(self, message: str) -> None:
        self.ok = False
        self.messages.append(message)

    def __str__(self) -> str:
        if self.ok:
            return f"{self.path}: OK"
        return "\n".join(f"{self.path}: {m}" for m in self.messages)


_INT_KEYS = (
    "height",
    "width",
    "channels",
    "delta",
    "map_height",
    "map_width",
    "has_raster",
    "has_labels",
)


def verify_pack(path: str) -> PackReport:
    """Check one pack file for structural consistency. Never raises."""
    report = PackReport(path=path)
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        report.problem(f"unreadable: {exc}")
        return report

    split = blob.find(b"\n\n")
    if split < 0:
        report.problem("no blank line terminating the header")
        return report
    try:
        text = blob[:split].decode("ascii")
    except UnicodeDecodeError:
        report.problem("header is not ASCII")
        return report
    lines = text.split("\n")
    if lines[0] != _MAGIC.decode("ascii"):
        report.problem(f"bad magic {lines[0]!r}")
        return report

    fields: dict[str, str] = {}
    for line in lines[1:]:
        key, sep, value = line.partition(": ")
        if not sep or not key:
            report.problem(f"malformed header line {line!r}")
            return report
        if key in fields:
            report.problem(f"duplicate header key {key!r}")
            return report
        fields[key] = value
    report.header = dict(fields)

    if fields.get("version") != str(_VERSION):
        report.problem(f"unsupported version {fields.get('version')!r}")
    if not fields.get("image_id", "").strip():
        report.problem("missing image_id")

    values: dict[str, int] = {}
    for key in _INT_KEYS:
        raw = fields.get(key)
        if raw is None:
            report.problem(f"missing header key {key!r}")
            continue
        try:
            values[key] = int(raw)
        except ValueError:
            report.problem(f"non-integer {key}: {raw!r}")
    if "class_id" in fields:
        try:
            if int(fields["class_id"]) < 1:
                report.problem(f"class_id must be >= 1, got {fields['class_id']}")
        except ValueError:
            report.problem(f"non-integer class_id: {fields['class_id']!r}")
    if not report.ok:
        return report

    if any(values[k] < 0 for k in _INT_KEYS):
        report.problem("negative header dimension")
        return report
    for flag in ("has_raster", "has_labels"):
        if values[flag] not in (0, 1):
            report.problem(f"{flag} must be 0 or 1, got {values[flag]}")
            return report

    expected = 0
    if values["has_raster"]:
        expected += values["height"] * values["width"] * values["channels"] * 4
    expected += values["delta"] * values["map_height"] * values["map_width"] * 4
    if values["has_labels"]:
        expected += values["height"] * values["width"] * 4
    actual = len(blob) - split - 2
    if actual != expected:
        report.problem(
            f"payload is {actual} bytes but the header promises {expected}"
        )
        return report

    floats = np.frombuffer(blob[split + 2 : split + 2 + expected], dtype="<f4")
    n_label = values["height"] * values["width"] if values["has_labels"] else 0
    feature_part = floats[: floats.size - n_label] if n_label else floats
    if not np.isfinite(feature_part).all():
        report.problem("non-finite values in raster or feature maps")
    return report


def read_class_manifest(path: str) -> dict[str, int]:
    """Parse ``class_id,name`` lines into a name -> id lookup.

    Blank lines and lines starting with ``#`` are skipped.  Names are
    matched exactly (case-sensitive) against image directory names.
    """
    mapping: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            left, sep, name = line.partition(",")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'class_id,name'")
            try:
                class_id = int(left)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer class id {left!r}")
            if class_id < 1:
                raise ValueError(f"{path}:{lineno}: class ids start at 1")
            name = name.strip()
            if not name:
                raise ValueError(f"{path}:{lineno}: empty class name")
            if name in mapping:
                raise ValueError(f"{path}:{lineno}: duplicate class name {name!r}")
            mapping[name] = class_id
    if not mapping:
        raise ValueError(f"{path}: manifest holds no classes")
    return mapping
