"""File formats: feature packs and trained models.

Feature pack (.ifp), magic "IFP1": an ASCII header block terminated by one
blank line, then raw binary payloads in declared order.

    IFP1
    version: 1
    image_id: <string, no newlines>
    class_id: <int, line present only when labeled>
    height: <raster/label rows, 0 when neither payload present>
    width: <raster/label cols>
    channels: <raster channels, 0 when no raster>
    delta: <feature channels>
    map_height: <feature map rows>
    map_width: <feature map cols>
    has_raster: 0|1
    has_labels: 0|1
    <blank line>
    [raster: channels*height*width float32 LE, channel-major row-major]
    maps: delta*map_height*map_width float32 LE
    [labels: height*width int32 LE]

The header is plain text so other tools can emit packs with no shared code.
Readers accept any header key order; this writer emits the order above.

Model files are canonical JSON (sorted keys, two-space indent, shortest
round-trip float repr), so saving a loaded model reproduces the file byte
for byte. Derived structures (per-medoid unions, per-edge relation sets)
are rebuilt on load rather than stored.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .ifs import (
    Gaussian,
    IFValue,
    IntuitionisticFuzzySet,
    Scaled,
    Trapezoidal,
    Triangular,
    ifs_intersection,
    ifs_union,
    linguistic_partition,
)
from .reasoning import ReasoningConfig, TransferFunction
from .training import ClassSpec, Edge, IfcmModel, Medoid, TrainingConfig

PACK_MAGIC = "IFP1"
PACK_VERSION = 1
MODEL_KIND = "ifcm-model"
MODEL_VERSION = 1


class PackFormatError(ValueError):
    """Unusable pack: bad magic, version, header, or content."""


class PackCorruptionError(PackFormatError):
    """Structurally valid header but damaged payload."""


class ModelFormatError(ValueError):
    """Model file cannot be parsed into a valid model."""


@dataclass(eq=False)
class FeaturePack:
    """Per-image bundle: feature maps plus optional raster/labels/class."""
    image_id: str
    maps: np.ndarray  # (delta, map_height, map_width)
    raster: np.ndarray | None = None  # (channels, height, width) in [0,1]
    labels: np.ndarray | None = None  # (height, width) ints
    class_id: int | None = None

    def __post_init__(self):
        if not self.image_id or "\n" in self.image_id:
            raise PackFormatError("image_id must be non-empty, single-line")
        self.maps = np.asarray(self.maps, dtype=float)
        if self.maps.ndim != 3 or self.maps.shape[0] < 1:
            raise PackFormatError("maps must be (delta>=1, height, width)")
        if not np.isfinite(self.maps).all():
            raise PackFormatError("maps must be finite")
        if self.raster is not None:
            self.raster = np.asarray(self.raster, dtype=float)
            if self.raster.ndim != 3 or self.raster.shape[0] < 1:
                raise PackFormatError("raster must be (channels>=1, h, w)")
            if (not np.isfinite(self.raster).all()
                    or self.raster.min() < -1e-9
                    or self.raster.max() > 1 + 1e-9):
                raise PackFormatError("raster values must lie in [0, 1]")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if (self.labels.ndim != 2
                    or not np.issubdtype(self.labels.dtype, np.integer)):
                raise PackFormatError("labels must be a 2-D integer array")
            self.labels = self.labels.astype(np.int64)
            if self.labels.min() < 0:
                raise PackFormatError("labels must be non-negative")
        if (self.raster is not None and self.labels is not None
                and self.raster.shape[1:] != self.labels.shape):
            raise PackFormatError(
                f"raster {self.raster.shape[1:]} and labels "
                f"{self.labels.shape} resolutions differ")
        if self.class_id is not None and int(self.class_id) < 1:
            raise PackFormatError("class ids start at 1")

    @property
    def height(self) -> int:
        if self.raster is not None:
            return self.raster.shape[1]
        return self.labels.shape[0] if self.labels is not None else 0

    @property
    def width(self) -> int:
        if self.raster is not None:
            return self.raster.shape[2]
        return self.labels.shape[1] if self.labels is not None else 0


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_pack(pack: FeaturePack, path: str):
    """Serialize a pack; the same pack always produces identical bytes."""
    lines = [PACK_MAGIC, f"version: {PACK_VERSION}",
             f"image_id: {pack.image_id}"]
    if pack.class_id is not None:
        lines.append(f"class_id: {int(pack.class_id)}")
    lines += [
        f"height: {pack.height}",
        f"width: {pack.width}",
        f"channels: {pack.raster.shape[0] if pack.raster is not None else 0}",
        f"delta: {pack.maps.shape[0]}",
        f"map_height: {pack.maps.shape[1]}",
        f"map_width: {pack.maps.shape[2]}",
        f"has_raster: {1 if pack.raster is not None else 0}",
        f"has_labels: {1 if pack.labels is not None else 0}",
        "",
    ]
    blobs = [("\n".join(lines) + "\n").encode("ascii")]
    if pack.raster is not None:
        blobs.append(pack.raster.astype("<f4").tobytes())
    blobs.append(pack.maps.astype("<f4").tobytes())
    if pack.labels is not None:
        blobs.append(pack.labels.astype("<i4").tobytes())
    _atomic_write(path, b"".join(blobs))


def _header_int(fields: dict, key: str, minimum: int = 0) -> int:
    if key not in fields:
        raise PackFormatError(f"header is missing {key!r}")
    try:
        value = int(fields[key])
    except ValueError:
        raise PackFormatError(f"header field {key!r} is not an integer")
    if value < minimum:
        raise PackFormatError(f"header field {key!r} must be >= {minimum}")
    return value


def read_pack(path: str) -> FeaturePack:
    """Parse one pack file; see the module docstring for the layout."""
    with open(path, "rb") as fh:
        raw = fh.read()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise PackFormatError(f"{path}: no header terminator")
    try:
        header_lines = raw[:sep].decode("ascii").split("\n")
    except UnicodeDecodeError:
        raise PackFormatError(f"{path}: header is not ASCII")
    if not header_lines or header_lines[0] != PACK_MAGIC:
        raise PackFormatError(f"{path}: bad magic, expected {PACK_MAGIC}")
    fields: dict[str, str] = {}
    for line in header_lines[1:]:
        key, sep_found, value = line.partition(": ")
        if not sep_found:
            raise PackFormatError(f"{path}: malformed header line {line!r}")
        fields[key] = value
    if _header_int(fields, "version") != PACK_VERSION:
        raise PackFormatError(
            f"{path}: unsupported version {fields['version']}")
    if "image_id" not in fields or not fields["image_id"]:
        raise PackFormatError(f"{path}: missing image_id")
    h = _header_int(fields, "height")
    w = _header_int(fields, "width")
    channels = _header_int(fields, "channels")
    delta = _header_int(fields, "delta", minimum=1)
    mh = _header_int(fields, "map_height", minimum=1)
    mw = _header_int(fields, "map_width", minimum=1)
    has_raster = _header_int(fields, "has_raster")
    has_labels = _header_int(fields, "has_labels")
    class_id = (_header_int(fields, "class_id", minimum=1)
                if "class_id" in fields else None)

    expected = delta * mh * mw * 4
    if has_raster:
        if channels < 1 or h < 1 or w < 1:
            raise PackFormatError(f"{path}: raster flagged but dimensions "
                                  "are zero")
        expected += channels * h * w * 4
    if has_labels:
        if h < 1 or w < 1:
            raise PackFormatError(f"{path}: labels flagged but dimensions "
                                  "are zero")
        expected += h * w * 4
    payload = raw[sep + 2:]
    if len(payload) != expected:
        raise PackCorruptionError(
            f"{path}: payload is {len(payload)} bytes, header declares "
            f"{expected}")

    offset = 0
    raster = None
    if has_raster:
        n = channels * h * w
        raster = np.frombuffer(payload, dtype="<f4", count=n,
                               offset=offset).reshape(channels, h, w)
        offset += n * 4
        raster = raster.astype(float)
    n = delta * mh * mw
    maps = np.frombuffer(payload, dtype="<f4", count=n,
                         offset=offset).reshape(delta, mh, mw).astype(float)
    offset += n * 4
    labels = None
    if has_labels:
        labels = np.frombuffer(payload, dtype="<i4", count=h * w,
                               offset=offset).reshape(h, w).astype(np.int64)
    if not np.isfinite(maps).all():
        raise PackCorruptionError(f"{path}: non-finite feature values")
    try:
        return FeaturePack(image_id=fields["image_id"], maps=maps,
                           raster=raster, labels=labels, class_id=class_id)
    except PackFormatError as exc:
        raise PackCorruptionError(f"{path}: {exc}") from exc


def read_class_manifest(path: str) -> list[ClassSpec]:
    """Parse `class_id,name` lines; blank lines and #-comments ignored."""
    specs = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cid, sep, name = line.partition(",")
            if not sep or not name.strip():
                raise PackFormatError(
                    f"{path}:{ln}: expected 'class_id,name'")
            try:
                specs.append(ClassSpec(int(cid), name.strip()))
            except ValueError as exc:
                raise PackFormatError(f"{path}:{ln}: {exc}") from exc
    if not specs:
        raise PackFormatError(f"{path}: empty class manifest")
    return specs


def _mf_to_doc(fn):
    if isinstance(fn, Triangular):
        return {"shape": "triangular", "a": float(fn.a), "b": float(fn.b),
                "c": float(fn.c)}
    if isinstance(fn, Trapezoidal):
        return {"shape": "trapezoidal", "a": float(fn.a), "b": float(fn.b),
                "c": float(fn.c), "d": float(fn.d),
                "apex": None if fn.apex is None else float(fn.apex)}
    if isinstance(fn, Gaussian):
        return {"shape": "gaussian", "center": float(fn.center),
                "sigma": float(fn.sigma)}
    if isinstance(fn, Scaled):
        return {"shape": "scaled", "factor": float(fn.factor),
                "term": _mf_to_doc(fn.term)}
    raise ModelFormatError(f"cannot serialize shape {type(fn).__name__}")


def _mf_from_doc(doc):
    try:
        shape = doc["shape"]
        if shape == "triangular":
            return Triangular(doc["a"], doc["b"], doc["c"])
        if shape == "trapezoidal":
            return Trapezoidal(doc["a"], doc["b"], doc["c"], doc["d"],
                               apex=doc.get("apex"))
        if shape == "gaussian":
            return Gaussian(doc["center"], doc["sigma"])
        if shape == "scaled":
            return Scaled(_mf_from_doc(doc["term"]), doc["factor"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad membership function record: {exc}")
    raise ModelFormatError(f"unknown membership shape {shape!r}")


def save_model(model: IfcmModel, path: str):
    cfg = model.config
    doc = {
        "kind": MODEL_KIND,
        "format_version": MODEL_VERSION,
        "classes": [{"class_id": c.class_id, "name": c.name}
                    for c in model.classes],
        "medoids": [{"class_id": m.class_id,
                     "concept_label": m.concept_label,
                     "vector": [float(v) for v in m.vector]}
                    for m in model.medoids],
        "pair_sets": [[{"label": p.label, "mu": _mf_to_doc(p.mu_fn),
                        "gamma": _mf_to_doc(p.gamma_fn)} for p in pairs]
                      for pairs in model.pair_sets],
        "edges": [{"src": e.src, "dst": e.dst, "mu": float(e.weight.mu),
                   "gamma": float(e.weight.gamma), "kind": e.kind,
                   "polarity": e.polarity, "neutral": e.neutral}
                  for e in model.edges],
        "partition_levels": model.partition.levels,
        "reasoning": {"epsilon": float(model.reasoning.epsilon),
                      "max_iters": int(model.reasoning.max_iters),
                      "transfer": model.reasoning.f_mu.kind,
                      "lam": float(model.reasoning.f_mu.lam)},
        "training": {
            "clusters_per_class": cfg.clusters_per_class,
            "e_b": cfg.e_b, "e_q": cfg.e_q, "mf_shape": cfg.mf_shape,
            "cluster_range": list(cfg.cluster_range),
            "set_range": list(cfg.set_range),
            "superpixels": cfg.superpixels,
            "compactness": float(cfg.compactness),
            "levels": cfg.levels, "seed": cfg.seed,
            "transfer": cfg.transfer, "lam": float(cfg.lam),
            "epsilon": float(cfg.epsilon), "max_iters": cfg.max_iters,
        },
        "diagnostics": model.diagnostics,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    _atomic_write(path, text.encode("utf-8"))


def load_model(path: str) -> IfcmModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a model file ({exc})")
    if not isinstance(doc, dict) or doc.get("kind") != MODEL_KIND:
        raise ModelFormatError(f"{path}: not a {MODEL_KIND} document")
    if doc.get("format_version") != MODEL_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format version {doc.get('format_version')}")
    try:
        classes = [ClassSpec(c["class_id"], c["name"])
                   for c in doc["classes"]]
        medoids = [Medoid(np.asarray(m["vector"], dtype=float),
                          m["class_id"], m["concept_label"])
                   for m in doc["medoids"]]
        pair_sets = [[IntuitionisticFuzzySet(_mf_from_doc(p["mu"]),
                                             _mf_from_doc(p["gamma"]),
                                             label=p["label"])
                      for p in pairs] for pairs in doc["pair_sets"]]
        unions = [ifs_union(pairs) for pairs in pair_sets]
        m = len(medoids)
        edges = []
        for e in doc["edges"]:
            src, dst = int(e["src"]), int(e["dst"])
            if e["kind"] == "input_output":
                relation = unions[src]
            elif e["kind"] == "input_input":
                relation = ifs_intersection(unions[src], unions[dst])
            else:
                raise ModelFormatError(f"unknown edge kind {e['kind']!r}")
            if not (0 <= src < m and 0 <= dst < m + len(classes)):
                raise ModelFormatError(f"edge {src}->{dst} out of range")
            edges.append(Edge(src, dst, IFValue(e["mu"], e["gamma"]),
                              e["kind"], int(e["polarity"]),
                              bool(e["neutral"]), relation))
        t = doc["training"]
        cfg = TrainingConfig(
            clusters_per_class=t["clusters_per_class"], e_b=t["e_b"],
            e_q=t["e_q"], mf_shape=t["mf_shape"],
            cluster_range=tuple(t["cluster_range"]),
            set_range=tuple(t["set_range"]), superpixels=t["superpixels"],
            compactness=t["compactness"], levels=t["levels"],
            seed=t["seed"], transfer=t["transfer"], lam=t["lam"],
            epsilon=t["epsilon"], max_iters=t["max_iters"])
        r = doc["reasoning"]
        reasoning = ReasoningConfig(
            epsilon=r["epsilon"], max_iters=r["max_iters"],
            f_mu=TransferFunction(r["transfer"], r["lam"]),
            f_gamma=TransferFunction(r["transfer"], r["lam"]))
        return IfcmModel(classes=classes, medoids=medoids,
                         pair_sets=pair_sets, unions=unions, edges=edges,
                         partition=linguistic_partition(
                             doc["partition_levels"]),
                         reasoning=reasoning, config=cfg,
                         diagnostics=doc.get("diagnostics", {}))
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ModelFormatError(f"{path}: invalid model document ({exc})")
