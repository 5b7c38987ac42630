"""Convolutional backbone wrapper.

Wraps a torchvision classifier (VGG-16 for now), truncated at a chosen
layer so the output is a spatial feature map rather than a pooled
vector.  Three weight modes: "pretrained" pulls the stock ImageNet
checkpoint, "random" draws a fresh seeded initialization (useful where
no checkpoint is available and for deterministic tests), and a
filesystem path loads a saved state dict.

Preprocessing is the standard recipe for these checkpoints: resize the
shorter side to 8/7 of the target, center-crop, scale to [0, 1], then
mean/std normalize per channel.  The crop in [0, 1] before
normalization is what gets stored as the pack raster; the normalized
tensor is what the network sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from PIL import Image

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)

# output index into vgg16.features per named tap; convN is the ReLU
# closing the Nth conv block
_VGG16_TAPS = {
    "conv1": 3,
    "conv2": 8,
    "conv3": 15,
    "conv4": 22,
    "conv5": 29,
    "pool5": 30,
}


@dataclass(frozen=True)
class ExtractorConfig:
    """Knobs for one extraction run."""

    backbone: str = "vgg16"
    layer: str = "conv5"
    weights: str = "pretrained"
    input_size: int = 224
    seed: int = 0

    def __post_init__(self):
        if self.backbone != "vgg16":
            raise ValueError(f"unknown backbone {self.backbone!r}")
        if self.input_size < 32:
            raise ValueError(
                f"input_size must be at least 32, got {self.input_size}"
            )

    def describe_backbone(self) -> str:
        tag = f"{self.backbone} layer={self.layer} weights={self.weights}"
        if self.weights == "random":
            tag += f" seed={self.seed}"
        return tag

    def describe_preprocess(self) -> str:
        s = self.input_size
        return (
            f"resize{_resize_side(s)}-centercrop{s} rgb bilinear "
            f"mean={','.join(str(v) for v in _IMAGENET_MEAN)} "
            f"std={','.join(str(v) for v in _IMAGENET_STD)}"
        )


def _resize_side(size: int) -> int:
    # 256 for the canonical 224 crop, same ratio elsewhere
    return int(round(size * 256 / 224))


def _layer_index(layer: str) -> int:
    if layer in _VGG16_TAPS:
        return _VGG16_TAPS[layer]
    prefix, sep, tail = layer.partition(".")
    if prefix == "features" and sep and tail.isdigit():
        return int(tail)
    raise ValueError(
        f"unknown layer {layer!r}; use one of {sorted(_VGG16_TAPS)} "
        "or features.<index>"
    )


class Backbone:
    """Truncated feature network plus its preprocessing."""

    def __init__(self, config: ExtractorConfig):
        self.config = config
        index = _layer_index(config.layer)
        full = _load_vgg16(config)
        stages = list(full.features.children())
        if index >= len(stages):
            raise ValueError(
                f"layer index {index} out of range; vgg16 features has "
                f"{len(stages)} stages"
            )
        self.net = torch.nn.Sequential(*stages[: index + 1])
        self.net.eval()
        for p in self.net.parameters():
            p.requires_grad_(False)

        probe = torch.zeros(1, 3, config.input_size, config.input_size)
        with torch.no_grad():
            out = self.net(probe)
        if out.ndim != 4 or out.shape[2] < 1 or out.shape[3] < 1:
            raise ValueError(
                f"layer {config.layer!r} yields shape {tuple(out.shape)}, "
                "not a spatial map"
            )
        self.delta = int(out.shape[1])
        self.map_shape = (int(out.shape[2]), int(out.shape[3]))

    def prepare(self, image: Image.Image) -> np.ndarray:
        """Resize + center-crop to the working resolution, unit range."""
        size = self.config.input_size
        side = _resize_side(size)
        w, h = image.size
        if w <= h:
            new_w, new_h = side, max(1, int(round(h * side / w)))
        else:
            new_w, new_h = max(1, int(round(w * side / h))), side
        image = image.convert("RGB").resize((new_w, new_h), Image.BILINEAR)
        left = (new_w - size) // 2
        top = (new_h - size) // 2
        image = image.crop((left, top, left + size, top + size))
        return np.asarray(image, dtype=np.float32) / 255.0

    def forward(self, raster: np.ndarray) -> np.ndarray:
        """Map a prepared (H, W, 3) unit-range raster to feature maps."""
        mean = torch.tensor(_IMAGENET_MEAN).view(3, 1, 1)
        std = torch.tensor(_IMAGENET_STD).view(3, 1, 1)
        x = torch.from_numpy(np.ascontiguousarray(raster.transpose(2, 0, 1)))
        x = (x - mean) / std
        with torch.no_grad():
            out = self.net(x.unsqueeze(0))
        return out.squeeze(0).numpy().astype(np.float32)


def _load_vgg16(config: ExtractorConfig):
    from torchvision import models

    if config.weights == "pretrained":
        try:
            return models.vgg16(weights=models.VGG16_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise RuntimeError(
                "could not obtain pretrained vgg16 weights "
                f"({exc}); pass weights='random' or a state-dict path "
                "to work offline"
            ) from exc
    if config.weights == "random":
        torch.manual_seed(config.seed)
        return models.vgg16(weights=None)
    model = models.vgg16(weights=None)
    state = torch.load(config.weights, map_location="cpu", weights_only=True)
    try:
        model.load_state_dict(state)
    except RuntimeError as exc:
        raise ValueError(
            f"state dict at {config.weights} does not fit vgg16: {exc}"
        ) from exc
    return model
