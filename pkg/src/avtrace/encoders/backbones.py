"""Residual backbones and the RGB -> single-channel first-layer adaptation.

A backbone factory takes ``width`` and ``pretrained`` keyword arguments and
returns ``(module, feature_width)``; the module maps [N, 3, H, W] images to
[N, feature_width] features.
"""

from __future__ import annotations

import logging

import torch
from torch import nn
from torchvision.models import ResNet18_Weights, ResNet50_Weights, resnet18, resnet50
from torchvision.models.resnet import BasicBlock

from avtrace.registry import ComponentRegistry

logger = logging.getLogger("avtrace.encoders")


def _stage(in_channels: int, out_channels: int, stride: int) -> BasicBlock:
    downsample = None
    if stride != 1 or in_channels != out_channels:
        downsample = nn.Sequential(
            nn.Conv2d(in_channels, out_channels, kernel_size=1, stride=stride, bias=False),
            nn.BatchNorm2d(out_channels),
        )
    return BasicBlock(in_channels, out_channels, stride=stride, downsample=downsample)


class SmallResNet(nn.Module):
    """Stem plus four residual stages of widths w, 2w, 4w, 8w, then global average pooling."""

    def __init__(self, width: int = 16, in_channels: int = 3) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, width, kernel_size=3, stride=2, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(width)
        self.relu = nn.ReLU(inplace=True)
        widths = [width, 2 * width, 4 * width, 8 * width]
        stages = []
        prev = width
        for i, w in enumerate(widths):
            stages.append(_stage(prev, w, stride=1 if i == 0 else 2))
            prev = w
        self.stages = nn.Sequential(*stages)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.feature_width = prev

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.relu(self.bn1(self.conv1(x)))
        return torch.flatten(self.pool(self.stages(x)), 1)


def small_resnet(*, width: int = 16, pretrained: bool = False) -> tuple[nn.Module, int]:
    if pretrained:
        logger.warning("small_resnet has no pretrained weights; using random initialization")
    net = SmallResNet(width=width)
    return net, net.feature_width


def resnet18_backbone(*, width: int = 16, pretrained: bool = False) -> tuple[nn.Module, int]:
    """torchvision ResNet-18 with the classifier removed (512-d features)."""
    net = resnet18(weights=ResNet18_Weights.DEFAULT if pretrained else None)
    net.fc = nn.Identity()
    return net, 512


def resnet50_backbone(*, width: int = 16, pretrained: bool = False) -> tuple[nn.Module, int]:
    """torchvision ResNet-50 with the classifier removed (2048-d features)."""
    net = resnet50(weights=ResNet50_Weights.DEFAULT if pretrained else None)
    net.fc = nn.Identity()
    return net, 2048


BACKBONES = ComponentRegistry()
BACKBONES.register("small_resnet", small_resnet)
BACKBONES.register("resnet18", resnet18_backbone)
BACKBONES.register("resnet50", resnet50_backbone)


def adapt_first_layer(rgb_weights: torch.Tensor) -> torch.Tensor:
    """Average [out, 3, k, k] convolution weights over the colour axis -> [out, 1, k, k]."""
    if rgb_weights.ndim != 4 or rgb_weights.shape[1] != 3:
        raise ValueError(f"expected first-layer weights shaped [out, 3, k, k], got {tuple(rgb_weights.shape)}")
    return rgb_weights.mean(dim=1, keepdim=True)


def adapt_conv(conv: nn.Conv2d) -> nn.Conv2d:
    """Single-channel copy of an RGB convolution, weights averaged over colour."""
    adapted = nn.Conv2d(
        1,
        conv.out_channels,
        kernel_size=conv.kernel_size,  # type: ignore[arg-type]
        stride=conv.stride,  # type: ignore[arg-type]
        padding=conv.padding,  # type: ignore[arg-type]
        dilation=conv.dilation,  # type: ignore[arg-type]
        bias=conv.bias is not None,
    )
    with torch.no_grad():
        adapted.weight.copy_(adapt_first_layer(conv.weight))
        if conv.bias is not None:
            adapted.bias.copy_(conv.bias)  # type: ignore[union-attr]
    return adapted


def to_single_channel(backbone: nn.Module) -> nn.Module:
    """Replace the first convolution of ``backbone`` in place with its adapted copy."""
    for qualified, child in backbone.named_modules():
        if isinstance(child, nn.Conv2d):
            parent_name, _, name = qualified.rpartition(".")
            setattr(backbone.get_submodule(parent_name), name, adapt_conv(child))
            return backbone
    raise ValueError("backbone has no convolution to adapt")


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())
