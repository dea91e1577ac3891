"""Shared multiscale feature extractor and per-stream adapters.

The encoder is shared by both streams; only the 1x1 adapters are
stream-specific, so gradients from either stream reach the trunk.
"""

import torch
import torch.nn as nn

ENCODER_CHANNELS = (16, 32, 64, 128)  # strides 2, 4, 8, 16
STREAM_LEVEL = 2                      # stride-8 level feeds the stream adapters
LOW_LEVEL = 0                         # stride-2 level supplies low-level context


class ConvBNAct(nn.Module):
    def __init__(self, c_in, c_out, stride=1):
        super().__init__()
        self.conv = nn.Conv2d(c_in, c_out, 3, stride=stride, padding=1)
        self.bn = nn.BatchNorm2d(c_out)
        self.act = nn.SiLU()

    def forward(self, x):
        return self.act(self.bn(self.conv(x)))


class PyramidStage(nn.Module):
    """Two 3x3 conv+BN+act blocks; the second carries the stride-2 downsample."""

    def __init__(self, c_in, c_out):
        super().__init__()
        self.block1 = ConvBNAct(c_in, c_out)
        self.block2 = ConvBNAct(c_out, c_out, stride=2)

    def forward(self, x):
        return self.block2(self.block1(x))


class PyramidEncoder(nn.Module):
    """4-level pyramid at strides {2,4,8,16}, channels ENCODER_CHANNELS."""

    def __init__(self, channels=ENCODER_CHANNELS):
        super().__init__()
        self.channels = tuple(channels)
        stages = []
        c_in = 3
        for c_out in self.channels:
            stages.append(PyramidStage(c_in, c_out))
            c_in = c_out
        self.stages = nn.ModuleList(stages)

    def forward(self, image: torch.Tensor) -> list[torch.Tensor]:
        if image.dim() != 4 or image.shape[1] != 3:
            raise ValueError(f"expected Bx3xHxW image, got {tuple(image.shape)}")
        h, w = image.shape[-2:]
        if h % 16 or w % 16:
            raise ValueError(f"image dims {h}x{w} must be multiples of 16")
        levels = []
        x = image
        for stage in self.stages:
            x = stage(x)
            levels.append(x)
        return levels


class StreamAdapter(nn.Module):
    """Per-stream 1x1 projection of the stride-8 pyramid level."""

    def __init__(self, c_in=ENCODER_CHANNELS[STREAM_LEVEL], c_out=64):
        super().__init__()
        self.proj = nn.Conv2d(c_in, c_out, 1)

    def forward(self, pyramid: list[torch.Tensor]) -> torch.Tensor:
        return self.proj(pyramid[STREAM_LEVEL])
