"""Convolutional encoder/decoder pair and the patch discriminator."""

import torch
import torch.nn as nn


def _norm(channels: int) -> nn.Module:
    groups = 8
    while channels % groups:
        groups //= 2
    return nn.GroupNorm(max(groups, 1), channels)


class ResBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.norm1 = _norm(channels)
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.norm2 = _norm(channels)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=1)
        self.act = nn.SiLU()

    def forward(self, x):
        h = self.conv1(self.act(self.norm1(x)))
        h = self.conv2(self.act(self.norm2(h)))
        return x + h


class Encoder(nn.Module):
    """Stride-2 stem then one residual stage per additional halving.

    `n_down` halvings take (in_hw) to (in_hw / 2**n_down); channel width
    doubles per stage up to 4x the base width.
    """

    def __init__(self, in_channels: int, code_dim: int, n_down: int, base_channels: int = 16):
        super().__init__()
        if n_down < 1:
            raise ValueError("n_down must be >= 1")
        widths = [min(base_channels * 2**i, base_channels * 4) for i in range(n_down)]
        self.stem = nn.Conv2d(in_channels, widths[0], 4, stride=2, padding=1)
        stages = []
        for i in range(1, n_down):
            stages += [
                ResBlock(widths[i - 1]),
                nn.Conv2d(widths[i - 1], widths[i], 4, stride=2, padding=1),
            ]
        self.stages = nn.Sequential(*stages)
        self.tail = nn.Sequential(
            ResBlock(widths[-1]),
            _norm(widths[-1]),
            nn.SiLU(),
            nn.Conv2d(widths[-1], code_dim, 1),
        )

    def forward(self, x):
        return self.tail(self.stages(self.stem(x)))


class Decoder(nn.Module):
    """Mirror of the encoder; tanh output in [-1, 1]."""

    def __init__(self, out_channels: int, code_dim: int, n_up: int, base_channels: int = 16):
        super().__init__()
        if n_up < 1:
            raise ValueError("n_up must be >= 1")
        widths = [min(base_channels * 2**i, base_channels * 4) for i in range(n_up)]
        widths = widths[::-1]
        self.head = nn.Sequential(
            nn.Conv2d(code_dim, widths[0], 1),
            ResBlock(widths[0]),
        )
        stages = []
        for i in range(n_up - 1):
            stages += [
                nn.Upsample(scale_factor=2, mode="nearest"),
                nn.Conv2d(widths[i], widths[i + 1], 3, padding=1),
                ResBlock(widths[i + 1]),
            ]
        self.stages = nn.Sequential(*stages)
        self.tail = nn.Sequential(
            nn.Upsample(scale_factor=2, mode="nearest"),
            _norm(widths[-1]),
            nn.SiLU(),
            nn.Conv2d(widths[-1], out_channels, 3, padding=1),
            nn.Tanh(),
        )

    def forward(self, z):
        return self.tail(self.stages(self.head(z)))


class PatchDiscriminator(nn.Module):
    """Small conv stack emitting per-patch real/fake logits."""

    def __init__(self, in_channels: int, base_channels: int = 16, n_layers: int = 3):
        super().__init__()
        layers = [
            nn.Conv2d(in_channels, base_channels, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
        ]
        width = base_channels
        for _ in range(n_layers - 1):
            nxt = min(width * 2, base_channels * 8)
            layers += [
                nn.Conv2d(width, nxt, 4, stride=2, padding=1),
                _norm(nxt),
                nn.LeakyReLU(0.2),
            ]
            width = nxt
        layers.append(nn.Conv2d(width, 1, 3, padding=1))
        self.net = nn.Sequential(*layers)

    def forward(self, x):
        return self.net(x)
