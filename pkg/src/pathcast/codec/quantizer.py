"""Vector quantization with a straight-through gradient path."""

import torch
import torch.nn as nn


class VectorQuantizer(nn.Module):
    """Nearest-codeword quantizer over a learned codebook.

    Distances are evaluated in the expanded form ``|z|^2 - 2 z.e + |e|^2``
    and ties resolve to the lowest codeword index (torch.argmin returns the
    first minimum). The forward output carries encoder gradients straight
    through the discrete selection: ``z + (z_q - z).detach()``.
    """

    def __init__(self, num_codes: int, code_dim: int):
        super().__init__()
        self.num_codes = num_codes
        self.code_dim = code_dim
        self.codebook = nn.Embedding(num_codes, code_dim)
        self.codebook.weight.data.uniform_(-1.0 / num_codes, 1.0 / num_codes)
        self.register_buffer("usage", torch.zeros(num_codes, dtype=torch.long))
        self.register_buffer("epoch_usage", torch.zeros(num_codes, dtype=torch.long))

    def distances(self, flat: torch.Tensor) -> torch.Tensor:
        """Squared Euclidean distance from each row of flat to each codeword."""
        e = self.codebook.weight
        return (
            flat.pow(2).sum(dim=1, keepdim=True)
            - 2.0 * flat @ e.t()
            + e.pow(2).sum(dim=1)[None, :]
        )

    def assign(self, flat: torch.Tensor) -> torch.Tensor:
        """Index of the nearest codeword for each row (first min on ties)."""
        return torch.argmin(self.distances(flat), dim=1)

    def forward(self, z: torch.Tensor):
        """Quantize a (B, C, H, W) latent; returns (z_st, codes, z_q).

        z_st carries the straight-through gradient, codes is (B, H, W)
        int64, z_q is the raw codebook lookup (no encoder gradient).
        """
        b, c, h, w = z.shape
        if c != self.code_dim:
            raise ValueError(f"latent channels {c} != code_dim {self.code_dim}")
        flat = z.permute(0, 2, 3, 1).reshape(-1, c)
        codes = self.assign(flat)
        z_q = self.codebook(codes).view(b, h, w, c).permute(0, 3, 1, 2)
        z_st = z + (z_q - z).detach()
        if self.training:
            self._track_usage(codes)
        return z_st, codes.view(b, h, w), z_q

    def lookup(self, codes: torch.Tensor) -> torch.Tensor:
        """Codebook rows for (B, H, W) indices, returned as (B, C, H, W)."""
        z_q = self.codebook(codes)
        return z_q.permute(0, 3, 1, 2).contiguous()

    @torch.no_grad()
    def _track_usage(self, codes: torch.Tensor) -> None:
        batch_counts = torch.bincount(codes, minlength=self.num_codes)
        self.usage += batch_counts
        self.epoch_usage += batch_counts

    def begin_epoch(self) -> None:
        """Reset the per-epoch usage counters."""
        self.epoch_usage.zero_()

    @torch.no_grad()
    def reseed_dead(self, flat: torch.Tensor, generator: torch.Generator) -> int:
        """Replace codewords unused this epoch with random rows of flat.

        Returns the number of codewords reseeded.
        """
        dead = self.epoch_usage == 0
        n_dead = int(dead.sum())
        if n_dead:
            pick = torch.randint(0, flat.shape[0], (n_dead,), generator=generator)
            self.codebook.weight.data[dead] = flat[pick]
        return n_dead

    def usage_fraction(self) -> float:
        """Fraction of codewords selected at least once since construction."""
        return float((self.usage > 0).float().mean())
