"""Carrier-frequency conditioning: band identity plus value encoding.

A carrier is described two ways at once: a learned per-band embedding row
(identity) and a deterministic sinusoidal encoding of the normalised
carrier value (magnitude).  The fused vector is their concatenation, so
an unregistered carrier can still be encoded by zeroing the identity half
while keeping the value half informative.
"""

import math

import numpy as np
import torch
import torch.nn as nn

from .errors import ContractViolationError, UnknownBandError

MIN_FREQ_HZ = 1e9
MAX_FREQ_HZ = 1e11


def normalize_frequency(f_hz) -> np.ndarray:
    """Map carriers in [1, 100) GHz onto [0, 1) via log10(f/1GHz)/2."""
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(~np.isfinite(f)) or np.any(f < MIN_FREQ_HZ) or np.any(f >= MAX_FREQ_HZ):
        raise ContractViolationError(
            f"carrier frequency must lie in [{MIN_FREQ_HZ:g}, {MAX_FREQ_HZ:g}) Hz"
        )
    return np.log10(f / 1e9) / 2.0


def sinusoidal_encoding(f_norm, dim: int) -> np.ndarray:
    """Sin/cos encoding of a normalised value at octave frequencies.

    Output layout for dim = 2D is [sin(2pi f 2^0) .. sin(2pi f 2^{D-1}),
    cos(2pi f 2^0) .. cos(2pi f 2^{D-1})].
    """
    if dim % 2:
        raise ContractViolationError(f"encoding dim must be even, got {dim}")
    f = np.atleast_1d(np.asarray(f_norm, dtype=np.float64))
    scales = 2.0 ** np.arange(dim // 2)
    phase = 2.0 * math.pi * f[:, None] * scales[None, :]
    out = np.concatenate([np.sin(phase), np.cos(phase)], axis=1)
    return out[0] if np.isscalar(f_norm) or np.ndim(f_norm) == 0 else out


class BandRegistry:
    """Ordered mapping from carrier frequency to a small integer band id."""

    def __init__(self, bands_hz=()):
        self._bands: list[float] = []
        for f in bands_hz:
            self.register(f)

    def register(self, f_hz: float) -> int:
        f = float(f_hz)
        normalize_frequency(f)
        try:
            return self.lookup(f)
        except UnknownBandError:
            self._bands.append(f)
            return len(self._bands) - 1

    def lookup(self, f_hz: float) -> int:
        f = float(f_hz)
        for i, known in enumerate(self._bands):
            if math.isclose(known, f, rel_tol=1e-9):
                return i
        raise UnknownBandError(
            f"carrier {f:g} Hz is not a registered band; known: "
            f"{[f'{b:g}' for b in self._bands]}"
        )

    def lookup_many(self, f_hz, allow_unknown: bool = False) -> np.ndarray:
        """Band ids for an array of carriers; -1 marks unknown if allowed."""
        f = np.atleast_1d(np.asarray(f_hz, dtype=np.float64))
        ids = np.empty(len(f), dtype=np.int64)
        for i, v in enumerate(f):
            try:
                ids[i] = self.lookup(v)
            except UnknownBandError:
                if not allow_unknown:
                    raise
                ids[i] = -1
        return ids

    @property
    def bands_hz(self) -> tuple[float, ...]:
        return tuple(self._bands)

    def __len__(self) -> int:
        return len(self._bands)

    def to_state(self) -> list[float]:
        return list(self._bands)

    @classmethod
    def from_state(cls, state) -> "BandRegistry":
        return cls(state)


class FrequencyEmbedding(nn.Module):
    """Learned band-identity rows fused with the sinusoidal value encoding.

    ``forward`` takes per-sample band ids (int64, -1 for unregistered) and
    normalised carrier values; it returns (B, 2 * dim) fused vectors where
    the first half is the identity row (zeros for id -1) and the second
    half the value encoding.
    """

    def __init__(self, n_bands: int, dim: int = 32):
        super().__init__()
        if dim % 2:
            raise ContractViolationError(f"embedding dim must be even, got {dim}")
        self.n_bands = n_bands
        self.dim = dim
        self.id_table = nn.Embedding(n_bands, dim)
        nn.init.normal_(self.id_table.weight, std=0.02)
        scales = 2.0 ** torch.arange(dim // 2, dtype=torch.float64)
        self.register_buffer("scales", scales)

    @property
    def fused_dim(self) -> int:
        return 2 * self.dim

    def encode_value(self, f_norm: torch.Tensor) -> torch.Tensor:
        phase = 2.0 * math.pi * f_norm.double()[:, None] * self.scales[None, :]
        return torch.cat([torch.sin(phase), torch.cos(phase)], dim=1).float()

    def forward(self, band_ids: torch.Tensor, f_norm: torch.Tensor) -> torch.Tensor:
        if band_ids.shape != f_norm.shape:
            raise ContractViolationError("band_ids and f_norm must align")
        if band_ids.numel() and int(band_ids.max()) >= self.n_bands:
            raise ContractViolationError(
                f"band id {int(band_ids.max())} out of range for {self.n_bands} bands"
            )
        known = band_ids >= 0
        e_id = torch.zeros(band_ids.shape[0], self.dim)
        if known.any():
            e_id[known] = self.id_table(band_ids[known])
        return torch.cat([e_id, self.encode_value(f_norm)], dim=1)
