"""Direct convolutional regression baseline: raster + carrier -> dB map."""

import math

import numpy as np
import torch
import torch.nn as nn
from sklearn.base import BaseEstimator, RegressorMixin

from ..conditioning import normalize_frequency
from ..errors import ContractViolationError, NumericAbortError
from ..validation import check_fitted, check_frequencies, check_image_batch
from ..codec.networks import ResBlock


class _BaselineNet(nn.Module):
    """Raster plus a broadcast carrier channel, downsampled to the map grid."""

    def __init__(self, n_down: int, base_channels: int = 32):
        super().__init__()
        layers = [nn.Conv2d(4, base_channels, 3, padding=1), nn.SiLU()]
        width = base_channels
        for _ in range(n_down):
            layers += [nn.Conv2d(width, width * 2, 4, stride=2, padding=1), nn.SiLU()]
            width *= 2
        layers += [ResBlock(width), ResBlock(width), nn.Conv2d(width, 1, 3, padding=1)]
        self.net = nn.Sequential(*layers)

    def forward(self, x):
        return self.net(x)[:, 0]


class ConvBaseline(BaseEstimator, RegressorMixin):
    """Regresses the pathloss map directly from the raster and carrier.

    The carrier enters as a constant extra input channel holding the
    normalised log-frequency.  Targets are dB maps; internally they are
    scaled to [-1, 1] through the same 8-bit range the token path uses.
    """

    def __init__(
        self,
        grid_n: int = 32,
        base_channels: int = 32,
        learning_rate: float = 1e-3,
        batch_size: int = 8,
        n_epochs: int = 60,
        seed: int = 0,
    ):
        self.grid_n = grid_n
        self.base_channels = base_channels
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.n_epochs = n_epochs
        self.seed = seed

    def _inputs(self, X, f_hz) -> torch.Tensor:
        X = check_image_batch(X, 3, getattr(self, "input_hw_", None))
        f = check_frequencies(f_hz, X.shape[0])
        f_norm = normalize_frequency(f)
        img = torch.from_numpy(X.astype(np.float32) / 127.5 - 1.0).permute(0, 3, 1, 2)
        carrier = torch.from_numpy(f_norm.astype(np.float32))[:, None, None, None]
        carrier = carrier.expand(-1, 1, X.shape[1], X.shape[2])
        return torch.cat([img, carrier], dim=1)

    def fit(self, X, y, f_hz):
        X = check_image_batch(X, 3)
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (X.shape[0], self.grid_n, self.grid_n):
            raise ContractViolationError(
                f"targets must be (N, {self.grid_n}, {self.grid_n}) dB maps, got {y.shape}"
            )
        ratio = X.shape[1] / self.grid_n
        n_down = int(round(math.log2(ratio))) if ratio >= 1 else -1
        if n_down < 0 or 2**n_down * self.grid_n != X.shape[1]:
            raise ContractViolationError(
                f"image side {X.shape[1]} must be grid_n {self.grid_n} times a power of 2"
            )
        torch.manual_seed(self.seed)
        self.input_hw_ = X.shape[1]
        self.network_ = _BaselineNet(n_down, self.base_channels)
        self.history_ = []

        inputs = self._inputs(X, f_hz)
        targets = torch.from_numpy(
            (np.clip(y, 0.0, 255.0) / 127.5 - 1.0).astype(np.float32)
        )
        opt = torch.optim.Adam(self.network_.parameters(), lr=self.learning_rate)
        shuffler = torch.Generator().manual_seed(self.seed + 3)
        self.network_.train(True)
        for epoch in range(self.n_epochs):
            order = torch.randperm(X.shape[0], generator=shuffler)
            total, n_batches = 0.0, 0
            for start in range(0, X.shape[0], self.batch_size):
                idx = order[start : start + self.batch_size]
                pred = self.network_(inputs[idx])
                loss = torch.mean((pred - targets[idx]) ** 2)
                if not torch.isfinite(loss):
                    raise NumericAbortError("non-finite baseline loss")
                opt.zero_grad()
                loss.backward()
                opt.step()
                total += float(loss.detach())
                n_batches += 1
            self.history_.append({"epoch": epoch, "loss": total / max(n_batches, 1)})
        self.network_.train(False)
        return self

    def predict(self, X, f_hz) -> np.ndarray:
        """Predicted dB maps, (N, grid_n, grid_n) float64."""
        check_fitted(self, "network_")
        X = check_image_batch(X, 3, self.input_hw_)
        f = check_frequencies(f_hz, X.shape[0])
        out = []
        with torch.no_grad():
            for start in range(0, X.shape[0], 64):
                pred = self.network_(self._inputs(X[start : start + 64], f[start : start + 64]))
                out.append(pred.numpy())
        pred = np.concatenate(out, axis=0).astype(np.float64)
        return np.clip((pred + 1.0) * 127.5, 0.0, 255.0)

    # -- persistence --------------------------------------------------------

    def to_state(self) -> dict:
        check_fitted(self, "network_")
        return {
            "params": self.get_params(),
            "input_hw": self.input_hw_,
            "history": self.history_,
            "network": self.network_.state_dict(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "ConvBaseline":
        est = cls(**state["params"])
        ratio = state["input_hw"] / est.grid_n
        torch.manual_seed(est.seed)
        est.input_hw_ = state["input_hw"]
        est.network_ = _BaselineNet(int(round(math.log2(ratio))), est.base_channels)
        est.network_.load_state_dict(state["network"])
        est.network_.train(False)
        est.history_ = list(state["history"])
        return est
