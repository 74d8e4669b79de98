"""Scikit-learn style estimator wrapping the quantized autoencoder."""

import math

import numpy as np
import torch
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import ContractViolationError, NumericAbortError
from ..validation import check_fitted, check_image_batch, check_token_batch
from .losses import discriminator_hinge_loss, generator_hinge_loss, vq_loss
from .networks import Decoder, Encoder, PatchDiscriminator
from .quantizer import VectorQuantizer

MODALITY_CHANNELS = {"sensory": 3, "channel": 1}


def _to_unit_range(X: np.ndarray) -> torch.Tensor:
    """uint8 (N, H, W, C) -> float32 (N, C, H, W) in [-1, 1]."""
    t = torch.from_numpy(X.astype(np.float32) / 127.5 - 1.0)
    return t.permute(0, 3, 1, 2).contiguous()


def _to_uint8(t: torch.Tensor) -> np.ndarray:
    """float (N, C, H, W) in [-1, 1] -> uint8 (N, H, W, C)."""
    arr = ((t.clamp(-1.0, 1.0) + 1.0) * 127.5).round().to(torch.uint8)
    return arr.permute(0, 2, 3, 1).contiguous().numpy()


class VQCodec(BaseEstimator, TransformerMixin):
    """Quantized autoencoder for 8-bit rasters or pathloss maps.

    ``modality`` picks the input layout: "sensory" takes (N, H, W, 3)
    scene rasters, "channel" takes (N, G, G) or (N, G, G, 1) pathloss
    maps.  ``transform`` emits integer token grids, ``inverse_transform``
    reconstructs 8-bit arrays from them.
    """

    def __init__(
        self,
        modality: str = "sensory",
        num_codes: int = 128,
        code_dim: int = 32,
        base_channels: int = 16,
        token_hw: int = 8,
        beta: float = 0.25,
        adv_weight: float = 0.1,
        disc_start: int | None = None,
        learning_rate: float = 1e-3,
        disc_learning_rate: float = 1e-3,
        batch_size: int = 8,
        n_epochs: int = 200,
        reseed_dead_codes: bool = True,
        seed: int = 0,
    ):
        self.modality = modality
        self.num_codes = num_codes
        self.code_dim = code_dim
        self.base_channels = base_channels
        self.token_hw = token_hw
        self.beta = beta
        self.adv_weight = adv_weight
        self.disc_start = disc_start
        self.learning_rate = learning_rate
        self.disc_learning_rate = disc_learning_rate
        self.batch_size = batch_size
        self.n_epochs = n_epochs
        self.reseed_dead_codes = reseed_dead_codes
        self.seed = seed

    # -- helpers ---------------------------------------------------------

    @property
    def _channels(self) -> int:
        try:
            return MODALITY_CHANNELS[self.modality]
        except KeyError:
            raise ContractViolationError(
                f"modality must be one of {sorted(MODALITY_CHANNELS)}, got {self.modality!r}"
            ) from None

    def _check_input(self, X) -> np.ndarray:
        X = np.asarray(X)
        if self._channels == 1 and X.ndim in (2, 3):
            X = X[..., None]
        side = getattr(self, "input_hw_", None)
        return check_image_batch(X, self._channels, side)

    def _build(self, input_hw: int) -> None:
        ratio = input_hw / self.token_hw
        n_down = int(round(math.log2(ratio))) if ratio >= 2 else 0
        if n_down < 1 or 2**n_down * self.token_hw != input_hw:
            raise ContractViolationError(
                f"input side {input_hw} is not token_hw {self.token_hw} times a power of 2"
            )
        torch.manual_seed(self.seed)
        self.encoder_ = Encoder(self._channels, self.code_dim, n_down, self.base_channels)
        self.decoder_ = Decoder(self._channels, self.code_dim, n_down, self.base_channels)
        self.quantizer_ = VectorQuantizer(self.num_codes, self.code_dim)
        self.discriminator_ = PatchDiscriminator(self._channels, self.base_channels)
        self.input_hw_ = input_hw
        self.token_hw_ = int(input_hw / 2**n_down)
        # Adversarial warm-up: no discriminator term for the first 30% of the
        # scheduled epochs unless an explicit start epoch was given.
        self.disc_start_ = (
            int(round(0.3 * self.n_epochs)) if self.disc_start is None else self.disc_start
        )
        self.n_steps_ = 0
        self.n_epochs_done_ = 0
        self.history_ = []

    # -- estimator API ----------------------------------------------------

    def fit(self, X, y=None):
        """Train the autoencoder on a batch of 8-bit arrays."""
        X = np.asarray(X)
        if self._channels == 1 and X.ndim in (2, 3):
            X = X[..., None]
        X = check_image_batch(X, self._channels)
        if X.shape[1] != X.shape[2]:
            raise ContractViolationError(f"inputs must be square, got {X.shape[1:3]}")
        self._build(X.shape[1])
        self.fit_more(X, self.n_epochs)
        return self

    def fit_more(self, X, n_epochs: int):
        """Continue training a built model for additional epochs."""
        check_fitted(self, "encoder_")
        X = self._check_input(X)
        data = _to_unit_range(X)
        n = data.shape[0]
        gen_params = (
            list(self.encoder_.parameters())
            + list(self.decoder_.parameters())
            + list(self.quantizer_.parameters())
        )
        opt_g = torch.optim.Adam(gen_params, lr=self.learning_rate)
        opt_d = torch.optim.Adam(self.discriminator_.parameters(), lr=self.disc_learning_rate)
        shuffler = torch.Generator().manual_seed(self.seed + 1)
        reseed_gen = torch.Generator().manual_seed(self.seed + 2)
        self._set_training(True)
        for _ in range(n_epochs):
            use_adv = self.adv_weight > 0 and self.n_epochs_done_ >= self.disc_start_
            self.quantizer_.begin_epoch()
            order = torch.randperm(n, generator=shuffler)
            totals = {"loss": 0.0, "recon": 0.0, "vq": 0.0, "g_loss": 0.0, "d_loss": 0.0}
            n_batches = 0
            last_flat = None
            for start in range(0, n, self.batch_size):
                x = data[order[start : start + self.batch_size]]
                z = self.encoder_(x)
                z_st, _, z_q = self.quantizer_(z)
                x_hat = self.decoder_(z_st)
                last_flat = z.detach().permute(0, 2, 3, 1).reshape(-1, self.code_dim)

                if use_adv:
                    opt_d.zero_grad()
                    d_loss = discriminator_hinge_loss(
                        self.discriminator_(x), self.discriminator_(x_hat.detach())
                    )
                    d_loss.backward()
                    opt_d.step()
                    totals["d_loss"] += float(d_loss.detach())

                loss = vq_loss(x, x_hat, z, z_q, beta=self.beta)
                totals["recon"] += float(torch.mean((x_hat.detach() - x) ** 2))
                totals["vq"] += float(loss.detach())
                if use_adv:
                    g_loss = generator_hinge_loss(self.discriminator_(x_hat))
                    totals["g_loss"] += float(g_loss.detach())
                    loss = loss + self.adv_weight * g_loss
                if not torch.isfinite(loss):
                    raise NumericAbortError(
                        f"non-finite codec loss at step {self.n_steps_}"
                    )
                opt_g.zero_grad()
                loss.backward()
                opt_g.step()
                totals["loss"] += float(loss.detach())
                self.n_steps_ += 1
                n_batches += 1
            reseeded = 0
            if self.reseed_dead_codes and last_flat is not None:
                reseeded = self.quantizer_.reseed_dead(last_flat, reseed_gen)
            record = {k: v / max(n_batches, 1) for k, v in totals.items()}
            record["epoch"] = self.n_epochs_done_
            record["codebook_usage"] = self.quantizer_.usage_fraction()
            record["reseeded"] = reseeded
            self.history_.append(record)
            self.n_epochs_done_ += 1
        self._set_training(False)
        return self

    def transform(self, X) -> np.ndarray:
        """Token grid (N, token_hw, token_hw) int64 for each input array."""
        check_fitted(self, "encoder_")
        X = self._check_input(X)
        out = []
        with torch.no_grad():
            for start in range(0, X.shape[0], 64):
                x = _to_unit_range(X[start : start + 64])
                _, codes, _ = self.quantizer_(self.encoder_(x))
                out.append(codes.numpy())
        return np.concatenate(out, axis=0)

    def inverse_transform(self, T) -> np.ndarray:
        """Reconstruct 8-bit arrays from token grids.

        Sensory arrays come back (N, H, W, 3); channel maps (N, G, G).
        """
        check_fitted(self, "decoder_")
        T = check_token_batch(T, self.num_codes)
        if T.shape[1:] != (self.token_hw_, self.token_hw_):
            raise ContractViolationError(
                f"expected token grids of side {self.token_hw_}, got {T.shape[1:]}"
            )
        out = []
        with torch.no_grad():
            for start in range(0, T.shape[0], 64):
                codes = torch.from_numpy(T[start : start + 64])
                x_hat = self.decoder_(self.quantizer_.lookup(codes))
                out.append(_to_uint8(x_hat))
        arr = np.concatenate(out, axis=0)
        return arr[..., 0] if self._channels == 1 else arr

    def reconstruct(self, X) -> np.ndarray:
        """Round-trip: encode, quantize, decode."""
        return self.inverse_transform(self.transform(X))

    def _set_training(self, flag: bool) -> None:
        for m in (self.encoder_, self.decoder_, self.quantizer_, self.discriminator_):
            m.train(flag)

    # -- persistence -------------------------------------------------------

    def to_state(self) -> dict:
        check_fitted(self, "encoder_")
        return {
            "params": self.get_params(),
            "input_hw": self.input_hw_,
            "token_hw": self.token_hw_,
            "n_steps": self.n_steps_,
            "n_epochs_done": self.n_epochs_done_,
            "history": self.history_,
            "encoder": self.encoder_.state_dict(),
            "decoder": self.decoder_.state_dict(),
            "quantizer": self.quantizer_.state_dict(),
            "discriminator": self.discriminator_.state_dict(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "VQCodec":
        est = cls(**state["params"])
        est._build(state["input_hw"])
        est.encoder_.load_state_dict(state["encoder"])
        est.decoder_.load_state_dict(state["decoder"])
        est.quantizer_.load_state_dict(state["quantizer"])
        est.discriminator_.load_state_dict(state["discriminator"])
        est.n_steps_ = state["n_steps"]
        est.n_epochs_done_ = state["n_epochs_done"]
        est.history_ = list(state["history"])
        est._set_training(False)
        return est
