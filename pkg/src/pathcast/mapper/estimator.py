"""Scikit-learn style estimator for the token-to-token mapper."""

import numpy as np
import torch
from sklearn.base import BaseEstimator

from ..conditioning import BandRegistry, FrequencyEmbedding, normalize_frequency
from ..errors import ContractViolationError, NumericAbortError
from ..validation import check_fitted, check_frequencies, check_token_batch


class PathlossMapper(BaseEstimator):
    """Maps scene-token grids to pathloss-token grids under a carrier.

    ``fit`` learns from aligned token pairs with per-sample carrier
    frequencies; ``predict`` emits the most likely pathloss token at each
    grid position.  Carriers seen during fit are registered as bands; an
    unseen carrier is accepted only with ``allow_unknown_band=True``,
    which zeroes the identity half of the condition and relies on the
    value encoding alone.
    """

    def __init__(
        self,
        num_sensory_codes: int = 128,
        num_channel_codes: int = 128,
        d_model: int = 128,
        n_heads: int = 4,
        n_blocks: int = 4,
        d_ff: int = 256,
        n_routed_experts: int = 4,
        freq_dim: int = 32,
        shared_scale: str = "learned",
        use_freq_embedding: bool = True,
        use_routed_experts: bool = True,
        learning_rate: float = 3e-4,
        batch_size: int = 8,
        n_epochs: int = 300,
        seed: int = 0,
    ):
        self.num_sensory_codes = num_sensory_codes
        self.num_channel_codes = num_channel_codes
        self.d_model = d_model
        self.n_heads = n_heads
        self.n_blocks = n_blocks
        self.d_ff = d_ff
        self.n_routed_experts = n_routed_experts
        self.freq_dim = freq_dim
        self.shared_scale = shared_scale
        self.use_freq_embedding = use_freq_embedding
        self.use_routed_experts = use_routed_experts
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.n_epochs = n_epochs
        self.seed = seed

    # -- construction ------------------------------------------------------

    def _build(self, grid_hw: int, bands_hz) -> None:
        from .network import TokenMapperNet

        torch.manual_seed(self.seed)
        self.bands_ = BandRegistry(sorted(bands_hz))
        self.freq_embedding_ = FrequencyEmbedding(max(len(self.bands_), 1), self.freq_dim)
        self.network_ = TokenMapperNet(
            num_in_codes=self.num_sensory_codes,
            num_out_codes=self.num_channel_codes,
            grid_hw=grid_hw,
            cond_dim=2 * self.freq_dim,
            d_model=self.d_model,
            n_heads=self.n_heads,
            n_blocks=self.n_blocks,
            d_ff=self.d_ff,
            n_experts=self.n_routed_experts,
            use_routed=self.use_routed_experts,
            shared_scale=self.shared_scale,
        )
        self.grid_hw_ = grid_hw
        self.n_steps_ = 0
        self.n_epochs_done_ = 0
        self.history_ = []
        self.sensory_fingerprint_ = None
        self.channel_fingerprint_ = None

    def _condition(self, f_hz: np.ndarray, allow_unknown: bool) -> torch.Tensor:
        """Fused per-sample condition vectors, honouring the ablation flag."""
        if not self.use_freq_embedding:
            return torch.zeros(len(f_hz), 2 * self.freq_dim)
        ids = self.bands_.lookup_many(f_hz, allow_unknown=allow_unknown)
        f_norm = normalize_frequency(f_hz)
        return self.freq_embedding_(
            torch.from_numpy(ids), torch.from_numpy(np.atleast_1d(f_norm))
        )

    def register_band(self, f_hz: float) -> int:
        """Add a carrier as a new band, growing the identity table."""
        check_fitted(self, "network_")
        before = len(self.bands_)
        band_id = self.bands_.register(f_hz)
        if len(self.bands_) != before:
            old = self.freq_embedding_.id_table
            table = torch.nn.Embedding(before + 1, self.freq_dim)
            gen = torch.Generator().manual_seed(self.seed * 1000003 + before)
            with torch.no_grad():
                table.weight.normal_(0.0, 0.02, generator=gen)
                table.weight[:before] = old.weight
            self.freq_embedding_.id_table = table
            self.freq_embedding_.n_bands = before + 1
        return band_id

    # -- estimator API ------------------------------------------------------

    def fit(self, X, y, f_hz):
        X = check_token_batch(X, self.num_sensory_codes)
        y = check_token_batch(y, self.num_channel_codes)
        if X.shape != y.shape:
            raise ContractViolationError(
                f"scene and pathloss token grids must align, got {X.shape} vs {y.shape}"
            )
        if X.shape[1] != X.shape[2]:
            raise ContractViolationError(f"token grids must be square, got {X.shape[1:]}")
        f = check_frequencies(f_hz, X.shape[0])
        self._build(X.shape[1], np.unique(f))
        self.fit_more(X, y, f, self.n_epochs)
        return self

    def fit_more(self, X, y, f_hz, n_epochs: int, trainable: str = "all"):
        """Continue training; ``trainable`` may restrict the updated weights.

        "all" updates everything; "conditioning" updates only the band
        identity table and gate layers (the few-shot adaptation set).
        """
        check_fitted(self, "network_")
        X = check_token_batch(X, self.num_sensory_codes)
        y = check_token_batch(y, self.num_channel_codes)
        f = check_frequencies(f_hz, X.shape[0])
        cond_all = self._condition_params() if trainable == "conditioning" else None
        params = cond_all if cond_all is not None else list(self._all_params())
        if not params:
            raise ContractViolationError(f"no trainable parameters for {trainable!r}")
        opt = torch.optim.Adam(params, lr=self.learning_rate)
        loss_fn = torch.nn.CrossEntropyLoss()
        xs = torch.from_numpy(X)
        ys = torch.from_numpy(y.reshape(y.shape[0], -1))
        shuffler = torch.Generator().manual_seed(self.seed + 17)
        self.network_.train(True)
        for _ in range(n_epochs):
            order = torch.randperm(X.shape[0], generator=shuffler)
            total, n_batches = 0.0, 0
            expert_counts = torch.zeros(self.n_routed_experts, dtype=torch.long)
            for start in range(0, X.shape[0], self.batch_size):
                idx = order[start : start + self.batch_size]
                cond = self._condition(f[idx.numpy()], allow_unknown=False)
                logits, decisions = self.network_(xs[idx], cond)
                loss = loss_fn(logits.reshape(-1, self.num_channel_codes), ys[idx].reshape(-1))
                if not torch.isfinite(loss):
                    raise NumericAbortError(f"non-finite mapper loss at step {self.n_steps_}")
                opt.zero_grad()
                loss.backward()
                opt.step()
                total += float(loss.detach())
                for decision in decisions:
                    if decision is not None:
                        expert_counts += torch.bincount(
                            decision.selected.flatten(), minlength=self.n_routed_experts
                        )
                self.n_steps_ += 1
                n_batches += 1
            record = {"epoch": self.n_epochs_done_, "loss": total / max(n_batches, 1)}
            if self.use_routed_experts and expert_counts.sum() > 0:
                # Usage-entropy monitor (no balancing loss is applied).
                p = expert_counts.double() / expert_counts.sum()
                p = p[p > 0]
                record["routing_entropy"] = float(-(p * p.log()).sum())
            self.history_.append(record)
            self.n_epochs_done_ += 1
        self.network_.train(False)
        return self

    def _all_params(self):
        yield from self.network_.parameters()
        yield from self.freq_embedding_.parameters()

    def _condition_params(self):
        params = list(self.freq_embedding_.parameters())
        if self.use_routed_experts:
            for block in self.network_.blocks:
                params += list(block.ffn.gate.parameters())
        return params

    def predict_logits(self, X, f_hz, allow_unknown_band: bool = False):
        check_fitted(self, "network_")
        X = check_token_batch(X, self.num_sensory_codes)
        f = check_frequencies(f_hz, X.shape[0])
        out = []
        with torch.no_grad():
            for start in range(0, X.shape[0], 64):
                stop = start + 64
                cond = self._condition(f[start:stop], allow_unknown_band)
                logits, _ = self.network_(torch.from_numpy(X[start:stop]), cond)
                out.append(logits.numpy())
        return np.concatenate(out, axis=0)

    def predict(self, X, f_hz, allow_unknown_band: bool = False) -> np.ndarray:
        """Most likely pathloss token at each grid position, (N, h, w)."""
        logits = self.predict_logits(X, f_hz, allow_unknown_band)
        n = logits.shape[0]
        return logits.argmax(axis=2).reshape(n, self.grid_hw_, self.grid_hw_)

    def routing_map(self, X, f_hz, allow_unknown_band: bool = False) -> np.ndarray:
        """Selected expert pairs per block, (N, n_blocks, 2) int64."""
        check_fitted(self, "network_")
        if not self.use_routed_experts:
            raise ContractViolationError("model was built without routed experts")
        X = check_token_batch(X, self.num_sensory_codes)
        f = check_frequencies(f_hz, X.shape[0])
        with torch.no_grad():
            cond = self._condition(f, allow_unknown_band)
            _, decisions = self.network_(torch.from_numpy(X), cond)
        return np.stack([d.selected.numpy() for d in decisions], axis=1)

    # -- persistence --------------------------------------------------------

    def to_state(self) -> dict:
        check_fitted(self, "network_")
        return {
            "params": self.get_params(),
            "grid_hw": self.grid_hw_,
            "bands": self.bands_.to_state(),
            "n_steps": self.n_steps_,
            "n_epochs_done": self.n_epochs_done_,
            "history": self.history_,
            "network": self.network_.state_dict(),
            "freq_embedding": self.freq_embedding_.state_dict(),
            "sensory_fingerprint": self.sensory_fingerprint_,
            "channel_fingerprint": self.channel_fingerprint_,
        }

    @classmethod
    def from_state(cls, state: dict) -> "PathlossMapper":
        est = cls(**state["params"])
        est._build(state["grid_hw"], state["bands"])
        # Bands registered after fit sit at the end of the saved list; keep
        # that order verbatim so band ids stay aligned with identity rows.
        est.bands_ = BandRegistry.from_state(state["bands"])
        n_bands = len(state["bands"])
        if est.freq_embedding_.id_table.weight.shape[0] != max(n_bands, 1):
            est.freq_embedding_.id_table = torch.nn.Embedding(n_bands, est.freq_dim)
            est.freq_embedding_.n_bands = n_bands
        est.network_.load_state_dict(state["network"])
        est.freq_embedding_.load_state_dict(state["freq_embedding"])
        est.n_steps_ = state["n_steps"]
        est.n_epochs_done_ = state.get("n_epochs_done", 0)
        est.history_ = list(state["history"])
        est.sensory_fingerprint_ = state.get("sensory_fingerprint")
        est.channel_fingerprint_ = state.get("channel_fingerprint")
        est.network_.train(False)
        return est
