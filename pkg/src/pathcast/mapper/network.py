"""Transformer that maps scene-token grids to pathloss-token logits."""

import torch
import torch.nn as nn

from ..errors import ContractViolationError
from .moe import Expert, SharedRoutedFFN


class MapperBlock(nn.Module):
    """Pre-norm attention plus a (shared-routed or plain) feed-forward."""

    def __init__(
        self,
        d_model: int,
        n_heads: int,
        d_ff: int,
        n_experts: int,
        cond_dim: int,
        use_routed: bool,
        shared_scale: str,
    ):
        super().__init__()
        self.ln_attn = nn.LayerNorm(d_model)
        self.attn = nn.MultiheadAttention(d_model, n_heads, batch_first=True)
        self.ln_ffn = nn.LayerNorm(d_model)
        self.use_routed = use_routed
        if use_routed:
            self.ffn = SharedRoutedFFN(d_model, d_ff, n_experts, cond_dim, shared_scale)
        else:
            self.ffn = Expert(d_model, d_ff)

    def forward(self, x, cond):
        h = self.ln_attn(x)
        x = x + self.attn(h, h, h, need_weights=False)[0]
        if self.use_routed:
            y, decision = self.ffn(self.ln_ffn(x), cond)
        else:
            y, decision = self.ffn(self.ln_ffn(x)), None
        return x + y, decision


class TokenMapperNet(nn.Module):
    """Scene tokens + fused carrier vector -> per-position pathloss-token logits.

    The fused condition enters twice: projected to a prefix token that
    attention can read, and fed to every block's gate.  Logits are emitted
    only at the grid positions (the prefix position is dropped).
    """

    def __init__(
        self,
        num_in_codes: int,
        num_out_codes: int,
        grid_hw: int,
        cond_dim: int,
        d_model: int = 128,
        n_heads: int = 4,
        n_blocks: int = 4,
        d_ff: int = 256,
        n_experts: int = 4,
        use_routed: bool = True,
        shared_scale: str = "learned",
    ):
        super().__init__()
        if d_model % n_heads:
            raise ContractViolationError(
                f"d_model {d_model} must be divisible by n_heads {n_heads}"
            )
        self.grid_hw = grid_hw
        self.num_out_codes = num_out_codes
        self.token_emb = nn.Embedding(num_in_codes, d_model)
        self.cond_proj = nn.Linear(cond_dim, d_model)
        self.pos_emb = nn.Parameter(torch.zeros(1, grid_hw * grid_hw + 1, d_model))
        nn.init.normal_(self.pos_emb, std=0.02)
        self.blocks = nn.ModuleList(
            MapperBlock(d_model, n_heads, d_ff, n_experts, cond_dim, use_routed, shared_scale)
            for _ in range(n_blocks)
        )
        self.ln_out = nn.LayerNorm(d_model)
        self.head = nn.Linear(d_model, num_out_codes)

    def forward(self, tokens: torch.Tensor, cond: torch.Tensor):
        """tokens (B, h, w) int64, cond (B, cond_dim) -> (logits, decisions).

        logits: (B, h*w, num_out_codes); decisions: per-block routing (or
        None entries when running without routed experts).
        """
        b, h, w = tokens.shape
        if h != self.grid_hw or w != self.grid_hw:
            raise ContractViolationError(
                f"expected {self.grid_hw}x{self.grid_hw} token grids, got {h}x{w}"
            )
        x = self.token_emb(tokens.reshape(b, h * w))
        prefix = self.cond_proj(cond)[:, None, :]
        x = torch.cat([prefix, x], dim=1) + self.pos_emb
        decisions = []
        for block in self.blocks:
            x, decision = block(x, cond)
            decisions.append(decision)
        logits = self.head(self.ln_out(x[:, 1:]))
        return logits, decisions
