"""Shared-plus-routed expert feed-forward with condition-driven gating."""

import math
from dataclasses import dataclass

import torch
import torch.nn as nn

from ..errors import ContractViolationError


@dataclass
class RoutingDecision:
    """Per-sample top-2 routing: expert ids, their weights, raw logits."""

    selected: torch.Tensor  # (B, 2) int64, rank order (best first)
    weights: torch.Tensor  # (B, 2) softmax over the two selected logits
    logits: torch.Tensor  # (B, n_experts)


def top2_gate(logits: torch.Tensor) -> RoutingDecision:
    """Pick the two largest logits per row; ties go to the lower index.

    The two surviving logits are renormalised with a softmax, so the pair
    of weights always sums to one.
    """
    if logits.ndim != 2 or logits.shape[1] < 2:
        raise ContractViolationError(
            f"gate logits must be (B, n_experts>=2), got {tuple(logits.shape)}"
        )
    order = torch.argsort(-logits, dim=1, stable=True)
    selected = order[:, :2]
    pair = torch.gather(logits, 1, selected)
    weights = torch.softmax(pair, dim=1)
    return RoutingDecision(selected=selected, weights=weights, logits=logits)


class Expert(nn.Module):
    """Two-layer feed-forward block."""

    def __init__(self, d_model: int, d_ff: int):
        super().__init__()
        self.fc1 = nn.Linear(d_model, d_ff)
        self.fc2 = nn.Linear(d_ff, d_model)
        self.act = nn.GELU()

    def forward(self, x):
        return self.fc2(self.act(self.fc1(x)))


class SharedRoutedFFN(nn.Module):
    """One always-on expert fused with a top-2 routed mixture.

    The gate reads only the per-sample condition vector, so every token of
    a sample shares one routing decision.  Outputs accumulate in rank
    order (shared, then best, then second best), which keeps the result
    bitwise independent of expert index order.
    """

    def __init__(
        self,
        d_model: int,
        d_ff: int,
        n_experts: int,
        cond_dim: int,
        shared_scale: str = "learned",
    ):
        super().__init__()
        if n_experts < 2:
            raise ContractViolationError(f"need >= 2 routed experts, got {n_experts}")
        if shared_scale not in ("learned", "fixed"):
            raise ContractViolationError(
                f"shared_scale must be 'learned' or 'fixed', got {shared_scale!r}"
            )
        self.n_experts = n_experts
        self.shared = Expert(d_model, d_ff)
        self.experts = nn.ModuleList(Expert(d_model, d_ff) for _ in range(n_experts))
        self.gate = nn.Linear(cond_dim, n_experts)
        self.shared_scale = shared_scale
        if shared_scale == "learned":
            # softplus(raw) == 1 at init
            self.raw_scale = nn.Parameter(torch.tensor(math.log(math.e - 1.0)))
        else:
            self.register_buffer("raw_scale", torch.tensor(0.0))

    def scale(self) -> torch.Tensor:
        if self.shared_scale == "learned":
            return torch.nn.functional.softplus(self.raw_scale)
        return torch.ones(())

    def forward(self, x: torch.Tensor, cond: torch.Tensor):
        """x: (B, T, d_model); cond: (B, cond_dim) -> (y, RoutingDecision)."""
        decision = top2_gate(self.gate(cond))
        y = self.scale() * self.shared(x)
        for rank in range(2):
            chosen = decision.selected[:, rank]
            w = decision.weights[:, rank]
            for j in range(self.n_experts):
                rows = (chosen == j).nonzero(as_tuple=True)[0]
                if rows.numel():
                    y = y.index_add(
                        0, rows, w[rows, None, None] * self.experts[j](x[rows])
                    )
        return y, decision
