"""Quantizer training objective and hinge adversarial terms."""

import torch
import torch.nn.functional as F


def vq_loss(
    x: torch.Tensor,
    x_hat: torch.Tensor,
    z_enc: torch.Tensor,
    z_q: torch.Tensor,
    beta: float = 0.25,
    reduction: str = "mean",
) -> torch.Tensor:
    """Reconstruction + codebook + weighted commitment term.

    ``sg[.]`` is realised with detach: the codebook term moves codewords
    toward frozen encoder outputs, the commitment term (scaled by beta)
    moves encoder outputs toward frozen codewords.  ``reduction`` picks
    the squared-error reduction: "mean" for training, "sum" to match
    element-count-free hand arithmetic.
    """
    if reduction not in ("mean", "sum"):
        raise ValueError(f"reduction must be 'mean' or 'sum', got {reduction!r}")
    recon = F.mse_loss(x_hat, x, reduction=reduction)
    codebook = F.mse_loss(z_q, z_enc.detach(), reduction=reduction)
    commit = F.mse_loss(z_enc, z_q.detach(), reduction=reduction)
    return recon + codebook + beta * commit


def discriminator_hinge_loss(real_logits: torch.Tensor, fake_logits: torch.Tensor) -> torch.Tensor:
    """Hinge objective for the discriminator: both logit maps margin-1."""
    return F.relu(1.0 - real_logits).mean() + F.relu(1.0 + fake_logits).mean()


def generator_hinge_loss(fake_logits: torch.Tensor) -> torch.Tensor:
    """Generator side of the hinge objective: raise fake logits."""
    return -fake_logits.mean()


def codec_loss(
    x: torch.Tensor,
    x_hat: torch.Tensor,
    z_enc: torch.Tensor,
    z_q: torch.Tensor,
    fake_logits: torch.Tensor | None,
    beta: float = 0.25,
    adv_weight: float = 0.1,
    reduction: str = "mean",
) -> torch.Tensor:
    """Full codec objective: quantizer terms plus weighted adversarial term."""
    total = vq_loss(x, x_hat, z_enc, z_q, beta=beta, reduction=reduction)
    if fake_logits is not None:
        total = total + adv_weight * generator_hinge_loss(fake_logits)
    return total
