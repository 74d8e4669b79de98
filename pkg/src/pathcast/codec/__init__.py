"""Quantized autoencoder: networks, losses, and the estimator wrapper."""

from .estimator import MODALITY_CHANNELS, VQCodec
from .losses import codec_loss, discriminator_hinge_loss, generator_hinge_loss, vq_loss
from .networks import Decoder, Encoder, PatchDiscriminator, ResBlock
from .quantizer import VectorQuantizer

__all__ = [
    "MODALITY_CHANNELS",
    "VQCodec",
    "VectorQuantizer",
    "Encoder",
    "Decoder",
    "PatchDiscriminator",
    "ResBlock",
    "vq_loss",
    "codec_loss",
    "discriminator_hinge_loss",
    "generator_hinge_loss",
]
