"""End-to-end composition: raster -> scene tokens -> pathloss map."""

import hashlib
import io

import numpy as np
import torch

from ..errors import StaleCheckpointError
from ..synthdata.physics import pixel_to_db
from ..validation import check_frequencies


def codec_fingerprint(codec) -> str:
    """Content hash of a fitted codec's weights and config."""
    buf = io.BytesIO()
    state = codec.to_state()
    slim = {k: v for k, v in state.items() if k != "history"}
    torch.save(slim, buf)
    return hashlib.sha256(buf.getvalue()).hexdigest()[:16]


class PathlossGenerator:
    """Chains a fitted scene codec, token mapper, and pathloss codec.

    When the mapper carries codec fingerprints (stamped at training time),
    construction verifies the supplied codecs are the ones it was trained
    against and refuses mismatches.
    """

    def __init__(self, sensory_codec, mapper, channel_codec, check_fingerprints=True):
        self.sensory_codec = sensory_codec
        self.mapper = mapper
        self.channel_codec = channel_codec
        if check_fingerprints:
            self._check(mapper.sensory_fingerprint_, sensory_codec, "scene")
            self._check(mapper.channel_fingerprint_, channel_codec, "pathloss")

    @staticmethod
    def _check(expected, codec, label):
        if expected is None:
            return
        actual = codec_fingerprint(codec)
        if actual != expected:
            raise StaleCheckpointError(
                f"{label} codec fingerprint {actual} does not match the one the "
                f"mapper was trained against ({expected}); retrain or re-tokenize"
            )

    def predict(self, rasters, f_hz, allow_unknown_band: bool = False) -> np.ndarray:
        """Scene rasters + carriers -> pathloss maps in dB, (N, G, G) float64."""
        rasters = np.asarray(rasters)
        n = rasters.shape[0] if rasters.ndim == 4 else 1
        f = check_frequencies(f_hz, n)
        scene_tokens = self.sensory_codec.transform(rasters)
        map_tokens = self.mapper.predict(scene_tokens, f, allow_unknown_band)
        pixels = self.channel_codec.inverse_transform(map_tokens)
        return pixel_to_db(pixels)

    generate = predict
