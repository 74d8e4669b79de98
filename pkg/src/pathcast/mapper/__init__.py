"""Token-to-token mapper with shared-routed expert feed-forwards."""

from .estimator import PathlossMapper
from .moe import Expert, RoutingDecision, SharedRoutedFFN, top2_gate
from .network import MapperBlock, TokenMapperNet
from .pipeline import PathlossGenerator, codec_fingerprint

__all__ = [
    "Expert",
    "MapperBlock",
    "PathlossGenerator",
    "PathlossMapper",
    "RoutingDecision",
    "SharedRoutedFFN",
    "TokenMapperNet",
    "codec_fingerprint",
    "top2_gate",
]
