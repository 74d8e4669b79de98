"""Checkpoint container format with atomic writes and content ids."""

import hashlib
import io
import os
from pathlib import Path

import torch

from ..codec import VQCodec
from ..errors import ContractViolationError, StaleCheckpointError
from ..evaluation.baseline import ConvBaseline
from ..mapper import PathlossMapper

CHECKPOINT_FORMAT = "pathcast-checkpoint"
CHECKPOINT_VERSION = 1
KINDS = ("sensory_codec", "channel_codec", "mapper", "baseline")

_LOADERS = {
    "sensory_codec": VQCodec.from_state,
    "channel_codec": VQCodec.from_state,
    "mapper": PathlossMapper.from_state,
    "baseline": ConvBaseline.from_state,
}


def state_id(state: dict) -> str:
    """Content hash of a model state (ignores training history)."""
    slim = {k: v for k, v in state.items() if k != "history"}
    buf = io.BytesIO()
    torch.save(slim, buf)
    return hashlib.sha256(buf.getvalue()).hexdigest()[:16]


def save_checkpoint(path, kind: str, state: dict, meta: dict | None = None) -> str:
    """Atomically write a checkpoint; returns its content id."""
    if kind not in KINDS:
        raise ContractViolationError(f"kind must be one of {KINDS}, got {kind!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cid = state_id(state)
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": kind,
        "id": cid,
        "state": state,
        "meta": meta or {},
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        torch.save(payload, fh)
    os.replace(tmp, path)
    return cid


def load_checkpoint(path, expect_kind: str | None = None) -> dict:
    path = Path(path)
    if not path.exists():
        raise ContractViolationError(f"checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise ContractViolationError(f"{path}: not a readable checkpoint ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise ContractViolationError(f"{path}: not a pathcast checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise StaleCheckpointError(
            f"{path}: checkpoint version {payload.get('version')} != {CHECKPOINT_VERSION}"
        )
    if expect_kind is not None and payload["kind"] != expect_kind:
        raise ContractViolationError(
            f"{path}: expected a {expect_kind} checkpoint, found {payload['kind']}"
        )
    return payload


def load_model(path, expect_kind: str | None = None):
    """Restore the estimator stored in a checkpoint (any kind)."""
    payload = load_checkpoint(path, expect_kind)
    return _LOADERS[payload["kind"]](payload["state"])
