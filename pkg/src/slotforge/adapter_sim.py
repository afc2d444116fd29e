"""Numerical reference model of the speech-to-LLM modality adapter.

The adapter concatenates each group of ``stack_factor`` consecutive encoder
frames into one vector (time-locality preserved, tail zero-padded by
default) and projects it with a two-layer MLP whose output width matches the
target LLM's embedding size. With the default stack factor of 4 an utterance
of N encoder frames becomes ceil(N/4) adapter frames — a further 4x reduction
on top of the encoder's own 2x, i.e. 8x from the original frame rate.

All reference arithmetic is float64; ``grad_check`` validates the analytic
parameter gradients against central finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erf

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class AdapterError(Exception):
    pass


class EmptyInput(AdapterError):
    pass


class DegenerateOutput(AdapterError):
    pass


class ShapeMismatch(AdapterError):
    pass


class NonFiniteGradient(AdapterError):
    pass


class InvalidEpsilon(AdapterError):
    pass


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def _gelu_grad(x: np.ndarray) -> np.ndarray:
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return cdf + x * pdf


ACTIVATIONS = {
    "gelu": (_gelu, _gelu_grad),
    "linear": (lambda x: x, lambda x: np.ones_like(x)),
    "tanh": (np.tanh, lambda x: 1.0 - np.tanh(x) ** 2),
}


@dataclass(frozen=True)
class AdapterConfig:
    d_enc: int = 512
    stack_factor: int = 4
    d_hidden: int = 2048
    d_llm: int = 2048
    pad_policy: str = "zero_pad"  # or "truncate"
    activation: str = "gelu"

    def __post_init__(self):
        for name in ("d_enc", "stack_factor", "d_hidden", "d_llm"):
            if getattr(self, name) < 1:
                raise AdapterError(f"{name} must be >= 1")
        if self.pad_policy not in ("zero_pad", "truncate"):
            raise AdapterError(f"unknown pad_policy {self.pad_policy!r}")
        if self.activation not in ACTIVATIONS:
            raise AdapterError(f"unknown activation {self.activation!r}")


def _as_frames(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D frame matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise AdapterError("frame matrix contains non-finite values")
    return arr


def stack_frames(x, k: int, pad_policy: str = "zero_pad") -> np.ndarray:
    """Concatenate each run of k consecutive frames into one row.

    zero_pad: ceil(N/k) rows, the last group padded with zero frames.
    truncate: floor(N/k) rows, the ragged tail dropped (error when that
    leaves nothing).
    """
    arr = _as_frames(x)
    n, d = arr.shape
    if n == 0:
        raise EmptyInput("no input frames")
    if k < 1:
        raise AdapterError("stack factor must be >= 1")
    if pad_policy == "zero_pad":
        m = -(-n // k)
        padded = np.zeros((m * k, d), dtype=np.float64)
        padded[:n] = arr
        return padded.reshape(m, k * d)
    if pad_policy == "truncate":
        m = n // k
        if m == 0:
            raise DegenerateOutput(f"truncating {n} frames by factor {k} leaves no output")
        return arr[: m * k].reshape(m, k * d)
    raise AdapterError(f"unknown pad_policy {pad_policy!r}")


def init_params(config: AdapterConfig, seed: int = 0) -> dict[str, np.ndarray]:
    """Gaussian parameters scaled by 1/sqrt(fan_in)."""
    rng = np.random.default_rng(seed)
    d_in = config.stack_factor * config.d_enc
    return {
        "W1": rng.standard_normal((d_in, config.d_hidden)) / math.sqrt(d_in),
        "b1": rng.standard_normal(config.d_hidden) * 0.01,
        "W2": rng.standard_normal((config.d_hidden, config.d_llm)) / math.sqrt(config.d_hidden),
        "b2": rng.standard_normal(config.d_llm) * 0.01,
    }


def _check_params(x: np.ndarray, params: dict) -> None:
    w1, b1, w2, b2 = params["W1"], params["b1"], params["W2"], params["b2"]
    if x.shape[1] != w1.shape[0]:
        raise ShapeMismatch(f"input width {x.shape[1]} != W1 rows {w1.shape[0]}")
    if b1.shape != (w1.shape[1],):
        raise ShapeMismatch(f"b1 shape {b1.shape} != ({w1.shape[1]},)")
    if w2.shape[0] != w1.shape[1]:
        raise ShapeMismatch(f"W2 rows {w2.shape[0]} != W1 cols {w1.shape[1]}")
    if b2.shape != (w2.shape[1],):
        raise ShapeMismatch(f"b2 shape {b2.shape} != ({w2.shape[1]},)")


def mlp_forward(x, params: dict, activation: str = "gelu") -> np.ndarray:
    """act(x W1 + b1) W2 + b2, row-wise, float64."""
    arr = _as_frames(x)
    _check_params(arr, params)
    act, _ = ACTIVATIONS[activation]
    hidden = act(arr @ params["W1"] + params["b1"])
    return hidden @ params["W2"] + params["b2"]


def adapter_forward(x, config: AdapterConfig, params: dict) -> np.ndarray:
    stacked = stack_frames(x, config.stack_factor, config.pad_policy)
    return mlp_forward(stacked, params, config.activation)


def sumsq_loss(x, params: dict, activation: str = "gelu") -> float:
    out = mlp_forward(x, params, activation)
    return float(np.sum(out * out))


def analytic_grads(x, params: dict, activation: str = "gelu") -> dict[str, np.ndarray]:
    """Parameter gradients of the sum-of-squared-outputs loss."""
    arr = _as_frames(x)
    _check_params(arr, params)
    act, act_grad = ACTIVATIONS[activation]
    z1 = arr @ params["W1"] + params["b1"]
    h = act(z1)
    out = h @ params["W2"] + params["b2"]
    d_out = 2.0 * out
    d_h = d_out @ params["W2"].T
    d_z1 = d_h * act_grad(z1)
    return {
        "W1": arr.T @ d_z1,
        "b1": d_z1.sum(axis=0),
        "W2": h.T @ d_out,
        "b2": d_out.sum(axis=0),
    }


def grad_check(params: dict, x, eps: float = 1e-5, activation: str = "gelu") -> float:
    """Worst relative error between analytic and central-difference gradients."""
    if not eps > 0:
        raise InvalidEpsilon(f"eps must be positive, got {eps!r}")
    arr = _as_frames(x)
    analytic = analytic_grads(arr, params, activation)
    worst = 0.0
    work = {name: np.array(p, dtype=np.float64) for name, p in params.items()}
    for name, grad in analytic.items():
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradient(f"analytic gradient of {name} is not finite")
        tensor = work[name]
        flat = tensor.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = sumsq_loss(arr, work, activation)
            flat[i] = orig - eps
            lo = sumsq_loss(arr, work, activation)
            flat[i] = orig
            numeric = (hi - lo) / (2.0 * eps)
            if not math.isfinite(numeric):
                raise NonFiniteGradient(f"numeric gradient of {name}[{i}] is not finite")
            denom = max(abs(gflat[i]), abs(numeric), 1e-8)
            worst = max(worst, abs(gflat[i] - numeric) / denom)
    return worst


def save_params(path: str | Path, params: dict) -> None:
    """JSON tensor-literal bundle: explicit shapes, row-major flat data."""
    payload = {
        name: {"shape": list(np.asarray(p).shape), "data": np.asarray(p).reshape(-1).tolist()}
        for name, p in params.items()
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_params(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return {
        name: np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"])
        for name, entry in payload.items()
    }
