"""The surrogate autoencoder (encoder/decoder pair) and the crop detector.

The autoencoder is deterministic (no variational sampling): three
stride-2 stages down to a latent grid at 1/8 resolution, mirrored back
up with nearest-neighbor upsampling. The detector is a four-block
stride-2 CNN ending in global average pooling and a single logit.
"""

from __future__ import annotations

import numpy as np

from . import ops
from .autodiff import Parameter, Tensor, make_node, no_grad
from .checkpoint import file_hash, load_checkpoint, save_checkpoint
from .errors import FormatError, ValidationError
from .image import ImageRGB8, round_half_away

_ACTIVATIONS = {"silu": ops.silu, "relu": ops.relu}
_ACT_CODE = {"silu": 0, "relu": 1}
_CODE_ACT = {v: k for k, v in _ACT_CODE.items()}


class _Model:
    def __init__(self):
        self.params: dict[str, Parameter] = {}
        self.checkpoint_hash: str | None = None

    def _add(self, name: str, arr: np.ndarray) -> Parameter:
        if name in self.params:
            raise ValidationError(f"duplicate parameter name {name!r}")
        p = Parameter(arr, name)
        self.params[name] = p
        return p

    def _conv_pair(self, rng, name: str, cout: int, cin: int, k: int):
        bound = 1.0 / np.sqrt(cin * k * k)
        w = rng.uniform(-bound, bound, (cout, cin, k, k)).astype(np.float32)
        b = rng.uniform(-bound, bound, cout).astype(np.float32)
        return self._add(f"{name}.weight", w), self._add(f"{name}.bias", b)

    def param_list(self) -> list[Parameter]:
        return list(self.params.values())

    def param_count(self) -> int:
        return sum(p.data.size for p in self.params.values())

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {name: p.data for name, p in self.params.items()}

    def load_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        for name, p in self.params.items():
            if name not in arrays:
                raise FormatError(f"checkpoint missing parameter {name!r}")
            if arrays[name].shape != p.data.shape:
                raise FormatError(
                    f"checkpoint shape mismatch for {name!r}: "
                    f"{arrays[name].shape} != {p.data.shape}"
                )
            p.data = arrays[name].astype(np.float32)


class Autoencoder(_Model):
    DOWNSAMPLE = 8

    def __init__(self, latent_channels: int = 4, activation: str = "silu",
                 enc_channels: tuple[int, int, int] = (32, 64, 128), seed: int = 0):
        super().__init__()
        if activation not in _ACTIVATIONS:
            raise ValidationError(f"unknown activation {activation!r}")
        self.latent_channels = latent_channels
        self.activation = activation
        self.enc_channels = tuple(enc_channels)
        rng = np.random.default_rng(seed)
        e0, e1, e2 = self.enc_channels
        self._conv_pair(rng, "encoder.conv1", e0, 3, 3)
        self._conv_pair(rng, "encoder.conv2", e1, e0, 3)
        self._conv_pair(rng, "encoder.conv3", e2, e1, 3)
        self._conv_pair(rng, "encoder.latent", latent_channels, e2, 1)
        self._conv_pair(rng, "decoder.expand", e2, latent_channels, 1)
        self._conv_pair(rng, "decoder.conv1", e1, e2, 3)
        self._conv_pair(rng, "decoder.conv2", e0, e1, 3)
        self._conv_pair(rng, "decoder.conv3", e0, e0, 3)
        self._conv_pair(rng, "decoder.out", 3, e0, 3)

    def _act(self, x: Tensor) -> Tensor:
        return _ACTIVATIONS[self.activation](x)

    def _wb(self, name: str):
        return self.params[f"{name}.weight"], self.params[f"{name}.bias"]

    def encode(self, x: Tensor) -> Tensor:
        n, c, h, w = x.data.shape
        if c != 3:
            raise ValidationError(f"encode expects 3 channels, got {c}")
        if h % self.DOWNSAMPLE or w % self.DOWNSAMPLE:
            raise ValidationError(
                f"input {h}x{w} not divisible by downsample factor {self.DOWNSAMPLE}"
            )
        for i in (1, 2, 3):
            x = self._act(ops.conv2d(x, *self._wb(f"encoder.conv{i}"), stride=2, padding=1))
        return ops.conv2d(x, *self._wb("encoder.latent"))

    def decode(self, z: Tensor) -> Tensor:
        x = self._act(ops.conv2d(z, *self._wb("decoder.expand")))
        for i in (1, 2, 3):
            x = ops.upsample_nearest2x(x)
            x = self._act(ops.conv2d(x, *self._wb(f"decoder.conv{i}"), padding=1))
        return ops.conv2d(x, *self._wb("decoder.out"), padding=1)

    def forward(self, x: Tensor) -> Tensor:
        return self.decode(self.encode(x))

    def save(self, path) -> None:
        e0, e1, e2 = self.enc_channels
        arrays = dict(self.state_arrays())
        arrays["meta.model"] = np.array([0], dtype=np.float32)
        arrays["meta.arch"] = np.array(
            [self.latent_channels, _ACT_CODE[self.activation], e0, e1, e2],
            dtype=np.float32,
        )
        save_checkpoint(path, arrays)
        self.checkpoint_hash = file_hash(path)

    @classmethod
    def load(cls, path) -> "Autoencoder":
        arrays = load_checkpoint(path)
        arch = arrays.get("meta.arch")
        kind = arrays.get("meta.model")
        if arch is None or kind is None or int(kind[0]) != 0:
            raise FormatError(f"{path}: not an autoencoder checkpoint")
        latent, act, e0, e1, e2 = (int(v) for v in arch)
        model = cls(latent_channels=latent, activation=_CODE_ACT[act],
                    enc_channels=(e0, e1, e2))
        model.load_arrays(arrays)
        model.checkpoint_hash = file_hash(path)
        return model


class Detector(_Model):
    CHANNELS = (16, 32, 64, 128)

    def __init__(self, crop_size: int = 32, seed: int = 0,
                 norm_mean=(0.5, 0.5, 0.5), norm_std=(0.25, 0.25, 0.25)):
        super().__init__()
        self.crop_size = crop_size
        self.norm_mean = np.asarray(norm_mean, dtype=np.float32).reshape(3)
        self.norm_std = np.asarray(norm_std, dtype=np.float32).reshape(3)
        if np.any(self.norm_std <= 0):
            raise ValidationError("norm_std entries must be positive")
        rng = np.random.default_rng(seed)
        cin = 3
        for i, cout in enumerate(self.CHANNELS, start=1):
            self._conv_pair(rng, f"blocks.conv{i}", cout, cin, 3)
            cin = cout
        bound = 1.0 / np.sqrt(cin)
        self._add("head.weight", rng.uniform(-bound, bound, (1, cin)).astype(np.float32))
        self._add("head.bias", rng.uniform(-bound, bound, 1).astype(np.float32))

    def normalize(self, batch01: np.ndarray) -> np.ndarray:
        """Standardize a [0,1] NCHW batch with the stored channel stats."""
        dtype = np.float64 if batch01.dtype == np.float64 else np.float32
        mean = self.norm_mean.astype(dtype).reshape(1, 3, 1, 1)
        std = self.norm_std.astype(dtype).reshape(1, 3, 1, 1)
        return ((batch01 - mean) / std).astype(dtype)

    def logits(self, batch01: np.ndarray) -> Tensor:
        if batch01.ndim != 4 or batch01.shape[1] != 3:
            raise ValidationError(f"detector expects NCHW batch, got {batch01.shape}")
        if batch01.shape[2] != self.crop_size or batch01.shape[3] != self.crop_size:
            raise ValidationError(
                f"detector crop size is {self.crop_size}, got "
                f"{batch01.shape[2]}x{batch01.shape[3]}"
            )
        x = Tensor(self.normalize(batch01))
        for i in range(1, 5):
            w, b = self.params[f"blocks.conv{i}.weight"], self.params[f"blocks.conv{i}.bias"]
            x = ops.silu(ops.conv2d(x, w, b, stride=2, padding=1))
        x = ops.global_avg_pool(x)
        x = ops.linear(x, self.params["head.weight"], self.params["head.bias"])
        return make_vector(x)

    def save(self, path) -> None:
        arrays = dict(self.state_arrays())
        arrays["meta.model"] = np.array([1], dtype=np.float32)
        arrays["meta.arch"] = np.array([self.crop_size], dtype=np.float32)
        arrays["meta.norm_mean"] = self.norm_mean.copy()
        arrays["meta.norm_std"] = self.norm_std.copy()
        save_checkpoint(path, arrays)
        self.checkpoint_hash = file_hash(path)

    @classmethod
    def load(cls, path) -> "Detector":
        arrays = load_checkpoint(path)
        kind = arrays.get("meta.model")
        if kind is None or int(kind[0]) != 1:
            raise FormatError(f"{path}: not a detector checkpoint")
        model = cls(
            crop_size=int(arrays["meta.arch"][0]),
            norm_mean=arrays["meta.norm_mean"],
            norm_std=arrays["meta.norm_std"],
        )
        model.load_arrays(arrays)
        model.checkpoint_hash = file_hash(path)
        return model


def make_vector(x: Tensor) -> Tensor:
    """(N,1) -> (N,) view that stays in the graph."""
    n = x.data.shape[0]
    return make_node(x.data.reshape(n), ((x, lambda g: g.reshape(n, 1)),))


def image_to_batch01(image: ImageRGB8) -> np.ndarray:
    """HWC uint8 -> (1,3,H,W) float32 in [0,1]."""
    return (image.pixels.astype(np.float32) / 255.0).transpose(2, 0, 1)[None]


def ae_encode(model: Autoencoder, batch01) -> Tensor:
    return model.encode(batch01 if isinstance(batch01, Tensor) else Tensor(batch01))


def ae_decode(model: Autoencoder, latent) -> Tensor:
    return model.decode(latent if isinstance(latent, Tensor) else Tensor(latent))


def ae_reconstruct(model: Autoencoder, image: ImageRGB8) -> ImageRGB8:
    """Encode/decode round trip, quantized back to 8-bit RGB."""
    with no_grad():
        y = model.forward(Tensor(image_to_batch01(image)))
    out = np.clip(y.data[0], 0.0, 1.0) * 255.0
    out = round_half_away(out).astype(np.uint8).transpose(1, 2, 0)
    return ImageRGB8(out)


def detector_logit(model: Detector, batch01: np.ndarray) -> Tensor:
    return model.logits(batch01)


def detector_prob(model: Detector, batch01: np.ndarray) -> np.ndarray:
    """Per-crop probability of being reconstructed/generated, in (0,1)."""
    with no_grad():
        return ops.sigmoid(model.logits(batch01)).data
