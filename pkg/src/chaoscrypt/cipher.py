"""Confusion/diffusion image cipher keyed by the hyper-chaotic trajectory.

Encryption of the flat byte stream P (row-major, channels interleaved):

1. confusion: ``B[i] = P[perm[i]]`` where perm is the stable argsort of x(t);
2. forward diffusion: ``T_i = ((B_i + T_{i-1}) mod 256) ^ ks_i ^ mask_i``;
3. backward diffusion: ``C_i = ((T_i + C_{i+1}) mod 256) ^ kb_i ^ mask'_i``.

ks/kb are quantized trajectory components. mask/mask' are the two halves
of an ECC byte stream seeded by the shared point kP_B. Only kG travels in the
envelope; the receiver recovers kP_B as y*(kG).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dynamics import DEFAULT_DT, DEFAULT_TRANSIENT, REFERENCE_INITIAL, REFERENCE_PARAMS, State4, SystemParams, simulate
from .ecc import (
    POINT_SIZE,
    CurveParams,
    Point,
    decode_point,
    ecc_mask_stream,
    encode_point,
    is_on_curve,
    scalar_mul,
)
from .errors import InvalidParams, LengthMismatch, MalformedEnvelope
from .ppm import RgbImage

MAGIC = b"CHC1"
_HEADER = struct.Struct("<4sIIB")
QUANT_SCALE = 1e10


@dataclass(frozen=True)
class ChaosKey:
    params: SystemParams = REFERENCE_PARAMS
    initial: State4 = REFERENCE_INITIAL
    dt: float = DEFAULT_DT
    n_transient: int = DEFAULT_TRANSIENT

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParams(f"dt must be > 0, got {self.dt}")
        if self.n_transient < 0:
            raise InvalidParams("n_transient must be >= 0")
        object.__setattr__(self, "initial", State4(*(float(v) for v in self.initial)))

    def perturbed(self, component: str = "y", delta: float = 1e-15) -> "ChaosKey":
        """Copy with one initial-condition component shifted by ``delta``."""
        return ChaosKey(self.params, self.initial._replace(**{component: getattr(self.initial, component) + delta}),
                        self.dt, self.n_transient)


@dataclass(frozen=True)
class KeystreamBundle:
    permutation: np.ndarray = field(repr=False)
    diffusion_bytes: np.ndarray = field(repr=False)
    backward_bytes: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CipherEnvelope:
    width: int
    height: int
    channels: int
    kG: Point
    cipher_bytes: bytes = field(repr=False)

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise MalformedEnvelope(f"channels must be 1 or 3, got {self.channels}")
        if self.width < 1 or self.height < 1:
            raise MalformedEnvelope(f"bad dimensions {self.width}x{self.height}")
        if len(self.cipher_bytes) != self.width * self.height * self.channels:
            raise MalformedEnvelope("cipher length does not match width*height*channels")

    def to_bytes(self) -> bytes:
        return (
            _HEADER.pack(MAGIC, self.width, self.height, self.channels)
            + encode_point(self.kG)
            + bytes(self.cipher_bytes)
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> "CipherEnvelope":
        head = _HEADER.size + POINT_SIZE
        if len(raw) < head:
            raise MalformedEnvelope(f"envelope too short ({len(raw)} bytes)")
        magic, w, h, ch = _HEADER.unpack_from(raw)
        if magic != MAGIC:
            raise MalformedEnvelope(f"bad magic {magic!r}")
        kG = decode_point(raw[_HEADER.size:head])
        body = raw[head:]
        if len(body) != w * h * ch:
            raise MalformedEnvelope(f"expected {w * h * ch} cipher bytes, found {len(body)}")
        return cls(w, h, ch, kG, bytes(body))

    def as_image(self) -> RgbImage:
        """The cipher bytes viewed as an image of the original shape."""
        return RgbImage(self.width, self.height, self.channels, bytes(self.cipher_bytes))


def _quantize(v: np.ndarray) -> np.ndarray:
    return np.fmod(np.floor(v * QUANT_SCALE), 256.0).astype(np.uint8)


@lru_cache(maxsize=8)
def derive_keystreams(key: ChaosKey, n: int) -> KeystreamBundle:
    """Permutation and diffusion bytes from ``n`` post-transient states.

    Permutation: stable argsort of x. Forward bytes from |y|+|z|+|w|, backward
    bytes from |x|, both as floor(v * 1e10) mod 256.
    """
    if n < 1:
        raise InvalidParams("need at least one keystream element")
    s = simulate(key.initial, key.params, key.dt, n - 1, key.n_transient).states
    x, y, z, w = s[:, 0], s[:, 1], s[:, 2], s[:, 3]
    bundle = KeystreamBundle(
        permutation=np.argsort(x, kind="stable"),
        diffusion_bytes=_quantize(np.abs(y) + np.abs(z) + np.abs(w)),
        backward_bytes=_quantize(np.abs(x)),
    )
    for arr in (bundle.permutation, bundle.diffusion_bytes, bundle.backward_bytes):
        arr.setflags(write=False)
    return bundle


@lru_cache(maxsize=8)
def _mask(S0: Point, G: Point, curve: CurveParams, n: int) -> np.ndarray:
    return np.frombuffer(ecc_mask_stream(S0, G, curve, n), dtype=np.uint8)


def _u8(b) -> np.ndarray:
    return np.frombuffer(bytes(b), dtype=np.uint8) if not isinstance(b, np.ndarray) else b.astype(np.uint8, copy=False)


def confuse(pixels, perm) -> bytes:
    p = _u8(pixels)
    perm = np.asarray(perm)
    if len(p) != len(perm):
        raise LengthMismatch(f"{len(p)} pixels vs permutation of length {len(perm)}")
    return p[perm].tobytes()


def unconfuse(pixels, perm) -> bytes:
    c = _u8(pixels)
    perm = np.asarray(perm)
    if len(c) != len(perm):
        raise LengthMismatch(f"{len(c)} bytes vs permutation of length {len(perm)}")
    out = np.empty_like(c)
    out[perm] = c
    return out.tobytes()


def _same_length(*seqs) -> None:
    n = len(seqs[0])
    if any(len(s) != n for s in seqs[1:]):
        raise LengthMismatch("pixels, keystream and mask must have equal length: " + ", ".join(str(len(s)) for s in seqs))


def diffuse(pixels, ks, mask) -> bytes:
    """C_i = ((P_i + C_{i-1}) mod 256) ^ ks_i ^ mask_i with C_{-1} = 0."""
    _same_length(pixels, ks, mask)
    p = _u8(pixels).tobytes()
    key = (_u8(ks) ^ _u8(mask)).tobytes()
    out = bytearray(len(p))
    prev = 0
    for i, (v, kv) in enumerate(zip(p, key)):
        prev = ((v + prev) & 0xFF) ^ kv
        out[i] = prev
    return bytes(out)


def undiffuse(cipher, ks, mask) -> bytes:
    """P_i = ((C_i ^ ks_i ^ mask_i) - C_{i-1}) mod 256."""
    _same_length(cipher, ks, mask)
    c = _u8(cipher)
    if len(c) == 0:
        return b""
    prev = np.concatenate(([0], c[:-1])).astype(np.uint8)
    return ((c ^ _u8(ks) ^ _u8(mask)) - prev).astype(np.uint8).tobytes()


def _diffuse_backward(data, ks, mask) -> bytes:
    return diffuse(_u8(data)[::-1], _u8(ks)[::-1], _u8(mask)[::-1])[::-1]


def _undiffuse_backward(data, ks, mask) -> bytes:
    return undiffuse(_u8(data)[::-1], _u8(ks)[::-1], _u8(mask)[::-1])[::-1]


def encrypt_stream(flat: bytes, ks: KeystreamBundle, mask: np.ndarray) -> bytes:
    n = len(flat)
    t = diffuse(confuse(flat, ks.permutation), ks.diffusion_bytes, mask[:n])
    return _diffuse_backward(t, ks.backward_bytes, mask[n:])


def decrypt_stream(cipher: bytes, ks: KeystreamBundle, mask: np.ndarray) -> bytes:
    n = len(cipher)
    t = _undiffuse_backward(cipher, ks.backward_bytes, mask[n:])
    return unconfuse(undiffuse(t, ks.diffusion_bytes, mask[:n]), ks.permutation)


def _check_points(curve: CurveParams, **pts) -> None:
    for name, P in pts.items():
        if P is None:
            raise InvalidParams(f"{name} must be an affine point, not infinity")
        if not is_on_curve(P, curve):
            raise InvalidParams(f"{name}={P} is not on {curve}")


def encrypt(img: RgbImage, key: ChaosKey, G: Point, P_B: Point, curve: CurveParams, k: int) -> CipherEnvelope:
    _check_points(curve, G=G, P_B=P_B)
    if k < 1:
        raise InvalidParams("ephemeral scalar k must be >= 1")
    n = len(img.data)
    ks = derive_keystreams(key, n)
    mask = _mask(scalar_mul(k, P_B, curve), G, curve, 2 * n)
    cipher = encrypt_stream(img.data, ks, mask)
    return CipherEnvelope(img.width, img.height, img.channels, scalar_mul(k, G, curve), cipher)


def decrypt(env: CipherEnvelope, key: ChaosKey, y_priv: int, curve: CurveParams, G: Point) -> RgbImage:
    _check_points(curve, G=G)
    if env.kG is not None and not is_on_curve(env.kG, curve):
        raise MalformedEnvelope(f"transmitted point {env.kG} is not on {curve}")
    n = len(env.cipher_bytes)
    ks = derive_keystreams(key, n)
    mask = _mask(scalar_mul(y_priv, env.kG, curve), G, curve, 2 * n)
    return RgbImage(env.width, env.height, env.channels, decrypt_stream(env.cipher_bytes, ks, mask))
