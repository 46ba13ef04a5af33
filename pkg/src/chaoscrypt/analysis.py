"""Statistical and robustness measurements for the image cipher."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np
from scipy import stats

from .cipher import ChaosKey, CipherEnvelope, decrypt, encrypt
from .dynamics import DEFAULT_DT, State4, SystemParams, simulate
from .errors import DimensionMismatch, InvalidParams, OutOfBounds, UndefinedCorrelation
from .keys import EccKey
from .ppm import RgbImage

DIRECTIONS = ("horizontal", "vertical", "diagonal")
CHANNEL_NAMES = {1: ("gray",), 3: ("red", "green", "blue")}


@dataclass(frozen=True)
class ChannelHistogram:
    counts: np.ndarray  # (channels, 256)

    def chi_square(self) -> list[tuple[float, float]]:
        """(statistic, p-value) per channel against the uniform distribution, 255 dof."""
        out = []
        for row in self.counts:
            res = stats.chisquare(row)
            out.append((float(res.statistic), float(res.pvalue)))
        return out


def histogram(img: RgbImage) -> ChannelHistogram:
    a = img.to_array()
    return ChannelHistogram(np.stack([np.bincount(a[:, :, c].ravel(), minlength=256) for c in range(img.channels)]))


def adjacent_pairs(img: RgbImage, direction: str, channel: int) -> tuple[np.ndarray, np.ndarray]:
    if direction not in DIRECTIONS:
        raise InvalidParams(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if not 0 <= channel < img.channels:
        raise InvalidParams(f"channel {channel} out of range for {img.channels}-channel image")
    ch = img.to_array()[:, :, channel]
    if direction == "horizontal":
        x, y = ch[:, :-1], ch[:, 1:]
    elif direction == "vertical":
        x, y = ch[:-1, :], ch[1:, :]
    else:
        x, y = ch[:-1, :-1], ch[1:, 1:]
    return x.ravel().astype(np.float64), y.ravel().astype(np.float64)


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Population-moment Pearson coefficient; undefined below 3 pairs or at zero variance."""
    if len(x) < 3:
        raise UndefinedCorrelation(f"only {len(x)} pairs")
    dx, dy = x - x.mean(), y - y.mean()
    vx, vy = np.mean(dx * dx), np.mean(dy * dy)
    if vx == 0 or vy == 0:
        raise UndefinedCorrelation("zero variance")
    return float(np.mean(dx * dy) / math.sqrt(vx * vy))


def adjacent_correlation(img: RgbImage, direction: str, channel: int) -> float:
    return pearson(*adjacent_pairs(img, direction, channel))


@dataclass(frozen=True)
class CorrelationReport:
    # (direction, channel) -> r, or None where undefined
    values: dict = field(default_factory=dict)

    def get(self, direction: str, channel: int) -> Optional[float]:
        return self.values[(direction, channel)]

    def max_abs(self) -> float:
        return max(abs(v) for v in self.values.values() if v is not None)


def correlation_report(img: RgbImage) -> CorrelationReport:
    vals = {}
    for d in DIRECTIONS:
        for c in range(img.channels):
            try:
                vals[(d, c)] = adjacent_correlation(img, d, c)
            except UndefinedCorrelation:
                vals[(d, c)] = None
    return CorrelationReport(vals)


def _pair_arrays(c1: RgbImage, c2: RgbImage):
    if c1.shape != c2.shape:
        raise DimensionMismatch(f"images differ in shape: {c1.shape} vs {c2.shape}")
    return c1.to_array().astype(np.int16), c2.to_array().astype(np.int16)


def npcr(c1: RgbImage, c2: RgbImage) -> tuple[float, ...]:
    a, b = _pair_arrays(c1, c2)
    return tuple(float(v) for v in 100.0 * (a != b).mean(axis=(0, 1)))


def uaci(c1: RgbImage, c2: RgbImage) -> tuple[float, ...]:
    a, b = _pair_arrays(c1, c2)
    return tuple(float(v) for v in 100.0 * (np.abs(a - b) / 255.0).mean(axis=(0, 1)))


@dataclass(frozen=True)
class DiffReport:
    npcr: tuple
    uaci: tuple
    trials: int = 1


def _encrypt(img: RgbImage, key: ChaosKey, ecc: EccKey) -> CipherEnvelope:
    if ecc.k is None or ecc.P_B is None:
        raise InvalidParams("ECC key needs k and P_B to encrypt")
    return encrypt(img, key, ecc.G, ecc.P_B, ecc.curve, ecc.k)


def _decrypt(env: CipherEnvelope, key: ChaosKey, ecc: EccKey) -> RgbImage:
    if ecc.y is None:
        raise InvalidParams("ECC key needs the private scalar y to decrypt")
    return decrypt(env, key, ecc.y, ecc.curve, ecc.G)


def bump_pixel(img: RgbImage, row: int, col: int, delta: int = 1) -> RgbImage:
    """Add ``delta`` (mod 256) to every channel of one pixel; 0-based indices."""
    if not (0 <= row < img.height and 0 <= col < img.width):
        raise OutOfBounds(f"pixel ({row}, {col}) outside {img.height}x{img.width} image")
    a = img.to_array().copy()
    a[row, col] = (a[row, col].astype(np.int16) + delta) % 256
    return RgbImage.from_array(a)


def differential_experiment(
    img: RgbImage,
    key: ChaosKey,
    ecc: EccKey,
    row: int = 100,
    col: int = 100,
    trials: int = 1,
    seed: int = 0,
) -> DiffReport:
    """NPCR/UACI between ciphers of ``img`` and ``img`` with one pixel bumped by 1.

    ``row``/``col`` are 1-based. With ``trials > 1`` the first trial uses the
    given pixel and the rest use pixels drawn from a seeded generator; the
    report holds the per-channel means.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    c1 = _encrypt(img, key, ecc).as_image()
    rng = np.random.default_rng(seed)
    positions = [(row - 1, col - 1)]
    positions += [(int(rng.integers(img.height)), int(rng.integers(img.width))) for _ in range(trials - 1)]
    n_acc, u_acc = [], []
    for r, c in positions:
        c2 = _encrypt(bump_pixel(img, r, c), key, ecc).as_image()
        n_acc.append(npcr(c1, c2))
        u_acc.append(uaci(c1, c2))
    return DiffReport(tuple(np.mean(n_acc, axis=0).tolist()), tuple(np.mean(u_acc, axis=0).tolist()), trials)


@dataclass(frozen=True)
class KeySensitivityReport:
    component: str
    delta: float
    roundtrip_exact: bool
    wrong_key_npcr: tuple
    wrong_key_image: RgbImage = field(repr=False)


def key_sensitivity_experiment(
    img: RgbImage, key: ChaosKey, ecc: EccKey, component: str = "y", delta: float = 1e-15
) -> KeySensitivityReport:
    if component not in State4._fields:
        raise InvalidParams(f"component must be one of {State4._fields}")
    env = _encrypt(img, key, ecc)
    exact = _decrypt(env, key, ecc) == img
    wrong = _decrypt(env, key.perturbed(component, delta), ecc)
    return KeySensitivityReport(component, delta, exact, npcr(img, wrong), wrong)


@dataclass(frozen=True)
class DataLossReport:
    cut_origin: tuple
    cut_size: tuple
    channel_fraction: tuple  # per channel: share of that channel's pixels that differ
    sample_fraction: float  # share of all channel samples that differ
    pixel_fraction: float  # share of pixels with at least one differing channel
    decrypted: RgbImage = field(repr=False)
    damaged_cipher: RgbImage = field(repr=False)


def data_loss_experiment(
    img: RgbImage, key: ChaosKey, ecc: EccKey, cut_origin=(0, 0), cut_size=(50, 50)
) -> DataLossReport:
    """Zero a rectangle of the cipher image, decrypt, and measure the damage.

    ``cut_origin`` is a 0-based (row, col); ``cut_size`` is (rows, cols).
    """
    (r0, c0), (h, w) = cut_origin, cut_size
    if h < 0 or w < 0 or r0 < 0 or c0 < 0 or r0 + h > img.height or c0 + w > img.width:
        raise OutOfBounds(f"cut {cut_size} at {cut_origin} exceeds {img.height}x{img.width} image")
    env = _encrypt(img, key, ecc)
    cut = env.as_image().to_array().copy()
    cut[r0 : r0 + h, c0 : c0 + w, :] = 0
    damaged = RgbImage.from_array(cut)
    env2 = CipherEnvelope(env.width, env.height, env.channels, env.kG, damaged.data)
    dec = _decrypt(env2, key, ecc)
    diff = dec.to_array() != img.to_array()
    return DataLossReport(
        cut_origin=(r0, c0),
        cut_size=(h, w),
        channel_fraction=tuple(float(v) for v in diff.mean(axis=(0, 1))),
        sample_fraction=float(diff.mean()),
        pixel_fraction=float(diff.any(axis=2).mean()),
        decrypted=dec,
        damaged_cipher=damaged,
    )


def divergence_time(
    p: SystemParams,
    initial: State4,
    delta: float = 1e-15,
    component: str = "y",
    dt: float = DEFAULT_DT,
    t_max: float = 50.0,
    threshold: float = 1.0,
) -> Optional[float]:
    """First time at which two trajectories ``delta`` apart separate by more than ``threshold``.

    Euclidean distance, both runs without transient. None if they stay closer
    up to ``t_max``.
    """
    n = int(round(t_max / dt))
    a = simulate(initial, p, dt, n, 0).states
    shifted = initial._replace(**{component: getattr(initial, component) + delta})
    b = simulate(shifted, p, dt, n, 0).states
    d = np.linalg.norm(a - b, axis=1)
    hit = np.nonzero(d > threshold)[0]
    return float(hit[0] * dt) if len(hit) else None


def write_histogram_csv(h: ChannelHistogram, fh: IO[str]) -> None:
    names = CHANNEL_NAMES[len(h.counts)]
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["value", *names])
    for v in range(256):
        writer.writerow([v, *(int(h.counts[c][v]) for c in range(len(names)))])


def write_scatter_csv(img: RgbImage, fh: IO[str], n_samples: int = 3000) -> None:
    """Evenly spaced adjacent-pair samples for every direction and channel."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["direction", "channel", "pixel", "neighbor"])
    names = CHANNEL_NAMES[img.channels]
    for d in DIRECTIONS:
        for c in range(img.channels):
            x, y = adjacent_pairs(img, d, c)
            idx = np.linspace(0, len(x) - 1, min(n_samples, len(x))).astype(int)
            for i in idx:
                writer.writerow([d, names[c], int(x[i]), int(y[i])])


def analysis_report(img: RgbImage) -> str:
    """key=value report of histogram uniformity and adjacent correlations."""
    names = CHANNEL_NAMES[img.channels]
    lines = ["[image]", f"width={img.width}", f"height={img.height}", f"channels={img.channels}", "", "[histogram]"]
    for name, (stat, pv) in zip(names, histogram(img).chi_square()):
        lines.append(f"{name}.chi2={stat:.4f}")
        lines.append(f"{name}.p_value={pv:.6f}")
    lines += ["", "[correlation]"]
    rep = correlation_report(img)
    for (d, c), r in rep.values.items():
        lines.append(f"{d}.{names[c]}={'undefined' if r is None else format(r, '.6f')}")
    return "\n".join(lines) + "\n"
