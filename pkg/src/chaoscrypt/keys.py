"""Line-based ``name = value`` key files for the chaos and ECC keys.

Names follow the experiment table: a, b, c, e1, e2, m, k, x0..w0 for the
flow; a, b, p, G.x, G.y, y, k, P_B.x, P_B.y for the curve. ``#`` starts a
comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cipher import ChaosKey
from .dynamics import State4, SystemParams
from .ecc import (
    REFERENCE_CURVE,
    REFERENCE_G,
    REFERENCE_K,
    REFERENCE_PB,
    REFERENCE_Y_PRIV,
    CurveParams,
    Point,
    is_on_curve,
    scalar_mul,
    validate_curve,
)
from .errors import ChaosCryptError, KeyFileError

CHAOS_NAMES = ("a", "b", "c", "e1", "e2", "m", "k", "x0", "y0", "z0", "w0", "dt", "n_transient")
ECC_NAMES = ("a", "b", "p", "G.x", "G.y", "y", "k", "P_B.x", "P_B.y")


@dataclass(frozen=True)
class EccKey:
    curve: CurveParams = REFERENCE_CURVE
    G: Point = REFERENCE_G
    y: Optional[int] = REFERENCE_Y_PRIV  # receiver's private scalar
    k: Optional[int] = REFERENCE_K  # sender's ephemeral scalar
    P_B: Point = REFERENCE_PB

    def __post_init__(self):
        if self.G is None or not is_on_curve(self.G, self.curve):
            raise KeyFileError(f"G={self.G} is not an affine point on {self.curve}")
        if self.P_B is None and self.y is not None:
            object.__setattr__(self, "P_B", scalar_mul(self.y, self.G, self.curve))
        if self.P_B is not None and not is_on_curve(self.P_B, self.curve):
            raise KeyFileError(f"P_B={self.P_B} is not on {self.curve}")
        if self.y is not None and self.P_B is not None and scalar_mul(self.y, self.G, self.curve) != self.P_B:
            raise KeyFileError("P_B does not equal y*G")


def parse_pairs(text: str, allowed) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name or not value:
            raise KeyFileError(f"line {lineno}: expected 'name = value', got {line!r}")
        if name not in allowed:
            raise KeyFileError(f"line {lineno}: unknown key {name!r}")
        if name in out:
            raise KeyFileError(f"line {lineno}: duplicate key {name!r}")
        out[name] = value
    return out


def _num(pairs, name, conv, default):
    if name not in pairs:
        return default
    try:
        return conv(pairs[name])
    except ValueError:
        raise KeyFileError(f"{name}: cannot parse {pairs[name]!r}") from None


def load_chaos_key(text: str) -> ChaosKey:
    pairs = parse_pairs(text, CHAOS_NAMES)
    d = ChaosKey()
    p, s = d.params, d.initial
    try:
        params = SystemParams(
            a=_num(pairs, "a", float, p.a),
            b=_num(pairs, "b", float, p.b),
            c=_num(pairs, "c", float, p.c),
            e1=_num(pairs, "e1", float, p.e1),
            e2=_num(pairs, "e2", float, p.e2),
            k_fb=_num(pairs, "k", float, p.k_fb),
            m=_num(pairs, "m", float, p.m),
        )
        initial = State4(*(_num(pairs, n, float, v) for n, v in zip(("x0", "y0", "z0", "w0"), s)))
        return ChaosKey(params, initial, _num(pairs, "dt", float, d.dt), _num(pairs, "n_transient", int, d.n_transient))
    except KeyFileError:
        raise
    except ChaosCryptError as exc:
        raise KeyFileError(str(exc)) from None


def dump_chaos_key(key: ChaosKey) -> str:
    p, s = key.params, key.initial
    vals = (p.a, p.b, p.c, p.e1, p.e2, p.m, p.k_fb, s.x, s.y, s.z, s.w, key.dt, key.n_transient)
    return "".join(f"{n} = {v!r}\n" for n, v in zip(CHAOS_NAMES, vals))


def load_ecc_key(text: str) -> EccKey:
    pairs = parse_pairs(text, ECC_NAMES)
    for req in ("a", "b", "p", "G.x", "G.y"):
        if req not in pairs:
            raise KeyFileError(f"missing required key {req!r}")
    try:
        curve = validate_curve(_num(pairs, "a", int, None), _num(pairs, "b", int, None), _num(pairs, "p", int, None))
    except ChaosCryptError as exc:
        raise KeyFileError(str(exc)) from None
    G = (_num(pairs, "G.x", int, None), _num(pairs, "G.y", int, None))
    if ("P_B.x" in pairs) != ("P_B.y" in pairs):
        raise KeyFileError("P_B.x and P_B.y must be given together")
    P_B = (_num(pairs, "P_B.x", int, None), _num(pairs, "P_B.y", int, None)) if "P_B.x" in pairs else None
    return EccKey(curve, G, _num(pairs, "y", int, None), _num(pairs, "k", int, None), P_B)


def dump_ecc_key(key: EccKey) -> str:
    c = key.curve
    vals = {"a": c.a, "b": c.b, "p": c.p, "G.x": key.G[0], "G.y": key.G[1], "y": key.y, "k": key.k}
    if key.P_B is not None:
        vals["P_B.x"], vals["P_B.y"] = key.P_B
    return "".join(f"{n} = {v}\n" for n, v in vals.items() if v is not None)
