"""Affine short-Weierstrass arithmetic over a prime field and EC-ElGamal.

Points are ``(X, Y)`` tuples of ints; the point at infinity is ``None``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Tuple

from .errors import MalformedEnvelope, NotPrime, SingularCurve

Point = Optional[Tuple[int, int]]
INFINITY: Point = None

POINT_SIZE = 17
_POINT = struct.Struct("<BQQ")


@dataclass(frozen=True)
class CurveParams:
    a: int
    b: int
    p: int

    def __str__(self):
        return f"E_{self.p}({self.a}, {self.b})"


def validate_curve(a: int, b: int, p: int) -> CurveParams:
    from sympy import isprime

    if p < 5:
        raise NotPrime(f"modulus must be >= 5, got {p}")
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    a %= p
    b %= p
    if (4 * a**3 + 27 * b**2) % p == 0:
        raise SingularCurve(f"4a^3 + 27b^2 = 0 mod {p} for a={a}, b={b}")
    return CurveParams(a, b, p)


def is_on_curve(P: Point, c: CurveParams) -> bool:
    if P is None:
        return True
    x, y = P
    if not (0 <= x < c.p and 0 <= y < c.p):
        return False
    return (y * y - (x * x * x + c.a * x + c.b)) % c.p == 0


def negate(P: Point, c: CurveParams) -> Point:
    if P is None:
        return None
    return (P[0], (-P[1]) % c.p)


def point_add(P: Point, Q: Point, c: CurveParams) -> Point:
    if P is None:
        return Q
    if Q is None:
        return P
    p = c.p
    xp, yp = P
    xq, yq = Q
    if xp == xq:
        if (yp + yq) % p == 0:
            return None
        lam = (3 * xp * xp + c.a) * pow(2 * yp, -1, p) % p
    else:
        lam = (yq - yp) * pow(xq - xp, -1, p) % p
    x3 = (lam * lam - xp - xq) % p
    y3 = (lam * (xp - x3) - yp) % p
    return (x3, y3)


def point_double(P: Point, c: CurveParams) -> Point:
    if P is None or P[1] == 0:
        return None
    return point_add(P, P, c)


def scalar_mul(n: int, P: Point, c: CurveParams) -> Point:
    """Left-to-right double-and-add."""
    if n < 0:
        return scalar_mul(-n, negate(P, c), c)
    R: Point = None
    for bit in bin(n)[2:]:
        R = point_double(R, c)
        if bit == "1":
            R = point_add(R, P, c)
    return R


class KeyPair(NamedTuple):
    private_scalar: int
    public_point: Point


def make_keypair(private_scalar: int, G: Point, c: CurveParams) -> KeyPair:
    return KeyPair(private_scalar, scalar_mul(private_scalar, G, c))


class PointCipher(NamedTuple):
    c1: Point  # kG
    c2: Point  # P_M + kP_B


def elgamal_encrypt(P_M: Point, k: int, P_B: Point, G: Point, c: CurveParams) -> PointCipher:
    if k < 1:
        raise ValueError("ephemeral scalar k must be >= 1")
    return PointCipher(scalar_mul(k, G, c), point_add(P_M, scalar_mul(k, P_B, c), c))


def elgamal_decrypt(ct: PointCipher, y_priv: int, c: CurveParams) -> Point:
    return point_add(ct.c2, negate(scalar_mul(y_priv, ct.c1, c), c), c)


def iter_coset(S0: Point, G: Point, c: CurveParams) -> Iterator[Point]:
    """S0, S0+G, S0+2G, ... with the walk restarting at G after infinity."""
    S = S0
    while True:
        yield S
        S = G if S is None else point_add(S, G, c)


def ecc_mask_stream(S0: Point, G: Point, c: CurveParams, n_bytes: int) -> bytes:
    """Byte mask from the X coordinates of the walk S_i = S0 + iG (infinity gives 0)."""
    if n_bytes <= 0:
        return b""
    # inlined walk: this runs once per pixel byte
    p, a = c.p, c.a
    gx, gy = G
    out = bytearray(n_bytes)
    S = S0
    for i in range(n_bytes):
        if S is None:
            S = G
            continue
        x, y = S
        out[i] = x & 0xFF
        if x == gx:
            if (y + gy) % p == 0:
                S = None
                continue
            lam = (3 * x * x + a) * pow(2 * y, -1, p) % p
        else:
            lam = (gy - y) * pow(gx - x, -1, p) % p
        x3 = (lam * lam - x - gx) % p
        S = (x3, (lam * (x - x3) - y) % p)
    return bytes(out)


def encode_point(P: Point) -> bytes:
    if P is None:
        return _POINT.pack(0, 0, 0)
    return _POINT.pack(1, P[0], P[1])


def decode_point(raw: bytes) -> Point:
    if len(raw) != POINT_SIZE:
        raise MalformedEnvelope(f"point encoding must be {POINT_SIZE} bytes, got {len(raw)}")
    flag, x, y = _POINT.unpack(raw)
    if flag == 0:
        if x or y:
            raise MalformedEnvelope("infinity point with nonzero coordinates")
        return None
    if flag != 1:
        raise MalformedEnvelope(f"unknown point flag {flag}")
    return (x, y)


# reference keys used throughout the experiments
REFERENCE_CURVE = CurveParams(5376, 2438, 123457)
REFERENCE_G: Point = (2225, 75856)
REFERENCE_Y_PRIV = 36548
REFERENCE_K = 23412
REFERENCE_PB: Point = (30402, 35513)
