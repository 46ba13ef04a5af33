import random
from functools import reduce

import pytest

from chaoscrypt.ecc import (
    INFINITY,
    REFERENCE_CURVE,
    REFERENCE_G,
    REFERENCE_K,
    REFERENCE_PB,
    REFERENCE_Y_PRIV,
    CurveParams,
    PointCipher,
    decode_point,
    ecc_mask_stream,
    elgamal_decrypt,
    elgamal_encrypt,
    encode_point,
    is_on_curve,
    iter_coset,
    make_keypair,
    negate,
    point_add,
    point_double,
    scalar_mul,
    validate_curve,
)
from chaoscrypt.errors import MalformedEnvelope, NotPrime, SingularCurve
from oracles import collinear, curve_points, group_table, projective_add

SMALL_CURVES = [(1, 1, 23), (2, 2, 17), (4, 20, 29)]


@pytest.fixture(scope="module", params=SMALL_CURVES, ids=lambda t: "E_%d(%d,%d)" % (t[2], t[0], t[1]))
def small(request):
    a, b, p = request.param
    c = validate_curve(a, b, p)
    pts, table = group_table(a, b, p)
    return c, pts, table


def test_oracle_is_a_group(small):
    c, pts, table = small
    for P in pts:
        assert table[(P, None)] == P
        assert table[(P, negate(P, c))] is None
    for P in pts:
        for Q in pts:
            R = table[(P, Q)]
            assert R is None or is_on_curve(R, c)
            assert table[(Q, P)] == R
            # chord rule: P, Q and -(P+Q) lie on one line
            if P is not None and Q is not None and P != Q and R is not None:
                assert collinear(P, Q, negate(R, c), c.p)


def test_oracle_associative(small):
    c, pts, table = small
    for P in pts:
        for Q in pts:
            PQ = table[(P, Q)]
            for R in pts:
                assert table[(PQ, R)] == table[(P, table[(Q, R)])]


def test_add_and_double_match_table(small):
    c, pts, table = small
    for P in pts:
        assert point_double(P, c) == table[(P, P)]
        for Q in pts:
            assert point_add(P, Q, c) == table[(P, Q)]


def test_scalar_mul_matches_iterated_add(small):
    c, pts, table = small
    order = len(pts)
    for P in pts:
        acc = None
        for n in range(order + 2):
            assert scalar_mul(n, P, c) == acc
            acc = table[(acc, P)]
        # group order annihilates every point (Lagrange)
        assert scalar_mul(order, P, c) is None


def test_elgamal_roundtrip_every_message(small):
    c, pts, _ = small
    G = next(P for P in pts[1:] if scalar_mul(2, P, c) is not None)
    kp = make_keypair(7, G, c)
    for M in pts:
        for k in (1, 3, 11):
            ct = elgamal_encrypt(M, k, kp.public_point, G, c)
            assert is_on_curve(ct.c1, c) and is_on_curve(ct.c2, c)
            assert elgamal_decrypt(ct, kp.private_scalar, c) == M


def test_textbook_values_e23():
    c = CurveParams(1, 1, 23)
    assert point_add((3, 10), (9, 7), c) == (17, 20)
    assert point_double((3, 10), c) == (7, 12)
    assert point_add((3, 10), (3, 13), c) is INFINITY
    assert point_add((3, 10), None, c) == (3, 10)
    assert point_double(None, c) is None


def test_double_of_two_torsion_point():
    # y = 0 points: x^3 + x + b = 0 ; on E_23(1,1) none, so search a curve that has one
    for b in range(1, 23):
        c = CurveParams(1, b, 23)
        zeros = [P for P in curve_points(1, b, 23) if P[1] == 0]
        if zeros and (4 + 27 * b * b) % 23:
            assert point_double(zeros[0], c) is None
            return
    pytest.fail("no curve with a 2-torsion point found")


def test_validate_curve():
    assert validate_curve(5376, 2438, 123457) == REFERENCE_CURVE
    assert validate_curve(1, 1, 23) == CurveParams(1, 1, 23)
    with pytest.raises(SingularCurve):
        validate_curve(0, 0, 23)
    with pytest.raises(NotPrime):
        validate_curve(1, 1, 21)
    with pytest.raises(NotPrime):
        validate_curve(1, 1, 3)


def test_is_on_curve():
    assert is_on_curve(REFERENCE_G, REFERENCE_CURVE)
    assert is_on_curve(None, REFERENCE_CURVE)
    assert not is_on_curve((2225, 75857), REFERENCE_CURVE)
    assert is_on_curve(REFERENCE_PB, REFERENCE_CURVE)


def test_reference_public_key():
    assert scalar_mul(REFERENCE_Y_PRIV, REFERENCE_G, REFERENCE_CURVE) == REFERENCE_PB
    assert scalar_mul(1, REFERENCE_G, REFERENCE_CURVE) == REFERENCE_G
    assert scalar_mul(0, REFERENCE_G, REFERENCE_CURVE) is None


def test_scalar_mul_against_oracle_on_reference_curve():
    rng = random.Random(3)
    c = REFERENCE_CURVE
    for _ in range(20):
        n = rng.randrange(1, 5000)
        acc = reduce(lambda R, _: projective_add(R, REFERENCE_G, c.a, c.p), range(n), None)
        assert scalar_mul(n, REFERENCE_G, c) == acc


def test_reference_elgamal():
    c = REFERENCE_CURVE
    M = scalar_mul(999, REFERENCE_G, c)
    ct = elgamal_encrypt(M, REFERENCE_K, REFERENCE_PB, REFERENCE_G, c)
    assert ct.c1 == scalar_mul(REFERENCE_K, REFERENCE_G, c)
    assert is_on_curve(ct.c1, c) and is_on_curve(ct.c2, c)
    assert elgamal_decrypt(ct, REFERENCE_Y_PRIV, c) == M
    assert elgamal_encrypt(None, REFERENCE_K, REFERENCE_PB, REFERENCE_G, c).c2 == scalar_mul(REFERENCE_K, REFERENCE_PB, c)


def test_reference_roundtrip_random_points():
    rng = random.Random(11)
    c = REFERENCE_CURVE
    for _ in range(100):
        M = scalar_mul(rng.randrange(1, 10**6), REFERENCE_G, c)
        k = rng.randrange(1, 10**6)
        assert elgamal_decrypt(elgamal_encrypt(M, k, REFERENCE_PB, REFERENCE_G, c), REFERENCE_Y_PRIV, c) == M


def test_decrypt_when_shared_point_is_infinity():
    c = CurveParams(1, 1, 23)
    G = (3, 10)
    order = next(n for n in range(1, 40) if scalar_mul(n, G, c) is None)
    ct = PointCipher(G, (9, 7))
    assert elgamal_decrypt(ct, order, c) == (9, 7)


def test_wrong_private_key_fails_mostly():
    c = CurveParams(1, 1, 23)
    pts = curve_points(1, 1, 23)
    G = (0, 1)  # generator of the order-28 group
    assert len({scalar_mul(n, G, c) for n in range(28)}) == 28
    kp = make_keypair(9, G, c)
    rng = random.Random(5)
    wrong = 0
    for _ in range(50):
        M = rng.choice(pts)
        ct = elgamal_encrypt(M, rng.randrange(1, 28), kp.public_point, G, c)
        wrong += elgamal_decrypt(ct, 10, c) != M
    assert wrong >= 45


def test_mask_stream_against_coset_walk():
    c = CurveParams(1, 1, 23)
    pts, table = group_table(1, 1, 23)
    G = (0, 1)
    assert ecc_mask_stream((3, 10), G, c, 0) == b""
    n = 70
    walk, S = [], (3, 10)
    for _ in range(n):
        walk.append(S)
        S = G if S is None else table[(S, G)]
    expected = bytes(0 if P is None else P[0] % 256 for P in walk)
    got = ecc_mask_stream((3, 10), G, c, n)
    assert got == expected
    assert None in walk  # the walk passes through infinity at least once
    it = iter_coset((3, 10), G, c)
    assert [next(it) for _ in range(n)] == walk


def test_mask_stream_key_transport_identity():
    c = REFERENCE_CURVE
    kG = scalar_mul(REFERENCE_K, REFERENCE_G, c)
    a = ecc_mask_stream(scalar_mul(REFERENCE_Y_PRIV, kG, c), REFERENCE_G, c, 4096)
    b = ecc_mask_stream(scalar_mul(REFERENCE_K, REFERENCE_PB, c), REFERENCE_G, c, 4096)
    assert a == b
    assert a == ecc_mask_stream(scalar_mul(REFERENCE_K, REFERENCE_PB, c), REFERENCE_G, c, 4096)


def test_point_encoding():
    for P in (None, (0, 0), REFERENCE_G, (2**64 - 1, 5)):
        raw = encode_point(P)
        assert len(raw) == 17
        assert decode_point(raw) == P
    assert encode_point(REFERENCE_G)[0] == 1
    assert encode_point(REFERENCE_G)[1:9] == (2225).to_bytes(8, "little")
    with pytest.raises(MalformedEnvelope):
        decode_point(b"\x02" + bytes(16))
    with pytest.raises(MalformedEnvelope):
        decode_point(b"\x00" + b"\x01" + bytes(15))
    with pytest.raises(MalformedEnvelope):
        decode_point(bytes(5))
