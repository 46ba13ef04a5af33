import pytest

from chaoscrypt.cipher import ChaosKey
from chaoscrypt.dynamics import State4, SystemParams
from chaoscrypt.ecc import REFERENCE_CURVE, REFERENCE_G, REFERENCE_PB
from chaoscrypt.errors import KeyFileError
from chaoscrypt.keys import EccKey, dump_chaos_key, dump_ecc_key, load_chaos_key, load_ecc_key

REFERENCE_ECC_TEXT = """\
# experiment keys
a = 5376
b = 2438
p = 123457
G.x = 2225
G.y = 75856
y = 36548
k = 23412
P_B.x = 30402
P_B.y = 35513
"""


def test_reference_ecc_file():
    key = load_ecc_key(REFERENCE_ECC_TEXT)
    assert key == EccKey()
    assert key.curve == REFERENCE_CURVE and key.G == REFERENCE_G and key.P_B == REFERENCE_PB
    assert load_ecc_key(dump_ecc_key(key)) == key


def test_chaos_roundtrip_preserves_floats_exactly():
    key = ChaosKey(SystemParams(a=10.1, e2=0.1), State4(1, 1 + 1e-15, 1, 0.3), 0.002, 500)
    assert load_chaos_key(dump_chaos_key(key)) == key


def test_chaos_defaults_are_reference():
    assert load_chaos_key("") == ChaosKey()
    assert load_chaos_key("k = 2\ny0 = 1.0\n") == ChaosKey()


def test_public_key_derived_when_missing():
    text = "\n".join(line for line in REFERENCE_ECC_TEXT.splitlines() if not line.startswith("P_B"))
    assert load_ecc_key(text).P_B == REFERENCE_PB


@pytest.mark.parametrize(
    "text",
    [
        "a = 1\nzzz = 4\n",
        "a 1\n",
        "a = \n",
        "a = 1\na = 2\n",
        "x0 = one\n",
        "b = -3\n",
        "dt = 0\n",
    ],
)
def test_bad_chaos_files(text):
    with pytest.raises(KeyFileError):
        load_chaos_key(text)


@pytest.mark.parametrize(
    "text",
    [
        REFERENCE_ECC_TEXT.replace("p = 123457", "p = 123458"),
        REFERENCE_ECC_TEXT.replace("G.y = 75856", "G.y = 75857"),
        REFERENCE_ECC_TEXT.replace("P_B.y = 35513", "P_B.y = 1"),
        REFERENCE_ECC_TEXT.replace("y = 36548", "y = 36549"),
        REFERENCE_ECC_TEXT.replace("P_B.y = 35513\n", ""),
        "a = 0\nb = 0\np = 23\nG.x = 0\nG.y = 0\n",
        "a = 1\nb = 1\n",
    ],
)
def test_bad_ecc_files(text):
    with pytest.raises(KeyFileError):
        load_ecc_key(text)
