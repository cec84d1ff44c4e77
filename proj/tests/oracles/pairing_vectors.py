"""Independent reference values for pairing_test, computed with py_ecc.

Run: python3 tests/oracles/pairing_vectors.py
The printed constants are frozen into tests/pairing_test.cpp.
"""
from hashlib import sha256

from py_ecc.bls.hash import expand_message_xmd
from py_ecc.bls.hash_to_curve import hash_to_G1, hash_to_G2
from py_ecc.bls.point_compression import compress_G1, compress_G2
from py_ecc.optimized_bls12_381 import G1, G2, multiply, curve_order, field_modulus as p, FQ, is_on_curve, b

DST_H1 = b"IBRS-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_H1_"
DST_H2 = b"IBRS-V01-CS01-with-BLS12381G2_XMD:SHA-256_SSWU_RO_H2_"
DST_H = b"IBRS-V01-CS01-with-BLS12381Fr_XMD:SHA-256_H_"


def g1_hex(pt):
    return compress_G1(pt).to_bytes(48, "big").hex()


def g2_hex(pt):
    z1, z2 = compress_G2(pt)
    return (z1.to_bytes(48, "big") + z2.to_bytes(48, "big")).hex()


print("generator_g1", g1_hex(G1))
print("seven_g1", g1_hex(multiply(G1, 7)))
print("seven_g2", g2_hex(multiply(G2, 7)))
for msg in [b"", b"abc", b"vehicle-0001"]:
    print("h1", repr(msg), g1_hex(hash_to_G1(msg, DST_H1, sha256)))
    print("h2", repr(msg), g2_hex(hash_to_G2(msg, DST_H2, sha256)))
    wide = expand_message_xmd(msg, DST_H, 48, sha256)
    print("hs", repr(msg), (int.from_bytes(wide, "big") % curve_order).to_bytes(32, "big").hex())


def is_square(v):
    return pow(v, (p - 1) // 2, p) == 1


# smallest x with x^3 + 4 a non-residue (off-curve) and a residue (on-curve)
x = 1
off = on = None
while off is None or on is None:
    rhs = (x ** 3 + 4) % p
    if is_square(rhs) and on is None:
        on = x
    if not is_square(rhs) and off is None:
        off = x
    x += 1

# the on-curve point must also fail the subgroup check
y = pow((on ** 3 + 4) % p, (p + 1) // 4, p)
pt = (FQ(on), FQ(y), FQ(1))
assert is_on_curve(pt, b)
assert multiply(pt, curve_order)[2] != FQ(0), "unexpectedly in subgroup"
flag = 0x80  # compressed, y choice irrelevant for the checks
print("off_curve_x", (off | (flag << 376)).to_bytes(48, "big").hex())
print("off_subgroup_x", (on | (flag << 376)).to_bytes(48, "big").hex())
