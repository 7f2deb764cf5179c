# Copyright 2026 The wbms Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the frozen crypto vectors in tests/golden_vectors_test.cpp.

Uses the `cryptography` package only; shares no code with the C++ library.
"""

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.cmac import CMAC


def cbc_enc(key, iv, data):
    e = Cipher(algorithms.AES(key), modes.CBC(iv)).encryptor()
    return e.update(data) + e.finalize()


def cmac(key, data):
    c = CMAC(algorithms.AES(key))
    c.update(data)
    return c.finalize()


def pkcs7(data):
    n = 16 - len(data) % 16
    return data + bytes([n]) * n


def main():
    zero = bytes(16)
    ch_r, ch_t = bytes([1]) * 16, bytes([2]) * 16
    k_enc = cmac(zero, b"\x01SKEYENC" + ch_r + ch_t + b"\x00\x80")
    k_mac = cmac(zero, b"\x02SKEYMAC" + ch_r + ch_t + b"\x00\x80")
    print("kdf k_enc", k_enc.hex())
    print("kdf k_mac", k_mac.hex())

    m_n = bytes.fromhex("424d5331")
    chal = (m_n + ch_r).ljust(32, b"\x00")
    print("challenge", cbc_enc(zero, zero, cbc_enc(zero, zero, chal)).hex())

    padded = cbc_enc(zero, zero, cbc_enc(zero, zero, pkcs7(b"stored pack 0001")))
    print("double_encrypt_padded", padded.hex())

    iv = bytes(range(16))
    add = bytes.fromhex("0300000007")
    plaintext = b"soc=612 soh=874"
    sec = cbc_enc(k_enc, iv, pkcs7(plaintext))
    tag1 = cmac(k_mac, sec + iv + add + zero)
    print("record1 sec", sec.hex())
    print("record1 tag", tag1.hex())
    iv2 = bytes(range(16, 32))
    sec2 = cbc_enc(k_enc, iv2, pkcs7(plaintext))
    tag2 = cmac(k_mac, sec2 + iv2 + add + tag1)
    print("record2 sec", sec2.hex())
    print("record2 tag", tag2.hex())


if __name__ == "__main__":
    main()
