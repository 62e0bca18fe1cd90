"""Quasigroup block cipher with and without cipher-block chaining.

Library layout:

* :mod:`qgcipher.quasigroup`  tables, inverse tables, the chained stream transform
* :mod:`qgcipher.latin`       reduced Latin square counting (n <= 6)
* :mod:`qgcipher.block`       32-round block cipher, ECB over messages, key files
* :mod:`qgcipher.cbc`         CBC mode, padding, ``QGC1`` envelopes
* :mod:`qgcipher.randomness`  SP 800-22 subset and the multi-run battery
* :mod:`qgcipher.bench`       cipher registry, AES-256 baseline, throughput
* :mod:`qgcipher.audio`       PCM-16 WAV payload encryption
"""

from .block import (
    BLOCK_SIZE,
    KEY_SIZE,
    ROTATION_SCHEDULE,
    CipherKey,
    decrypt_block,
    decrypt_message_ecb,
    encrypt_block,
    encrypt_message_ecb,
    generate_key,
    rotate_left,
    rotate_right,
)
from .cbc import CbcEnvelope, cbc_decrypt, cbc_encrypt, generate_iv
from .latin import count_reduced_latin_squares
from .quasigroup import (
    InverseTable,
    QuasigroupTable,
    generate_table,
    invert_table,
    stream_decrypt,
    stream_encrypt,
    validate_table,
)

__version__ = "0.1.0"
