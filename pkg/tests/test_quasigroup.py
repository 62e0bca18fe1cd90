import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import EXAMPLE_CIPHER, EXAMPLE_PLAIN, EXAMPLE_SEED, TABLE_I, TABLE_II
from qgcipher.errors import (
    DuplicateInColumnError,
    DuplicateInRowError,
    OrderOutOfRangeError,
    SymbolOutOfRangeError,
    TableFormatError,
)
from qgcipher.quasigroup import (
    dumps_table,
    dumps_table_binary,
    generate_table,
    invert_table,
    load_table,
    loads_table,
    save_table,
    stream_decrypt,
    stream_encrypt,
    validate_table,
)


def is_latin(rows):
    n = len(rows)
    full = set(range(n))
    return all(set(r) == full for r in rows) and all({r[j] for r in rows} == full for j in range(n))


class TestValidate:
    def test_example_table_is_valid(self):
        qg = validate_table(TABLE_I)
        assert qg.order == 6
        assert qg.to_lists() == TABLE_I

    def test_order_one(self):
        assert validate_table([[0]]).order == 1

    def test_duplicate_in_row(self):
        bad = [row[:] for row in TABLE_I]
        bad[1][1] = bad[1][2]
        with pytest.raises(DuplicateInRowError) as exc:
            validate_table(bad)
        assert exc.value.row == 1

    def test_duplicate_in_column(self):
        # both rows are permutations; column 0 repeats
        bad = [[0, 1], [0, 1]]
        with pytest.raises(DuplicateInColumnError) as exc:
            validate_table(bad)
        assert exc.value.col == 0

    def test_symbol_out_of_range(self):
        with pytest.raises(SymbolOutOfRangeError):
            validate_table([[0, 2], [1, 0]])

    def test_not_square(self):
        with pytest.raises(TableFormatError):
            validate_table([[0, 1], [1]])


class TestGenerate:
    @pytest.mark.parametrize("gen_seed", [random.Random(i).getrandbits(64) for i in range(100)])
    def test_order_6_always_latin(self, gen_seed):
        qg = generate_table(6, gen_seed)
        validate_table(qg.to_lists())

    @pytest.mark.parametrize("order", [2, 3, 7, 16, 100, 255, 256])
    def test_orders_are_latin(self, order):
        for gen_seed in range(5):
            assert is_latin(generate_table(order, gen_seed).to_lists())

    def test_deterministic(self):
        assert generate_table(256, 99) == generate_table(256, 99)

    def test_seed_changes_table(self):
        a = generate_table(256, 0x2A).to_lists()
        b = generate_table(256, 0x2B).to_lists()
        assert sum(x != y for ra, rb in zip(a, b) for x, y in zip(ra, rb)) > 0

    def test_fixture_table_is_pinned(self, table256):
        import hashlib

        digest = hashlib.sha256(dumps_table_binary(table256)).hexdigest()
        assert digest == "b217be950abbaadc5452a1ed8e48342703e0e235f28a6e4261f02bb8f2ff30b0"

    @pytest.mark.parametrize("order", [0, 1, 257, 300])
    def test_bad_order(self, order):
        with pytest.raises(OrderOutOfRangeError):
            generate_table(order, 0)


class TestInvert:
    def test_example_inverse(self):
        assert invert_table(validate_table(TABLE_I)).to_lists() == TABLE_II

    def test_order_two(self):
        cyclic = validate_table([[0, 1], [1, 0]])
        assert invert_table(cyclic).to_lists() == [[0, 1], [1, 0]]

    @pytest.mark.parametrize("order", [2, 5, 9, 16])
    def test_exhaustive_small(self, order):
        qg = generate_table(order, order * 7)
        inv = invert_table(qg)
        for r in range(order):
            for c in range(order):
                assert inv[r, qg[r, c]] == c
                assert qg[r, inv[r, c]] == c

    def test_order_256_all_cells(self, table256, inv256):
        q, v = table256.array, inv256.array
        for r in range(256):
            assert list(v[r][q[r]]) == list(range(256))
            assert list(q[r][v[r]]) == list(range(256))


class TestStream:
    def test_example_encrypt(self):
        qg = validate_table(TABLE_I)
        assert list(stream_encrypt(qg, EXAMPLE_SEED, EXAMPLE_PLAIN)) == EXAMPLE_CIPHER

    def test_example_decrypt(self):
        inv = validate_table(TABLE_II)
        assert list(stream_decrypt(inv, EXAMPLE_SEED, EXAMPLE_CIPHER)) == EXAMPLE_PLAIN

    def test_empty(self, table256, inv256):
        assert stream_encrypt(table256, 5, b"") == b""
        assert stream_decrypt(inv256, 5, b"") == b""

    def test_out_of_range_symbol(self):
        qg = validate_table(TABLE_I)
        with pytest.raises(SymbolOutOfRangeError):
            stream_encrypt(qg, 0, [1, 6])
        with pytest.raises(SymbolOutOfRangeError):
            stream_decrypt(invert_table(qg), 6, [1])

    def test_roundtrip_1000_bytes(self, table256, inv256):
        rnd = random.Random(5)
        msg = bytes(rnd.getrandbits(8) for _ in range(1000))
        assert stream_decrypt(inv256, 77, stream_encrypt(table256, 77, msg)) == msg

    @settings(max_examples=300, deadline=None)
    @given(order=st.integers(2, 256), gen_seed=st.integers(0, 2**64 - 1), data=st.data())
    def test_roundtrip_property(self, order, gen_seed, data):
        qg = generate_table(order, gen_seed)
        seed = data.draw(st.integers(0, order - 1))
        msg = data.draw(st.lists(st.integers(0, order - 1), max_size=200))
        assert list(stream_decrypt(invert_table(qg), seed, stream_encrypt(qg, seed, msg))) == msg

    def test_rows_are_bijections(self, table256):
        # fixed previous symbol p: m -> p . m is one-to-one
        for p in range(256):
            outs = {stream_encrypt(table256, p, [m])[0] for m in range(256)}
            assert len(outs) == 256


class TestSerialization:
    def test_text_roundtrip(self, tmp_path, table256):
        path = tmp_path / "t.qg"
        save_table(table256, path)
        assert path.read_text().startswith("qg 256\n")
        assert load_table(path) == table256

    def test_binary_roundtrip(self, tmp_path, table256):
        path = tmp_path / "t.qgb"
        save_table(table256, path, binary=True)
        raw = path.read_bytes()
        assert raw.startswith(b"qgb 256\n") and len(raw) == 8 + 65536
        assert load_table(path) == table256

    def test_text_layout(self):
        text = dumps_table(validate_table(TABLE_I))
        assert text.splitlines()[0] == "qg 6"
        assert text.splitlines()[1] == "0 2 1 5 3 4"

    @pytest.mark.parametrize("blob", [b"", b"xx 2\n0 1\n1 0\n", b"qg 2\n0 1\n", b"qgb 2\n\x00\x01\x01"])
    def test_malformed(self, blob):
        with pytest.raises(TableFormatError):
            loads_table(blob)

    def test_invalid_square_rejected_on_load(self):
        with pytest.raises(DuplicateInColumnError):
            loads_table("qg 2\n0 1\n0 1\n")
