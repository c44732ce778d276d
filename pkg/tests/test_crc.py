"""Tests for the 5-bit CRC and the frame structure."""

import numpy as np
import pytest

from srbc.crc import (
    CRC_BITS,
    GEN2_PRESET,
    Frame,
    crc5_check,
    crc5_check_many,
    crc5_encode,
    crc5_encode_many,
    retransmission_probability,
)
from srbc.harness import SystemConfig

# independently computed by long division of x^5 + x^3 + 1 into the
# payload polynomial (MSB first), for both register presets
KNOWN_CHECKSUMS = {
    0: {
        "0000000": "00000",
        "1000000": "01111",
        "0000001": "01001",
        "1111111": "01101",
        "1010101": "10110",
        "0110010": "11100",
    },
    GEN2_PRESET: {
        "0000000": "11110",
        "1000000": "10001",
        "0000001": "10111",
        "1111111": "10011",
        "1010101": "01000",
        "0110010": "00010",
    },
}


def bits_of(text):
    return np.array([int(c) for c in text], dtype=np.int8)


def test_known_checksums():
    for preset, table in KNOWN_CHECKSUMS.items():
        for payload, crc in table.items():
            frame = crc5_encode(bits_of(payload), preset=preset)
            got = "".join(str(b) for b in frame.crc)
            assert got == crc, (preset, payload, got)


def test_check_accepts_every_encoded_frame():
    for preset in (0, GEN2_PRESET):
        for value in range(128):
            payload = bits_of(format(value, "07b"))
            frame = crc5_encode(payload, preset=preset)
            assert crc5_check(frame, preset=preset)
            assert frame.bits.shape == (12,)


def test_single_bit_errors_always_detected():
    for value in range(128):
        frame = crc5_encode(bits_of(format(value, "07b")))
        clean = frame.bits
        for position in range(12):
            corrupted = clean.copy()
            corrupted[position] ^= 1
            assert not crc5_check_many(corrupted[None, :])[0], (value, position)


def test_burst_errors_up_to_generator_degree_detected():
    # every contiguous error pattern of length <= 5 whose end bits are
    # set must change the remainder
    rng = np.random.default_rng(139)
    payloads = rng.integers(0, 2, size=(40, 7), dtype=np.int8)
    frames = crc5_encode_many(payloads)
    for length in range(1, 6):
        if length <= 2:
            patterns = [np.ones(length, dtype=np.int8)]
        else:
            patterns = []
            for interior in range(2 ** (length - 2)):
                mid = [int(c) for c in format(interior, f"0{length - 2}b")]
                patterns.append(np.array([1, *mid, 1], dtype=np.int8))
        for start in range(12 - length + 1):
            for pattern in patterns:
                corrupted = frames.copy()
                corrupted[:, start:start + length] ^= pattern
                assert not crc5_check_many(corrupted).any(), (length, start)


def test_checksum_is_linear_over_gf2():
    rng = np.random.default_rng(149)
    for _ in range(50):
        a = rng.integers(0, 2, size=7, dtype=np.int8)
        b = rng.integers(0, 2, size=7, dtype=np.int8)
        crc_a = crc5_encode(a).crc
        crc_b = crc5_encode(b).crc
        crc_xor = crc5_encode(a ^ b).crc
        assert np.array_equal(crc_xor, crc_a ^ crc_b)


def test_frame_validation_and_formatting():
    frame = crc5_encode(bits_of("1010101"))
    assert frame.bitstring() == "101010110110"
    assert frame.bits.tolist() == [1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0]
    assert CRC_BITS == 5
    with pytest.raises(ValueError):
        Frame(np.zeros(0, dtype=np.int8), np.zeros(5, dtype=np.int8))
    with pytest.raises(ValueError):
        Frame(np.zeros(7, dtype=np.int8), np.zeros(4, dtype=np.int8))
    with pytest.raises(ValueError):
        Frame(np.zeros(7, dtype=np.int8), np.full(5, 2, dtype=np.int8))


def test_check_many_validates_shape():
    # rows must carry at least one payload bit ahead of the check bits
    with pytest.raises(ValueError):
        crc5_check_many(np.zeros((4, 5), dtype=np.int8))
    with pytest.raises(ValueError):
        crc5_check_many(np.zeros(12, dtype=np.int8))
    # a shorter payload is still a legal frame
    short = crc5_encode(np.array([1], dtype=np.int8))
    assert crc5_check_many(short.bits[None, :])[0]


def test_retransmission_probability_wiring():
    cfg = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.0, snr_db=(10.0,),
                       trials=512, seed=151)
    rng = np.random.default_rng(151)
    p = retransmission_probability(cfg, 256, rng)
    assert 0.85 <= p <= 1.0  # a silent tag almost always forces a resend
    again = retransmission_probability(cfg, 256, np.random.default_rng(151))
    assert p == again
    multi = cfg.replace(snr_db=(0.0, 10.0))
    with pytest.raises(ValueError):
        retransmission_probability(multi, 64, rng)
