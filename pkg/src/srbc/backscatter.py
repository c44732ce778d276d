"""Backscatter tag model: load reflection and bit-keyed tone waveforms.

A tag conveys one bit per OFDM symbol by multiplying the incident signal
with a unit-modulus complex tone whose integer frequency moves primary
energy from data bins onto scheme-specific null bins.  OOK keys the
reflection on and off, the FSK variants select between two tones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import ConfigurationError, TimeSignal


@dataclass(frozen=True)
class ReflectionCoefficient:
    """Polar form of the tag's complex reflection coefficient."""

    magnitude: float
    phase: float

    @property
    def value(self) -> complex:
        return self.magnitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class BdWaveform:
    """One symbol period of the tag's multiplicative waveform.

    ``samples`` covers the symbol body; ``shift`` is the integer number
    of bins the tone moves the incident spectrum, or None when the tag
    does not reflect (OOK bit 0).
    """

    samples: np.ndarray
    scheme: str
    bit: int
    shift: int | None


def reflection_coefficient(z_load: complex, z_antenna: complex) -> ReflectionCoefficient:
    """Reflection coefficient (z_load - conj(z_antenna)) / (z_load - z_antenna).

    A conjugate-matched load (z_load == conj(z_antenna)) gives zero
    reflection; purely reactive mismatches reflect at unit magnitude.
    """
    z_load = complex(z_load)
    z_antenna = complex(z_antenna)
    den = z_load - z_antenna
    if den == 0:
        raise ValueError("z_load equals z_antenna; reflection coefficient is singular")
    value = (z_load - z_antenna.conjugate()) / den
    return ReflectionCoefficient(abs(value), float(np.angle(value)))


def _tone(shift: int, n: int) -> np.ndarray:
    return np.exp(2j * np.pi * shift * np.arange(n) / n)


def bd_waveform(scheme: str, bit: int, zeta: int, n: int) -> BdWaveform:
    """Tag waveform for one bit: a tone of integer frequency, or silence.

    OOK reflects the tone of frequency ``zeta`` for bit 1 and nothing
    for bit 0.  FSK1 shifts down one bin for bit 0 and up one for bit 1.
    FSK2 always reflects, shifting by one bin for bit 0 and two for
    bit 1 (its plan spaces data bins ``zeta``+1 apart so both landings
    stay on nulls).
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    if scheme == "ook":
        shift = zeta if bit else None
    elif scheme == "fsk1":
        shift = 1 if bit else -1
    elif scheme == "fsk2":
        shift = 2 if bit else 1
    else:
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    if shift is None:
        samples = np.zeros(n, dtype=np.complex128)
    else:
        samples = _tone(shift, n)
    return BdWaveform(samples, scheme, bit, shift)


def apply_backscatter(sig: TimeSignal, wave: BdWaveform,
                      gamma: ReflectionCoefficient | complex) -> TimeSignal:
    """Multiply a signal by the scaled tag waveform, sample by sample.

    The tag waveform is defined over the symbol body; across the cyclic
    prefix it is extended cyclically (integer tones are n-periodic, so
    the prefix sees the tail of the body waveform).
    """
    if len(wave.samples) != sig.n:
        raise ValueError(f"waveform length {len(wave.samples)} != body length {sig.n}")
    value = gamma.value if isinstance(gamma, ReflectionCoefficient) else complex(gamma)
    if wave.shift is None:
        full = np.zeros(sig.n + sig.cp_len, dtype=np.complex128)
    elif sig.cp_len:
        full = np.concatenate([wave.samples[sig.n - sig.cp_len:], wave.samples])
    else:
        full = wave.samples
    return TimeSignal(sig.samples * (value * full), sig.cp_len)
