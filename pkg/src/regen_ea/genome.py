"""Bit strings and the fixed-point binary <-> real codec.

A bit string is a 1-D ``numpy.uint8`` array of zeros and ones.  Real values
are stored big-endian (leftmost bit most significant) on ``n`` bits per value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

BitsLike = Union[str, Sequence[int], np.ndarray]


def as_bits(bits: BitsLike) -> np.ndarray:
    """Coerce ``'0101'``, a list of ints or an array into a uint8 bit array."""
    if isinstance(bits, str):
        s = bits.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(bits)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit arrays may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


def bits_to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


@dataclass(frozen=True)
class RealInterval:
    """Closed interval ``[a, b]`` discretised on ``n`` bits."""

    a: float
    b: float
    n: int = 32

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval requires a < b, got [{self.a}, {self.b}]")
        if not 1 <= self.n <= 63:
            raise ValueError(f"bits per value must be in [1, 63], got {self.n}")

    @property
    def levels(self) -> int:
        return (1 << self.n) - 1

    @property
    def step(self) -> float:
        return (self.b - self.a) / self.levels


def bits_to_uint(bits: np.ndarray) -> np.ndarray:
    """Big-endian unsigned value of the last axis of ``bits`` (up to 63 bits)."""
    bits = np.asarray(bits)
    n = bits.shape[-1]
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def uint_to_bits(value: int, n: int) -> np.ndarray:
    if not 0 <= value < (1 << n):
        raise ValueError(f"{value} does not fit in {n} bits")
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def decode_real(s: BitsLike, iv: RealInterval) -> float:
    s = as_bits(s)
    if s.shape != (iv.n,):
        raise ValueError(f"expected {iv.n} bits, got {s.size}")
    u = int(bits_to_uint(s))
    return iv.a + u * (iv.b - iv.a) / iv.levels


def encode_real(x: float, iv: RealInterval) -> np.ndarray:
    """Nearest grid point to ``x``; halves round up."""
    if not iv.a <= x <= iv.b:
        raise ValueError(f"{x} lies outside [{iv.a}, {iv.b}]")
    scaled = Fraction(iv.levels) * (Fraction(x) - Fraction(iv.a)) / (Fraction(iv.b) - Fraction(iv.a))
    u = int(scaled + Fraction(1, 2))
    return uint_to_bits(min(u, iv.levels), iv.n)


def decode_vector(s: BitsLike, iv: RealInterval, dimension: int) -> np.ndarray:
    s = as_bits(s)
    if dimension < 1 or s.ndim != 1 or s.size != dimension * iv.n:
        raise ValueError(f"expected {dimension} x {iv.n} bits, got {s.size}")
    return decode_population(s[None, :], iv, dimension)[0]


def decode_population(bits: np.ndarray, iv: RealInterval, dimension: int) -> np.ndarray:
    """Decode an ``(N, dimension * n)`` bit matrix into an ``(N, dimension)`` real matrix."""
    bits = np.asarray(bits)
    u = bits_to_uint(bits.reshape(bits.shape[0], dimension, iv.n)).astype(np.float64)
    return iv.a + u * (iv.b - iv.a) / iv.levels
