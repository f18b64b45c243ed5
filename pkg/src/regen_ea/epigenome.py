"""Epigenetic tags, the marking function and the growing (decoding) function.

An epigenotype is an ``int16`` array with the same shape as the genotype it
annotates.  ``NO_TAG`` (-1) marks an untagged allele; any other entry is the
tag byte ``op << 5 | size_code``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._accel import njit
from .genome import BitsLike, as_bits

NO_TAG = -1
TAG_BITS = 8


class TagOp(enum.IntEnum):
    CIRCULAR_SHIFT = 0b000
    TRANSPOSE = 0b001
    SET_TO = 0b010
    DO_NOTHING = 0b011
    RIGHT_SHIFT_BY_ONE = 0b100
    ADD_ONE = 0b101
    LEFT_SHIFT_BY_ONE = 0b110
    SUBTRACT_ONE = 0b111


def gene_size(size_code: int) -> int:
    """Number of alleles covered by a 5-bit size code; ``00000`` means 32."""
    if not 0 <= size_code < 32:
        raise ValueError(f"size code must fit in 5 bits, got {size_code}")
    return size_code or 32


@dataclass(frozen=True)
class Tag:
    op: TagOp
    size_code: int

    def __post_init__(self):
        object.__setattr__(self, "op", TagOp(self.op))
        if not 0 <= self.size_code < 32:
            raise ValueError(f"size code must fit in 5 bits, got {self.size_code}")

    @property
    def gene_size(self) -> int:
        return gene_size(self.size_code)

    @property
    def byte(self) -> int:
        return (int(self.op) << 5) | self.size_code

    @classmethod
    def from_byte(cls, value: int) -> "Tag":
        if not 0 <= value < 256:
            raise ValueError(f"tag byte out of range: {value}")
        return cls(TagOp(value >> 5), value & 0b11111)

    @classmethod
    def from_bits(cls, text: str) -> "Tag":
        if len(text) != TAG_BITS or set(text) - {"0", "1"}:
            raise ValueError(f"a tag is exactly 8 binary digits, got {text!r}")
        return cls.from_byte(int(text, 2))

    def to_bits(self) -> str:
        return format(self.byte, "08b")

    def __str__(self) -> str:
        return self.to_bits()


@dataclass(frozen=True)
class MarkingParams:
    mark_rate: float = 0.02
    p_add: float = 0.35
    p_remove: float = 0.35
    p_modify: float = 0.30

    def __post_init__(self):
        for name in ("mark_rate", "p_add", "p_remove", "p_modify"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")
        if abs(self.p_add + self.p_remove + self.p_modify - 1.0) > 1e-12:
            raise ValueError("p_add + p_remove + p_modify must equal 1")


def empty_epigenotype(length: int) -> np.ndarray:
    return np.full(length, NO_TAG, dtype=np.int16)


def epigenotype_from_tags(length: int, tags: dict[int, Tag | str | int]) -> np.ndarray:
    """Build an epigenotype from ``{position: tag}`` (0-based positions)."""
    epi = empty_epigenotype(length)
    for pos, tag in tags.items():
        if isinstance(tag, str):
            tag = Tag.from_bits(tag)
        epi[pos] = tag.byte if isinstance(tag, Tag) else Tag.from_byte(int(tag)).byte
    return epi


def tags_of(epi: np.ndarray) -> dict[int, Tag]:
    epi = np.asarray(epi)
    return {int(k): Tag.from_byte(int(epi[k])) for k in np.flatnonzero(epi >= 0)}


def random_tag(rng: np.random.Generator) -> Tag:
    return Tag.from_byte(int(rng.integers(0, 256)))


# --------------------------------------------------------------------------
# bit operations


def apply_op(op: TagOp, window: BitsLike, marked_bit: int | None = None) -> np.ndarray:
    """Transform one tag window; returns a new array of the same length."""
    x = as_bits(window)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("window must be a non-empty 1-D bit string")
    if x.size > 32:
        raise ValueError("a tag covers at most 32 alleles")
    if marked_bit is not None and int(marked_bit) != int(x[0]):
        raise ValueError("marked bit must be the first bit of the window")
    out = np.empty_like(x)
    _apply_window_numpy(int(op), x, out)
    return out


def _apply_window_numpy(op: int, x: np.ndarray, out: np.ndarray) -> None:
    n = x.size
    if op == TagOp.CIRCULAR_SHIFT:
        out[:] = np.roll(x, 1)
    elif op == TagOp.TRANSPOSE:
        out[:] = x[::-1]
    elif op == TagOp.SET_TO:
        out[:] = x[0]
    elif op == TagOp.DO_NOTHING:
        out[:] = x
    elif op == TagOp.RIGHT_SHIFT_BY_ONE:
        out[0] = x[0]
        out[1:] = x[:-1]
    elif op == TagOp.LEFT_SHIFT_BY_ONE:
        out[:-1] = x[1:]
        out[-1] = 0
    else:
        value = 0
        for bit in x:
            value = (value << 1) | int(bit)
        if op == TagOp.ADD_ONE:
            value += 1
            if value >> n:
                # carry out of the window: keep the top n bits of the n+1 bit sum
                value >>= 1
        else:
            value = (value - 1) % (1 << n)
        for i in range(n):
            out[n - 1 - i] = (value >> i) & 1


def _grow_rows_py(geno, epi, out):
    rows, length = geno.shape
    for r in range(rows):
        k = 0
        while k < length:
            tag = epi[r, k]
            if tag < 0:
                out[r, k] = geno[r, k]
                k += 1
                continue
            op = tag >> 5
            size = tag & 31
            if size == 0:
                size = 32
            end = min(k + size, length)
            n = end - k
            if op == 0:
                out[r, k] = geno[r, end - 1]
                for i in range(1, n):
                    out[r, k + i] = geno[r, k + i - 1]
            elif op == 1:
                for i in range(n):
                    out[r, k + i] = geno[r, end - 1 - i]
            elif op == 2:
                for i in range(n):
                    out[r, k + i] = geno[r, k]
            elif op == 3:
                for i in range(n):
                    out[r, k + i] = geno[r, k + i]
            elif op == 4:
                out[r, k] = geno[r, k]
                for i in range(1, n):
                    out[r, k + i] = geno[r, k + i - 1]
            elif op == 6:
                for i in range(n - 1):
                    out[r, k + i] = geno[r, k + i + 1]
                out[r, end - 1] = 0
            else:
                value = np.int64(0)
                for i in range(n):
                    value = (value << 1) | np.int64(geno[r, k + i])
                if op == 5:
                    value += 1
                    if value >> n:
                        value >>= 1
                else:
                    value = (value - 1) & ((np.int64(1) << n) - 1)
                for i in range(n):
                    out[r, end - 1 - i] = (value >> i) & 1
            k = end


_grow_rows_jit = njit(_grow_rows_py)


def _grow_rows_numpy(geno: np.ndarray, epi: np.ndarray, out: np.ndarray) -> None:
    out[...] = geno
    length = geno.shape[1]
    rows, cols = np.nonzero(epi >= 0)
    if rows.size == 0:
        return
    starts = np.searchsorted(rows, np.arange(geno.shape[0] + 1))
    for r in np.unique(rows):
        row_geno = geno[r]
        free_from = 0
        for k in cols[starts[r]:starts[r + 1]]:
            if k < free_from:
                continue
            tag = int(epi[r, k])
            end = min(k + gene_size(tag & 31), length)
            _apply_window_numpy(tag >> 5, row_geno[k:end], out[r, k:end])
            free_from = end


def grow_population(geno: np.ndarray, epi: np.ndarray) -> np.ndarray:
    """Decode every row of an ``(N, L)`` genotype matrix under its epigenotype."""
    geno = np.ascontiguousarray(geno, dtype=np.uint8)
    epi = np.ascontiguousarray(epi, dtype=np.int16)
    if geno.shape != epi.shape or geno.ndim != 2:
        raise ValueError(f"genotype {geno.shape} and epigenotype {epi.shape} must match")
    out = np.empty_like(geno)
    if _grow_rows_jit is not None:
        _grow_rows_jit(geno, epi, out)
    else:
        _grow_rows_numpy(geno, epi, out)
    return out


def grow(genotype: BitsLike, epi: np.ndarray) -> np.ndarray:
    """Phenotype bit string of one chromosome; inputs are left untouched."""
    geno = as_bits(genotype)
    epi = np.asarray(epi, dtype=np.int16)
    if geno.ndim != 1 or geno.shape != epi.shape:
        raise ValueError(f"genotype length {geno.size} != epigenotype length {epi.size}")
    return grow_population(geno[None, :], epi[None, :])[0]


# --------------------------------------------------------------------------
# marking

_BIT_WEIGHTS = np.array([128, 64, 32, 16, 8, 4, 2, 1], dtype=np.int16)


def mark(epi: np.ndarray, params: MarkingParams, rng: np.random.Generator) -> np.ndarray:
    """Return a marked copy of ``epi`` (any shape; the last axis is the chromosome).

    Each allele independently fires with probability ``mark_rate``; a firing
    allele draws exactly one of add / remove / modify.  Add only writes an empty
    slot, remove and modify only touch occupied slots.
    """
    out = np.array(epi, dtype=np.int16, copy=True)
    flat = out.reshape(-1)
    hits = np.flatnonzero(rng.random(flat.size) < params.mark_rate)
    m = hits.size
    action = rng.random(m)
    new_tags = rng.integers(0, 256, m).astype(np.int16)
    flips = (rng.random((m, TAG_BITS)) < 1.0 / TAG_BITS) @ _BIT_WEIGHTS
    if m == 0:
        return out
    current = flat[hits]
    occupied = current >= 0
    add = (action < params.p_add) & ~occupied
    remove = (action >= params.p_add) & (action < params.p_add + params.p_remove) & occupied
    modify = (action >= params.p_add + params.p_remove) & occupied
    current = np.where(add, new_tags, current)
    current = np.where(remove, NO_TAG, current)
    current = np.where(modify, current ^ flips, current)
    flat[hits] = current
    return out
