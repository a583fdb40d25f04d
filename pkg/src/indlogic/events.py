"""Bit-vector events over a finite outcome universe.

Outcome ``i`` of a universe of size ``n`` corresponds to bit ``i`` of
:attr:`Event.bits`.  Events print as hexadecimal strings with the most
significant outcome first, e.g. ``{0, 3}`` over four outcomes is ``"9"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Event:
    """A subset of ``{0, ..., size-1}`` stored as an integer bit mask."""

    size: int
    bits: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("event universe size must be nonnegative")
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError(f"bits {self.bits:#x} exceed universe of size {self.size}")

    @classmethod
    def empty(cls, size: int) -> "Event":
        return cls(size, 0)

    @classmethod
    def full(cls, size: int) -> "Event":
        return cls(size, (1 << size) - 1)

    @classmethod
    def of(cls, size: int, members: Iterable[int]) -> "Event":
        bits = 0
        for i in members:
            if not 0 <= i < size:
                raise ValueError(f"outcome {i} outside universe of size {size}")
            bits |= 1 << i
        return cls(size, bits)

    @classmethod
    def from_hex(cls, size: int, text: str) -> "Event":
        return cls(size, int(text, 16))

    def _check(self, other: "Event") -> None:
        if self.size != other.size:
            raise ValueError("events live on different universes")

    def __and__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.size, self.bits & other.bits)

    def __or__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.size, self.bits | other.bits)

    def __sub__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.size, self.bits & ~other.bits)

    def __xor__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.size, self.bits ^ other.bits)

    def __invert__(self) -> "Event":
        return Event(self.size, ((1 << self.size) - 1) ^ self.bits)

    def __le__(self, other: "Event") -> bool:  # subset
        self._check(other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other: "Event") -> bool:
        return other <= self

    def issubset(self, other: "Event") -> bool:
        return self <= other

    def isdisjoint(self, other: "Event") -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.size and bool(self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(members(self.bits))

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def hex(self) -> str:
        width = max(1, (self.size + 3) // 4)
        return format(self.bits, f"0{width}x")

    def __repr__(self) -> str:
        return f"Event({{{', '.join(map(str, self))}}} / {self.size})"


def members(bits: int) -> list[int]:
    """Indices of the set bits of ``bits`` in increasing order."""
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def full_mask(size: int) -> int:
    return (1 << size) - 1
