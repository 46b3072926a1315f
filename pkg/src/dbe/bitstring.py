"""Fixed-length bit strings (session keys, SKE keys and ciphertexts)."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedEncoding


@dataclass(frozen=True)
class BitString:
    value: int
    nbits: int

    def __post_init__(self):
        if self.nbits < 1:
            raise ValueError("nbits must be positive")
        if not 0 <= self.value < (1 << self.nbits):
            raise ValueError(f"value does not fit in {self.nbits} bits")

    def __xor__(self, other: BitString) -> BitString:
        if self.nbits != other.nbits:
            raise ValueError("length mismatch")
        return BitString(self.value ^ other.value, self.nbits)

    def __len__(self) -> int:
        return self.nbits

    @property
    def byte_length(self) -> int:
        return (self.nbits + 7) // 8

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(self.byte_length, "big")

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int) -> BitString:
        if len(data) != (nbits + 7) // 8:
            raise MalformedEncoding(f"expected {(nbits + 7) // 8} bytes for {nbits} bits")
        value = int.from_bytes(data, "big")
        if value >> nbits:
            raise MalformedEncoding("padding bits must be zero")
        return cls(value, nbits)

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __str__(self) -> str:
        return format(self.value, f"0{self.nbits}b")
