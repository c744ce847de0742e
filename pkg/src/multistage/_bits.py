"""Bitmask helpers and a small disjoint-set forest."""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def incidence_matrix(masks: Sequence[int], width: int) -> sparse.csr_matrix:
    """Sets-by-elements 0/1 matrix of ``masks``, built 64 bits at a time."""
    width = max(width, max((m.bit_length() for m in masks), default=0), 1)
    words = -(-width // 64)
    low = (1 << 64) - 1
    arr = np.empty((len(masks), words), dtype=np.uint64)
    for w in range(words):
        arr[:, w] = [(m >> (64 * w)) & low for m in masks]
    dense = np.unpackbits(arr.view(np.uint8), axis=1, bitorder="little")[:, :width]
    return sparse.csr_matrix(dense, dtype=float)


class DSU:
    """Union-find with path halving and union by size."""

    __slots__ = ("parent", "size", "components")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def copy(self) -> "DSU":
        other = DSU.__new__(DSU)
        other.parent = list(self.parent)
        other.size = list(self.size)
        other.components = self.components
        return other
