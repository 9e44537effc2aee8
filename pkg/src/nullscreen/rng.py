"""Seeded xorshift64* generator.

The algorithm is fixed so that sample points can be reproduced in any
language:

    seeding:  state = splitmix64(seed); state = 1 if state == 0
    update:   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27   (mod 2**64)
    output:   x * 0x2545F4914F6CDD1D                        (mod 2**64)
    uniform:  (output >> 11) * 2**-53                      in [0, 1)
    normal:   Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
    spawn:    new generator seeded with state ^ crc32(label)

splitmix64(z): z += 0x9E3779B97F4A7C15; z = (z ^ z >> 30) * 0xBF58476D1CE4E5B9;
z = (z ^ z >> 27) * 0x94D049BB133111EB; return z ^ z >> 31 (all mod 2**64).
"""
from __future__ import annotations

import math
import zlib

import numpy as np

MASK = (1 << 64) - 1
MULT = 0x2545F4914F6CDD1D


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class Xorshift64Star:
    def __init__(self, seed: int = 0):
        if seed < 0:
            raise ValueError("seed must be unsigned")
        self.state = splitmix64(seed & MASK) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        self.state = x
        return (x * MULT) & MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0 ** -53
        return lo + (hi - lo) * u

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, k: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(k)])

    def unit_vector(self, k: int) -> np.ndarray:
        while True:
            v = self.normals(k)
            nrm = np.linalg.norm(v)
            if nrm > 1e-8:
                return v / nrm

    def spawn(self, label: str) -> "Xorshift64Star":
        child = Xorshift64Star.__new__(Xorshift64Star)
        child.state = splitmix64(self.state ^ zlib.crc32(label.encode())) or 1
        return child
