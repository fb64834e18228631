"""Deterministic pseudo-randomness for reproducible runs.

The generator is xorshift64* : a 64-bit xorshift step followed by a
multiplication with an odd constant,

    x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  out = x * 2685821657736338717

with doubles formed from the top 53 bits of ``out``.  The seed is expanded
through one round of splitmix64 so that small seeds do not start in a weak
state.  The algorithm is pinned here (rather than delegating to a platform
RNG) so that seeded CSV output is byte-identical across runs and machines.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 2685821657736338717


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


class Xorshift64Star:
    """xorshift64* stream with convenience samplers used across the package."""

    def __init__(self, seed: int = 1):
        self._state = _splitmix64(int(seed) & _MASK)
        if self._state == 0:
            self._state = 0x9E3779B97F4A7C15
        self._spare_normal: float | None = None

    def u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * _MULT) & _MASK

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * self.random()

    def normal(self) -> float:
        """Standard normal via Box-Muller (pairs cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = 1.0 - self.random()  # (0, 1]
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, *shape: int) -> np.ndarray:
        n = int(np.prod(shape)) if shape else 1
        out = np.array([self.normal() for _ in range(n)])
        return out.reshape(shape) if shape else out[0]

    def unit_vector(self, dim: int = 3) -> np.ndarray:
        while True:
            v = self.normals(dim)
            n = np.linalg.norm(v)
            if n > 1e-12:
                return v / n

    def ball_point(self, dim: int = 3, radius: float = 1.0) -> np.ndarray:
        """Uniform point in the solid ball."""
        return self.unit_vector(dim) * radius * self.random() ** (1.0 / dim)


# --- quantum-flavoured samplers ------------------------------------------

def random_state_bloch(rng: Xorshift64Star, pure: bool = False) -> np.ndarray:
    """Random qubit state as a Bloch 4-vector (1, x, y, z)."""
    r = rng.unit_vector(3) if pure else rng.ball_point(3)
    return np.concatenate(([1.0], r))

def random_effect_bloch(rng: Xorshift64Star) -> np.ndarray:
    """Random valid effect as a Bloch 4-vector (a0, alpha)."""
    a0 = rng.uniform(0.0, 2.0)
    radius = rng.random() * min(a0, 2.0 - a0)
    return np.concatenate(([a0], rng.unit_vector(3) * radius))

def random_hermitian(rng: Xorshift64Star, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.normals(dim, dim) + 1j * rng.normals(dim, dim)
    return scale * 0.5 * (g + g.conj().T)

def haar_unitary(rng: Xorshift64Star, dim: int = 2) -> np.ndarray:
    """Haar-random unitary from the QR of a Ginibre matrix (phases fixed)."""
    g = (rng.normals(dim, dim) + 1j * rng.normals(dim, dim)) / math.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))

def haar_basis(rng: Xorshift64Star) -> tuple[np.ndarray, np.ndarray]:
    """Haar-random orthonormal qubit basis (two column vectors)."""
    u = haar_unitary(rng, 2)
    return u[:, 0], u[:, 1]
