"""Exact integer convolution on the additive group of {polys of degree < n}
over F_q, i.e. (Z/p)^(e*n).

Indices are the usual poly encodings (base q, which for our element encoding
is the same as base p with e*n digits).  Convolutions are exact: either the
naive O(|G|^2) double loop, or a multidimensional radix-p NTT carried out
modulo two >= 2^62 primes congruent to 1 mod p and recombined by CRT.
The NTT route equals the naive route bit-for-bit; the naive route doubles
as the oracle in tests.
"""

from __future__ import annotations

import os
from functools import lru_cache

from .errors import TooLarge
from .gf import FieldCtx, is_prime_int

NAIVE_LIMIT = 1 << 10


def group_cap_bits(default: int = 26) -> int:
    env = os.environ.get("CUBESFF_CAP_BITS")
    return int(env) if env else default


class CoeffGroup:
    """(F_q)^n under addition, elements indexed by encodings in [0, q^n)."""

    def __init__(self, ctx: FieldCtx, n: int, cap_bits: int | None = None):
        cap = 1 << (cap_bits if cap_bits is not None else group_cap_bits())
        self.ctx = ctx
        self.n = n
        self.size = ctx.q**n
        if self.size > cap:
            raise TooLarge(f"group size q^n = {self.size} exceeds cap {cap}")
        self.ndigits = ctx.e * n  # F_p digits per index

    def add(self, i: int, j: int) -> int:
        p = self.ctx.p
        if p == 2:
            return i ^ j
        out, mult = 0, 1
        for _ in range(self.ndigits):
            out += (i % p + j % p) % p * mult
            i //= p
            j //= p
            mult *= p
        return out

    def neg(self, i: int) -> int:
        p = self.ctx.p
        if p == 2:
            return i
        out, mult = 0, 1
        for _ in range(self.ndigits):
            out += (-i % p) * mult
            i //= p
            mult *= p
        return out

    def negate_vector(self, h: list[int]) -> list[int]:
        out = [0] * self.size
        for i, c in enumerate(h):
            if c:
                out[self.neg(i)] = c
        return out


@lru_cache(maxsize=None)
def ntt_primes(p: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two smallest primes == 1 mod p above 2^62, each with an element
    of multiplicative order p."""
    found = []
    n = (1 << 62) + 1
    n += (-(n - 1)) % p  # first candidate == 1 mod p
    while len(found) < 2:
        if is_prime_int(n):
            omega = None
            for g in range(2, 1000):
                w = pow(g, (n - 1) // p, n)
                if w != 1:
                    omega = w
                    break
            assert omega is not None
            found.append((n, omega))
        n += p
    return found[0], found[1]


def _dft_inplace(vec: list[int], p: int, ndigits: int, omega: int, mod: int) -> None:
    """Multidimensional DFT over (Z/p)^ndigits, one radix-p pass per axis."""
    wtab = [[pow(omega, (j * k) % p, mod) for k in range(p)] for j in range(p)]
    n = len(vec)
    stride = 1
    for _ in range(ndigits):
        block = stride * p
        for start in range(0, n, block):
            for off in range(start, start + stride):
                vals = [vec[off + k * stride] for k in range(p)]
                for j in range(p):
                    row = wtab[j]
                    acc = 0
                    for k in range(p):
                        acc += vals[k] * row[k]
                    vec[off + j * stride] = acc % mod
        stride = block


def convolve_naive(group: CoeffGroup, h1: list[int], h2: list[int]) -> list[int]:
    out = [0] * group.size
    add = group.add
    for i, a in enumerate(h1):
        if a:
            for j, b in enumerate(h2):
                if b:
                    out[add(i, j)] += a * b
    return out


def convolve_ntt(group: CoeffGroup, h1: list[int], h2: list[int]) -> list[int]:
    p = group.ctx.p
    ndig = group.ndigits
    (m1, w1), (m2, w2) = ntt_primes(p)
    mass1 = sum(h1)
    mass2 = sum(h2)
    if mass1 * mass2 >= m1 * m2:
        raise TooLarge("convolution values exceed CRT capacity")  # pragma: no cover
    results = []
    for mod, omega in ((m1, w1), (m2, w2)):
        a = [x % mod for x in h1]
        b = [x % mod for x in h2]
        _dft_inplace(a, p, ndig, omega, mod)
        _dft_inplace(b, p, ndig, omega, mod)
        c = [x * y % mod for x, y in zip(a, b)]
        winv = pow(omega, p - 1, mod)  # omega^{-1}
        _dft_inplace(c, p, ndig, winv, mod)
        ninv = pow(pow(p, ndig, mod), mod - 2, mod)
        results.append([x * ninv % mod for x in c])
    # CRT: value = r1 + m1 * ((r2 - r1) * m1^{-1} mod m2)
    m1_inv = pow(m1, m2 - 2, m2)
    out = []
    for r1, r2 in zip(results[0], results[1]):
        out.append(r1 + m1 * ((r2 - r1) * m1_inv % m2))
    return out


def convolve(group: CoeffGroup, h1: list[int], h2: list[int],
             method: str = "auto") -> list[int]:
    if method == "naive" or (method == "auto" and group.size <= NAIVE_LIMIT
                             and sum(1 for x in h1 if x) * sum(1 for x in h2 if x) <= 1 << 18):
        return convolve_naive(group, h1, h2)
    return convolve_ntt(group, h1, h2)
