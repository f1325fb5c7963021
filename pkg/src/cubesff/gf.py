"""Finite fields F_{p^e} with full discrete-log tables, cubic characters,
trace/norm maps, and exact arithmetic in Z[omega].

Field elements are plain ints in [0, q).  The base-p digits of the int are
the coordinates of the element with respect to the power basis
1, t, ..., t^{e-1} of F_p[t]/(modulus).  All multiplicative structure goes
through exp/log tables built from a fixed generator, so fields are capped
at q <= 2**24.

Everything that must stay exact (real parts of cubed Gauss sums, Jacobi
sums) is carried in Z[omega] with unbounded ints; complex floats appear
only in the Gauss-sum diagnostics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import CharIsThree, NoCubicCharacter, NotASubfield, NotPrime, TooLarge

LOG_TABLE_CAP = 1 << 24


def is_prime_int(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any table cap."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # Sufficient witness set for n < 3.3e24.
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (inputs stay below 2**24-ish)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over F_p, used only while constructing a field ------


def _fp_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    # reduce by the monic mod
    dm = len(mod) - 1
    while len(res) - 1 >= dm and res:
        lead = res[-1]
        if lead:
            shift = len(res) - 1 - dm
            for j, mj in enumerate(mod):
                res[shift + j] = (res[shift + j] - lead * mj) % p
        res.pop()
    return _fp_trim(res)


def _fp_powmod(a: list[int], n: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = list(a)
    while n:
        if n & 1:
            result = _fp_mulmod(result, base, mod, p)
        base = _fp_mulmod(base, base, mod, p)
        n >>= 1
    return result


def _fp_irreducible(mod: list[int], p: int) -> bool:
    """Rabin test: x^{p^e} == x mod f and gcd(x^{p^{e/l}} - x, f) = 1."""
    e = len(mod) - 1
    if e <= 0:
        return False
    x = [0, 1]
    if _fp_powmod(x, p**e, mod, p) != _fp_trim(x[:]):
        return False
    for ell in prime_factors(e):
        h = _fp_powmod(x, p ** (e // ell), mod, p)
        # gcd(h - x, mod) must be 1
        diff = [0] * max(len(h), 2)
        for i, c in enumerate(h):
            diff[i] = c
        diff[1] = (diff[1] - 1) % p
        g = _fp_gcd(diff, list(mod), p)
        if len(g) != 1:
            return False
    return True


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _fp_trim(list(a)), _fp_trim(list(b))
    while b:
        a, b = b, _fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _fp_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _fp_trim(list(a))
    if not b:
        raise ZeroDivisionError
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] = (a[shift + j] - c * bj) % p
        _fp_trim(a)
    return q, a


# -- the field context ------------------------------------------------------


class FieldCtx:
    """F_{p^e} with exp/log tables relative to a pinned generator.

    The modulus is the lexicographically least monic irreducible of degree e
    over F_p (coefficients compared from t^{e-1} down), the generator the
    element of least encoding with full multiplicative order.  Instances are
    immutable after construction and safe to share across threads.
    """

    def __init__(self, p: int, e: int, seed: int | None = None):
        if not is_prime_int(p):
            raise NotPrime(f"p = {p} is not prime")
        if p == 3:
            raise CharIsThree("characteristic 3 is out of scope")
        if e < 1:
            raise TooLarge(f"extension degree must be >= 1, got {e}")
        q = p**e
        if q > LOG_TABLE_CAP:
            raise TooLarge(f"q = {q} exceeds the log-table cap {LOG_TABLE_CAP}")
        self.p = p
        self.e = e
        self.q = q
        self.seed = seed  # recorded; modulus/generator choice is deterministic
        self.modulus = self._least_irreducible()
        self._build_tables()

    def _least_irreducible(self) -> tuple[int, ...]:
        p, e = self.p, self.e
        if e == 1:
            return (0, 1)  # the polynomial t
        for enc in range(p**e):
            cand = [0] * (e + 1)
            v = enc
            for i in range(e):
                cand[i] = v % p
                v //= p
            cand[e] = 1
            if _fp_irreducible(cand, p):
                return tuple(cand)
        raise AssertionError("no irreducible polynomial found")  # unreachable

    def _mul_raw(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        da = self.coeffs(a)
        db = self.coeffs(b)
        prod = _fp_mulmod(list(da), list(db), list(self.modulus), p)
        return self.from_coeffs(prod)

    def _build_tables(self):
        q = self.q
        if q == 2:
            self.gen = 1
            self.exp = [1]
            self.log = [None, 0]
            return
        factors = prime_factors(q - 1)
        gen = None
        for g in range(2, q):
            if all(self._pow_raw(g, (q - 1) // ell) != 1 for ell in factors):
                gen = g
                break
        assert gen is not None
        exp = [0] * (q - 1)
        log: list[int | None] = [None] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, gen)
        assert x == 1
        self.gen = gen
        self.exp = exp
        self.log = log

    def _pow_raw(self, a: int, n: int) -> int:
        result = 1
        while n:
            if n & 1:
                result = self._mul_raw(result, a)
            a = self._mul_raw(a, a)
            n >>= 1
        return result

    # -- element encoding ----------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        """Base-p digit vector of x (coordinates in the power basis)."""
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def from_coeffs(self, c) -> int:
        x = 0
        for d in reversed(list(c)):
            x = x * self.p + d
        return x

    # -- arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        x, out, mult = 0, 0, 1
        for _ in range(self.e):
            out += (a % p + b % p) % p * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if p == 2:
            return a
        out, mult = 0, 1
        for _ in range(self.e):
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[-self.log[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError
            return 0
        return self.exp[(self.log[a] * n) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def is_cube(self, a: int) -> bool:
        """Whether a is a nonzero cube in F_q."""
        if a == 0:
            return False
        if self.q % 3 != 1:
            return True  # cubing is a bijection
        return self.log[a] % 3 == 0

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e})"

    # identity-based hashing is fine: contexts are interned via field_build


@lru_cache(maxsize=None)
def field_build(p: int, e: int, seed: int | None = None) -> FieldCtx:
    """Construct (and intern) the field F_{p^e}; deterministic in (p, e, seed)."""
    return FieldCtx(p, e, seed)


def trace_to_prime(ctx: FieldCtx, x: int) -> int:
    """Tr_{F_q/F_p}(x) = x + x^p + ... + x^{p^{e-1}}, as an element of F_p."""
    acc = 0
    y = x
    for _ in range(ctx.e):
        acc = ctx.add(acc, y)
        y = ctx.pow(y, ctx.p)
    assert acc < ctx.p
    return acc


# -- subfield embeddings and norms ------------------------------------------


class Embedding:
    """A fixed field embedding small -> big, invertible on its image."""

    def __init__(self, small: FieldCtx, big: FieldCtx):
        if big.p != small.p or big.e % small.e != 0:
            raise NotASubfield(f"{small} does not embed in {big}")
        self.small = small
        self.big = big
        root = None
        # smallest root (by encoding) of the small modulus inside big
        for x in big.elements():
            acc = 0
            for c in reversed(small.modulus):
                acc = big.add(big.mul(acc, x), c % big.p)
            if acc == 0:
                root = x
                break
        if root is None:
            raise NotASubfield("modulus has no root in the big field")
        self.root = root
        self._fwd: dict[int, int] = {}
        self._bwd: dict[int, int] = {}
        for y in small.elements():
            img = 0
            for c in reversed(small.coeffs(y)):
                img = big.add(big.mul(img, root), c)
            self._fwd[y] = img
            self._bwd[img] = y

    def apply(self, y: int) -> int:
        return self._fwd[y]

    def invert(self, x: int) -> int:
        if x not in self._bwd:
            raise NotASubfield("element is not in the embedded subfield")
        return self._bwd[x]


def norm_to_subfield(ctx_big: FieldCtx, ctx_small: FieldCtx, x: int,
                     emb: Embedding | None = None) -> int:
    """N(x) = x^{(m-1)/(m0-1)} pulled back to the small field."""
    m, m0 = ctx_big.q, ctx_small.q
    d = 0
    mm = m0
    while mm < m:
        mm *= m0
        d += 1
    if mm != m:
        raise NotASubfield(f"{m} is not a power of {m0}")
    if emb is None:
        emb = embedding(ctx_small, ctx_big)
    y = ctx_big.pow(x, (m - 1) // (m0 - 1)) if x else 0
    return emb.invert(y)


@lru_cache(maxsize=None)
def embedding(small: FieldCtx, big: FieldCtx) -> Embedding:
    return Embedding(small, big)


# -- Z[omega] ----------------------------------------------------------------


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*omega with omega^2 + omega + 1 = 0, exact integer components."""

    a: int
    b: int

    def __add__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other: "EisensteinInt") -> "EisensteinInt":
        a, b, c, d = self.a, self.b, other.a, other.b
        return EisensteinInt(a * c - b * d, a * d + b * c - b * d)

    def __pow__(self, n: int) -> "EisensteinInt":
        if n < 0:
            raise ValueError("negative powers leave Z[omega]")
        result = EisensteinInt(1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "EisensteinInt":
        return EisensteinInt(self.a - self.b, -self.b)

    def two_re(self) -> int:
        """2*Re, always an integer: 2a - b."""
        return 2 * self.a - self.b

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def to_complex(self) -> complex:
        return self.a + self.b * OMEGA_C

    def __repr__(self):
        return f"EisensteinInt({self.a}, {self.b})"


OMEGA = EisensteinInt(0, 1)
OMEGA_C = cmath.exp(2j * math.pi / 3)
EISEN_ONE = EisensteinInt(1, 0)
EISEN_ZERO = EisensteinInt(0, 0)
_OMEGA_POW = (EISEN_ONE, OMEGA, EisensteinInt(-1, -1))


class CubicCharacter:
    """The cubic character with chi(gen) = omega; chi(0) = 0.

    The conjugate choice (omega vs omega^2) flips chi and chibar; every
    downstream quantity used here is insensitive to that flip.
    """

    def __init__(self, ctx: FieldCtx):
        if ctx.q % 3 != 1:
            raise NoCubicCharacter(f"q = {ctx.q} is not 1 mod 3")
        self.ctx = ctx

    def __call__(self, x: int) -> EisensteinInt:
        if x == 0:
            return EISEN_ZERO
        return _OMEGA_POW[self.ctx.log[x] % 3]

    def conj_value(self, x: int) -> EisensteinInt:
        if x == 0:
            return EISEN_ZERO
        return _OMEGA_POW[(-self.ctx.log[x]) % 3]


def cubic_character(ctx: FieldCtx) -> CubicCharacter:
    return CubicCharacter(ctx)


def e_p(arg: int, p: int) -> complex:
    """exp(2*pi*i*arg/p)."""
    return cmath.exp(2j * math.pi * (arg % p) / p)
