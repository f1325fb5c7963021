"""The ring O = F_q[t]: dense polynomials, monic irreducible enumeration,
residue rings with CRT, the absolute value |f| = q^deg(f), and the standard
additive character psi on the fraction field.

Polynomials are immutable: a (ctx, coeffs) pair with coefficients stored
low-to-high as field-element encodings and no trailing zeros; the zero
polynomial has an empty tuple.  Serialization is the comma-separated list
of coefficient encodings, e.g. "1,0,1" for 1 + t^2 over F_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DivisionByZero, NotCoprime, TooLarge, ZeroModulus
from .gf import FieldCtx, e_p, trace_to_prime

ENUM_CAP = 1 << 22

NEG_INF = float("-inf")


@dataclass(frozen=True)
class SizeExp:
    """|f| represented as the exponent of q; the zero polynomial is -inf.

    Multiplying sizes adds exponents; comparisons are plain comparisons.
    """

    exponent: int | float

    def __mul__(self, other: "SizeExp") -> "SizeExp":
        return SizeExp(self.exponent + other.exponent)

    def __lt__(self, other: "SizeExp") -> bool:
        return self.exponent < other.exponent

    def __le__(self, other: "SizeExp") -> bool:
        return self.exponent <= other.exponent


class Poly:
    """Dense polynomial over F_q."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: FieldCtx, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "_hash", None)

    # -- construction helpers -------------------------------------------

    @staticmethod
    def zero(ctx: FieldCtx) -> "Poly":
        return Poly(ctx, ())

    @staticmethod
    def one(ctx: FieldCtx) -> "Poly":
        return Poly(ctx, (1,))

    @staticmethod
    def t(ctx: FieldCtx) -> "Poly":
        return Poly(ctx, (0, 1))

    @staticmethod
    def t_pow(ctx: FieldCtx, n: int) -> "Poly":
        return Poly(ctx, (0,) * n + (1,))

    @staticmethod
    def const(ctx: FieldCtx, c: int) -> "Poly":
        return Poly(ctx, (c,))

    @staticmethod
    def from_enc(ctx: FieldCtx, enc: int) -> "Poly":
        """Inverse of .enc(): base-q digit vector of the integer."""
        c = []
        while enc:
            c.append(enc % ctx.q)
            enc //= ctx.q
        return Poly(ctx, c)

    def enc(self) -> int:
        """Integer encoding: sum coeffs[i] * q^i (total order on polys)."""
        x = 0
        for c in reversed(self.coeffs):
            x = x * self.ctx.q + c
        return x

    # -- basic structure --------------------------------------------------

    @property
    def deg(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def size(self) -> SizeExp:
        return SizeExp(self.deg)

    def abs_q(self) -> int:
        """|f| = q^deg as an exact integer (0 for the zero polynomial)."""
        return 0 if self.is_zero() else self.ctx.q ** int(self.deg)

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((id(self.ctx), self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Poly({self.serialize()!r})"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        K = self.ctx
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = K.add(out[i], c)
        return Poly(K, out)

    def __neg__(self) -> "Poly":
        K = self.ctx
        return Poly(K, [K.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        K = self.ctx
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(K)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = K.add(out[i + j], K.mul(ai, bj))
        return Poly(K, out)

    def scale(self, c: int) -> "Poly":
        K = self.ctx
        return Poly(K, [K.mul(c, x) for x in self.coeffs])

    def shift(self, n: int) -> "Poly":
        """Multiply by t^n (n >= 0)."""
        if self.is_zero():
            return self
        return Poly(self.ctx, (0,) * n + self.coeffs)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        K = self.ctx
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv_lead = K.inv(other.lead())
        quot = [0] * max(len(rem) - db, 0)
        while len(rem) - 1 >= db and rem:
            c = K.mul(rem[-1], inv_lead)
            shift = len(rem) - 1 - db
            quot[shift] = c
            for j, bj in enumerate(other.coeffs):
                rem[shift + j] = K.sub(rem[shift + j], K.mul(c, bj))
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(K, quot), Poly(K, rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero() or self.is_monic():
            return self
        return self.scale(self.ctx.inv(self.lead()))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def eval(self, x: int) -> int:
        K = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = K.add(K.mul(acc, x), c)
        return acc

    def reverse(self, window: int) -> "Poly":
        """s^window * f(1/s) as a polynomial in s = t^{-1}: the coefficient
        of t^i becomes the coefficient of s^{window-i}.  Terms with
        i > window fall off the window."""
        out = [0] * (window + 1)
        for i, c in enumerate(self.coeffs):
            if i <= window:
                out[window - i] = c
        return Poly(self.ctx, out)

    def pow_mod(self, n: int, mod: "Poly") -> "Poly":
        result = Poly.one(self.ctx) % mod
        base = self % mod
        while n:
            if n & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            n >>= 1
        return result

    # -- serialization ----------------------------------------------------

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    @staticmethod
    def parse(ctx: FieldCtx, text: str) -> "Poly":
        text = text.strip()
        if text in ("", "0"):
            return Poly.zero(ctx)
        return Poly(ctx, [int(tok) for tok in text.split(",")])


def ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Monic g = gcd(a,b) plus u, v with u*a + v*b = g."""
    K = a.ctx
    r0, r1 = a, b
    s0, s1 = Poly.one(K), Poly.zero(K)
    t0, t1 = Poly.zero(K), Poly.one(K)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    c = K.inv(r0.lead())
    return r0.scale(c), s0.scale(c), t0.scale(c)


# -- enumeration -------------------------------------------------------------


def polys_of_degree(ctx: FieldCtx, n: int, monic: bool = False):
    """All polynomials of degree exactly n (lazily)."""
    if n < 0:
        yield Poly.zero(ctx)
        return
    q = ctx.q
    leads = [1] if monic else range(1, q)
    for lead in leads:
        for enc in range(q**n):
            c = []
            v = enc
            for _ in range(n):
                c.append(v % q)
                v //= q
            c.append(lead)
            yield Poly(ctx, c)


def polys_up_to_degree(ctx: FieldCtx, n: int):
    """All polynomials of degree <= n, including 0."""
    yield Poly.zero(ctx)
    for m in range(n + 1):
        yield from polys_of_degree(ctx, m)


def mobius(n: int) -> int:
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


def count_primes_of_degree(q: int, n: int) -> int:
    """(1/n) * sum_{j | n} mu(j) q^{n/j}."""
    total = sum(mobius(j) * q ** (n // j) for j in range(1, n + 1) if n % j == 0)
    assert total % n == 0
    return total // n


def is_irreducible(f: Poly) -> bool:
    """Rabin's criterion via x^{q^j} gcd tests; deterministic."""
    n = f.deg
    if n is NEG_INF or n < 1:
        return False
    if n == 1:
        return True
    K = f.ctx
    x = Poly.t(K)
    xq = x.pow_mod(K.q**n, f)
    if xq != x % f:
        return False
    for ell in set(_int_prime_factors(int(n))):
        h = x.pow_mod(K.q ** (int(n) // ell), f) - x
        if f.gcd(h).deg != 0:
            return False
    return True


def _int_prime_factors(n: int) -> list[int]:
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


@lru_cache(maxsize=None)
def primes_of_degree(ctx: FieldCtx, n: int, cap: int = ENUM_CAP) -> tuple[Poly, ...]:
    """Ordered (by encoding) monic irreducibles of degree n."""
    if n < 1:
        raise TooLarge("prime degree must be >= 1")
    if ctx.q**n > cap:
        raise TooLarge(f"q^n = {ctx.q ** n} exceeds enumeration cap {cap}")
    out = tuple(f for f in polys_of_degree(ctx, n, monic=True) if is_irreducible(f))
    assert len(out) == count_primes_of_degree(ctx.q, n)
    return out


def factorize(r: Poly, cap: int = ENUM_CAP) -> list[tuple[Poly, int]]:
    """Monic prime-power factorization by trial division over enumerated primes."""
    from .errors import FactorizationCapExceeded

    if r.is_zero():
        raise ZeroModulus("cannot factor 0")
    r = r.monic()
    out = []
    d = 1
    while r.deg >= 1:
        if 2 * d > r.deg:
            out.append((r, 1))  # what remains is irreducible
            break
        if r.ctx.q**d > cap:
            raise FactorizationCapExceeded(f"residual factor of degree {r.deg}")
        for pi in primes_of_degree(r.ctx, d, cap):
            e = 0
            while True:
                quot, rem = r.divmod(pi)
                if not rem.is_zero():
                    break
                r = quot
                e += 1
            if e:
                out.append((pi, e))
            if r.deg < 1:
                break
        d += 1
    out.sort(key=lambda pe: (pe[0].deg, pe[0].enc()))
    return out


# -- residue rings -----------------------------------------------------------


class ResidueRing:
    """O/rO for a nonzero modulus r (normalized monic)."""

    def __init__(self, modulus: Poly, cap: int = ENUM_CAP):
        if modulus.is_zero():
            raise ZeroModulus("residue ring needs a nonzero modulus")
        self.modulus = modulus.monic()
        self.ctx = modulus.ctx
        self.cardinality = self.ctx.q ** int(self.modulus.deg) if self.modulus.deg >= 0 else 1
        self.cap = cap

    def reduce(self, f: Poly) -> Poly:
        return f % self.modulus

    def elements(self):
        if self.cardinality > self.cap:
            raise TooLarge(f"|r| = {self.cardinality} exceeds cap {self.cap}")
        deg = int(self.modulus.deg)
        yield from polys_up_to_degree(self.ctx, deg - 1)

    def unit_count(self) -> int:
        n = self.cardinality
        for pi, _ in factorize(self.modulus, self.cap):
            n = n // pi.abs_q() * (pi.abs_q() - 1)
        return n

    def units(self):
        for f in self.elements():
            if f.gcd(self.modulus).deg == 0:
                yield f

    def split(self, x: Poly, factors: list[Poly]) -> list[Poly]:
        """CRT split of x across pairwise coprime moduli."""
        return [x % m for m in factors]


def crt(residues: list[tuple[Poly, Poly]]) -> Poly:
    """Combine (value, modulus) pairs with pairwise coprime moduli."""
    if not residues:
        raise ZeroModulus("empty CRT input")
    x, m = residues[0]
    x = x % m
    for v, n in residues[1:]:
        g, u, w = ext_gcd(m, n)
        if g.deg != 0:
            raise NotCoprime(f"moduli {m.serialize()} and {n.serialize()} share {g.serialize()}")
        # x' = x + m*u*(v - x)  mod m*n   (u*m = 1 mod n)
        mn = m * n
        x = (x + m * u * (v - x)) % mn
        m = mn
    return x


# -- the additive character --------------------------------------------------


def psi_arg(h: Poly, r: Poly) -> int:
    """Exact F_p argument of psi(h/r): Tr_{F_q/F_p}(c) where c is the
    t^{deg r - 1} coefficient of (h mod r) divided by lead(r).

    Equals the trace of the residue of h/r at t = infinity.
    """
    if r.is_zero():
        raise ZeroModulus("psi needs a nonzero modulus")
    K = r.ctx
    hbar = h % r
    c = K.div(hbar.coeff(int(r.deg) - 1), r.lead())
    return trace_to_prime(K, c)


def psi(h: Poly, r: Poly) -> complex:
    return e_p(psi_arg(h, r), r.ctx.p)
