"""Exact integer arithmetic: squares, residue symbols, Gaussian integers.

Everything here works on Python ints; there is no floating point anywhere
in the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import PreconditionError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def isqrt(n: int) -> int:
    """Return floor(sqrt(n)) for n >= 0."""
    if n < 0:
        raise PreconditionError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def perfect_square(n: int) -> int | None:
    """Return r >= 0 with r*r == n, or None when n is not a square."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a rational, when it is rational."""
    x = Fraction(x)
    if x < 0:
        return None
    num = perfect_square(x.numerator)
    if num is None:
        return None
    den = perfect_square(x.denominator)
    if den is None:
        return None
    return Fraction(num, den)


def is_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3e24
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes(start: int = 2, stop: int | None = None) -> Iterator[int]:
    """Primes in [start, stop), or unbounded when stop is None."""
    n = max(start, 2)
    while stop is None or n < stop:
        if is_prime(n):
            yield n
        n += 1


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of |n| (desk-scale inputs only)."""
    n = abs(n)
    if n == 0:
        raise PreconditionError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * k**2."""
    if n == 0:
        raise PreconditionError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return sign * out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorize(n).values())


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for every pair of integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    twos = (n & -n).bit_length() - 1
    n >>= twos
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class GaussInt:
    """An element re + im*i of Z[i]."""

    re: int
    im: int = 0

    def __add__(self, other: GaussInt | int) -> GaussInt:
        o = _gi(other)
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: GaussInt | int) -> GaussInt:
        o = _gi(other)
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: GaussInt | int) -> GaussInt:
        return _gi(other) - self

    def __neg__(self) -> GaussInt:
        return GaussInt(-self.re, -self.im)

    def __mul__(self, other: GaussInt | int) -> GaussInt:
        o = _gi(other)
        return GaussInt(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GaussInt:
        if k < 0:
            raise PreconditionError("negative power in Z[i]")
        out, base = GaussInt(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> GaussInt:
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divmod(self, other: GaussInt | int) -> tuple[GaussInt, GaussInt]:
        """Euclidean division with N(remainder) <= N(other)/2."""
        o = _gi(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by 0 in Z[i]")
        t = self * o.conj()
        q = GaussInt(_round_div(t.re, n), _round_div(t.im, n))
        return q, self - q * o

    def __mod__(self, other: GaussInt | int) -> GaussInt:
        return self.divmod(other)[1]

    def exact_div(self, other: GaussInt | int) -> GaussInt | None:
        q, r = self.divmod(other)
        return q if r == GaussInt(0) else None

    def divides(self, other: GaussInt | int) -> bool:
        return _gi(other) % self == GaussInt(0)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _coef_i(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_coef_i(abs(self.im))}"


def _coef_i(c: int) -> str:
    if c == 1:
        return "i"
    if c == -1:
        return "-i"
    return f"{c}i"


def _gi(x: GaussInt | int) -> GaussInt:
    return x if isinstance(x, GaussInt) else GaussInt(int(x))


def _round_div(a: int, n: int) -> int:
    # nearest integer to a/n for n > 0
    return (2 * a + n) // (2 * n)


GAUSS_UNITS = (GaussInt(1), GaussInt(0, 1), GaussInt(-1), GaussInt(0, -1))


def gaussian_sqrt(z: GaussInt) -> GaussInt | None:
    """Return w in Z[i] with w*w == z, or None."""
    n = perfect_square(z.norm())
    if n is None:
        return None
    a2 = (n + z.re)
    b2 = (n - z.re)
    if a2 % 2 or b2 % 2:
        return None
    a = perfect_square(a2 // 2)
    b = perfect_square(b2 // 2)
    if a is None or b is None:
        return None
    if z.im < 0:
        b = -b
    w = GaussInt(a, b)
    return w if w * w == z else None


@dataclass(frozen=True)
class GaussianSplit:
    """p = e^2 + 4 f^2 = pi1 * pi2 with pi1 = e + 2fi.

    For p = 1 (mod 8) ``form16`` also carries the normalization
    p = e^2 + 16 f^2, pi1 = e + 4fi, as (e, f, pi1, pi2).
    """

    p: int
    e: int
    f: int
    pi1: GaussInt
    pi2: GaussInt
    form16: tuple[int, int, GaussInt, GaussInt] | None = None


def gaussian_split(p: int) -> GaussianSplit:
    """Split a prime p = 1 (mod 4) in Z[i] with the canonical normalization."""
    if p % 4 != 1 or not is_prime(p):
        raise PreconditionError(f"{p} is not a prime congruent to 1 mod 4")
    for e in range(1, isqrt(p) + 1, 2):
        rest = p - e * e
        if rest % 4:
            continue
        f = perfect_square(rest // 4)
        if f:
            break
    else:  # pragma: no cover - Fermat guarantees a representation
        raise AssertionError(f"no two-square representation for {p}")
    pi1 = GaussInt(e, 2 * f)
    pi2 = pi1.conj()
    assert pi1 * pi2 == GaussInt(p)
    form16 = None
    if p % 8 == 1:
        assert f % 2 == 0
        h = f // 2
        form16 = (e, h, GaussInt(e, 4 * h), GaussInt(e, -4 * h))
    return GaussianSplit(p, e, f, pi1, pi2, form16)


def _gauss_powmod(a: GaussInt, k: int, m: GaussInt) -> GaussInt:
    out, base = GaussInt(1), a % m
    while k:
        if k & 1:
            out = (out * base) % m
        base = (base * base) % m
        k >>= 1
    return out


def gauss_qr_symbol(alpha: GaussInt, pi: GaussInt) -> int:
    """Quadratic residue symbol (alpha / pi) in Z[i].

    ``pi`` must be a Gaussian prime not above 2 and not dividing alpha.
    """
    n = pi.norm()
    if n % 2 == 0:
        raise PreconditionError(f"{pi} lies above 2")
    if not (is_prime(n) or (perfect_square(n) and is_prime(isqrt(n)) and isqrt(n) % 4 == 3)):
        raise PreconditionError(f"{pi} is not a Gaussian prime")
    if pi.divides(alpha):
        raise PreconditionError(f"{pi} divides {alpha}")
    r = _gauss_powmod(alpha, (n - 1) // 2, pi)
    if pi.divides(r - 1):
        return 1
    if pi.divides(r + 1):
        return -1
    raise AssertionError(f"Euler criterion gave {r} modulo {pi}")  # pragma: no cover
