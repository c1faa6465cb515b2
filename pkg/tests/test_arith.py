import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from biquadcap.arith import (
    GaussInt, factorize, gauss_qr_symbol, gaussian_split, gaussian_sqrt, is_prime,
    isqrt, kronecker, perfect_square, primes, rational_sqrt, squarefree_part,
)
from biquadcap.errors import PreconditionError
from fractions import Fraction


def test_isqrt_examples():
    assert isqrt(0) == 0
    assert isqrt(11664) == 108
    assert isqrt(11663) == 107
    with pytest.raises(PreconditionError):
        isqrt(-1)


def test_perfect_square_examples():
    assert perfect_square(11664) == 108
    assert perfect_square(11662) is None
    assert perfect_square(1) == 1
    assert perfect_square(-4) is None


def test_perfect_square_sweep():
    for n in range(0, 10**6, 7):
        assert perfect_square(n * n) == n
    for n in range(2, 2000):
        assert perfect_square(n * n + 1) is None


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2, 9)) is None
    assert rational_sqrt(Fraction(-1)) is None


def test_primality_against_sympy():
    for n in range(-5, 5000):
        assert is_prime(n) == sympy.isprime(n)
    for n in (2**61 - 1, 2**61 + 1, 10**18 + 9, 341550071728321):
        assert is_prime(n) == sympy.isprime(n)
    assert list(primes(10, 30)) == [11, 13, 17, 19, 23, 29]


@given(st.integers(1, 10**9))
def test_factorize_against_sympy(n):
    assert factorize(n) == sympy.factorint(n)


@given(st.integers(-10**6, 10**6).filter(bool))
def test_squarefree_part(n):
    s = squarefree_part(n)
    k2, r = divmod(n, s)
    assert r == 0 and perfect_square(k2) is not None
    assert sympy.factorint(abs(s)) == {p: 1 for p in sympy.factorint(abs(s))}


def test_kronecker_examples():
    assert kronecker(2, 17) == 1
    assert kronecker(17, 3) == -1
    assert kronecker(2, 7) == 1


@given(st.integers(-10**6, 10**6), st.integers(1, 10**5).map(lambda n: 2 * n + 1))
def test_kronecker_matches_jacobi(a, n):
    assert kronecker(a, n) == sympy.jacobi_symbol(a, n)


@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_kronecker_multiplicative(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)
    assert kronecker(a, n * b) == kronecker(a, n) * kronecker(a, b)


def test_quadratic_reciprocity():
    rng = random.Random(7)
    odd = list(primes(3, 10**4))
    for _ in range(2000):
        p, q = rng.sample(odd, 2)
        sign = -1 if p % 4 == 3 and q % 4 == 3 else 1
        assert kronecker(p, q) * kronecker(q, p) == sign
    for p in odd[:300]:
        assert kronecker(-1, p) == (-1) ** ((p - 1) // 2)
        assert kronecker(2, p) == (1 if p % 8 in (1, 7) else -1)


def test_gaussian_split_examples():
    s = gaussian_split(5)
    assert (s.e, s.f, s.pi1) == (1, 1, GaussInt(1, 2))
    s = gaussian_split(17)
    assert (s.e, s.f, s.pi1) == (1, 2, GaussInt(1, 4))
    assert s.form16[:3] == (1, 1, GaussInt(1, 4))
    s = gaussian_split(73)
    assert (s.e, s.f, s.pi1) == (3, 4, GaussInt(3, 8))
    for bad in (3, 7, 21, 25):
        with pytest.raises(PreconditionError):
            gaussian_split(bad)


def test_gaussian_split_sweep():
    for p in primes(5, 10**5):
        if p % 4 != 1:
            continue
        s = gaussian_split(p)
        assert s.pi1.norm() == p and s.pi1 * s.pi2 == GaussInt(p)
        assert s.e > 0 and s.f > 0 and s.e % 2 == 1
        if p % 8 == 1:
            e, f, pi1, pi2 = s.form16
            assert e * e + 16 * f * f == p and pi1 * pi2 == GaussInt(p)


def test_gauss_qr_symbol_examples():
    assert gauss_qr_symbol(GaussInt(1, 1), GaussInt(1, 4)) == -1
    assert gauss_qr_symbol(GaussInt(0, 1), GaussInt(1, 4)) == 1
    with pytest.raises(PreconditionError):
        gauss_qr_symbol(GaussInt(3), GaussInt(1, 1))
    with pytest.raises(PreconditionError):
        gauss_qr_symbol(GaussInt(1, 4) * 3, GaussInt(1, 4))


_PI = [gaussian_split(p).pi1 for p in primes(5, 400) if p % 4 == 1] + [GaussInt(7), GaussInt(11)]
gauss = st.builds(GaussInt, st.integers(-200, 200), st.integers(-200, 200))


@given(gauss, gauss, st.sampled_from(_PI))
def test_gauss_qr_multiplicative(a, b, pi):
    if pi.divides(a) or pi.divides(b):
        return
    assert gauss_qr_symbol(a, pi) * gauss_qr_symbol(b, pi) == gauss_qr_symbol(a * b, pi)
    assert gauss_qr_symbol(a * a, pi) == 1


@given(gauss)
def test_gaussian_sqrt(z):
    assert gaussian_sqrt(z * z) in (z, -z)
    w = gaussian_sqrt(z)
    if w is not None:
        assert w * w == z


@settings(max_examples=200)
@given(gauss, gauss.filter(lambda g: g.norm() > 0))
def test_gauss_divmod(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a and 2 * r.norm() <= b.norm()
