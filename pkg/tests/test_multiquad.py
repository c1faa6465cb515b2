from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from biquadcap.errors import PreconditionError
from biquadcap.multiquad import MQField, char_poly, from_text, is_square, unit_check

FIELDS = [
    MQField.of(2), MQField.of(-1, 2), MQField.of(-1, 7, 34), MQField.of(-1, 2, 21),
    MQField.of(-1, 3, 5, 7), MQField.of(-1, 2, 3, 5),
]


def elems(field, lo=-6, hi=6):
    coeff = st.fractions(min_value=lo, max_value=hi, max_denominator=3)
    return st.lists(coeff, min_size=field.degree, max_size=field.degree).map(field.element)


field_and_elem = st.sampled_from(FIELDS).flatmap(lambda f: elems(f))
field_and_pair = st.sampled_from(FIELDS).flatmap(lambda f: st.tuples(elems(f), elems(f)))


def test_examples():
    F = MQField.of(2)
    s2 = F.sqrt(2)
    assert (1 + s2) * (1 - s2) == -1
    assert is_square(F.scalar(2)) == s2
    G = MQField.of(-1, 2)
    i, r2 = G.sqrt(-1), G.sqrt(2)
    root = (2 + (1 + i) * r2) / 2
    assert root * root == (1 + i) * (1 + r2)
    assert is_square((1 + i) * (1 + r2)) == root
    assert (1 + r2).norm(MQField.of(-1)) == -1
    H = MQField.of(7)
    assert is_square(2 * H.quadratic(8, 3, 7)) == H.quadratic(3, 1, 7)


def test_unit_check_examples():
    assert unit_check(MQField.of(2).quadratic(1, 1, 2))
    assert unit_check(MQField.of(5).quadratic(Fraction(1, 2), Fraction(1, 2), 5))
    assert not unit_check(MQField.of(5).scalar(3))
    assert not unit_check(MQField.of(2).quadratic(Fraction(1, 2), Fraction(1, 2), 2))


def test_field_validation():
    with pytest.raises(PreconditionError):
        MQField.of(2, 3, 6)
    with pytest.raises(PreconditionError):
        MQField.of(4)
    with pytest.raises(PreconditionError):
        MQField.of(2).sqrt(3)
    with pytest.raises(PreconditionError):
        MQField.of(2).one() + MQField.of(3).one()
    with pytest.raises(ZeroDivisionError):
        MQField.of(2).zero().inv()


def test_square_root_sweep():
    # 500 random y across fields up to degree 16
    import random
    rng = random.Random(11)
    for n in range(500):
        f = FIELDS[n % len(FIELDS)]
        y = f.element([Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(f.degree)])
        r = is_square(y * y)
        assert r in (y, -y)


@settings(max_examples=150, deadline=None)
@given(field_and_elem)
def test_inverse_round_trip(x):
    if x.is_zero():
        return
    assert x * x.inv() == 1


@settings(max_examples=150, deadline=None)
@given(field_and_pair)
def test_galois_homomorphism(pair):
    x, y = pair
    f = x.field
    for s in range(f.degree):
        assert x.conj(s).conj(s) == x
        assert (x * y).conj(s) == x.conj(s) * y.conj(s)
        assert (x + y).conj(s) == x.conj(s) + y.conj(s)


@settings(max_examples=100, deadline=None)
@given(field_and_elem)
def test_non_square_detection(x):
    # x*m is never a square when x is a nonzero square and m a non-square rational
    if x.is_zero():
        return
    assert is_square(x * x * 3) is None or x.field.contains_sqrt(3)


@settings(max_examples=100, deadline=None)
@given(field_and_elem)
def test_text_round_trip(x):
    assert from_text(x.field, x.to_text()) == x


def test_char_poly_and_norm():
    F = MQField.of(-1, 2)
    x = F.sqrt(2) + F.sqrt(-1)
    # minimal polynomial of sqrt2 + i is T^4 - 2T^2 + 9
    assert char_poly(x) == [1, 0, -2, 0, 9]
    assert x.norm() == 9
