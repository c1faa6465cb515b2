from math import gcd, isqrt

import pytest
from hypothesis import given, settings, strategies as st

from biquadcap.arith import is_squarefree, kronecker
from biquadcap.errors import PreconditionError
from biquadcap.oracle import (
    FIXTURE_COLUMNS, compose, fixture_text, fixtures, fundamental_disc, imag_class_group,
    imag_class_number, kuroda_h_k, narrow_class_number, parse_fixtures, pin_kuroda,
    real_class_number, reduce_form, reduced_forms,
)


def brute_reduced(D):
    out = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c >= a and not (b < 0 and a == c) and gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
    return out


def analytic_h(D):
    # Dirichlet: h = -(w / 2|D|) * sum_{a<|D|} (D/a) a, D fundamental
    w = {-3: 6, -4: 4}.get(D, 2)
    s = sum(kronecker(D, a) * a for a in range(1, -D))
    h, r = divmod(-w * s, 2 * -D)
    assert r == 0
    return h


def zagier_h(D):
    """Narrow class number as the number of cycles of Zagier-reduced forms."""
    r = isqrt(D)
    forms = set()
    for a in range(1, D // 2 + 1):
        for c in range(1, D // 2 - a + 2):
            b2 = D + 4 * a * c
            b = isqrt(b2)
            if b * b == b2 and b > a + c and gcd(gcd(a, b), c) == 1:
                forms.add((a, b, c))
    cycles = 0
    while forms:
        f0 = f = forms.pop()
        cycles += 1
        while True:
            a, b, c = f
            n = (b + r) // (2 * c) + 1
            f = (c, 2 * c * n - b, c * n * n - b * n + a)
            if f == f0:
                break
            forms.remove(f)
    return cycles


NEG = [D for D in range(-3, -10 ** 4, -1) if D % 4 in (0, 1)]


def test_class_groups_small():
    assert imag_class_group(-4).order == 1
    assert imag_class_group(-23).order == 3 and imag_class_group(-23).structure == (3,)
    assert imag_class_group(-952).structure == (4, 2)
    with pytest.raises(PreconditionError):
        imag_class_group(5)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(NEG))
def test_reduced_forms_match_brute_force(D):
    assert sorted(reduced_forms(D)) == sorted(brute_reduced(D))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000).filter(lambda m: is_squarefree(m)))
def test_imag_class_number_matches_analytic_formula(m):
    assert imag_class_number(m) == analytic_h(fundamental_disc(-m))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([D for D in NEG if D > -3000]))
def test_group_axioms(D):
    g = imag_class_group(D)
    one = g.identity
    forms = list(g.forms)
    assert one in forms
    for f in forms[:6]:
        assert compose(f, one) == reduce_form(f)
        for h in forms[:6]:
            assert compose(f, h) == compose(h, f)
            assert compose(f, h) in forms
    assert all(g.order % o == 0 for o in g.structure)
    from math import prod
    assert prod(g.structure) == g.order


def test_two_rank_genus_bound():
    # 2-rank of Cl(-8pq) is (number of prime discriminant factors) - 1 = 2
    for p, q in [(17, 7), (5, 3), (97, 3), (13, 11)]:
        s = imag_class_group(-8 * p * q).structure
        assert sum(1 for n in s if n % 2 == 0) == 2


@pytest.mark.parametrize("d", [d for d in range(2, 200) if is_squarefree(d) and isqrt(d) ** 2 != d])
def test_narrow_class_number_zagier(d):
    D = fundamental_disc(d)
    assert narrow_class_number(D) == zagier_h(D)


def test_real_class_numbers():
    assert [real_class_number(d) for d in (2, 10, 79, 82, 229)] == [1, 2, 3, 4, 3]


def test_kuroda_pinned_on_one_row_reproduces_all():
    rows = fixtures()
    conv = pin_kuroda(rows[0])
    assert conv.factor == 1 and conv.pinned_on == 238
    from math import prod
    for row in rows:
        assert kuroda_h_k(row.p, row.q, conv) == prod(row.cl_k)
    assert kuroda_h_k(17, 23, conv) == 48


def test_fixture_loader():
    rows = fixtures()
    assert len(rows) == 28
    r = next(r for r in rows if r.d == 238)
    assert (r.root, r.cl_k, r.cl_k2) == (108, (4, 2, 2), (8, 2, 2))
    r = next(r for r in rows if r.d == 582)
    assert r.root == 194 and r.cl_k == (8, 2, 2)
    r = next(r for r in rows if r.d == 2006 and r.table == "K3-a")
    assert r.verdict("K3", "H1I") is True and r.cl_k == (24, 2, 2)


def test_fixture_loader_rejects_corruption():
    text = fixture_text()
    lines = text.splitlines()
    with pytest.raises(ValueError, match="row-count"):
        parse_fixtures("\n".join(lines[1:]))
    with pytest.raises(ValueError, match="header says"):
        parse_fixtures("\n".join(lines[:-1]))
    with pytest.raises(ValueError, match="columns"):
        parse_fixtures("\n".join([lines[0], ",".join(reversed(FIXTURE_COLUMNS))] + lines[2:]))
    bad = text.replace("238,17,7", "238,17,11", 1)
    with pytest.raises(ValueError, match="not 2"):
        parse_fixtures(bad)
