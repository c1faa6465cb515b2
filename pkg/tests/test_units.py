import pytest
from hypothesis import given, settings, strategies as st

from biquadcap.errors import PreconditionError
from biquadcap.multiquad import is_square, unit_check
from biquadcap.units import (
    field_of, fsu, fsu_k, fsu_K1, fsu_K2, fsu_K3, hasse_Q_K3, n0_of, norm_unit_group,
    quadratic_bases, two_plus_sqrt2_exclusions, unit_index, unit_lattice,
)

from conftest import admissible

PAIRS = admissible(120, 60, 5000)


def test_check_pair_messages():
    with pytest.raises(PreconditionError, match="p is not prime"):
        fsu_k(4, 7)
    with pytest.raises(PreconditionError, match="q is not congruent to 3 mod 4"):
        fsu_k(17, 5)


def test_cyclotomic_data():
    assert n0_of(field_of("K3", 17, 7)).n0 == 3
    assert n0_of(field_of("K3", 17, 7)).mu == field_of("K3", 17, 7).sqrt(2)
    assert n0_of(field_of("K1", 17, 7)).n0 == 2
    assert n0_of(field_of("k", 17, 7)).n0 == 2


def test_fsu_k_examples():
    assert fsu_k(17, 7).symbols == ["i", "√(iε_2pq)"]
    assert fsu_k(97, 3).symbols == ["i", "ε_2pq"]
    assert fsu_k(17, 11).symbols == ["i", "√(iε_2pq)"]


def test_fsu_K1_examples():
    assert fsu_K1(17, 7).branch == "case 1"
    assert fsu_K1(97, 3).branch == "case 2"
    assert fsu_K1(17, 7).symbols == ["i", "ε_p", "√(iε_2q)", "√(ε_2qε_2pq)"]


def test_fsu_K2_examples():
    rep = fsu_K2(17, 7)
    assert rep.symbols == ["i", "√(iε_q)", "√(iε_2p)", "√(iε_2pq)"]
    rep = fsu_K2(5, 3)
    assert rep.notes["norm_eps_2p"] == -1 and rep.notes["eps_2pq_class"] == "2p(x-1)"
    assert rep.branch == "case (2)(i)"


def test_fsu_K3_examples():
    rep = fsu_K3(17, 7)
    assert rep.hasse_Q == 2 and rep.branch == "case (1)(ii)"
    assert rep.symbols == ["ξ_8", "ε_2", "√(ε_pq)", "√(ξ√(ε_pqε_2pq))"]
    assert fsu_K3(5, 3).symbols == ["ξ_8", "ε_2", "ε_pq", "√(ε_pqε_2pq)"]
    assert fsu_K3(5, 3).hasse_Q == 1


def test_norm_groups():
    assert norm_unit_group("K1", fsu("K1", 97, 3)).label == "⟨i, ε_2pq⟩"
    assert norm_unit_group("K3", fsu("K3", 17, 7)).label == "⟨i, √(iε_2pq)⟩"
    assert norm_unit_group("K3", fsu("K3", 97, 3)).label == "⟨i, ε_2pq²⟩"


def test_unit_index_examples():
    assert unit_index(17, 7, "K1") == 2
    assert unit_index(97, 3, "K1") == 1
    # Q_K3(17, 7) is 2, so the index is 1; Q = 1 pairs have index 2
    assert hasse_Q_K3(17, 7).Q == 2 and unit_index(17, 7, "K3") == 1
    for p, q in [(17, 3), (17, 11), (41, 3)]:
        assert hasse_Q_K3(p, q).Q == 1 and unit_index(p, q, "K3") == 2


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(PAIRS), st.sampled_from(["k", "K1", "K2", "K3"]))
def test_generators_are_units_and_radicals_resquare(pair, j):
    rep = fsu(j, *pair)
    assert rep.notes["lattice_check"] == "ok"
    for g in rep.generators + rep.plus_generators:
        assert unit_check(g.value)
    F = field_of(j, *pair)
    for c in rep.certificates:
        assert c.root and c.square
    if j in ("K1", "K2"):
        assert rep.hasse_Q == 2
    assert len(rep.generators) == len(quadratic_bases(j, *pair))
    assert F.degree == (4 if j == "k" else 8)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(PAIRS))
def test_unit_lattice_matches_case_table(pair):
    for j in ("K1", "K2", "K3"):
        lat = unit_lattice(j, *pair)
        assert lat.hasse_Q == fsu(j, *pair).hasse_Q


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(PAIRS))
def test_two_plus_sqrt2_never_times_unit_square(pair):
    assert two_plus_sqrt2_exclusions(*pair) == []


def test_hasse_sign_certificate():
    h = hasse_Q_K3(17, 7)
    assert h.root is not None and h.root * h.root == (h.inner.field.sqrt(2) + 2) * h.inner * h.sign
    assert is_square(h.inner * h.inner) is not None
