import pytest
from hypothesis import given, settings, strategies as st

from biquadcap.arith import kronecker
from biquadcap.errors import PreconditionError
from biquadcap.genus import (
    IdealLabel, ambiguous_report, ambiguous_sizes, artin, find_auxiliary_prime, hilbert_ledger,
    i_is_norm, label, ramified_count, span, strong_generators, x_square,
)

from conftest import admissible

PAIRS = admissible(300, 300)


def test_labels():
    assert str(label("H0") * label("H0H1")) == "H1"
    assert str(label("1")) == "1"
    assert label("H1H2").square_generator(17).norm() == 17 ** 2
    assert label("H0I").square_generator(17) is None
    assert len(span([label("H0"), label("H1"), label("I")])) == 8
    with pytest.raises(ValueError):
        IdealLabel.parse("H3")


def test_ramification_and_norm_of_i():
    assert ramified_count(17, 7) == 4
    assert ramified_count(5, 3) == 4
    assert i_is_norm(17) and i_is_norm(97) and not i_is_norm(5)
    assert hilbert_ledger(17, 7)["1+i"] == 1


def test_ambiguous_examples():
    assert ambiguous_sizes(17, 7) == (8, 8, 0, 3)
    assert ambiguous_sizes(97, 3) == (8, 4, 0, 3)
    assert ambiguous_sizes(5, 3) == (4, 4, 1, 2)
    assert [str(g) for g in strong_generators(17, 7)[0]] == ["H0", "H1", "H2"]
    assert [str(g) for g in strong_generators(97, 3)[0]] == ["H0", "H1"]
    assert [str(g) for g in strong_generators(5, 3)[0]] == ["H0", "H1"]


def test_rank_sweep():
    for p, q in PAIRS:
        am, am_s, e, r = ambiguous_sizes(p, q)
        assert am == 2 ** r
        assert (r == 3) == (p % 8 == 1)


def test_auxiliary_prime_97_3():
    aux = find_auxiliary_prime(97, 3, 1000)
    # 13 fails since (3/13) = 1; the first admissible prime is 17
    assert kronecker(3, 13) == 1
    assert aux.l == 17
    assert aux.proof_route["H0I"] == "K3" and "K3" in aux.certified_by["H0I"]


def test_auxiliary_prime_needs_branch():
    with pytest.raises(PreconditionError):
        find_auxiliary_prime(17, 7)
    with pytest.raises(PreconditionError):
        find_auxiliary_prime(5, 3)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([pq for pq in admissible(400, 200) if pq[0] % 8 == 1]))
def test_auxiliary_prime_postconditions(pair):
    p, q = pair
    if x_square(p, q):
        return
    aux = find_auxiliary_prime(p, q)
    l = aux.l
    assert l % 4 == 1 and kronecker(2 * p * q, l) == 1
    assert kronecker(q, l) == -1 and kronecker(2 * p, l) == -1
    # I is inert in K2, and H1, H2 share their Artin symbol
    assert artin("K2", p, q, label("I"), l) == -1
    for j in ("K1", "K2", "K3"):
        assert artin(j, p, q, label("H1"), l) == artin(j, p, q, label("H2"), l)


def test_report_serializes():
    d = ambiguous_report(97, 3).to_dict()
    assert d["auxiliary_prime"]["l"] == 17 and d["am_order"] == 8
