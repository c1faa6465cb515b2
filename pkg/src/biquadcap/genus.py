"""Ambiguous classes of k = Q(sqrt(2pq), i) over F = Q(i)."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .arith import GaussInt, gauss_qr_symbol, gaussian_split, kronecker, primes
from .config import bounds
from .errors import InconsistencyError, PreconditionError
from .quadfield import fundamental_unit, square_class_case
from .units import check_pair, field_of, fsu_k

IDEALS = ("H0", "H1", "H2", "I")


@dataclass(frozen=True, order=True)
class IdealLabel:
    """Formal product H0^a H1^b H2^c I^d with exponents in {0, 1}."""

    exps: tuple[int, int, int, int]

    @classmethod
    def parse(cls, text: str) -> IdealLabel:
        exps = [0, 0, 0, 0]
        rest = text.strip()
        if rest in ("", "1"):
            return cls(tuple(exps))
        while rest:
            for n, name in enumerate(IDEALS):
                if rest.startswith(name):
                    exps[n] ^= 1
                    rest = rest[len(name):]
                    break
            else:
                raise ValueError(f"bad ideal label {text!r}")
        return cls(tuple(exps))

    def __mul__(self, other: IdealLabel) -> IdealLabel:
        return IdealLabel(tuple(a ^ b for a, b in zip(self.exps, other.exps)))

    def __str__(self) -> str:
        s = "".join(n for n, e in zip(IDEALS, self.exps) if e)
        return s or "1"

    @property
    def has_I(self) -> bool:
        return bool(self.exps[3])

    def square_generator(self, p: int) -> GaussInt | None:
        """g in Z[i] with (label)^2 = (g); None when I is involved."""
        if self.has_I:
            return None
        s = gaussian_split(p)
        g = GaussInt(1)
        for e, f in zip(self.exps[:3], (GaussInt(1, 1), s.pi1, s.pi2)):
            if e:
                g = g * f
        return g


def label(text: str) -> IdealLabel:
    return IdealLabel.parse(text)


def span(gens: list[IdealLabel]) -> set[IdealLabel]:
    out = {IdealLabel((0, 0, 0, 0))}
    for g in gens:
        out |= {g * x for x in out}
    return out


# ramification ---------------------------------------------------------------

def _residues_mod4() -> set[tuple[int, int]]:
    return {((a * a - b * b) % 4, (2 * a * b) % 4) for a, b in product(range(4), repeat=2)}


def _ramified_at_1_plus_i(alpha: GaussInt) -> bool:
    # F(sqrt(alpha)), alpha a (1+i)-adic unit: unramified iff alpha is a square
    # mod 4 up to squares of units... units are absorbed, so test alpha*u^2 = alpha
    sq = _residues_mod4()
    return (alpha.re % 4, alpha.im % 4) not in sq


def ramified_count(p: int, q: int) -> int:
    """Primes of Q(i) ramified in k; the single infinite place is complex."""
    check_pair(p, q)
    s = gaussian_split(p)
    # 2pq = -i (1+i)^2 pq, so k = F(sqrt(alpha)) with alpha = -i p q
    alpha = GaussInt(0, -1) * p * q
    t = 2 + 1  # pi1, pi2 and the inert q divide alpha exactly once
    assert not s.pi1.divides(GaussInt(0, -1) * q) and not s.pi2.divides(s.pi1)
    if _ramified_at_1_plus_i(alpha):
        t += 1
    infinite = 0
    if t != 4:
        raise InconsistencyError(f"t = {t} for ({p}, {q}); expected 4")
    return t + infinite


def hilbert_ledger(p: int, q: int) -> dict:
    """Local symbols (2pq, i) at the primes of Q(i) dividing 2pq."""
    check_pair(p, q)
    s = gaussian_split(p)
    i = GaussInt(0, 1)
    at_p = [gauss_qr_symbol(i, s.pi1), gauss_qr_symbol(i, s.pi2)]
    at_q = gauss_qr_symbol(i, GaussInt(q))
    two_p = kronecker(2, p)
    if at_p != [two_p, two_p] or at_q != 1:
        raise InconsistencyError(f"Hilbert ledger mismatch: {at_p}, {at_q}, (2/p) = {two_p}")
    odd = at_p[0] * at_p[1] * at_q
    # product formula fixes the symbol at 1+i
    return {"pi1": at_p[0], "pi2": at_p[1], "q": at_q, "1+i": odd, "two_over_p": two_p}


def i_is_norm(p: int, q: int = 3) -> bool:
    """i is a norm from k to Q(i) iff every local symbol (2pq, i) is +1."""
    led = hilbert_ledger(p, q)
    ok = all(v == 1 for k, v in led.items() if k != "two_over_p")
    if ok != (p % 8 == 1):
        raise InconsistencyError(f"norm-of-i test disagrees with p mod 8 for p = {p}")
    return ok


# ambiguous class counts --------------------------------------------------------

def _unit_norm_ratio(p: int, q: int, e: int) -> int:
    """[E_F cap N(k^x) : N(E_k)] computed from exact norms of the FSU of k."""
    k = field_of("k", p, q)
    F = type(k).of(-1)
    i = k.sqrt(-1)
    rep = fsu_k(p, q)
    images = set()
    for u in [i] + [g.value for g in rep.generators]:
        n = u.norm(F)
        for t in range(4):
            if n == i ** t:
                images.add(t)
                break
        else:
            raise InconsistencyError(f"N(E_k) contains {n}, not a root of unity")
    # subgroup of Z/4 generated by the images
    from math import gcd
    g = 4
    for t in images:
        g = gcd(g, t)
    n_units = 4 // g
    local = 4 if e == 0 else 2  # <i> or <-1>
    if local % n_units:
        raise InconsistencyError("N(E_k) is not inside the local norm group")
    return local // n_units


@dataclass
class AmbiguousReport:
    p: int
    q: int
    t: int
    e: int
    r: int
    am_order: int
    am_s_order: int
    strong_generators: list[IdealLabel]
    relations: list[str]
    aux: AuxiliaryPrime | None = None
    ledger: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "p": self.p, "q": self.q, "t": self.t, "e": self.e, "rank": self.r,
            "am_order": self.am_order, "am_s_order": self.am_s_order,
            "strong_generators": [str(g) for g in self.strong_generators],
            "relations": self.relations, "hilbert_ledger": self.ledger,
        }
        d["auxiliary_prime"] = None if self.aux is None else self.aux.to_dict()
        return d


def x_square(p: int, q: int) -> bool:
    return square_class_case(fundamental_unit(2 * p * q), p).case.is_x


def ambiguous_sizes(p: int, q: int) -> tuple[int, int, int, int]:
    t = ramified_count(p, q)
    e = 0 if i_is_norm(p, q) else 1
    r = t - e - 1
    am = 2 ** r
    ratio = 2 if e == 0 and not x_square(p, q) else 1
    exact = _unit_norm_ratio(p, q, e)
    if exact != ratio:
        raise InconsistencyError(f"unit norm index {exact} != {ratio} for ({p}, {q})")
    if p % 8 == 5 and x_square(p, q):
        raise InconsistencyError(f"x±1 square with p = 5 mod 8 for ({p}, {q})")
    return am, am // ratio, e, r


def strong_generators(p: int, q: int) -> tuple[list[IdealLabel], list[str]]:
    if x_square(p, q):
        return [label("H0"), label("H1"), label("H2")], []
    return [label("H0"), label("H1")], ["[H1] = [H2]", "H1H2 principal"]


# Artin symbols via decomposition counts --------------------------------------------

def _split_count(radicands: tuple[int, ...], ell: int) -> int:
    """Number of quadratic characters (with 1) of the field in which ell splits."""
    from .arith import squarefree_part
    count = 0
    for mask in range(1 << len(radicands)):
        m = 1
        for n, r in enumerate(radicands):
            if mask >> n & 1:
                m *= r
        m = squarefree_part(m) if mask else 1
        if m == 1:
            count += 1
        elif m % ell and kronecker(m, ell) == 1 and (ell != 2 or m % 8 == 1):
            count += 1
    return count


def frobenius(j: str, p: int, q: int, ell: int) -> int:
    """Artin symbol in K_j/k of a prime of k above ell, as +1 (split) or -1 (inert)."""
    K = field_of(j, p, q).radicands
    k = field_of("k", p, q).radicands
    ratio, rem = divmod(_split_count(K, ell), _split_count(k, ell))
    if rem or ratio not in (1, 2):
        raise InconsistencyError(f"decomposition count failed for {ell} in {j}")
    return 1 if ratio == 2 else -1


def artin(j: str, p: int, q: int, lab: IdealLabel, ell: int | None = None) -> int:
    """Artin symbol of a labeled ideal in K_j/k (H1 and H2 share theirs)."""
    out = 1
    for e, prime in zip(lab.exps, (2, p, p, ell)):
        if e:
            if prime is None:
                raise PreconditionError("I needs its auxiliary prime")
            out *= frobenius(j, p, q, prime)
    return out


# the auxiliary prime ----------------------------------------------------------------

@dataclass
class AuxiliaryPrime:
    l: int
    symbols: dict
    certified_by: dict
    proof_route: dict

    def to_dict(self) -> dict:
        return {"l": self.l, "symbols": self.symbols, "certified_by": self.certified_by,
                "proof_route": self.proof_route}


def _proof_route(p: int, q: int, l: int) -> dict:
    """Which field the case analysis names for each of I, H0I, H1I, H0H1I."""
    route = {"I": "K2", "H1I": "K2"}
    if kronecker(2, l) == 1:
        h0 = "K3" if kronecker(2, q) == -1 else "K1"
    elif kronecker(2, q) == 1:
        h0 = "K2"
    else:
        pi1 = gaussian_split(p).form16[2]
        h0 = "K4" if gauss_qr_symbol(GaussInt(1, 1), pi1) == -1 else "K5"
    route["H0I"] = route["H0H1I"] = h0
    return route


def find_auxiliary_prime(p: int, q: int, bound: int | None = None) -> AuxiliaryPrime:
    check_pair(p, q)
    if p % 8 != 1 or x_square(p, q):
        raise PreconditionError("I exists only when p = 1 mod 8 and x±1 is not a square")
    bound = bounds().aux if bound is None else bound
    d = 2 * p * q
    for l in primes(5, bound + 1):
        if l % 4 == 1 and kronecker(d, l) == 1 and kronecker(q, l) == -1:
            break
    else:
        raise InconsistencyError(f"no auxiliary prime below {bound} for ({p}, {q})")
    symbols = {"2pq/l": kronecker(d, l), "q/l": kronecker(q, l), "2p/l": kronecker(2 * p, l),
               "2/l": kronecker(2, l), "p/l": kronecker(p, l), "2/q": kronecker(2, q),
               "p/q": kronecker(p, q)}
    if symbols["2p/l"] != -1:
        raise InconsistencyError(f"(2p/{l}) = 1 contradicts the construction")
    pi1 = gaussian_split(p).form16[2]
    symbols["(1+i)/pi1"] = gauss_qr_symbol(GaussInt(1, 1), pi1)
    certified = {}
    for name in ("I", "H0I", "H1I", "H0H1I"):
        lab = label(name)
        certified[name] = [j for j in ("K1", "K2", "K3") if artin(j, p, q, lab, l) == -1]
    route = _proof_route(p, q, l)
    for name, via in route.items():
        if via in ("K1", "K2", "K3") and via not in certified[name]:
            raise InconsistencyError(f"{name}: Artin symbol in {via} is trivial for l = {l}")
        if via in ("K4", "K5") and certified[name]:
            raise InconsistencyError(f"{name}: unexpected witness {certified[name]}")
    return AuxiliaryPrime(l, symbols, certified, route)


def ambiguous_report(p: int, q: int, bound: int | None = None) -> AmbiguousReport:
    am, am_s, e, r = ambiguous_sizes(p, q)
    gens, rel = strong_generators(p, q)
    aux = None
    if am != am_s:
        aux = find_auxiliary_prime(p, q, bound)
    return AmbiguousReport(p, q, ramified_count(p, q), e, r, am, am_s, gens, rel, aux,
                           hilbert_ledger(p, q))
