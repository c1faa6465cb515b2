"""Fundamental systems of units (FSU) of k = Q(sqrt(2pq), i) and of K1, K2, K3.

Two independent routes are computed for every field:

* the case table: generators chosen from the square classes of the
  quadratic units, each radical realized and squared back exactly;
* a direct computation: find which products of the quadratic units are
  squares in the real subfield, then look for sqrt(xi * u) in the full field.

The two unit lattices (exponent vectors over the quadratic units, torsion
ignored) must coincide.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from .arith import is_prime
from .errors import InconsistencyError, PreconditionError
from .multiquad import MQElem, MQField, is_square, unit_check
from .quadfield import SquareClass, fundamental_unit, square_class_case

FIELD_IDS = ("k", "K1", "K2", "K3")


def check_pair(p: int, q: int) -> None:
    for name, v, r in (("p", p, 1), ("q", q, 3)):
        if not is_prime(v):
            raise PreconditionError(f"{name} is not prime ({name} = {v})")
        if v % 4 != r:
            raise PreconditionError(f"{name} is not congruent to {r} mod 4 ({name} = {v})")


def quadratic_bases(j: str, p: int, q: int) -> tuple[int, ...]:
    """Radicands m of the quadratic units eps_m spanning the real subfield."""
    return {
        "k": (2 * p * q,),
        "K1": (p, 2 * q, 2 * p * q),
        "K2": (q, 2 * p, 2 * p * q),
        "K3": (2, p * q, 2 * p * q),
    }[j]


def field_of(j: str, p: int, q: int) -> MQField:
    b = quadratic_bases(j, p, q)
    return MQField.of(-1, *b[:2]) if j != "k" else MQField.of(-1, b[0])


def real_field_of(j: str, p: int, q: int) -> MQField:
    return MQField.of(*field_of(j, p, q).radicands[1:])


def eps_elem(F: MQField, m: int) -> MQElem:
    u = fundamental_unit(m)
    return F.quadratic(u.x, u.y, m)


# roots of unity ------------------------------------------------------------

@dataclass(frozen=True)
class CyclotomicData:
    """xi = (mu + lam*i)/2, a primitive 2**n0-th root of unity."""

    n0: int
    mu: MQElem
    lam: MQElem

    @property
    def xi(self) -> MQElem:
        F = self.mu.field
        return (self.mu + self.lam * F.sqrt(-1)) / 2


def n0_of(F: MQField) -> CyclotomicData:
    if not F.contains_sqrt(-1):
        raise PreconditionError(f"{F} does not contain i")
    if F.contains_sqrt(2):
        r2 = F.sqrt(2)
        data = CyclotomicData(3, r2, r2)
    else:
        data = CyclotomicData(2, F.zero(), F.scalar(2))
    xi = data.xi
    order = 1 << data.n0
    if xi ** order != 1 or xi ** (order // 2) != -1:
        raise InconsistencyError(f"xi is not a primitive {order}-th root of unity")
    return data


# unit symbols --------------------------------------------------------------

def _name(m: int, p: int, q: int) -> str:
    for label, val in (("2", 2), ("p", p), ("q", q), ("2p", 2 * p), ("2q", 2 * q),
                       ("pq", p * q), ("2pq", 2 * p * q)):
        if m == val:
            return f"ε_{label}"
    return f"ε_{m}"


@dataclass(frozen=True)
class Certificate:
    """root**2 == square, checked exactly in ``field``."""

    claim: str
    field: tuple[int, ...]
    square: str
    root: str

    def to_dict(self) -> dict:
        return {"claim": self.claim, "field": list(self.field),
                "square": self.square, "root": self.root}


@dataclass(frozen=True)
class UnitSymbol:
    """A generator such as sqrt(i*eps_2q), with its exponent vector and value.

    ``level`` 0 is a product of units, 1 a square root, 2 the nested
    sqrt(xi*sqrt(...)).  ``twist`` is "", "i" or "ξ".
    """

    factors: tuple[int, ...]
    level: int
    twist: str
    text: str
    concrete: str
    vector: tuple[Fraction, ...]
    value: MQElem
    xi_power: int | None = None

    def to_dict(self) -> dict:
        d = {"symbol": self.text, "concrete": self.concrete,
             "vector": [str(v) for v in self.vector], "value": self.value.to_text()}
        if self.xi_power is not None:
            d["xi_power"] = self.xi_power
        return d


def _render(factors, level, twist, namer) -> str:
    inner = "".join(namer(m) + ("²" if factors.count(m) == 2 else "")
                    for n, m in enumerate(factors) if m not in factors[:n])
    if level == 0:
        return inner
    if level == 1:
        return f"√({twist}{inner})"
    return f"√(ξ√({inner}))"


def make_symbol(F: MQField, bases: Sequence[int], factors: Sequence[int], level: int,
                twist: str, p: int, q: int, certs: list[Certificate]) -> UnitSymbol:
    """Realize a generator in F and record the square-root certificate."""
    factors = tuple(factors)
    prod_ = F.one()
    for m in factors:
        prod_ = prod_ * eps_elem(F, m)
    generic = _render(factors, level, twist, lambda m: _name(m, p, q))
    concrete = _render(factors, level, twist, lambda m: f"ε_{m}")
    weight = Fraction(1, 1 << level)
    vec = tuple(weight * factors.count(b) for b in bases)
    xi_power = None
    if level == 0:
        value = prod_
    elif level == 1:
        target = prod_ * F.sqrt(-1) if twist == "i" else prod_
        value = is_square(target)
        if value is None:
            raise InconsistencyError(f"{concrete} is not in {F}")
        certs.append(Certificate(concrete, F.radicands, target.to_text(), value.to_text()))
    else:
        inner = is_square(prod_)
        if inner is None:
            raise InconsistencyError(f"√({concrete}) inner root is not in {F}")
        certs.append(Certificate(f"√({''.join(f'ε_{m}' for m in factors)})", F.radicands,
                                 prod_.to_text(), inner.to_text()))
        xi = n0_of(F).xi
        for k in (1, 5, 3, 7):
            target = xi ** k * inner
            value = is_square(target)
            if value is not None:
                xi_power = k
                certs.append(Certificate(concrete, F.radicands, target.to_text(), value.to_text()))
                break
        else:
            raise InconsistencyError(f"{concrete} is not in {F} for any primitive 8th root")
    if not unit_check(value):
        raise InconsistencyError(f"{concrete} realized as {value} is not a unit")
    return UnitSymbol(factors, level, twist, generic, concrete, vec, value, xi_power)


# lattice helpers -----------------------------------------------------------

def _det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def _coords(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    # solve sum c_i basis_i = v by Cramer's rule
    n = len(basis)
    d = _det(basis)
    out = []
    for i in range(n):
        rows = [list(b) for b in basis]
        rows[i] = list(v)
        out.append(_det(rows) / d)
    return out


def same_lattice(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> bool:
    """True iff the row lattices spanned by a and b coincide."""
    if abs(_det(a)) != abs(_det(b)) or _det(a) == 0:
        return False
    return all(c.denominator == 1 for v in a for c in _coords(b, v))


# the direct route -----------------------------------------------------------

@dataclass(frozen=True)
class UnitLattice:
    """E_K modulo torsion as exponent vectors over the quadratic units."""

    bases: tuple[int, ...]
    real_basis: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[Fraction, ...], ...]
    hasse_Q: int
    hasse_vector: tuple[Fraction, ...] | None
    alt_route_Q: int


def _real_squares(F0: MQField, units: list[MQElem]) -> list[tuple[int, ...]]:
    out = []
    for w in product((0, 1), repeat=len(units)):
        if not any(w):
            continue
        x = F0.one()
        for wi, u in zip(w, units):
            if wi:
                x = x * u
        if is_square(x) is not None:
            out.append(w)
    return out


def _f2_echelon(vectors: list[tuple[int, ...]], n: int) -> list[tuple[list[int], int]]:
    rows: list[tuple[list[int], int]] = []
    for v in vectors:
        v = list(v)
        for r, piv in rows:
            if v[piv]:
                v = [(a + b) % 2 for a, b in zip(v, r)]
        if any(v):
            piv = v.index(1)
            rows = [([(a + b) % 2 for a, b in zip(r, v)] if r[piv] else r, pv) for r, pv in rows]
            rows.append((v, piv))
    return rows


@lru_cache(maxsize=512)
def unit_lattice(j: str, p: int, q: int) -> UnitLattice:
    """Compute E_K directly: squares among products of quadratic units, then Hasse."""
    check_pair(p, q)
    bases = quadratic_bases(j, p, q)
    n = len(bases)
    F = field_of(j, p, q)
    F0 = real_field_of(j, p, q)
    real_units = [eps_elem(F0, m) for m in bases]
    echelon = _f2_echelon(_real_squares(F0, real_units), n)
    pivots = {pv for _, pv in echelon}
    half = Fraction(1, 2)
    basis0: list[tuple[Fraction, ...]] = [tuple(half * a for a in r) for r, _ in echelon]
    basis0 += [tuple(Fraction(int(i == c)) for i in range(n)) for c in range(n) if c not in pivots]
    basis0.sort(reverse=True)

    # realize the real basis units
    def realize(vec, field):
        x = field.one()
        w = [int(v * 2) % 2 for v in vec]
        z = [int(v - Fraction(wi, 2)) for v, wi in zip(vec, w)]
        sq = field.one()
        for wi, m in zip(w, bases):
            if wi:
                sq = sq * eps_elem(field, m)
        root = is_square(sq) if any(w) else field.one()
        if root is None:
            raise InconsistencyError(f"lattice vector {vec} does not realize in {field}")
        x = root
        for zi, m in zip(z, bases):
            x = x * eps_elem(field, m) ** zi
        return x

    units_K = [realize(v, F) for v in basis0]
    units_0 = [realize(v, F0) for v in basis0]
    cyc = n0_of(F)
    xi = cyc.xi
    mu0 = cyc.mu.in_field(F0) if cyc.n0 == 3 else F0.zero()
    hits, alt_hits = [], []
    for c in product((0, 1), repeat=n):
        u, u0 = F.one(), F0.one()
        for ci, a, b in zip(c, units_K, units_0):
            if ci:
                u, u0 = u * a, u0 * b
        if is_square(xi * u) is not None:
            hits.append(c)
        if is_square((mu0 + 2) * u0) is not None:
            alt_hits.append(c)
    if len(hits) > 1 or len(alt_hits) > 1:
        raise InconsistencyError(f"{j}({p},{q}): several Hasse classes {hits} / {alt_hits}")
    Q = 2 if hits else 1
    alt_Q = 2 if alt_hits else 1
    hasse_vec = None
    full = list(basis0)
    if hits:
        c = hits[0]
        hasse_vec = tuple(sum((Fraction(ci) * b[i] for ci, b in zip(c, basis0)), Fraction(0)) / 2
                          for i in range(n))
        # replace one basis vector involved in c by the new half vector
        k = c.index(1)
        full[k] = hasse_vec
    return UnitLattice(bases, tuple(basis0), tuple(full), Q, hasse_vec, alt_Q)


# the case-table route --------------------------------------------------------

@dataclass
class FsuReport:
    field_id: str
    p: int
    q: int
    radicands: tuple[int, ...]
    torsion: str
    generators: list[UnitSymbol]
    plus_generators: list[UnitSymbol]
    hasse_Q: int
    branch: str
    certificates: list[Certificate] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def symbols(self) -> list[str]:
        return [self.torsion] + [g.text for g in self.generators]

    def to_dict(self) -> dict:
        return {
            "field": self.field_id, "p": self.p, "q": self.q,
            "radicands": list(self.radicands), "torsion": self.torsion,
            "generators": [g.to_dict() for g in self.generators],
            "plus_generators": [g.to_dict() for g in self.plus_generators],
            "hasse_Q": self.hasse_Q, "branch": self.branch,
            "certificates": [c.to_dict() for c in self.certificates],
            "notes": self.notes,
        }


def _classes(p: int, q: int) -> tuple[SquareClass, SquareClass]:
    check_pair(p, q)
    u = fundamental_unit(2 * p * q)
    if u.norm != 1:
        raise InconsistencyError(f"N(eps_{2 * p * q}) = -1")
    return square_class_case(u, p), square_class_case(fundamental_unit(p * q), p)


def _build(j: str, p: int, q: int, gens: list[tuple], plus: list[tuple], Q: int,
           branch: str, notes: dict | None = None) -> FsuReport:
    F = field_of(j, p, q)
    F0 = real_field_of(j, p, q)
    bases = quadratic_bases(j, p, q)
    certs: list[Certificate] = []
    g = [make_symbol(F, bases, *args, p, q, certs) for args in gens]
    g0 = [make_symbol(F0, bases, *args, p, q, certs) for args in plus]
    rep = FsuReport(j, p, q, F.radicands, "ξ_8" if j == "K3" else "i", g, g0, Q, branch,
                    certs, dict(notes or {}))
    _cross_check(rep)
    return rep


def _cross_check(rep: FsuReport) -> None:
    lat = unit_lattice(rep.field_id, rep.p, rep.q)
    table = [s.vector for s in rep.generators]
    table0 = [s.vector for s in rep.plus_generators]
    problems = []
    if not same_lattice(table, lat.basis):
        problems.append(f"FSU lattice {table} != computed {lat.basis}")
    if table0 and not same_lattice(table0, lat.real_basis):
        problems.append(f"real FSU lattice {table0} != computed {lat.real_basis}")
    if lat.hasse_Q != rep.hasse_Q or lat.alt_route_Q != rep.hasse_Q:
        problems.append(f"Hasse index {rep.hasse_Q} != computed {lat.hasse_Q}/{lat.alt_route_Q}")
    if problems:
        raise InconsistencyError(f"{rep.field_id}({rep.p},{rep.q}): " + "; ".join(problems))
    rep.notes["lattice_check"] = "ok"


def fsu_k(p: int, q: int) -> FsuReport:
    sc, _ = _classes(p, q)
    d = 2 * p * q
    if sc.case.is_x:
        gens, Q, branch = [((d,), 1, "i")], 2, "x±1 square"
    else:
        gens, Q, branch = [((d,), 0, "")], 1, "x±1 not square"
    return _build("k", p, q, gens, [((d,), 0, "")], Q, branch, {"eps_2pq_class": sc.case.value})


def fsu_K1(p: int, q: int) -> FsuReport:
    sc, _ = _classes(p, q)
    d, tq = 2 * p * q, 2 * q
    if sc.case.is_2p:
        last, branch = ((d,), 1, ""), "case 2"
    else:
        last, branch = ((tq, d), 1, ""), "case 1"
    gens = [((p,), 0, ""), ((tq,), 1, "i"), last]
    plus = [((p,), 0, ""), ((tq,), 0, ""), last]
    return _build("K1", p, q, gens, plus, 2, branch, {"eps_2pq_class": sc.case.value})


def fsu_K2(p: int, q: int) -> FsuReport:
    sc, _ = _classes(p, q)
    d, tp = 2 * p * q, 2 * p
    n2p = fundamental_unit(tp).norm
    sub = "(ii)" if sc.case.is_p else "(i)"
    if n2p == 1:
        if sc.case.is_p:
            gens = [((q,), 1, "i"), ((tp,), 1, "i"), ((d,), 1, "")]
            plus = [((q,), 0, ""), ((q, tp), 1, ""), ((d,), 1, "")]
        else:
            gens = [((q,), 1, "i"), ((tp,), 1, "i"), ((d,), 1, "i")]
            plus = [((q, tp), 1, ""), ((q, d), 1, ""), ((tp, d), 1, "")]
        branch = "case (1)" + sub
    else:
        last = ((d,), 1, "") if sc.case.is_p else ((q, d), 1, "")
        gens = [((q,), 1, "i"), ((tp,), 0, ""), last]
        plus = [((q,), 0, ""), ((tp,), 0, ""), last]
        branch = "case (2)" + sub
    return _build("K2", p, q, gens, plus, 2, branch,
                  {"eps_2pq_class": sc.case.value, "norm_eps_2p": n2p})


@dataclass(frozen=True)
class HasseK3:
    Q: int
    sign: int | None
    inner: MQElem
    root: MQElem | None
    eps2_power: int = 0


def hasse_Q_K3(p: int, q: int) -> HasseK3:
    """Q = 2 iff ±(2 + sqrt2)*eps_2^e*sqrt(eps_pq*eps_2pq) is a square for some e in {0, 1}."""
    sc, sa = _classes(p, q)
    if not (sc.case.is_x and sa.case.is_x):
        raise PreconditionError("the Hasse test applies only when x±1 and a±1 are both squares")
    F0 = real_field_of("K3", p, q)
    inner = is_square(eps_elem(F0, p * q) * eps_elem(F0, 2 * p * q))
    if inner is None:
        raise InconsistencyError("sqrt(eps_pq*eps_2pq) is not in the real subfield")
    base = F0.sqrt(2) + 2
    e2 = eps_elem(F0, 2)
    for e, sign in product((0, 1), (1, -1)):
        root = is_square(base * e2 ** e * inner * sign)
        if root is not None:
            return HasseK3(2, sign, inner, root, e)
    return HasseK3(1, None, inner, None)


def fsu_K3(p: int, q: int) -> FsuReport:
    sc, sa = _classes(p, q)
    d, pq = 2 * p * q, p * q
    xs, as_ = sc.case.is_x, sa.case.is_x
    notes = {"eps_2pq_class": sc.case.value, "eps_pq_class": sa.case.label("a")}
    e2 = ((2,), 0, "")
    if xs and as_:
        h = hasse_Q_K3(p, q)
        Q = h.Q
        plus = [e2, ((pq,), 1, ""), ((d,), 1, "")]
        if Q == 1:
            gens, branch = plus, "case (1)(i)"
        else:
            top = (2, 2, pq, d) if h.eps2_power else (pq, d)
            gens, branch = [e2, ((pq,), 1, ""), (top, 2, "ξ")], "case (1)(ii)"
            notes["hasse_sign"] = h.sign
            notes["hasse_eps2_power"] = h.eps2_power
    elif xs:
        gens = plus = [e2, ((pq,), 0, ""), ((d,), 1, "")]
        Q, branch = 1, "case (2)"
    elif as_:
        gens = plus = [e2, ((d,), 0, ""), ((pq,), 1, "")]
        Q, branch = 1, "case (3)"
    else:
        gens = plus = [e2, ((pq,), 0, ""), ((pq, d), 1, "")]
        Q, branch = 1, "case (4)"
    rep = _build("K3", p, q, gens, plus, Q, branch, notes)
    for g in rep.generators:
        if g.xi_power is not None:
            rep.notes["xi_power"] = g.xi_power
    return rep


def fsu(j: str, p: int, q: int) -> FsuReport:
    return {"k": fsu_k, "K1": fsu_K1, "K2": fsu_K2, "K3": fsu_K3}[j](p, q)


def two_plus_sqrt2_exclusions(p: int, q: int) -> list[tuple[int, int, int]]:
    """Exponents (i, j, k) with (2+sqrt2) eps_2^i eps_pq^j eps_2pq^k a square (expected: none)."""
    F0 = real_field_of("K3", p, q)
    units = [eps_elem(F0, m) for m in (2, p * q, 2 * p * q)]
    base = F0.sqrt(2) + 2
    bad = []
    for ex in product((0, 1), repeat=3):
        x = base
        for e, u in zip(ex, units):
            if e:
                x = x * u
        if is_square(x) is not None:
            bad.append(ex)
    return bad


# norms down to k ---------------------------------------------------------------

@dataclass(frozen=True)
class NormGroup:
    """N_{K/k}(E_K) inside E_k = <i> x <eta>.

    Elements of E_k are coded as (t mod 4, m) for i**t * eta**m.
    """

    j: str
    eta: str
    images: tuple[tuple[int, int], ...]
    label: str
    index: int


def _express_in_k(x: MQElem, eta: MQElem, eta_weight: Fraction, vec_2pq: Fraction,
                  i: MQElem) -> tuple[int, int]:
    m = vec_2pq / eta_weight
    if m.denominator != 1:
        raise InconsistencyError(f"norm exponent {vec_2pq} is not a multiple of {eta_weight}")
    rest = x / eta ** int(m)
    for t in range(4):
        if rest == i ** t:
            return t, int(m)
    raise InconsistencyError(f"{rest} is not a fourth root of unity")


def _hnf2(rows: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Reduce generators of a subgroup of Z/4 x Z to <i^a> and i^t0 * eta^m."""
    from math import gcd
    rows = [list(r) for r in rows] + [[4, 0]]
    while sum(1 for r in rows if r[1]) > 1:
        live = sorted((r for r in rows if r[1]), key=lambda r: abs(r[1]))
        small = live[0]
        for r in live[1:]:
            f = r[1] // small[1]
            r[0] -= f * small[0]
            r[1] -= f * small[1]
    lead = next((r for r in rows if r[1]), None)
    if lead is None:
        raise InconsistencyError("norm group has infinite index")
    if lead[1] < 0:
        lead = [-lead[0], -lead[1]]
    a = 0
    for r in rows:
        if not r[1]:
            a = gcd(a, r[0])
    return a, lead[0] % a, lead[1]


def _index(rows: list[tuple[int, int]]) -> int:
    a, _, m = _hnf2(rows)
    return a * m


_FREE = {
    "√(iε_2pq)": {1: "√(iε_2pq)", 2: "iε_2pq", 4: "ε_2pq²"},
    "ε_2pq": {1: "ε_2pq", 2: "ε_2pq²"},
}


def _label(images: list[tuple[int, int]], eta: str) -> str:
    a, t0, m = _hnf2(images)
    tor = {1: "i", 2: "-1", 4: "1"}[a]
    free = _FREE[eta].get(m, f"({eta})^{m}")
    if a == 1 and free == "iε_2pq":
        free = "ε_2pq"
    elif a > 1 and t0:
        free = {1: "i", 2: "-", 3: "-i"}[t0] + free
    return f"⟨{tor}, {free}⟩"


def norm_unit_group(j: str, rep: FsuReport) -> NormGroup:
    """Exact norms of the realized generators (and torsion) from K_j to k."""
    p, q = rep.p, rep.q
    F = field_of(j, p, q)
    k = field_of("k", p, q)
    eta_sym = fsu_k(p, q).generators[0]
    eta = eta_sym.value.in_field(F)
    i = F.sqrt(-1)
    pos = quadratic_bases(j, p, q).index(2 * p * q)
    images = [_express_in_k(n0_of(F).xi.norm(k), eta, eta_sym.vector[0], Fraction(0), i)]
    for g in rep.generators:
        images.append(_express_in_k(g.value.norm(k), eta, eta_sym.vector[0],
                                    2 * g.vector[pos], i))
    return NormGroup(j, eta_sym.text, tuple(images), _label(images, eta_sym.text), _index(images))


def unit_index(p: int, q: int, j: str) -> int:
    """[E_k : N_{K_j/k}(E_{K_j})]."""
    return norm_unit_group(j, fsu(j, p, q)).index
