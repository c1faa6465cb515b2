from biquadcap.arith import primes


def admissible(p_bound: int, q_bound: int, d_bound: int | None = None):
    ps = [p for p in primes(5, p_bound) if p % 4 == 1]
    qs = [q for q in primes(3, q_bound) if q % 4 == 3]
    return [(p, q) for p in ps for q in qs if d_bound is None or 2 * p * q < d_bound]
