"""Independent feasibility oracle: Fourier-Motzkin elimination over the rationals.

Decides whether ``{x : (n^(l) - n^(1)) . x = 0 for all l, x_k >= 1}`` is
non-empty. By scale invariance that is the same as asking for a solution
with every ``x_k > 0``.
"""
from fractions import Fraction


def _normalise(a, b):
    lead = next((abs(v) for v in a if v != 0), None)
    if lead is None:
        return tuple(a), b
    return tuple(v / lead for v in a), b / lead


def positive_solution_exists(occupations):
    M = len(occupations[0])
    first = occupations[0]
    ineqs = set()  # (a, b) meaning a . x >= b
    for occ in occupations[1:]:
        d = [Fraction(p - q) for p, q in zip(occ, first)]
        ineqs.add(_normalise(d, Fraction(0)))
        ineqs.add(_normalise([-v for v in d], Fraction(0)))
    for k in range(M):
        ineqs.add((tuple(Fraction(int(i == k)) for i in range(M)), Fraction(1)))
    for var in range(M):
        pos = [(a, b) for a, b in ineqs if a[var] > 0]
        neg = [(a, b) for a, b in ineqs if a[var] < 0]
        nxt = {(a, b) for a, b in ineqs if a[var] == 0}
        for ap, bp in pos:
            for an, bn in neg:
                sp, sn = ap[var], -an[var]
                a = [x / sp + y / sn for x, y in zip(ap, an)]
                nxt.add(_normalise(a, bp / sp + bn / sn))
        ineqs = nxt
    return all(b <= 0 for _, b in ineqs)
