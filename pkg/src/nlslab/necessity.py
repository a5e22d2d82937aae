"""Does a superposition need noiseless attenuation, or is amplification enough?

With attenuation switched off (``nu = 1``) the lossless branch of the
protocol applies ``prod_k (g_k tau_k)**n_k`` to each term. The input is
preserved iff that factor is the same for every term, i.e. with
``x_k = log(g_k tau_k)`` the linear system ``n^(l) . x = c`` holds for all
terms ``l``. Gains above ``1/tau_k`` need every ``x_k > 0``; any positive
solution can be scaled (``x -> C x``) so the noise terms are suppressed as
strongly as desired.

The decision is made exactly: occupation numbers are integers, so the null
space of the difference matrix is computed over the rationals. Only when
that null space has dimension two or more is a small LP used to look for a
strictly positive member.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from nlslab.errors import DomainError

REASONS = ("vacuum_term", "overdetermined", "nonpositive_solution_only", "feasible")

EIGEN_RTOL = 1e-10


@dataclass(frozen=True)
class SuperpositionSpec:
    """Pure state ``sum_l c_l |n^(l)>`` given as ``(occupation, amplitude)`` terms."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((tuple(int(v) for v in occ), complex(c)) for occ, c in self.terms)
        if not terms:
            raise DomainError("a superposition needs at least one term")
        widths = {len(occ) for occ, _ in terms}
        if len(widths) != 1 or 0 in widths:
            raise DomainError("every term needs the same, nonzero number of modes")
        occs = [occ for occ, _ in terms]
        if len(set(occs)) != len(occs):
            raise DomainError("occupation vectors must be pairwise distinct")
        if any(n < 0 for occ in occs for n in occ):
            raise DomainError("occupation numbers must be non-negative")
        if any(c == 0 for _, c in terms):
            raise DomainError("amplitudes must be nonzero")
        norm = math.sqrt(sum(abs(c) ** 2 for _, c in terms))
        object.__setattr__(self, "terms", tuple((occ, c / norm) for occ, c in terms))

    @classmethod
    def from_family(cls, family):
        return cls(tuple(family.superposition()))

    @property
    def n_modes(self):
        return len(self.terms[0][0])

    @property
    def n_terms(self):
        return len(self.terms)

    def occupations(self):
        return [occ for occ, _ in self.terms]


@dataclass(frozen=True)
class Verdict:
    attenuation_required: bool
    reason: str
    witness: Optional[tuple] = None

    def __post_init__(self):
        if self.reason not in REASONS:
            raise ValueError(f"unknown reason {self.reason!r}")
        if (self.witness is None) != self.attenuation_required:
            raise ValueError("a witness is given exactly when attenuation is not required")
        if self.witness is not None and not all(x > 0 for x in self.witness):
            raise ValueError("witness entries must be positive")


def _difference_rows(occs):
    first = occs[0]
    return [[Fraction(a - b) for a, b in zip(occ, first)] for occ in occs[1:]]


def rational_null_space(rows, n_cols):
    """Basis of ``{x : A x = 0}`` over the rationals, via reduced row echelon form."""
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][col]
        a[r] = [v / p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n_cols
        v[fcol] = Fraction(1)
        for row, pcol in enumerate(pivots):
            v[pcol] = -a[row][fcol]
        basis.append(v)
    return basis


def _integer_vector(v):
    lcm = math.lcm(*(x.denominator for x in v))
    ints = [int(x * lcm) for x in v]
    g = math.gcd(*ints) or 1
    return [x // g for x in ints]


def _positive_member(basis):
    """A strictly positive vector in ``span(basis)``, or None.

    Maximises ``s`` subject to ``B y >= s`` componentwise with ``|y_i| <= 1``
    and ``s <= 1``; the span meets the open orthant iff the optimum is > 0.
    """
    B = np.array([[float(x) for x in v] for v in basis]).T  # n_modes x k
    n, k = B.shape
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-B, np.ones((n, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), bounds=[(-1, 1)] * k + [(None, 1)], method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    x = B @ res.x[:k]
    return x / x.min()


def requires_attenuation(spec: SuperpositionSpec) -> Verdict:
    """Decide whether amplification alone can preserve ``spec`` through loss.

    The witness is a positive ``x`` (``x_k = log(g_k tau_k)``) up to scale,
    normalised so its smallest entry is 1.
    """
    occs = spec.occupations()
    M = spec.n_modes
    if len(occs) == 1:
        return Verdict(False, "feasible", (1.0,) * M)
    if any(sum(occ) == 0 for occ in occs):
        # The vacuum row forces c = 0, so every other row needs a
        # non-positive coordinate.
        return Verdict(True, "vacuum_term")
    basis = rational_null_space(_difference_rows(occs), M)
    if not basis:
        return Verdict(True, "overdetermined")
    if len(basis) == 1:
        v = _integer_vector(basis[0])
        if all(x > 0 for x in v) or all(x < 0 for x in v):
            v = [abs(x) for x in v]
            m = min(v)
            return Verdict(False, "feasible", tuple(x / m for x in v))
        return Verdict(True, "nonpositive_solution_only")
    x = _positive_member(basis)
    if x is None:
        return Verdict(True, "nonpositive_solution_only")
    return Verdict(False, "feasible", tuple(float(v) for v in x))


def equal_channel_criterion(spec: SuperpositionSpec) -> bool:
    """True iff all terms carry the same total photon number."""
    return len({sum(occ) for occ in spec.occupations()}) == 1


def requires_attenuation_equal_channels(spec: SuperpositionSpec) -> bool:
    """The feasibility question restricted to ``x_1 = ... = x_M > 0``.

    Then ``n^(l) . x = x * total_l``, so a solution exists iff all totals agree.
    Decided directly on the linear system rather than through the totals.
    """
    rows = _difference_rows(spec.occupations())
    return any(sum(r) != 0 for r in rows)


def amplifier_eigencheck(spec: SuperpositionSpec, products):
    """Is ``spec`` an eigenvector of ``prod_k (g_k tau_k)**n_k``?

    Returns ``(is_eigenstate, eigenvalue)``; the eigenvalue is the first
    term's factor (meaningful only when ``is_eigenstate``).
    """
    products = [float(p) for p in products]
    if len(products) != spec.n_modes:
        raise DomainError("need one g*tau product per mode")
    if any(p <= 0 for p in products):
        raise DomainError("g*tau products must be positive")
    logs = [sum(n * math.log(p) for n, p in zip(occ, products)) for occ in spec.occupations()]
    spread = max(logs) - min(logs)
    return math.expm1(spread) <= EIGEN_RTOL, math.exp(logs[0])


def attenuator_eigencheck(spec: SuperpositionSpec, nus):
    """Is ``spec`` an eigenvector of ``prod_k nu_k**n_k``?"""
    return amplifier_eigencheck(spec, nus)


def witness_gains(witness, taus, scale=1.0):
    """Gains ``g_k = exp(scale * x_k) / tau_k`` realising a witness."""
    if len(witness) != len(taus):
        raise DomainError("witness and tau lengths differ")
    return tuple(math.exp(scale * x) / t for x, t in zip(witness, taus))
