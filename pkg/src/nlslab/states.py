"""Input state families and their textual specification.

Text format (whitespace separated ``key=value`` pairs)::

    family=w M=3
    family=ghz M=4
    family=noon n=3
    family=tmsv gamma=0.2 nmax=12 N=1
    family=single_rail c0=0.6 c1=0.8
    family=bipartite
    family=custom terms=[(1,0,1):0.707,(0,1,0):0.707]

For ``tmsv`` the optional ``N`` is the amplifier truncation used by default
when the state is sent through the protocol; ``nmax`` defaults to the
smallest cutoff whose discarded probability mass is below 1e-18.

The two-mode squeezed vacuum is renormalised numerically inside the
truncated space. Written with the infinite-series prefactor, the
normalisation constant is ``sqrt(1 - gamma**2)``; ``sqrt(1 - gamma)`` is not
a normalisation of ``sum gamma**n |n,n>``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional


from nlslab.errors import DomainError
from nlslab.fock import FockCutoff, MultiModeState

FAMILIES = ("single_rail", "bipartite", "w", "ghz", "tmsv", "noon", "custom")

TMSV_TAIL = 1e-18


class StateSpecError(DomainError):
    """Unparseable state specification; ``position`` is a 0-based column."""

    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} at column {position}: {text!r}"
        super().__init__(message)


def default_tmsv_nmax(gamma, tail=TMSV_TAIL):
    """Smallest ``n_max`` with ``gamma**(2(n_max+1)) / (1-gamma**2) < tail``."""
    n = 1
    while gamma ** (2 * (n + 1)) / (1.0 - gamma**2) >= tail:
        n += 1
    return n


@dataclass(frozen=True)
class StateFamily:
    kind: str
    M: Optional[int] = None
    c0: complex = 0.0
    c1: complex = 0.0
    gamma: float = 0.0
    n_max: Optional[int] = None
    n: Optional[int] = None
    amp_cutoff: Optional[int] = None
    terms: tuple = ()

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise DomainError(f"unknown state family {self.kind!r}")
        if self.kind in ("w", "ghz") and (self.M is None or self.M < 2):
            raise DomainError(f"{self.kind} needs M >= 2")
        if self.kind == "single_rail" and abs(abs(self.c0) ** 2 + abs(self.c1) ** 2 - 1.0) > 1e-10:
            raise DomainError("single-rail amplitudes must satisfy |c0|^2 + |c1|^2 = 1")
        if self.kind == "tmsv":
            if not 0.0 < self.gamma < 1.0:
                raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
            if self.n_max is None:
                object.__setattr__(self, "n_max", default_tmsv_nmax(self.gamma))
            if self.n_max < 1:
                raise DomainError("n_max must be >= 1")
        if self.kind == "noon" and (self.n is None or self.n < 1):
            raise DomainError("noon needs n >= 1")
        if self.kind == "custom":
            if not self.terms:
                raise DomainError("custom state needs at least one term")
            widths = {len(occ) for occ, _ in self.terms}
            if len(widths) != 1:
                raise DomainError("all custom terms need the same number of modes")
            occs = [tuple(occ) for occ, _ in self.terms]
            if len(set(occs)) != len(occs):
                raise DomainError("custom terms must have distinct occupation vectors")
            if any(n < 0 for occ in occs for n in occ):
                raise DomainError("occupation numbers must be non-negative")

    # constructors -------------------------------------------------------

    @classmethod
    def single_rail(cls, c0, c1):
        return cls("single_rail", M=1, c0=complex(c0), c1=complex(c1))

    @classmethod
    def bipartite(cls):
        return cls("bipartite", M=2)

    @classmethod
    def w(cls, M):
        return cls("w", M=int(M))

    @classmethod
    def ghz(cls, M):
        return cls("ghz", M=int(M))

    @classmethod
    def tmsv(cls, gamma, n_max=None, amp_cutoff=None):
        return cls("tmsv", M=2, gamma=float(gamma), n_max=n_max, amp_cutoff=amp_cutoff)

    @classmethod
    def noon(cls, n):
        return cls("noon", M=2, n=int(n))

    @classmethod
    def custom(cls, terms):
        terms = tuple((tuple(int(v) for v in occ), complex(c)) for occ, c in terms)
        return cls("custom", M=len(terms[0][0]) if terms else None, terms=terms)

    # derived ------------------------------------------------------------

    @property
    def n_modes(self):
        return self.M

    def superposition(self):
        """Unnormalised ``(occupation, amplitude)`` terms of the state."""
        if self.kind == "single_rail":
            return [((0,), self.c0), ((1,), self.c1)]
        if self.kind == "bipartite":
            return [((1, 0), 1.0), ((0, 1), 1.0)]
        if self.kind == "w":
            return [(tuple(int(k == j) for k in range(self.M)), 1.0) for j in range(self.M)]
        if self.kind == "ghz":
            return [((0,) * self.M, 1.0), ((1,) * self.M, 1.0)]
        if self.kind == "tmsv":
            return [((k, k), self.gamma**k) for k in range(self.n_max + 1)]
        if self.kind == "noon":
            return [((self.n, 0), 1.0), ((0, self.n), 1.0)]
        return list(self.terms)

    def default_cutoff(self):
        terms = self.superposition()
        return FockCutoff(tuple(max(occ[k] for occ, _ in terms) for k in range(self.M)))

    def describe(self):
        if self.kind == "w":
            return f"W state M={self.M}"
        if self.kind == "ghz":
            return f"GHZ state M={self.M}"
        if self.kind == "noon":
            return f"NOON state n={self.n}"
        if self.kind == "tmsv":
            return f"TMSV gamma={self.gamma:g} nmax={self.n_max}"
        if self.kind == "single_rail":
            return f"single-rail qubit c0={_num(self.c0)} c1={_num(self.c1)}"
        if self.kind == "bipartite":
            return "bipartite single photon"
        return f"custom state with {len(self.terms)} terms"


def build(family: StateFamily, cutoff=None) -> MultiModeState:
    """Normalised pure state of ``family`` on ``cutoff`` (default: tightest fit)."""
    need = family.default_cutoff()
    if cutoff is None:
        cutoff = need
    elif not isinstance(cutoff, FockCutoff):
        cutoff = FockCutoff(tuple(cutoff))
    if cutoff.n_modes != need.n_modes:
        raise DomainError(f"{family.describe()} has {need.n_modes} modes, cutoff has {cutoff.n_modes}")
    for have, want in zip(cutoff.per_mode_max, need.per_mode_max):
        if have < want:
            raise DomainError(f"cutoff {cutoff.per_mode_max} too small for {family.describe()}")
    return MultiModeState.from_terms(family.superposition(), cutoff).normalized()


# parsing ----------------------------------------------------------------

_PAIR = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*")
_TERM = re.compile(r"\s*\(\s*([0-9\s,]+?)\s*\)\s*:\s*([^,\]]+?)\s*(,|\])")


def _parse_terms(text, start, full):
    if start >= len(text) or text[start] != "[":
        raise StateSpecError("expected '[' to open terms", full, start)
    pos = start + 1
    terms = []
    while True:
        m = _TERM.match(text, pos)
        if m is None:
            raise StateSpecError("malformed term, expected (n1,...,nM):amplitude", full, pos)
        try:
            occ = tuple(int(v) for v in m.group(1).replace(" ", "").split(",") if v != "")
        except ValueError:
            raise StateSpecError("occupation numbers must be integers", full, m.start(1)) from None
        try:
            amp = complex(m.group(2).replace(" ", ""))
        except ValueError:
            raise StateSpecError("bad amplitude", full, m.start(2)) from None
        terms.append((occ, amp))
        pos = m.end()
        if m.group(3) == "]":
            return terms, pos


_INT_KEYS = {"M", "n", "nmax", "N"}
_FLOAT_KEYS = {"gamma"}
_COMPLEX_KEYS = {"c0", "c1"}


def parse_state_spec(text: str) -> StateFamily:
    """Parse the ``key=value`` state format into a :class:`StateFamily`."""
    fields = {}
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _PAIR.match(text, pos)
        if m is None:
            raise StateSpecError("expected key=value", text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
        key = m.group(1)
        pos = m.end()
        if key in fields:
            raise StateSpecError(f"duplicate key {key!r}", text, m.start(1))
        if key == "terms":
            fields[key], pos = _parse_terms(text, pos, text)
            continue
        vm = re.compile(r"(\S+)").match(text, pos)
        if vm is None:
            raise StateSpecError(f"missing value for {key!r}", text, pos)
        raw = vm.group(1)
        if key not in _INT_KEYS | _FLOAT_KEYS | _COMPLEX_KEYS | {"family"}:
            raise StateSpecError(f"unknown key {key!r}", text, m.start(1))
        try:
            if key in _INT_KEYS:
                fields[key] = int(raw)
            elif key in _FLOAT_KEYS:
                fields[key] = float(raw)
            elif key in _COMPLEX_KEYS:
                fields[key] = complex(raw)
            else:
                fields[key] = raw.lower()
        except ValueError:
            raise StateSpecError(f"bad value for {key!r}", text, pos) from None
        pos = vm.end()
    family = fields.pop("family", None)
    if family is None:
        raise StateSpecError("missing family=", text, 0)
    try:
        if family == "w":
            fam = StateFamily.w(fields.pop("M"))
        elif family == "ghz":
            fam = StateFamily.ghz(fields.pop("M"))
        elif family == "noon":
            fam = StateFamily.noon(fields.pop("n"))
        elif family == "tmsv":
            fam = StateFamily.tmsv(fields.pop("gamma"), fields.pop("nmax", None), fields.pop("N", None))
        elif family == "single_rail":
            c0 = fields.pop("c0", 1 / math.sqrt(2))
            c1 = fields.pop("c1", 1 / math.sqrt(2))
            norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
            fam = StateFamily.single_rail(c0 / norm, c1 / norm)
        elif family == "bipartite":
            fam = StateFamily.bipartite()
        elif family == "custom":
            fam = StateFamily.custom(fields.pop("terms"))
        else:
            raise StateSpecError(f"unknown family {family!r}", text, text.find(family))
    except KeyError as exc:
        raise StateSpecError(f"family {family!r} needs {exc.args[0]}=", text, len(text)) from None
    if fields:
        key = next(iter(fields))
        raise StateSpecError(f"key {key!r} not used by family {family!r}", text, text.find(key + "="))
    return fam


def _num(c):
    return f"{c.real:g}" if c.imag == 0 else f"{c:g}"
