"""Truncated multimode Fock space: indexing, states and density operators.

Storage is dense. A space with per-mode cutoffs ``N_1 .. N_M`` has dimension
``prod(N_k + 1)``; a density operator costs ``16 * dim**2`` bytes. Basis
vectors are ordered row-major over occupation tuples with mode 1 varying
slowest, i.e. the order of :func:`numpy.ndindex`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from nlslab import kernels
from nlslab.errors import DegenerateInputError, DomainError, PhysicalityError

MAX_DIMENSION = 1 << 16

_checks = {"enabled": False}


def enable_checks(flag=True):
    """Turn Hermiticity/positivity checks after every channel step on or off."""
    previous = _checks["enabled"]
    _checks["enabled"] = bool(flag)
    return previous


def checks_enabled():
    return _checks["enabled"]


@dataclass(frozen=True)
class FockCutoff:
    """Per-mode maximum photon numbers."""

    per_mode_max: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(n) for n in self.per_mode_max)
        if not counts:
            raise DomainError("a Fock space needs at least one mode")
        if any(n < 0 for n in counts):
            raise DomainError(f"cutoffs must be non-negative, got {counts}")
        if math.prod(n + 1 for n in counts) > MAX_DIMENSION:
            raise DomainError(
                f"dimension {math.prod(n + 1 for n in counts)} exceeds budget {MAX_DIMENSION}"
            )
        object.__setattr__(self, "per_mode_max", counts)

    @classmethod
    def uniform(cls, n_modes, n_max):
        return cls((n_max,) * n_modes)

    @property
    def n_modes(self):
        return len(self.per_mode_max)

    @property
    def dims(self):
        return tuple(n + 1 for n in self.per_mode_max)

    @property
    def dim(self):
        return math.prod(self.dims)

    def split(self, mode):
        """Return ``(left, d, right)`` for tensor-factor access to ``mode``."""
        if not 0 <= mode < self.n_modes:
            raise DomainError(f"mode {mode} out of range for {self.n_modes} modes")
        dims = self.dims
        return math.prod(dims[:mode]), dims[mode], math.prod(dims[mode + 1 :])


def _as_cutoff(cutoff):
    if isinstance(cutoff, FockCutoff):
        return cutoff
    return FockCutoff(tuple(cutoff))


def basis_index(occ: Sequence[int], cutoff) -> int:
    """Row-major index of an occupation vector."""
    cutoff = _as_cutoff(cutoff)
    occ = tuple(int(n) for n in occ)
    if len(occ) != cutoff.n_modes:
        raise DomainError(f"occupation {occ} has {len(occ)} modes, cutoff has {cutoff.n_modes}")
    for n, top in zip(occ, cutoff.per_mode_max):
        if n < 0 or n > top:
            raise DomainError(f"occupation {occ} exceeds cutoff {cutoff.per_mode_max}")
    return int(np.ravel_multi_index(occ, cutoff.dims))


def basis_states(cutoff) -> list[tuple[int, ...]]:
    """All occupation vectors in index order."""
    return list(np.ndindex(*_as_cutoff(cutoff).dims))


def _frozen(arr):
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MultiModeState:
    """Pure state as a complex amplitude vector (not necessarily normalised)."""

    amplitudes: np.ndarray
    cutoff: FockCutoff

    def __post_init__(self):
        cutoff = _as_cutoff(self.cutoff)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (cutoff.dim,):
            raise DomainError(f"expected {cutoff.dim} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], complex]], cutoff):
        cutoff = _as_cutoff(cutoff)
        amps = np.zeros(cutoff.dim, dtype=np.complex128)
        for occ, c in terms:
            amps[basis_index(occ, cutoff)] += c
        return cls(amps, cutoff)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        n = self.norm
        if n == 0.0:
            raise DegenerateInputError("cannot normalise the zero vector")
        return MultiModeState(self.amplitudes / n, self.cutoff)

    def amplitude(self, occ):
        return complex(self.amplitudes[basis_index(occ, self.cutoff)])

    def density(self):
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.cutoff)


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix over the multimode basis; the trace is the heralding weight."""

    matrix: np.ndarray
    cutoff: FockCutoff
    _trace: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cutoff = _as_cutoff(self.cutoff)
        mat = _frozen(self.matrix)
        if mat.shape != (cutoff.dim, cutoff.dim):
            raise DomainError(f"expected a {cutoff.dim}x{cutoff.dim} matrix, got {mat.shape}")
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_trace", float(np.trace(mat).real))

    @property
    def weight(self):
        """Trace of the (possibly unnormalised) operator."""
        return self._trace

    def trace(self):
        return self._trace

    def normalized(self):
        if self._trace <= 0.0:
            raise DegenerateInputError("cannot normalise an operator with zero trace")
        return DensityOperator(self.matrix / self._trace, self.cutoff)

    def element(self, bra, ket):
        return complex(self.matrix[basis_index(bra, self.cutoff), basis_index(ket, self.cutoff)])

    def scaled(self, factor):
        return DensityOperator(self.matrix * factor, self.cutoff)

    def __add__(self, other):
        if other.cutoff != self.cutoff:
            raise DomainError("cannot add operators on different spaces")
        return DensityOperator(self.matrix + other.matrix, self.cutoff)


def check_physical(rho: DensityOperator, atol=1e-10):
    """Raise :class:`PhysicalityError` unless ``rho`` is Hermitian and PSD.

    Tolerances are absolute after scaling by the largest matrix entry, so
    heavily heralded (tiny-trace) operators are judged on their shape.
    """
    m = rho.matrix
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return
    m = m / scale
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > atol:
        raise PhysicalityError(f"Hermiticity violated by {herm:.3e}")
    low = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
    if low < -atol:
        raise PhysicalityError(f"negative eigenvalue {low:.3e}")


def apply_single_mode(op, mode: int, state: MultiModeState) -> MultiModeState:
    """Act with a single-mode operator on one mode of a pure state."""
    op = np.asarray(op, dtype=np.complex128)
    left, d, right = state.cutoff.split(mode)
    if op.shape != (d, d):
        raise DomainError(f"operator shape {op.shape} does not match mode dimension {d}")
    return MultiModeState(kernels.apply_mode(state.amplitudes, op, left, right), state.cutoff)


def apply_mode_kraus(ops, mode: int, rho: DensityOperator) -> DensityOperator:
    """``sum_k K_k rho K_k^dagger`` with each square ``K_k`` acting on ``mode``."""
    ops = np.asarray(ops, dtype=np.complex128)
    if ops.ndim == 2:
        ops = ops[None]
    left, d, right = rho.cutoff.split(mode)
    if ops.shape[1:] != (d, d):
        raise DomainError(f"operator shape {ops.shape[1:]} does not match mode dimension {d}")
    out = DensityOperator(kernels.sandwich(rho.matrix, ops, left, right), rho.cutoff)
    if _checks["enabled"]:
        check_physical(out)
    return out


def partial_trace(rho: DensityOperator, keep_modes) -> DensityOperator:
    """Trace out every mode not in ``keep_modes``; kept modes stay in order."""
    keep = sorted(set(int(k) for k in keep_modes))
    n = rho.cutoff.n_modes
    if not keep:
        raise DomainError("keep_modes must be non-empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise DomainError(f"keep_modes {keep} out of range for {n} modes")
    dims = rho.cutoff.dims
    t = rho.matrix.reshape(dims + dims)
    rows = list(range(n))
    cols = [n + k if k in keep else k for k in range(n)]
    out_idx = keep + [n + k for k in keep]
    reduced = np.einsum(t, rows + cols, out_idx)
    kept = FockCutoff(tuple(rho.cutoff.per_mode_max[k] for k in keep))
    return DensityOperator(reduced.reshape(kept.dim, kept.dim), kept)


def fidelity_pure(rho: DensityOperator, target: MultiModeState) -> float:
    """``<t|rho|t> / Tr rho`` for a normalised pure target."""
    if rho.cutoff != target.cutoff:
        raise DomainError("state and operator live on different spaces")
    if abs(target.norm - 1.0) > 1e-10:
        raise DomainError(f"target must be normalised (norm {target.norm})")
    tr = rho.weight
    if tr <= 0.0:
        raise DegenerateInputError("fidelity undefined for a zero-trace operator")
    t = target.amplitudes
    return float((t.conj() @ rho.matrix @ t).real / tr)
