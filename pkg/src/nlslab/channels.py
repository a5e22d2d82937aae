"""Single-mode NLS primitives and their composition over M modes.

Each mode sees noiseless attenuation ``nu**n``, a pure-loss channel with
amplitude transmittance ``tau`` and the bounded amplifier filter
``G_N(g) = g**-N * sum_{n<=N} g**n |n><n|``. All three are contractions, so
the trace of the heralded output is directly the success probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from nlslab.errors import DomainError
from nlslab.fock import DensityOperator, FockCutoff, apply_mode_kraus


@dataclass(frozen=True)
class DiagonalFilter:
    """``nu**n`` (attenuator) or ``g**(n-N)`` truncated at ``N`` (amplifier)."""

    kind: str
    strength: float
    cutoff: int
    dim: int

    @property
    def diagonal(self):
        n = np.arange(self.dim)
        if self.kind == "attenuator":
            return self.strength ** n.astype(float)
        diag = self.strength ** (n - self.cutoff).astype(float)
        diag[n > self.cutoff] = 0.0
        return diag

    @property
    def matrix(self):
        return np.diag(self.diagonal).astype(np.complex128)


def attenuator_filter(nu, N, dim=None) -> DiagonalFilter:
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"attenuation factor must lie in (0, 1], got {nu}")
    return DiagonalFilter("attenuator", float(nu), int(N), int(N + 1 if dim is None else dim))


def amplifier_filter(g, N, dim=None) -> DiagonalFilter:
    """Bounded amplifier ``G_N(g)``; entries above ``N`` (if ``dim > N+1``) are zero."""
    if g < 1.0:
        raise DomainError(f"amplifier gain must be >= 1, got {g}; use an attenuator")
    if N < 0:
        raise DomainError("N must be non-negative")
    dim = N + 1 if dim is None else int(dim)
    return DiagonalFilter("amplifier", float(g), int(N), dim)


@dataclass(frozen=True)
class LossChannel:
    tau: float
    cutoff: int
    kraus: tuple

    def completeness(self):
        return sum(k.conj().T @ k for k in self.kraus)


def loss_kraus(tau, N) -> LossChannel:
    """Kraus operators ``A_j`` (loss of exactly ``j`` photons) on span{|0>..|N>}."""
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"transmittance must lie in [0, 1], got {tau}")
    if N < 0:
        raise DomainError("N must be non-negative")
    loss = 1.0 - tau * tau
    ops = []
    for j in range(N + 1):
        a = np.zeros((N + 1, N + 1), dtype=np.complex128)
        for m in range(N - j + 1):
            a[m, m + j] = math.sqrt(math.comb(m + j, j)) * loss ** (j / 2) * tau**m
        ops.append(a)
    return LossChannel(float(tau), int(N), tuple(ops))


def apply_kraus_channel(ch: LossChannel, mode: int, rho: DensityOperator) -> DensityOperator:
    return apply_mode_kraus(np.stack(ch.kraus), mode, rho)


def apply_filter(f: DiagonalFilter, mode: int, rho: DensityOperator) -> DensityOperator:
    return apply_mode_kraus(f.matrix, mode, rho)


@dataclass(frozen=True)
class ChannelParams:
    """Per-mode attenuation ``nu``, transmittance ``tau``, gain ``g``.

    ``cutoff`` is the amplifier truncation ``N`` per mode; ``None`` means
    "use the state's Fock cutoff in that mode".
    """

    nu: tuple
    tau: tuple
    g: tuple
    cutoff: Optional[tuple] = None

    def __post_init__(self):
        nu = tuple(float(v) for v in self.nu)
        tau = tuple(float(v) for v in self.tau)
        g = tuple(float(v) for v in self.g)
        if not (len(nu) == len(tau) == len(g)) or not nu:
            raise DomainError("nu, tau and g need one entry per mode")
        for v in nu:
            if not 0.0 < v <= 1.0:
                raise DomainError(f"nu must lie in (0, 1], got {v}")
        for v in tau:
            if not 0.0 < v <= 1.0:
                raise DomainError(f"tau must lie in (0, 1], got {v}")
        for v in g:
            if not v >= 1.0:
                raise DomainError(f"g must be >= 1, got {v}")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "g", g)
        if self.cutoff is not None:
            cut = tuple(int(n) for n in self.cutoff)
            if len(cut) != len(nu) or any(n < 0 for n in cut):
                raise DomainError("cutoff needs one non-negative entry per mode")
            object.__setattr__(self, "cutoff", cut)

    @classmethod
    def equal(cls, n_modes, nu, tau, g, cutoff=None):
        cut = None if cutoff is None else (cutoff,) * n_modes
        return cls((nu,) * n_modes, (tau,) * n_modes, (g,) * n_modes, cut)

    @property
    def n_modes(self):
        return len(self.nu)

    def products(self):
        """``nu_k * tau_k * g_k`` per mode (the balancing constants)."""
        return tuple(n * t * g for n, t, g in zip(self.nu, self.tau, self.g))

    def resolve_cutoff(self, state_cutoff: FockCutoff):
        if state_cutoff.n_modes != self.n_modes:
            raise DomainError(
                f"parameters cover {self.n_modes} modes, state has {state_cutoff.n_modes}"
            )
        if self.cutoff is None:
            return state_cutoff.per_mode_max
        return self.cutoff


def mode_kraus(nu, tau, g, N, dim):
    """Kraus set of one full NLS mode: ``G_N(g) A_j nu**n`` for ``j < dim``."""
    att = attenuator_filter(nu, dim - 1, dim).diagonal
    amp = amplifier_filter(g, N, dim).diagonal
    loss = loss_kraus(tau, dim - 1).kraus
    return np.stack([amp[:, None] * a * att[None, :] for a in loss])


def nls_multimode(rho: DensityOperator, params: ChannelParams) -> DensityOperator:
    """Heralded (unnormalised) output of attenuation, loss and amplification per mode."""
    cut = params.resolve_cutoff(rho.cutoff)
    out = rho
    for k in range(params.n_modes):
        ops = mode_kraus(params.nu[k], params.tau[k], params.g[k], cut[k], rho.cutoff.dims[k])
        out = apply_mode_kraus(ops, k, out)
    return out


def noise_operator(nu, tau, g, N, dim, j):
    """``B_j = sum_m sqrt(C(m,j)) (1-tau^2)^(j/2) (nu tau g)^(m-j) |m-j><m|``.

    Terms with ``m - j > N`` are dropped (the amplifier truncation).
    """
    b = np.zeros((dim, dim), dtype=np.complex128)
    c = nu * tau * g
    for m in range(j, dim):
        if m - j > N:
            break
        b[m - j, m] = math.sqrt(math.comb(m, j)) * (1.0 - tau * tau) ** (j / 2) * c ** (m - j)
    return b


@dataclass(frozen=True)
class NoiseDecomposition:
    """Output split by loss pattern.

    ``output = prefactor * sum_j weights[j] * terms[j]`` where ``prefactor``
    is ``prod_k g_k**(-2 N_k)`` and ``weights[j] = prod_k nu_k**(2 j_k)``.
    """

    prefactor: float
    weights: dict
    terms: dict

    @property
    def signal(self):
        return self.terms[(0,) * len(next(iter(self.terms)))]

    def total(self):
        acc = None
        for j, term in self.terms.items():
            part = term.scaled(self.prefactor * self.weights[j])
            acc = part if acc is None else acc + part
        return acc

    def pattern_weights(self):
        """Contribution of each pattern to the success probability."""
        return {j: self.prefactor * self.weights[j] * t.weight for j, t in self.terms.items()}


def noise_decomposition(rho_in: DensityOperator, params: ChannelParams) -> NoiseDecomposition:
    cut = params.resolve_cutoff(rho_in.cutoff)
    dims = rho_in.cutoff.dims
    prefactor = math.prod(g ** (-2 * n) for g, n in zip(params.g, cut))
    branches = {(): rho_in}
    for k in range(params.n_modes):
        grown = {}
        for pattern, rho in branches.items():
            for j in range(dims[k]):
                b = noise_operator(params.nu[k], params.tau[k], params.g[k], cut[k], dims[k], j)
                if not b.any():
                    continue
                grown[pattern + (j,)] = apply_mode_kraus(b, k, rho)
        branches = grown
    weights = {
        j: math.prod(nu ** (2 * jk) for nu, jk in zip(params.nu, j)) for j in branches
    }
    return NoiseDecomposition(prefactor, weights, branches)
