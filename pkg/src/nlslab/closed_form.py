"""Analytic fidelity and success probability for each state family.

These are written out term by term from the post-loss state algebra and
serve as an independent check on the density-matrix simulator. Success
probabilities use the bounded amplifier ``G_N`` with ``N`` equal to the
largest per-mode photon number (1 for W and GHZ, ``n`` for NOON).

When every channel has identical parameters the collapsed (binomial)
forms are used; ``collapsed=False`` forces the general per-mode sums.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from nlslab.errors import DomainError, PreconditionError

BALANCE_RTOL = 1e-10


@dataclass(frozen=True)
class ClosedFormInput:
    """Per-mode ``nu``, ``tau``, ``g``."""

    nu: tuple
    tau: tuple
    g: tuple

    def __post_init__(self):
        nu, tau, g = (tuple(float(v) for v in x) for x in (self.nu, self.tau, self.g))
        if not (len(nu) == len(tau) == len(g)) or not nu:
            raise DomainError("nu, tau and g need one entry per mode")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "g", g)

    @classmethod
    def equal(cls, n_modes, nu, tau, g):
        return cls((nu,) * n_modes, (tau,) * n_modes, (g,) * n_modes)

    @classmethod
    def from_params(cls, params):
        return cls(params.nu, params.tau, params.g)

    @property
    def n_modes(self):
        return len(self.nu)

    @property
    def equal_channels(self):
        return len(set(zip(self.nu, self.tau, self.g))) == 1

    def products(self):
        return [n * t * g for n, t, g in zip(self.nu, self.tau, self.g)]


def _balanced(values):
    top = max(abs(v) for v in values)
    return top == 0.0 or (max(values) - min(values)) <= BALANCE_RTOL * top


def _use_collapsed(inp, collapsed):
    if collapsed is None:
        return inp.equal_channels
    if collapsed and not inp.equal_channels:
        raise PreconditionError("collapsed forms need identical channels")
    return collapsed


def bipartite_ratio(nu1, nu2, tau1, tau2, g1, g2) -> float:
    """Vacuum-to-signal ratio sigma/mu for the single-photon bipartite state."""
    if not _balanced([nu1 * tau1 * g1, nu2 * tau2 * g2]):
        raise PreconditionError("balancing nu1 tau1 g1 = nu2 tau2 g2 is violated")
    noise = nu1**2 * (1 - tau1**2) + nu2**2 * (1 - tau2**2)
    return noise / (2 * nu1 * tau1 * g1 * nu2 * tau2 * g2)


def w_formulas(inp: ClosedFormInput, collapsed: Optional[bool] = None):
    """``(F, P_s)`` for the M-mode W state; needs ``nu_k tau_k g_k`` equal."""
    c = inp.products()
    if not _balanced(c):
        raise PreconditionError("W balancing nu_k tau_k g_k = C_W is violated")
    cw2 = c[0] ** 2
    if _use_collapsed(inp, collapsed):
        nu, tau, g, M = inp.nu[0], inp.tau[0], inp.g[0], inp.n_modes
        noise = (1 - tau**2) * nu**2
        return cw2 / (cw2 + noise), g ** (-2 * M) * (cw2 + noise)
    M = inp.n_modes
    noise = sum((1 - t**2) * n**2 for n, t in zip(inp.nu, inp.tau)) / M
    gains = math.prod(g**-2 for g in inp.g)
    return cw2 / (cw2 + noise), gains * (cw2 + noise)


def ghz_formulas(inp: ClosedFormInput, collapsed: Optional[bool] = None):
    """``(F, P_s)`` for the M-mode GHZ state at arbitrary ``nu``, ``tau``, ``g``.

    With ``prod nu_k tau_k g_k = 1`` this is ordinary NLS; with ``nu = 1`` it
    is amplification only. The general form sums over which modes kept
    their photon (bit strings), the collapsed form uses the binomial
    theorem over the number of lost photons.
    """
    M = inp.n_modes
    if _use_collapsed(inp, collapsed):
        nu, tau, g = inp.nu[0], inp.tau[0], inp.g[0]
        kept = (g * tau * nu) ** 2
        lost = (1 - tau**2) * nu**2
        amp = (g * tau * nu) ** M
        overlap = (1 + amp) ** 2 / 4 + lost**M / 4
        trace = 0.5 * (1 + (kept + lost) ** M)
        return overlap / trace, g ** (-2 * M) * trace
    amp = math.prod(inp.products())
    noise = 0.0
    for bits in itertools.product((0, 1), repeat=M):
        if all(bits):
            continue
        w = 1.0
        for b, nu, tau, g in zip(bits, inp.nu, inp.tau, inp.g):
            w *= ((g * tau) ** 2 if b else (1 - tau**2)) * nu**2
        noise += w
    all_lost = math.prod((1 - t**2) * n**2 for n, t in zip(inp.nu, inp.tau))
    overlap = (1 + amp) ** 2 / 4 + all_lost / 4
    trace = (1 + amp**2) / 2 + noise / 2
    gains = math.prod(g**-2 for g in inp.g)
    return overlap / trace, gains * trace


def noon_formulas(inp: ClosedFormInput, n: int, collapsed: Optional[bool] = None):
    """``(F, P_s)`` for ``(|n,0> + |0,n>)/sqrt(2)``; needs ``nu_1 tau_1 g_1 = nu_2 tau_2 g_2``."""
    if inp.n_modes != 2:
        raise DomainError("NOON states have two modes")
    c = inp.products()
    if not _balanced(c):
        raise PreconditionError("NOON balancing nu_1 tau_1 g_1 = nu_2 tau_2 g_2 is violated")
    cn = c[0]
    if _use_collapsed(inp, collapsed):
        nu, tau, g = inp.nu[0], inp.tau[0], inp.g[0]
        base = cn**2 + nu**2 * (1 - tau**2)
        return cn ** (2 * n) / base**n, g ** (-4 * n) * base**n
    noise = 0.0
    for nu, tau in zip(inp.nu, inp.tau):
        x = (1 - tau**2) * nu**2
        noise += sum(math.comb(n, j) * cn ** (2 * (n - j)) * x**j for j in range(1, n + 1))
    total = cn ** (2 * n) + noise / 2
    return cn ** (2 * n) / total, (inp.g[0] * inp.g[1]) ** (-2 * n) * total


def tmsv_coefficients(inp: ClosedFormInput, gamma, N, n_max):
    """Post-amplification magnitudes ``|c'_{njk}|`` as an array indexed ``[n, j, k]``.

    ``n`` runs to ``n_max`` (input truncation); entries whose surviving
    photon numbers exceed ``N`` are zero.
    """
    if inp.n_modes != 2:
        raise DomainError("TMSV has two modes")
    (nu1, nu2), (t1, t2), (g1, g2) = inp.nu, inp.tau, inp.g
    c = np.zeros((n_max + 1, n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        base = (gamma * nu1 * nu2) ** n
        for j in range(n + 1):
            if n - j > N:
                continue
            for k in range(n + 1):
                if n - k > N:
                    continue
                c[n, j, k] = (
                    math.sqrt(math.comb(n, j) * math.comb(n, k))
                    * base
                    * (t1 * g1) ** (n - j)
                    * (t2 * g2) ** (n - k)
                    * (1 - t1**2) ** (j / 2)
                    * (1 - t2**2) ** (k / 2)
                )
    return c


def tmsv_formulas(inp: ClosedFormInput, gamma, N, n_max):
    """``(F, P_s)`` for the two-mode squeezed vacuum, sums truncated at ``n_max``.

    The discarded input mass is ``gamma**(2(n_max+1)) / (1-gamma**2)``.
    Fidelity is taken against the full (untruncated-by-``N``) input.
    """
    c = tmsv_coefficients(inp, gamma, N, n_max)
    norm = 1 - gamma**2
    overlap = 0.0
    for j in range(n_max + 1):
        s = sum(c[n, j, j] * gamma ** (n - j) for n in range(j, min(N + j, n_max) + 1))
        overlap += s * s
    total = float(np.sum(c * c))
    g1, g2 = inp.g
    return norm * overlap / total, (g1 * g2) ** (-2 * N) * norm * total
