"""Linear-optics model of the bipartite single-photon experiment.

Photon ``(|10> + |01>)/sqrt(2)`` -> heralded beamsplitter attenuation (zero
photons at the herald) -> loss beamsplitter (reflected mode kept, then
traced) -> quantum-scissors amplifier in each arm.

Beamsplitter convention: transmission amplitude ``t`` with no phase,
reflection amplitude ``i sqrt(1 - t^2)``.

Scissors arm: an ancilla photon meets a tunable splitter of transmittance
``t``; the transmitted port is the output, the reflected port is mixed with
the signal on a 50/50 splitter whose two outputs are detected. Gain is
``g = t / sqrt(1 - t^2)``. The default herald is one photon at the detector
on the signal side and none on the other, in both arms; choosing ``(0, 1)``
in one arm flips the sign between the ``|10>`` and ``|01>`` components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from nlslab.errors import DomainError
from nlslab.fock import DensityOperator, FockCutoff

# Each Bell-measurement pattern keeps 1/2 of the weight, the input state
# splits 1/2 per term: the heralded trace is (mu + sigma) / 8.
HERALD_SCALE = 8.0

_DIM = 3  # two photons can bunch at a 50/50 splitter


def beamsplitter_matrix(t, N):
    """Two-mode beamsplitter on ``span{|p,q>: p, q <= N}``, index ``p*(N+1)+q``.

    Built from ``a^+ -> t a^+ + i r b^+`` and ``b^+ -> i r a^+ + t b^+``.
    Unitary on every total-photon-number sector that fits in the cutoff.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"beamsplitter transmittance must lie in [0, 1], got {t}")
    r = math.sqrt(max(0.0, 1.0 - t * t))
    d = N + 1
    u = np.zeros((d * d, d * d), dtype=np.complex128)
    for m in range(d):
        for n in range(d):
            norm = 1.0 / math.sqrt(math.factorial(m) * math.factorial(n))
            for k in range(m + 1):
                ca = math.comb(m, k) * t**k * (1j * r) ** (m - k)
                for l in range(n + 1):
                    cb = math.comb(n, l) * (1j * r) ** l * t ** (n - l)
                    p, q = k + l, m + n - k - l
                    if p > N or q > N:
                        continue
                    amp = ca * cb * norm * math.sqrt(math.factorial(p) * math.factorial(q))
                    u[p * d + q, m * d + n] += amp
    return u


@lru_cache(maxsize=256)
def _bs_tensor(t):
    u = beamsplitter_matrix(t, _DIM - 1).reshape(_DIM, _DIM, _DIM, _DIM)
    u.setflags(write=False)
    return u


class _Circuit:
    """Pure state on labelled modes, each truncated at ``_DIM - 1`` photons."""

    def __init__(self):
        self.labels = []
        self.psi = np.ones((), dtype=np.complex128)

    def add(self, label, photons=0):
        v = np.zeros(_DIM, dtype=np.complex128)
        v[photons] = 1.0
        self.psi = np.multiply.outer(self.psi, v)
        self.labels.append(label)

    def load(self, labels, amplitudes):
        self.labels = list(labels)
        self.psi = np.asarray(amplitudes, dtype=np.complex128)

    def bs(self, a, b, t):
        u = _bs_tensor(float(t))
        ia, ib = self.labels.index(a), self.labels.index(b)
        out = np.tensordot(u, self.psi, axes=([2, 3], [ia, ib]))
        self.psi = np.moveaxis(out, [0, 1], [ia, ib])

    def project(self, label, n):
        i = self.labels.index(label)
        self.psi = np.take(self.psi, n, axis=i)
        del self.labels[i]

    def reduced(self, keep):
        idx = [self.labels.index(k) for k in keep]
        rest = [i for i in range(len(self.labels)) if i not in idx]
        psi = np.transpose(self.psi, idx + rest).reshape(_DIM ** len(keep), -1)
        return psi @ psi.conj().T


@dataclass(frozen=True)
class ScissorsOutcome:
    """``output`` is the heralded, unnormalised two-mode state (trace ``(mu+sigma)/8``)."""

    mu: float
    sigma: float
    output: DensityOperator

    @property
    def ratio(self):
        return self.sigma / self.mu

    @property
    def herald_probability(self):
        return self.output.weight

    @property
    def fidelity(self):
        psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
        return float((psi @ self.output.matrix @ psi).real / self.output.weight)


def gain_to_t(g):
    return g / math.sqrt(1.0 + g * g)


def t_to_gain(t):
    return t / math.sqrt(1.0 - t * t)


def run_experiment(nu1, nu2, tau1, tau2, t1, t2, patterns=((1, 0), (1, 0))) -> ScissorsOutcome:
    """Simulate the circuit and return the heralded output on the two amplifier outputs."""
    for name, v in dict(nu1=nu1, nu2=nu2, tau1=tau1, tau2=tau2, t1=t1, t2=t2).items():
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v}")
    c = _Circuit()
    amps = np.zeros((_DIM, _DIM), dtype=np.complex128)
    amps[1, 0] = amps[0, 1] = 1 / math.sqrt(2)
    c.load(["s1", "s2"], amps)
    for arm, nu, tau in ((1, nu1, tau1), (2, nu2, tau2)):
        c.add(f"h{arm}")
        c.bs(f"s{arm}", f"h{arm}", nu)
        c.project(f"h{arm}", 0)
        c.add(f"R{arm}")
        c.bs(f"s{arm}", f"R{arm}", tau)
    for arm, t, (da, db) in ((1, t1, patterns[0]), (2, t2, patterns[1])):
        c.add(f"out{arm}", photons=1)
        c.add(f"c{arm}")
        c.bs(f"out{arm}", f"c{arm}", t)
        c.bs(f"s{arm}", f"c{arm}", 1 / math.sqrt(2))
        c.project(f"s{arm}", da)
        c.project(f"c{arm}", db)
    rho = c.reduced(["out1", "out2"]).reshape(_DIM, _DIM, _DIM, _DIM)
    kept = rho[:2, :2, :2, :2].reshape(4, 4)
    if not np.isclose(np.trace(kept).real, np.trace(rho.reshape(9, 9)).real, rtol=0, atol=1e-15):
        raise AssertionError("amplifier output left the single-photon space")
    out = DensityOperator(kept, FockCutoff((1, 1)))
    mu = HERALD_SCALE * float((kept[1, 1] + kept[2, 2]).real)
    sigma = HERALD_SCALE * float(kept[0, 0].real)
    return ScissorsOutcome(mu, sigma, out)


def sqrt_mu_forms(nu1, nu2, tau1, tau2, t1, t2):
    """The four expressions for sqrt(mu); equal when the arms are balanced."""
    g1, g2 = t_to_gain(t1), t_to_gain(t2)
    s1, s2 = math.sqrt(1 - t1**2), math.sqrt(1 - t2**2)
    root2 = math.sqrt(2)
    return (
        root2 * nu1 * tau1 * t1 * s2,
        root2 * nu2 * tau2 * t2 * s1,
        root2 * nu1 * tau1 * g1 * s1 * s2,
        root2 * nu2 * tau2 * g2 * s1 * s2,
    )


def sigma_formula(nu1, nu2, tau1, tau2, t1, t2):
    return (nu1**2 * (1 - tau1**2) + nu2**2 * (1 - tau2**2)) * (1 - t1**2) * (1 - t2**2)


def ratio_surface(tau_grid, g_grid):
    """Simulated sigma/mu with no attenuation and identical arms.

    Returns ``(tau, g, ratio)`` rows, ``tau`` outermost.
    """
    rows = []
    for tau in tau_grid:
        for g in g_grid:
            t = gain_to_t(g)
            res = run_experiment(1.0, 1.0, tau, tau, t, t)
            rows.append((float(tau), float(g), res.ratio))
    return rows


def ratio_formula(tau1, tau2, g1, g2):
    """sigma/mu without attenuation (nu = 1)."""
    return ((1 - tau1**2) + (1 - tau2**2)) / (2 * tau1 * g1 * tau2 * g2)
