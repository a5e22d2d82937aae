"""End-to-end protocol runs, balancing checks and gain sweeps."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from nlslab.channels import ChannelParams, nls_multimode, noise_decomposition
from nlslab.errors import DomainError, UnphysicalRegimeError
from nlslab.fock import DensityOperator, fidelity_pure
from nlslab.states import StateFamily, build

ATTENUATION_MODES = ("paired", "none")


@dataclass(frozen=True)
class ProtocolResult:
    output: DensityOperator
    success_probability: float
    fidelity: float
    noise_weights: dict = field(default_factory=dict)


def _amp_params(family, params):
    if params.cutoff is None and family.amp_cutoff is not None:
        return ChannelParams(params.nu, params.tau, params.g, (family.amp_cutoff,) * params.n_modes)
    return params


def run(family: StateFamily, params: ChannelParams, decompose=False) -> ProtocolResult:
    """Send ``family`` through the NLS channel described by ``params``.

    ``noise_weights`` (per loss pattern, summing to the success probability)
    is only filled when ``decompose`` is set; it costs one branch per
    pattern.
    """
    if params.n_modes != family.n_modes:
        raise DomainError(f"{family.describe()} has {family.n_modes} modes, params cover {params.n_modes}")
    params = _amp_params(family, params)
    psi = build(family)
    rho = psi.density()
    out = nls_multimode(rho, params)
    weights = {}
    if decompose:
        weights = noise_decomposition(rho, params).pattern_weights()
    return ProtocolResult(
        output=out.normalized(),
        success_probability=out.weight,
        fidelity=fidelity_pure(out, psi),
        noise_weights=weights,
    )


@dataclass(frozen=True)
class BalancingReport:
    family: str
    constant: float
    residual: float
    satisfied: bool
    tolerance: float


def check_balancing(family: StateFamily, params: ChannelParams, tolerance=1e-10) -> BalancingReport:
    """Evaluate the family's balancing condition on ``nu_k tau_k g_k``.

    ``constant`` is C_W / C_N (W, bipartite, NOON: common per-mode product),
    the product over modes (GHZ, TMSV, single rail: must equal 1), or the
    common eigenvalue of the lossless transmission operator (custom).
    Residuals are relative.
    """
    c = list(params.products())
    if params.n_modes != family.n_modes:
        raise DomainError("parameter/mode count mismatch")
    kind = family.kind
    if kind in ("w", "bipartite", "noon"):
        constant = c[0]
        residual = (max(c) - min(c)) / max(abs(v) for v in c)
    elif kind in ("ghz", "tmsv", "single_rail"):
        constant = math.prod(c)
        residual = abs(constant - 1.0)
    elif kind == "custom":
        logs = [sum(n * math.log(v) for n, v in zip(occ, c)) for occ, _ in family.terms]
        constant = math.exp(logs[0])
        residual = math.expm1(max(logs) - min(logs))
    else:
        raise DomainError(f"no balancing condition for family {kind!r}")
    return BalancingReport(kind, constant, residual, residual < tolerance, tolerance)


def sweep_params(base: ChannelParams, g, attenuation_mode):
    """Per-mode parameters at common gain ``g`` for one attenuation mode."""
    if attenuation_mode == "paired":
        nu = []
        for t in base.tau:
            if g * t < 1.0 - 1e-12:
                raise UnphysicalRegimeError(
                    f"paired attenuation needs g >= 1/tau = {1 / t:g}, got g = {g:g}"
                )
            nu.append(min(1.0, 1.0 / (g * t)))
    elif attenuation_mode == "none":
        nu = [1.0] * base.n_modes
    else:
        raise DomainError(f"attenuation mode must be one of {ATTENUATION_MODES}")
    return ChannelParams(tuple(nu), base.tau, (g,) * base.n_modes, base.cutoff)


class SweepRow(NamedTuple):
    g: float
    fidelity: float
    success_probability: float


def sweep_gain(
    family: StateFamily,
    base_params: ChannelParams,
    g_grid: Sequence[float],
    attenuation_mode: str,
    max_workers=None,
) -> list[SweepRow]:
    """One row per grid point, in grid order.

    ``base_params`` supplies ``tau`` (and the amplifier cutoff); ``nu`` is
    ``1/(g tau_k)`` for ``paired`` and 1 for ``none``.
    """
    grid = [float(g) for g in g_grid]
    plans = [sweep_params(base_params, g, attenuation_mode) for g in grid]

    def one(i):
        res = run(family, plans[i])
        return SweepRow(grid[i], res.fidelity, res.success_probability)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(one, range(len(grid))))
    return [one(i) for i in range(len(grid))]


def geometric_grid(g_min=1.0, g_max=1e3, points=48):
    if g_min < 1.0 or points < 2 or g_max <= g_min:
        raise DomainError("grid needs 1 <= g_min < g_max and at least 2 points")
    return list(np.geomspace(g_min, g_max, points))
