import math

import numpy as np
import pytest

from nlslab import closed_form as cf
from nlslab.channels import ChannelParams
from nlslab.errors import DomainError, UnphysicalRegimeError
from nlslab.protocol import check_balancing, geometric_grid, run, sweep_gain, sweep_params
from nlslab.states import StateFamily

TAU = 0.5
BASE3 = ChannelParams.equal(3, 1.0, TAU, 1.0)
BASE2 = ChannelParams.equal(2, 1.0, TAU, 1.0)


def test_run_ghz_paired():
    res = run(StateFamily.ghz(3), ChannelParams.equal(3, 0.5, TAU, 4.0))
    F, P = cf.ghz_formulas(cf.ClosedFormInput.equal(3, 0.5, TAU, 4.0))
    assert res.fidelity == pytest.approx(F, abs=1e-10)
    assert res.success_probability == pytest.approx(P, abs=1e-10)
    assert res.success_probability == pytest.approx(3.2650e-4, rel=1e-4)


def test_run_w_none():
    res = run(StateFamily.w(3), ChannelParams.equal(3, 1.0, TAU, 4.0))
    assert res.fidelity == pytest.approx(4 / 4.75, abs=1e-12)
    assert res.success_probability == pytest.approx(4.75 / 4096, rel=1e-12)
    assert res.output.weight == pytest.approx(1.0)


@pytest.mark.parametrize(
    "fam",
    [StateFamily.w(3), StateFamily.ghz(2), StateFamily.noon(2), StateFamily.tmsv(0.3), StateFamily.bipartite()],
)
def test_identity_channel(fam):
    res = run(fam, ChannelParams.equal(fam.n_modes, 1.0, 1.0, 1.0))
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)
    assert res.success_probability == pytest.approx(1.0, abs=1e-12)


def test_run_checks_mode_count():
    with pytest.raises(DomainError):
        run(StateFamily.w(3), BASE2)


def test_noise_weights_sum_to_success_probability():
    res = run(StateFamily.ghz(3), ChannelParams.equal(3, 0.7, TAU, 3.0), decompose=True)
    assert sum(res.noise_weights.values()) == pytest.approx(res.success_probability, rel=1e-12)
    assert (0, 0, 0) in res.noise_weights


def test_balancing_reports():
    r = check_balancing(StateFamily.w(2), ChannelParams((1.0, 0.65), (0.65, 1.0), (2.0, 2.0)))
    assert r.satisfied and r.constant == pytest.approx(1.3)
    g = 1 / TAU
    r = check_balancing(StateFamily.ghz(3), ChannelParams((0.5, 1.0, 1.0), (TAU,) * 3, (4.0, g, g)))
    assert r.satisfied
    r = check_balancing(StateFamily.ghz(3), ChannelParams.equal(3, 1.0, TAU, 4.0))
    assert not r.satisfied and r.constant == pytest.approx(8.0)
    r = check_balancing(StateFamily.tmsv(0.2), ChannelParams((1.0, 1.0), (TAU, TAU), (1.0, 4.0)))
    assert r.satisfied
    r = check_balancing(StateFamily.noon(2), ChannelParams.equal(2, 1.0, TAU, 3.0))
    assert r.satisfied and r.constant == pytest.approx(1.5)
    r = check_balancing(StateFamily.custom([((1, 2), 1), ((2, 1), 1)]), ChannelParams.equal(2, 1.0, TAU, 4.0))
    assert r.satisfied and r.constant == pytest.approx(8.0)
    r = check_balancing(StateFamily.custom([((1, 2), 1), ((2, 3), 1)]), ChannelParams.equal(2, 1.0, TAU, 4.0))
    assert not r.satisfied


def test_balanced_output_is_input_for_every_family():
    for fam in (StateFamily.w(2), StateFamily.noon(2)):
        C = 1.7
        params = ChannelParams((0.8, 0.6), (0.9, 0.7), (C / 0.72, C / 0.42))
        assert check_balancing(fam, params).satisfied
        lossless = ChannelParams(params.nu, (1.0, 1.0), tuple(C / n for n in params.nu))
        assert run(fam, lossless).fidelity == pytest.approx(1.0, abs=1e-12)


def test_sweep_params_modes():
    p = sweep_params(BASE3, 4.0, "paired")
    assert p.nu == (0.5, 0.5, 0.5) and p.g == (4.0,) * 3
    assert sweep_params(BASE3, 4.0, "none").nu == (1.0,) * 3
    with pytest.raises(UnphysicalRegimeError):
        sweep_params(BASE3, 1.5, "paired")
    with pytest.raises(DomainError):
        sweep_params(BASE3, 4.0, "both")


def test_paired_sweep_rejects_unphysical_gains():
    with pytest.raises(UnphysicalRegimeError):
        sweep_gain(StateFamily.w(3), BASE3, [1.0, 4.0], "paired")


def test_sweep_concurrent_matches_serial():
    grid = geometric_grid(2.0, 1e3, 12)
    serial = sweep_gain(StateFamily.ghz(3), BASE3, grid, "none")
    threaded = sweep_gain(StateFamily.ghz(3), BASE3, grid, "none", max_workers=4)
    assert serial == threaded
    assert [r.g for r in serial] == grid


@pytest.mark.parametrize("fam", [StateFamily.w(3), StateFamily.noon(3)])
def test_w_and_noon_attenuation_does_not_change_fidelity(fam):
    grid = geometric_grid(2.0, 1e3, 48)
    base = ChannelParams.equal(fam.n_modes, 1.0, TAU, 1.0)
    p = sweep_gain(fam, base, grid, "paired")
    n = sweep_gain(fam, base, grid, "none")
    for a, b in zip(p, n):
        assert abs(a.fidelity - b.fidelity) < 1e-12
        assert a.success_probability <= b.success_probability


@pytest.mark.parametrize(
    "fam",
    [StateFamily.w(3), StateFamily.ghz(3), StateFamily.noon(3), StateFamily.tmsv(0.2, 12, 1)],
)
def test_paired_fidelity_monotone_and_probabilities_bounded(fam):
    base = ChannelParams.equal(fam.n_modes, 1.0, TAU, 1.0)
    rows = sweep_gain(fam, base, geometric_grid(2.0, 1e3, 24), "paired")
    fids = [r.fidelity for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(fids, fids[1:]))
    assert all(0.0 <= r.success_probability <= 1.0 for r in rows)


def test_ghz_no_attenuation_asymptotes():
    res = run(StateFamily.ghz(3), sweep_params(BASE3, 1e3, "none"))
    assert abs(res.fidelity - 0.5) < 1e-3
    assert abs(res.success_probability - TAU**6 / 2) / (TAU**6 / 2) < 1e-4


def test_tmsv_noise_scales_with_nu():
    gamma, N, n_max = 0.2, 1, 6

    def coeffs(nu):
        g = 1 / (nu * TAU)
        return cf.tmsv_coefficients(cf.ClosedFormInput.equal(2, nu, TAU, g), gamma, N, n_max)

    a, b = coeffs(0.4), coeffs(0.2)
    for n in range(n_max + 1):
        for j in range(n + 1):
            for k in range(n + 1):
                if a[n, j, k] != 0.0:
                    assert b[n, j, k] / a[n, j, k] == pytest.approx(0.5 ** (j + k), rel=1e-12)


def test_tmsv_noise_patterns_scale_with_nu_in_simulator():
    fam = StateFamily.tmsv(0.2, 8, 1)

    def weights(nu):
        g = 1 / (nu * TAU)
        res = run(fam, ChannelParams.equal(2, nu, TAU, g), decompose=True)
        return {j: w * g**4 for j, w in res.noise_weights.items()}

    a, b = weights(0.4), weights(0.2)
    assert len([w for w in a.values() if w > 0]) > 3
    for (j, k), w in a.items():
        if w == 0.0:
            continue
        assert b[(j, k)] / w == pytest.approx(0.25 ** (j + k), rel=1e-9)


def test_geometric_grid():
    g = geometric_grid()
    assert len(g) == 48 and g[0] == 1.0 and g[-1] == pytest.approx(1e3)
    assert np.allclose(np.diff(np.log(g)), math.log(1e3) / 47)
    with pytest.raises(DomainError):
        geometric_grid(0.5, 10, 4)
