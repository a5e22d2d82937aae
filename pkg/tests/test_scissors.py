import itertools
import math

import numpy as np
import pytest

from nlslab.channels import ChannelParams
from nlslab.closed_form import bipartite_ratio
from nlslab.errors import DomainError
from nlslab.protocol import run
from nlslab.scissors import (
    HERALD_SCALE,
    beamsplitter_matrix,
    gain_to_t,
    ratio_formula,
    ratio_surface,
    run_experiment,
    sigma_formula,
    sqrt_mu_forms,
    t_to_gain,
)
from nlslab.states import StateFamily

NU = np.linspace(0.2, 1.0, 5)
TAU = np.linspace(0.2, 1.0, 5)
T = np.linspace(0.72, 0.98, 5)


def idx(p, q, N):
    return p * (N + 1) + q


def test_beamsplitter_identity_and_50_50():
    assert np.allclose(beamsplitter_matrix(1.0, 2), np.eye(9))
    u = beamsplitter_matrix(1 / math.sqrt(2), 1)
    out = u[:, idx(1, 0, 1)]
    expected = np.zeros(4, complex)
    expected[idx(1, 0, 1)] = 1 / math.sqrt(2)
    expected[idx(0, 1, 1)] = 1j / math.sqrt(2)
    assert np.allclose(out, expected)


@pytest.mark.parametrize("t", [0.0, 0.3, 1 / math.sqrt(2), 0.9])
def test_beamsplitter_unitary_per_sector(t):
    N = 3
    u = beamsplitter_matrix(t, N)
    for n in range(N + 1):
        sector = [idx(p, n - p, N) for p in range(n + 1)]
        block = u[np.ix_(sector, sector)]
        assert np.max(np.abs(block.conj().T @ block - np.eye(n + 1))) < 1e-12


def test_beamsplitter_conserves_photon_number(rng):
    N = 2
    u = beamsplitter_matrix(0.6, N)
    number = np.array([p + q for p in range(N + 1) for q in range(N + 1)], float)
    keep = number <= N
    psi = np.where(keep, rng.normal(size=9) + 1j * rng.normal(size=9), 0)
    psi /= np.linalg.norm(psi)
    out = u @ psi
    assert np.vdot(out, number * out).real == pytest.approx(np.vdot(psi, number * psi).real, abs=1e-12)


def test_beamsplitter_domain():
    with pytest.raises(DomainError):
        beamsplitter_matrix(1.2, 1)
    with pytest.raises(DomainError):
        run_experiment(1, 1, 0.5, 0.5, 1.1, 0.8)


def test_gain_conversion():
    assert t_to_gain(2 / math.sqrt(5)) == pytest.approx(2.0)
    assert gain_to_t(2.0) == pytest.approx(2 / math.sqrt(5))
    assert t_to_gain(1 / math.sqrt(2)) == pytest.approx(1.0)


def test_worked_example():
    t = 2 / math.sqrt(5)
    res = run_experiment(1, 1, 0.5, 0.5, t, t)
    assert res.mu == pytest.approx(0.08, abs=1e-12)
    assert res.sigma == pytest.approx(0.06, abs=1e-12)
    assert res.ratio == pytest.approx(0.75, abs=1e-12)
    assert res.fidelity == pytest.approx(0.08 / 0.14, abs=1e-12)
    assert res.fidelity == pytest.approx(0.571429, abs=1e-6)


def test_lossless_has_no_vacuum():
    res = run_experiment(0.7, 0.7, 1.0, 1.0, 0.8, 0.8)
    assert res.sigma == pytest.approx(0.0, abs=1e-15)
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)


def test_unbalanced_arms_show_unequal_weights():
    res = run_experiment(1, 1, 0.5, 0.5, 0.75, 0.95)
    m = res.output.matrix
    assert abs(m[1, 1] - m[2, 2]) > 1e-3


def test_heralded_trace_is_mu_plus_sigma():
    for nu, tau, t in itertools.product(NU[::2], TAU[::2], T[::2]):
        res = run_experiment(nu, nu, tau, tau, t, t)
        assert res.herald_probability == pytest.approx((res.mu + res.sigma) / HERALD_SCALE, rel=1e-12)


def _balanced(nu1, tau1, tau2, t1, t2):
    nu2 = nu1 * tau1 * t_to_gain(t1) / (tau2 * t_to_gain(t2))
    return nu2


def test_sqrt_mu_forms_agree_when_balanced():
    checked = 0
    for nu1, tau1, tau2, t1, t2 in itertools.product(NU, TAU, TAU, T, T):
        nu2 = _balanced(nu1, tau1, tau2, t1, t2)
        if nu2 > 1:
            continue
        forms = sqrt_mu_forms(nu1, nu2, tau1, tau2, t1, t2)
        assert max(forms) - min(forms) < 1e-12
        res = run_experiment(nu1, nu2, tau1, tau2, t1, t2)
        assert res.mu == pytest.approx(forms[0] ** 2, abs=1e-12)
        assert res.sigma == pytest.approx(sigma_formula(nu1, nu2, tau1, tau2, t1, t2), abs=1e-12)
        assert res.ratio == pytest.approx(
            bipartite_ratio(nu1, nu2, tau1, tau2, t_to_gain(t1), t_to_gain(t2)), abs=1e-12
        )
        checked += 1
    assert checked > 100


def test_circuit_matches_abstract_channel():
    worst = 0.0
    for nu, tau, t in itertools.product(NU, TAU, T):
        res = run_experiment(nu, nu, tau, tau, t, t)
        ref = run(StateFamily.bipartite(), ChannelParams.equal(2, nu, tau, t_to_gain(t)))
        worst = max(worst, float(np.max(np.abs(res.output.normalized().matrix - ref.output.matrix))))
    assert worst < 1e-10


def test_alternative_herald_flips_sign():
    a = run_experiment(1, 1, 0.5, 0.5, 0.8, 0.8)
    b = run_experiment(1, 1, 0.5, 0.5, 0.8, 0.8, patterns=((1, 0), (0, 1)))
    assert b.output.matrix[1, 2] == pytest.approx(-a.output.matrix[1, 2], abs=1e-15)
    assert b.mu == pytest.approx(a.mu) and b.sigma == pytest.approx(a.sigma)


def test_ratio_surface():
    taus = [0.25, 0.5, 0.75, 1.0]
    gains = [1.0, 2.0, 4.0, 10.0, 50.0]
    rows = ratio_surface(taus, gains)
    assert [(r[0], r[1]) for r in rows] == [(a, b) for a in taus for b in gains]
    for tau, g, ratio in rows:
        assert ratio == pytest.approx(ratio_formula(tau, tau, g, g), abs=1e-12)
    assert all(r[2] == pytest.approx(0.0, abs=1e-15) for r in rows if r[0] == 1.0)
    assert dict(((r[0], r[1]), r[2]) for r in rows)[(0.5, 4.0)] == pytest.approx(0.1875, abs=1e-12)
    for tau in taus[:-1]:
        row = [r[2] for r in rows if r[0] == tau]
        assert all(b < a for a, b in zip(row, row[1:]))


def test_mu_bound():
    for nu, tau, t in itertools.product(NU, TAU, np.linspace(0.0, 1.0, 6)):
        res = run_experiment(nu, nu, tau, tau, t, t)
        assert 0.0 <= math.sqrt(res.mu) <= math.sqrt(2) + 1e-12
