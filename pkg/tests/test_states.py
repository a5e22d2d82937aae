import math

import numpy as np
import pytest

from nlslab.errors import DomainError
from nlslab.fock import FockCutoff, partial_trace
from nlslab.states import StateFamily, StateSpecError, build, default_tmsv_nmax, parse_state_spec


def test_w3():
    psi = build(StateFamily.w(3))
    r3 = 1 / math.sqrt(3)
    for occ in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
        assert psi.amplitude(occ) == pytest.approx(r3)
    assert psi.amplitude((0, 0, 0)) == 0


def test_ghz2():
    psi = build(StateFamily.ghz(2))
    assert np.allclose(psi.amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_tmsv_n_max_1():
    psi = build(StateFamily.tmsv(0.2, n_max=1))
    n = math.sqrt(1.04)
    assert psi.amplitude((0, 0)) == pytest.approx(1 / n)
    assert psi.amplitude((1, 1)) == pytest.approx(0.2 / n)


def test_noon3():
    psi = build(StateFamily.noon(3))
    assert psi.cutoff == FockCutoff((3, 3))
    assert psi.amplitude((3, 0)) == pytest.approx(1 / math.sqrt(2))
    assert psi.amplitude((0, 3)) == pytest.approx(1 / math.sqrt(2))


def test_single_rail_and_bipartite():
    psi = build(StateFamily.single_rail(0.6, 0.8))
    assert np.allclose(psi.amplitudes, [0.6, 0.8])
    psi = build(StateFamily.bipartite())
    assert np.allclose(psi.amplitudes, np.array([0, 1, 1, 0]) / math.sqrt(2))


@pytest.mark.parametrize(
    "fam",
    [
        StateFamily.w(4),
        StateFamily.ghz(3),
        StateFamily.tmsv(0.5),
        StateFamily.noon(2),
        StateFamily.single_rail(1j / math.sqrt(2), 1 / math.sqrt(2)),
        StateFamily.custom([((1, 0, 2), 0.3), ((0, 1, 0), 1j)]),
    ],
)
def test_every_state_is_normalised(fam):
    assert build(fam).norm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("M", [2, 3, 5])
def test_w_marginal_photon_number(M):
    rho = build(StateFamily.w(M)).density()
    for k in range(M):
        red = partial_trace(rho, {k}).matrix
        assert red[1, 1].real == pytest.approx(1 / M, abs=1e-12)


def test_tmsv_ratio_and_default_cutoff():
    gamma = 0.2
    fam = StateFamily.tmsv(gamma)
    assert fam.n_max == default_tmsv_nmax(gamma) == 12
    assert gamma ** (2 * (fam.n_max + 1)) / (1 - gamma**2) < 1e-18
    psi = build(fam)
    a = [psi.amplitude((n, n)).real for n in range(fam.n_max + 1)]
    for n in range(fam.n_max):
        assert a[n + 1] / a[n] == pytest.approx(gamma, rel=1e-12)


def test_invalid_families():
    with pytest.raises(DomainError):
        StateFamily.w(1)
    with pytest.raises(DomainError):
        StateFamily.tmsv(1.0)
    with pytest.raises(DomainError):
        StateFamily.noon(0)
    with pytest.raises(DomainError):
        StateFamily.single_rail(1, 1)
    with pytest.raises(DomainError):
        StateFamily.custom([((1, 0), 1), ((1, 0), 1)])
    with pytest.raises(DomainError):
        build(StateFamily.noon(3), FockCutoff((2, 2)))


def test_build_on_larger_cutoff():
    psi = build(StateFamily.ghz(2), (2, 2))
    assert psi.amplitude((1, 1)) == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize(
    "text, kind",
    [
        ("family=w M=3", "w"),
        ("family=ghz M=4", "ghz"),
        ("family=noon n=3", "noon"),
        ("family=tmsv gamma=0.2 nmax=12", "tmsv"),
        ("family=tmsv gamma=0.2 nmax=12 N=1", "tmsv"),
        ("family=single_rail c0=0.6 c1=0.8", "single_rail"),
        ("family=bipartite", "bipartite"),
        ("family=custom terms=[(1,0,1):0.707,(0,1,0):0.707]", "custom"),
        ("family=custom terms=[ (1, 2) : 0.707 , (2,3):0.707j ]", "custom"),
    ],
)
def test_parse(text, kind):
    assert parse_state_spec(text).kind == kind


def test_parse_values():
    fam = parse_state_spec("family=tmsv gamma=0.2 nmax=12 N=1")
    assert (fam.gamma, fam.n_max, fam.amp_cutoff) == (0.2, 12, 1)
    fam = parse_state_spec("family=custom terms=[(1,0,1):0.707,(0,1,0):0.707]")
    assert fam.terms == (((1, 0, 1), 0.707 + 0j), ((0, 1, 0), 0.707 + 0j))


@pytest.mark.parametrize(
    "text, column",
    [
        ("family=w", 8),
        ("M=3", 0),
        ("family=w M=x", 11),
        ("family=w M=3 bogus=1", 13),
        ("family=custom terms=(1,0):1", 20),
        ("family=custom terms=[(1,0):1,(a):2]", 29),
        ("family=potato", 7),
        ("family=w M=3 ?", 13),
    ],
)
def test_parse_errors_carry_location(text, column):
    with pytest.raises(StateSpecError) as exc:
        parse_state_spec(text)
    assert exc.value.position == column
    assert "column" in str(exc.value)
