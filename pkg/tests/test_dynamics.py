import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from axilift.corridor import derive_corridor
from axilift.dynamics import (DeGiorgiConfig, MorreyConfig, axis_envelope, degiorgi_k0, degiorgi_phase,
                              degiorgi_run, degiorgi_threshold, morrey_run, morrey_threshold, source_bound,
                              verdict_transitions)
from axilift.errors import ConfigurationError, DomainError
from axilift.fitting import fit_loglog

BASE = MorreyConfig(kappa=0.5, c_src=1.0, gain_delta=0.2, theta=0.5, r0=1.0)


def test_morrey_zero():
    tr = morrey_run(BASE)
    assert np.all(tr.values == 0.0)


def test_morrey_guaranteed_example():
    cfg = replace(BASE, e0=0.2)
    tr = morrey_run(cfg)
    assert tr.verdict == "decayed-below-threshold"
    v = tr.values[tr.values > 0]
    assert np.all(v[1:] <= 0.75 * v[:-1])
    assert cfg.guaranteed_e0() == pytest.approx(0.25)


def test_morrey_diverges():
    assert morrey_run(replace(BASE, e0=100.0)).verdict == "diverged"


@given(st.floats(0.7501, 0.9999), st.floats(0.05, 0.95), st.floats(0.1, 10.0),
       st.floats(0.05, 0.95), st.floats(1e-3, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_guaranteed_decay_property(alpha, kappa, c_src, theta, r0, frac):
    cfg = MorreyConfig.from_corridor(derive_corridor(alpha), kappa=kappa, c_src=c_src, theta=theta, r0=r0)
    cfg = replace(cfg, e0=frac * cfg.guaranteed_e0())
    assert morrey_run(cfg).verdict == "decayed-below-threshold"


def test_threshold_floor_and_c_src():
    t1 = morrey_threshold(BASE)
    t2 = morrey_threshold(replace(BASE, c_src=2.0))
    assert t1 >= 0.25
    assert t2 <= t1


def test_threshold_slope_in_r0():
    r0s = [2.0**-k for k in range(8, 14)]
    ts = [morrey_threshold(replace(BASE, r0=r)) for r in r0s]
    assert fit_loglog(r0s, ts).slope == pytest.approx(-0.2, abs=0.05)


def test_morrey_single_transition():
    ladder = np.geomspace(1e-3, 1e3, 60)
    verdicts = [morrey_run(replace(BASE, e0=float(e))).verdict for e in ladder]
    assert verdicts[0] == "decayed-below-threshold" and verdicts[-1] == "diverged"
    assert verdict_transitions(verdicts) == 1


@pytest.mark.parametrize("kw", [dict(kappa=1.0), dict(kappa=0.0), dict(c_src=0.0), dict(theta=1.0),
                                dict(r0=0.0), dict(gain_delta=-0.1)])
def test_morrey_config_validation(kw):
    args = dict(kappa=0.5, c_src=1.0, gain_delta=0.2, theta=0.5)
    args.update(kw)
    with pytest.raises(ConfigurationError):
        MorreyConfig(**args)


DG = DeGiorgiConfig(beta_dg=0.25, lambda1=2.0, c_big=1.0)


def test_degiorgi_classical_example():
    bound = DG.classical_bound()
    assert bound == 2.0**-32
    assert degiorgi_run(replace(DG, y0=bound)).verdict == "decayed-below-threshold"
    assert degiorgi_run(replace(DG, y0=1.0)).verdict == "diverged"


def test_degiorgi_zero_start():
    assert np.all(degiorgi_run(DG).values == 0.0)
    tr = degiorgi_run(replace(DG, phi_r=0.1))
    # 0^beta = 0, so the source term never switches on
    assert np.all(tr.values == 0.0) and tr.verdict == "decayed-below-threshold"


@pytest.mark.parametrize("beta,c_big,K,R", [(0.25, 1.0, 1.0, 1.0), (0.2728, 16.0, 1.0, 1.0),
                                            (0.5, 4.0, 2.0, 0.5), (0.3, 16.0, 0.5, 1.0)])
def test_degiorgi_threshold_near_classical(beta, c_big, K, R):
    cfg = DeGiorgiConfig(beta_dg=beta, c_big=c_big, K=K, R=R)
    t = degiorgi_threshold(cfg)
    assert 0.5 <= t / cfg.classical_bound() <= 2.0


def test_degiorgi_phase_monotone_along_y0():
    base = DeGiorgiConfig.from_corridor(derive_corridor(0.8))
    y0s = np.logspace(-40, 0, 21)
    rows = degiorgi_phase(base, y0s, [0.5, 2.0], [0.0, 1e-6], [1.0])
    assert len(rows) == 21 * 4
    for i in range(0, len(rows), 21):
        verdicts = [r["verdict"] for r in rows[i:i + 21]]
        assert verdict_transitions(verdicts) <= 1
        # decay can only sit at the small-y0 end
        if "decayed-below-threshold" in verdicts:
            first_div = next((j for j, v in enumerate(verdicts) if v != "decayed-below-threshold"), 21)
            assert all(v != "decayed-below-threshold" for v in verdicts[first_div:])


def test_degiorgi_defaults():
    cfg = DeGiorgiConfig(beta_dg=0.25)
    assert cfg.lambda1 == cfg.lambda2 == 2.5 and cfg.c_big == 16.0
    with pytest.raises(ConfigurationError):
        DeGiorgiConfig(beta_dg=1.0)


def test_k0():
    p = derive_corridor(0.8)
    assert degiorgi_k0(0.0, 0.0, 1.0, p, 3.0) == 0.0
    assert degiorgi_k0(1.0, 0.0, 1.0, p, 1.0) == 1.0
    assert degiorgi_k0(1.0, 0.3, 0.7, p, 2.0) == pytest.approx(2 * degiorgi_k0(1.0, 0.3, 0.7, p, 1.0))
    Rs = [2.0**-k for k in range(6)]
    fit = fit_loglog(Rs, [degiorgi_k0(1.0, 0.0, R, p, 1.0) for R in Rs])
    assert fit.slope == pytest.approx(-(p.n_star + 2) / 2, abs=1e-10)
    assert fit.max_abs_residual < 1e-10
    with pytest.raises(DomainError):
        degiorgi_k0(1.0, 0.0, 0.0, p, 1.0)


def test_axis_envelope(oracle):
    p = derive_corridor(0.8)
    assert axis_envelope(0.0, p, 0.3) == (0.0, 0.0)
    assert axis_envelope(4.0, p, 1.0) == (4.0, 2.0)
    f, v = axis_envelope(1.0, p, 0.5)
    assert (f, v) == pytest.approx(tuple(oracle["axis_envelope_0.8_r0.5"]), rel=1e-13)


def test_source_bound():
    p = derive_corridor(0.8)
    assert source_bound(1.0, 2.0, 3.0, p) == 6.0
    assert source_bound(0.5, 2.0, 3.0, p) / 6.0 == pytest.approx(2.0**-p.source_exponent, rel=1e-14)
    assert p.source_exponent == pytest.approx(1.583095, abs=1e-6)
