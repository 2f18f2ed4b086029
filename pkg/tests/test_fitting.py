import numpy as np
import pytest
from hypothesis import given, strategies as st

from axilift.errors import DomainError
from axilift.fitting import fit_loglog

XS = [2.0**-k for k in range(3, 10)]


def test_square_law():
    fit = fit_loglog(XS, [x**2 for x in XS])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.max_abs_residual < 1e-12 and fit.n_points == 7


def test_constant():
    assert fit_loglog(XS, [3.0] * len(XS)).slope == pytest.approx(0.0, abs=1e-12)


def test_quartic_law():
    assert fit_loglog(XS, [x**-0.4 for x in XS]).slope == pytest.approx(-0.4, abs=1e-12)


@given(st.floats(-5, 5), st.floats(1e-3, 1e3))
def test_recovers_power(p, c):
    fit = fit_loglog(XS, [c * x**p for x in XS])
    assert fit.slope == pytest.approx(p, abs=1e-9)
    assert np.exp(fit.intercept) == pytest.approx(c, rel=1e-8)


@pytest.mark.parametrize("xs,ys", [([1, 2], [1, 0]), ([1, -2], [1, 1]), ([1], [1]), ([1, 2, 3], [1, 2])])
def test_rejects_bad_input(xs, ys):
    with pytest.raises(DomainError):
        fit_loglog(xs, ys)
