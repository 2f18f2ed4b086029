import math

import numpy as np
import pytest

from axilift import kernels
from axilift.corridor import derive_corridor
from axilift.elliptic import (assemble, friedrichs_mu1, hardy_potential, iteration_cap, rayleigh_quotient,
                              solve_dirichlet, solve_potential)
from axilift.errors import AssemblyError, ConvergenceError, DomainError
from axilift.fitting import fit_loglog
from axilift.functionals import random_smooth_field
from axilift.grid import ScalarField, build_grid, dirichlet_energy, integrate, lp_norm


def _manufactured(g):
    f = g.sample(lambda R, Z: 8 * (1 - Z**2) + 2 * (1 - R**2))
    exact = g.sample(lambda R, Z: (1 - R**2) * (1 - Z**2))
    return f, exact


@pytest.fixture(scope="module")
def mu1_32():
    return friedrichs_mu1(build_grid(32, 32), 3.0, 1e-10)


def test_constants_harmonic_in_interior():
    g = build_grid(10, 10)
    op = assemble(g, 3.0)
    Au = op.apply(np.ones(g.shape))
    # only cells touching r = 1 or z = +-1 feel the eliminated boundary
    np.testing.assert_allclose(Au[:-1, 1:-1], 0.0, atol=1e-10)


def test_potential_shifts_diagonal():
    g = build_grid(8, 6)
    bare = assemble(g, 3.0)
    op = assemble(g, 3.0, hardy_potential(g, 0.8))
    shift = (op.diag - bare.diag) / op.mass
    np.testing.assert_allclose(shift, 0.36 / g.r_centers[:, None] ** 2 * np.ones(g.shape), rtol=1e-12)


def test_face_weights_monotone():
    a = derive_corridor(0.8).a_weight
    op = assemble(build_grid(16, 16), a)
    assert np.all(np.diff(op.kr_in) > 0)


def test_no_coupling_across_axis():
    g = build_grid(6, 6)
    op = assemble(g, 3.0)
    e = np.zeros(g.shape)
    e[0, 2] = 1.0
    col = op.stiffness(e)
    nz = {tuple(ix) for ix in np.argwhere(col != 0.0)}
    assert nz == {(0, 2), (1, 2), (0, 1), (0, 3)}


def test_nonfinite_potential_rejected():
    g = build_grid(4, 4)
    bad = np.ones(g.shape)
    bad[0, 0] = np.inf
    with pytest.raises(AssemblyError):
        assemble(g, 3.0, bad)
    with pytest.raises(DomainError):
        assemble(g, -1.0)


@pytest.mark.parametrize("a", [3.0, derive_corridor(0.8).a_weight])
def test_symmetric_and_positive(a):
    g = build_grid(20, 14)
    op = assemble(g, a, hardy_potential(g, 0.9))
    rng = np.random.default_rng(3)
    for _ in range(10):
        u, v = rng.standard_normal((2,) + g.shape)
        lhs, rhs = op.inner(op.apply(u), v), op.inner(u, op.apply(v))
        assert lhs == pytest.approx(rhs, rel=1e-10)
        assert op.inner(op.apply(u), u) > 0


def test_zero_rhs_gives_zero():
    g = build_grid(16, 16)
    u, rep = solve_dirichlet(assemble(g, 3.0), g.sample(lambda R, Z: 0 * R), 1e-10)
    assert rep.iterations == 0 and np.all(u.values == 0.0)


def test_manufactured_order():
    hs, errs = [], []
    for n in (32, 64, 128):
        g = build_grid(n, n)
        f, exact = _manufactured(g)
        u, rep = solve_dirichlet(assemble(g, 3.0), f, 1e-12)
        assert rep.final_residual <= 1e-12
        errs.append(lp_norm(u.with_values(u.values - exact.values), 2.0, 3.0))
        hs.append(1 / n)
    assert fit_loglog(hs, errs).slope == pytest.approx(2.0, abs=0.2)


def test_galerkin_gap():
    g = build_grid(40, 40)
    f, _ = _manufactured(g)
    op = assemble(g, 3.0)
    tol = 1e-9
    u, rep = solve_dirichlet(op, f, tol)
    bound = 10 * tol * math.sqrt(op.inner(f.values, f.values)) * math.sqrt(op.inner(u.values, u.values))
    assert rep.energy_identity_gap <= bound
    # the reported gap uses the grid energy functional and the weighted integral
    assert abs(dirichlet_energy(u, 3.0) - integrate(u.with_values(f.values * u.values), 3.0)) <= bound


def test_maximum_principle():
    g = build_grid(24, 24)
    op = assemble(g, 3.0)
    rng = np.random.default_rng(11)
    for _ in range(10):
        f = ScalarField(g, rng.uniform(0, 1, g.shape) * (rng.uniform(size=g.shape) < 0.3))
        u, _ = solve_dirichlet(op, f, 1e-12)
        assert u.values.min() >= -1e-12


def test_iteration_cap_enforced():
    g = build_grid(32, 32)
    f, _ = _manufactured(g)
    with pytest.raises(ConvergenceError) as info:
        solve_dirichlet(assemble(g, 3.0), f, 1e-12, maxiter=3)
    assert info.value.last_residual > 1e-12
    assert iteration_cap(1024, 1e-10) == math.ceil(20 * 32 * math.log(1e10))


def test_friedrichs_bound_and_mode(mu1_32, oracle):
    mu1, mode = mu1_32
    assert mu1 >= oracle["poincare_1d"]
    assert mu1 == pytest.approx(oracle["mu1_continuum_a3"], rel=5e-3)
    v = mode.values
    assert v.min() > 0  # no sign change, positive mean
    m = mode.grid.cell_mass(3.0)
    assert np.sum(m * v * v) == pytest.approx(1.0, rel=1e-12)


def test_friedrichs_richardson(oracle):
    mus = [friedrichs_mu1(build_grid(n, n), 3.0, 1e-11)[0] for n in (16, 32, 64, 128)]
    gaps = np.diff(mus)
    ratios = gaps[:-1] / gaps[1:]
    assert np.all((ratios > 3.0) & (ratios < 5.0)), ratios
    assert abs(mus[-1] - oracle["mu1_continuum_a3"]) < abs(mus[0] - oracle["mu1_continuum_a3"])


def test_coercivity_on_random_fields(mu1_32):
    mu1, mode = mu1_32
    g = mode.grid
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(50):
        u = random_smooth_field(g, rng)
        mass = integrate(u.with_values(u.values**2), 3.0)
        assert mass <= dirichlet_energy(u, 3.0) / mu1 * (1 + 1e-8)
    assert rayleigh_quotient(assemble(g, 3.0), mode.values) == pytest.approx(mu1, rel=1e-9)


def test_potential_composed_bound(mu1_32):
    mu1, mode = mu1_32
    g = mode.grid
    rng = np.random.Generator(np.random.PCG64(9))
    for _ in range(10):
        G = random_smooth_field(g, rng)
        phi = solve_potential(G, 1e-11)
        # ||phi||^2 <= |grad phi|^2 / mu1 = <G, phi> / mu1 <= ||G|| ||phi|| / mu1
        assert lp_norm(phi, 2, 3) <= lp_norm(G, 2, 3) / mu1 * (1 + 1e-8)
    zero = solve_potential(g.sample(lambda R, Z: 0 * R), 1e-10)
    assert np.all(zero.values == 0)


def test_potential_manufactured():
    g = build_grid(64, 64)
    f, exact = _manufactured(g)
    phi = solve_potential(f, 1e-11)
    assert np.max(np.abs(phi.values - exact.values)) < 1e-3


def test_backends_agree():
    g = build_grid(24, 18)
    op = assemble(g, 3.0, hardy_potential(g, 0.8))
    u = np.random.default_rng(2).standard_normal(g.shape)
    a = kernels.stencil_apply_numpy(u, op.kr_in, op.kz_in, op.diag, np.empty_like(u))
    b = kernels.stencil_apply_loops(u, op.kr_in, op.kz_in, op.diag, np.empty_like(u))
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)
    f = np.ascontiguousarray(op.apply(u))
    x1, x2 = np.zeros(g.shape), np.zeros(g.shape)
    i1, r1 = kernels.cg_numpy(op.kr_in, op.kz_in, op.diag, op.mass, f, x1, 1e-11, 5000)
    i2, r2 = kernels.cg_loops(op.kr_in, op.kz_in, op.diag, op.mass, f, x2, 1e-11, 5000)
    assert r1 <= 1e-11 and r2 <= 1e-11
    # summation order differs, so agreement is at the solve tolerance, not bitwise
    np.testing.assert_allclose(x1, x2, rtol=1e-7, atol=1e-8)
    np.testing.assert_allclose(x1, u, rtol=1e-7, atol=1e-8)
