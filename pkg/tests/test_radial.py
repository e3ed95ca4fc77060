"""Radial ODE solutions: shooting, torsion, norms, level sets."""

import math

import numpy as np
import pytest
from scipy.special import j0, j1, jn_zeros

import specbound as sb

J01 = float(jn_zeros(0, 1)[0])        # 2.404825557695773
LAM_DISK = J01 ** 2                   # 5.783185962946785
DISK_L2_SQ = math.pi * j1(J01) ** 2   # 0.846703591804 (Lommel integral)


# -- regular eigen solutions ------------------------------------------------

def test_eigen_ivp_initial_conditions(e2, h2):
    for model in (e2, h2):
        u = sb.solve_eigen_ivp(model, 2.0, 1.0)
        assert u.value(0.0) == 1.0
        assert u.derivative(0.0) == 0.0


def test_eigen_ivp_is_bessel_profile_on_disk(e2):
    u = sb.solve_eigen_ivp(e2, LAM_DISK, 1.0)
    assert abs(u.value(1.0)) <= 1e-6
    for r in (0.2, 0.5, 0.8):
        assert u.value(r) == pytest.approx(j0(J01 * r), abs=1e-9)


def test_eigen_ivp_small_lambda_is_constant(h2):
    u = sb.solve_eigen_ivp(h2, 1e-12, 3.0)
    assert u.value(3.0) == pytest.approx(1.0, abs=1e-10)


def test_eigen_ivp_validation(e2):
    with pytest.raises(sb.DomainError):
        sb.solve_eigen_ivp(e2, 0.0, 1.0)
    with pytest.raises(sb.DomainError):
        sb.solve_eigen_ivp(e2, 1.0, -1.0)


# -- shooting ---------------------------------------------------------------

def test_disk_eigenvalue_matches_bessel_zero(disk_pair):
    assert disk_pair.eigenvalue == pytest.approx(LAM_DISK, rel=1e-9)


def test_disk_radius_two_eigenvalue(disk_pair_r2):
    assert disk_pair_r2.eigenvalue == pytest.approx(LAM_DISK / 4.0, rel=1e-9)


def test_ball3_eigenvalue_is_one(ball3_pair):
    # sin(r)/r vanishes first at pi, so the unit eigenvalue is exact
    assert ball3_pair.eigenvalue == pytest.approx(1.0, rel=1e-9)


def test_euclidean_scaling_law(e2, disk_pair):
    lam1 = disk_pair.eigenvalue
    for R in (0.5, 2.0, 4.0):
        lam = sb.principal_dirichlet_eigenvalue(e2, R)
        assert lam == pytest.approx(lam1 / R ** 2, rel=1e-7)


def test_shooting_consistency(disk_pair, ball3_pair):
    for pair in (disk_pair, ball3_pair):
        w = pair.eigenfunction
        assert abs(w.value(pair.radius)) <= 1e-6 * sb.sup_norm(w)
        assert np.all(w.values[:-1] > 0)


def test_eigenvalue_monotone_in_radius(e2, h2):
    for model in (e2, h2):
        radii = [0.6, 0.9, 1.4, 2.1, 3.0]
        lams = [sb.principal_dirichlet_eigenvalue(model, R) for R in radii]
        assert all(a > b for a, b in zip(lams, lams[1:]))


def test_hyperbolic_eigenvalue_floor(h2):
    # the values decrease toward (n-1)^2/4 = 1/4 but never cross it
    lams = [sb.principal_dirichlet_eigenvalue(h2, R) for R in (1, 2, 4, 8, 16)]
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert all(lam > 0.25 for lam in lams)
    assert lams[-1] == pytest.approx(0.25, abs=0.05)


# -- torsion ----------------------------------------------------------------

def test_torsion_euclidean_closed_form(e2, torsion_e2_r1):
    # u(r) = (R^2 - r^2) / (2n)
    for r in (0.0, 0.3, 0.7, 1.0):
        assert torsion_e2_r1.value(r) == pytest.approx((1 - r * r) / 4.0,
                                                       abs=1e-10)
    u2 = sb.solve_torsion(e2, 2.0)
    assert u2.value(0.0) == pytest.approx(1.0, rel=1e-10)


def test_torsion_hyperbolic_closed_form(torsion_h2_r1):
    # u(r) = 2 log(cosh(R/2) / cosh(r/2))
    for r in (0.0, 0.4, 1.0):
        ref = 2.0 * math.log(math.cosh(0.5) / math.cosh(r / 2.0))
        assert torsion_h2_r1.value(r) == pytest.approx(ref, abs=1e-10)


def test_torsion_boundary_and_monotonicity(torsion_e2_r1, torsion_h2_r1):
    for u in (torsion_e2_r1, torsion_h2_r1):
        assert u.value(u.r_max) == 0.0
        assert np.all(np.diff(u.values) < 0)
        assert np.all(u.derivatives[1:] < 0)


def test_torsion_validation(e2):
    with pytest.raises(sb.DomainError):
        sb.solve_torsion(e2, 0.0)


# -- distribution function ----------------------------------------------------

def test_distribution_function_euclidean_torsion(e2, torsion_e2_r1):
    # superlevel sets of (1 - r^2)/4 are balls of volume pi (1 - 4t)
    assert sb.distribution_function(torsion_e2_r1, e2, 0.125) == pytest.approx(
        math.pi / 2.0, rel=1e-9)
    assert sb.distribution_function(torsion_e2_r1, e2, 0.0) == pytest.approx(
        math.pi, rel=1e-12)
    top = torsion_e2_r1.value(0.0)
    assert sb.distribution_function(torsion_e2_r1, e2, top) == 0.0
    assert sb.distribution_function(torsion_e2_r1, e2, top * 2.0) == 0.0


def test_distribution_function_rejects_non_monotone(e2):
    grid = np.linspace(0.0, 1.0, 9)
    u = sb.RadialFunction(e2, grid, np.sin(3 * grid) + 1.0,
                          3 * np.cos(3 * grid) * 0 + np.array(
                              [0] + [3 * math.cos(3 * g) for g in grid[1:]]))
    with pytest.raises(sb.DomainError):
        sb.distribution_function(u, e2, 0.5)


def test_divergence_identity_on_level_sets(e2, h2, torsion_e2_r1, torsion_h2_r1):
    # flux form of the constant-Laplacian equation: the superlevel volume
    # equals boundary area times |u'| at the level radius
    for model, u in ((e2, torsion_e2_r1), (h2, torsion_h2_r1)):
        top = u.value(0.0)
        for t in np.linspace(0.03, 0.97, 20) * top:
            r_t = sb.level_radius(u, t)
            mu = sb.distribution_function(u, model, t)
            flux = sb.ball_area(model, r_t) * abs(u.derivative(r_t))
            assert flux == pytest.approx(mu, rel=1e-6)


def test_coarea_chain_equality_euclidean(e2, torsion_e2_r1):
    # with the model's own profile the chained quantity -d/dt H_a(mu(t)) is
    # exactly one for the torsion function
    aif = sb.AifEvaluator(sb.ModelProfile(e2))
    top = torsion_e2_r1.value(0.0)
    dt = top * 1e-3
    for t in np.linspace(0.05, 0.95, 50) * top:
        hi = aif.value(sb.distribution_function(torsion_e2_r1, e2, t - dt))
        lo = aif.value(sb.distribution_function(torsion_e2_r1, e2, t + dt))
        fd = (hi - lo) / (2 * dt)
        assert fd == pytest.approx(1.0, abs=1e-6)


def test_coarea_chain_hyperbolic(h2, torsion_h2_r1):
    aif = sb.AifEvaluator(sb.ModelProfile(h2))
    top = torsion_h2_r1.value(0.0)
    dt = top * 1e-3
    for t in np.linspace(0.05, 0.95, 50) * top:
        hi = aif.value(sb.distribution_function(torsion_h2_r1, h2, t - dt))
        lo = aif.value(sb.distribution_function(torsion_h2_r1, h2, t + dt))
        fd = (hi - lo) / (2 * dt)
        assert fd >= 1.0 - 1e-6


# -- norms --------------------------------------------------------------------

def test_lp_norm_constant_functions(e2):
    grid = np.linspace(0.0, 1.0, 33)
    ones = sb.RadialFunction(e2, grid, np.ones_like(grid), np.zeros_like(grid))
    assert sb.lp_norm(ones, e2, 4) == pytest.approx(math.pi ** 0.25, rel=1e-10)
    twos = sb.RadialFunction(e2, grid, 2 * np.ones_like(grid), np.zeros_like(grid))
    assert sb.lp_norm(twos, e2, 2) == pytest.approx(2 * math.sqrt(math.pi),
                                                    rel=1e-10)


def test_lp_norm_disk_eigenfunction(e2, disk_pair):
    got = sb.lp_norm(disk_pair.eigenfunction, e2, 2)
    assert got == pytest.approx(math.sqrt(DISK_L2_SQ), rel=1e-6)  # 0.920166


def test_lp_norm_validation(e2, disk_pair):
    with pytest.raises(sb.DomainError):
        sb.lp_norm(disk_pair.eigenfunction, e2, 0.5)
    with pytest.raises(sb.DomainError):
        sb.lp_norm(disk_pair.eigenfunction, e2, 2, r_max=5.0)


def test_sup_norm(e2, torsion_e2_r1, disk_pair):
    assert sb.sup_norm(torsion_e2_r1) == pytest.approx(0.25, rel=1e-10)
    assert sb.sup_norm(disk_pair.eigenfunction) == pytest.approx(1.0, rel=1e-12)
    grid = np.linspace(0.0, 1.0, 9)
    zero = sb.RadialFunction(e2, grid, np.zeros_like(grid), np.zeros_like(grid))
    assert sb.sup_norm(zero) == 0.0


def test_sup_norm_interior_maximum(e2):
    # place the maximum strictly between nodes to exercise the refinement
    grid = np.linspace(0.0, 1.0, 7)
    vals = np.cos(2.5 * (grid - 0.4)) ** 1
    ders = -2.5 * np.sin(2.5 * (grid - 0.4))
    ders[0] = 0.0
    u = sb.RadialFunction(e2, grid, vals, ders)
    assert sb.sup_norm(u) == pytest.approx(1.0, abs=5e-4)


# -- whole-manifold integration ----------------------------------------------

def test_global_solution_matches_h3_spherical_function(h3):
    # on the 3-dimensional hyperbolic model the regular solution is exactly
    # sinh(nu r) / (nu sinh r) with nu = sqrt(1 - lambda)
    lam = 0.5
    nu = math.sqrt(1.0 - lam)
    sol = sb.solve_whole_manifold(h3, lam, 7)
    for r in (0.5, 2.0, 5.0, 10.0):
        ref = math.sinh(nu * r) / (nu * math.sinh(r))
        assert sol.profile.value(r) == pytest.approx(ref, rel=1e-8)
    # decay exponent approaches 1 - nu
    assert sol.sigma == pytest.approx(1.0 - nu, rel=1e-3)


def test_global_norm_against_direct_quadrature(h3):
    # independent route: adaptive quadrature of the closed-form profile plus
    # the exact exponential tail remainder
    from scipy.integrate import quad
    lam, p = 0.5, 7
    nu = math.sqrt(1.0 - lam)
    sol = sb.solve_whole_manifold(h3, lam, p)

    def integrand(r):
        return (math.sinh(nu * r) / (nu * math.sinh(r))) ** p * math.sinh(r) ** 2

    body, _ = quad(integrand, 0, 60, limit=400)
    tail = integrand(60.0) / (p * (1 - nu) - 2.0)
    ref = (4 * math.pi * (body + tail)) ** (1.0 / p)
    assert sol.norm_value == pytest.approx(ref, rel=1e-5)


def test_global_solution_divergence_detection(h2):
    sol = sb.solve_whole_manifold(h2, 0.1875, 3)
    assert sol.divergent
    assert sol.norm_value == math.inf
    assert sol.tail_exponent > 0
    # sigma oracle rho - sqrt(rho^2 - lambda) = 1/4 with rho = 1/2; divergent
    # runs truncate at first stabilization, so the estimate is still settling
    assert sol.sigma == pytest.approx(0.25, rel=5e-3)


def test_global_solution_convergent_case(h2):
    sol = sb.solve_whole_manifold(h2, 0.1875, 5)
    assert not sol.divergent
    assert sol.tail_exponent < 0
    assert sol.tail_fraction <= 1e-5
    assert math.isfinite(sol.norm_value)


def test_global_solution_rejects_supercritical(h2):
    with pytest.raises(sb.NumericError):
        sb.solve_whole_manifold(h2, 0.5, 2)   # above the spectral bottom 1/4


# -- RadialFunction plumbing ---------------------------------------------------

def test_radial_function_validation(e2):
    with pytest.raises(sb.DomainError):
        sb.RadialFunction(e2, [0.1, 0.5], [1, 1], [0, 0])   # grid not at 0
    with pytest.raises(sb.DomainError):
        sb.RadialFunction(e2, [0.0, 0.5, 0.4], [1, 1, 1], [0, 0, 0])
    with pytest.raises(sb.DomainError):
        sb.RadialFunction(e2, [0.0, 0.5], [1, 1], [0.5, 0])  # u'(0) != 0


def test_radial_function_matches_nodes(disk_pair):
    w = disk_pair.eigenfunction
    idx = [0, len(w.radii) // 3, -1]
    for i in idx:
        assert w(w.radii[i]) == pytest.approx(w.values[i], abs=1e-14)


def test_radial_csv_export(tmp_path, torsion_e2_r1):
    path = tmp_path / "torsion.csv"
    torsion_e2_r1.to_csv(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "r,u,du"
    assert len(lines) == 1 + len(torsion_e2_r1.radii)
    r, u, du = lines[1].split(",")
    assert float(r) == 0.0
    assert float(u) == pytest.approx(0.25, rel=1e-10)
    # 12 significant digits in scientific notation
    assert len(u.split("e")[0].replace("-", "").replace(".", "")) == 12
