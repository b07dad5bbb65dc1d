import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from backend.app.errors import NumericError, ParameterError
from backend.app.fea import solve_system
from backend.app.models import Force, GridDomain, LoadCase, MaterialModel, SimpConfig
from backend.app.simp import filter_sensitivities, iter_simp, oc_update, run_simp, sensitivity_analysis
from backend.app.simp.oc import _candidate

from conftest import cantilever_case, mbb_case


def _compliance(grid, rho, mat, lc):
    return solve_system(grid, rho, mat, lc).total_compliance


def test_sensitivities_match_central_differences(rng, material):
    grid = GridDomain(nelx=6, nely=6)
    h = 1e-6
    for _ in range(20):
        rho = rng.uniform(0.2, 0.9, size=grid.shape)
        node = int(rng.integers(grid.nely + 1, grid.n_nodes))
        lc = LoadCase(
            forces=[Force(node=node, fx=float(rng.uniform(-1, 1)), fy=float(rng.uniform(-1, 1)))],
            fixed_dofs=cantilever_case(grid).fixed_dofs,
        )
        dc = sensitivity_analysis(grid, rho, material, solve_system(grid, rho, material, lc))
        fd = np.zeros(grid.shape)
        for ey in range(grid.nely):
            for ex in range(grid.nelx):
                up, down = rho.copy(), rho.copy()
                up[ey, ex] += h
                down[ey, ex] -= h
                fd[ey, ex] = (_compliance(grid, up, material, lc) - _compliance(grid, down, material, lc)) / (2 * h)
        scale = np.abs(fd).max()
        np.testing.assert_allclose(dc, fd, rtol=1e-4, atol=1e-4 * scale)


def _brute_filter(rho, dc, rmin):
    nely, nelx = rho.shape
    out = np.zeros_like(dc)
    for i in range(nelx):
        for j in range(nely):
            num, wsum = 0.0, 0.0
            for k in range(nelx):
                for l in range(nely):
                    w = max(0.0, rmin - math.hypot(i - k, j - l))
                    num += w * rho[l, k] * dc[l, k]
                    wsum += w
            out[j, i] = num / (max(1e-3, rho[j, i]) * wsum)
    return out


@pytest.mark.parametrize("rmin", [1.5, 2.5, 3.2])
def test_filter_matches_brute_force(rng, rmin):
    grid = GridDomain(nelx=7, nely=5)
    rho = rng.uniform(0.0, 1.0, size=grid.shape)
    rho[0, 0] = 0.0
    dc = -rng.uniform(0.0, 5.0, size=grid.shape)
    np.testing.assert_allclose(filter_sensitivities(grid, rho, dc, rmin), _brute_filter(rho, dc, rmin), rtol=1e-12)


def test_filter_radius_one_is_identity(rng):
    grid = GridDomain(nelx=4, nely=3)
    dc = -rng.uniform(size=grid.shape)
    out = filter_sensitivities(grid, np.full(grid.shape, 0.5), dc, 1.0)
    assert np.array_equal(out, dc)
    assert out is not dc


def test_filter_rejects_non_positive_radius():
    grid = GridDomain(nelx=2, nely=2)
    with pytest.raises(ParameterError):
        filter_sensitivities(grid, np.ones(grid.shape), -np.ones(grid.shape), 0.0)


def test_oc_update_matches_root_of_volume_equation(rng):
    config = SimpConfig(volfrac=0.4, move_limit=0.2, oc_tol=1e-9)
    rho = rng.uniform(0.2, 0.6, size=(10, 20))
    dc = -rng.uniform(0.01, 10.0, size=rho.shape)
    lower, upper = np.maximum(0.0, rho - 0.2), np.minimum(1.0, rho + 0.2)
    target = config.volfrac * rho.size

    lam = brentq(lambda l: _candidate(rho, dc, l, lower, upper).sum() - target, 1e-12, 1e6, xtol=1e-14)
    new = oc_update(rho, dc, config)
    np.testing.assert_allclose(new, _candidate(rho, dc, lam, lower, upper), atol=1e-6)
    assert new.mean() == pytest.approx(config.volfrac, abs=1e-6)
    assert np.all(np.abs(new - rho) <= 0.2 + 1e-12)
    assert new.min() >= 0.0 and new.max() <= 1.0


def test_oc_update_rejects_unreachable_volume():
    rho = np.full((4, 4), 0.1)
    with pytest.raises(NumericError):
        oc_update(rho, -np.ones_like(rho), SimpConfig(volfrac=0.9, move_limit=0.2))


def test_run_simp_holds_volume_and_lowers_compliance(material):
    grid = GridDomain(nelx=24, nely=8)
    result = run_simp(grid, material, mbb_case(grid), SimpConfig(volfrac=0.5, max_iters=30))
    assert result.density.shape == grid.shape
    assert result.density.mean() == pytest.approx(0.5, abs=1e-3)
    assert result.compliance_history[-1] < result.compliance_history[0]
    assert len(result.compliance_history) == result.iterations


def test_iteration_cap_reports_non_convergence(material):
    grid = GridDomain(nelx=12, nely=4)
    result = run_simp(grid, material, mbb_case(grid), SimpConfig(max_iters=1))
    assert result.iterations == 1
    assert not result.converged
    assert len(result.compliance_history) == 1


def test_reported_compliance_belongs_to_returned_density(material, quick_simp):
    grid = GridDomain(nelx=12, nely=6)
    lc = cantilever_case(grid)
    result = run_simp(grid, material, lc, quick_simp)
    assert result.compliance == pytest.approx(_compliance(grid, result.density, material, lc), rel=1e-12)
    assert result.compliance != result.compliance_history[-1]


def test_doubling_forces_keeps_the_design(material, quick_simp):
    grid = GridDomain(nelx=12, nely=6)
    lc = cantilever_case(grid, fx=3.0, fy=-7.0)
    a = run_simp(grid, material, lc, quick_simp)
    b = run_simp(grid, material, lc.scaled(2.0), quick_simp)
    np.testing.assert_allclose(a.density, b.density, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(np.array(b.compliance_history), 4.0 * np.array(a.compliance_history), rtol=1e-10)


def test_config_penalty_overrides_material(quick_simp):
    grid = GridDomain(nelx=10, nely=5)
    lc = cantilever_case(grid)
    a = run_simp(grid, MaterialModel(penal=1.0), lc, quick_simp)
    b = run_simp(grid, MaterialModel(penal=3.0), lc, quick_simp)
    np.testing.assert_array_equal(a.density, b.density)


def test_iter_simp_yields_each_step(material, quick_simp):
    grid = GridDomain(nelx=10, nely=5)
    states = list(iter_simp(grid, material, cantilever_case(grid), quick_simp))
    assert [s.iteration for s in states] == list(range(1, quick_simp.max_iters + 1))


def _top88(nelx, nely, volfrac, penal, rmin, max_iters):
    """Independent transcription of the classic 88-line compliance code."""
    e0, emin, nu = 1.0, 1e-9, 0.3
    a11 = np.array([[12, 3, -6, -3], [3, 12, 3, 0], [-6, 3, 12, -3], [-3, 0, -3, 12]])
    a12 = np.array([[-6, -3, 0, 3], [-3, -6, -3, -6], [0, -3, -6, 3], [3, -6, 3, -6]])
    b11 = np.array([[-4, 3, -2, 9], [3, -4, -9, 4], [-2, -9, -4, -3], [9, 4, -3, -4]])
    b12 = np.array([[2, -3, 4, -9], [-3, 2, 9, -2], [4, 9, 2, 3], [-9, -2, 3, 2]])
    ke = 1 / (1 - nu**2) / 24 * (np.block([[a11, a12], [a12.T, a11]]) + nu * np.block([[b11, b12], [b12.T, b11]]))
    nodenrs = np.arange((1 + nelx) * (1 + nely)).reshape(1 + nely, 1 + nelx, order="F")
    edofvec = (2 * nodenrs[:-1, :-1] + 2).ravel(order="F")
    edofmat = edofvec[:, None] + np.array([0, 1, 2 * nely + 2, 2 * nely + 3, 2 * nely, 2 * nely + 1, -2, -1])
    ik = np.kron(edofmat, np.ones((8, 1), dtype=int)).ravel()
    jk = np.kron(edofmat, np.ones((1, 8), dtype=int)).ravel()
    ndof = 2 * (nelx + 1) * (nely + 1)
    f = np.zeros(ndof)
    f[1] = -1.0
    fixed = np.union1d(np.arange(0, 2 * (nely + 1), 2), [ndof - 1])
    free = np.setdiff1d(np.arange(ndof), fixed)

    rows, cols, vals = [], [], []
    r = math.ceil(rmin) - 1
    for i in range(nelx):
        for j in range(nely):
            for k in range(max(i - r, 0), min(i + r + 1, nelx)):
                for l in range(max(j - r, 0), min(j + r + 1, nely)):
                    rows.append(i * nely + j)
                    cols.append(k * nely + l)
                    vals.append(max(0.0, rmin - math.hypot(i - k, j - l)))
    hmat = coo_matrix((vals, (rows, cols)), shape=(nelx * nely,) * 2).tocsr()
    hs = np.asarray(hmat.sum(axis=1)).ravel()

    x = np.full(nelx * nely, volfrac)
    c = 0.0
    for _ in range(max_iters):
        sk = (ke.ravel()[None, :] * (emin + x[:, None] ** penal * (e0 - emin))).ravel()
        kmat = coo_matrix((sk, (ik, jk)), shape=(ndof, ndof)).tocsc()
        u = np.zeros(ndof)
        u[free] = spsolve(kmat[free][:, free], f[free])
        ce = np.einsum("ij,jk,ik->i", u[edofmat], ke, u[edofmat])
        c = float(((emin + x**penal * (e0 - emin)) * ce).sum())
        dc = -penal * (e0 - emin) * x ** (penal - 1) * ce
        dc = hmat @ (x * dc) / hs / np.maximum(1e-3, x)
        l1, l2, move = 0.0, 1e9, 0.2
        while (l2 - l1) / (l1 + l2) > 1e-3:
            lmid = 0.5 * (l2 + l1)
            xnew = np.maximum(0, np.maximum(x - move, np.minimum(1, np.minimum(x + move, x * np.sqrt(-dc / lmid)))))
            if xnew.sum() > volfrac * nelx * nely:
                l1 = lmid
            else:
                l2 = lmid
        change = np.abs(xnew - x).max()
        x = xnew
        if change <= 0.01:
            break
    return x.reshape(nely, nelx, order="F"), c


@pytest.mark.slow
def test_mbb_beam_matches_classic_code():
    grid = GridDomain(nelx=60, nely=20)
    config = SimpConfig(volfrac=0.5, penal=3.0, rmin=1.5, max_iters=200, change_tol=0.01, oc_tol=1e-3)
    result = run_simp(grid, MaterialModel(), mbb_case(grid), config)
    ref_x, ref_c = _top88(60, 20, 0.5, 3.0, 1.5, 200)
    assert result.compliance == pytest.approx(ref_c, rel=0.01)
    assert np.mean((result.density - ref_x) ** 2) <= 1e-2
