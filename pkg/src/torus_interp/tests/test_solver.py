#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import math

import numpy as np
import pytest
import scipy.linalg

from torus_interp.exceptions import DomainError, InputError, NumericalError, RangeError
from torus_interp.kernel import KernelSpec, TruncationPolicy, eval_w, kernel_at_zero
from torus_interp.solver import (
    FittedModel,
    RegularizedSolver,
    ScatteredData,
    eigen_diagnostics,
    find_duplicates,
)
from torus_interp.torus import FrequencyBound, TorusPoint

# ------------------------------------------------------------------------------


def _random_data(n, m, seed):
    rng = np.random.default_rng(seed)
    return ScatteredData(points=rng.random((n, m)), values=rng.standard_normal(n))


class TestScatteredData:
    @pytest.mark.unit
    def test_wraps_points(self):
        data = ScatteredData(points=[[1.25], [-0.25]], values=[1.0, 2.0])
        np.testing.assert_array_equal(data.points, [[0.25], [0.75]])
        assert data.n == 2
        assert data.m == 1
        assert not data.points.flags.writeable

    @pytest.mark.unit
    def test_validation(self):
        with pytest.raises(InputError):
            ScatteredData(points=[[0.1], [0.2]], values=[1.0])
        with pytest.raises(InputError) as excinfo:
            ScatteredData(points=[[0.1], [0.2]], values=[1.0, float("nan")])
        assert excinfo.value.indices == [1]


class TestRegularizedSolver:
    @pytest.fixture(scope="class")
    def solver(self):
        return RegularizedSolver()

    @pytest.mark.unit
    def test_single_site(self, solver):
        spec = KernelSpec(1, 1, 10.0, omega=(4,))
        data = ScatteredData(points=[[0.3]], values=[2.0])
        model = solver.fit(data, spec)
        w0 = kernel_at_zero(spec)
        assert model.coeffs[0] == pytest.approx(2.0 / (w0 + 1.0 / 100.0), rel=1e-14)
        assert solver.evaluate(model, TorusPoint((0.3,))) == pytest.approx(
            2.0 * w0 / (w0 + 0.01), rel=1e-13
        )

    @pytest.mark.unit
    def test_zero_data(self, solver):
        spec = KernelSpec(2, 2, 5.0, omega=(3, 3))
        data = ScatteredData(points=np.random.default_rng(0).random((6, 2)), values=np.zeros(6))
        model = solver.fit(data, spec)
        np.testing.assert_array_equal(model.coeffs, np.zeros(6))
        np.testing.assert_array_equal(solver.evaluate(model, data.points), np.zeros(6))

    @pytest.mark.unit
    def test_matches_dense_inverse(self, solver):
        spec = KernelSpec(1, 1, 10.0, omega=(6,))
        data = _random_data(8, 1, 4)
        matrix = solver.assemble(data, spec)
        model = solver.fit_assembled(matrix, data)
        expected = np.linalg.inv(matrix.system_matrix()) @ data.values
        np.testing.assert_allclose(model.coeffs, expected, atol=1e-10)

    @pytest.mark.unit
    def test_matrix_structure(self, solver):
        spec = KernelSpec(2, 2, 3.0, omega=(2, 3))
        data = _random_data(9, 2, 8)
        matrix = solver.assemble(data, spec)
        np.testing.assert_array_equal(matrix.entries, matrix.entries.T)
        assert np.all(np.diag(matrix.entries) == matrix.entries[0, 0])
        assert matrix.entries[2, 5] == pytest.approx(
            eval_w(data.points[2] - data.points[5], spec), abs=1e-13
        )

    @pytest.mark.unit
    def test_constant_data_with_zero_box(self, solver):
        spec = KernelSpec(1, 1, 4.0, omega=(0,))
        data = ScatteredData(points=np.linspace(0.0, 0.9, 5)[:, np.newaxis], values=np.full(5, 3.0))
        model = solver.fit(data, spec)
        expected = 3.0 / (1.0 + 1.0 / 16.0)
        np.testing.assert_allclose(model.coeffs, expected, rtol=1e-13)
        np.testing.assert_allclose(solver.evaluate_grid(model, 16), expected, rtol=1e-13)

    @pytest.mark.unit
    def test_linear_in_data(self, solver):
        spec = KernelSpec(1, 1, 10.0, omega=(8,))
        points = np.random.default_rng(1).random((10, 1))
        q1, q2 = np.random.default_rng(2).standard_normal((2, 10))
        fit = lambda q: solver.fit(ScatteredData(points=points, values=q), spec).coeffs
        np.testing.assert_allclose(fit(2.0 * q1 - 3.0 * q2), 2.0 * fit(q1) - 3.0 * fit(q2), atol=1e-10)

    @pytest.mark.unit
    def test_duplicates_rejected(self, solver):
        spec = KernelSpec(1, 1, 1.0, omega=(2,))
        data = ScatteredData(points=[[0.1], [0.5], [1.1]], values=[1.0, 2.0, 3.0])
        with pytest.raises(InputError) as excinfo:
            solver.fit(data, spec)
        assert excinfo.value.indices == [(0, 2)]
        assert find_duplicates(np.array([[0.0], [1.0 - 1e-14]]), 1e-12) == [(0, 1)]

    @pytest.mark.unit
    def test_limits(self):
        spec = KernelSpec(1, 1, 1.0, omega=(2,))
        with pytest.raises(RangeError):
            RegularizedSolver(max_sites=4).fit(_random_data(5, 1, 0), spec)
        with pytest.raises(DomainError):
            RegularizedSolver().fit(_random_data(3, 1, 0), spec.with_lambda(1e13))
        with pytest.raises(DomainError):
            RegularizedSolver().fit(_random_data(3, 1, 0).points, spec)

    @pytest.mark.unit
    def test_grid_matches_pointwise(self, solver):
        spec = KernelSpec(2, 2, 10.0, omega=(3, 3))
        model = solver.fit(_random_data(12, 2, 6), spec)
        grid = solver.evaluate_grid(model, (4, 6))
        assert grid.shape == (4, 6)
        assert grid[1, 2] == pytest.approx(
            solver.evaluate(model, TorusPoint((0.25, 2.0 / 6.0))), abs=1e-12
        )
        with pytest.raises(RangeError):
            RegularizedSolver(max_grid_points=100).evaluate_grid(model, 11)

    @pytest.mark.unit
    def test_pure_mode_l2_norm(self, solver):
        # (1/2)(w(x) - w(x - 1/2)) = cos(2 pi x) for omega = 1, lam = 1
        model = FittedModel(
            points=np.array([[0.0], [0.5]]),
            coeffs=np.array([1.0, -1.0]),
            spec=KernelSpec(1, 1, 1.0, omega=(1,)),
            bound=FrequencyBound((1,)),
        )
        values = solver.evaluate_grid(model, 4096)
        assert values[0] == pytest.approx(1.0, abs=1e-14)
        assert math.sqrt(np.mean(values**2)) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-6)

    @pytest.mark.unit
    def test_site_residuals(self, solver):
        spec = KernelSpec(1, 1, 100.0, omega=(16,))
        data = _random_data(10, 1, 12)
        model = solver.fit(data, spec)
        residuals = solver.site_residuals(model)
        # q - u(p) = c / lam^2
        np.testing.assert_allclose(-residuals, model.coeffs / 100.0**2, atol=1e-9)


class TestFactorization:
    @pytest.mark.unit
    def test_cholesky_failure(self, monkeypatch):
        def fail(*args, **kwargs):
            raise scipy.linalg.LinAlgError("not positive definite")

        monkeypatch.setattr(scipy.linalg, "cho_factor", fail)
        spec = KernelSpec(1, 1, 10.0, omega=(4,))
        data = _random_data(6, 1, 3)

        with pytest.raises(NumericalError) as excinfo:
            RegularizedSolver().fit(data, spec)
        assert excinfo.value.smallest_pivot is not None

        model = RegularizedSolver(indefinite_fallback=True).fit(data, spec)
        matrix = RegularizedSolver().assemble(data, spec)
        np.testing.assert_allclose(
            matrix.system_matrix() @ model.coeffs, data.values, atol=1e-10
        )


class TestConditioning:
    @pytest.mark.unit
    def test_single_site(self):
        solver = RegularizedSolver()
        matrix = solver.assemble(np.array([[0.4]]), KernelSpec(1, 1, 10.0, omega=(4,)))
        diagnostics = solver.condition_diagnostics(matrix)
        assert diagnostics.kappa_measured == 1.0

    @pytest.mark.unit
    def test_bounds(self):
        solver = RegularizedSolver()
        for lam in (1.0, 10.0, 100.0):
            spec = KernelSpec(2, 2, lam, omega=(4, 4))
            matrix = solver.assemble(_random_data(20, 2, 5), spec)
            diagnostics = solver.condition_diagnostics(matrix)
            assert diagnostics.bound_holds()
            assert diagnostics.kappa_measured <= diagnostics.kappa_trace_bound * (1 + 1e-12)
            assert diagnostics.kappa_trace_bound <= diagnostics.kappa_bound * (1 + 1e-12)
            assert diagnostics.min_eigenvalue >= 1.0 / lam**2 - 1e-12

    @pytest.mark.unit
    def test_full_kernel_bound(self):
        solver = RegularizedSolver()
        spec = KernelSpec(1, 1, 10.0, truncation=TruncationPolicy(radius=256))
        matrix = solver.assemble(_random_data(10, 1, 2), spec)
        assert matrix.bound == FrequencyBound((256,))
        assert solver.condition_diagnostics(matrix).bound_holds()


class TestEigenvalues:
    @pytest.mark.component
    def test_large_lambda_asymptotics(self):
        points = (np.arange(8)[:, np.newaxis] + 0.5) / 8.0
        table = eigen_diagnostics(points, 1, [1e2, 1e3, 1e4, 1e5])

        assert table.eigenvalues.shape == (4, 8)
        assert np.all(table.eigenvalues > 0)

        # rho_1 - n ~ lam^-1
        gap = table.leading_gap()
        assert np.all(gap[1:] / gap[:-1] <= 2.0)
        assert np.all(gap[1:] / gap[:-1] >= 0.5)

        # the remaining eigenvalues ~ lam^-1
        tail = table.scaled_tail()
        ratios = tail[1:] / tail[:-1]
        assert np.all((ratios >= 0.5) & (ratios <= 2.0))

    @pytest.mark.unit
    def test_validation(self):
        points = np.array([[0.1], [0.6]])
        with pytest.raises(DomainError):
            eigen_diagnostics(points, 1, [0.5, 10.0])
        with pytest.raises(DomainError):
            eigen_diagnostics(points, 1, [10.0, 5.0])
