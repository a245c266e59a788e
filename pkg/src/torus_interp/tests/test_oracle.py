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

from torus_interp.exceptions import DomainError, RangeError, UnsupportedError
from torus_interp.kernel import KernelSpec
from torus_interp.oracle import (
    CoeffVector,
    DirectMinimizer,
    direct_minimize,
    functional_value,
    project_target,
)
from torus_interp.solver import RegularizedSolver, ScatteredData
from torus_interp.targets import SquareWave, projection_error
from torus_interp.torus import FrequencyBound

# ------------------------------------------------------------------------------


def _instance(rng, m, n_max, omega_max):
    n = int(rng.integers(1, n_max + 1))
    omega = tuple(int(w) for w in rng.integers(1, omega_max + 1, size=m))
    data = ScatteredData(points=rng.random((n, m)), values=rng.standard_normal(n))
    return data, omega


class TestCoeffVector:
    @pytest.mark.unit
    def test_complex_round_trip(self):
        rng = np.random.default_rng(0)
        u = CoeffVector.random((3, 2), rng)
        assert u.norm_sq() == pytest.approx(1.0, rel=1e-14)
        v = CoeffVector.from_complex((3, 2), u.to_complex())
        np.testing.assert_allclose(v.cos, u.cos, atol=1e-15)
        np.testing.assert_allclose(v.sin, u.sin, atol=1e-15)

    @pytest.mark.unit
    def test_rejects_asymmetric_coefficients(self):
        coeffs = np.zeros(5, dtype=complex)
        coeffs[4] = 1.0
        with pytest.raises(DomainError):
            CoeffVector.from_complex((2,), coeffs)

    @pytest.mark.unit
    def test_evaluate_and_norms(self):
        # 2 + cos(2 pi x) - 3 sin(4 pi x)
        u = CoeffVector((2,), 2.0, [1.0, 0.0], [0.0, -3.0])
        assert u.evaluate(np.array([0.125])) == pytest.approx(
            2.0 + math.cos(math.pi / 4) - 3.0 * math.sin(math.pi / 2), abs=1e-14
        )
        assert u.norm_sq() == pytest.approx(4.0 + 0.5 + 4.5)
        assert u.seminorm_sq(1) == pytest.approx(0.5 * 1.0 + 0.5 * 4.0 * 9.0)

    @pytest.mark.unit
    def test_restricted_and_sum(self):
        u = CoeffVector((2,), 1.0, [1.0, 2.0], [0.5, 0.0])
        low = u.restricted((1,))
        assert low.omega == FrequencyBound((1,))
        np.testing.assert_array_equal(low.cos, [1.0])
        total = low + CoeffVector((3,), 0.0, [0.0, 0.0, 1.0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(total.cos, [1.0, 0.0, 1.0])
        assert (u - u).norm_sq() == 0.0


class TestRepresenterAgainstDirect:
    @pytest.mark.component
    def test_one_dimensional(self):
        rng = np.random.default_rng(2024)
        solver = RegularizedSolver()
        queries = rng.random((100, 1))
        for trial in range(20):
            data, omega = _instance(rng, 1, 32, 16)
            lam = (1.0, 10.0, 100.0)[trial % 3]
            model = solver.fit(data, KernelSpec(1, 1, lam, omega=omega))
            direct = direct_minimize(data, lam, 1, omega)
            difference = solver.evaluate(model, queries) - direct.evaluate(queries)
            assert np.max(np.abs(difference)) <= 1e-8

    @pytest.mark.component
    def test_two_dimensional(self):
        rng = np.random.default_rng(7)
        solver = RegularizedSolver()
        queries = rng.random((100, 2))
        for trial in range(5):
            n = int(rng.integers(1, 21))
            data = ScatteredData(points=rng.random((n, 2)), values=rng.standard_normal(n))
            lam = (1.0, 10.0, 100.0)[trial % 3]
            model = solver.fit(data, KernelSpec(2, 2, lam, omega=(4, 4)))
            direct = direct_minimize(data, lam, 2, (4, 4))
            difference = solver.evaluate(model, queries) - direct.evaluate(queries)
            assert np.max(np.abs(difference)) <= 1e-8

    @pytest.mark.component
    @pytest.mark.parametrize("norm", [1e-3, 1e-1])
    @pytest.mark.parametrize("seed, lam", [(99, 10.0), (100, 1.0), (101, 100.0)])
    def test_fits_are_optimal(self, seed, lam, norm):
        rng = np.random.default_rng(seed)
        data, _ = _instance(rng, 1, 24, 1)
        omega = (12,)
        model = RegularizedSolver().fit(data, KernelSpec(1, 1, lam, omega=omega))
        representer = CoeffVector.from_model(model)
        direct = direct_minimize(data, lam, 1, omega)

        value = functional_value(representer, data, lam, 1)
        assert functional_value(model, data, lam, 1) == pytest.approx(value, rel=1e-14)
        assert abs(value - functional_value(direct, data, lam, 1)) <= 1e-8 * (1.0 + value)

        for u in (representer, direct):
            best = functional_value(u, data, lam, 1)
            for _ in range(50):
                delta = CoeffVector.random(omega, rng, norm=norm)
                assert best <= functional_value(u + delta, data, lam, 1)


class TestFunctional:
    @pytest.mark.unit
    def test_without_data(self):
        u = CoeffVector((1,), 1.0, [2.0], [0.0])
        # lam * 0.5 * 4 + (1 + 2)
        assert functional_value(u, None, 3.0, 1) == pytest.approx(9.0)

    @pytest.mark.unit
    def test_rejects_other_types(self):
        with pytest.raises(DomainError):
            functional_value(np.zeros(3), None, 1.0, 1)

    @pytest.mark.unit
    def test_mode_limit(self):
        data = ScatteredData(points=[[0.1, 0.2]], values=[1.0])
        with pytest.raises(RangeError):
            DirectMinimizer(max_modes=100).minimize(data, 1.0, 2, (10, 10))


class TestProjection:
    @pytest.mark.unit
    def test_square_wave_partial_sum(self):
        omega = 9
        projection = project_target(SquareWave(), (omega,))
        x = np.linspace(0.01, 0.99, 37)
        expected = sum(
            4.0 / (math.pi * l) * np.sin(2.0 * math.pi * l * x) for l in range(1, omega + 1, 2)
        )
        np.testing.assert_allclose(projection.evaluate(x[:, np.newaxis]), expected, atol=1e-13)

    @pytest.mark.unit
    def test_parseval(self):
        square = SquareWave()
        for omega in (1, 4, 15, 64):
            inside = project_target(square, (omega,)).norm_sq()
            assert inside + projection_error(square, (omega,)) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.unit
    def test_unsupported_target(self):
        class Opaque:
            name = "opaque"
            m = 1
            has_coefficients = False

        with pytest.raises(UnsupportedError):
            project_target(Opaque(), (3,))
