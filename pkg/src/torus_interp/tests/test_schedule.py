#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import pytest

from torus_interp.exceptions import DomainError, ScheduleError
from torus_interp.schedule import (
    MARGIN_TERM_NAMES,
    ScheduleParams,
    instantiate,
    margin,
    margin_terms,
    suggest,
)
from torus_interp.torus import FrequencyBound

# ------------------------------------------------------------------------------


class TestMargin:
    @pytest.mark.unit
    def test_value(self):
        assert margin(0.2, 0.5, 1) == 0.3
        terms = ScheduleParams(0.2, 0.5, 1).terms()
        assert list(terms) == list(MARGIN_TERM_NAMES)
        assert terms["b-a(2k-1)"] == 0.3
        assert terms["2b"] == 1.0

    @pytest.mark.unit
    def test_spread_grows_with_k(self):
        assert margin(0.1, 0.5, 2) == pytest.approx(0.2)
        assert margin_terms(0.1, 0.5, 3)[2] == pytest.approx(0.5)

    @pytest.mark.unit
    def test_validation(self):
        with pytest.raises(DomainError):
            margin(0.0, 0.5, 1)
        with pytest.raises(DomainError):
            margin(0.2, -0.5, 1)
        with pytest.raises(DomainError):
            ScheduleParams(0.2, 0.5, 1, kappa=(1.0, 1.0))
        with pytest.raises(DomainError):
            ScheduleParams(0.2, 0.5, 1, kappa=(0.0,))


class TestInstantiate:
    @pytest.mark.unit
    @pytest.mark.parametrize(
        "alpha, beta, k",
        [
            (1.0, 1.0, 1),  # 1 - a(2k - 1)
            (0.25, 0.25, 1),  # b - a(2k - 1)
            (0.1, 1.2, 1),  # 1 + 2a - b
            (0.5, 1.5, 1),  # 2 - (a + b)
        ],
    )
    def test_zero_margin_refused(self, alpha, beta, k):
        params = ScheduleParams(alpha, beta, k)
        assert params.margin == 0.0
        with pytest.raises(ScheduleError) as excinfo:
            instantiate(params, 0.01)
        assert excinfo.value.margin == 0.0

    @pytest.mark.unit
    def test_force(self):
        params = ScheduleParams(0.25, 0.25, 1)
        with pytest.warns(UserWarning, match="force"):
            instance = instantiate(params, 0.01, force=True)
        assert instance.omega.omega[0] >= 1

    @pytest.mark.unit
    def test_values(self):
        instance = instantiate(ScheduleParams(0.32, 0.98, 1), 0.01)
        assert instance.lam == pytest.approx(10**1.96)
        assert instance.omega == FrequencyBound((4,))
        assert instance.zeta == 0.01
        assert not instance.clamped

    @pytest.mark.unit
    def test_round_half_up(self):
        # 1.25 * 0.25^-0.5 = 2.5
        instance = instantiate(ScheduleParams(0.5, 0.6, 1, kappa=(1.25,)), 0.25)
        assert instance.omega == FrequencyBound((3,))

    @pytest.mark.unit
    def test_omega_at_least_one(self):
        instance = instantiate(ScheduleParams(0.32, 0.98, 1, kappa=(1e-3,)), 0.5)
        assert instance.omega == FrequencyBound((1,))

    @pytest.mark.unit
    def test_per_axis_kappa(self):
        instance = instantiate(ScheduleParams(0.2, 0.9, 2, kappa=(1.0, 2.0)), 0.001)
        assert instance.omega == FrequencyBound((4, 8))

    @pytest.mark.unit
    def test_clamped(self):
        instance = instantiate(ScheduleParams(0.32, 0.98, 1), 1e-20)
        assert instance.clamped
        assert instance.lam == 1e12

    @pytest.mark.unit
    def test_zeta_range(self):
        params = ScheduleParams(0.32, 0.98, 1)
        for zeta in (0.0, 1.0, -0.1):
            with pytest.raises(DomainError):
                instantiate(params, zeta)


class TestSuggest:
    @pytest.mark.unit
    def test_one_dimension(self):
        params = suggest(1)
        assert params.alpha == 0.32
        assert params.beta == 0.98
        assert params.k == 1
        assert params.kappa == (1.0,)
        assert params.margin == pytest.approx(0.66)

    @pytest.mark.unit
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_feasible(self, m):
        params = suggest(m)
        assert params.k == m // 2 + 1
        assert params.m == m
        assert params.margin > 0

    @pytest.mark.unit
    def test_validation(self):
        with pytest.raises(DomainError):
            suggest(0)
