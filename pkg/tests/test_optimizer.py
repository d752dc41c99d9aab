import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.optimization import Objective, OptimizationProblem, ParameterBox
from models.power import SchemeFamily
from models.report import BoundKind, EngineKind
from models.simulation import SimulationSpec
from services import analytic
from services.errors import DomainError, OptimizationError, QuadratureError
from services.optimizer import (
    crossover_distance,
    default_boxes,
    golden_section_max,
    optimize,
    si_requirement,
)
from services.power_control import build_scheme


def problem(family, boxes, **kwargs):
    return OptimizationProblem(family=family, boxes=boxes, **kwargs)


class TestGoldenSection:
    def test_parabola(self):
        x, value = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-6)
        assert x == pytest.approx(0.3, abs=1e-5)
        assert value == pytest.approx(0.0, abs=1e-9)

    def test_maximum_at_boundary(self):
        x, _ = golden_section_max(lambda x: x, 0.0, 1.0, 1e-4)
        assert x == 1.0

    def test_flat_function_prefers_smaller_point(self):
        x, _ = golden_section_max(lambda x: 1.0, 2.0, 3.0, 1e-3)
        assert x == 2.0

    def test_degenerate_interval(self):
        assert golden_section_max(lambda x: x, 0.5, 0.5, 1e-3) == (0.5, 0.5)

    def test_empty_interval(self):
        with pytest.raises(DomainError):
            golden_section_max(lambda x: x, 1.0, 0.0, 1e-3)


class TestProblem:
    def test_boxes_must_match_family(self, config):
        with pytest.raises(ValidationError):
            problem(SchemeFamily.FPC, default_boxes(SchemeFamily.APC, config))

    def test_empty_box(self):
        with pytest.raises(ValidationError):
            ParameterBox(name="p_max", low=2.0, high=1.0)

    def test_default_boxes(self, config):
        names = {family: tuple(b.name for b in default_boxes(family, config)) for family in SchemeFamily}
        assert names[SchemeFamily.UPC] == ("p_min", "p_max")
        assert default_boxes(SchemeFamily.FPC, config)[1].high == 1.0


class TestOptimize:
    def test_constant_power_matches_brute_force(self, config):
        result = optimize(problem(SchemeFamily.CPC, default_boxes(SchemeFamily.CPC, config)), config)
        brute = max(
            analytic.analytic_report(config, build_scheme(SchemeFamily.CPC, config, p_max=p), BoundKind.LOWER).min_rate
            for p in np.linspace(0.002, 2.0, 400)
        )
        assert result.value >= brute * (1 - 5e-3)
        assert result.value == pytest.approx(min(result.rate_ul, result.rate_dl))
        assert all(entry.value <= result.value for entry in result.trace)

    def test_deterministic_trace(self, config):
        spec = problem(SchemeFamily.CPC, default_boxes(SchemeFamily.CPC, config), grid_points=8)
        first, second = optimize(spec, config), optimize(spec, config)
        assert first == second
        assert optimize(spec, config, workers=4) == first

    def test_degenerate_box(self, config):
        result = optimize(problem(SchemeFamily.CPC, (ParameterBox(name="p_max", low=1.0, high=1.0),)), config)
        assert result.best_parameters == (1.0,)
        assert [entry.stage for entry in result.trace] == ["grid"]

    def test_uniform_keeps_a_proper_range(self, config):
        result = optimize(problem(SchemeFamily.UPC, default_boxes(SchemeFamily.UPC, config), grid_points=6), config)
        p_min, p_max = result.best_parameters
        assert p_min < p_max
        assert math.isfinite(result.value)

    def test_always_on_apc_matches_constant_power(self, config):
        cpc = optimize(problem(SchemeFamily.CPC, default_boxes(SchemeFamily.CPC, config), grid_points=16), config)
        p_bar_box = default_boxes(SchemeFamily.APC, config)[0]
        apc = optimize(
            problem(SchemeFamily.APC, (p_bar_box, ParameterBox(name="xi", low=1.0, high=1.0)), grid_points=16), config
        )
        assert apc.value == pytest.approx(cpc.value, rel=1e-6)
        assert apc.best_parameters[0] == pytest.approx(cpc.best_parameters[0], abs=5e-3)

    def test_traffic_weights_raise_downlink_power(self, config):
        boxes = default_boxes(SchemeFamily.CPC, config)
        even = optimize(problem(SchemeFamily.CPC, boxes, grid_points=16), config)
        dl_heavy = optimize(problem(SchemeFamily.CPC, boxes, grid_points=16, traffic_weights=(4.0, 1.0)), config)
        assert dl_heavy.best_parameters[0] >= even.best_parameters[0]

    @pytest.mark.parametrize("objective", [Objective.MAX_ASE, Objective.MAX_EE])
    def test_other_objectives(self, config, objective):
        result = optimize(
            problem(SchemeFamily.FPC, default_boxes(SchemeFamily.FPC, config), objective=objective, grid_points=5),
            config,
        )
        assert result.value > 0
        assert result.parameter_names == ("p_bar", "epsilon")

    def test_fractional_search_near_zero_compensation(self, config):
        boxes = (ParameterBox(name="p_bar", low=0.05, high=2.0), ParameterBox(name="epsilon", low=0.0, high=1e-3))
        result = optimize(problem(SchemeFamily.FPC, boxes, grid_points=4, traffic_weights=(2.0, 1.0)), config)
        assert math.isfinite(result.value) and result.value > 0
        assert 0.0 <= result.best_parameters[1] <= 1e-3

    def test_monte_carlo_engine(self, config):
        spec = SimulationSpec(n_trials=500, chunk_size=250, seed=2)
        result = optimize(
            problem(SchemeFamily.CPC, default_boxes(SchemeFamily.CPC, config), engine=EngineKind.MONTE_CARLO,
                    grid_points=3, tolerance=0.1),
            config,
            spec,
        )
        assert math.isfinite(result.value)


class TestCrossover:
    def test_shrinks_as_si_grows(self, config, cpc):
        distances = [crossover_distance(cpc, beta, config) for beta in (1e-12, 1e-10, 1e-8)]
        assert distances == sorted(distances, reverse=True)
        assert 1.0 < distances[-1] < distances[0] < 5000.0

    def test_fractional_scheme_has_a_crossover(self, config, fpc):
        assert 1.0 < crossover_distance(fpc, 1e-10, config) < 5000.0

    def test_hd_wins_everywhere_under_full_si(self, config, cpc):
        assert crossover_distance(cpc, 1.0, config) == 0.0

    @pytest.mark.parametrize("beta", [1e-8, 1e-10])
    def test_fractional_reaches_farther_than_constant(self, config, cpc, fpc, beta):
        # cell-edge users are served at the peak, nearer ones below it
        assert crossover_distance(fpc, beta, config) > crossover_distance(cpc, beta, config)


class TestSIRequirement:
    def test_zero_target_accepts_any_si(self, config, cpc):
        result = si_requirement(cpc, 0.0, config)
        assert result.unbounded

    def test_target_between_reference_crossovers(self, config, cpc):
        near, far = crossover_distance(cpc, 1e-8, config), crossover_distance(cpc, 1e-10, config)
        target = 0.5 * (near + far)
        result = si_requirement(cpc, target, config)
        assert result.feasible and not result.unbounded
        assert 1e-10 <= result.beta <= 1e-8
        assert result.crossover_at_beta >= target - 1.0

    def test_longer_target_needs_more_cancellation(self, config, cpc):
        short = si_requirement(cpc, 50.0, config)
        long = si_requirement(cpc, 150.0, config)
        assert long.beta < short.beta

    def test_unreachable_target(self, config, cpc):
        result = si_requirement(cpc, 6000.0, config)
        assert not result.feasible
        assert result.beta is None

    def test_negative_target(self, config, cpc):
        with pytest.raises(DomainError):
            si_requirement(cpc, -1.0, config)


class TestObjectiveFailures:
    def test_domain_error_is_not_a_convergence_failure(self, config, monkeypatch):
        def reject(*args, **kwargs):
            raise DomainError("theta must be positive")

        monkeypatch.setattr(analytic, "analytic_report", reject)
        with pytest.raises(DomainError, match="theta"):
            optimize(problem(SchemeFamily.CPC, default_boxes(SchemeFamily.CPC, config), grid_points=3), config)

    def test_quadrature_failure_names_the_point(self, config, monkeypatch):
        def diverge(*args, **kwargs):
            raise QuadratureError("tail integral", 1.0, 1e-9)

        monkeypatch.setattr(analytic, "analytic_report", diverge)
        boxes = (ParameterBox(name="p_max", low=1.0, high=1.0),)
        with pytest.raises(OptimizationError) as info:
            optimize(problem(SchemeFamily.CPC, boxes), config)
        assert info.value.point == (1.0,)
        assert isinstance(info.value.__cause__, QuadratureError)
