"""Tests for configuration models and presets."""

import math

import pytest
from pydantic import ValidationError

from chemotaxis_lab.lab import validate_config
from chemotaxis_lab.models import (
    DEFAULT_PRESETS,
    EXPERIMENT_PRESETS,
    ExperimentConfig,
    ExperimentKind,
    FitWindow,
    GaussianData,
    NormSpec,
    PacketData,
    get_preset,
)
from chemotaxis_lab.models.config import DecayParams, StabilityParams


class TestExponent:
    @pytest.mark.parametrize("text", ["inf", "Infinity", "max"])
    def test_named_infinity(self, text):
        assert NormSpec(p=text).p == math.inf

    def test_dumps_infinity_as_text(self):
        assert DecayParams().model_dump(mode="json")["p"] == "inf"
        assert StabilityParams().model_dump(mode="json")["exponents"] == [1.0, 2.0, "inf"]

    def test_below_one_is_rejected(self):
        with pytest.raises(ValidationError):
            NormSpec(p=0.5)


class TestExperimentConfig:
    def test_initial_data_is_discriminated_by_kind(self):
        config = ExperimentConfig.model_validate(
            {"name": "x", "kind": "growth", "initial": {"kind": "packet", "width": 12.0}}
        )
        assert isinstance(config.initial, PacketData)
        assert config.initial.width == 12.0

    def test_default_initial_data(self):
        config = ExperimentConfig(name="x", kind=ExperimentKind.EVOLVE)
        assert isinstance(config.initial, GaussianData)

    def test_unknown_initial_kind_is_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"name": "x", "kind": "evolve", "initial": {"kind": "spiral"}})

    def test_name_must_be_a_path_segment(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(name="two words", kind=ExperimentKind.EVOLVE)

    def test_fit_window_must_be_ordered(self):
        with pytest.raises(ValidationError, match="t_min < t_max"):
            FitWindow(t_min=10.0, t_max=5.0)

    def test_solver_for_takes_A_from_the_experiment(self):
        config = ExperimentConfig(name="x", kind=ExperimentKind.EVOLVE, A=0.7)
        solver = config.solver_for(horizon=3.0)
        assert solver.A == 0.7
        assert solver.horizon == 3.0
        assert config.solver.horizon != 3.0
        assert config.solver_for(A=2.0).A == 2.0

    def test_round_trip_through_json(self):
        config = get_preset("decay-1d")
        again = ExperimentConfig.model_validate(config.model_dump(mode="json"))
        assert again == config


class TestPresets:
    @pytest.mark.parametrize("name", sorted(EXPERIMENT_PRESETS))
    def test_every_preset_is_valid(self, name):
        assert validate_config(EXPERIMENT_PRESETS[name]) == []

    def test_names_match_keys(self):
        assert all(preset.name == name for name, preset in EXPERIMENT_PRESETS.items())

    def test_defaults_refer_to_presets(self):
        for names in DEFAULT_PRESETS.values():
            assert all(name in EXPERIMENT_PRESETS for name in names)

    def test_get_preset_returns_a_copy(self):
        preset = get_preset("growth-a4")
        preset.solver.horizon = 1.0
        assert EXPERIMENT_PRESETS["growth-a4"].solver.horizon == 30.0

    def test_unknown_preset(self):
        with pytest.raises(KeyError, match="known"):
            get_preset("nope")
