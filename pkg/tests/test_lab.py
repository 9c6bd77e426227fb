"""Tests for config validation, loading and the StabilityLab entry points."""

from pathlib import Path

import pytest

from chemotaxis_lab import (
    ConfigValidationError,
    StabilityLab,
    load_config,
    load_configs,
    validate_config,
)
from chemotaxis_lab.models.config import (
    DecayParams,
    ExperimentConfig,
    ExperimentKind,
    GridSpec,
    PacketData,
    RandomData,
    SolverConfig,
    SweepParams,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


class TestValidateConfig:
    def test_collects_every_problem(self):
        config = ExperimentConfig(
            name="bad-decay", kind=ExperimentKind.DECAY, A=1.5, decay=DecayParams(p=1.0, q=2.0)
        )
        errors = validate_config(config)
        assert any("A < 1" in e for e in errors)
        assert any("1 <= q <= p" in e for e in errors)

    def test_growth_needs_instability(self):
        config = ExperimentConfig(name="g", kind=ExperimentKind.GROWTH, A=0.9)
        assert any("A > 1" in e for e in validate_config(config))

    def test_positivity_needs_raw_formulation(self):
        config = ExperimentConfig(name="p", kind=ExperimentKind.POSITIVITY)
        assert validate_config(config) == ["'positivity' needs solver.formulation = raw"]

    def test_time_step_above_bound(self):
        config = ExperimentConfig(
            name="e", kind=ExperimentKind.EVOLVE, solver=SolverConfig(dt=1.0)
        )
        assert any("stability bound" in e for e in validate_config(config))

    def test_grid_errors_are_reported(self):
        config = ExperimentConfig(name="e", kind=ExperimentKind.EVOLVE, grid=GridSpec(points=7))
        assert any(e.startswith("grid:") for e in validate_config(config))

    def test_packet_must_fit(self):
        config = ExperimentConfig(
            name="g", kind=ExperimentKind.GROWTH, A=2.0, initial=PacketData(width=20.0)
        )
        assert any("10*width" in e for e in validate_config(config))

    def test_packet_must_fit_every_axis(self):
        config = ExperimentConfig(
            name="g",
            kind=ExperimentKind.EVOLVE,
            grid=GridSpec(dim=2, extent=[64.0, 16.0], points=64),
            initial=PacketData(k=1.0, width=2.0),
        )
        assert any("10*width <= 16" in e for e in validate_config(config))

    def test_sweep_deltas_span_two_decades(self):
        config = ExperimentConfig(
            name="s",
            kind=ExperimentKind.DELTA_SWEEP,
            A=2.0,
            sweep=SweepParams(deltas=[4e-3, 3e-3], target=0.05),
        )
        assert validate_config(config) == ["'sweep.deltas' must span at least two decades"]

    def test_sweep_target_stays_weakly_nonlinear(self):
        config = ExperimentConfig(
            name="s",
            kind=ExperimentKind.DELTA_SWEEP,
            A=2.0,
            sweep=SweepParams(deltas=[1e-2, 1e-4], target=0.5),
        )
        assert validate_config(config) == ["'sweep.target' must be at most 0.1*A = 0.2"]

    def test_sweep_control_target_is_not_bounded(self):
        config = ExperimentConfig(
            name="s",
            kind=ExperimentKind.DELTA_SWEEP,
            A=0.5,
            initial=PacketData(k=1.0, width=5.0),
            sweep=SweepParams(deltas=[1e-2, 1e-4], target=0.5),
        )
        assert validate_config(config) == []

    def test_random_field_band(self):
        config = ExperimentConfig(
            name="e", kind=ExperimentKind.EVOLVE, initial=RandomData(max_mode=100)
        )
        assert any("N/3" in e for e in validate_config(config))

    def test_norms_suite_needs_aligned_cubes(self):
        config = ExperimentConfig(
            name="n", kind=ExperimentKind.NORMS_SUITE, grid=GridSpec(extent=30.5, points=512)
        )
        assert any("integer" in e for e in validate_config(config))


class TestLoading:
    def test_single_experiment(self, tmp_path):
        path = tmp_path / "one.yaml"
        path.write_text("name: one\nkind: evolve\nA: 0.25\ngrid:\n  extent: 16.0\n  points: 64\n")
        config = load_config(path)
        assert config.name == "one"
        assert config.A == 0.25

    def test_experiment_list(self, tmp_path):
        path = tmp_path / "many.yaml"
        path.write_text(
            "experiments:\n  - name: a\n    kind: evolve\n  - name: b\n    kind: picard\n"
        )
        assert [c.name for c in load_configs(path)] == ["a", "b"]
        with pytest.raises(ConfigValidationError, match="expected one experiment"):
            load_config(path)

    def test_schema_errors_name_the_field(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("name: bad\nkind: evolve\ngrid:\n  points: many\n")
        with pytest.raises(ConfigValidationError) as excinfo:
            load_configs(path)
        assert any("bad.yaml: grid.points" in e for e in excinfo.value.errors)

    def test_broken_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("name: [unclosed\n")
        with pytest.raises(ConfigValidationError, match="not valid YAML"):
            load_configs(path)

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda p: p.name)
    def test_shipped_configs_are_valid(self, path):
        for config in load_configs(path):
            assert validate_config(config) == [], config.name


class TestStabilityLab:
    def test_run(self, tiny_evolve_config, tmp_path):
        checks = []
        lab = StabilityLab(tmp_path, on_check=checks.append)
        report = lab.run(tiny_evolve_config)
        assert report.passed
        assert len(checks) == len(report.checks)
        assert (tmp_path / "tiny-evolve" / "report.json").exists()

    def test_run_rejects_invalid_config(self, tmp_path):
        config = ExperimentConfig(name="g", kind=ExperimentKind.GROWTH, A=0.5)
        with pytest.raises(ConfigValidationError) as excinfo:
            StabilityLab(tmp_path).run(config)
        assert excinfo.value.errors[0].startswith("g: ")
        assert not (tmp_path / "g").exists()

    def test_delta_sweep_builds_the_experiment(self, tmp_path):
        base = ExperimentConfig(
            name="sweep",
            kind=ExperimentKind.EVOLVE,
            grid=GridSpec(extent=2.0 * 3.141592653589793 * 8, points=128),
            initial=PacketData(k=1.0, width=5.0),
            solver=SolverConfig(horizon=2.0, save_every=500),
        )
        report = StabilityLab(tmp_path).delta_sweep(0.5, [1e-2, 1e-3, 1e-4], 0.05, base)
        assert report.kind == "delta_sweep"
        assert report.config["A"] == 0.5
        assert report.config["sweep"]["deltas"] == [1e-2, 1e-3, 1e-4]
        assert (tmp_path / "sweep" / "series_delta_1.csv").exists()


class TestRunSuite:
    @pytest.fixture
    def configs(self, tiny_evolve_config):
        return [
            tiny_evolve_config,
            tiny_evolve_config.model_copy(update={"name": "tiny-evolve-2", "A": 0.5}),
        ]

    async def test_sequential_suite(self, configs, tmp_path):
        reports = await StabilityLab(tmp_path).run_suite(configs, max_workers=1)
        assert [r.name for r in reports] == ["tiny-evolve", "tiny-evolve-2"]
        assert all(r.passed for r in reports)

    async def test_process_pool_matches_sequential(self, configs, tmp_path):
        sequential = await StabilityLab(tmp_path / "seq").run_suite(configs, max_workers=1)
        pooled = await StabilityLab(tmp_path / "pool").run_suite(configs, max_workers=2)
        assert [r.measured for r in pooled] == [r.measured for r in sequential]
        for name in ("tiny-evolve", "tiny-evolve-2"):
            assert (tmp_path / "seq" / name / "series.csv").read_bytes() == (
                tmp_path / "pool" / name / "series.csv"
            ).read_bytes()

    async def test_suite_validates_everything_first(self, tiny_evolve_config, tmp_path):
        bad = ExperimentConfig(name="g", kind=ExperimentKind.GROWTH, A=0.5)
        with pytest.raises(ConfigValidationError) as excinfo:
            await StabilityLab(tmp_path).run_suite([tiny_evolve_config, tiny_evolve_config, bad])
        assert "duplicate experiment name 'tiny-evolve'" in excinfo.value.errors
        assert any(e.startswith("g: ") for e in excinfo.value.errors)
        assert not (tmp_path / "tiny-evolve").exists()

    async def test_verify_rejects_unknown_presets(self, tmp_path):
        with pytest.raises(ConfigValidationError, match="unknown preset"):
            await StabilityLab(tmp_path).verify(["nope"])
