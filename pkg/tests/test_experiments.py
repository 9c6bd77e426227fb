"""Tests for experiment runners, called directly with an ExperimentContext."""

import math

import numpy as np
import pytest

from chemotaxis_lab.models.config import (
    CombData,
    ConsistencyParams,
    ExperimentConfig,
    ExperimentKind,
    Formulation,
    GaussianData,
    GridSpec,
    NormSpec,
    PacketData,
    RandomData,
    SolverConfig,
    SuiteParams,
    SweepParams,
)
from chemotaxis_lab.models.presets import get_preset
from chemotaxis_lab.operations.experiments import EXPERIMENT_RUNNERS, ExperimentContext, plain
from chemotaxis_lab.operations.experiments.nonlinear import admissible_pair
from chemotaxis_lab.operations.initial_data import grid_for


def run(config):
    outcome = EXPERIMENT_RUNNERS[config.kind](ExperimentContext(config, grid_for(config)))
    return outcome, {check.name: check for check in outcome.checks}


def failed(outcome):
    return [check for check in outcome.checks if not check.passed]


def test_every_kind_has_a_runner():
    assert set(EXPERIMENT_RUNNERS) == set(ExperimentKind)


def test_plain_converts_numpy_values():
    value = plain({"a": np.float64(1.5), "b": np.arange(3), "c": (np.int64(2),)})
    assert value == {"a": 1.5, "b": [0, 1, 2], "c": [2]}
    assert type(value["a"]) is float


def test_dispersion():
    outcome, checks = run(get_preset("abscissa"))
    assert failed(outcome) == []
    assert outcome.measured["abscissa[A=2]"] == pytest.approx((math.sqrt(2.0) - 1.0) ** 2)
    assert outcome.measured["peak_wavenumber[A=4]"] == pytest.approx(1.0, abs=1e-5)
    assert "lattice_rate_bracket" in checks


def test_operator_suite_exact_checks():
    config = get_preset("operator-suite").model_copy(
        update={"suite": SuiteParams(random_fields=10, composition_samples=5)}
    )
    outcome, checks = run(config)
    for name in (
        "single_mode",
        "semigroup_composition",
        "threshold_nonexpansive",
        "neg_laplace_kernel_bound",
        "neg_laplace_kernel_top_mode",
        "negative_A_heat_domination",
        "growth_upper_bound",
        "gradient_commutation",
        "heat_kernel_mass",
        "grad_kernel_l1",
        "mu_l1_finite",
        "near_eigenmode_bounded",
    ):
        assert checks[name].passed, name
    assert outcome.measured["mu_l1[A=0]"] == pytest.approx(np.ones(7), abs=1e-12)


def test_decay():
    outcome, checks = run(get_preset("decay-1d"))
    assert failed(outcome) == []
    assert outcome.reference["exponent"] == pytest.approx(-0.5)
    assert outcome.measured["heat_exponent"] == pytest.approx(-0.5, abs=0.02)
    assert outcome.series[0].filename == "series.csv"


def test_picard():
    outcome, checks = run(get_preset("picard"))
    assert failed(outcome) == []
    assert checks["contraction_ratio"].measured <= 0.5


def test_positivity():
    config = ExperimentConfig(
        name="positivity-small",
        kind=ExperimentKind.POSITIVITY,
        grid=GridSpec(extent=32.0, points=128),
        initial=GaussianData(width=1.0, amplitude=1.0),
        solver=SolverConfig(horizon=1.0, formulation=Formulation.RAW),
    )
    outcome, checks = run(config)
    assert checks["positivity"].passed
    assert checks["mass_conserved"].passed
    assert outcome.measured["violations"] == 0


def test_consistency():
    config = ExperimentConfig(
        name="consistency-small",
        kind=ExperimentKind.CONSISTENCY,
        grid=GridSpec(extent=32.0, points=64),
        initial=RandomData(amplitude=0.01, max_mode=4),
        solver=SolverConfig(horizon=1.0),
        consistency=ConsistencyParams(A_values=[0.5, 2.0]),
        seed=11,
    )
    outcome, checks = run(config)
    assert failed(outcome) == []
    assert {"formulations_agree[A=0.5]", "formulations_agree[A=2]", "linear_limit"} <= set(checks)


def test_evolve_records_uloc():
    config = ExperimentConfig(
        name="comb-small",
        kind=ExperimentKind.EVOLVE,
        grid=GridSpec(extent=16.0, points=128),
        initial=CombData(period=1.0, width=0.15),
        solver=SolverConfig(horizon=0.25, formulation=Formulation.RAW, save_every=50),
        norm=NormSpec(p=2.0),
    )
    outcome, checks = run(config)
    assert failed(outcome) == []
    assert "uloc_2" in outcome.series[0].header
    assert outcome.measured["uloc_max"] >= outcome.measured["uloc_initial"] > 0.0


def test_stability_with_unstable_control():
    config = ExperimentConfig(
        name="stability-small",
        kind=ExperimentKind.STABILITY,
        A=0.5,
        grid=GridSpec(extent=100.0, points=128),
        initial=GaussianData(width=2.0, amplitude=0.01),
        solver=SolverConfig(horizon=50.0, save_every=200),
    )
    outcome, checks = run(config)
    assert checks["global_existence"].passed
    assert checks["weighted_norms_finite"].passed
    assert checks["control_grows"].passed
    assert outcome.measured["admissible_pairs"] == ["X[1,2]"]
    assert [s.filename for s in outcome.series] == ["series.csv", "series_control.csv"]


@pytest.mark.parametrize(("p", "q", "dim", "expected"), [
    (1.0, 2.0, 1, True),
    (1.0, 1.5, 1, True),
    (1.0, 3.0, 1, False),
    (2.0, math.inf, 1, False),
    (2.0, 4.0, 2, True),
    (1.0, 2.0, 2, False),
])
def test_admissible_pairs(p, q, dim, expected):
    assert admissible_pair(p, q, dim) is expected


class TestDeltaSweep:
    def test_unstable_sweep_measures_the_abscissa(self):
        config = ExperimentConfig(
            name="sweep-small",
            kind=ExperimentKind.DELTA_SWEEP,
            A=4.0,
            grid=GridSpec(points=128, resonant_modes=8),
            initial=PacketData(width=5.0),
            solver=SolverConfig(horizon=30.0, save_every=500),
            sweep=SweepParams(deltas=[1e-3, 1e-4, 1e-5], target=1e-2),
        )
        outcome, checks = run(config)
        assert checks["all_deltas_reach_target"].passed
        assert checks["sweep_rate"].passed
        times = [outcome.measured["t_delta"][key] for key in ("0.001", "0.0001", "1e-05")]
        assert times == sorted(times)
        assert [s.filename for s in outcome.series] == [
            "series.csv",
            "series_delta_1.csv",
            "series_delta_2.csv",
        ]

    def test_stable_control_never_reaches_the_target(self):
        config = ExperimentConfig(
            name="sweep-control",
            kind=ExperimentKind.DELTA_SWEEP,
            A=0.5,
            grid=GridSpec(extent=2.0 * math.pi * 8, points=128),
            initial=PacketData(k=1.0, width=5.0),
            solver=SolverConfig(horizon=5.0, save_every=500),
            sweep=SweepParams(deltas=[1e-2, 1e-3, 1e-4], target=0.05),
        )
        outcome, checks = run(config)
        assert failed(outcome) == []
        assert outcome.measured["t_delta"] == {}


def test_norms_suite():
    config = ExperimentConfig(
        name="norms-small",
        kind=ExperimentKind.NORMS_SUITE,
        grid=GridSpec(extent=32.0, points=512),
        suite=SuiteParams(random_fields=8, sandwich_fields=9),
        seed=3,
    )
    outcome, checks = run(config)
    assert failed(outcome) == []
    assert outcome.measured["young_empirical_constant"] < 3.0
