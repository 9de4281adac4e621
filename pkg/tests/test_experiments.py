"""
Tests for seeded density experiments.
"""

from fractions import Fraction
from unittest.mock import patch

import pytest

from degree0.experiments import (
    COLUMNS,
    COUNT_FIELDS,
    ExperimentSpec,
    ExperimentSummary,
    derive_seed,
    run_experiment,
    tally_key,
)


@pytest.fixture
def torus_spec():
    return ExperimentSpec(family="torus", count=6, seed=11, height=3, radicands=(-1, 2))


class TestSeeds:
    """Test per-sample seed derivation."""

    def test_stable(self):
        assert derive_seed(42, 0) == derive_seed(42, 0)

    def test_distinct(self):
        seeds = {derive_seed(42, i) for i in range(100)}
        assert len(seeds) == 100
        assert derive_seed(1, 2) != derive_seed(12, 0)

    def test_fits_in_64_bits(self):
        assert 0 <= derive_seed(0, 0) < 2 ** 64


class TestExperimentSpec:
    """Test experiment parameter validation."""

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            ExperimentSpec(family="enriques", count=1)

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            ExperimentSpec(family="torus", count=0)

    def test_radicands_become_tuple(self):
        assert ExperimentSpec(family="k3", count=1, radicands=[2, 3]).radicands == (2, 3)


class TestTally:
    """Test how rows are bucketed."""

    def test_buckets(self):
        assert tally_key({"verdict": "Degree2"}) == "degree2"
        assert tally_key({"verdict": "Degree0Certified"}) == "degree0_certified"
        assert tally_key({"verdict": "Inconclusive01"}) == "inconclusive"
        assert tally_key({"verdict": "Degree1"}) == "degree1"
        assert tally_key({"verdict": "HasLineBundles"}) == "has_line_bundles"

    def test_hopf_degree0_needs_complete_decision(self):
        assert tally_key({"verdict": "Degree0", "complete": True}) == "degree0_certified"
        assert tally_key({"verdict": "Degree0", "complete": False}) == "inconclusive"


class TestSummary:
    """Test experiment summaries."""

    def test_counts_must_sum(self):
        with pytest.raises(ValueError):
            ExperimentSummary(family="torus", total=3, degree2=1)

    def test_fractions(self):
        summary = ExperimentSummary(family="torus", total=4, degree2=1, degree0_certified=3)
        assert summary.fractions["degree0_certified"] == 0.75
        assert sum(summary.fractions.values()) == pytest.approx(1.0)

    def test_from_rows(self):
        rows = [{"verdict": "Degree2"}, {"verdict": "Degree2"}, {"verdict": "Inconclusive01"}]
        summary = ExperimentSummary.from_rows("torus", rows, runtime_seconds=1.5)
        assert summary.total == 3
        assert summary.degree2 == 2
        assert summary.inconclusive == 1

    def test_runtime_ignored_in_comparison(self):
        a = ExperimentSummary(family="k3", total=1, has_line_bundles=1, runtime_seconds=0.1)
        b = ExperimentSummary(family="k3", total=1, has_line_bundles=1, runtime_seconds=9.0)
        assert a == b

    def test_dict_round_trip(self):
        summary = ExperimentSummary(family="hopf", total=3, degree1=2, degree0_certified=1, runtime_seconds=2.0)
        data = summary.to_dict(include_runtime=True)
        assert data["runtime_seconds"] == 2.0
        assert "runtime_seconds" not in summary.to_dict()
        assert data["fractions"]["degree1"] == round(2 / 3, 6)
        assert ExperimentSummary.from_dict(data) == summary


class TestRunExperiment:
    """Test whole experiment runs."""

    def test_rows_in_index_order(self, torus_spec):
        rows, summary = run_experiment(torus_spec)
        assert [row["index"] for row in rows] == list(range(6))
        assert all(set(row) == set(COLUMNS["torus"]) for row in rows)
        assert summary.total == 6

    def test_reproducible(self, torus_spec):
        assert run_experiment(torus_spec) == run_experiment(torus_spec)

    def test_workers_do_not_change_output(self, torus_spec):
        serial = run_experiment(torus_spec)
        torus_spec.workers = 4
        assert run_experiment(torus_spec) == serial

    def test_summary_matches_rows(self, torus_spec):
        rows, summary = run_experiment(torus_spec)
        assert summary == ExperimentSummary.from_rows("torus", rows)
        assert sum(getattr(summary, name) for name in COUNT_FIELDS) == summary.total

    def test_single_sample(self):
        rows, summary = run_experiment(ExperimentSpec(family="torus", count=1, height=3, radicands=(-1, 2)))
        assert len(rows) == 1
        assert summary.total == 1

    def test_rational_control_never_certifies(self):
        spec = ExperimentSpec(family="torus", count=10, seed=5, height=7, radicands=(-1,))
        _, summary = run_experiment(spec)
        assert summary.degree0_certified == 0
        assert summary.fractions["degree0_certified"] == 0.0

    def test_hopf_rows_agree_with_exact_powers(self):
        rows, summary = run_experiment(ExperimentSpec(family="hopf", count=40, seed=3, height=9))
        for row in rows:
            alpha, delta = Fraction(row["alpha"]), Fraction(row["delta"])
            if row["class"] == "M1":
                assert alpha == delta
                assert row["verdict"] == "Degree1"
                continue
            assert row["complete"] is True
            if row["verdict"] == "Degree1":
                assert alpha ** row["dependence_m"] == delta ** row["dependence_n"]
            else:
                assert row["dependence_m"] is None
        assert summary.inconclusive == 0
        assert summary.degree0_certified + summary.degree1 == 40

    def test_k3_rows(self):
        rows, summary = run_experiment(ExperimentSpec(family="k3", count=5, seed=1, height=3, radicands=(2, 3)))
        assert all(row["on_quadric"] for row in rows)
        assert summary.degree0_certified + summary.has_line_bundles == 5

    def test_progress_bar_toggle(self, torus_spec):
        with patch("degree0.experiments.tqdm", side_effect=lambda it, **kwargs: it) as bar:
            run_experiment(torus_spec, progress=True)
        assert bar.call_args.kwargs["disable"] is False
        with patch("degree0.experiments.tqdm", side_effect=lambda it, **kwargs: it) as bar:
            run_experiment(torus_spec)
        assert bar.call_args.kwargs["disable"] is True


@pytest.mark.slow
class TestDensity:
    """Generic samples carry no relations; golden fractions are fixed by the seed."""

    def test_torus_golden_fraction(self):
        spec = ExperimentSpec(family="torus", count=1000, seed=42, height=7, radicands=(-1, 2, 3, 5, 7))
        _, summary = run_experiment(spec)
        assert summary.total == 1000
        assert summary.fractions["degree0_certified"] >= 0.95
        assert summary.fractions["degree0_certified"] == 1.0

    def test_rational_control_golden_fraction(self):
        spec = ExperimentSpec(family="torus", count=1000, seed=42, height=7, radicands=(-1,))
        _, summary = run_experiment(spec)
        assert summary.total == 1000
        assert summary.degree0_certified == 0
        assert summary.fractions["degree0_certified"] == 0.0

    def test_k3_golden_fraction(self):
        spec = ExperimentSpec(family="k3", count=1000, seed=42, height=7, radicands=(2, 3), form="U+U")
        _, summary = run_experiment(spec)
        assert summary.total == 1000
        assert summary.fractions["degree0_certified"] >= 0.95
        assert summary.fractions["degree0_certified"] == 1.0

    def test_golden_runs_repeat_exactly(self):
        spec = ExperimentSpec(family="torus", count=50, seed=42, height=7, radicands=(-1, 2, 3, 5, 7))
        first_rows, first = run_experiment(spec)
        spec.workers = 3
        second_rows, second = run_experiment(spec)
        assert first_rows == second_rows
        assert first.to_dict() == second.to_dict()
