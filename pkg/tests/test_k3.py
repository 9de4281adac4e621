"""
Tests for K3 period points and their line-bundle kernels.
"""

import random
from fractions import Fraction
from unittest.mock import patch

import pytest

from degree0.exactfield import FieldContext, FieldElement, as_element
from degree0.exactlinalg import DimensionMismatch, Inertia, NotSymmetric
from degree0.k3 import (
    K3_SIGNATURE,
    UNDECIDED_NOTE,
    CannotSolveAtHeight,
    IntersectionForm,
    K3Error,
    K3Invariants,
    K3Report,
    K3Verdict,
    NotOnQuadric,
    PeriodPoint,
    WrongSignature,
    check_form,
    classify,
    classify_by_betti,
    irregularity,
    on_quadric,
    picard_kernel,
    sample_quadric,
)
from degree0.torus import random_element


@pytest.fixture
def uu():
    return IntersectionForm.preset("U+U")


@pytest.fixture
def certified_point():
    ctx = FieldContext.of(2, 3)
    return PeriodPoint.from_values(
        [1, FieldElement.sqrt(ctx, 2), FieldElement.sqrt(ctx, 3), FieldElement.sqrt(ctx, 2, 3) * Fraction(-1, 3)],
        ctx,
    )


@pytest.fixture
def bundles_point():
    ctx = FieldContext.of(2)
    s2 = FieldElement.sqrt(ctx, 2)
    return PeriodPoint.from_values([1, s2, s2, -1], ctx)


class TestIntersectionForm:
    """Test lattice presets and their signatures."""

    def test_hyperbolic_plane(self):
        U = IntersectionForm.preset("U")
        assert U.matrix == ((0, 1), (1, 0))
        assert check_form(U).inertia == Inertia(1, 1, 0)

    def test_e8(self):
        E8 = IntersectionForm.preset("E8")
        assert E8.dim == 8
        assert all(E8.matrix[i][i] == 2 for i in range(8))
        assert check_form(E8).inertia == Inertia(8, 0, 0)
        assert check_form(IntersectionForm.preset("E8(-1)")).inertia == Inertia(0, 8, 0)

    def test_k3_lattice(self):
        A = IntersectionForm.preset("k3")
        report = check_form(A, expect_k3=True)
        assert report.dim == 22
        assert report.inertia == K3_SIGNATURE
        assert report.is_k3
        assert report.to_dict() == {"dim": 22, "signature": [3, 19, 0], "is_k3": True}

    def test_sums_and_powers(self):
        A = IntersectionForm.preset("U^2+E8(-1)")
        assert A.dim == 12
        assert A.matrix == IntersectionForm.preset("U+U+E8(-1)").matrix
        assert IntersectionForm.preset("preset:U+U").matrix == IntersectionForm.preset("U^2").matrix

    def test_unknown_preset(self):
        with pytest.raises(K3Error):
            IntersectionForm.preset("D4")

    def test_wrong_signature(self, uu):
        assert not check_form(uu).is_k3
        with pytest.raises(WrongSignature):
            check_form(uu, expect_k3=True)

    def test_wrong_signature_is_a_value_error(self, uu):
        with pytest.raises(ValueError):
            check_form(uu, expect_k3=True)

    def test_rejects_bad_matrices(self):
        with pytest.raises(NotSymmetric):
            IntersectionForm(((0, 1), (2, 0)))
        with pytest.raises(DimensionMismatch):
            IntersectionForm(((0, 1),))

    def test_json(self, uu):
        assert uu.to_json() == "preset:U+U"
        assert IntersectionForm.from_json("preset:U+U") == uu
        assert IntersectionForm.from_json([[0, 1], [1, 0]]).matrix == ((0, 1), (1, 0))

    def test_hyperbolic_pair(self, uu):
        assert uu.hyperbolic_pair() == (0, 1)
        assert IntersectionForm.preset("E8(-1)").hyperbolic_pair() is None

    def test_pairing(self, uu):
        assert uu.pairing([1, 2, 3, 4], [1, 1, 1, 1]) == 10
        with pytest.raises(DimensionMismatch):
            uu.pairing([1, 2], [1, 2])


class TestPeriodPoint:
    """Test period points and the quadric."""

    def test_toy_points_on_quadric(self, uu, certified_point, bundles_point):
        assert on_quadric(certified_point, uu)
        assert on_quadric(bundles_point, uu)

    def test_off_quadric(self, uu):
        assert not on_quadric(PeriodPoint.from_values([1, 1, 0, 0]), uu)

    def test_zero_point_rejected(self):
        with pytest.raises(K3Error):
            PeriodPoint.from_values([0, 0, 0, 0])

    def test_dimension_mismatch(self, uu):
        with pytest.raises(DimensionMismatch):
            on_quadric(PeriodPoint.from_values([1, 0]), uu)

    def test_json_round_trip(self, certified_point):
        data = certified_point.to_json()
        assert data["radicands"] == [2, 3]
        assert PeriodPoint.from_json(data) == certified_point


class TestPicardKernel:
    """Test the integer kernel of the period point."""

    def test_trivial_kernel(self, uu, certified_point):
        assert picard_kernel(certified_point, uu).is_trivial()

    def test_rank_two_kernel(self, uu, bundles_point):
        kernel = picard_kernel(bundles_point, uu)
        assert kernel.rank == 2
        assert kernel.basis == ((1, 0, 0, -1), (0, 1, 1, 0))

    def test_rational_point_has_full_rank_minus_one(self, uu):
        kernel = picard_kernel(PeriodPoint.from_values([1, 0, 0, 0]), uu)
        assert kernel.rank == 3


class TestClassify:
    """Test verdicts on the toy period points."""

    def test_certified(self, uu, certified_point):
        report = classify(certified_point, uu)
        assert report.verdict == K3Verdict.DEGREE0_CERTIFIED
        assert report.witness is None
        assert report.note is None
        assert report.form_dim == 4

    def test_has_line_bundles(self, uu, bundles_point):
        report = classify(bundles_point, uu)
        assert report.verdict == K3Verdict.HAS_LINE_BUNDLES
        assert report.witness.m == (0, 1, 1, 0)
        assert report.note == UNDECIDED_NOTE

    def test_not_on_quadric(self, uu):
        with pytest.raises(NotOnQuadric):
            classify(PeriodPoint.from_values([1, 1, 0, 0]), uu)

    def test_report_dict(self, uu, bundles_point):
        data = classify(bundles_point, uu).to_dict()
        assert data["family"] == "k3"
        assert data["kernel_rank"] == 2
        assert data["witness"] == [0, 1, 1, 0]
        assert data["verdict"] == "HasLineBundles"
        assert data["invariants"]["b2"] == 22

    def test_report_round_trip(self, uu, certified_point, bundles_point):
        for lam in (certified_point, bundles_point):
            report = classify(lam, uu)
            assert K3Report.from_dict(report.to_dict()) == report


class TestInvariants:
    """Test the numerical invariants."""

    def test_defaults(self):
        inv = K3Invariants()
        assert inv.b2 == 2 * inv.h20 + inv.h11
        assert inv.q == 0

    def test_inconsistent(self):
        with pytest.raises(K3Error):
            K3Invariants(b2=21)
        with pytest.raises(K3Error):
            K3Invariants(b1=2)

    def test_irregularity(self):
        assert irregularity(4) == 2
        assert irregularity(1) == 0
        assert irregularity(0) == 0

    def test_betti_dichotomy(self):
        assert classify_by_betti(4) == "torus"
        assert classify_by_betti(1) == "hopf"
        assert classify_by_betti(0) == "k3"
        assert classify_by_betti(2) is None


class TestSampling:
    """Test the quadric sampler."""

    def test_samples_on_quadric(self, uu):
        for seed in range(10):
            lam = sample_quadric(uu, (2, 3), 5, seed)
            assert on_quadric(lam, uu)
            assert lam.context.radicands == (2, 3)

    def test_k3_lattice_samples(self):
        A = IntersectionForm.preset("k3")
        assert on_quadric(sample_quadric(A, (2,), 3, seed=0), A)

    def test_deterministic(self, uu):
        assert sample_quadric(uu, (2,), 4, seed=7) == sample_quadric(uu, (2,), 4, seed=7)

    def test_no_hyperbolic_pair(self):
        with pytest.raises(CannotSolveAtHeight):
            sample_quadric(IntersectionForm.preset("E8(-1)"), (2,), 3, seed=0)

    def test_bad_height(self, uu):
        with pytest.raises(ValueError):
            sample_quadric(uu, (2,), 0, seed=0)

    def test_exhausted_retries(self, uu):
        zero = FieldElement.zero(FieldContext.of(2))
        with patch("degree0.k3.random_element", return_value=zero):
            with pytest.raises(CannotSolveAtHeight):
                sample_quadric(uu, (2,), 3, seed=0, retries=3)


class TestKernelOracle:
    """Enumeration of small classes agrees with the kernel lattice."""

    BOX = 10

    @staticmethod
    def classes(lam, A, relation_search):
        integer_rows, short_relations = relation_search
        row = [as_element(x, lam.context) for x in A.row_pairing(lam.coords)]
        return short_relations(integer_rows(row, lam.context), TestKernelOracle.BOX)

    def test_generic_samples(self, uu, relation_search):
        for seed in range(100):
            lam = sample_quadric(uu, (2, 3), 3, seed)
            kernel = picard_kernel(lam, uu)
            found = self.classes(lam, uu, relation_search)
            for m in found:
                assert m in kernel
            assert kernel.is_trivial() == (found == [])
            for m in kernel.basis:
                if max(abs(x) for x in m) <= self.BOX:
                    assert m in found

    def test_planted_classes_are_found(self, uu, relation_search):
        ctx = FieldContext.of(2, 3)
        for seed in range(100):
            rng = random.Random(seed)
            z = random_element(rng, ctx, 5)
            k = rng.randint(-3, 3)
            # lambda_0 lambda_1 + lambda_2 lambda_3 = -z k + z k = 0, and (0, -k, 1, 0) is orthogonal
            lam = PeriodPoint.from_values([1, z * (-k), z, k], ctx)
            assert on_quadric(lam, uu)
            kernel = picard_kernel(lam, uu)
            found = self.classes(lam, uu, relation_search)
            assert not kernel.is_trivial()
            assert (0, -k, 1, 0) in found
            for m in found:
                assert m in kernel
            assert classify(lam, uu).verdict == K3Verdict.HAS_LINE_BUNDLES

    def test_worked_example(self, bundles_point, uu, relation_search):
        found = self.classes(bundles_point, uu, relation_search)
        assert (1, 0, 0, -1) in found
        assert (0, 1, 1, 0) in found
