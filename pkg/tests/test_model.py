import numpy as np
import pytest
import sympy

from flexlab.corpus import analytic_fold_curve, hinge, subdivided_tetrahedron
from flexlab.errors import (
    FlexlabCurveError,
    FlexlabSizeError,
    FlexlabSurfaceError,
    FlexlabValidationError,
)
from flexlab.model import (
    NO_BASE_SAMPLE,
    ConfigCurve,
    Configuration,
    CurveSample,
    FlexField,
    FlexJet,
    Framework,
    Precision,
    Stress,
    SurfaceGrid,
    ViolationKind,
    edge_length_polynomial,
    evaluate_deformation,
    validate_framework,
)


class TestFramework:
    def test_edges_are_canonical(self) -> None:
        framework = Framework.from_edges(3, [(2, 1), (1, 0)])
        assert framework.edges == ((0, 1), (1, 2))
        assert framework == Framework.from_edges(3, [(0, 1), (2, 1)])

    def test_non_canonical_edges_rejected(self) -> None:
        with pytest.raises(FlexlabValidationError):
            Framework(3, ((1, 0),))

    def test_violations(self) -> None:
        framework = Framework.from_edges(3, [(0, 0), (0, 5), (0, 1), (1, 0)])
        kinds = {violation.kind for violation in validate_framework(framework)}
        assert kinds == {
            ViolationKind.self_loop,
            ViolationKind.bad_index,
            ViolationKind.duplicate_edge,
        }

    def test_edge_index(self) -> None:
        framework = hinge().framework
        assert framework.edges[framework.edge_index((3, 1))] == (1, 3)
        with pytest.raises(FlexlabValidationError):
            framework.edge_index((2, 3))


class TestConfiguration:
    def test_coincident_endpoints(self) -> None:
        framework = Framework.from_edges(2, [(0, 1)])
        with pytest.raises(FlexlabValidationError) as info:
            Configuration.create(framework, [(0, 0, 0), (0, 0, 0)])
        assert info.value.violations

    def test_invalid_framework(self) -> None:
        with pytest.raises(FlexlabValidationError):
            Configuration.create(Framework.from_edges(2, [(0, 2)]), [(0, 0, 0), (1, 0, 0)])

    def test_shape_mismatch(self) -> None:
        with pytest.raises(FlexlabSizeError):
            Configuration.create(Framework.from_edges(2, [(0, 1)]), [(0, 0, 0)])

    def test_non_finite(self) -> None:
        with pytest.raises(FlexlabValidationError):
            Configuration.create(Framework.from_edges(2, [(0, 1)]), [(0, 0, 0), (np.nan, 0, 0)])

    def test_positions_are_read_only(self) -> None:
        c = hinge()
        with pytest.raises(ValueError):
            c.positions[0, 0] = 1.0

    def test_input_is_copied(self) -> None:
        positions = np.array([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)])
        c = Configuration.create(Framework.from_edges(2, [(0, 1)]), positions)
        positions[1, 0] = 5.0
        assert c.positions[1, 0] == 1.0

    def test_edge_geometry(self) -> None:
        c = subdivided_tetrahedron()
        assert c.diameter == pytest.approx(np.sqrt(18))
        index = c.framework.edge_index((0, 1))
        np.testing.assert_array_equal(c.edge_vectors()[index], [-3, 0, 0])
        assert c.edge_lengths()[index] == 3


class TestFields:
    def test_jet_is_one_based(self) -> None:
        first, second = FlexField.zeros(4), FlexField.create(np.ones((4, 3)))
        jet = FlexJet((first, second))
        assert jet[1] is first
        assert jet[2] is second
        with pytest.raises(IndexError):
            jet[0]

    def test_jet_vertex_counts_must_agree(self) -> None:
        with pytest.raises(FlexlabSizeError):
            FlexJet((FlexField.zeros(3), FlexField.zeros(4)))

    def test_size_check(self) -> None:
        with pytest.raises(FlexlabSizeError):
            FlexField.zeros(3).check_size(hinge().framework)

    def test_arithmetic(self) -> None:
        a = FlexField.create(np.arange(12.0).reshape(4, 3))
        np.testing.assert_array_equal((2 * a - a).vectors, a.vectors)
        np.testing.assert_array_equal((-a + a).vectors, np.zeros((4, 3)))
        assert FlexField.from_stacked(a.stacked()).same_as(a)

    def test_stress_size(self) -> None:
        with pytest.raises(FlexlabSizeError):
            Stress.create(hinge().framework, [1.0, 2.0])


class TestDeformation:
    jet = FlexJet.from_fields(
        np.array([(0, 0, 0), (0, 0, 0), (0, 0, 0), (0, -1, 0)], dtype=float),
        np.array([(0.1, 0.2, 0), (0, 0, 0), (0, 0, 0.3), (0, 0, -0.5)], dtype=float),
    )

    def test_zero_parameter_is_identity(self) -> None:
        c = hinge()
        assert evaluate_deformation(c, self.jet, 0.0) is c

    @pytest.mark.parametrize("t", [0.3, -0.7, 1.5])
    def test_polynomial_matches_direct_expansion(self, t: float) -> None:
        c = hinge()
        moved = evaluate_deformation(c, self.jet, t)
        for edge in c.framework.edges:
            index = c.framework.edge_index(edge)
            coefficients = edge_length_polynomial(c, self.jet, edge)
            assert coefficients.shape == (5,)
            assert coefficients[0] == 0
            change = moved.edge_lengths()[index] ** 2 - c.edge_lengths()[index] ** 2
            assert np.polynomial.polynomial.polyval(t, coefficients) == pytest.approx(change)

    def test_exact_coefficients_are_rational(self) -> None:
        coefficients = edge_length_polynomial(
            hinge(), self.jet, (0, 3), precision=Precision.exact
        )
        assert coefficients.dtype == object
        assert all(isinstance(value, sympy.Rational) for value in coefficients[1:])
        # d0 = (-1, 0, -2), d1 = (0, 1, 0): coefficient of t is 4 d0 . d1 = 0
        assert coefficients[1] == 0
        # d2 = (1/10, 1/5, 1/2)
        assert coefficients[2] == sympy.Rational(-2, 5)
        assert coefficients[3] == sympy.Rational(8, 5)
        assert coefficients[4] == sympy.Rational(6, 5)


class TestCurve:
    def test_needs_base_sample(self) -> None:
        c = hinge()
        with pytest.raises(FlexlabCurveError) as info:
            ConfigCurve((CurveSample(0.5, c, FlexField.zeros(4)),))
        assert info.value.conditions == [NO_BASE_SAMPLE]
        assert info.value.exit_code == 4

    def test_parameters_increase(self) -> None:
        c = hinge()
        samples = (CurveSample(0.0, c, FlexField.zeros(4)), CurveSample(0.0, c, FlexField.zeros(4)))
        with pytest.raises(FlexlabCurveError):
            ConfigCurve(samples)

    def test_neighbors_and_pairs(self) -> None:
        curve = analytic_fold_curve([-0.02, -0.01, 0.0, 0.01, 0.02, 0.03])
        before, after = curve.neighbors()  # type: ignore[misc]
        assert (before.r, after.r) == (-0.01, 0.01)
        assert [w for w, _, _ in curve.symmetric_pairs()] == [0.01, 0.02]

    def test_one_sided_curve_has_no_neighbors(self) -> None:
        assert analytic_fold_curve([0.0, 0.01, 0.02]).neighbors() is None

    def test_reparametrized(self) -> None:
        curve = analytic_fold_curve([-0.01, 0.0, 0.01])
        slower = curve.reparametrized(2.0)
        np.testing.assert_allclose(slower.r_values, curve.r_values / 2)
        np.testing.assert_allclose(
            slower.base.flex.vectors, 2 * curve.base.flex.vectors
        )
        with pytest.raises(FlexlabCurveError):
            curve.reparametrized(0.0)


class TestGrid:
    def test_too_few_samples(self) -> None:
        with pytest.raises(FlexlabSurfaceError):
            SurfaceGrid.create([0, 1], [0, 1, 2], np.zeros((2, 3, 3)))

    def test_axis_must_increase(self) -> None:
        with pytest.raises(FlexlabSurfaceError):
            SurfaceGrid.create([0, 2, 1], [0, 1, 2], np.zeros((3, 3, 3)))

    def test_jet_shape(self) -> None:
        with pytest.raises(FlexlabSurfaceError):
            SurfaceGrid.create([0, 1, 2], [0, 1, 2], np.zeros((3, 3, 3)), [np.zeros((3, 2, 3))])

    def test_sample_uses_ij_indexing(self) -> None:
        grid = SurfaceGrid.sample(
            [0.0, 1.0, 2.0, 3.0],
            [0.0, 10.0, 20.0],
            lambda u, v: np.stack([u, v, u * v], axis=-1),
        )
        assert grid.shape == (4, 3)
        np.testing.assert_array_equal(grid.positions[3, 2], [3.0, 20.0, 60.0])
