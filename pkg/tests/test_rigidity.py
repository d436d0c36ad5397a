import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from flexlab import corpus
from flexlab.errors import FlexlabSizeError
from flexlab.model import FlexField, Stress
from flexlab.numerics import exact_nullity, exact_rank, numerical_rank, principal_angles
from flexlab.rigidity import (
    RigidityClass,
    anchored_flex,
    assemble_rigidity_operator,
    classify,
    equilibrium_stress_space,
    first_order_flex_space,
    split_flex,
    stress_pairing,
    trivial_motion_basis,
)
from flexlab.surface import interior_partials

# (trivial, nontrivial, stress) dimensions
DIMENSIONS = {
    "tetrahedron": (6, 0, 0),
    "regular-tetrahedron": (6, 0, 0),
    "subdivided-tetrahedron": (6, 1, 1),
    "hinge": (6, 1, 0),
    "segment": (5, 0, 0),
    "single-vertex": (3, 0, 0),
}


@pytest.fixture(params=sorted(DIMENSIONS), ids=sorted(DIMENSIONS))
def named(request: pytest.FixtureRequest) -> str:
    return request.param


def test_operator_rows() -> None:
    operator = assemble_rigidity_operator(corpus.hinge())
    assert operator.shape == (5, 12)
    row = operator.matrix[operator.configuration.framework.edge_index((1, 3))]
    np.testing.assert_array_equal(row[3:6], [1, 0, -2])
    np.testing.assert_array_equal(row[9:12], [-1, 0, 2])
    assert np.count_nonzero(row) == 4


def test_operator_is_read_only() -> None:
    with pytest.raises(ValueError):
        assemble_rigidity_operator(corpus.tetrahedron()).matrix[0, 0] = 1.0


def test_dimensions(named: str) -> None:
    _, configuration = corpus.builtin(f"builtin:{named}")
    trivial, nontrivial, stresses = DIMENSIONS[named]

    space = first_order_flex_space(configuration)
    assert space.trivial_dim == trivial
    assert space.nontrivial_dim == nontrivial
    assert space.total_flex_dim == trivial + nontrivial
    assert len(equilibrium_stress_space(configuration)) == stresses
    expected = RigidityClass.first_order_nonrigid if nontrivial else RigidityClass.first_order_rigid
    assert classify(configuration) is expected
    assert not space.warnings


def test_trivial_motions_are_flexes(named: str) -> None:
    _, configuration = corpus.builtin(f"builtin:{named}")
    operator = assemble_rigidity_operator(configuration)
    for motion in trivial_motion_basis(configuration).fields:
        assert motion.norm() == pytest.approx(1.0)
        np.testing.assert_allclose(operator.apply(motion), 0, atol=1e-12)


def test_nontrivial_basis_is_orthogonal_to_trivial(named: str) -> None:
    _, configuration = corpus.builtin(f"builtin:{named}")
    space = first_order_flex_space(configuration)
    t = trivial_motion_basis(configuration).matrix(configuration.vertex_count)
    operator = assemble_rigidity_operator(configuration)
    for field in space.nontrivial_basis:
        np.testing.assert_allclose(t.T @ field.stacked(), 0, atol=1e-12)
        np.testing.assert_allclose(operator.apply(field), 0, atol=1e-12)


def corpus_matrices(name: str) -> list[np.ndarray]:
    """Every matrix whose rank a command reports for the builtin ``name``."""

    kind, item = corpus.builtin(f"builtin:{name}")
    if kind == "framework":
        return [assemble_rigidity_operator(item).matrix]
    if kind == "curve":
        return [assemble_rigidity_operator(s.configuration).matrix for s in item.samples]
    # surface tangent planes: the Jacobian [x_u x_v] at a spread of interior nodes
    du, dv = interior_partials(item, item.positions)
    jacobians = np.stack([du, dv], axis=-1)[::6, ::6]
    return list(jacobians.reshape(-1, 3, 2))


@pytest.mark.parametrize("name", corpus.builtin_names())
def test_exact_ranks_agree_on_the_corpus(name: str) -> None:
    for matrix in corpus_matrices(name):
        assert numerical_rank(matrix).rank == exact_rank(matrix)


@pytest.mark.parametrize("builder", [corpus.subdivided_tetrahedron, corpus.regular_tetrahedron])
def test_exact_oracle_agrees(builder) -> None:
    configuration = builder()
    matrix = assemble_rigidity_operator(configuration).matrix
    assert exact_nullity(matrix) == first_order_flex_space(configuration).total_flex_dim


def test_transpose_gives_negated_vertex_forces() -> None:
    configuration = corpus.hinge()
    operator = assemble_rigidity_operator(configuration)
    stress = Stress.create(configuration.framework, np.arange(1.0, 6.0))
    np.testing.assert_allclose(
        operator.apply_transpose(stress).vectors, -stress.vertex_forces(configuration), atol=1e-12
    )


def test_transpose_rejects_foreign_stresses() -> None:
    operator = assemble_rigidity_operator(corpus.hinge())
    stress = Stress.create(corpus.tetrahedron().framework, np.ones(6))
    with pytest.raises(FlexlabSizeError):
        operator.apply_transpose(stress)


class TestSubdivided:
    configuration = corpus.subdivided_tetrahedron()

    def test_interior_vertex_moves_perpendicular(self) -> None:
        (field,) = first_order_flex_space(self.configuration).nontrivial_basis
        anchored = anchored_flex(self.configuration, field, [0, 1, 2])
        np.testing.assert_allclose(anchored.vectors[:4], 0, atol=1e-12)
        assert anchored.vectors[4, :2] == pytest.approx([0, 0], abs=1e-12)
        assert abs(anchored.vectors[4, 2]) > 0.1

    def test_stress_lives_on_the_flat_face(self) -> None:
        (stress,) = equilibrium_stress_space(self.configuration)
        assert stress.support() == [(0, 1), (0, 2), (0, 4), (1, 2), (1, 4), (2, 4)]
        assert np.linalg.norm(stress.weights) == pytest.approx(1.0)
        np.testing.assert_allclose(stress.vertex_forces(self.configuration), 0, atol=1e-12)

    def test_stress_pairs_to_zero_with_flexes(self) -> None:
        (stress,) = equilibrium_stress_space(self.configuration)
        space = first_order_flex_space(self.configuration)
        for column in space.flex_basis.T:
            field = FlexField.from_stacked(column)
            assert stress_pairing(stress, self.configuration, field) == pytest.approx(0, abs=1e-12)

    def test_lifted_interior_vertex_is_rigid(self) -> None:
        lifted = corpus.subdivided_tetrahedron(interior=(1.0, 1.0, 0.5))
        assert classify(lifted) is RigidityClass.first_order_rigid
        assert equilibrium_stress_space(lifted) == ()

    def test_anchors_required(self) -> None:
        (field,) = first_order_flex_space(self.configuration).nontrivial_basis
        with pytest.raises(FlexlabSizeError):
            anchored_flex(self.configuration, field, [])


def test_hinge_flex_is_the_fold() -> None:
    configuration = corpus.hinge()
    (field,) = first_order_flex_space(configuration).nontrivial_basis
    anchored = anchored_flex(configuration, field, [0, 1, 2])
    fold = FlexField.create(corpus.fold_velocity(0.0))
    cosine = anchored.stacked() @ fold.stacked() / (anchored.norm() * fold.norm())
    assert abs(cosine) == pytest.approx(1.0)


def test_split_flex() -> None:
    configuration = corpus.hinge()
    rng = np.random.default_rng(7)
    field = FlexField.create(rng.standard_normal((4, 3)))
    trivial, rest = split_flex(configuration, field)
    np.testing.assert_allclose((trivial + rest).vectors, field.vectors, atol=1e-12)
    t = trivial_motion_basis(configuration).matrix(4)
    np.testing.assert_allclose(t.T @ rest.stacked(), 0, atol=1e-12)
    np.testing.assert_allclose(trivial.stacked(), t @ (t.T @ field.stacked()), atol=1e-12)


@settings(max_examples=25)
@given(
    rotvec=st.tuples(*[st.floats(-3, 3)] * 3),
    shift=st.tuples(*[st.floats(-5, 5)] * 3),
    scale=st.floats(0.1, 10),
)
def test_rigid_motions_and_scaling(
    rotvec: tuple[float, float, float], shift: tuple[float, float, float], scale: float
) -> None:
    rotation = Rotation.from_rotvec(rotvec).as_matrix()
    base = corpus.subdivided_tetrahedron()
    moved = base.transformed(scale * rotation, shift)

    before = first_order_flex_space(base)
    after = first_order_flex_space(moved)
    assert (after.trivial_dim, after.nontrivial_dim) == (before.trivial_dim, before.nontrivial_dim)
    assert len(equilibrium_stress_space(moved)) == 1

    (field,) = before.nontrivial_basis
    (moved_field,) = after.nontrivial_basis
    angles = principal_angles(
        field.rotated(rotation).stacked()[:, None], moved_field.stacked()[:, None]
    )
    assert angles[0] == pytest.approx(0, abs=1e-7)
