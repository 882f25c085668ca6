import numpy as np
import pytest
import scipy.sparse.linalg as spla

from topopt_mg.errors import ConfigurationError, DimensionError
from topopt_mg.fem import (BoundaryConditions, assemble, assemble_elasticity,
                           assemble_elasticity_moduli, assemble_poisson, compliance,
                           element_stiffness, is_symmetric, mass_element, poisson_element,
                           wall_boundary_conditions)
from topopt_mg.grid import GridLevel, node_coordinates, node_index
from topopt_mg.materials import DensityField, MaterialModel, effective_modulus


def closed_form_q4(E, nu):
    """Unit-square Q4 plane-stress stiffness from its textbook closed form."""
    k = np.array([1 / 2 - nu / 6, 1 / 8 + nu / 8, -1 / 4 - nu / 12, -1 / 8 + 3 * nu / 8,
                  -1 / 4 + nu / 12, -1 / 8 - nu / 8, nu / 6, 1 / 8 - 3 * nu / 8])
    idx = np.array([[0, 1, 2, 3, 4, 5, 6, 7], [1, 0, 7, 6, 5, 4, 3, 2],
                    [2, 7, 0, 5, 6, 3, 4, 1], [3, 6, 5, 0, 7, 2, 1, 4],
                    [4, 5, 6, 7, 0, 1, 2, 3], [5, 4, 3, 2, 1, 0, 7, 6],
                    [6, 3, 4, 1, 2, 7, 0, 5], [7, 2, 1, 4, 3, 6, 5, 0]])
    return E / (1 - nu**2) * k[idx]


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.45])
def test_element_stiffness_matches_closed_form(nu):
    np.testing.assert_allclose(element_stiffness(1.0, nu), closed_form_q4(1.0, nu), atol=1e-14)


def test_element_stiffness_examples():
    ke = element_stiffness(1.0, 0.3)
    assert ke[0, 0] == pytest.approx(0.45 / 0.91, rel=1e-14)
    np.testing.assert_allclose(element_stiffness(2.0, 0.3), 2 * ke, rtol=1e-15)
    translation = np.tile([1.0, 0.0], 4)
    np.testing.assert_allclose(ke @ translation, 0.0, atol=1e-12)
    eig = np.linalg.eigvalsh(ke)
    assert np.sum(np.abs(eig) < 1e-12) == 3
    assert eig.min() > -1e-12


def test_poisson_and_mass_elements():
    np.testing.assert_allclose(6 * poisson_element(),
                               [[4, -1, -2, -1], [-1, 4, -1, -2], [-2, -1, 4, -1],
                                [-1, -2, -1, 4]], atol=1e-14)
    np.testing.assert_allclose(36 * mass_element(0.5),
                               0.25 * np.array([[4, 2, 1, 2], [2, 4, 2, 1], [1, 2, 4, 2],
                                                [2, 1, 2, 4]]), atol=1e-14)


def test_single_element_assembly_is_element_matrix():
    level = GridLevel(1, 1, 2)
    mat = MaterialModel()
    alpha = np.array([[1.0], [1e-3], [1e-3], [1e-3]])
    dens = DensityField(alpha, 1, 1)
    K, f = assemble_elasticity(level, dens, mat, BoundaryConditions())
    e = 9.0 + (1e-3) ** 3 * (3.0 + 1.0 + 1e-9)
    perm = level.element_dofs()[0]
    np.testing.assert_allclose(K.toarray()[np.ix_(perm, perm)], element_stiffness(e, 0.3),
                               rtol=1e-13)
    assert not f.any()


def test_assembly_additivity_two_elements():
    level = GridLevel(2, 1, 2)
    K = assemble(level, element_stiffness(1.0, 0.3)).toarray()
    assert K.shape == (12, 12)
    ke = element_stiffness(1.0, 0.3)
    shared = node_index(1, 0, 1)
    # node (1,0) is local node 1 of element 0 and local node 0 of element 1
    assert K[2 * shared, 2 * shared] == pytest.approx(ke[2, 2] + ke[0, 0])
    assert is_symmetric(K)


def test_dirichlet_row_column_convention():
    level = GridLevel(2, 2, 2)
    bc = BoundaryConditions([3], [(10, 2.0)])
    K, f = assemble_elasticity_moduli(level, np.ones(4), 0.3, bc)
    dense = K.toarray()
    expected = np.zeros(level.num_dofs)
    expected[3] = 1.0
    np.testing.assert_array_equal(dense[3], expected)
    np.testing.assert_array_equal(dense[:, 3], expected)
    assert f[3] == 0.0 and f[10] == 2.0


def test_boundary_condition_validation():
    level = GridLevel(1, 1, 2)
    with pytest.raises(ConfigurationError):
        assemble_elasticity_moduli(level, [1.0], 0.3, BoundaryConditions([2], [(2, 1.0)]))
    with pytest.raises(ConfigurationError):
        assemble_elasticity_moduli(level, [1.0], 0.3, BoundaryConditions([99]))
    with pytest.raises(DimensionError):
        assemble_elasticity_moduli(level, [1.0, 2.0], 0.3, BoundaryConditions())


def test_poisson_interior_stencil():
    level = GridLevel(4, 4)
    K, _ = assemble_poisson(level)
    row = K.toarray()[node_index(2, 2, 4)].reshape(5, 5)
    np.testing.assert_allclose(row[1:4, 1:4], [[-1 / 3, -1 / 3, -1 / 3],
                                               [-1 / 3, 8 / 3, -1 / 3],
                                               [-1 / 3, -1 / 3, -1 / 3]], atol=1e-14)
    assert row.sum() == pytest.approx(0.0, abs=1e-14)


def test_poisson_zero_source():
    K, f = assemble_poisson(GridLevel(8, 8), 0.0)
    assert not f.any()
    np.testing.assert_array_equal(spla.spsolve(K.tocsc(), f), 0.0)


def _mms_error(n):
    level = GridLevel(n, n)
    h = 1.0 / n
    ix, iy = node_coordinates(level)
    x, y = ix * h, iy * h
    exact = np.sin(np.pi * x) * np.sin(np.pi * y)
    # lap u = -2 pi^2 u
    K, f = assemble_poisson(level, -2 * np.pi**2 * exact, h)
    u = spla.spsolve(K.tocsc(), f)
    return np.abs(u - exact).max()


def test_poisson_manufactured_solution_second_order():
    errors = [_mms_error(n) for n in (16, 32, 64)]
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(rates > 1.9), rates


def test_compliance_examples():
    level = GridLevel(4, 4, 2)
    bc = wall_boundary_conditions(level)
    K, f = assemble_elasticity_moduli(level, np.ones(16), 0.3, bc)
    assert compliance(K, np.zeros(level.num_dofs)) == 0.0
    e = np.zeros(level.num_dofs)
    e[0] = 1.0
    assert compliance(K, e) == K[0, 0]
    u = spla.spsolve(K.tocsc(), f)
    assert compliance(K, u) == pytest.approx(f @ u, rel=1e-8)
    with pytest.raises(DimensionError):
        compliance(K, np.zeros(3))


def test_wall_boundary_conditions():
    level = GridLevel(8, 8, 2)
    bc = wall_boundary_conditions(level)
    assert bc.fixed_dofs.size == 18
    (dof, value), = bc.point_loads
    assert dof == 2 * node_index(4, 8, 8) + 1 and value == -1.0


def test_effective_modulus_examples():
    mat = MaterialModel()
    eps = 1e-3
    assert effective_modulus(np.array([1, eps, eps, eps]), mat) == pytest.approx(9.0, rel=1e-8)
    assert effective_modulus(np.array([0.5, 0.5, 0.0, 0.0]), mat) == pytest.approx(1.5)
    lin = MaterialModel(p_exp=1.0)
    a = np.array([0.1, 0.2, 0.3, 0.4])
    assert effective_modulus(a, lin) == pytest.approx(a @ np.array(lin.phase_moduli))


@pytest.mark.parametrize("kwargs", [dict(phase_moduli=(1.0,)), dict(phase_moduli=(1.0, -1.0)),
                                    dict(poisson_ratio=0.5), dict(p_exp=0.5)])
def test_material_validation(kwargs):
    with pytest.raises(ConfigurationError):
        MaterialModel(**kwargs)


def test_density_field_partition_and_image():
    d = DensityField.uniform((0.16, 0.08, 0.08, 0.68), 3, 2)
    assert d.partition_error() < 1e-15
    np.testing.assert_allclose(d.phase_means(), [0.16, 0.08, 0.08, 0.68])
    assert d.as_image(0).shape == (3, 2)
