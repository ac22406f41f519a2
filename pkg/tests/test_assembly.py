import numpy as np
import pytest

from errors import DimensionError
from mesh import MeshConfig, build_mesh, classify_dofs
from assembly import (
    SplitFunction,
    assemble_blocks,
    assemble_global,
    bilinear,
    element_stiffness,
    energy,
    energy_subdomain,
    local_stiffness,
    write_coo,
)

# Every decomposition with N * m <= 24, single subdomains included
STRUCTURAL_GRID = [(N, m) for N in range(1, 13) for m in range(2, 25) if N * m <= 24]


def make_blocks(N, m, diagonal="lower_left"):
    mesh = build_mesh(MeshConfig(N, m, diagonal=diagonal))
    part = classify_dofs(mesh)
    return mesh, part, assemble_blocks(mesh, part)


def random_split(part, rng):
    size = part.num_primal + part.num_local_dual
    return SplitFunction.from_broken(part, rng.standard_normal(size))


class TestLocalStiffness:
    def test_reference_right_triangle(self):
        h = 0.125
        expected = 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])
        np.testing.assert_allclose(local_stiffness([[0, 0], [h, 0], [0, h]]), expected, atol=1e-15)

    def test_rows_sum_to_zero(self):
        K = local_stiffness([[0.1, 0.2], [1.3, -0.4], [0.7, 2.1]])
        np.testing.assert_allclose(K.sum(axis=1), 0.0, atol=1e-12)
        np.testing.assert_allclose(K, K.T, atol=0)

    def test_scale_invariance(self):
        tri = np.array([[0.0, 0.0], [0.3, 0.1], [0.05, 0.4]])
        np.testing.assert_allclose(local_stiffness(2 * tri), local_stiffness(tri), rtol=1e-12)

    def test_orientation_of_vertices_does_not_matter(self):
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        clockwise = tri[[0, 2, 1]]
        K = local_stiffness(tri)
        np.testing.assert_allclose(local_stiffness(clockwise), K[np.ix_([0, 2, 1], [0, 2, 1])])

    def test_degenerate_triangle_rejected(self):
        with pytest.raises(ValueError):
            local_stiffness([[0, 0], [1, 1], [2, 2]])

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            local_stiffness([[0, 0], [1, 0]])
        with pytest.raises(ValueError):
            element_stiffness(np.zeros((3, 2)))


class TestAssembleBlocks:
    def test_five_point_stencil(self):
        mesh = build_mesh(MeshConfig(2, 2))
        K = assemble_global(mesh, dirichlet=False).toarray()
        n = mesh.config.cells_per_side
        for iy in range(1, n):
            for ix in range(1, n):
                row = K[mesh.node_index(ix, iy)]
                assert row[mesh.node_index(ix, iy)] == pytest.approx(4.0)
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    assert row[mesh.node_index(ix + dx, iy + dy)] == pytest.approx(-1.0)
                for dx, dy in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
                    assert row[mesh.node_index(ix + dx, iy + dy)] == 0.0

    def test_interior_and_corner_diagonal(self):
        _, part, blocks = make_blocks(3, 3)
        diagonal = blocks.A_rr.diagonal()
        np.testing.assert_allclose(diagonal, 4.0)
        assert diagonal.size == part.num_primal

    def test_block_shapes(self):
        _, part, blocks = make_blocks(2, 2)
        assert blocks.A_rr.shape == (5, 5)
        assert blocks.A_rd.shape == (5, 8)
        assert blocks.A_dd.shape == (8, 8)
        assert blocks.K_tilde.shape == (13, 13)

    def test_blocks_symmetric_and_rr_positive_definite(self):
        _, _, blocks = make_blocks(3, 4)
        for matrix in (blocks.A_rr, blocks.A_dd, blocks.K_tilde):
            assert abs(matrix - matrix.T).max() == 0.0
        assert np.linalg.eigvalsh(blocks.A_rr.toarray()).min() > 0
        assert np.linalg.eigvalsh(blocks.K_tilde.toarray()).min() > 0

    def test_dual_block_is_block_diagonal_per_subdomain(self):
        _, part, blocks = make_blocks(3, 3)
        coo = blocks.A_dd.tocoo()
        owner = part.local_dual_subdomain
        assert np.all(owner[coo.row] == owner[coo.col])

    def test_floating_subdomain_kernel(self):
        _, _, blocks = make_blocks(3, 3)
        local = blocks.local_matrices[4].toarray()
        np.testing.assert_allclose(local @ np.ones(local.shape[0]), 0.0, atol=1e-13)
        eigenvalues = np.linalg.eigvalsh(local)
        assert eigenvalues.min() > -1e-12
        assert np.sum(eigenvalues < 1e-10) == 1

    @pytest.mark.parametrize("N, m", [(N, m) for N, m in STRUCTURAL_GRID if N > 1])
    def test_local_matrices_positive_semidefinite(self, N, m):
        _, _, blocks = make_blocks(N, m)
        for local in blocks.local_matrices:
            assert np.linalg.eigvalsh(local.toarray()).min() > -1e-12

    def test_corner_basis_energy(self):
        _, part, blocks = make_blocks(3, 2)
        for k in range(part.num_corners):
            corner = np.zeros(part.num_corners)
            corner[k] = 1.0
            phi = SplitFunction(part, np.zeros(part.num_interior), corner, np.zeros(part.num_local_dual))
            assert energy(blocks, phi) == pytest.approx(4.0, abs=1e-12)

    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_orientation_independence(self, N, m):
        first = assemble_global(build_mesh(MeshConfig(N, m, "lower_left")))
        second = assemble_global(build_mesh(MeshConfig(N, m, "lower_right")))
        assert abs(first - second).max() < 1e-14
        if N > 1:
            _, _, left = make_blocks(N, m, "lower_left")
            _, _, right = make_blocks(N, m, "lower_right")
            assert abs(left.K_tilde - right.K_tilde).max() < 1e-14

    def test_h_independence(self):
        _, _, coarse = make_blocks(2, 3)
        _, _, fine = make_blocks(4, 3)
        np.testing.assert_array_equal(coarse.local_matrices[0].toarray(), fine.local_matrices[0].toarray())

    def test_global_dirichlet_matrix(self):
        mesh = build_mesh(MeshConfig(2, 2))
        K = assemble_global(mesh)
        assert K.shape == (9, 9)
        assert np.linalg.eigvalsh(K.toarray()).min() > 0
        neumann = assemble_global(mesh, dirichlet=False)
        np.testing.assert_allclose(neumann @ np.ones(mesh.num_nodes), 0.0, atol=1e-13)


class TestEnergies:
    def test_zero(self):
        _, part, blocks = make_blocks(2, 2)
        zero = SplitFunction.zeros(part)
        assert energy(blocks, zero) == 0.0
        assert energy_subdomain(blocks, zero, 0) == 0.0

    def test_symmetry_and_sum_over_subdomains(self):
        rng = np.random.default_rng(7)
        mesh, part, blocks = make_blocks(3, 3)
        u = random_split(part, rng)
        v = random_split(part, rng)
        assert bilinear(blocks, u, v) == pytest.approx(bilinear(blocks, v, u), rel=1e-13)
        total = sum(energy_subdomain(blocks, u, j) for j in range(mesh.num_subdomains))
        assert energy(blocks, u) == pytest.approx(total, rel=1e-12)
        assert energy(blocks, u) > 0

    def test_energy_is_diagonal_of_bilinear(self):
        rng = np.random.default_rng(11)
        _, part, blocks = make_blocks(2, 3)
        u = random_split(part, rng)
        assert energy(blocks, u) == pytest.approx(bilinear(blocks, u, u), rel=1e-14)

    def test_continuous_function_energy_matches_global_matrix(self):
        rng = np.random.default_rng(3)
        mesh, part, blocks = make_blocks(3, 2)
        values = rng.standard_normal(mesh.num_nodes)
        values[part.boundary] = 0.0
        v = SplitFunction.from_nodal(part, values)
        K = assemble_global(mesh, dirichlet=False)
        assert energy(blocks, v) == pytest.approx(values @ (K @ values), rel=1e-12)

    def test_dimension_mismatch(self):
        _, part, blocks = make_blocks(2, 2)
        _, other, _ = make_blocks(2, 2)
        with pytest.raises(DimensionError):
            energy(blocks, SplitFunction.zeros(other))
        with pytest.raises(DimensionError):
            SplitFunction(part, np.zeros(3), np.zeros(1), np.zeros(8))
        with pytest.raises(DimensionError):
            SplitFunction.from_broken(part, np.zeros(5))
        with pytest.raises(DimensionError):
            SplitFunction.zeros(part) + SplitFunction.zeros(other)

    def test_split_parts_add_up(self):
        rng = np.random.default_rng(5)
        _, part, _ = make_blocks(3, 2)
        v = random_split(part, rng)
        total = v.interior_part() + v.corner_part() + v.dual_part()
        np.testing.assert_array_equal(total.to_broken(), v.to_broken())
        np.testing.assert_array_equal((v - v.corner_part()).to_broken(), v.without_corners().to_broken())


class TestMatrixDump:
    def test_coordinate_format(self, tmp_path):
        _, _, blocks = make_blocks(2, 2)
        path = write_coo(tmp_path / "A_rr.coo", blocks.A_rr)
        lines = path.read_text().splitlines()
        assert len(lines) == blocks.A_rr.nnz
        entries = [line.split() for line in lines]
        keys = [(int(row), int(col)) for row, col, _ in entries]
        assert keys == sorted(keys)
        dense = np.zeros(blocks.A_rr.shape)
        for row, col, value in entries:
            dense[int(row), int(col)] = float(value)
        np.testing.assert_array_equal(dense, blocks.A_rr.toarray())

    def test_dense_input(self, tmp_path):
        path = write_coo(tmp_path / "dense.coo", np.array([[1.0, 0.0], [0.0, 1.0 / 3.0]]))
        assert path.read_text().splitlines() == ["0 0 1", "1 1 0.33333333333333331"]
