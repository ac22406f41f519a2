import numpy as np
import pytest
import scipy.sparse as sp

from errors import ConvergenceError, DimensionError, SolverBreakdownError
from mesh import MeshConfig, build_mesh, classify_dofs
from assembly import SplitFunction, assemble_blocks, bilinear, energy
from substructuring import (
    DualOperator,
    SchurOperator,
    SymmetricFactor,
    coarse_interpolation,
    coarse_interpolation_matrix,
    coarse_interpolation_split,
    conjugate_gradient,
    dual_apply,
    harmonic_extension,
    jump_operator,
    schur_apply,
    schur_dense,
)

# Every decomposition with N * m <= 24
STRUCTURAL_GRID = [(N, m) for N in range(2, 13) for m in range(2, 13) if N * m <= 24]


def setup(N, m):
    mesh = build_mesh(MeshConfig(N, m))
    part = classify_dofs(mesh)
    blocks = assemble_blocks(mesh, part)
    return mesh, part, blocks


class TestFactorization:
    def test_solves_spd_system(self):
        A = sp.csr_matrix(np.array([[4.0, -1.0, 0.0], [-1.0, 4.0, -1.0], [0.0, -1.0, 4.0]]))
        b = np.array([1.0, 2.0, 3.0])
        x = SymmetricFactor(A).solve(b)
        np.testing.assert_allclose(A @ x, b, rtol=1e-14)

    def test_block_right_hand_side(self):
        A = sp.diags([2.0, 3.0, 5.0]).tocsr()
        X = SymmetricFactor(A).solve(np.eye(3))
        np.testing.assert_allclose(X, np.diag([0.5, 1 / 3, 0.2]), rtol=1e-14)

    @pytest.mark.parametrize("matrix", [
        [[1.0, 2.0], [2.0, 1.0]],
        [[1.0, 1.0], [1.0, 1.0]],
        [[-1.0, 0.0], [0.0, 1.0]],
    ])
    def test_non_spd_breaks_down(self, matrix):
        with pytest.raises(SolverBreakdownError):
            SymmetricFactor(sp.csr_matrix(np.array(matrix)))


class TestConjugateGradient:
    def test_diagonal_system(self):
        d = np.arange(1.0, 11.0)
        result = conjugate_gradient(lambda x: d * x, np.ones(10))
        np.testing.assert_allclose(result.x, 1.0 / d, rtol=1e-10)
        assert result.residual <= 1e-12
        assert result.iterations <= 15

    def test_zero_rhs(self):
        result = conjugate_gradient(lambda x: 2 * x, np.zeros(4))
        np.testing.assert_array_equal(result.x, np.zeros(4))
        assert result.iterations == 0

    def test_iteration_cap(self):
        d = np.arange(1.0, 11.0)
        with pytest.raises(ConvergenceError) as info:
            conjugate_gradient(lambda x: d * x, np.ones(10), maxiter=2)
        assert info.value.iterations == 2
        assert info.value.residual > 1e-12


class TestHarmonicExtension:
    def test_zero(self):
        _, part, blocks = setup(2, 2)
        v = harmonic_extension(blocks, np.zeros(part.num_local_dual))
        assert np.all(v.to_broken() == 0.0)

    def test_counterexample_values(self):
        mesh, part, blocks = setup(3, 3)
        w = harmonic_extension(blocks, np.ones(part.num_local_dual))
        np.testing.assert_allclose(w.corner, 1.0, atol=1e-12)
        np.testing.assert_allclose(w.subdomain_values(4), 1.0, atol=1e-12)

    def test_residual(self):
        rng = np.random.default_rng(0)
        _, part, blocks = setup(3, 4)
        v_dual = rng.standard_normal(part.num_local_dual)
        v = harmonic_extension(blocks, v_dual)
        rhs = -(blocks.A_rd @ v_dual)
        residual = blocks.A_rr @ v.primal_values() - rhs
        assert np.linalg.norm(residual) <= 1e-12 * np.linalg.norm(rhs)
        np.testing.assert_array_equal(v.dual, v_dual)

    def test_minimal_energy(self):
        rng = np.random.default_rng(1)
        _, part, blocks = setup(2, 2)
        v = harmonic_extension(blocks, rng.standard_normal(part.num_local_dual))
        minimum = energy(blocks, v)
        for _ in range(200):
            perturbed = SplitFunction(
                part,
                v.interior + 0.1 * rng.standard_normal(part.num_interior),
                v.corner + 0.1 * rng.standard_normal(part.num_corners),
                v.dual,
            )
            assert energy(blocks, perturbed) >= minimum - 1e-12

    def test_dimension_mismatch(self):
        _, part, blocks = setup(2, 2)
        with pytest.raises(DimensionError):
            harmonic_extension(blocks, np.zeros(part.num_dual))

    def test_stalled_refinement_raises(self):
        class ScaledFactor:
            name = "A_rr"

            def __init__(self, factor):
                self.factor = factor

            def solve(self, rhs):
                return 0.5 * self.factor.solve(rhs)

        _, part, blocks = setup(2, 3)
        factor = ScaledFactor(SymmetricFactor(blocks.A_rr, "A_rr"))
        with pytest.raises(SolverBreakdownError):
            harmonic_extension(blocks, np.ones(part.num_local_dual), factor=factor)

    @pytest.mark.parametrize("N", [2, 3, 4])
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_orthogonality_identity(self, N, m):
        rng = np.random.default_rng(100 * N + m)
        _, part, blocks = setup(N, m)
        schur = SchurOperator(blocks)
        for _ in range(100):
            v = schur.extend(rng.standard_normal(part.num_local_dual))
            corner = v.corner_part()
            a_cc = energy(blocks, corner)
            coupling = bilinear(blocks, v.without_corners(), corner)
            assert abs(coupling + a_cc) <= 1e-10 * (1 + a_cc)


class TestCoarseInterpolation:
    def test_zero(self):
        mesh = build_mesh(MeshConfig(3, 2))
        np.testing.assert_array_equal(coarse_interpolation(mesh, np.zeros(mesh.num_nodes)), 0.0)

    def test_corner_hat(self):
        mesh = build_mesh(MeshConfig(2, 2))
        phi = np.zeros(mesh.num_nodes)
        phi[mesh.node_index(2, 2)] = 1.0
        hat = coarse_interpolation(mesh, phi)
        expected = {(2, 2): 1.0, (1, 1): 0.5, (3, 3): 0.5, (2, 1): 0.5, (1, 2): 0.5,
                    (3, 2): 0.5, (2, 3): 0.5, (3, 1): 0.0, (1, 3): 0.0, (0, 0): 0.0, (4, 4): 0.0}
        for (ix, iy), value in expected.items():
            assert hat[mesh.node_index(ix, iy)] == pytest.approx(value, abs=1e-15)

    @pytest.mark.parametrize("diagonal", ["lower_left", "lower_right"])
    def test_idempotent(self, diagonal):
        rng = np.random.default_rng(2)
        mesh = build_mesh(MeshConfig(3, 4, diagonal=diagonal))
        once = coarse_interpolation(mesh, rng.standard_normal(mesh.num_nodes))
        np.testing.assert_allclose(coarse_interpolation(mesh, once), once, atol=1e-14)

    def test_reproduces_linear_functions(self):
        mesh = build_mesh(MeshConfig(3, 3))
        linear = 1.0 + 2.0 * mesh.nodes[:, 0] - 0.5 * mesh.nodes[:, 1]
        np.testing.assert_allclose(coarse_interpolation(mesh, linear), linear, atol=1e-14)

    def test_rows_are_partitions_of_unity(self):
        mesh = build_mesh(MeshConfig(2, 5))
        P = coarse_interpolation_matrix(mesh)
        np.testing.assert_allclose(P @ np.ones(mesh.num_nodes), 1.0, atol=1e-14)
        assert P.min() >= -1e-15

    def test_split_function_is_continuous_and_preserves_jumps(self):
        rng = np.random.default_rng(4)
        mesh, part, _ = setup(3, 3)
        jump = jump_operator(mesh, part)
        v = SplitFunction.from_broken(part, rng.standard_normal(part.num_primal + part.num_local_dual))
        coarse = coarse_interpolation_split(mesh, part, v)
        np.testing.assert_allclose(jump.apply(coarse.dual), 0.0, atol=1e-14)
        np.testing.assert_allclose(coarse.corner, v.corner, atol=1e-14)
        np.testing.assert_allclose(jump.apply((v - coarse).dual), jump.apply(v.dual), atol=1e-13)


class TestJumpOperator:
    def test_small_instance(self):
        mesh, part, _ = setup(2, 2)
        jump = jump_operator(mesh, part)
        B = jump.matrix.toarray()
        assert B.shape == (4, 8)
        for row in B:
            assert sorted(row[row != 0]) == [-1.0, 1.0]
        np.testing.assert_array_equal(B @ B.T, 2 * np.eye(4))

    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_gram_matrix_and_rank(self, N, m):
        mesh, part, _ = setup(N, m)
        B = jump_operator(mesh, part).matrix.toarray()
        np.testing.assert_array_equal(B @ B.T, 2 * np.eye(part.num_dual))
        assert np.linalg.matrix_rank(B) == part.num_dual
        assert B.shape[1] - np.linalg.matrix_rank(B) == part.num_dual

    def test_sign_convention(self):
        mesh, part, _ = setup(3, 3)
        B = jump_operator(mesh, part).matrix.tocsr()
        for i, (j, k) in enumerate(part.dual_owners):
            row = B.getrow(i)
            plus = row.indices[row.data > 0][0]
            minus = row.indices[row.data < 0][0]
            assert part.local_dual_subdomain[plus] == j
            assert part.local_dual_subdomain[minus] == k
            assert part.local_dual_node[plus] == part.local_dual_node[minus] == part.dual[i]

    def test_continuous_traces_are_annihilated(self):
        rng = np.random.default_rng(6)
        mesh, part, _ = setup(3, 4)
        jump = jump_operator(mesh, part)
        values = rng.standard_normal(mesh.num_nodes)
        np.testing.assert_array_equal(jump.apply(part.dual_trace(values)), 0.0)

    def test_flip_rows(self):
        mesh, part, _ = setup(2, 2)
        jump = jump_operator(mesh, part)
        flipped = jump.flip_rows([1, 3])
        B = jump.matrix.toarray()
        F = flipped.matrix.toarray()
        np.testing.assert_array_equal(F[[0, 2]], B[[0, 2]])
        np.testing.assert_array_equal(F[[1, 3]], -B[[1, 3]])


class TestSchurOperator:
    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_dense_matches_explicit_inverse(self, N, m):
        _, _, blocks = setup(N, m)
        schur = SchurOperator(blocks)
        A_rr = blocks.A_rr.toarray()
        A_rd = blocks.A_rd.toarray()
        explicit = blocks.A_dd.toarray() - A_rd.T @ np.linalg.inv(A_rr) @ A_rd
        dense = schur_dense(schur)
        np.testing.assert_allclose(dense, explicit, atol=1e-10)
        rng = np.random.default_rng(8)
        for _ in range(20):
            v = rng.standard_normal(schur.dim)
            np.testing.assert_allclose(schur_apply(schur, v), dense @ v, atol=1e-10)

    def test_zero(self):
        _, _, blocks = setup(2, 2)
        schur = SchurOperator(blocks)
        assert np.all(schur.apply(np.zeros(schur.dim)) == 0.0)

    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_energy_identity(self, N, m):
        rng = np.random.default_rng(9)
        _, _, blocks = setup(N, m)
        schur = SchurOperator(blocks)
        for _ in range(10):
            v = rng.standard_normal(schur.dim)
            assert v @ schur.apply(v) == pytest.approx(energy(blocks, schur.extend(v)), rel=1e-10)

    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_symmetric_positive_definite(self, N, m):
        rng = np.random.default_rng(10)
        _, _, blocks = setup(N, m)
        schur = SchurOperator(blocks)
        for _ in range(10):
            x = rng.standard_normal(schur.dim)
            y = rng.standard_normal(schur.dim)
            assert abs(x @ schur.apply(y) - y @ schur.apply(x)) <= 1e-12 * np.linalg.norm(x) * np.linalg.norm(y)
            assert x @ schur.apply(x) > 0

    @pytest.mark.parametrize("method", ["cg", "direct"])
    def test_solve(self, method):
        rng = np.random.default_rng(12)
        _, _, blocks = setup(3, 3)
        schur = SchurOperator(blocks)
        g = rng.standard_normal(schur.dim)
        x = schur.solve(g, method=method)
        assert np.linalg.norm(schur.apply(x) - g) <= 1e-12 * np.linalg.norm(g) * 10

    def test_unknown_method(self):
        _, _, blocks = setup(2, 2)
        with pytest.raises(ValueError):
            SchurOperator(blocks).solve(np.ones(8), method="lu")

    def test_dense_cap(self, monkeypatch):
        import substructuring.operators as operators
        monkeypatch.setattr(operators, "DENSE_CAP", 4)
        _, _, blocks = setup(2, 2)
        with pytest.raises(ValueError):
            SchurOperator(blocks).dense()


class TestDualOperator:
    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    @pytest.mark.parametrize("inner", ["cg", "direct"])
    def test_matches_dense_oracle(self, N, m, inner):
        mesh, part, blocks = setup(N, m)
        schur = SchurOperator(blocks)
        jump = jump_operator(mesh, part)
        F = DualOperator(schur, jump, inner=inner)
        B = jump.matrix.toarray()
        oracle = B @ np.linalg.solve(schur.dense(), B.T)
        np.testing.assert_allclose(F.dense(), oracle, atol=1e-10)
        rng = np.random.default_rng(13)
        for _ in range(5):
            lam = rng.standard_normal(F.dim)
            expected = oracle @ lam
            assert np.linalg.norm(dual_apply(F, lam) - expected) <= 1e-8 * np.linalg.norm(expected)

    def test_zero(self):
        mesh, part, blocks = setup(2, 2)
        F = DualOperator(SchurOperator(blocks), jump_operator(mesh, part))
        assert np.all(F.apply(np.zeros(F.dim)) == 0.0)

    @pytest.mark.parametrize("N, m", STRUCTURAL_GRID)
    def test_symmetric_positive_definite(self, N, m):
        rng = np.random.default_rng(14)
        mesh, part, blocks = setup(N, m)
        F = DualOperator(SchurOperator(blocks), jump_operator(mesh, part), inner="direct")
        for _ in range(10):
            x = rng.standard_normal(F.dim)
            y = rng.standard_normal(F.dim)
            assert abs(x @ F.apply(y) - y @ F.apply(x)) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)
            assert x @ F.apply(x) > 0

    def test_row_flips_give_signed_similarity(self):
        mesh, part, blocks = setup(2, 3)
        schur = SchurOperator(blocks)
        jump = jump_operator(mesh, part)
        F = DualOperator(schur, jump, inner="direct").dense()
        flipped = DualOperator(schur, jump.flip_rows([0, 3]), inner="direct").dense()
        D = np.ones(F.shape[0])
        D[[0, 3]] = -1.0
        np.testing.assert_allclose(flipped, D[:, None] * F * D[None, :], atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(flipped), np.linalg.eigvalsh(F), atol=1e-12)

    def test_rejects_mismatched_operators(self):
        mesh, part, blocks = setup(2, 2)
        other_mesh, other_part, _ = setup(2, 2)
        with pytest.raises(ValueError):
            DualOperator(SchurOperator(blocks), jump_operator(other_mesh, other_part))
        with pytest.raises(ValueError):
            DualOperator(SchurOperator(blocks), jump_operator(mesh, part), inner="gmres")
