#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nci/algebra.hpp"

using namespace nci;

TEST_CASE("matrix algebra structure") {
    auto M1 = make_matrix_algebra(1);
    CHECK(M1->dim() == 1);
    CHECK(std::abs(M1->c(0, 0, 0) - cplx(1, 0)) < 1e-15);

    auto M2 = make_matrix_algebra(2);
    // e12 e21 = e11, e12 e12 = 0
    auto e12 = M2->basis_element(0 * 2 + 1);
    auto e21 = M2->basis_element(1 * 2 + 0);
    auto e11 = M2->basis_element(0);
    CHECK((multiply(e12, e21).coeffs - e11.coeffs).norm() < 1e-15);
    CHECK(multiply(e12, e12).coeffs.norm() < 1e-15);

    auto M3 = make_matrix_algebra(3);
    CHECK(M3->associativity_residual() < 1e-15);
}

TEST_CASE("group algebra") {
    // Z/2
    auto Z2 = make_group_algebra({{0, 1}, {1, 0}});
    auto e = Z2->basis_element(0), g = Z2->basis_element(1);
    auto p = scale(0.5, add(e, g));
    CHECK((multiply(p, p).coeffs - p.coeffs).norm() < 1e-15);

    // trivial group
    auto T = make_group_algebra({{0}});
    CHECK(T->dim() == 1);

    // S3: commutant of the regular representation has dimension 3
    // multiplication table from permutation composition
    std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                             {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    auto compose = [&](int a, int b) {
        std::array<int, 3> ab{};
        for (int i = 0; i < 3; ++i) ab[i] = perms[a][perms[b][i]];
        for (int k = 0; k < 6; ++k)
            if (perms[k] == ab) return k;
        return -1;
    };
    std::vector<std::vector<int>> table(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) table[a][b] = compose(a, b);
    auto S3 = make_group_algebra(table);
    // solve x g_i = g_i x for all i: center dimension
    const int d = 6;
    MatrixXcd sys = MatrixXcd::Zero(d * d * d, d);
    for (int i = 0; i < d; ++i) {
        MatrixXcd L = S3->left_regular(i);
        // right multiplication by e_i
        MatrixXcd R = MatrixXcd::Zero(d, d);
        for (int j = 0; j < d; ++j) R.col(j) = S3->mul(VectorXcd::Unit(d, j), VectorXcd::Unit(d, i));
        sys.block(i * d, 0, d, d) = L - R;
    }
    Eigen::JacobiSVD<MatrixXcd> svd(sys);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()[k] < 1e-9) ++null_dim;
    null_dim += d - (int)svd.singularValues().size();
    CHECK(null_dim == 3);

    CHECK_THROWS_AS(make_group_algebra({{0, 0}, {1, 1}}), NotAGroup);
}

TEST_CASE("invert") {
    auto M2 = make_matrix_algebra(2);
    CHECK((invert(M2->unit()).coeffs - M2->unit_coeffs()).norm() < 1e-14);

    VectorXcd diag(4);
    diag << 2.0, 0.0, 0.0, 3.0;
    auto a = M2->element(diag);
    auto ai = invert(a);
    VectorXcd expect(4);
    expect << 0.5, 0.0, 0.0, 1.0 / 3.0;
    CHECK((ai.coeffs - expect).norm() < 1e-14);

    // random upper triangular with unit diagonal in M3: compare with
    // back-substitution oracle on the 3x3 matrix form
    auto M3 = make_matrix_algebra(3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    MatrixXcd T = MatrixXcd::Identity(3, 3);
    T(0, 1) = cplx(u(rng), u(rng));
    T(0, 2) = cplx(u(rng), u(rng));
    T(1, 2) = cplx(u(rng), u(rng));
    VectorXcd coeffs(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) coeffs[r * 3 + c] = T(r, c);
    auto t = M3->element(coeffs);
    auto ti = invert(t);
    // oracle: solve T X = I by back substitution
    MatrixXcd X = MatrixXcd::Identity(3, 3);
    for (int col = 0; col < 3; ++col)
        for (int row = 2; row >= 0; --row) {
            cplx acc = X(row, col);
            for (int k2 = row + 1; k2 < 3; ++k2) acc -= T(row, k2) * X(k2, col);
            X(row, col) = acc;
        }
    VectorXcd oracle(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) oracle[r * 3 + c] = X(r, c);
    CHECK((ti.coeffs - oracle).norm() < 1e-12);

    // singular element
    auto e11 = M2->basis_element(0);
    CHECK_THROWS_AS(invert(e11), Singular);

    // invert(invert(x)) = x
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_element(M3, rng);
        x.coeffs += 3.0 * M3->unit_coeffs(); // keep well away from singular
        auto xi = invert(x);
        CHECK((invert(xi).coeffs - x.coeffs).norm() < 1e-9);
    }
}

TEST_CASE("traces") {
    for (int n = 1; n <= 8; ++n) {
        auto Mn = make_matrix_algebra(n);
        auto tr = matrix_trace_functional(Mn, n);
        CHECK(tr.is_trace);
    }
    auto M2 = make_matrix_algebra(2);
    LinearFunctional bad{M2, VectorXcd::Unit(4, 1), false}; // coeff of e12
    CHECK(!verify_trace(bad));

    auto Z2 = make_group_algebra({{0, 1}, {1, 0}});
    LinearFunctional ev_id{Z2, VectorXcd::Unit(2, 0), false};
    CHECK(verify_trace(ev_id));
}

TEST_CASE("algebra json round trip") {
    auto M2 = make_matrix_algebra(2);
    auto M2b = algebra_from_json(algebra_to_json(*M2));
    CHECK(M2b->dim() == 4);
    CHECK(M2b->associativity_residual() < 1e-12);
    auto x = M2b->basis_element(1);
    auto y = M2b->basis_element(2);
    CHECK((multiply(x, y).coeffs - M2b->basis_element(0).coeffs).norm() < 1e-14);
    CHECK((multiply(x, y).coeffs - M2->mul(VectorXcd::Unit(4, 1), VectorXcd::Unit(4, 2))).norm() < 1e-14);
}

TEST_CASE("parent mismatch") {
    auto A = make_matrix_algebra(2), B = make_matrix_algebra(2);
    CHECK_THROWS_AS(multiply(A->unit(), B->unit()), ParentMismatch);
}
