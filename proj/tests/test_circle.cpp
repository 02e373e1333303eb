#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nci/circle.hpp"

using namespace nci;

TEST_CASE("hurwitz zeta basics") {
    // zeta(2) = pi^2/6
    CHECK(zeta_hurwitz(2.0, 1.0) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-13));
    // zeta(3) known value
    CHECK(zeta_hurwitz(3.0, 1.0) == doctest::Approx(1.2020569031595942854).epsilon(1e-13));
    // shift identity: zeta_H(s, a) = zeta_H(s, a+1) + a^{-s}
    for (double s : {2.5, 4.0, 0.5, -1.5}) {
        double lhs = zeta_hurwitz(s, 2.0);
        double rhs = zeta_hurwitz(s, 3.0) + std::pow(2.0, -s);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // zeta_H(-n, a) = -B_{n+1}(a)/(n+1): check zeta_H(0, a) = 1/2 - a
    CHECK(zeta_hurwitz(0.0, 3.0) == doctest::Approx(0.5 - 3.0).epsilon(1e-12));
    // digamma(1) = -euler_gamma
    CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015328606).epsilon(1e-13));
}

TEST_CASE("laurent arithmetic and windows") {
    LaurentPoly u = LaurentPoly::mode(1);
    LaurentPoly v = LaurentPoly::mode(-1);
    LaurentPoly uv = u * v;
    CHECK(std::abs(uv.mean() - cplx(1, 0)) < 1e-15);

    MatrixXcd W = window_matrix(u, 3);
    CHECK(W.rows() == 7);
    CHECK(std::abs(W(4, 3) - cplx(1, 0)) < 1e-15); // mode 0 -> mode 1
}

TEST_CASE("circle operator entries") {
    auto D = CircleOperator::dirac();
    CHECK(std::abs(D.entry(0, 0) - cplx(0.5, 0)) < 1e-15);
    CHECK(std::abs(D.entry(5, 5) - cplx(5, 0)) < 1e-15);
    CHECK(std::abs(D.entry(-5, -5) - cplx(-5, 0)) < 1e-15);

    auto F = CircleOperator::sign_dirac();
    CHECK(std::abs(F.entry(0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(F.entry(-2, -2) + cplx(1, 0)) < 1e-15);

    // products agree with window products well inside the window
    auto a = CircleOperator::from_symbol(random_trig(2, *(new std::mt19937_64(4))));
    auto FA = F * a;
    MatrixXcd lhs = FA.window(10);
    MatrixXcd rhs = F.window(14) * a.window(14);
    for (int r = -8; r <= 8; ++r)
        for (int c = -8; c <= 8; ++c)
            CHECK(std::abs(lhs(r + 10, c + 10) - rhs(r + 14, c + 14)) < 1e-13);
}

TEST_CASE("commutators") {
    std::mt19937_64 rng(17);
    LaurentPoly sym = random_trig(2, rng);
    auto a = CircleOperator::from_symbol(sym);
    auto da = a.dirac_commutator();
    auto D = CircleOperator::dirac();
    MatrixXcd lhs = da.window(8);
    MatrixXcd rhs = D.window(12) * a.window(12) - a.window(12) * D.window(12);
    for (int r = -6; r <= 6; ++r)
        for (int c = -6; c <= 6; ++c)
            CHECK(std::abs(lhs(r + 8, c + 8) - rhs(r + 12, c + 12)) < 1e-12);

    auto d2a = a.laplace_commutator();
    MatrixXcd D2 = D.window(12) * D.window(12);
    MatrixXcd rhs2 = D2 * a.window(12) - a.window(12) * D2;
    MatrixXcd lhs2 = d2a.window(8);
    for (int r = -6; r <= 6; ++r)
        for (int c = -6; c <= 6; ++c)
            CHECK(std::abs(lhs2(r + 8, c + 8) - rhs2(r + 12, c + 12)) < 1e-12);
}

TEST_CASE("zeta trace of identity symbol") {
    // Tr(|D|^{-s}) = 2 zeta(s) + 2^s with the shifted zero mode
    auto one = CircleOperator::identity();
    ZetaTrace z = zeta_trace_of(one);
    for (double s : {3.0, 4.5, 6.0}) {
        cplx direct = zeta_trace_direct(one, s, 3000000);
        CHECK(std::abs(z.eval(s) - direct) < 1e-10);
        cplx expect = 2.0 * zeta_hurwitz(s, 1.0) + std::pow(2.0, s);
        CHECK(std::abs(z.eval(s) - expect) < 1e-12);
    }
    // residue at s = 1 equals 2
    CHECK(std::abs(z.residue_at(1.0) - cplx(2, 0)) < 1e-14);
}

TEST_CASE("zeta trace of nonconstant symbol") {
    // off-diagonal symbol: zero residue
    auto mode = CircleOperator::from_symbol(LaurentPoly::mode(1));
    ZetaTrace z1 = zeta_trace_of(mode);
    CHECK(std::abs(z1.residue_at(1.0)) < 1e-14);

    // mean value c: residue at 1 is 2c
    std::mt19937_64 rng(23);
    LaurentPoly sym = random_trig(2, rng);
    ZetaTrace z2 = zeta_trace_of(CircleOperator::from_symbol(sym));
    CHECK(std::abs(z2.residue_at(1.0) - 2.0 * sym.mean()) < 1e-13);

    for (double s : {3.0, 4.5, 6.0}) {
        cplx direct = zeta_trace_direct(CircleOperator::from_symbol(sym), s, 3000000);
        CHECK(std::abs(z2.eval(s) - direct) < 1e-10);
    }
}

TEST_CASE("laurent form identities") {
    std::mt19937_64 rng(31);
    for (int deg = 1; deg <= 4; ++deg) {
        LaurentTerm t;
        t.s0 = random_trig(2, rng);
        t.unit0 = cplx(0.3, -0.1);
        for (int j = 0; j < deg; ++j) t.slots.push_back(random_trig(2, rng));
        LaurentForm x;
        x.terms.push_back(t);

        auto norm = [](const LaurentForm& f) {
            // realized window norm as a cheap proxy
            double acc = 0;
            for (const auto& tt : f.terms) {
                double prod = std::abs(tt.unit0);
                for (auto& [m, c] : tt.s0.coeff) prod += std::abs(c);
                double w = prod;
                for (const auto& s : tt.slots) {
                    double sv = 0;
                    for (auto& [m, c] : s.coeff) sv += std::abs(c);
                    w *= sv;
                }
                acc += w;
            }
            return acc;
        };
        (void)norm;

        // b^2 = 0, B^2 = 0, bB + Bb = 0 checked through window realization
        auto realize = [&](const LaurentForm& f, int degree, int M) {
            // sum over terms of given degree of the full tensor contraction is
            // expensive; instead check that the associated (n+1)-linear window
            // word built from slots vanishes termwise via matrix products:
            // here we only need a linear functional separating forms, so
            // evaluate sum of products of window matrices entrywise
            MatrixXcd acc = MatrixXcd::Zero(2 * M + 1, 2 * M + 1);
            for (const auto& tt : f.terms) {
                if (tt.degree() != degree) continue;
                MatrixXcd w = window_matrix(tt.s0, M);
                w += tt.unit0 * MatrixXcd::Identity(2 * M + 1, 2 * M + 1);
                for (const auto& s : tt.slots) w = w * window_matrix(s, M);
                acc += w;
            }
            return acc;
        };
        (void)realize;
        // b^2 and the anticommutator identity hold termwise as tensors;
        // verified against the finite-algebra implementation elsewhere.
        LaurentForm bb = lf_b(lf_b(x));
        LaurentForm anti = lf_b(lf_B(x));
        lf_add(anti, lf_B(lf_b(x)));
        // realize as tensors over a small mode window and compare to zero
        // via dense expansion on modes [-6, 6]
        auto dense = [&](const LaurentForm& f) {
            // flatten each term into nested Kronecker over mode coefficients
            // restricted to modes [-6, 6] per slot
            const int Mm = 6, W = 2 * Mm + 1;
            std::map<int, VectorXcd> by_degree;
            for (const auto& tt : f.terms) {
                const int n = tt.degree();
                Eigen::Index len = (Eigen::Index)(W + 1);
                for (int i2 = 0; i2 < n; ++i2) len *= W;
                VectorXcd v = VectorXcd::Zero(len);
                // slot0 encoded with unit as extra coordinate
                VectorXcd s0 = VectorXcd::Zero(W + 1);
                for (auto& [mm, cc] : tt.s0.coeff)
                    if (std::abs(mm) <= Mm) s0[mm + Mm] = cc;
                s0[W] = tt.unit0;
                VectorXcd acc = s0;
                for (const auto& s : tt.slots) {
                    VectorXcd sv = VectorXcd::Zero(W);
                    for (auto& [mm, cc] : s.coeff)
                        if (std::abs(mm) <= Mm) sv[mm + Mm] = cc;
                    VectorXcd next(acc.size() * W);
                    for (Eigen::Index i2 = 0; i2 < acc.size(); ++i2)
                        next.segment(i2 * W, W) = acc[i2] * sv;
                    acc = next;
                }
                auto& slot = by_degree[n];
                if (slot.size() == 0) slot = acc;
                else slot += acc;
            }
            double worst = 0;
            for (auto& [k, v] : by_degree) worst = std::max(worst, v.cwiseAbs().maxCoeff());
            return worst;
        };
        CHECK(dense(bb) < 1e-12);
        CHECK(dense(anti) < 1e-12);
        CHECK(dense(lf_B(lf_B(x))) < 1e-12);
    }
}
