// probe: normalized-complex chain map property and odd chern matching
#include <cstdio>

#include "nci/forms.hpp"

using namespace nci;

int main() {
    auto M2 = make_matrix_algebra(2);
    std::mt19937_64 rng(3);

    // 1. does the slot projection commute with b and B through the quotient?
    for (int trial = 0; trial < 5; ++trial) {
        NCForm x = random_homogeneous_form(M2, 3, 6, rng);
        // add unit-direction content to slots
        NCForm xu(M2, 6);
        for (auto t : x.terms(3)) {
            t.slots[1] += 0.7 * M2->unit_coeffs();
            xu.add_term(t);
        }
        NCForm lhs_b = normalized_projection(hochschild_b(xu));
        NCForm rhs_b = normalized_projection(hochschild_b(normalized_projection(xu)));
        NCForm db = lhs_b;
        db.add(rhs_b, -1.0);
        NCForm lhs_B = normalized_projection(connes_B(xu));
        NCForm rhs_B = normalized_projection(connes_B(normalized_projection(xu)));
        NCForm dB = lhs_B;
        dB.add(rhs_B, -1.0);
        std::printf("trial %d: |pi b - pi b pi| = %.3e   |pi B - pi B pi| = %.3e\n",
                    trial, residual_maxabs(db, 6, rng), residual_maxabs(dB, 6, rng));
    }

    // 2. matching in the normalized quotient
    auto u = random_element(M2, rng);
    u.coeffs += 2.0 * M2->unit_coeffs();
    auto uinv = invert(u);
    const int N = 9;
    NCForm f1(M2, N);
    {
        FormTerm t;
        t.slot0 = VectorXcd::Zero(5);
        t.slot0.head(4) = uinv.coeffs;
        t.slots.push_back(u.coeffs);
        f1.add_term(std::move(t));
    }
    NCForm du(M2, N);
    {
        FormTerm t;
        t.slot0 = VectorXcd::Unit(5, 4);
        t.slots.push_back(u.coeffs);
        du.add_term(std::move(t));
    }
    NCForm g = mul(du, f1);
    NCForm blk0 = f1;
    NCForm blk1 = mul(blk0, g);
    NCForm blk2 = mul(blk1, g);

    auto fit = [&](const NCForm& a, const NCForm& bb, int deg) {
        VectorXcd va = dense_component(a, deg);
        VectorXcd vb = dense_component(bb, deg);
        cplx c = va.dot(vb) / va.dot(va);
        double res = (vb - c * va).norm() / std::max(1e-300, vb.norm());
        std::printf("  fit c = (%.9f, %.2e) rel res %.3e  |a|=%.3g |b|=%.3g\n",
                    c.real(), c.imag(), res, va.norm(), vb.norm());
    };
    std::printf("normalized: b(blk1) vs B(blk0) at degree 2:\n");
    fit(normalized_projection(connes_B(normalized_projection(blk0))),
        normalized_projection(hochschild_b(normalized_projection(blk1))), 2);
    std::printf("normalized: b(blk2) vs B(blk1) at degree 4:\n");
    fit(normalized_projection(connes_B(normalized_projection(blk1))),
        normalized_projection(hochschild_b(normalized_projection(blk2))), 4);
    std::printf("normalized: b(blk1) alone at deg 2 norm %.3e\n",
                dense_component(normalized_projection(hochschild_b(blk1)), 2).norm());
    std::printf("unnormalized: b(blk1) at deg 2 norm %.3e\n",
                dense_component(hochschild_b(blk1), 2).norm());
    return 0;
}

// appended: direct check of chern_invertible against dense norms
#include "nci/forms.hpp"
namespace {
struct Extra {
    Extra() {
        using namespace nci;
        auto M3 = make_matrix_algebra(3);
        std::mt19937_64 rng(13);
        auto x = random_element(M3, rng);
        x.coeffs += 2.5 * M3->unit_coeffs();
        NCForm ch = chern_invertible(x, 5);
        NCForm cyc = normalized_projection(b_plus_B(ch));
        for (int degc = 0; degc <= 4; ++degc) {
            if (cyc.degree_empty(degc)) { std::printf("deg %d empty\n", degc); continue; }
            double dn = dense_component(cyc, degc).norm();
            double rn = reduced_component_norm(cyc, degc);
            std::printf("deg %d: dense %.3e reduced %.3e terms %zu\n", degc, dn, rn,
                        cyc.terms(degc).size());
        }
    }
} extra_run;
}
