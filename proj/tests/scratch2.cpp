// probe: odd chern coefficient matching  b(c_{k+1} block_{k+1}) = -B(c_k block_k)
#include <cstdio>

#include "nci/forms.hpp"

using namespace nci;

int main() {
    auto M2 = make_matrix_algebra(2);
    std::mt19937_64 rng(3);
    auto x = random_element(M2, rng);
    x.coeffs += 2.0 * M2->unit_coeffs();
    auto u = x;
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

    // blocks: B_k = u^{-1}du (du u^{-1} du)^k, degrees 1,3,5
    NCForm blk0 = f1;
    NCForm blk1 = mul(blk0, g);
    NCForm blk2 = mul(blk1, g);

    auto ratio = [&](const NCForm& a, const NCForm& bb, int deg) {
        VectorXcd va = dense_component(a, deg);
        VectorXcd vb = dense_component(bb, deg);
        Eigen::Index imax;
        va.cwiseAbs().maxCoeff(&imax);
        std::printf("  |a|=%g |b|=%g ratio at max coord = (%g, %g)\n",
                    va.norm(), vb.norm(),
                    (vb[imax] / va[imax]).real(), (vb[imax] / va[imax]).imag());
        // least squares scalar fit: vb ~ c va
        cplx c = va.dot(vb) / va.dot(va);
        double res = (vb - c * va).norm() / vb.norm();
        std::printf("  fit c = (%.9f, %.9f) relative residual %.3e\n", c.real(),
                    c.imag(), res);
        return c;
    };

    std::printf("B(blk0) vs b(blk1), degree 2:\n");
    ratio(connes_B(blk0), hochschild_b(blk1), 2);
    std::printf("B(blk1) vs b(blk2), degree 4:\n");
    ratio(connes_B(blk1), hochschild_b(blk2), 4);

    // is b(blk0) = 0 (degree-0 check) ?
    std::printf("|b(blk0)| deg0 = %g\n",
                dense_component(hochschild_b(blk0), 0).norm());
    std::printf("|b(blk1)| deg2 vs B-part above shows the matching k-ratio\n");
    return 0;
}
