// probe: alternating elementary tensors z_k = u^{-1} du du^{-1} du ...
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

    auto zterm = [&](int k) {
        // degree 2k+1: slots alternate u, u^{-1}, u, ..., ending with u
        NCForm f(M2, N);
        FormTerm t;
        t.slot0 = VectorXcd::Zero(5);
        t.slot0.head(4) = uinv.coeffs;
        for (int j = 0; j < 2 * k + 1; ++j)
            t.slots.push_back(j % 2 == 0 ? u.coeffs : uinv.coeffs);
        f.add_term(std::move(t));
        return f;
    };

    for (int k = 0; k <= 2; ++k) {
        NCForm zk = zterm(k), zk1 = zterm(k + 1);
        NCForm Bz = connes_B(zk);
        NCForm bz = hochschild_b(zk1);
        VectorXcd va = dense_component(Bz, 2 * k + 2);
        VectorXcd vb = dense_component(bz, 2 * k + 2);
        cplx c = va.dot(vb) / va.dot(va);
        double res = (vb - c * va).norm() / vb.norm();
        std::printf("k=%d: b(z_{k+1}) = c * B(z_k), c = (%.9f, %.2e), rel res %.3e\n",
                    k, c.real(), c.imag(), res);
        std::printf("     |b(z_k)| at degree %d = %.3e\n", 2 * k,
                    k == 0 ? dense_component(hochschild_b(zk), 0).norm()
                           : dense_component(hochschild_b(zk), 2 * k).norm());
    }
    return 0;
}
