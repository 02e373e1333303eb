#include "nci/fredholm.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <cmath>

namespace nci {

using nlohmann::json;

namespace {

double gamma_half(int twice) {
    // Gamma(twice/2) for twice >= 1
    return std::tgamma(0.5 * twice);
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// sign conventions fixed by the transgression experiment (see tests):
// chi^n - chi^{n+2} = s_eta * eta^{n+1} ((b+B) x)  +  s_x * d_X(eta(x))
constexpr double kEtaBoundarySign = 1.0;
constexpr double kXBoundarySign = 1.0;

} // namespace

MatrixXcd FredholmModule::rep_plus(const VectorXcd& plus_coeffs) const {
    MatrixXcd out =
        plus_coeffs[source->dim()] * MatrixXcd::Identity(h_dim, h_dim);
    for (int i = 0; i < source->dim(); ++i)
        if (plus_coeffs[i] != cplx(0, 0)) out += plus_coeffs[i] * rho[i];
    return out;
}

MatrixXcd FredholmModule::rep(const VectorXcd& coeffs) const {
    MatrixXcd out = MatrixXcd::Zero(h_dim, h_dim);
    for (int i = 0; i < source->dim(); ++i)
        if (coeffs[i] != cplx(0, 0)) out += coeffs[i] * rho[i];
    return out;
}

double FredholmModule::involution_residual() const {
    return (F * F - MatrixXcd::Identity(h_dim, h_dim)).cwiseAbs().maxCoeff();
}

double FredholmModule::homomorphism_residual() const {
    double worst = 0.0;
    for (int i = 0; i < source->dim(); ++i)
        for (int j = 0; j < source->dim(); ++j) {
            MatrixXcd prod = rho[i] * rho[j];
            MatrixXcd expect = rep(source->left_regular(i).col(j));
            worst = std::max(worst, (prod - expect).cwiseAbs().maxCoeff());
        }
    return worst;
}

double FredholmModule::grading_residual() const {
    if (parity == Parity::Odd) return 0.0;
    MatrixXcd g = grading.cast<cplx>().asDiagonal();
    double worst = (g * F + F * g).cwiseAbs().maxCoeff();
    for (const auto& r : rho)
        worst = std::max(worst, (g * r - r * g).cwiseAbs().maxCoeff());
    return worst;
}

cplx FredholmModule::supertrace(const MatrixXcd& x) const {
    if (parity == Parity::Even) {
        cplx acc(0, 0);
        for (int i = 0; i < h_dim; ++i) acc += grading[i] * x(i, i);
        return acc;
    }
    return kOddTrace * x.trace();
}

FredholmModule random_dense_module(const AlgebraPtr& A, int copies,
                                   Parity parity, std::mt19937_64& rng) {
    const int k = (int)std::lround(std::sqrt((double)A->dim()));
    if (k * k != A->dim())
        throw ConfigInvalid("random_dense_module expects a matrix algebra");
    const int h = copies * k;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rand_mat = [&](int n) {
        MatrixXcd W(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) W(i, j) = cplx(u(rng), u(rng));
        return W;
    };

    FredholmModule m;
    m.source = A;
    m.h_dim = h;
    m.parity = parity;
    m.p = 1;

    // basis matrices of M_k embedded as `copies` diagonal blocks
    auto embed = [&](int basis_index) {
        const int a = basis_index / k, b = basis_index % k;
        MatrixXcd out = MatrixXcd::Zero(h, h);
        for (int c = 0; c < copies; ++c) out(c * k + a, c * k + b) = 1.0;
        return out;
    };

    MatrixXcd W = MatrixXcd::Identity(h, h) + 0.35 * rand_mat(h);
    MatrixXcd Winv = W.inverse();
    m.rho.resize(A->dim());
    for (int i = 0; i < A->dim(); ++i) m.rho[i] = W * embed(i) * Winv;

    if (parity == Parity::Odd) {
        MatrixXcd Q = rand_mat(h);
        Q = (Q + Q.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Q);
        VectorXd signs(h);
        for (int i = 0; i < h; ++i) signs[i] = es.eigenvalues()[i] >= 0 ? 1 : -1;
        m.F = es.eigenvectors() * signs.cast<cplx>().asDiagonal() *
              es.eigenvectors().adjoint();
    } else {
        if (h % 2 != 0) throw ConfigInvalid("even module needs even h_dim");
        const int hh = h / 2;
        // grading diag(+1,-1); representation must be even, F odd
        m.grading = VectorXd(h);
        m.grading.head(hh).setOnes();
        m.grading.tail(hh).setConstant(-1.0);
        MatrixXcd V = rand_mat(hh);
        Eigen::HouseholderQR<MatrixXcd> qr(V);
        MatrixXcd Uq = qr.householderQ();
        m.F = MatrixXcd::Zero(h, h);
        m.F.topRightCorner(hh, hh) = Uq;
        m.F.bottomLeftCorner(hh, hh) = Uq.adjoint();
        // block-diagonal representation with two different conjugations
        if (hh % k != 0)
            throw ConfigInvalid("copies*k must be even per grading block");
        MatrixXcd Wp = MatrixXcd::Identity(hh, hh) + 0.35 * rand_mat(hh);
        MatrixXcd Wm = MatrixXcd::Identity(hh, hh) + 0.35 * rand_mat(hh);
        MatrixXcd Wpi = Wp.inverse(), Wmi = Wm.inverse();
        auto embed_half = [&](int basis_index) {
            const int a = basis_index / k, b = basis_index % k;
            MatrixXcd out = MatrixXcd::Zero(hh, hh);
            for (int c = 0; c < hh / k; ++c) out(c * k + a, c * k + b) = 1.0;
            return out;
        };
        for (int i = 0; i < A->dim(); ++i) {
            m.rho[i] = MatrixXcd::Zero(h, h);
            m.rho[i].topLeftCorner(hh, hh) = Wp * embed_half(i) * Wpi;
            m.rho[i].bottomRightCorner(hh, hh) = Wm * embed_half(i) * Wmi;
        }
    }
    return m;
}

// ---------------------------------------------------------------------
// word evaluators

cplx chi0_word(int n, const FredholmModule& m,
               const std::vector<MatrixXcd>& slots) {
    if ((int)slots.size() != n + 1) throw ConfigInvalid("chi0 slot count");
    if (n < m.p) throw SummabilityViolation();
    if ((n % 2 == 0) != (m.parity == Parity::Even)) throw ParityMismatch();
    std::vector<MatrixXcd> comm(n + 1);
    for (int i = 0; i <= n; ++i) comm[i] = m.F * slots[i] - slots[i] * m.F;
    cplx acc(0, 0);
    for (int r = 0; r <= n; ++r) {
        MatrixXcd w = slots[r];
        for (int j = 1; j <= n; ++j) w = w * comm[(r + j) % (n + 1)];
        double sign = ((r * n) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * m.supertrace(w);
    }
    double pref = ((n % 2 == 0) ? 1.0 : -1.0) * gamma_half(n + 2) /
                  factorial(n + 1);
    return pref * acc;
}

cplx eta0_word(int n, const FredholmModule& m,
               const std::vector<MatrixXcd>& slots) {
    if ((int)slots.size() != n + 2) throw ConfigInvalid("eta0 slot count");
    std::vector<MatrixXcd> comm(n + 2);
    for (int i = 1; i <= n + 1; ++i) comm[i] = m.F * slots[i] - slots[i] * m.F;
    MatrixXcd Fx0 = m.F * slots[0];
    // i = 0 arrangement: F x0 [F,x1] ... [F,x_{n+1}]
    MatrixXcd w = Fx0;
    for (int i = 1; i <= n + 1; ++i) w = w * comm[i];
    cplx acc = m.supertrace(w);
    for (int i = 1; i <= n + 1; ++i) {
        MatrixXcd v = comm[i];
        for (int j = i + 1; j <= n + 1; ++j) v = v * comm[j];
        v = v * Fx0;
        for (int j = 1; j <= i - 1; ++j) v = v * comm[j];
        double sign = (((n + 1) * i) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * m.supertrace(v);
    }
    double pref = gamma_half(n + 2) / factorial(n + 2) * 0.5;
    return pref * acc;
}

cplx chi1_word_scalar(int, const FredholmModule&,
                      const std::vector<MatrixXcd>&) {
    return cplx(0, 0); // Omega^1 C_natural = 0
}

namespace {

std::vector<MatrixXcd> term_slots(const FredholmModule& m, const FormTerm& t) {
    std::vector<MatrixXcd> slots;
    slots.push_back(m.rep_plus(t.slot0));
    for (const auto& s : t.slots) slots.push_back(m.rep(s));
    return slots;
}

} // namespace

cplx chi_scalar(int n, const FredholmModule& m, const NCForm& x) {
    cplx acc(0, 0);
    for (const auto& t : x.terms(n)) acc += chi0_word(n, m, term_slots(m, t));
    return acc;
}

cplx eta_scalar(int n_plus_1, const FredholmModule& m, const NCForm& x) {
    const int n = n_plus_1 - 1;
    cplx acc(0, 0);
    for (const auto& t : x.terms(n + 1)) acc += eta0_word(n, m, term_slots(m, t));
    return acc;
}

static AlgebraPtr scalar_target() {
    static AlgebraPtr C = make_matrix_algebra(1);
    return C;
}

XValue chi_even(int n, const FredholmModule& m, const NCForm& x) {
    XValue v;
    v.target = scalar_target();
    v.even = VectorXcd::Zero(1);
    v.even[0] = chi_scalar(n, m, x);
    v.odd = VectorXcd::Zero(0);
    return v;
}

XValue eta(int n_plus_1, const FredholmModule& m, const NCForm& x) {
    XValue v;
    v.target = scalar_target();
    v.even = VectorXcd::Zero(1);
    v.even[0] = eta_scalar(n_plus_1, m, x);
    v.odd = VectorXcd::Zero(0);
    return v;
}

double transgression_check(int n, const FredholmModule& m, int trials,
                           uint64_t seed) {
    if (n < m.p) throw SummabilityViolation();
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const int N = n + 4;
    for (int t = 0; t < trials; ++t) {
        for (int deg = n; deg <= n + 3; ++deg) {
            NCForm x = random_homogeneous_form(m.source, deg, N, rng);
            cplx lhs = chi_scalar(n, m, x) - chi_scalar(n + 2, m, x);
            NCForm bx = b_plus_B(x);
            cplx rhs = kEtaBoundarySign * eta_scalar(n + 1, m, bx);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

double cocycle_check(int n, const FredholmModule& m, int trials,
                     uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const int N = n + 3;
    for (int t = 0; t < trials; ++t)
        for (int deg = std::max(0, n - 1); deg <= n + 1; ++deg) {
            NCForm x = random_homogeneous_form(m.source, deg, N, rng);
            worst = std::max(worst, std::abs(chi_scalar(n, m, b_plus_B(x))));
        }
    return worst;
}

cplx index_pairing(const FredholmModule& m, const AlgebraElement& k_class,
                   KClassKind kind) {
    if ((kind == KClassKind::Idempotent) != (m.parity == Parity::Even))
        throw ParityMismatch("class kind must match module parity");
    int n = m.p;
    const int want = m.parity == Parity::Even ? 0 : 1;
    if (n % 2 != want) ++n;
    NCForm ch = kind == KClassKind::Idempotent
                    ? chern_idempotent(k_class, n + 1)
                    : chern_invertible(k_class, n + 1);
    return chi_scalar(n, m, ch);
}

// ---------------------------------------------------------------------
// circle model

ToeplitzModel toeplitz_model(int M) {
    ToeplitzModel t;
    t.M = M;
    t.F = CircleOperator::sign_dirac().window(M);
    return t;
}

FredholmModule ToeplitzModel::as_module() const {
    FredholmModule m;
    m.source = make_matrix_algebra(1);
    m.h_dim = 2 * M + 1;
    m.parity = Parity::Odd;
    m.p = 1;
    m.rho = {MatrixXcd::Identity(m.h_dim, m.h_dim)};
    m.F = F;
    return m;
}

std::vector<MatrixXcd> window_slots(const LaurentTerm& t, int M) {
    std::vector<MatrixXcd> slots;
    MatrixXcd p0 = window_matrix(t.s0, M);
    if (t.unit0 != cplx(0, 0))
        p0 += t.unit0 * MatrixXcd::Identity(2 * M + 1, 2 * M + 1);
    slots.push_back(std::move(p0));
    for (const auto& s : t.slots) slots.push_back(window_matrix(s, M));
    return slots;
}

cplx toeplitz_chi_pairing(int k, int n, int M) {
    if (n % 2 != 1) throw ParityMismatch("circle model is odd");
    const int needed = 2 * (std::abs(k) * (n + 1)) + 4;
    if (2 * M + 1 < needed)
        throw ConfigInvalid("window too small for exact evaluation");
    LaurentForm ch = chern_winding(k, n);
    FredholmModule m = toeplitz_model(M).as_module();
    cplx acc(0, 0);
    for (const auto& t : ch.terms) {
        if (t.degree() != n) continue;
        acc += chi0_word(n, m, window_slots(t, M));
    }
    return acc;
}

int hardy_kernel_index(const MatrixXcd& T, const MatrixXcd& Tstar,
                       double cutoff) {
    auto nullity = [&](const MatrixXcd& A) {
        Eigen::JacobiSVD<MatrixXcd> svd(A);
        const auto& sv = svd.singularValues();
        double top = sv.size() ? std::max(sv[0], 1.0) : 1.0;
        int null_count = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            double rel = sv[i] / top;
            if (rel > cutoff * 0.1 && rel < cutoff * 10.0)
                throw IllConditioned("singular value at the rank cutoff");
            if (rel <= cutoff) ++null_count;
        }
        null_count += (int)A.cols() - (int)sv.size();
        return null_count;
    };
    return nullity(T) - nullity(Tstar);
}

int toeplitz_index_oracle(int k, int M) {
    // T = P u P on Hardy modes, u = z^k; kernels of T and T* are exactly
    // supported in the window for monomial symbols
    const int dmax = std::abs(k);
    const int cols = M + 1, rows = M + 1 + dmax;
    MatrixXcd T = MatrixXcd::Zero(rows, cols);
    MatrixXcd Ts = MatrixXcd::Zero(rows, cols);
    for (int j = 0; j < cols; ++j) {
        if (j + k >= 0) T(j + k, j) = 1.0;
        if (j - k >= 0) Ts(j - k, j) = 1.0;
    }
    return hardy_kernel_index(T, Ts);
}

int shift_block_index_oracle(int rank, int M, int shift) {
    const int dmax = std::abs(shift);
    const int cols = M + 1, rows = M + 1 + dmax;
    MatrixXcd S = MatrixXcd::Zero(rows, cols);
    MatrixXcd Ss = MatrixXcd::Zero(rows, cols);
    for (int j = 0; j < cols; ++j) {
        if (j + shift >= 0) S(j + shift, j) = 1.0;
        if (j - shift >= 0) Ss(j - shift, j) = 1.0;
    }
    MatrixXcd T = MatrixXcd::Zero(rows * rank, cols * rank);
    MatrixXcd Ts = MatrixXcd::Zero(rows * rank, cols * rank);
    for (int b = 0; b < rank; ++b) {
        T.block(b * rows, b * cols, rows, cols) = S;
        Ts.block(b * rows, b * cols, rows, cols) = Ss;
    }
    return hardy_kernel_index(T, Ts);
}

std::vector<double> commutator_schatten_sums(const FredholmModule& m,
                                             const MatrixXcd& a, double p) {
    MatrixXcd c = m.F * a - a * m.F;
    Eigen::JacobiSVD<MatrixXcd> svd(c);
    std::vector<double> out;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        acc += std::pow(svd.singularValues()[i], p);
        out.push_back(acc);
    }
    return out;
}

// ---------------------------------------------------------------------
// JSON

FredholmModule module_from_json(const AlgebraPtr& A, const std::string& text) {
    json j = json::parse(text);
    FredholmModule m;
    m.source = A;
    m.h_dim = j.at("h_dim").get<int>();
    m.parity = j.at("parity").get<std::string>() == "even" ? Parity::Even
                                                            : Parity::Odd;
    m.p = j.at("p").get<int>();
    auto mat_from = [&](const json& mj) {
        MatrixXcd M(m.h_dim, m.h_dim);
        for (int r = 0; r < m.h_dim; ++r)
            for (int c = 0; c < m.h_dim; ++c)
                M(r, c) = cplx(mj.at(r).at(c).at(0).get<double>(),
                               mj.at(r).at(c).at(1).get<double>());
        return M;
    };
    for (const auto& rj : j.at("rho")) m.rho.push_back(mat_from(rj));
    if ((int)m.rho.size() != A->dim())
        throw SchemaMismatch("rho entry count != source dim");
    m.F = mat_from(j.at("F"));
    if (m.parity == Parity::Even) {
        m.grading = VectorXd(m.h_dim);
        for (int i = 0; i < m.h_dim; ++i)
            m.grading[i] = j.at("grading").at(i).get<double>();
    }
    return m;
}

std::string module_to_json(const FredholmModule& m) {
    json j;
    j["h_dim"] = m.h_dim;
    j["parity"] = m.parity == Parity::Even ? "even" : "odd";
    j["p"] = m.p;
    auto mat_to = [&](const MatrixXcd& M) {
        json out = json::array();
        for (int r = 0; r < M.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < M.cols(); ++c)
                row.push_back(json::array({M(r, c).real(), M(r, c).imag()}));
            out.push_back(row);
        }
        return out;
    };
    json rho = json::array();
    for (const auto& r : m.rho) rho.push_back(mat_to(r));
    j["rho"] = rho;
    j["F"] = mat_to(m.F);
    if (m.parity == Parity::Even) {
        json g = json::array();
        for (int i = 0; i < m.h_dim; ++i) g.push_back(m.grading[i]);
        j["grading"] = g;
    }
    return j.dump();
}

// ---------------------------------------------------------------------
// bivariant path

namespace {

struct RAlg {
    const FiniteAlgebra* R;
    int dim;

    // (a + alpha 1)(b + beta 1) in R+
    VectorXcd mulpp(const VectorXcd& a, const VectorXcd& b) const {
        VectorXcd out = VectorXcd::Zero(dim + 1);
        out.head(dim) = R->mul(a.head(dim), b.head(dim));
        out.head(dim) += a[dim] * b.head(dim) + b[dim] * a.head(dim);
        out[dim] = a[dim] * b[dim];
        return out;
    }
};

// h x h matrix with entries in R+
struct RMat {
    int h = 0;
    int dimR = 0;
    std::vector<VectorXcd> e; // h*h entries, each length dimR+1

    static RMat zero(int h, int dimR) {
        RMat m;
        m.h = h;
        m.dimR = dimR;
        m.e.assign((size_t)h * h, VectorXcd::Zero(dimR + 1));
        return m;
    }
    VectorXcd& at(int r, int c) { return e[(size_t)r * h + c]; }
    const VectorXcd& at(int r, int c) const { return e[(size_t)r * h + c]; }
};

RMat rmat_mul(const RAlg& A, const RMat& x, const RMat& y) {
    RMat out = RMat::zero(x.h, x.dimR);
    for (int r = 0; r < x.h; ++r)
        for (int m = 0; m < x.h; ++m) {
            if (x.at(r, m).isZero(0)) continue;
            for (int c = 0; c < x.h; ++c) {
                if (y.at(m, c).isZero(0)) continue;
                out.at(r, c) += A.mulpp(x.at(r, m), y.at(m, c));
            }
        }
    return out;
}

RMat rmat_scalar_left(const MatrixXcd& s, const RMat& x) {
    RMat out = RMat::zero(x.h, x.dimR);
    for (int r = 0; r < x.h; ++r)
        for (int m = 0; m < x.h; ++m) {
            if (s(r, m) == cplx(0, 0)) continue;
            for (int c = 0; c < x.h; ++c) out.at(r, c) += s(r, m) * x.at(m, c);
        }
    return out;
}

RMat rmat_scalar_right(const RMat& x, const MatrixXcd& s) {
    RMat out = RMat::zero(x.h, x.dimR);
    for (int m = 0; m < x.h; ++m)
        for (int c = 0; c < x.h; ++c) {
            if (s(m, c) == cplx(0, 0)) continue;
            for (int r = 0; r < x.h; ++r) out.at(r, c) += s(m, c) * x.at(r, m);
        }
    return out;
}

RMat rmat_sub(const RMat& a, const RMat& b) {
    RMat out = a;
    for (size_t i = 0; i < out.e.size(); ++i) out.e[i] -= b.e[i];
    return out;
}

// supertrace into R+ coefficients
VectorXcd rmat_supertrace(const VectorXd& grading, const RMat& x) {
    VectorXcd acc = VectorXcd::Zero(x.dimR + 1);
    for (int i = 0; i < x.h; ++i) acc += grading[i] * x.at(i, i);
    return acc;
}

VectorXcd to_R(const FiniteAlgebra& R, const VectorXcd& plus) {
    VectorXcd out = plus.head(R.dim());
    if (plus[R.dim()] != cplx(0, 0)) {
        if (!R.has_unit()) throw ConfigInvalid("target needs a unit");
        out += plus[R.dim()] * R.unit_coeffs();
    }
    return out;
}

// h x h matrix with entries in Omega^1 R (flattened (dimR+1) x dimR)
struct O1Mat {
    int h = 0;
    int dimR = 0;
    std::vector<VectorXcd> e;

    static O1Mat zero(int h, int dimR) {
        O1Mat m;
        m.h = h;
        m.dimR = dimR;
        m.e.assign((size_t)h * h, VectorXcd::Zero((dimR + 1) * dimR));
        return m;
    }
    VectorXcd& at(int r, int c) { return e[(size_t)r * h + c]; }
    const VectorXcd& at(int r, int c) const { return e[(size_t)r * h + c]; }
};

// a . (r ds) = (a r) ds
VectorXcd o1_left(const RAlg& A, const VectorXcd& a, const VectorXcd& w) {
    const int dR = A.dim;
    VectorXcd out = VectorXcd::Zero((dR + 1) * dR);
    for (int i = 0; i <= dR; ++i) {
        VectorXcd ei = VectorXcd::Zero(dR + 1);
        ei[i] = 1.0;
        VectorXcd aei = A.mulpp(a, ei);
        for (int j = 0; j < dR; ++j) {
            cplx c = w[i * dR + j];
            if (c == cplx(0, 0)) continue;
            for (int ii = 0; ii <= dR; ++ii) out[ii * dR + j] += c * aei[ii];
        }
    }
    return out;
}

// (r ds) . b = r d(s b) - (r s) d(b_head)
VectorXcd o1_right(const RAlg& A, const VectorXcd& w, const VectorXcd& b) {
    const int dR = A.dim;
    VectorXcd out = VectorXcd::Zero((dR + 1) * dR);
    for (int i = 0; i <= dR; ++i)
        for (int j = 0; j < dR; ++j) {
            cplx c = w[i * dR + j];
            if (c == cplx(0, 0)) continue;
            // s b: R x R+ -> R
            VectorXcd sj = VectorXcd::Zero(dR);
            sj[j] = 1.0;
            VectorXcd sb = A.R->mul(sj, b.head(dR)) + b[dR] * sj;
            for (int jj = 0; jj < dR; ++jj) out[i * dR + jj] += c * sb[jj];
            // r s in R+
            VectorXcd ri = VectorXcd::Zero(dR + 1);
            ri[i] = 1.0;
            VectorXcd sp = VectorXcd::Zero(dR + 1);
            sp.head(dR) = sj;
            VectorXcd rs = A.mulpp(ri, sp);
            for (int ii = 0; ii <= dR; ++ii)
                for (int jj = 0; jj < dR; ++jj)
                    out[ii * dR + jj] -= c * rs[ii] * b[jj];
        }
    return out;
}

O1Mat o1_from_d(const RMat& x) {
    O1Mat out = O1Mat::zero(x.h, x.dimR);
    for (int r = 0; r < x.h; ++r)
        for (int c = 0; c < x.h; ++c) {
            const VectorXcd& v = x.at(r, c);
            for (int j = 0; j < x.dimR; ++j)
                out.at(r, c)[x.dimR * x.dimR + j] = v[j]; // 1+ d(v_head)
        }
    return out;
}

O1Mat o1_mul_left(const RAlg& A, const RMat& a, const O1Mat& w) {
    O1Mat out = O1Mat::zero(w.h, w.dimR);
    for (int r = 0; r < w.h; ++r)
        for (int m = 0; m < w.h; ++m) {
            if (a.at(r, m).isZero(0)) continue;
            for (int c = 0; c < w.h; ++c) {
                if (w.at(m, c).isZero(0)) continue;
                out.at(r, c) += o1_left(A, a.at(r, m), w.at(m, c));
            }
        }
    return out;
}

O1Mat o1_mul_right(const RAlg& A, const O1Mat& w, const RMat& b) {
    O1Mat out = O1Mat::zero(w.h, w.dimR);
    for (int m = 0; m < w.h; ++m)
        for (int c = 0; c < w.h; ++c) {
            if (b.at(m, c).isZero(0)) continue;
            for (int r = 0; r < w.h; ++r) {
                if (w.at(r, m).isZero(0)) continue;
                out.at(r, c) += o1_right(A, w.at(r, m), b.at(m, c));
            }
        }
    return out;
}

VectorXcd o1_supertrace(const VectorXd& grading, const O1Mat& x) {
    VectorXcd acc = VectorXcd::Zero((x.dimR + 1) * x.dimR);
    for (int i = 0; i < x.h; ++i) acc += grading[i] * x.at(i, i);
    return acc;
}

RMat rep_term_slot0(const BivariantModule& m, const VectorXcd& slot0plus) {
    const int dA = m.source->dim();
    RMat out = RMat::zero(m.h_dim, m.target->dim());
    for (int i = 0; i < dA; ++i) {
        if (slot0plus[i] == cplx(0, 0)) continue;
        for (int r = 0; r < m.h_dim; ++r)
            for (int c = 0; c < m.h_dim; ++c)
                out.at(r, c) += slot0plus[i] * m.rho[i][(size_t)r * m.h_dim + c];
    }
    if (slot0plus[dA] != cplx(0, 0))
        for (int r = 0; r < m.h_dim; ++r)
            out.at(r, r)[m.target->dim()] += slot0plus[dA];
    return out;
}

RMat rep_slot(const BivariantModule& m, const VectorXcd& coeffs) {
    RMat out = RMat::zero(m.h_dim, m.target->dim());
    for (int i = 0; i < m.source->dim(); ++i) {
        if (coeffs[i] == cplx(0, 0)) continue;
        for (int r = 0; r < m.h_dim; ++r)
            for (int c = 0; c < m.h_dim; ++c)
                out.at(r, c) += coeffs[i] * m.rho[i][(size_t)r * m.h_dim + c];
    }
    return out;
}

} // namespace

XComplexOps::XComplexOps(AlgebraPtr target) : target_(std::move(target)) {
    const int dR = target_->dim();
    const Eigen::Index len = (Eigen::Index)(dR + 1) * dR;
    // span of b(Omega^2 R): b(x dy dz) = xy dz - x d(yz) + zx dy
    std::vector<VectorXcd> gens;
    for (int xi = 0; xi <= dR; ++xi)
        for (int yi = 0; yi < dR; ++yi)
            for (int zi = 0; zi < dR; ++zi) {
                VectorXcd g = VectorXcd::Zero(len);
                VectorXcd x = VectorXcd::Zero(dR + 1);
                x[xi] = 1.0;
                VectorXcd y = VectorXcd::Zero(dR);
                y[yi] = 1.0;
                VectorXcd z = VectorXcd::Zero(dR);
                z[zi] = 1.0;
                // xy dz
                VectorXcd xy = target_->mul(x.head(dR), y) + x[dR] * y;
                for (int i = 0; i < dR; ++i) g[i * dR + zi] += xy[i];
                // - x d(yz)
                VectorXcd yz = target_->mul(y, z);
                for (int j = 0; j < dR; ++j) g[xi * dR + j] -= x[xi] * yz[j];
                // zx dy (z in R, x in R+: zx in R)
                VectorXcd zx = target_->mul(z, x.head(dR)) + x[dR] * z;
                for (int i = 0; i < dR; ++i) g[i * dR + yi] += zx[i];
                gens.push_back(std::move(g));
            }
    MatrixXcd S(len, (Eigen::Index)gens.size());
    for (size_t c = 0; c < gens.size(); ++c) S.col((Eigen::Index)c) = gens[c];
    Eigen::JacobiSVD<MatrixXcd> svd(S, Eigen::ComputeThinU);
    double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (top > 0 && svd.singularValues()[i] > 1e-12 * top) ++rank;
    MatrixXcd U1 = svd.matrixU().leftCols(rank);
    P_ = MatrixXcd::Identity(len, len) - U1 * U1.adjoint();
}

VectorXcd XComplexOps::project(const VectorXcd& omega1) const {
    return P_ * omega1;
}

VectorXcd XComplexOps::natural_d(const VectorXcd& r) const {
    const int dR = target_->dim();
    VectorXcd w = VectorXcd::Zero((Eigen::Index)(dR + 1) * dR);
    for (int j = 0; j < dR; ++j) w[dR * dR + j] = r[j];
    return project(w);
}

VectorXcd XComplexOps::bbar(const VectorXcd& omega1) const {
    const int dR = target_->dim();
    VectorXcd out = VectorXcd::Zero(dR);
    for (int i = 0; i <= dR; ++i)
        for (int j = 0; j < dR; ++j) {
            cplx c = omega1[i * dR + j];
            if (c == cplx(0, 0)) continue;
            VectorXcd y = VectorXcd::Zero(dR);
            y[j] = 1.0;
            if (i == dR) continue; // [1, y] = 0
            VectorXcd x = VectorXcd::Zero(dR);
            x[i] = 1.0;
            out += c * (target_->mul(x, y) - target_->mul(y, x));
        }
    return out;
}

namespace {

XValue chi_biv_on_term(int n, const BivariantModule& m, const XComplexOps& xc,
                       const FormTerm& t) {
    const RAlg A{m.target.get(), m.target->dim()};
    XValue out;
    out.target = m.target;
    out.even = VectorXcd::Zero(m.target->dim());
    out.odd = VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                              m.target->dim());
    const int deg = t.degree();
    std::vector<RMat> slots;
    slots.push_back(rep_term_slot0(m, t.slot0));
    for (const auto& s : t.slots) slots.push_back(rep_slot(m, s));

    auto comm = [&](const RMat& x) {
        return rmat_sub(rmat_scalar_left(m.F, x), rmat_scalar_right(x, m.F));
    };

    double pref = ((n % 2 == 0) ? 1.0 : -1.0) * gamma_half(n + 2);
    if (deg == n) {
        std::vector<RMat> c(n + 1);
        for (int i = 0; i <= n; ++i) c[i] = comm(slots[i]);
        VectorXcd acc = VectorXcd::Zero(m.target->dim() + 1);
        for (int r = 0; r <= n; ++r) {
            RMat w = slots[r];
            for (int j = 1; j <= n; ++j) w = rmat_mul(A, w, c[(r + j) % (n + 1)]);
            double sign = ((r * n) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * rmat_supertrace(m.grading, w);
        }
        out.even = (pref / factorial(n + 1)) * to_R(*m.target, acc);
    } else if (deg == n + 1) {
        std::vector<RMat> c(n + 2);
        for (int i = 1; i <= n + 1; ++i) c[i] = comm(slots[i]);
        VectorXcd acc =
            VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                            m.target->dim());
        for (int i = 1; i <= n + 1; ++i) {
            // x0 [F,x1] ... d x_i ... [F,x_{n+1}]
            RMat left = slots[0];
            for (int j = 1; j < i; ++j) left = rmat_mul(A, left, c[j]);
            O1Mat w = o1_from_d(slots[i]);
            w = o1_mul_left(A, left, w);
            for (int j = i + 1; j <= n + 1; ++j) w = o1_mul_right(A, w, c[j]);
            acc += o1_supertrace(m.grading, w);
        }
        out.odd = (pref / factorial(n + 1)) * xc.project(acc);
    }
    return out;
}

XValue eta_biv_on_term(int n, const BivariantModule& m, const XComplexOps& xc,
                       const FormTerm& t) {
    const RAlg A{m.target.get(), m.target->dim()};
    XValue out;
    out.target = m.target;
    out.even = VectorXcd::Zero(m.target->dim());
    out.odd = VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                              m.target->dim());
    const int deg = t.degree();
    std::vector<RMat> slots;
    slots.push_back(rep_term_slot0(m, t.slot0));
    for (const auto& s : t.slots) slots.push_back(rep_slot(m, s));
    auto comm = [&](const RMat& x) {
        return rmat_sub(rmat_scalar_left(m.F, x), rmat_scalar_right(x, m.F));
    };

    if (deg == n + 1) {
        std::vector<RMat> c(n + 2);
        for (int i = 1; i <= n + 1; ++i) c[i] = comm(slots[i]);
        RMat Fx0 = rmat_scalar_left(m.F, slots[0]);
        RMat w = Fx0;
        for (int i = 1; i <= n + 1; ++i) w = rmat_mul(A, w, c[i]);
        VectorXcd acc = rmat_supertrace(m.grading, w);
        for (int i = 1; i <= n + 1; ++i) {
            RMat v = c[i];
            for (int j = i + 1; j <= n + 1; ++j) v = rmat_mul(A, v, c[j]);
            v = rmat_mul(A, v, Fx0);
            for (int j = 1; j <= i - 1; ++j) v = rmat_mul(A, v, c[j]);
            double sign = (((n + 1) * i) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * rmat_supertrace(m.grading, v);
        }
        out.even = (gamma_half(n + 2) / factorial(n + 2) * 0.5) *
                   to_R(*m.target, acc);
    } else if (deg == n + 2) {
        std::vector<RMat> c(n + 3);
        for (int i = 1; i <= n + 2; ++i) c[i] = comm(slots[i]);
        RMat Fx0 = rmat_scalar_left(m.F, slots[0]);
        RMat x0F = rmat_scalar_right(slots[0], m.F);
        VectorXcd acc =
            VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                            m.target->dim());
        for (int i = 1; i <= n + 2; ++i) {
            RMat lead = RMat::zero(m.h_dim, m.target->dim());
            for (size_t q = 0; q < lead.e.size(); ++q)
                lead.e[q] = (double)i * x0F.e[q] +
                            (double)(n + 3 - i) * Fx0.e[q];
            RMat left = lead;
            for (int j = 1; j < i; ++j) left = rmat_mul(A, left, c[j]);
            O1Mat w = o1_from_d(slots[i]);
            w = o1_mul_left(A, left, w);
            for (int j = i + 1; j <= n + 2; ++j) w = o1_mul_right(A, w, c[j]);
            acc += o1_supertrace(m.grading, w);
        }
        out.odd =
            (gamma_half(n + 2) / factorial(n + 3) * 0.5) * xc.project(acc);
    }
    return out;
}

} // namespace

XValue chi_bivariant(int n, const BivariantModule& m, const XComplexOps& xc,
                     const NCForm& x) {
    XValue out;
    out.target = m.target;
    out.even = VectorXcd::Zero(m.target->dim());
    out.odd = VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                              m.target->dim());
    for (int deg : x.active_degrees())
        for (const auto& t : x.terms(deg)) {
            XValue v = chi_biv_on_term(n, m, xc, t);
            out.even += v.even;
            out.odd += v.odd;
        }
    return out;
}

XValue eta_bivariant(int n_plus_1, const BivariantModule& m,
                     const XComplexOps& xc, const NCForm& x) {
    const int n = n_plus_1 - 1;
    XValue out;
    out.target = m.target;
    out.even = VectorXcd::Zero(m.target->dim());
    out.odd = VectorXcd::Zero((Eigen::Index)(m.target->dim() + 1) *
                              m.target->dim());
    for (int deg : x.active_degrees())
        for (const auto& t : x.terms(deg)) {
            XValue v = eta_biv_on_term(n, m, xc, t);
            out.even += v.even;
            out.odd += v.odd;
        }
    return out;
}

double transgression_check_bivariant(int n, const BivariantModule& m,
                                     const XComplexOps& xc, int trials,
                                     uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const int N = n + 4;
    for (int t = 0; t < trials; ++t)
        for (int deg = n; deg <= n + 3; ++deg) {
            NCForm x = random_homogeneous_form(m.source, deg, N, rng);
            XValue lhs_a = chi_bivariant(n, m, xc, x);
            XValue lhs_b = chi_bivariant(n + 2, m, xc, x);
            XValue ex = eta_bivariant(n + 1, m, xc, x);
            XValue ebx = eta_bivariant(n + 1, m, xc, b_plus_B(x));
            VectorXcd even_res = lhs_a.even - lhs_b.even -
                                 kEtaBoundarySign * ebx.even -
                                 kXBoundarySign * xc.bbar(ex.odd);
            VectorXcd odd_res = lhs_a.odd - lhs_b.odd -
                                kEtaBoundarySign * ebx.odd -
                                kXBoundarySign * xc.natural_d(ex.even);
            worst = std::max(worst, even_res.cwiseAbs().maxCoeff());
            worst = std::max(worst, odd_res.cwiseAbs().maxCoeff());
        }
    return worst;
}

} // namespace nci
