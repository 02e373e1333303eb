#include "nci/forms.hpp"

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace nci {

using nlohmann::json;

namespace {

constexpr double kDropEps = 0.0; // exact zeros only

bool term_is_zero(const FormTerm& t, double eps) {
    if (t.slot0.cwiseAbs().maxCoeff() <= eps) return true;
    for (const auto& s : t.slots)
        if (s.cwiseAbs().maxCoeff() <= eps) return true;
    return false;
}

// (a + lambda 1) * b for a,b in A: lands in A
VectorXcd mul_plus_left(const FiniteAlgebra& A, const VectorXcd& slot0,
                        const VectorXcd& b) {
    VectorXcd out = A.mul(slot0.head(A.dim()), b);
    out += slot0[A.dim()] * b;
    return out;
}

// b * (a + lambda 1): lands in A
VectorXcd mul_plus_right(const FiniteAlgebra& A, const VectorXcd& b,
                         const VectorXcd& slot0) {
    VectorXcd out = A.mul(b, slot0.head(A.dim()));
    out += slot0[A.dim()] * b;
    return out;
}

// (a + lambda 1)(b + mu 1) in A+
VectorXcd mul_plus_plus(const FiniteAlgebra& A, const VectorXcd& x,
                        const VectorXcd& y) {
    const int d = A.dim();
    VectorXcd out = VectorXcd::Zero(d + 1);
    out.head(d) = A.mul(x.head(d), y.head(d));
    out.head(d) += x[d] * y.head(d) + y[d] * x.head(d);
    out[d] = x[d] * y[d];
    return out;
}

VectorXcd embed_plus(const FiniteAlgebra& A, const VectorXcd& a) {
    VectorXcd out = VectorXcd::Zero(A.dim() + 1);
    out.head(A.dim()) = a;
    return out;
}

VectorXcd adjoined_unit(const FiniteAlgebra& A) {
    return VectorXcd::Unit(A.dim() + 1, A.dim());
}

} // namespace

NCForm::NCForm(AlgebraPtr parent, int top_degree)
    : parent_(std::move(parent)), top_(top_degree) {
    if (top_ < 0) throw ConfigInvalid("negative truncation degree");
}

const std::vector<FormTerm>& NCForm::terms(int degree) const {
    static const std::vector<FormTerm> empty;
    auto it = comp_.find(degree);
    return it == comp_.end() ? empty : it->second;
}

bool NCForm::degree_empty(int degree) const {
    return terms(degree).empty();
}

std::vector<int> NCForm::active_degrees() const {
    std::vector<int> out;
    for (auto& [deg, ts] : comp_)
        if (!ts.empty()) out.push_back(deg);
    return out;
}

void NCForm::add_term(FormTerm t) {
    if (term_is_zero(t, kDropEps)) return;
    const int deg = t.degree();
    if (deg > top_) {
        truncation_loss_ = true;
        return;
    }
    comp_[deg].push_back(std::move(t));
}

void NCForm::add(const NCForm& other, cplx coeff) {
    if (other.parent_.get() != parent_.get()) throw ParentMismatch();
    truncation_loss_ = truncation_loss_ || other.truncation_loss_;
    for (auto deg : other.active_degrees())
        for (FormTerm t : other.terms(deg)) {
            t.slot0 *= coeff;
            add_term(std::move(t));
        }
}

void NCForm::prune(double eps) {
    for (auto& [deg, ts] : comp_) {
        std::vector<FormTerm> kept;
        for (auto& t : ts)
            if (!term_is_zero(t, eps)) kept.push_back(std::move(t));
        ts = std::move(kept);
    }
}

NCForm form_from_element(const AlgebraElement& a, int top_degree) {
    NCForm x(a.parent, top_degree);
    FormTerm t;
    t.slot0 = embed_plus(*a.parent, a.coeffs);
    x.add_term(std::move(t));
    return x;
}

FormTerm term_from_elements(const std::vector<AlgebraElement>& a,
                            bool leading_unit) {
    if (a.empty()) throw ConfigInvalid("empty term");
    const auto& A = *a.front().parent;
    FormTerm t;
    size_t k = 0;
    if (leading_unit) {
        t.slot0 = adjoined_unit(A);
    } else {
        t.slot0 = embed_plus(A, a[0].coeffs);
        k = 1;
    }
    for (; k < a.size(); ++k) {
        if (a[k].parent.get() != a.front().parent.get()) throw ParentMismatch();
        t.slots.push_back(a[k].coeffs);
    }
    return t;
}

NCForm d(const NCForm& x) {
    const auto& A = *x.parent();
    NCForm out(x.parent(), x.top_degree());
    if (x.truncation_loss()) out.flag_truncation();
    for (int deg : x.active_degrees())
        for (const auto& t : x.terms(deg)) {
            VectorXcd apart = t.slot0.head(A.dim());
            if (apart.cwiseAbs().maxCoeff() == 0.0) continue;
            FormTerm nt;
            nt.slot0 = adjoined_unit(A);
            nt.slots.reserve(t.slots.size() + 1);
            nt.slots.push_back(apart);
            for (const auto& s : t.slots) nt.slots.push_back(s);
            out.add_term(std::move(nt));
        }
    return out;
}

NCForm hochschild_b(const NCForm& x) {
    const auto& A = *x.parent();
    NCForm out(x.parent(), x.top_degree());
    if (x.truncation_loss()) out.flag_truncation();
    for (int deg : x.active_degrees()) {
        if (deg == 0) continue;
        for (const auto& t : x.terms(deg)) {
            const int n = deg;
            // i = 0: (a0 a1) x ... x an
            {
                FormTerm nt;
                nt.slot0 = embed_plus(A, mul_plus_left(A, t.slot0, t.slots[0]));
                nt.slots.assign(t.slots.begin() + 1, t.slots.end());
                out.add_term(std::move(nt));
            }
            // 1 <= i <= n-1: merge slots i, i+1
            double sign = -1.0;
            for (int i = 1; i <= n - 1; ++i, sign = -sign) {
                FormTerm nt;
                nt.slot0 = sign * t.slot0;
                for (int j = 0; j < i - 1; ++j) nt.slots.push_back(t.slots[j]);
                nt.slots.push_back(A.mul(t.slots[i - 1], t.slots[i]));
                for (int j = i + 1; j < n; ++j) nt.slots.push_back(t.slots[j]);
                out.add_term(std::move(nt));
            }
            // i = n: (an a0) x a1 ... x a_{n-1}
            {
                FormTerm nt;
                double s = (n % 2 == 0) ? 1.0 : -1.0;
                nt.slot0 =
                    s * embed_plus(A, mul_plus_right(A, t.slots[n - 1], t.slot0));
                nt.slots.assign(t.slots.begin(), t.slots.end() - 1);
                out.add_term(std::move(nt));
            }
        }
    }
    return out;
}

NCForm connes_B(const NCForm& x) {
    const auto& A = *x.parent();
    NCForm out(x.parent(), x.top_degree());
    if (x.truncation_loss()) out.flag_truncation();
    for (int deg : x.active_degrees())
        for (const auto& t : x.terms(deg)) {
            VectorXcd apart = t.slot0.head(A.dim());
            if (apart.cwiseAbs().maxCoeff() == 0.0) continue;
            const int n = deg;
            for (int i = 0; i <= n; ++i) {
                FormTerm nt;
                double sign = (n * i) % 2 == 0 ? 1.0 : -1.0;
                nt.slot0 = sign * adjoined_unit(A);
                // slots: a_i .. a_n, a0, a_1 .. a_{i-1}
                for (int j = i; j <= n; ++j)
                    nt.slots.push_back(j == 0 ? apart : t.slots[j - 1]);
                for (int j = 0; j < i; ++j)
                    nt.slots.push_back(j == 0 ? apart : t.slots[j - 1]);
                out.add_term(std::move(nt));
            }
        }
    return out;
}

NCForm b_plus_B(const NCForm& x) {
    NCForm out = hochschild_b(x);
    out.add(connes_B(x));
    return out;
}

namespace {

// right multiplication of a single term by a 0-form in A (Leibniz)
void right_mul_A(const FiniteAlgebra& A, const FormTerm& t, const VectorXcd& b,
                 cplx coeff, std::vector<FormTerm>& out) {
    const int n = t.degree();
    if (n == 0) {
        FormTerm nt;
        nt.slot0 = coeff * embed_plus(A, mul_plus_left(A, t.slot0, b));
        out.push_back(std::move(nt));
        return;
    }
    // (w d a_n) b = w d(a_n b) - (w a_n) d b
    {
        FormTerm nt = t;
        nt.slots[n - 1] = A.mul(t.slots[n - 1], b);
        nt.slot0 *= coeff;
        out.push_back(std::move(nt));
    }
    FormTerm head;
    head.slot0 = t.slot0;
    head.slots.assign(t.slots.begin(), t.slots.end() - 1);
    std::vector<FormTerm> inner;
    right_mul_A(A, head, t.slots[n - 1], -coeff, inner);
    for (auto& w : inner) {
        w.slots.push_back(b);
        out.push_back(std::move(w));
    }
}

} // namespace

NCForm mul(const NCForm& x, const NCForm& y) {
    if (x.parent().get() != y.parent().get()) throw ParentMismatch();
    const auto& A = *x.parent();
    NCForm out(x.parent(), std::min(x.top_degree(), y.top_degree()));
    if (x.truncation_loss() || y.truncation_loss()) out.flag_truncation();
    for (int dx : x.active_degrees())
        for (const auto& s : x.terms(dx))
            for (int dy : y.active_degrees())
                for (const auto& t : y.terms(dy)) {
                    // t = (b0 + mu 1) d b1 ... d bn
                    const cplx mu = t.slot0[A.dim()];
                    std::vector<FormTerm> zs;
                    VectorXcd b0 = t.slot0.head(A.dim());
                    if (b0.cwiseAbs().maxCoeff() != 0.0)
                        right_mul_A(A, s, b0, 1.0, zs);
                    if (mu != cplx(0, 0)) {
                        FormTerm copy = s;
                        copy.slot0 *= mu;
                        zs.push_back(std::move(copy));
                    }
                    for (auto& z : zs) {
                        for (const auto& sl : t.slots) z.slots.push_back(sl);
                        out.add_term(std::move(z));
                    }
                }
    return out;
}

NCForm chern_idempotent(const AlgebraElement& e, int top_degree) {
    const auto& A = *e.parent;
    double resid =
        (A.mul(e.coeffs, e.coeffs) - e.coeffs).cwiseAbs().maxCoeff();
    if (resid > Tol::idempotent)
        throw NotIdempotent("idempotency residual " + std::to_string(resid));
    NCForm out(e.parent, top_degree);
    {
        FormTerm t0;
        t0.slot0 = embed_plus(A, e.coeffs);
        out.add_term(std::move(t0));
    }
    double coeff = 1.0;
    for (int k = 1; 2 * k <= top_degree; ++k) {
        // (-1)^k (2k)!/k! (e - 1/2)(de)^{2k}
        coeff *= -(2.0 * k) * (2.0 * k - 1.0) / (double)k;
        FormTerm t;
        t.slot0 = embed_plus(A, e.coeffs) - 0.5 * adjoined_unit(A);
        t.slot0 *= coeff;
        t.slots.assign(2 * k, e.coeffs);
        out.add_term(std::move(t));
    }
    return out;
}

NCForm chern_invertible(const AlgebraElement& u, int top_degree) {
    const auto& A = *u.parent;
    NCForm out(u.parent, top_degree);
    if (A.has_unit() &&
        (u.coeffs - A.unit_coeffs()).cwiseAbs().maxCoeff() < 1e-14)
        return out; // trivial class
    AlgebraElement uinv = invert(u);
    const cplx scale = 1.0 / std::sqrt(cplx(0.0, 2.0 * M_PI));

    NCForm f1(u.parent, top_degree); // u^{-1} du
    {
        FormTerm t;
        t.slot0 = embed_plus(A, uinv.coeffs);
        t.slots.push_back(u.coeffs);
        f1.add_term(std::move(t));
    }
    NCForm g(u.parent, top_degree); // du u^{-1} du
    {
        NCForm du(u.parent, top_degree);
        FormTerm t;
        t.slot0 = adjoined_unit(A);
        t.slots.push_back(u.coeffs);
        du.add_term(std::move(t));
        g = mul(du, f1);
    }
    NCForm block = f1;
    double kfact = 1.0;
    for (int k = 0; 2 * k + 1 <= top_degree; ++k) {
        if (k > 0) {
            kfact *= k;
            block = mul(block, g);
        }
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out.add(block, scale * sign * kfact);
    }
    out.prune();
    return out;
}

namespace {

using lcplx = std::complex<long double>;

lcplx slot_inner_ld(const VectorXcd& a, const VectorXcd& b) {
    lcplx acc(0, 0);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        acc += lcplx(std::conj(a[i])) * lcplx(b[i]);
    return acc;
}

} // namespace

NCForm normalized_projection(const NCForm& x) {
    const auto& A = *x.parent();
    if (!A.has_unit()) return x;
    const VectorXcd& u = A.unit_coeffs();
    const double un2 = u.squaredNorm();
    NCForm out(x.parent(), x.top_degree());
    if (x.truncation_loss()) out.flag_truncation();
    for (int deg : x.active_degrees())
        for (FormTerm t : x.terms(deg)) {
            bool dead = false;
            for (auto& s : t.slots) {
                s -= (u.dot(s) / un2) * u;
                if (s.cwiseAbs().maxCoeff() < 1e-15) {
                    dead = true;
                    break;
                }
            }
            if (!dead) out.add_term(std::move(t));
        }
    return out;
}

cplx component_inner(const NCForm& x, const NCForm& y, int degree) {
    // extended precision: cancellation between separable terms is the
    // whole content of the cycle/identity residuals measured with this
    lcplx acc(0, 0);
    for (const auto& s : x.terms(degree))
        for (const auto& t : y.terms(degree)) {
            lcplx v = slot_inner_ld(s.slot0, t.slot0);
            for (size_t i = 0; i < s.slots.size(); ++i)
                v *= slot_inner_ld(s.slots[i], t.slots[i]);
            acc += v;
        }
    return cplx((double)acc.real(), (double)acc.imag());
}

double component_norm(const NCForm& x, int degree) {
    double v = component_inner(x, x, degree).real();
    return std::sqrt(std::max(0.0, v));
}

double reduced_component_norm(const NCForm& x, int degree) {
    // exact l2 norm through per-position orthonormal slot bases; intended
    // for structured chains whose slots span low-dimensional subspaces
    const auto& ts = x.terms(degree);
    if (ts.empty()) return 0.0;
    const int npos = degree + 1;
    std::vector<MatrixXcd> bases(npos);
    std::vector<Eigen::Index> ranks(npos);
    for (int j = 0; j < npos; ++j) {
        Eigen::Index len = j == 0 ? ts[0].slot0.size() : ts[0].slots[0].size();
        MatrixXcd M(len, (Eigen::Index)ts.size());
        for (size_t t = 0; t < ts.size(); ++t)
            M.col((Eigen::Index)t) = j == 0 ? ts[t].slot0 : ts[t].slots[j - 1];
        Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeThinU);
        double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (top > 0 && svd.singularValues()[i] > 1e-14 * top) ++r;
        ranks[j] = std::max<Eigen::Index>(r, 1);
        bases[j] = svd.matrixU().leftCols(ranks[j]);
    }
    size_t total = 1;
    for (int j = 0; j < npos; ++j) {
        total *= (size_t)ranks[j];
        if (total > (1u << 26)) throw ConfigInvalid("reduced basis too large");
    }
    std::vector<lcplx> acc(total, lcplx(0, 0));
    std::vector<lcplx> buf1(total), buf2(total);
    for (const auto& t : ts) {
        size_t cur = (size_t)ranks[0];
        VectorXcd c0 = bases[0].adjoint() * t.slot0;
        for (size_t i = 0; i < cur; ++i) buf1[i] = lcplx(c0[(Eigen::Index)i]);
        for (int j = 1; j < npos; ++j) {
            VectorXcd cj = bases[j].adjoint() * t.slots[j - 1];
            size_t next = cur * (size_t)ranks[j];
            for (size_t i = 0; i < cur; ++i)
                for (Eigen::Index q = 0; q < ranks[j]; ++q)
                    buf2[i * (size_t)ranks[j] + (size_t)q] =
                        buf1[i] * lcplx(cj[q]);
            std::swap(buf1, buf2);
            cur = next;
        }
        for (size_t i = 0; i < cur; ++i) acc[i] += buf1[i];
    }
    long double nn = 0;
    for (const auto& v : acc) nn += v.real() * v.real() + v.imag() * v.imag();
    return std::sqrt((double)nn);
}

double total_norm(const NCForm& x) {
    double acc = 0.0;
    for (int deg : x.active_degrees()) acc += sq(component_norm(x, deg));
    return std::sqrt(acc);
}

VectorXcd dense_component(const NCForm& x, int degree, size_t cap) {
    const auto& A = *x.parent();
    const size_t dim = (size_t)A.dim();
    size_t len = degree == 0 ? dim : dim + 1;
    for (int i = 0; i < degree; ++i) {
        if (len > cap / dim) throw ConfigInvalid("dense expansion too large");
        len *= dim;
    }
    VectorXcd out = VectorXcd::Zero((Eigen::Index)len);
    for (const auto& t : x.terms(degree)) {
        VectorXcd acc;
        if (degree == 0) {
            acc = t.slot0.head(A.dim());
        } else {
            acc = t.slot0;
            for (const auto& s : t.slots) {
                VectorXcd next((Eigen::Index)(acc.size() * s.size()));
                for (Eigen::Index i = 0; i < acc.size(); ++i)
                    next.segment(i * s.size(), s.size()) = acc[i] * s;
                acc = std::move(next);
            }
        }
        out += acc;
    }
    return out;
}

double residual_maxabs(const NCForm& x, int probes, std::mt19937_64& rng,
                       size_t dense_cap) {
    const auto& A = *x.parent();
    const size_t dim = (size_t)A.dim();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int deg : x.active_degrees()) {
        size_t len = deg == 0 ? dim : dim + 1;
        bool small = true;
        for (int i = 0; i < deg && small; ++i) {
            len *= dim;
            small = len <= dense_cap;
        }
        if (small) {
            worst = std::max(worst,
                             dense_component(x, deg).cwiseAbs().maxCoeff());
            continue;
        }
        for (int pr = 0; pr < probes; ++pr) {
            VectorXcd u0(A.dim() + 1);
            for (int i = 0; i <= A.dim(); ++i) u0[i] = cplx(u(rng), u(rng));
            u0.normalize();
            std::vector<VectorXcd> us(deg);
            for (int j = 0; j < deg; ++j) {
                us[j] = VectorXcd(A.dim());
                for (int i = 0; i < A.dim(); ++i) us[j][i] = cplx(u(rng), u(rng));
                us[j].normalize();
            }
            lcplx acc(0, 0);
            for (const auto& t : x.terms(deg)) {
                lcplx v = slot_inner_ld(u0, t.slot0);
                for (int j = 0; j < deg; ++j)
                    v *= slot_inner_ld(us[j], t.slots[j]);
                acc += v;
            }
            worst = std::max(worst, (double)std::abs(std::complex<double>(
                                        (double)acc.real(), (double)acc.imag())));
        }
    }
    return worst;
}

cplx CochainOnForms::operator()(const NCForm& x) const {
    cplx acc(0, 0);
    for (int deg : x.active_degrees()) {
        bool supported =
            std::find(supported_degrees.begin(), supported_degrees.end(), deg) !=
            supported_degrees.end();
        if (!supported) {
            if (strict && component_norm(x, deg) > 1e-14)
                throw DegreeUnsupported("mass at degree " + std::to_string(deg));
            continue;
        }
        if (strict && (deg % 2) != parity)
            throw DegreeUnsupported("parity mismatch at degree " +
                                    std::to_string(deg));
        for (const auto& t : x.terms(deg)) acc += evaluator(t);
    }
    return acc;
}

cplx pair(const CochainOnForms& phi, const NCForm& x) { return phi(x); }

HomologyRanks bB_homology_ranks(const AlgebraPtr& A, int N, double cutoff) {
    const int dim = A->dim();
    // normalized mixed complex A+ (x) (A/C1)^n; dense enumeration meant
    // for small algebras (the complex of C mostly)
    MatrixXcd comp; // complement of the unit in coefficient space
    int sdim = dim; // slot dimension
    if (A->has_unit()) {
        VectorXcd u = A->unit_coeffs().normalized();
        MatrixXcd M = MatrixXcd::Identity(dim, dim) - u * u.adjoint();
        Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeThinU);
        sdim = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > 0.5) ++sdim;
        comp = svd.matrixU().leftCols(sdim);
    } else {
        comp = MatrixXcd::Identity(dim, dim);
    }

    auto comp_len = [&](int n) -> size_t {
        size_t len = n == 0 ? (size_t)dim : (size_t)dim + 1;
        for (int i = 0; i < n; ++i) len *= (size_t)sdim;
        return len;
    };
    size_t total = 0;
    for (int n = 0; n <= N; ++n) total += comp_len(n);
    if (total > 4096) throw ConfigInvalid("complex too large for dense ranks");

    std::vector<size_t> offset(N + 2, 0);
    for (int n = 0; n <= N; ++n) offset[n + 1] = offset[n] + comp_len(n);

    auto basis_term = [&](int n, size_t flat) {
        FormTerm t;
        if (n == 0) {
            t.slot0 = VectorXcd::Zero(dim + 1);
            t.slot0[(Eigen::Index)flat] = 1.0;
            return t;
        }
        std::vector<int> idx(n + 1);
        for (int j = n; j >= 1; --j) {
            idx[j] = (int)(flat % sdim);
            flat /= sdim;
        }
        idx[0] = (int)flat;
        t.slot0 = VectorXcd::Zero(dim + 1);
        t.slot0[idx[0]] = 1.0;
        for (int j = 1; j <= n; ++j) t.slots.push_back(comp.col(idx[j]));
        return t;
    };

    // dense coordinates of a normalized component in the complement basis
    auto normalized_dense = [&](const NCForm& y, int m) {
        VectorXcd out = VectorXcd::Zero((Eigen::Index)comp_len(m));
        for (const auto& t : y.terms(m)) {
            VectorXcd acc;
            if (m == 0) {
                acc = t.slot0.head(dim);
            } else {
                acc = t.slot0;
                for (const auto& s : t.slots) {
                    VectorXcd cs = comp.adjoint() * s;
                    VectorXcd next(acc.size() * cs.size());
                    for (Eigen::Index i = 0; i < acc.size(); ++i)
                        next.segment(i * cs.size(), cs.size()) = acc[i] * cs;
                    acc = std::move(next);
                }
            }
            out += acc;
        }
        return out;
    };

    MatrixXcd op = MatrixXcd::Zero((Eigen::Index)total, (Eigen::Index)total);
    for (int n = 0; n <= N; ++n)
        for (size_t f = 0; f < comp_len(n); ++f) {
            NCForm x(A, N);
            x.add_term(basis_term(n, f));
            NCForm y = b_plus_B(x);
            for (int m : y.active_degrees()) {
                VectorXcd col = normalized_dense(y, m);
                op.block((Eigen::Index)offset[m], (Eigen::Index)(offset[n] + f),
                         col.size(), 1) = col;
            }
        }

    auto rank_of = [&](const MatrixXcd& M) {
        if (M.size() == 0) return 0;
        Eigen::JacobiSVD<MatrixXcd> svd(M);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv[0] == 0.0) return 0;
        int r = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > cutoff * sv[0]) ++r;
        return r;
    };

    // split into even/odd degree blocks
    std::vector<Eigen::Index> even_idx, odd_idx;
    for (int n = 0; n <= N; ++n)
        for (size_t f = 0; f < comp_len(n); ++f)
            (n % 2 == 0 ? even_idx : odd_idx)
                .push_back((Eigen::Index)(offset[n] + f));
    MatrixXcd Teo((Eigen::Index)odd_idx.size(), (Eigen::Index)even_idx.size());
    MatrixXcd Toe((Eigen::Index)even_idx.size(), (Eigen::Index)odd_idx.size());
    for (size_t c = 0; c < even_idx.size(); ++c)
        for (size_t r = 0; r < odd_idx.size(); ++r)
            Teo((Eigen::Index)r, (Eigen::Index)c) = op(odd_idx[r], even_idx[c]);
    for (size_t c = 0; c < odd_idx.size(); ++c)
        for (size_t r = 0; r < even_idx.size(); ++r)
            Toe((Eigen::Index)r, (Eigen::Index)c) = op(even_idx[r], odd_idx[c]);

    HomologyRanks h;
    h.even = (int)even_idx.size() - rank_of(Teo) - rank_of(Toe);
    h.odd = (int)odd_idx.size() - rank_of(Toe) - rank_of(Teo);
    return h;
}

namespace {

// unit-normalized slots keep identity residuals scale-free
FormTerm random_term(const AlgebraPtr& A, int degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FormTerm t;
    t.slot0 = VectorXcd::Zero(A->dim() + 1);
    for (int i = 0; i < A->dim() + (degree == 0 ? 0 : 1); ++i)
        t.slot0[i] = cplx(u(rng), u(rng));
    t.slot0.normalize();
    for (int j = 0; j < degree; ++j) {
        VectorXcd s(A->dim());
        for (int i = 0; i < A->dim(); ++i) s[i] = cplx(u(rng), u(rng));
        s.normalize();
        t.slots.push_back(std::move(s));
    }
    return t;
}

} // namespace

NCForm random_form(const AlgebraPtr& A, int top_degree, std::mt19937_64& rng) {
    NCForm out(A, top_degree);
    for (int n = 0; n <= top_degree; ++n)
        out.add_term(random_term(A, n, rng));
    return out;
}

NCForm random_homogeneous_form(const AlgebraPtr& A, int degree, int top_degree,
                               std::mt19937_64& rng) {
    NCForm out(A, top_degree);
    out.add_term(random_term(A, degree, rng));
    return out;
}

std::string form_to_json(const NCForm& x) {
    json j;
    j["top_degree"] = x.top_degree();
    j["truncation_loss"] = x.truncation_loss();
    json comps = json::object();
    for (int deg : x.active_degrees()) {
        VectorXcd dense = dense_component(x, deg, 1u << 22);
        json arr = json::array();
        for (Eigen::Index i = 0; i < dense.size(); ++i)
            arr.push_back(json::array({dense[i].real(), dense[i].imag()}));
        comps[std::to_string(deg)] = arr;
    }
    j["components"] = comps;
    return j.dump();
}

NCForm form_from_json(const AlgebraPtr& A, const std::string& text) {
    json j = json::parse(text);
    NCForm out(A, j.at("top_degree").get<int>());
    const int dim = A->dim();
    for (auto& [key, arr] : j.at("components").items()) {
        const int deg = std::stoi(key);
        size_t expected = deg == 0 ? (size_t)dim : (size_t)dim + 1;
        for (int i = 0; i < deg; ++i) expected *= (size_t)dim;
        if (arr.size() != expected) throw SchemaMismatch("component length");
        for (size_t f = 0; f < arr.size(); ++f) {
            cplx v(arr[f][0].get<double>(), arr[f][1].get<double>());
            if (v == cplx(0, 0)) continue;
            FormTerm t;
            size_t flat = f;
            std::vector<int> idx(deg + 1);
            for (int p = deg; p >= 1; --p) {
                idx[p] = (int)(flat % dim);
                flat /= dim;
            }
            idx[0] = (int)flat;
            t.slot0 = VectorXcd::Zero(dim + 1);
            t.slot0[idx[0]] = v;
            for (int p = 1; p <= deg; ++p)
                t.slots.push_back(VectorXcd::Unit(dim, idx[p]));
            out.add_term(std::move(t));
        }
    }
    if (j.value("truncation_loss", false)) out.flag_truncation();
    return out;
}

} // namespace nci
