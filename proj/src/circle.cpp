#include "nci/circle.hpp"

#include <algorithm>
#include <cmath>

namespace nci {

// ---------------------------------------------------------------------
// Euler-Maclaurin tails

namespace {
const double kBern2j[] = {
    // B_2 .. B_26
    1.0 / 6,           -1.0 / 30,        1.0 / 42,
    -1.0 / 30,         5.0 / 66,         -691.0 / 2730,
    7.0 / 6,           -3617.0 / 510,    43867.0 / 798,
    -174611.0 / 330,   854513.0 / 138,   -236364091.0 / 2730,
    8553103.0 / 6};
constexpr int kEmN = 28;
constexpr int kEmJ = 13;
} // namespace

double zeta_hurwitz(double s, double a) {
    if (a <= 0.0) throw ConfigInvalid("hurwitz shift must be positive");
    if (std::abs(s - 1.0) < 1e-13) throw ConfigInvalid("hurwitz pole at s=1");
    double acc = 0.0;
    for (int k = 0; k < kEmN; ++k) acc += std::pow(a + k, -s);
    const double x = a + kEmN;
    acc += std::pow(x, 1.0 - s) / (s - 1.0);
    acc += 0.5 * std::pow(x, -s);
    double rising = s; // s (s+1) ... running product
    double xpow = std::pow(x, -s - 1.0);
    for (int j = 1; j <= kEmJ; ++j) {
        acc += kBern2j[j - 1] / std::tgamma(2.0 * j + 1.0) * rising * xpow;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        xpow /= x * x;
    }
    return acc;
}

double digamma(double a) {
    if (a <= 0.0) throw ConfigInvalid("digamma needs a > 0");
    double acc = 0.0;
    for (int k = 0; k < kEmN; ++k) acc -= 1.0 / (a + k);
    const double x = a + kEmN;
    acc += std::log(x) - 0.5 / x;
    double x2j = x * x;
    for (int j = 1; j <= kEmJ; ++j) {
        acc -= kBern2j[j - 1] / (2.0 * j * x2j);
        x2j *= x * x;
    }
    return acc;
}

// ---------------------------------------------------------------------
// Laurent polynomials

LaurentPoly LaurentPoly::mode(int m, cplx c) {
    LaurentPoly p;
    if (c != cplx(0, 0)) p.coeff[m] = c;
    return p;
}

LaurentPoly LaurentPoly::constant(cplx c) { return mode(0, c); }

bool LaurentPoly::is_zero(double eps) const {
    for (auto& [m, c] : coeff)
        if (std::abs(c) > eps) return false;
    return true;
}

int LaurentPoly::degree() const {
    int d = 0;
    for (auto& [m, c] : coeff)
        if (c != cplx(0, 0)) d = std::max(d, std::abs(m));
    return d;
}

cplx LaurentPoly::mean() const {
    auto it = coeff.find(0);
    return it == coeff.end() ? cplx(0, 0) : it->second;
}

LaurentPoly LaurentPoly::conj() const {
    LaurentPoly out;
    for (auto& [m, c] : coeff) out.coeff[-m] = std::conj(c);
    return out;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly out = a;
    for (auto& [m, c] : b.coeff) out.coeff[m] += c;
    return out;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly out = a;
    for (auto& [m, c] : b.coeff) out.coeff[m] -= c;
    return out;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly out;
    for (auto& [m, c] : a.coeff)
        for (auto& [n, d] : b.coeff) out.coeff[m + n] += c * d;
    return out;
}

LaurentPoly operator*(cplx s, const LaurentPoly& a) {
    LaurentPoly out;
    for (auto& [m, c] : a.coeff) out.coeff[m] = s * c;
    return out;
}

MatrixXcd window_matrix(const LaurentPoly& a, int M) {
    const int n = 2 * M + 1;
    MatrixXcd out = MatrixXcd::Zero(n, n);
    for (auto& [m, c] : a.coeff)
        for (int col = -M; col <= M; ++col) {
            int row = col + m;
            if (row >= -M && row <= M) out(row + M, col + M) += c;
        }
    return out;
}

// ---------------------------------------------------------------------
// Laurent forms

LaurentForm lf_d(const LaurentForm& x) {
    LaurentForm out;
    for (const auto& t : x.terms) {
        if (t.s0.is_zero()) continue;
        LaurentTerm nt;
        nt.unit0 = 1.0;
        nt.slots.push_back(t.s0);
        for (const auto& s : t.slots) nt.slots.push_back(s);
        out.terms.push_back(std::move(nt));
    }
    return out;
}

LaurentForm lf_b(const LaurentForm& x) {
    LaurentForm out;
    for (const auto& t : x.terms) {
        const int n = t.degree();
        if (n == 0) continue;
        {
            LaurentTerm nt;
            nt.s0 = t.s0 * t.slots[0] + t.unit0 * t.slots[0];
            nt.slots.assign(t.slots.begin() + 1, t.slots.end());
            out.terms.push_back(std::move(nt));
        }
        double sign = -1.0;
        for (int i = 1; i <= n - 1; ++i, sign = -sign) {
            LaurentTerm nt;
            nt.s0 = sign * t.s0;
            nt.unit0 = sign * t.unit0;
            for (int j = 0; j < i - 1; ++j) nt.slots.push_back(t.slots[j]);
            nt.slots.push_back(t.slots[i - 1] * t.slots[i]);
            for (int j = i + 1; j < n; ++j) nt.slots.push_back(t.slots[j]);
            out.terms.push_back(std::move(nt));
        }
        {
            LaurentTerm nt;
            double s = (n % 2 == 0) ? 1.0 : -1.0;
            nt.s0 = s * (t.slots[n - 1] * t.s0 + t.unit0 * t.slots[n - 1]);
            nt.slots.assign(t.slots.begin(), t.slots.end() - 1);
            out.terms.push_back(std::move(nt));
        }
    }
    return out;
}

LaurentForm lf_B(const LaurentForm& x) {
    LaurentForm out;
    for (const auto& t : x.terms) {
        if (t.s0.is_zero()) continue;
        const int n = t.degree();
        for (int i = 0; i <= n; ++i) {
            LaurentTerm nt;
            nt.unit0 = (n * i) % 2 == 0 ? 1.0 : -1.0;
            for (int j = i; j <= n; ++j)
                nt.slots.push_back(j == 0 ? t.s0 : t.slots[j - 1]);
            for (int j = 0; j < i; ++j)
                nt.slots.push_back(j == 0 ? t.s0 : t.slots[j - 1]);
            out.terms.push_back(std::move(nt));
        }
    }
    return out;
}

LaurentForm lf_filter_degree(const LaurentForm& x, int degree) {
    LaurentForm out;
    for (const auto& t : x.terms)
        if (t.degree() == degree) out.terms.push_back(t);
    return out;
}

LaurentPoly random_trig(int deg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LaurentPoly p;
    for (int m = -deg; m <= deg; ++m) p.coeff[m] = cplx(u(rng), u(rng));
    return p;
}

namespace {

void lf_right_mul(const LaurentTerm& t, const LaurentPoly& b, cplx coeff,
                  std::vector<LaurentTerm>& out) {
    const int n = t.degree();
    if (n == 0) {
        LaurentTerm nt;
        nt.s0 = coeff * (t.s0 * b + t.unit0 * b);
        out.push_back(std::move(nt));
        return;
    }
    {
        LaurentTerm nt = t;
        nt.slots[n - 1] = t.slots[n - 1] * b;
        nt.s0 = coeff * nt.s0;
        nt.unit0 = coeff * nt.unit0;
        out.push_back(std::move(nt));
    }
    LaurentTerm head;
    head.unit0 = t.unit0;
    head.s0 = t.s0;
    head.slots.assign(t.slots.begin(), t.slots.end() - 1);
    std::vector<LaurentTerm> inner;
    lf_right_mul(head, t.slots[n - 1], -coeff, inner);
    for (auto& w : inner) {
        w.slots.push_back(b);
        out.push_back(std::move(w));
    }
}

} // namespace

LaurentForm lf_mul(const LaurentForm& x, const LaurentForm& y) {
    LaurentForm out;
    for (const auto& s : x.terms)
        for (const auto& t : y.terms) {
            std::vector<LaurentTerm> zs;
            if (!t.s0.is_zero()) lf_right_mul(s, t.s0, 1.0, zs);
            if (t.unit0 != cplx(0, 0)) {
                LaurentTerm copy = s;
                copy.s0 = t.unit0 * copy.s0;
                copy.unit0 *= t.unit0;
                zs.push_back(std::move(copy));
            }
            for (auto& z : zs) {
                for (const auto& sl : t.slots) z.slots.push_back(sl);
                out.terms.push_back(std::move(z));
            }
        }
    return out;
}

void lf_add(LaurentForm& x, const LaurentForm& y, cplx coeff) {
    for (LaurentTerm t : y.terms) {
        t.s0 = coeff * t.s0;
        t.unit0 *= coeff;
        x.terms.push_back(std::move(t));
    }
}

LaurentForm chern_winding(int k, int top_degree) {
    LaurentForm out;
    if (k == 0) return out; // trivial class
    const cplx scale = 1.0 / std::sqrt(cplx(0.0, 2.0 * M_PI));

    LaurentForm f1; // u^{-1} du
    {
        LaurentTerm t;
        t.s0 = LaurentPoly::mode(-k);
        t.slots.push_back(LaurentPoly::mode(k));
        f1.terms.push_back(std::move(t));
    }
    LaurentForm du;
    {
        LaurentTerm t;
        t.unit0 = 1.0;
        t.slots.push_back(LaurentPoly::mode(k));
        du.terms.push_back(std::move(t));
    }
    LaurentForm g = lf_mul(du, f1); // du u^{-1} du

    LaurentForm block = f1;
    double kfact = 1.0;
    for (int j = 0; 2 * j + 1 <= top_degree; ++j) {
        if (j > 0) {
            kfact *= j;
            block = lf_mul(block, g);
        }
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        lf_add(out, block, scale * sign * kfact);
    }
    return out;
}

// ---------------------------------------------------------------------
// CircleOperator

const std::vector<cplx> CircleOperator::empty_poly_;

namespace {
double lambda_abs(long k) { return k == 0 ? 0.5 : (double)std::labs(k); }
double lambda_signed(long k) { return k == 0 ? 0.5 : (double)k; }

cplx eval_poly(const std::vector<cplx>& p, double x) {
    cplx acc(0, 0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a,
                           const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0, 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// P(x + c)
std::vector<cplx> poly_shift(const std::vector<cplx>& p, double c) {
    std::vector<cplx> out(p.size(), cplx(0, 0));
    for (size_t m = 0; m < p.size(); ++m) {
        double binom = 1.0, cpow = 1.0;
        for (size_t j = 0; j <= m; ++j) {
            out[m - j] += p[m] * binom * cpow;
            binom *= double(m - j) / double(j + 1);
            cpow *= c;
        }
    }
    return out;
}

void poly_acc(std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (b.size() > a.size()) a.resize(b.size(), cplx(0, 0));
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

} // namespace

CircleOperator CircleOperator::from_symbol(const LaurentPoly& a) {
    CircleOperator x;
    x.band_ = a.degree();
    x.core_ = 0;
    x.pos_.assign(2 * x.band_ + 1, {});
    x.neg_.assign(2 * x.band_ + 1, {});
    for (auto& [m, c] : a.coeff) {
        if (c == cplx(0, 0)) continue;
        x.pos_[m + x.band_] = {c};
        x.neg_[m + x.band_] = {c};
    }
    const long R = x.core_ + x.band_;
    for (long r = -R; r <= R; ++r)
        for (long c = -R; c <= R; ++c) {
            if (std::labs(r - c) > x.band_) continue;
            auto it = a.coeff.find((int)(r - c));
            if (it != a.coeff.end() && it->second != cplx(0, 0))
                x.exceptional_[{r, c}] = it->second;
        }
    return x;
}

CircleOperator CircleOperator::identity() {
    return from_symbol(LaurentPoly::constant(1.0));
}

CircleOperator CircleOperator::dirac() {
    CircleOperator x;
    x.band_ = 0;
    x.core_ = 0;
    x.pos_ = {{cplx(0, 0), cplx(1, 0)}};
    x.neg_ = {{cplx(0, 0), cplx(1, 0)}};
    x.exceptional_[{0, 0}] = 0.5;
    return x;
}

CircleOperator CircleOperator::abs_dirac() {
    CircleOperator x;
    x.band_ = 0;
    x.core_ = 0;
    x.pos_ = {{cplx(0, 0), cplx(1, 0)}};
    x.neg_ = {{cplx(0, 0), cplx(-1, 0)}};
    x.exceptional_[{0, 0}] = 0.5;
    return x;
}

CircleOperator CircleOperator::sign_dirac() {
    CircleOperator x;
    x.band_ = 0;
    x.core_ = 0;
    x.pos_ = {{cplx(1, 0)}};
    x.neg_ = {{cplx(-1, 0)}};
    x.exceptional_[{0, 0}] = 1.0;
    return x;
}

bool CircleOperator::is_zero(double eps) const {
    for (auto& p : pos_)
        for (auto& c : p)
            if (std::abs(c) > eps) return false;
    for (auto& p : neg_)
        for (auto& c : p)
            if (std::abs(c) > eps) return false;
    for (auto& [rc, v] : exceptional_)
        if (std::abs(v) > eps) return false;
    return true;
}

const std::vector<cplx>& CircleOperator::pos_poly(int d) const {
    if (std::abs(d) > band_) return empty_poly_;
    return pos_[d + band_];
}

const std::vector<cplx>& CircleOperator::neg_poly(int d) const {
    if (std::abs(d) > band_) return empty_poly_;
    return neg_[d + band_];
}

cplx CircleOperator::entry(long r, long c) const {
    if (std::labs(r - c) > band_) return 0.0;
    if (std::min(r, c) > core_) return eval_poly(pos_[r - c + band_], (double)c);
    if (std::max(r, c) < -core_) return eval_poly(neg_[r - c + band_], (double)c);
    auto it = exceptional_.find({r, c});
    return it == exceptional_.end() ? cplx(0, 0) : it->second;
}

void CircleOperator::rebuild_exceptional(const CircleOperator& x,
                                         const CircleOperator& y) {
    exceptional_.clear();
    const long R = core_ + band_;
    for (long r = -R; r <= R; ++r)
        for (long c = std::max(-R, r - (long)band_);
             c <= std::min(R, r + (long)band_); ++c) {
            cplx acc(0, 0);
            long mlo = std::max(c - (long)y.band_, r - (long)x.band_);
            long mhi = std::min(c + (long)y.band_, r + (long)x.band_);
            for (long m = mlo; m <= mhi; ++m) acc += x.entry(r, m) * y.entry(m, c);
            if (acc != cplx(0, 0)) exceptional_[{r, c}] = acc;
        }
}

CircleOperator operator*(const CircleOperator& x, const CircleOperator& y) {
    CircleOperator out;
    out.band_ = x.band_ + y.band_;
    out.core_ = std::max(x.core_, y.core_) + std::max(x.band_, y.band_);
    out.pos_.assign(2 * out.band_ + 1, {});
    out.neg_.assign(2 * out.band_ + 1, {});
    for (int e = -out.band_; e <= out.band_; ++e) {
        std::vector<cplx> accp, accn;
        for (int d2 = -y.band_; d2 <= y.band_; ++d2) {
            int d1 = e - d2;
            if (std::abs(d1) > x.band_) continue;
            // X_{c+d2+d1, c+d2} Y_{c+d2, c}: X poly evaluated at c+d2
            const auto& px = x.pos_poly(d1);
            const auto& py = y.pos_poly(d2);
            if (!px.empty() && !py.empty())
                poly_acc(accp, poly_mul(poly_shift(px, (double)d2), py));
            const auto& nx = x.neg_poly(d1);
            const auto& ny = y.neg_poly(d2);
            if (!nx.empty() && !ny.empty())
                poly_acc(accn, poly_mul(poly_shift(nx, (double)d2), ny));
        }
        out.pos_[e + out.band_] = std::move(accp);
        out.neg_[e + out.band_] = std::move(accn);
    }
    out.rebuild_exceptional(x, y);
    return out;
}

CircleOperator operator+(const CircleOperator& x, const CircleOperator& y) {
    CircleOperator out;
    out.band_ = std::max(x.band_, y.band_);
    out.core_ = std::max(x.core_, y.core_);
    out.pos_.assign(2 * out.band_ + 1, {});
    out.neg_.assign(2 * out.band_ + 1, {});
    for (int d = -out.band_; d <= out.band_; ++d) {
        std::vector<cplx> p = x.pos_poly(d);
        poly_acc(p, y.pos_poly(d));
        out.pos_[d + out.band_] = std::move(p);
        std::vector<cplx> n = x.neg_poly(d);
        poly_acc(n, y.neg_poly(d));
        out.neg_[d + out.band_] = std::move(n);
    }
    const long R = out.core_ + out.band_;
    for (long r = -R; r <= R; ++r)
        for (long c = std::max(-R, r - (long)out.band_);
             c <= std::min(R, r + (long)out.band_); ++c) {
            cplx v = x.entry(r, c) + y.entry(r, c);
            if (v != cplx(0, 0)) out.exceptional_[{r, c}] = v;
        }
    return out;
}

CircleOperator operator*(cplx s, const CircleOperator& x) {
    CircleOperator out = x;
    for (auto& p : out.pos_)
        for (auto& c : p) c *= s;
    for (auto& p : out.neg_)
        for (auto& c : p) c *= s;
    for (auto& [rc, v] : out.exceptional_) v *= s;
    return out;
}

CircleOperator CircleOperator::dirac_commutator() const {
    CircleOperator out;
    out.band_ = band_;
    out.core_ = core_;
    out.pos_.assign(2 * band_ + 1, {});
    out.neg_.assign(2 * band_ + 1, {});
    for (int d = -band_; d <= band_; ++d) {
        // lambda_{c+d} - lambda_c = d away from the shifted mode
        std::vector<cplx> p = pos_poly(d);
        for (auto& c : p) c *= (double)d;
        out.pos_[d + band_] = std::move(p);
        std::vector<cplx> n = neg_poly(d);
        for (auto& c : n) c *= (double)d;
        out.neg_[d + band_] = std::move(n);
    }
    const long R = core_ + band_;
    for (long r = -R; r <= R; ++r)
        for (long c = std::max(-R, r - (long)band_);
             c <= std::min(R, r + (long)band_); ++c) {
            cplx v = (lambda_signed(r) - lambda_signed(c)) * entry(r, c);
            if (v != cplx(0, 0)) out.exceptional_[{r, c}] = v;
        }
    return out;
}

CircleOperator CircleOperator::laplace_commutator() const {
    CircleOperator out;
    out.band_ = band_;
    out.core_ = core_;
    out.pos_.assign(2 * band_ + 1, {});
    out.neg_.assign(2 * band_ + 1, {});
    for (int d = -band_; d <= band_; ++d) {
        // lambda_{c+d}^2 - lambda_c^2 = d^2 + 2dc away from the shifted mode
        std::vector<cplx> factor = {cplx((double)d * d, 0), cplx(2.0 * d, 0)};
        const auto& p = pos_poly(d);
        if (!p.empty()) out.pos_[d + band_] = poly_mul(factor, p);
        const auto& n = neg_poly(d);
        if (!n.empty()) out.neg_[d + band_] = poly_mul(factor, n);
    }
    const long R = core_ + band_;
    for (long r = -R; r <= R; ++r)
        for (long c = std::max(-R, r - (long)band_);
             c <= std::min(R, r + (long)band_); ++c) {
            double l2r = sq(lambda_abs(r)), l2c = sq(lambda_abs(c));
            cplx v = (l2r - l2c) * entry(r, c);
            if (v != cplx(0, 0)) out.exceptional_[{r, c}] = v;
        }
    return out;
}

MatrixXcd CircleOperator::window(int M) const {
    const int n = 2 * M + 1;
    MatrixXcd out = MatrixXcd::Zero(n, n);
    for (long r = -M; r <= M; ++r)
        for (long c = std::max((long)-M, r - (long)band_);
             c <= std::min((long)M, r + (long)band_); ++c)
            out(r + M, c + M) = entry(r, c);
    return out;
}

// ---------------------------------------------------------------------
// ZetaTrace

cplx ZetaTrace::eval(double s) const {
    cplx acc(0, 0);
    for (auto& h : hurwitz) acc += h.coeff * zeta_hurwitz(s - h.power, h.shift);
    for (auto& e : entire) acc += e.coeff * std::pow(e.lambda, -s);
    return acc;
}

std::vector<double> ZetaTrace::pole_locations() const {
    std::vector<double> out;
    for (auto& h : hurwitz) {
        double p = h.power + 1.0;
        if (std::abs(h.coeff) == 0.0) continue;
        bool seen = false;
        for (double q : out) seen = seen || std::abs(q - p) < 1e-9;
        if (!seen) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

cplx ZetaTrace::residue_at(double s0) const {
    cplx acc(0, 0);
    for (auto& h : hurwitz)
        if (std::abs(h.power + 1.0 - s0) < 1e-9) acc += h.coeff;
    return acc;
}

ZetaTrace::Laurent ZetaTrace::laurent_at_zero(double scale,
                                              double offset) const {
    Laurent out{cplx(0, 0), cplx(0, 0)};
    for (auto& h : hurwitz) {
        double w0 = offset - h.power;
        if (std::abs(w0 - 1.0) < 1e-9) {
            out.res += h.coeff / scale;
            out.fin += -h.coeff * digamma(h.shift);
        } else {
            out.fin += h.coeff * zeta_hurwitz(w0, h.shift);
        }
    }
    for (auto& e : entire) out.fin += e.coeff * std::pow(e.lambda, -offset);
    return out;
}

ZetaTrace zeta_trace_of(const CircleOperator& X) {
    ZetaTrace z;
    const long K = X.core() + X.band();
    const auto& p = X.pos_poly(0);
    for (size_t m = 0; m < p.size(); ++m)
        if (p[m] != cplx(0, 0))
            z.hurwitz.push_back({p[m], (int)m, (double)(K + 1)});
    const auto& n = X.neg_poly(0);
    for (size_t m = 0; m < n.size(); ++m) {
        cplx c = n[m] * ((m % 2 == 0) ? 1.0 : -1.0); // P(-j), j >= K+1
        if (c != cplx(0, 0)) z.hurwitz.push_back({c, (int)m, (double)(K + 1)});
    }
    for (long k = -K; k <= K; ++k) {
        cplx v = X.entry(k, k);
        if (v != cplx(0, 0)) z.entire.push_back({v, lambda_abs(k)});
    }
    return z;
}

cplx zeta_trace_direct(const CircleOperator& X, double s, long kmax) {
    cplx acc(0, 0);
    for (long k = -kmax; k <= kmax; ++k)
        acc += X.entry(k, k) * std::pow(lambda_abs(k), -s);
    return acc;
}

} // namespace nci
