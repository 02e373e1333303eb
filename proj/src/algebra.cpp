#include "nci/algebra.hpp"

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include <cmath>
#include <utility>

namespace nci {

using nlohmann::json;

cplx LinearFunctional::operator()(const AlgebraElement& a) const {
    if (a.parent.get() != parent.get()) throw ParentMismatch();
    return weights.transpose() * a.coeffs;
}

FiniteAlgebra::FiniteAlgebra(int dim, std::vector<std::string> labels,
                             std::vector<cplx> structure, bool has_unit,
                             VectorXcd unit)
    : dim_(dim),
      labels_(std::move(labels)),
      c_(std::move(structure)),
      has_unit_(has_unit),
      unit_(std::move(unit)) {
    if (dim_ <= 0 || (int)c_.size() != dim_ * dim_ * dim_)
        throw ConfigInvalid("structure constant array has wrong size");
    if (labels_.empty()) {
        for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i));
    }
    left_.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
        MatrixXcd L = MatrixXcd::Zero(dim_, dim_);
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) L(k, j) = c(i, j, k);
        left_[i] = L;
    }
    if (associativity_residual() > Tol::associativity)
        throw ConfigInvalid("structure constants are not associative");
    if (has_unit_ && unit_residual() > Tol::unit)
        throw ConfigInvalid("declared unit is not a unit");
}

VectorXcd FiniteAlgebra::mul(const VectorXcd& a, const VectorXcd& b) const {
    VectorXcd out = VectorXcd::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
        if (a[i] == cplx(0, 0)) continue;
        out += a[i] * (left_[i] * b);
    }
    return out;
}

double FiniteAlgebra::associativity_residual() const {
    double worst = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            VectorXcd ij = left_[i].col(j); // e_i e_j
            for (int k = 0; k < dim_; ++k) {
                VectorXcd lhs = mul(ij, VectorXcd::Unit(dim_, k));
                VectorXcd jk = left_[j].col(k);
                VectorXcd rhs = mul(VectorXcd::Unit(dim_, i), jk);
                worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
            }
        }
    return worst;
}

double FiniteAlgebra::unit_residual() const {
    if (!has_unit_) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < dim_; ++i) {
        VectorXcd ei = VectorXcd::Unit(dim_, i);
        worst = std::max(worst, (mul(unit_, ei) - ei).cwiseAbs().maxCoeff());
        worst = std::max(worst, (mul(ei, unit_) - ei).cwiseAbs().maxCoeff());
    }
    return worst;
}

AlgebraElement FiniteAlgebra::element(VectorXcd v) const {
    if (v.size() != dim_) throw ConfigInvalid("coefficient length mismatch");
    return {shared_from_this(), std::move(v)};
}

AlgebraElement FiniteAlgebra::basis_element(int i) const {
    return element(VectorXcd::Unit(dim_, i));
}

AlgebraElement FiniteAlgebra::unit() const {
    if (!has_unit_) throw Singular("algebra has no unit");
    return element(unit_);
}

AlgebraElement FiniteAlgebra::zero() const {
    return element(VectorXcd::Zero(dim_));
}

AlgebraPtr make_matrix_algebra(int n) {
    if (n < 1) throw ConfigInvalid("matrix algebra needs n >= 1");
    const int d = n * n;
    auto idx = [n](int a, int b) { return a * n + b; };
    std::vector<cplx> c(d * d * d, cplx(0, 0));
    std::vector<std::string> labels(d);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            labels[idx(a, b)] =
                "E" + std::to_string(a + 1) + std::to_string(b + 1);
            for (int e = 0; e < n; ++e)
                for (int f = 0; f < n; ++f)
                    if (b == e)
                        c[(idx(a, b) * d + idx(e, f)) * d + idx(a, f)] = 1.0;
        }
    VectorXcd unit = VectorXcd::Zero(d);
    for (int a = 0; a < n; ++a) unit[idx(a, a)] = 1.0;
    return std::make_shared<FiniteAlgebra>(d, labels, c, true, unit);
}

AlgebraPtr make_group_algebra(const std::vector<std::vector<int>>& t) {
    const int n = (int)t.size();
    if (n == 0) throw NotAGroup("empty table");
    for (auto& row : t)
        if ((int)row.size() != n) throw NotAGroup("table not square");
    for (auto& row : t)
        for (int v : row)
            if (v < 0 || v >= n) throw NotAGroup("entry out of range");
    // identity
    int e = -1;
    for (int i = 0; i < n; ++i) {
        bool ok = true;
        for (int j = 0; j < n; ++j) ok = ok && t[i][j] == j && t[j][i] == j;
        if (ok) { e = i; break; }
    }
    if (e < 0) throw NotAGroup("no identity");
    // inverses
    for (int i = 0; i < n; ++i) {
        bool ok = false;
        for (int j = 0; j < n; ++j) ok = ok || (t[i][j] == e && t[j][i] == e);
        if (!ok) throw NotAGroup("missing inverse");
    }
    // associativity
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (t[t[i][j]][k] != t[i][t[j][k]])
                    throw NotAGroup("not associative");

    std::vector<cplx> c(n * n * n, cplx(0, 0));
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = "g" + std::to_string(i);
        for (int j = 0; j < n; ++j) c[(i * n + j) * n + t[i][j]] = 1.0;
    }
    VectorXcd unit = VectorXcd::Unit(n, e);
    return std::make_shared<FiniteAlgebra>(n, labels, c, true, unit);
}

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.parent.get() != b.parent.get()) throw ParentMismatch();
    return {a.parent, a.parent->mul(a.coeffs, b.coeffs)};
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.parent.get() != b.parent.get()) throw ParentMismatch();
    return {a.parent, a.coeffs + b.coeffs};
}

AlgebraElement scale(cplx s, const AlgebraElement& a) {
    return {a.parent, s * a.coeffs};
}

AlgebraElement invert(const AlgebraElement& a) {
    const auto& A = *a.parent;
    if (!A.has_unit()) throw Singular("inversion needs a unital algebra");
    const int d = A.dim();
    // left regular representation of a, then solve L x = unit
    MatrixXcd L = MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) L += a.coeffs[i] * A.left_regular(i);
    Eigen::PartialPivLU<MatrixXcd> lu(L);
    VectorXcd x = lu.solve(A.unit_coeffs());
    double resid = (A.mul(a.coeffs, x) - A.unit_coeffs()).norm() +
                   (A.mul(x, a.coeffs) - A.unit_coeffs()).norm();
    if (!x.allFinite() || resid > Tol::inverse_fail)
        throw Singular("inverse residual " + std::to_string(resid));
    return {a.parent, x};
}

bool verify_trace(LinearFunctional& phi) {
    const auto& A = *phi.parent;
    double worst = 0.0;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            cplx ij = phi.weights.transpose() * A.left_regular(i).col(j);
            cplx ji = phi.weights.transpose() * A.left_regular(j).col(i);
            worst = std::max(worst, std::abs(ij - ji));
        }
    phi.is_trace = worst <= Tol::trace;
    return phi.is_trace;
}

LinearFunctional matrix_trace_functional(const AlgebraPtr& A, int n) {
    VectorXcd w = VectorXcd::Zero(A->dim());
    for (int a = 0; a < n; ++a) w[a * n + a] = 1.0;
    LinearFunctional phi{A, w, false};
    verify_trace(phi);
    return phi;
}

AlgebraElement random_element(const AlgebraPtr& A, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXcd v(A->dim());
    for (int i = 0; i < A->dim(); ++i) v[i] = cplx(u(rng), u(rng));
    return {A, v};
}

static json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

static cplx cplx_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw SchemaMismatch("complex entry");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

AlgebraPtr algebra_from_json(const std::string& text) {
    json j = json::parse(text);
    const int d = j.at("dim").get<int>();
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    std::vector<cplx> c;
    c.reserve((size_t)d * d * d);
    const auto& cj = j.at("c");
    for (int i = 0; i < d; ++i)
        for (int p = 0; p < d; ++p)
            for (int k = 0; k < d; ++k) c.push_back(cplx_from_json(cj.at(i).at(p).at(k)));
    bool has_unit = j.contains("unit") && !j["unit"].is_null();
    VectorXcd unit = VectorXcd::Zero(d);
    if (has_unit)
        for (int i = 0; i < d; ++i) unit[i] = cplx_from_json(j["unit"].at(i));
    return std::make_shared<FiniteAlgebra>(d, labels, c, has_unit, unit);
}

std::string algebra_to_json(const FiniteAlgebra& A) {
    json j;
    j["dim"] = A.dim();
    j["labels"] = A.labels();
    json cj = json::array();
    for (int i = 0; i < A.dim(); ++i) {
        json ji = json::array();
        for (int p = 0; p < A.dim(); ++p) {
            json jp = json::array();
            for (int k = 0; k < A.dim(); ++k) jp.push_back(cplx_to_json(A.c(i, p, k)));
            ji.push_back(jp);
        }
        cj.push_back(ji);
    }
    j["c"] = cj;
    if (A.has_unit()) {
        json u = json::array();
        for (int i = 0; i < A.dim(); ++i) u.push_back(cplx_to_json(A.unit_coeffs()[i]));
        j["unit"] = u;
    } else {
        j["unit"] = nullptr;
    }
    return j.dump();
}

} // namespace nci
